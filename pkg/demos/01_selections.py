"""How the valuation reads one message.

An atom alpha travels inside two shared-key ciphertexts. Under the empty
theory the whole body of the outer ciphertext travels with alpha, so every
identity in it is selected. Homomorphic encryption lets anyone push pairs
out of a ciphertext, so the valuation works on the normal form, where alpha
sits alone under its keys.
"""
from wifn import DATA, Const, Theory, load_context_file, normalize, parse_term
from wifn.witness import Variant, external_protective_key, security_value, select, selection_level

ctx = load_context_file(DATA / "selection_example.ctx")
alpha = Const("alpha")
m = parse_term("{A.C.{alpha.D}kas}kab")

print(f"message: {m}")
print(f"external protective key of alpha: {external_protective_key(alpha, m, ctx)}")

for theory in Theory:
    c = ctx.with_theory(theory)
    n = normalize(m, theory)
    print(f"\n{theory.value} theory, normal form {n}")
    for variant in Variant:
        sel = select(variant, alpha, n, c)
        names = sorted(str(getattr(e, "atom", getattr(e, "key", e))) for e in sel.entries)
        print(f"  {variant.value:>3}: selects {names} -> {selection_level(sel, c)}"
              f"  (F = {security_value(variant, alpha, m, c)})")
