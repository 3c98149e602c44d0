"""Needham-Schroeder-Lowe under homomorphic encryption.

The fix that makes NSL safe in the free algebra (B's identity next to Nb)
is undone by homomorphism: the intruder can split {B.Nb}ka into {B}ka.{Nb}ka
and recombine. The analyzer reports the forwarded variables X and Y as
failing the growth condition.
"""
from wifn import DATA, analyze, message_space, render_text, unifiable_patterns
from wifn.roles import generalize, load_narration_file
from wifn.context import load_context_file

ctx = load_context_file(DATA / "nsl.ctx")
roles = generalize(load_narration_file(DATA / "nsl.proto"), ctx)

print("Generalized roles:")
for r in roles:
    print(f"  {r.name}: " + "  ".join(f"{s.direction.value} {s.payload}" for s in r.steps))

space = message_space(roles, ctx)
print(f"\nMessage space ({len(space)} patterns):")
print("  " + str(space).replace("\n", "\n  "))

print("\nSources unifiable with the sent component {B.?Y}ka:")
for pattern, sigma in unifiable_patterns(space, roles[2].steps[1].payload.left, ctx):
    print(f"  {pattern}  via {{{', '.join(f'{k} -> {v}' for k, v in sigma.items())}}}")

print()
print(render_text(analyze(DATA / "nsl.ctx", DATA / "nsl.proto")))

print("Hashing the returned nonces hides them from the intruder's rewriting:")
print(render_text(analyze(DATA / "nsl.ctx", DATA / "nsl_hash.proto")))
