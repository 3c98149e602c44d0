"""Woo-Lam, flawed and amended.

In the flawed version the server forwards {?U.?V}kbs without naming A, so a
key sent under kas can reappear under kbs for the wrong principal: kab's
lower bound picks up a renamed A from another session. Adding the
identities and nesting the ciphertext (the amended version) restores growth.
"""
import json

from wifn import DATA, analyze, render_json, render_text

for proto in ("woolam_flawed.proto", "woolam_amended.proto"):
    report = analyze(DATA / "woolam.ctx", DATA / proto)
    print(render_text(report))

flawed = json.loads(render_json(analyze(DATA / "woolam.ctx", DATA / "woolam_flawed.proto")))
kab = next(r for r in flawed["rows"] if r["atom"] == "kab@s")
print("JSON row for kab in the flawed run:")
print(json.dumps({k: kab[k] for k in ("role", "step", "type", "lower", "upper", "verdict")}, indent=2))
