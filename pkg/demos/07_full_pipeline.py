"""The whole mining loop on the bundled three-component surrogate.

Per component: a 150-sample Latin hypercube DOE is pushed through the
analytic surrogate, the responses are threshold-labelled (g/m/p), an
uncertain tree (R = 10%) is trained, the most robust pure branch becomes the
design rule, 20 fresh candidates are drawn inside the rule box, and the ten
most reliable survive screening.  Finally 20 system designs are recombined by
drawing one screened final per component.

The command-line equivalent is `designmine demo --out <dir> --seed 7`.
"""

import json

from designmine import run_demo, load_surrogate
from designmine.cli import bundled_surrogate_text

spec = load_surrogate(json.loads(bundled_surrogate_text()))
print(f"surrogate: {spec.name} ({len(spec.components)} components)")

results, systems = run_demo(spec, seed=7)

for res in results:
    comp = res.component
    counts = {lab: res.labels.count(lab) for lab in ("g", "m", "p")}
    print(f"\n=== {comp.name} ===")
    print(f"labels over 150 samples: {counts}")
    print(f"training accuracy      : {res.train_accuracy:.4f}")
    print(f"selected rule          : {res.rules['selected']} "
          f"(acc {res.rule.acc:.3f}, ctt {res.rule.ctt:.3f})")
    for name, (lo, hi) in res.rule.box().items():
        print(f"    {lo:9.3f} <= {name:6} <= {hi:.3f}")
    kept = [d.lp["g"] for d in res.finals]
    everyone = [d.lp["g"] for d in res.ranked]
    print(f"screened top-10 mean lp(g): {sum(kept)/len(kept):.4f} "
          f"(all 20: {sum(everyone)/len(everyone):.4f})")

print("\n=== 20 recombined system designs ===")
masses = [s.total_mass for s in systems]
print(f"total mass range: {min(masses):.3f} .. {max(masses):.3f} kg")
best = min(systems, key=lambda s: s.total_mass)
print(f"lightest: design {best.id} with choices {best.choices}")
for name, resp in best.responses.items():
    print(f"    {name}: SEA {resp['SEA']:8.1f} J/kg, M {resp['M']:.3f} kg")
