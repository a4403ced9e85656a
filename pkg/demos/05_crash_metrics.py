"""Crashworthiness response metrics from curve and history data.

Average stiffness condenses a crush force-deflection curve into one feature
per component; peak force, peak averaged intrusion, total mass, and specific
energy absorption are the design objectives thresholds are applied to.
"""

import numpy as np

from designmine import (
    ForceDeflectionCurve,
    IntrusionHistories,
    apply_labels,
    avgstiff,
    LabelCriteria,
    peak_force,
    peak_intrusion,
    sea,
    total_mass,
)

print("=== analytic sanity cases ===")
u = np.linspace(0.0, 0.1, 11)
flat = ForceDeflectionCurve(u, np.full(11, 10.0))
print(f"constant 10 kN over 0.1 m : avgstiff = {avgstiff(flat):7.1f} kN/m (exact 100)")
ramp = ForceDeflectionCurve(u, 2000.0 * u)
print(f"linear ramp k = 2000 kN/m : avgstiff = {avgstiff(ramp):7.1f} kN/m (exact k/2)")
print(f"flat curve, mass 0.5 kg   : SEA      = {sea(flat, 0.5):7.1f} J/kg (exact 2000)")

print("\n=== a more realistic crush curve ===")
d = 0.25
uu = np.linspace(0.0, d, 60)
force = 85.0 * (1.0 - np.exp(-uu / 0.02)) + 40.0 * uu / d
curve = ForceDeflectionCurve(uu, force)
print(f"peak force        : {peak_force(curve.force):8.2f} kN")
print(f"average stiffness : {avgstiff(curve):8.2f} kN/m")
print(f"absorbed energy   : {curve.absorbed_energy():8.3f} kJ")
print(f"SEA at 1.1 kg     : {sea(curve, 1.1):8.1f} J/kg")

print("\n=== firewall intrusion from four markers ===")
t = np.linspace(0.0, 0.09, 46)
tau = t / t[-1]
base = 3.0 * tau**2 - 2.0 * tau**3
signals = np.stack([w * 230.0 * base for w in (0.9, 0.95, 1.05, 1.1)])
h = IntrusionHistories(t, signals)
print(f"individual marker maxima : {[f'{s.max():.1f}' for s in signals]} mm")
print(f"peak of the average      : {peak_intrusion(h):.1f} mm")

print("\n=== threshold labelling on the design objectives ===")
criteria = LabelCriteria(
    good=(("F_p", "<", 800.0), ("S_p", "<", 220.0), ("M", "<", 27.0)),
    poor=(("F_p", ">=", 800.0), ("S_p", ">", 260.0), ("M", ">", 28.0)),
)
designs = [
    {"F_p": 700.0, "S_p": 200.0, "M": 26.0},
    {"F_p": 750.0, "S_p": 240.0, "M": 26.5},
    {"F_p": 900.0, "S_p": 210.0, "M": 26.0},
]
for rec, label in zip(designs, apply_labels(designs, criteria)):
    print(f"  F_p={rec['F_p']:5.0f}  S_p={rec['S_p']:5.0f}  M={rec['M']:4.1f}  ->  '{label}'")

print(f"\ntotal mass of three parts: {total_mass([8.4, 9.6, 7.3]):.1f} kg")
