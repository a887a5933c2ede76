"""
Cantilever deflection with shear correction
============================================

Deflection profiles of the flexible wrist beam, the constant-curvature tip
pose, and the tendon-moment static gain used by the plant.
"""

import math

import numpy as np

from wristmrac import beam

p = beam.BeamParams()
print(f"EI = {p.flexural_rigidity:.3g} N m^2, KAG = {p.shear_rigidity:.3g} N")

# Profile under a 1 N tip load, measured from the clamped base.
x = np.linspace(0.0, p.length, 6)
y = beam.deflection_profile_corrected(p, 1.0, x)
for xi, yi in zip(x, y):
    print(f"x = {xi:.3f} m   y = {yi:.6e} m")

# The free-end form gives the same tip value at its own origin.
print("tip (base coords):", beam.tip_deflection(p, 1.0, "corrected"))
print("tip (free-end coords):", beam.tip_deflection(p, 1.0, "paper"))

# Shear share of the tip deflection shrinks as the beam gets stiffer in shear.
for g in (4e5, 4e7, 4e9):
    q = beam.BeamParams(shear_modulus=g)
    share = beam.shear_deflection(q, 1.0, q.length) / beam.tip_deflection(q, 1.0)
    print(f"G = {g:.0e}: shear share {share:.2%}")

# A 30 degree bend as a circular arc.
pose = beam.tip_pose(p, math.pi / 6)
print(f"30 deg arc tip: x = {pose.x:.5f} m, y = {pose.y:.5f} m")

# Tendon tension to tip deflection.
print(f"static gain R L^2 / (2 E I) = {beam.static_gain(p):.4f} m/N")
