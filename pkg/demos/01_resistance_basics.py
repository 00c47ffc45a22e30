"""Resistances on the smallest network.

One edge with energy |f(x) - f(y)|**2.  Every quantity has a closed form,
so this script doubles as a sanity check of the installation.
"""
from pathlib import Path

from reslab import (
    conjugate, elementary_resistance, load_network, luxemburg, orlicz, t_resistance,
)

form = load_network(Path(__file__).parent / "networks" / "edge.json")

print("elementary resistance R(x, y) =", elementary_resistance(form, "x", "y"))

# the t-resistance is E* evaluated at t (delta_x - delta_y); for this
# quadratic energy it grows like t**2 / 4
for t in (0.5, 1.0, 2.0, 4.0):
    print(f"  R_t(x, y) at t = {t}: {t_resistance(form, 'x', 'y', t):.6f}  (t^2/4 = {t * t / 4})")

# the two gauges differ by exactly a factor of two here
f = [3.0, 0.0]
print("Luxemburg gauge of (3, 0):", luxemburg(form, f))
print("Orlicz gauge of (3, 0):   ", orlicz(form, f))

# the conjugate is infinite off the balanced functionals
print("E*((1, -1)) =", conjugate(form, [1.0, -1.0]))
print("E*((1, 0))  =", conjugate(form, [1.0, 0.0]))
