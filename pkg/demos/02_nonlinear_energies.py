"""What changes when the energy is not a power.

For a p-homogeneous energy the t-resistance is a fixed power of R.  The
cosh(u) - 1 edge energy has no such scaling, and the ratio drifts with t.
A p = 1 edge shows the opposite extreme: R_t only takes the values 0 and inf.
"""
from pathlib import Path

from reslab import (
    ScaledPower, build_graph_form, elementary_resistance, load_network, t_resistance,
)

here = Path(__file__).parent / "networks"
cosh = load_network(here / "cosh_path.json")
quad = build_graph_form("abc", [("a", "b", ScaledPower(2.0, 2.0)), ("b", "c", ScaledPower(2.0, 2.0))])

for name, form in (("quadratic path", quad), ("cosh path", cosh)):
    R = elementary_resistance(form, "a", "c")
    print(f"{name}: R(a, c) = {R:.6f}")
    for t in (0.25, 1.0, 4.0):
        Rt = t_resistance(form, "a", "c", t)
        # for p = 2 the identity reads R_t = t**2 R**2 / 4
        print(f"  t = {t:<5} R_t = {Rt:.6f}   t^2 R^2 / 4 = {t * t * R * R / 4:.6f}")

p1 = build_graph_form("xy", [("x", "y", ScaledPower(1.0, 1.0))])
R = elementary_resistance(p1, "x", "y")
print(f"p = 1 edge: R = {R:.4f}")
for t in (0.5, 0.99, 1.01, 2.0):
    print(f"  t R = {t * R:.2f} -> R_t = {t_resistance(p1, 'x', 'y', t)}")
