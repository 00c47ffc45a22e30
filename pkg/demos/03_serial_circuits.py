"""Gluing two networks in series.

Identifying one vertex of each network adds the t-resistances.  Joining
them through a quadratic connector instead adds a further eps * t**2.
The left operand here is a hypergraph.
"""
from pathlib import Path

from reslab import load_network, series_identify, series_resistor, t_resistance

here = Path(__file__).parent / "networks"
left = load_network(here / "hyper_mixed.json")
right = load_network(here / "cosh_path.json")
t = 1.5

parts = t_resistance(left, "a", "d", t) + t_resistance(right, "a", "c", t)
# shared labels in the right operand get a prime
glued = series_identify(left, "d", right, "a")
print("glued vertices:", glued.vertices)
far = "c'"
print(f"R_t across the identified circuit: {t_resistance(glued, 'a', far, t):.6f}")
print(f"sum of the two parts:              {parts:.6f}")

for eps in (1e-4, 0.1, 1.0):
    wired = series_resistor(left, "d", right, "a", eps)
    value = t_resistance(wired, "a", far, t)
    print(f"eps = {eps:<6} through a connector: {value:.6f}   parts + eps t^2: "
          f"{parts + eps * t * t:.6f}")
