"""Run the structural checkers and print their JSON reports.

Sup-approximation is sampled at moderate amplitudes: at amplitude 10 the
cosh energies reach 1e7 and beyond, out of reach of alpha = 1000.  The cosh
doubling ratio is huge because cosh - 1 grows exponentially: no doubling
bound holds for it, although the plausibility flag (which only asks that no
sampled ratio was infinite) stays up.  Only an energy with a hard cap, which
jumps to infinity, trips that flag.

The last form is not a resistance form: (f(x) + f(y))**2 is not built from
differences, and the contraction check finds a witness against it.
"""
from reslab import CoshMinusOne, NetworkForm, ScaledPower, SumTerm, build_graph_form
from reslab.io import dumps_json
from reslab.verify import (
    check_contraction_compatibility, check_fundamental_inequalities, check_sup_approximation,
    check_triangle, estimate_delta2_nabla2, sample_functions,
)

forms = {
    "cosh path": build_graph_form("abc", [("a", "b", CoshMinusOne(1.0)),
                                          ("b", "c", CoshMinusOne(2.0))]),
    "cubic cycle": build_graph_form("abc", [("a", "b", ScaledPower(1.0, 3.0)),
                                            ("b", "c", ScaledPower(2.0, 3.0)),
                                            ("c", "a", ScaledPower(0.5, 3.0))]),
}
for name, form in forms.items():
    reports = [
        check_triangle(form, 1.0),
        check_contraction_compatibility(form, n_samples=500),
        check_fundamental_inequalities(form, 5),
        check_sup_approximation(form, sample_functions(form, 6, scales=(0.1, 1.0)), p_pen=1.0),
    ]
    print(f"== {name}")
    for rep in reports:
        print(f"  {rep.property:<28} passed={rep.passed}  worst={rep.worst_violation:.2e}")
    est = estimate_delta2_nabla2(form)
    print(f"  doubling constants: C = {est.c_hat:.3g}, K = {est.k_hat:.3g}, "
          f"Delta2 plausible: {est.delta2_plausible}")

bad = NetworkForm(("x", "y"), sums=(SumTerm("x", "y", ScaledPower(2.0, 2.0)),))
rep = check_contraction_compatibility(bad, n_samples=500, seed=1)
print("== non-difference energy")
print(dumps_json(rep.to_dict()))
