"""Resistances, gauges and structural checks for nonlinear network energies."""
from .convex import (
    Capped, CoshMinusOne, FoldAt, Identity, MinWith, Negate, PiecewiseLinear, ScaledPower,
)
from .errors import *  # noqa: F401,F403
from .forms import (
    Edge, Hyperedge, NetworkForm, SumTerm, adjoin_boundary_point, build_graph_form,
    build_hypergraph_form, disjoint_labels, restrict_dirichlet, series_identify, series_resistor,
)
from .io import dumps_network, load_network, parse_network
from .resistance import (
    ResistanceMatrix, approximating_form, conjugate, conjugate_maximizer, elementary_resistance,
    luxemburg, orlicz, resistance_matrix, resistance_to_infinity, t_resistance,
    t_resistance_to_infinity,
)
from .solvers import (
    DEFAULT_CONFIG, SolveConfig, SolveOutcome, Status, min_energy_on_level, minimize_composite,
    sup_linear_over_sublevel,
)
from .verify import VerifyReport

__version__ = "0.1.0"
