"""Keplerian squeezed states of the Coulomb problem.

Build a minimum-uncertainty wave packet from physical targets, expand it
in hydrogenic (or quantum-defect shifted) eigenstates and evolve it::

    >>> from kss import InitConditions, fit_params
    >>> state = fit_params(InitConditions(n_bar=45, l3_target=30, delta_l3=2.5))
    >>> round(state.alpha, 3)
    62.846
"""

from .angular import SssState, a_fn, a_fn_closed, solve_delta, sss_coeff, sss_eval, sss_expectations
from .core import (
    InitConditions,
    KssState,
    OrbitGeometry,
    classical_period,
    fit_params,
    kss_energy,
    kss_eval,
    orbit_geometry,
    state_norm,
)
from .errors import (
    AccuracyError,
    BracketError,
    DomainError,
    InfeasibleError,
    KssError,
    RangeError,
    UnsupportedMethodError,
)
from .evolution import (
    CoeffTable,
    GridAxis,
    SliceGrid,
    Window,
    density_slice,
    evolve_eval,
    expand,
    expectation_r_t,
)
from .qdt import DefectTable, SqdtLabels, fit_params_qdt, sqdt_energy, sqdt_expand, sqdt_labels, sqdt_radial
from .radial import RssState, energy_n, rss_coeff, rss_eval, rss_expectations

__version__ = "0.1.0"
