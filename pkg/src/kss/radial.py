"""Radial squeezed states ``psi(r) = N' r^alpha exp(-gamma0 r - i gamma1 r)``."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .specfun import MAX_N, hydro_radial, integrate_adaptive, ln_gamma

__all__ = [
    "RssState",
    "RadialExpectations",
    "rss_eval",
    "rss_expectations",
    "rss_coeff",
    "rss_overlaps",
    "radial_extent",
    "energy_n",
]

# composite Gauss-Legendre: 64 panels of 32 nodes to start, doubling
_PANEL_ORDER = 32
_START_NODES = 2048


@dataclass(frozen=True)
class RssState:
    alpha: float
    gamma0: float
    gamma1: float = 0.0
    log_norm: float = field(init=False, repr=False)

    def __post_init__(self):
        if not self.alpha > 0:
            raise DomainError(f"alpha must be positive, got {self.alpha!r}")
        if not self.gamma0 > 0:
            raise DomainError(f"gamma0 must be positive, got {self.gamma0!r}")
        for name in ("alpha", "gamma0", "gamma1"):
            object.__setattr__(self, name, float(getattr(self, name)))
        log_norm = 0.5 * (
            (2 * self.alpha + 3) * math.log(2 * self.gamma0) - ln_gamma(2 * self.alpha + 3)
        )
        object.__setattr__(self, "log_norm", log_norm)


def rss_log_abs(state: RssState, r):
    """``ln|psi(r)|``; ``-inf`` at the origin."""
    r = np.asarray(r, dtype=float)
    with np.errstate(divide="ignore"):
        return state.log_norm + state.alpha * np.log(r) - state.gamma0 * r


def rss_eval(state: RssState, r):
    """Evaluate ``psi(r)`` (complex); vectorised over ``r``."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise DomainError("radius must be non-negative")
    out = np.exp(rss_log_abs(state, r)) * np.exp(-1j * state.gamma1 * r)
    return complex(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class RadialExpectations:
    r_mean: float
    r_inv: float
    r_sq: float
    r_inv_sq: float
    p_r: float
    p_r_sq: float
    dr_dpr: float

    @property
    def delta_r(self) -> float:
        return math.sqrt(self.r_sq - self.r_mean**2)


def rss_expectations(state: RssState) -> RadialExpectations:
    """Closed-form radial moments; ``p_r = -i (d/dr + 1/r)``."""
    a, g0, g1 = state.alpha, state.gamma0, state.gamma1
    return RadialExpectations(
        r_mean=(2 * a + 3) / (2 * g0),
        r_inv=g0 / (a + 1),
        r_sq=(a + 2) * (2 * a + 3) / (2 * g0**2),
        r_inv_sq=2 * g0**2 / ((a + 1) * (2 * a + 1)),
        p_r=-g1,
        p_r_sq=g0**2 / (2 * a + 1) + g1**2,
        dr_dpr=0.5 * math.sqrt((2 * a + 3) / (2 * a + 1)),
    )


def radial_extent(state: RssState, n_bar=None) -> float:
    """Upper cut-off for radial integrals involving ``psi``.

    ``psi`` is negligible beyond 30 radial widths past its mean, which bounds
    any overlap integrand.  With ``n_bar`` given the cut-off is at least
    ``4 n_bar^2``.
    """
    mom = rss_expectations(state)
    r_max = mom.r_mean + 30.0 * mom.delta_r
    if n_bar is not None:
        r_max = max(r_max, 4.0 * n_bar**2)
    return r_max


def rss_overlaps(state: RssState, basis, r_max=None, rtol=1e-8):
    """Overlaps ``int conj(f_k(r)) psi(r) r^2 dr`` for real radial functions.

    ``basis`` is a sequence of vectorised callables ``f_k(r)``.  One shared
    composite Gauss-Legendre grid is refined until every overlap is stable
    to ``rtol`` (relative, with an absolute floor of ``1e-14``).
    """
    if r_max is None:
        r_max = radial_extent(state)

    def integrand(r):
        psi_r2 = rss_eval(state, r) * r * r
        return np.stack([f(r) * psi_r2 for f in basis])

    return integrate_adaptive(
        integrand, 0.0, r_max, rtol=rtol, atol=1e-14,
        n0=_START_NODES, composite=True, order=_PANEL_ORDER,
    )


def rss_coeff(state: RssState, n: int, l: int, rtol: float = 1e-8) -> complex:
    """Radial expansion coefficient ``<R_nl | psi>`` by quadrature."""
    if not 0 <= l < n <= MAX_N:
        raise DomainError(f"need 0 <= l < n <= {MAX_N}, got n={n}, l={l}")
    out = rss_overlaps(state, [lambda r: hydro_radial(n, l, r)], rtol=rtol)
    return complex(out[0])


def energy_n(n) -> float:
    """Hydrogenic energy ``-1/(2 n^2)`` in hartree; ``n`` may be non-integer."""
    if not n > 0:
        raise DomainError(f"n must be positive, got {n}")
    return -0.5 / n**2
