"""Keplerian squeezed states: product states, orbit geometry and fitting.

A KSS is ``Psi(r, theta, phi) = psi(r) chi(theta, phi)``, an RSS times an
SSS.  Its five parameters ``(alpha, beta, gamma0, gamma1, delta)`` are fixed
from five physical targets: mean radius at the outer apsidal point, zero
mean radial momentum, ``<L3>``, its spread, and the mean energy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .angular import SssState, sss_eval, sss_expectations, solve_delta
from .errors import BracketError, DomainError, InfeasibleError
from .radial import RssState, radial_extent, rss_eval, rss_expectations
from .specfun import (
    RootBracket,
    composite_gauss_legendre,
    gauss_legendre,
    integrate,
    solve_root,
)

__all__ = [
    "KssState",
    "InitConditions",
    "OrbitGeometry",
    "kss_eval",
    "kss_energy",
    "orbit_geometry",
    "fit_params",
    "classical_period",
    "state_norm",
]


@dataclass(frozen=True)
class KssState:
    rss: RssState
    sss: SssState

    @classmethod
    def from_params(cls, alpha, beta, gamma0, gamma1, delta) -> "KssState":
        return cls(RssState(alpha, gamma0, gamma1), SssState(beta, delta))

    @property
    def alpha(self):
        return self.rss.alpha

    @property
    def beta(self):
        return self.sss.beta

    @property
    def gamma0(self):
        return self.rss.gamma0

    @property
    def gamma1(self):
        return self.rss.gamma1

    @property
    def delta(self):
        return self.sss.delta

    def params(self) -> dict:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "gamma0": self.gamma0,
            "gamma1": self.gamma1,
            "delta": self.delta,
        }


def kss_eval(state: KssState, r, theta, phi):
    """``psi(r) chi(theta, phi)`` on broadcast coordinate arrays."""
    return rss_eval(state.rss, r) * sss_eval(state.sss, theta, phi)


@dataclass(frozen=True)
class InitConditions:
    """Physical targets for a KSS at the outer apsidal point.

    ``r_target`` defaults to the outer apsidal radius implied by ``n_bar``
    and the fitted ``<L^2>``.
    """

    n_bar: float
    l3_target: int
    delta_l3: float
    p_r_target: float = 0.0
    r_target: float | None = None

    def __post_init__(self):
        if not self.n_bar > 0:
            raise DomainError(f"n_bar must be positive, got {self.n_bar!r}")
        if int(self.l3_target) != self.l3_target or self.l3_target < 1:
            raise DomainError(f"l3_target must be a positive integer, got {self.l3_target!r}")
        if not self.l3_target < self.n_bar:
            raise DomainError("l3_target must be smaller than n_bar")
        if not self.delta_l3 > 0:
            raise DomainError(f"delta_l3 must be positive, got {self.delta_l3!r}")
        if self.r_target is not None and not self.r_target > 0:
            raise DomainError("r_target must be positive")


@dataclass(frozen=True)
class OrbitGeometry:
    r_out: float
    r_in: float
    t_cl: float
    eccentricity: float


def classical_period(n_bar) -> float:
    """Kepler period ``2 pi n^3`` in atomic time units."""
    return 2.0 * math.pi * n_bar**3


def orbit_geometry(n_bar: float, l_sq: float) -> OrbitGeometry:
    """Apsidal radii, period and eccentricity of the matching Kepler ellipse."""
    if not n_bar > 0 or l_sq < 0:
        raise DomainError(f"need n_bar > 0 and l_sq >= 0, got {n_bar}, {l_sq}")
    if l_sq >= n_bar**2:
        raise DomainError(f"l_sq={l_sq} must be below n_bar^2={n_bar**2}")
    ecc = math.sqrt(1.0 - l_sq / n_bar**2)
    a = n_bar**2
    return OrbitGeometry(
        r_out=a * (1.0 + ecc),
        r_in=a * (1.0 - ecc),
        t_cl=classical_period(n_bar),
        eccentricity=ecc,
    )


def kss_energy(state: KssState) -> float:
    """``<H> = <p_r^2>/2 + <1/r^2><L^2>/2 - <1/r>`` from the closed forms."""
    rad = rss_expectations(state.rss)
    ang = sss_expectations(state.sss)
    return 0.5 * rad.p_r_sq + 0.5 * rad.r_inv_sq * ang.l_sq - rad.r_inv


def _energy_residual(alpha, r_mean, l_sq, gamma1, energy):
    g0 = (2 * alpha + 3) / (2 * r_mean)
    return (
        0.5 * g0**2 / (2 * alpha + 1)
        + l_sq * g0**2 / ((alpha + 1) * (2 * alpha + 1))
        - g0 / (alpha + 1)
        + 0.5 * gamma1**2
        - energy
    )


def fit_with_level(cond: InitConditions, n_level: float) -> KssState:
    """Fit the five parameters with energy ``-1/(2 n_level^2)``.

    The outer apsidal point (when ``cond.r_target`` is unset) also uses
    ``n_level``.  :func:`fit_params` passes ``n_bar``; the quantum-defect
    variant passes the shifted level.
    """
    beta = int(cond.l3_target)
    delta = solve_delta(beta, cond.delta_l3)
    l_sq = sss_expectations(SssState(beta, delta)).l_sq
    if cond.r_target is not None:
        r_mean = float(cond.r_target)
    else:
        r_mean = orbit_geometry(n_level, l_sq).r_out
    gamma1 = -float(cond.p_r_target) if cond.p_r_target else 0.0
    energy = -0.5 / n_level**2

    lo, hi = float(beta), 10.0 * cond.n_bar

    def resid(alpha):
        return _energy_residual(alpha, r_mean, l_sq, gamma1, energy)

    try:
        alpha = solve_root(resid, RootBracket(lo, hi, 1e-12))
    except BracketError as exc:
        raise InfeasibleError(
            f"no alpha in [{lo}, {hi}] meets the energy target {energy:.6g}",
            residuals={"alpha_lo": resid(lo), "alpha_hi": resid(hi)},
        ) from exc
    gamma0 = (2 * alpha + 3) / (2 * r_mean)
    return KssState(RssState(alpha, gamma0, gamma1), SssState(beta, delta))


def fit_params(cond: InitConditions) -> KssState:
    """KSS parameters from the physical initialisation targets.

    The sequence is: ``beta = <L3>``; ``delta`` from the ``Delta L3`` target;
    ``<L^2>`` from the angular closed forms; ``<r>`` at the outer apsidal
    point; ``gamma1 = -<p_r>``; finally ``alpha`` from the energy equation
    with ``gamma0 = (2 alpha + 3) / (2 <r>)`` substituted.
    """
    return fit_with_level(cond, cond.n_bar)


def state_norm(state: KssState, n_theta=256, n_phi=256, n_r=4096) -> float:
    """Norm of the product state by separate radial and angular quadratures."""
    rule_r = composite_gauss_legendre(n_r // 32, 32, 0.0, radial_extent(state.rss))
    radial = integrate(lambda r: np.abs(rss_eval(state.rss, r)) ** 2 * r * r, rule_r)
    rule_t = gauss_legendre(n_theta, 0.0, math.pi)
    phi = 2.0 * math.pi * np.arange(n_phi) / n_phi
    chi2 = np.abs(sss_eval(state.sss, rule_t.nodes[:, None], phi[None, :])) ** 2
    angular = np.sum(rule_t.weights * np.sin(rule_t.nodes) * chi2.sum(axis=1)) * 2 * math.pi / n_phi
    return float(radial * angular)
