"""Spherical squeezed states on the unit sphere.

The state is ``chi(theta, phi) = N sin^beta(theta) exp(delta sin(theta) cos(phi)
+ i beta phi)``.  All its moments are ratios of the integrals

    A_j^beta(delta) = 2 pi int_0^pi sin^(2 beta + j + 1)(theta) I_j(2 delta sin theta) dtheta,

which are evaluated here by Gauss-Legendre quadrature of the (positive,
smooth) integrand.  The alternating closed form in terms of modified
spherical Bessel functions is kept as :func:`a_fn_closed` for cross-checks
at small ``beta``, where it does not cancel catastrophically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import mpmath
import numpy as np
from scipy import special

from .errors import DomainError, InfeasibleError, RangeError, UnsupportedMethodError
from .specfun import (
    RootBracket,
    gauss_legendre,
    integrate_adaptive,
    legendre_table,
    log_double_factorial,
    solve_root,
    sph_bessel_i,
)

__all__ = [
    "SssState",
    "AngularExpectations",
    "a_fn",
    "a_fn_closed",
    "sss_eval",
    "sss_expectations",
    "solve_delta",
    "sss_coeff",
    "sss_coeff_table",
    "J_MAX",
    "BETA_MAX",
    "DELTA_MAX",
]

J_MAX = 6
BETA_MAX = 60
DELTA_MAX = 40.0

# theta-rule for the A integrals: 128 nodes, doubled until converged
_A_NODES = 128
_A_RTOL = 1e-12

# 2D grid for the quadrature route to the expansion coefficients
_COEFF_THETA = 256
_COEFF_PHI = 256


def _check_envelope(j, beta, delta):
    if int(j) != j or j < 0 or int(beta) != beta or beta < 0:
        raise DomainError(f"j and beta must be non-negative integers, got j={j}, beta={beta}")
    if delta < 0:
        raise DomainError(f"delta must be non-negative, got {delta}")
    if j > J_MAX or beta > BETA_MAX or delta > DELTA_MAX:
        raise RangeError(
            f"A_j^beta(delta) validated for j <= {J_MAX}, beta <= {BETA_MAX}, "
            f"delta <= {DELTA_MAX}; got j={j}, beta={beta}, delta={delta}"
        )


@lru_cache(maxsize=4096)
def _a_quad(j: int, beta: int, delta: float) -> float:
    # beta = -1 shows up only as A_1^(beta-1) at beta = 0, where the power is zero
    if delta == 0.0:
        if j > 0:
            return 0.0
        return 4.0 * math.pi * math.exp(
            log_double_factorial(2 * beta) - log_double_factorial(2 * beta + 1)
        )
    power = 2 * beta + j + 1

    def integrand(theta):
        s = np.sin(theta)
        return s**power * special.iv(j, 2.0 * delta * s)

    # symmetric about pi/2: integrate one half and double
    half = integrate_adaptive(integrand, 0.0, 0.5 * math.pi, rtol=_A_RTOL, n0=_A_NODES)
    return float(4.0 * math.pi * half)


def a_fn(j: int, beta: int, delta: float) -> float:
    """``A_j^beta(delta)`` by quadrature of its defining theta-integral.

    At ``delta = 0`` the analytic limit is returned: zero for ``j > 0`` and
    ``4 pi (2 beta)!! / (2 beta + 1)!!`` for ``j = 0``.
    """
    _check_envelope(j, beta, delta)
    return _a_quad(int(j), int(beta), float(delta))


def a_fn_closed(j: int, beta: int, delta: float) -> float:
    """``A_j^beta(delta)`` from the finite alternating Bessel sum.

    Only trustworthy for small ``beta`` (about 10 or less); the terms
    alternate in sign and grow like ``delta^-k``.
    """
    _check_envelope(j, beta, delta)
    if delta == 0.0:
        return _a_quad(int(j), int(beta), 0.0)
    terms = [
        (-1) ** k / delta**k * math.comb(beta, k) * math.gamma(k + 0.5)
        * sph_bessel_i(j + k, 2.0 * delta)
        for k in range(beta + 1)
    ]
    return 4.0 * math.sqrt(math.pi) * math.fsum(terms)


@dataclass(frozen=True)
class SssState:
    """Spherical squeezed state with ``<L3> = beta`` and squeezing ``delta``."""

    beta: int
    delta: float
    norm: float = field(init=False, repr=False)

    def __post_init__(self):
        if int(self.beta) != self.beta or self.beta < 0:
            raise DomainError(f"beta must be a non-negative integer, got {self.beta!r}")
        if not self.delta >= 0:
            raise DomainError(f"delta must be non-negative, got {self.delta!r}")
        object.__setattr__(self, "beta", int(self.beta))
        object.__setattr__(self, "delta", float(self.delta))
        object.__setattr__(self, "norm", 1.0 / math.sqrt(a_fn(0, self.beta, self.delta)))


def sss_eval(state: SssState, theta, phi):
    """Evaluate ``chi(theta, phi)``; vectorised over the angles."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    if np.any((theta < 0) | (theta > math.pi)):
        raise DomainError("theta must lie in [0, pi]")
    s = np.sin(theta)
    mag = state.norm * s**state.beta * np.exp(state.delta * s * np.cos(phi))
    out = mag * np.exp(1j * state.beta * phi)
    return complex(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class AngularExpectations:
    a1: float
    a1_sq: float
    a2_sq: float
    a3_sq: float
    l3: float
    l3_sq: float
    l_sq: float
    # <L3^2> - <L3>^2, kept separately to avoid cancelling against beta^2
    l3_var: float

    @property
    def delta_l3(self) -> float:
        return math.sqrt(self.l3_var)

    @property
    def delta_a2(self) -> float:
        return math.sqrt(self.a2_sq)

    @property
    def l_bar(self) -> float:
        """Mean ``l`` defined through ``l_bar (l_bar + 1) = <L^2>``."""
        return 0.5 * (math.sqrt(1.0 + 4.0 * self.l_sq) - 1.0)


def sss_expectations(state: SssState) -> AngularExpectations:
    """Closed-form angular expectation values of an SSS."""
    b, d = state.beta, state.delta
    # one step above the public envelope is needed for A_0^(beta+1)
    a0 = _a_quad(0, b, d)
    a0_up = _a_quad(0, b + 1, d)
    if d == 0.0:
        a1_sq = a0_up / (2.0 * a0)
        return AngularExpectations(
            a1=0.0, a1_sq=a1_sq, a2_sq=a1_sq, a3_sq=(a0 - a0_up) / a0,
            l3=float(b), l3_sq=float(b * b), l_sq=float(b * (b + 1)), l3_var=0.0,
        )
    a1_b = _a_quad(1, b, d)
    a2_b = _a_quad(2, b, d)
    a1 = a1_b / a0
    a1_sq = (a0_up + a2_b) / (2.0 * a0)
    l3_var = 0.5 * d * a1
    bracket = (b + 1) * a1_b - (b * _a_quad(1, b - 1, d) if b > 0 else 0.0)
    l_sq = b * (b + 1) - d * d * (1.0 - a1_sq) + 2.0 * d / a0 * bracket
    return AngularExpectations(
        a1=a1,
        a1_sq=a1_sq,
        a2_sq=a1 / (2.0 * d),
        a3_sq=(a0 - a0_up) / a0,
        l3=float(b),
        l3_sq=l3_var + b * b,
        l_sq=l_sq,
        l3_var=l3_var,
    )


def solve_delta(beta: int, delta_l3: float, tol: float = 1e-12) -> float:
    """Squeezing ``delta`` giving the angular-momentum spread ``delta_l3``.

    Solves ``(delta / 2) <a1>(delta) = delta_l3^2`` on ``[0, DELTA_MAX]``.
    """
    if int(beta) != beta or beta < 1:
        raise DomainError(f"beta must be a positive integer, got {beta!r}")
    if not delta_l3 > 0:
        raise DomainError(f"delta_l3 must be positive, got {delta_l3!r}")
    target = float(delta_l3) ** 2

    def resid(d):
        if d == 0.0:
            return -target
        return 0.5 * d * _a_quad(1, beta, d) / _a_quad(0, beta, d) - target

    top = resid(DELTA_MAX)
    if top < 0:
        raise InfeasibleError(
            f"delta_l3={delta_l3} not reachable for beta={beta} with delta <= {DELTA_MAX}",
            residuals={"delta=0": -target, f"delta={DELTA_MAX}": top},
        )
    return solve_root(resid, RootBracket(0.0, DELTA_MAX, tol))


# --------------------------------------------------------------------------
# Expansion in spherical harmonics
# --------------------------------------------------------------------------

def _coeff_closed(state: SssState, l: int, m: int, dps: int = 40) -> float:
    # Double sum over the Legendre power series (k) and the binomial
    # expansion of the surplus sin^2 power (p).  For m > beta the Bessel
    # order is |beta - m| + q/2, which reduces to the familiar index when
    # m <= beta.  Terms cancel heavily for l - m >~ 6, hence mpmath.
    b, d = state.beta, state.delta
    mb = min(m, b)
    with mpmath.workdps(dps):
        dm = mpmath.mpf(d)
        ibes = {}
        total = mpmath.mpf(0)
        for k in range((l - m) // 2 + 1):
            lead = (
                mpmath.mpf(-1) ** k / (mpmath.mpf(2) ** k * mpmath.factorial(k))
                * mpmath.fac2(2 * l - 2 * k - 1) / mpmath.factorial(l - m - 2 * k)
            )
            for p in range(mb + 1):
                q = l - m + 2 * p - 2 * k
                nu = abs(b - m) + mpmath.mpf(q) / 2
                if nu not in ibes:
                    ibes[nu] = mpmath.sqrt(mpmath.pi / (2 * dm)) * mpmath.besseli(nu + 0.5, dm)
                total += (
                    lead * (-1) ** p * mpmath.binomial(mb, p)
                    * mpmath.power(2, mpmath.mpf(q) / 2) * mpmath.gamma(mpmath.mpf(q + 1) / 2)
                    / mpmath.power(dm, mpmath.mpf(q) / 2) * ibes[nu]
                )
        ylm = mpmath.sqrt(
            (2 * l + 1) / (4 * mpmath.pi) * mpmath.factorial(l - m) / mpmath.factorial(l + m)
        )
        val = 4 * mpmath.sqrt(mpmath.pi) * (-1) ** m * ylm * total
    return float(val) * state.norm


@lru_cache(maxsize=32)
def _coeff_grid(state: SssState, n_theta: int, n_phi: int):
    # phi-Fourier transform of chi on a Gauss-Legendre theta grid:
    # F[m_index, theta] = sum_phi w_phi exp(-i m phi) chi(theta, phi)
    rule = gauss_legendre(n_theta, 0.0, math.pi)
    phi = 2.0 * math.pi * np.arange(n_phi) / n_phi
    chi = sss_eval(state, rule.nodes[:, None], phi[None, :])
    return rule, phi, chi


def _coeff_quadrature(state, l, m, n_theta=_COEFF_THETA, n_phi=_COEFF_PHI):
    rule, phi, chi = _coeff_grid(state, n_theta, n_phi)
    w_phi = 2.0 * math.pi / n_phi
    ylm = legendre_table(l, abs(m), rule.nodes)[-1]
    if m < 0:
        ylm = (-1) ** m * ylm
    # conj(Y_lm) = P(theta) exp(-i m phi), P real
    f_m = (chi * np.exp(-1j * m * phi)[None, :]).sum(axis=1) * w_phi
    val = np.sum(rule.weights * np.sin(rule.nodes) * ylm * f_m)
    return float(val.real)


def sss_coeff(state: SssState, l: int, m: int, method: str = "quadrature") -> float:
    """Expansion coefficient ``c_lm = int conj(Y_lm) chi dOmega``.

    ``method="closed_form"`` evaluates the finite double Bessel sum (``m >= 0``
    only) in extended precision; ``method="quadrature"`` integrates over a
    Gauss-Legendre x periodic-trapezoid grid on the sphere and accepts any
    ``m``.  The coefficients are real, and vanish exactly for odd ``l - m``.
    """
    if l < 0 or abs(m) > l:
        raise DomainError(f"need |m| <= l, got l={l}, m={m}")
    if method not in ("closed_form", "quadrature"):
        raise UnsupportedMethodError(f"unknown method {method!r}")
    if method == "closed_form" and m < 0:
        raise UnsupportedMethodError("closed form covers m >= 0 only; use method='quadrature'")
    if (l - m) % 2:
        return 0.0
    if state.delta == 0.0:
        return 1.0 if l == m == state.beta else 0.0
    if method == "closed_form":
        return _coeff_closed(state, l, m)
    return _coeff_quadrature(state, l, m)


def sss_coeff_table(state: SssState, ls, ms, method: str = "quadrature") -> dict:
    """``{(l, m): c_lm}`` for every valid pair in ``ls x ms``.

    Pairs with ``|m| > l`` are skipped.  The quadrature route shares one
    Legendre recurrence per ``m``.
    """
    ls = sorted(set(int(l) for l in ls))
    ms = sorted(set(int(m) for m in ms))
    out = {}
    if method != "quadrature" or state.delta == 0.0:
        for m in ms:
            for l in ls:
                if abs(m) <= l:
                    out[(l, m)] = sss_coeff(state, l, m, method)
        return out
    rule, phi, chi = _coeff_grid(state, _COEFF_THETA, _COEFF_PHI)
    w_phi = 2.0 * math.pi / _COEFF_PHI
    wsin = rule.weights * np.sin(rule.nodes)
    for m in ms:
        valid = [l for l in ls if abs(m) <= l]
        if not valid:
            continue
        table = legendre_table(max(valid), abs(m), rule.nodes)
        if m < 0:
            table = (-1) ** m * table
        f_m = (chi * np.exp(-1j * m * phi)[None, :]).sum(axis=1) * w_phi
        for l in valid:
            if (l - m) % 2:
                out[(l, m)] = 0.0
            else:
                out[(l, m)] = float(np.sum(wsin * table[l - abs(m)] * f_m).real)
    return out
