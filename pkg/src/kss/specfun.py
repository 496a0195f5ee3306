"""Special functions and small numerical tools used across the package.

Everything here is a pure function of its arguments.  Large normalisation
constants are handled as logarithms and only exponentiated at the very end,
since products such as ``Gamma(2*alpha + 3)`` at ``alpha ~ 63`` or the
hydrogenic ``(n + l)!`` at ``n ~ 55`` overflow double precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import optimize, special

from .errors import AccuracyError, BracketError, DomainError, RangeError

__all__ = [
    "QuadratureRule",
    "RootBracket",
    "ln_gamma",
    "double_factorial",
    "log_double_factorial",
    "bessel_i",
    "bessel_i_scaled",
    "sph_bessel_i",
    "sph_harm",
    "legendre_table",
    "hydro_radial",
    "radial_log_form",
    "laguerre_gen",
    "gauss_legendre",
    "composite_gauss_legendre",
    "integrate",
    "integrate_adaptive",
    "solve_root",
]

BESSEL_X_MAX = 700.0
MAX_L = 200
MAX_N = 120


# --------------------------------------------------------------------------
# Gamma function and factorials
# --------------------------------------------------------------------------

def ln_gamma(x):
    """Natural logarithm of the gamma function for positive real ``x``."""
    x = float(x)
    if not math.isfinite(x) or x <= 0.0:
        raise DomainError(f"ln_gamma needs a finite positive argument, got {x!r}")
    return float(special.gammaln(x))


def log_double_factorial(n: int) -> float:
    """``ln(n!!)`` for integer ``n >= -1``."""
    n = int(n)
    if n < -1:
        raise DomainError(f"double factorial undefined for n={n}")
    if n <= 0:
        return 0.0
    if n % 2 == 0:
        k = n // 2
        return k * math.log(2.0) + math.lgamma(k + 1)
    # (2k-1)!! = 2^k Gamma(k + 1/2) / sqrt(pi)
    k = (n + 1) // 2
    return k * math.log(2.0) + math.lgamma(k + 0.5) - 0.5 * math.log(math.pi)


def double_factorial(n: int) -> float:
    """``n!!`` as a float, with ``(-1)!! = 0!! = 1``.

    Computed as an exact integer product.  ``301!!`` and beyond overflow a
    double; use :func:`log_double_factorial` there.
    """
    n = int(n)
    if n < -1:
        raise DomainError(f"double factorial undefined for n={n}")
    if n > 300:
        raise RangeError(f"{n}!! overflows a double; use log_double_factorial")
    return float(math.prod(range(n, 0, -2)))


# --------------------------------------------------------------------------
# Modified Bessel functions
# --------------------------------------------------------------------------

def _check_bessel_args(j, x):
    if int(j) != j or j < 0:
        raise DomainError(f"Bessel order must be a non-negative integer, got {j!r}")
    x = np.asarray(x, dtype=float)
    if np.any(x < 0) or not np.all(np.isfinite(x)):
        raise DomainError("Bessel argument must be finite and non-negative")
    return x


def bessel_i(j: int, x):
    """Modified Bessel function of the first kind, ``I_j(x)``, integer ``j``.

    Raises :class:`RangeError` above ``x = 700``; use :func:`bessel_i_scaled`
    (``exp(-x) I_j(x)``) for larger arguments.
    """
    x = _check_bessel_args(j, x)
    if np.any(x > BESSEL_X_MAX):
        raise RangeError(
            f"I_j(x) overflows for x > {BESSEL_X_MAX}; use bessel_i_scaled instead"
        )
    out = special.iv(j, x)
    return float(out) if out.ndim == 0 else out


def bessel_i_scaled(j: int, x):
    """``exp(-x) I_j(x)``, finite for all non-negative ``x``."""
    x = _check_bessel_args(j, x)
    out = special.ive(j, x)
    return float(out) if out.ndim == 0 else out


def sph_bessel_i(nu, z):
    """Modified spherical Bessel function ``i_nu(z) = sqrt(pi/2z) I_{nu+1/2}(z)``.

    ``nu`` may be any real order ``>= 0``.  At ``z = 0`` the limit is
    returned (1 for ``nu = 0``, otherwise 0).
    """
    nu = float(nu)
    if nu < 0:
        raise DomainError(f"order must be non-negative, got {nu}")
    z = np.asarray(z, dtype=float)
    if np.any(z < 0) or not np.all(np.isfinite(z)):
        raise DomainError("argument must be finite and non-negative")
    if np.any(z > BESSEL_X_MAX):
        raise RangeError(f"i_nu(z) overflows for z > {BESSEL_X_MAX}")
    safe = np.where(z > 0, z, 1.0)
    if nu.is_integer():
        val = special.spherical_in(int(nu), safe)
    else:
        val = np.sqrt(np.pi / (2.0 * safe)) * special.iv(nu + 0.5, safe)
    out = np.where(z > 0, val, 1.0 if nu == 0 else 0.0)
    return float(out) if out.ndim == 0 else out


# --------------------------------------------------------------------------
# Spherical harmonics (Condon-Shortley phase)
# --------------------------------------------------------------------------

def legendre_table(lmax: int, m: int, theta):
    """Normalised associated Legendre functions for one order ``m >= 0``.

    Returns an array of shape ``(lmax - m + 1, *theta.shape)`` whose row
    ``l - m`` holds ``Y_lm(theta, 0)``, i.e. the fully normalised function
    including the Condon-Shortley phase.  Standard stable recurrence in ``l``.
    """
    if m < 0 or m > lmax:
        raise DomainError(f"need 0 <= m <= lmax, got m={m}, lmax={lmax}")
    theta = np.asarray(theta, dtype=float)
    x = np.cos(theta)
    s = np.sin(theta)
    out = np.empty((lmax - m + 1,) + theta.shape)
    # P_mm = (-1)^m sqrt((2m+1)/4pi * (2m-1)!!/(2m)!!) sin^m
    pmm = np.full(theta.shape, math.sqrt(1.0 / (4.0 * math.pi)))
    for k in range(1, m + 1):
        pmm = -pmm * s * math.sqrt((2 * k + 1) / (2.0 * k))
    out[0] = pmm
    if lmax == m:
        return out
    out[1] = x * math.sqrt(2 * m + 3) * pmm
    for l in range(m + 2, lmax + 1):
        a = math.sqrt((4 * l * l - 1) / (l * l - m * m))
        b = math.sqrt(((l - 1) ** 2 - m * m) / (4 * (l - 1) ** 2 - 1))
        out[l - m] = a * (x * out[l - m - 1] - b * out[l - m - 2])
    return out


def sph_harm(l: int, m: int, theta, phi):
    """Orthonormal spherical harmonic ``Y_lm(theta, phi)``.

    ``theta`` is the polar angle, ``phi`` the azimuth.  Uses the
    Condon-Shortley phase, so ``Y_{l,-m} = (-1)^m conj(Y_lm)``.
    """
    if l < 0 or abs(m) > l:
        raise DomainError(f"need |m| <= l, got l={l}, m={m}")
    if l > MAX_L:
        raise RangeError(f"l={l} exceeds the supported maximum {MAX_L}")
    theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
    am = abs(m)
    y = legendre_table(l, am, theta)[-1] * np.exp(1j * am * phi)
    if m < 0:
        y = (-1) ** am * np.conj(y)
    return complex(y) if y.ndim == 0 else y


# --------------------------------------------------------------------------
# Laguerre polynomials and hydrogenic radial functions
# --------------------------------------------------------------------------

def laguerre_gen(k: int, a: float, x):
    """Generalised Laguerre polynomial ``L_k^(a)(x)`` by upward recurrence."""
    if int(k) != k or k < 0:
        raise DomainError(f"degree must be a non-negative integer, got {k!r}")
    if a <= -1:
        raise DomainError(f"upper parameter must exceed -1, got {a}")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if k == 0:
        return float(prev) if x.ndim == 0 else prev
    cur = 1.0 + a - x
    for i in range(1, int(k)):
        prev, cur = cur, ((2 * i + 1 + a - x) * cur - (i + a) * prev) / (i + 1)
    return float(cur) if x.ndim == 0 else cur


def _laguerre_log(k, a, x):
    """``(ln|L_k^a(x)|, sign)`` with rescaling to keep the recurrence finite."""
    prev = np.ones_like(x)
    logscale = np.zeros_like(x)
    if k == 0:
        return logscale, prev
    cur = 1.0 + a - x
    for i in range(1, k):
        prev, cur = cur, ((2 * i + 1 + a - x) * cur - (i + a) * prev) / (i + 1)
        big = np.abs(cur) > 1e200
        if np.any(big):
            prev = np.where(big, prev * 1e-200, prev)
            cur = np.where(big, cur * 1e-200, cur)
            logscale = logscale + np.where(big, 200 * math.log(10.0), 0.0)
    with np.errstate(divide="ignore"):
        return logscale + np.log(np.abs(cur)), np.sign(cur)


def radial_log_form(n_eff: float, l_eff: float, degree: int, r):
    """Coulomb-type radial function with real labels, as ``(ln|R|, sign)``.

    ``R(r) = C rho^l exp(-rho/2) L_degree^(2l+1)(rho)``, ``rho = 2r/n``, with
    ``C`` fixed by ``int R^2 r^2 dr = 1``.  Integer ``n_eff``, ``l_eff`` give
    the hydrogenic functions; shifted real labels give quantum-defect ones.
    """
    r = np.asarray(r, dtype=float)
    rho = 2.0 * r / n_eff
    log_c = 0.5 * (
        3.0 * math.log(2.0 / n_eff)
        + math.lgamma(degree + 1)
        - math.log(2.0 * n_eff)
        - math.lgamma(n_eff + l_eff + 1)
    )
    log_l, sign = _laguerre_log(degree, 2.0 * l_eff + 1.0, rho)
    with np.errstate(divide="ignore"):
        log_pow = l_eff * np.log(rho) if l_eff != 0 else np.zeros_like(rho)
    return log_c + log_pow - 0.5 * rho + log_l, sign


def hydro_radial(n: int, l: int, r):
    """Normalised hydrogenic radial eigenfunction ``R_nl(r)`` (atomic units)."""
    if int(n) != n or int(l) != l or n < 1 or l < 0 or l >= n:
        raise DomainError(f"need integers 0 <= l < n, got n={n}, l={l}")
    if n > MAX_N:
        raise RangeError(f"n={n} exceeds the supported maximum {MAX_N}")
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise DomainError("radius must be non-negative")
    log_mag, sign = radial_log_form(float(n), float(l), n - l - 1, r)
    out = sign * np.exp(log_mag)
    return float(out) if out.ndim == 0 else out


# --------------------------------------------------------------------------
# Quadrature
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadratureRule:
    """Fixed quadrature rule on ``interval``; nodes ascend strictly inside it."""

    nodes: np.ndarray
    weights: np.ndarray
    interval: tuple[float, float]

    def __post_init__(self):
        lo, hi = self.interval
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if not lo < hi:
            raise DomainError(f"empty interval {self.interval}")
        if nodes.shape != weights.shape or nodes.size < 2:
            raise DomainError("need at least two nodes with matching weights")
        if np.any(weights <= 0):
            raise DomainError("quadrature weights must be positive")
        if np.any(np.diff(nodes) <= 0) or nodes[0] <= lo or nodes[-1] >= hi:
            raise DomainError("nodes must increase strictly inside the interval")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    def __len__(self):
        return self.nodes.size


@lru_cache(maxsize=64)
def _leggauss(n):
    x, w = np.polynomial.legendre.leggauss(n)
    x.flags.writeable = False
    w.flags.writeable = False
    return x, w


def gauss_legendre(n: int, lo: float, hi: float) -> QuadratureRule:
    """``n``-point Gauss-Legendre rule on ``[lo, hi]``."""
    x, w = _leggauss(int(n))
    half = 0.5 * (hi - lo)
    return QuadratureRule(lo + half * (x + 1.0), half * w, (float(lo), float(hi)))


def composite_gauss_legendre(panels: int, order: int, lo: float, hi: float) -> QuadratureRule:
    """``panels`` equal sub-intervals, each carrying an ``order``-point rule."""
    x, w = _leggauss(int(order))
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * np.diff(edges)[:, None]
    nodes = edges[:-1, None] + half * (x[None, :] + 1.0)
    weights = half * w[None, :]
    return QuadratureRule(nodes.ravel(), weights.ravel(), (float(lo), float(hi)))


def integrate(f, rule: QuadratureRule):
    """Apply ``rule`` to a vectorised integrand ``f``."""
    vals = np.asarray(f(rule.nodes))
    if not np.all(np.isfinite(vals)):
        raise DomainError("integrand is not finite on the quadrature nodes")
    return np.sum(rule.weights * vals, axis=-1)


def integrate_adaptive(f, lo, hi, rtol=1e-12, atol=0.0, n0=64, max_refine=5,
                       composite=False, order=32):
    """Integrate with node doubling until successive estimates agree.

    With ``composite=True`` the number of ``order``-point panels doubles
    (starting from ``n0 // order`` panels); otherwise a single
    Gauss-Legendre rule doubles its node count.  The integrand may return an
    array with the node axis last, in which case convergence is required for
    every component.  Raises :class:`AccuracyError` carrying the best
    estimate when ``max_refine`` doublings do not suffice.
    """
    def rule_for(k):
        if composite:
            return composite_gauss_legendre(max(1, n0 // order) * 2 ** k, order, lo, hi)
        return gauss_legendre(n0 * 2 ** k, lo, hi)

    prev = integrate(f, rule_for(0))
    for k in range(1, max_refine + 1):
        cur = integrate(f, rule_for(k))
        if np.all(np.abs(cur - prev) <= rtol * np.abs(cur) + atol):
            return cur
        prev = cur
    raise AccuracyError(
        f"quadrature did not reach rtol={rtol} after {max_refine} refinements",
        estimate=cur,
    )


# --------------------------------------------------------------------------
# Root finding
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class RootBracket:
    lo: float
    hi: float
    tol: float = 1e-12

    def __post_init__(self):
        if not self.lo < self.hi:
            raise DomainError(f"bracket needs lo < hi, got [{self.lo}, {self.hi}]")
        if not self.tol > 0:
            raise DomainError("tolerance must be positive")


def solve_root(f, bracket: RootBracket, maxiter: int = 200) -> float:
    """Root of ``f`` inside ``bracket`` by Brent's bracketing method."""
    flo, fhi = f(bracket.lo), f(bracket.hi)
    if flo == 0.0:
        return float(bracket.lo)
    if fhi == 0.0:
        return float(bracket.hi)
    if np.sign(flo) == np.sign(fhi):
        raise BracketError(
            f"no sign change on [{bracket.lo}, {bracket.hi}]: f = {flo:.6g}, {fhi:.6g}"
        )
    try:
        root, info = optimize.brentq(
            f, bracket.lo, bracket.hi, xtol=bracket.tol, maxiter=maxiter,
            full_output=True, disp=False,
        )
    except RuntimeError as exc:  # pragma: no cover - brentq raises only with disp
        raise AccuracyError(str(exc)) from exc
    if not info.converged:
        raise AccuracyError(
            f"root search did not converge in {maxiter} iterations", estimate=root
        )
    return float(root)
