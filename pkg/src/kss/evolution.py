"""Eigenbasis expansion, time evolution and density slices of a KSS.

Coefficients follow ``c = int conj(R Y) Psi dV`` so that
``Psi(t) = sum c R_nl Y_lm exp(-i E t)`` holds as written.  The radial
factor of each coefficient is an overlap integral against the radial basis;
the angular factor is the SSS coefficient ``c_lm``.
"""

from __future__ import annotations

import math
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .angular import sss_coeff_table
from .core import KssState
from .errors import AccuracyError, DomainError
from .radial import radial_extent, rss_expectations, rss_overlaps
from .specfun import MAX_N, hydro_radial, integrate_adaptive, legendre_table

__all__ = [
    "HydrogenBasis",
    "Window",
    "CoeffTable",
    "GridAxis",
    "SliceGrid",
    "expand",
    "evolve_eval",
    "density_slice",
    "expectation_r_t",
]

_CHUNK = 4096


class HydrogenBasis:
    """Hydrogenic ``R_nl`` with energies ``-1/(2 n^2)``."""

    name = "hydrogen"

    def valid(self, n, l):
        return 0 <= l < n <= MAX_N

    def radial(self, n, l, r):
        return hydro_radial(n, l, r)

    def energy(self, n, l):
        return -0.5 / n**2

    def key(self, l):
        return ("hydrogen",)


@dataclass(frozen=True)
class Window:
    """Inclusive ``(lo, hi)`` ranges of ``n``, ``l`` and ``m``."""

    n_range: tuple[int, int]
    l_range: tuple[int, int]
    m_range: tuple[int, int]

    def __post_init__(self):
        for name in ("n_range", "l_range", "m_range"):
            lo, hi = getattr(self, name)
            if int(lo) != lo or int(hi) != hi or lo > hi:
                raise DomainError(f"{name} must be an ordered integer pair, got {(lo, hi)}")
            object.__setattr__(self, name, (int(lo), int(hi)))

    @classmethod
    def narrow(cls, n_bar, beta, n_spread=10, l_spread=10, m_values=4):
        """11 values of ``n`` and ``l`` centred on ``n_bar``, ``beta``; ``m`` in
        ``beta - m_values + 1 .. beta``."""
        n0 = int(round(n_bar))
        return cls(
            (n0 - n_spread // 2, n0 + n_spread - n_spread // 2),
            (beta - l_spread // 2, beta + l_spread - l_spread // 2),
            (beta - m_values + 1, beta),
        )

    @classmethod
    def symmetric(cls, n_bar, beta, n_half=10, l_half=10, m_half=10):
        n0 = int(round(n_bar))
        return cls(
            (max(1, n0 - n_half), n0 + n_half),
            (max(0, beta - l_half), beta + l_half),
            (beta - m_half, beta + m_half),
        )

    @property
    def ns(self):
        return range(self.n_range[0], self.n_range[1] + 1)

    @property
    def ls(self):
        return range(self.l_range[0], self.l_range[1] + 1)

    @property
    def ms(self):
        return range(self.m_range[0], self.m_range[1] + 1)

    @property
    def size(self):
        return len(self.ns) * len(self.ls) * len(self.ms)

    def to_dict(self):
        return {"n": list(self.n_range), "l": list(self.l_range), "m": list(self.m_range)}


@dataclass(frozen=True)
class CoeffTable:
    """Expansion coefficients over a full window grid.

    ``entries`` holds one amplitude for every ``(n, l, m)`` in the window.
    Odd ``l - m`` entries are exact zeros; combinations that are not basis
    states (``|m| > l`` or ``l >= n``) are zero-filled and listed in
    ``excluded``.  ``energies`` is keyed by ``(n, l)`` because quantum
    defects make the level depend on ``l``.
    """

    entries: dict
    energies: dict
    window: Window
    excluded: tuple = ()
    basis: object = field(default_factory=HydrogenBasis)
    state: KssState | None = None

    @property
    def size(self):
        return len(self.entries)

    @property
    def parity_zeros(self):
        return sum(1 for (n, l, m) in self.entries if (l - m) % 2)

    def nonzero(self):
        return {k: c for k, c in self.entries.items() if c != 0}

    @property
    def captured_norm(self):
        return math.fsum(abs(c) ** 2 for c in self.entries.values())

    def mean_energy(self):
        """``sum |c|^2 E / sum |c|^2`` over the window."""
        nz = self.nonzero()
        w = math.fsum(abs(c) ** 2 for c in nz.values())
        return math.fsum(abs(c) ** 2 * self.energies[k[:2]] for k, c in nz.items()) / w

    def mean_m(self):
        nz = self.nonzero()
        w = math.fsum(abs(c) ** 2 for c in nz.values())
        return math.fsum(abs(c) ** 2 * k[2] for k, c in nz.items()) / w

    def amplitudes(self, t=0.0):
        """Nonzero amplitudes ``c exp(-i E t)`` at time ``t``."""
        return {
            k: c * np.exp(-1j * self.energies[k[:2]] * t) for k, c in self.nonzero().items()
        }

    def default_extent(self):
        if self.state is None:
            raise DomainError("table carries no state; pass explicit grid axes")
        return 1.2 * rss_expectations(self.state.rss).r_mean


def _map(fn, items, workers):
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def expand_in_basis(state: KssState, window: Window, basis, method="quadrature",
                    workers=1, rtol=1e-8) -> CoeffTable:
    """Shared implementation of :func:`expand` for any radial basis."""
    sss = state.sss
    ang = sss_coeff_table(sss, window.ls, window.ms, method=method)
    ns_max = max(window.ns)
    r_max = radial_extent(state.rss, n_bar=ns_max)

    def radial_for_l(l):
        ns = [n for n in window.ns if basis.valid(n, l)]
        if not ns:
            return l, {}
        fns = [(lambda r, n=n: basis.radial(n, l, r)) for n in ns]
        vals = rss_overlaps(state.rss, fns, r_max=r_max, rtol=rtol)
        return l, dict(zip(ns, (complex(v) for v in vals)))

    radial = dict(_map(radial_for_l, list(window.ls), workers))

    entries, energies, excluded = {}, {}, []
    for n in window.ns:
        for l in window.ls:
            ok_nl = basis.valid(n, l)
            if ok_nl:
                energies[(n, l)] = basis.energy(n, l)
            for m in window.ms:
                if not ok_nl or abs(m) > l:
                    excluded.append((n, l, m))
                    entries[(n, l, m)] = 0j
                elif (l - m) % 2:
                    entries[(n, l, m)] = 0j
                else:
                    entries[(n, l, m)] = radial[l][n] * ang[(l, m)]
    return CoeffTable(entries, energies, window, tuple(excluded), basis, state)


def expand(state: KssState, window: Window, method="quadrature", workers=1,
           rtol=1e-8) -> CoeffTable:
    """Hydrogenic eigenbasis coefficients ``c_nlm = c_nl^(rss) c_lm^(sss)``."""
    return expand_in_basis(state, window, HydrogenBasis(), method, workers, rtol)


# --------------------------------------------------------------------------
# Evaluation in position space
# --------------------------------------------------------------------------

def _evaluate_chunk(groups, basis, r, theta, phi):
    # groups: {l: (ns, ms, amp[m_index, n_index])}
    out = np.zeros(r.shape, dtype=complex)
    ms_all = sorted({m for _, ms, _ in groups.values() for m in ms})
    lmax = max(groups)
    ylm = {}
    for m in ms_all:
        table = legendre_table(lmax, abs(m), theta) if abs(m) <= lmax else None
        sign = (-1) ** m if m < 0 else 1
        ylm[m] = (table, sign * np.exp(1j * m * phi))
    for l in sorted(groups):
        ns, ms, amp = groups[l]
        rad = np.stack([basis.radial(n, l, r) for n in ns])
        radial_sum = amp @ rad
        for i, m in enumerate(ms):
            table, phase = ylm[m]
            out += radial_sum[i] * table[l - abs(m)] * phase
    return out


def _evaluate(coeffs: CoeffTable, r, theta, phi, t, workers=1):
    amps = coeffs.amplitudes(t)
    if not amps:
        raise DomainError("coefficient table has no nonzero entries")
    groups = {}
    for l in sorted({k[1] for k in amps}):
        ns = sorted({k[0] for k in amps if k[1] == l})
        ms = sorted({k[2] for k in amps if k[1] == l})
        amp = np.zeros((len(ms), len(ns)), dtype=complex)
        for (n, ll, m), a in amps.items():
            if ll == l:
                amp[ms.index(m), ns.index(n)] = a
        groups[l] = (ns, ms, amp)

    r, theta, phi = np.broadcast_arrays(
        np.asarray(r, float), np.asarray(theta, float), np.asarray(phi, float)
    )
    shape = r.shape
    r, theta, phi = r.ravel(), theta.ravel(), phi.ravel()
    starts = list(range(0, r.size, _CHUNK))

    def run(s):
        sl = slice(s, s + _CHUNK)
        return _evaluate_chunk(groups, coeffs.basis, r[sl], theta[sl], phi[sl])

    parts = _map(run, starts, workers)
    return np.concatenate(parts).reshape(shape)


def evolve_eval(coeffs: CoeffTable, r, theta, phi, t=0.0, workers=1):
    """Truncated ``Psi(r, theta, phi, t) = sum c R Y exp(-i E t)``."""
    out = _evaluate(coeffs, r, theta, phi, t, workers)
    return complex(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class GridAxis:
    min: float
    max: float
    count: int

    def __post_init__(self):
        if not self.max > self.min or int(self.count) < 2:
            raise DomainError(f"invalid grid axis {self}")

    def values(self):
        return np.linspace(self.min, self.max, int(self.count))

    @property
    def step(self):
        return (self.max - self.min) / (self.count - 1)


@dataclass(frozen=True)
class SliceGrid:
    """``r^2 |Psi|^2`` on a plane; ``values[i, j]`` sits at ``(u_i, v_j)``.

    ``u`` is always ``x``; ``v`` is ``y`` for the XY plane and ``z`` for XZ.
    """

    plane: str
    axes: tuple
    time: float
    values: np.ndarray

    @property
    def axis_names(self):
        return ("x", "y") if self.plane == "XY" else ("x", "z")

    def argmax(self):
        i, j = np.unravel_index(np.argmax(self.values), self.values.shape)
        return float(self.axes[0].values()[i]), float(self.axes[1].values()[j])


def plane_coordinates(plane, u, v):
    """Spherical ``(r, theta, phi)`` of points ``(u, v)`` in the XY or XZ plane."""
    u, v = np.asarray(u, float), np.asarray(v, float)
    if plane == "XY":
        r = np.hypot(u, v)
        return r, np.full(r.shape, 0.5 * math.pi), np.arctan2(v, u)
    if plane == "XZ":
        r = np.hypot(u, v)
        theta = np.arctan2(np.abs(u), v)
        phi = np.where(u < 0, math.pi, 0.0)
        return r, theta, phi
    raise DomainError(f"plane must be 'XY' or 'XZ', got {plane!r}")


def density_slice(coeffs: CoeffTable, plane="XY", axes=None, t=0.0, workers=1) -> SliceGrid:
    """``r^2 |Psi(t)|^2`` on a rectangular grid in the XY or XZ plane.

    Default axes span ``+-1.2 <r>`` with 201 points each.
    """
    plane = plane.upper()
    if axes is None:
        ext = coeffs.default_extent()
        axes = (GridAxis(-ext, ext, 201), GridAxis(-ext, ext, 201))
    U, V = np.meshgrid(axes[0].values(), axes[1].values(), indexing="ij")
    r, theta, phi = plane_coordinates(plane, U, V)
    psi = _evaluate(coeffs, r, theta, phi, t, workers)
    values = r**2 * (psi.real**2 + psi.imag**2)
    return SliceGrid(plane, tuple(axes), float(t), values)


# --------------------------------------------------------------------------
# <r>(t)
# --------------------------------------------------------------------------

_R_CACHE: dict = {}
_R_LOCK = threading.Lock()


def radial_r_matrix(basis, l, ns, rtol=1e-10):
    """``<R_n'l | r | R_nl>`` for ``n, n'`` in ``ns``; cached per basis key."""
    ns = tuple(ns)
    key = (basis.key(l), l, ns)
    with _R_LOCK:
        hit = _R_CACHE.get(key)
    if hit is not None:
        return hit
    r_max = 4.0 * max(ns) ** 2

    def integrand(r):
        rad = np.stack([basis.radial(n, l, r) for n in ns])
        prod = rad[:, None, :] * rad[None, :, :] * r**3
        return prod

    mat = integrate_adaptive(integrand, 0.0, r_max, rtol=rtol, atol=1e-12,
                             n0=2048, composite=True, order=32)
    mat = 0.5 * (mat + mat.T)
    mat.flags.writeable = False
    with _R_LOCK:
        _R_CACHE.setdefault(key, mat)
    return mat


def expectation_r_t(coeffs: CoeffTable, t: float) -> float:
    """``<r>(t)`` of the truncated packet, normalised by the captured norm."""
    amps = coeffs.amplitudes(t)
    total = 0j
    for l in sorted({k[1] for k in amps}):
        ns = sorted({k[0] for k in amps if k[1] == l})
        mat = radial_r_matrix(coeffs.basis, l, ns)
        for m in sorted({k[2] for k in amps if k[1] == l}):
            a = np.array([amps.get((n, l, m), 0j) for n in ns])
            total += np.conj(a) @ mat @ a
    norm = coeffs.captured_norm
    if abs(total.imag) > 1e-10 * abs(total.real):
        raise AccuracyError(f"<r>(t) has imaginary part {total.imag}", estimate=total)
    return float(total.real / norm)

