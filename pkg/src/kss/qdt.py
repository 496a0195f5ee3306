"""Quantum-defect extension for alkali-metal Rydberg packets.

Levels follow ``E = -1/(2 n*^2)`` with ``n* = n - delta(l)``.  The radial
eigenfunctions keep the hydrogenic form with ``n -> n*`` and
``l -> l* = l - delta(l) + I(l)``, so the Laguerre degree
``n* - l* - 1 = n - l - I(l) - 1`` stays an integer.

The RSS itself keeps its hydrogenic functional form; only its
initialisation targets move to the shifted level.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import InitConditions, KssState, fit_with_level
from .errors import DomainError
from .evolution import CoeffTable, Window, expand_in_basis
from .specfun import MAX_N, radial_log_form

__all__ = [
    "DefectTable",
    "SqdtLabels",
    "SqdtBasis",
    "sqdt_labels",
    "sqdt_energy",
    "sqdt_radial",
    "sqdt_expand",
    "fit_params_qdt",
    "shifted_level",
    "n_bar_star",
    "energy_star",
]


@dataclass(frozen=True)
class DefectTable:
    """Asymptotic quantum defects ``delta(l)`` and integer shifts ``I(l)``."""

    defects: dict = field(default_factory=dict)
    integer_shift: dict = field(default_factory=dict)

    def __post_init__(self):
        defects = {int(l): float(d) for l, d in self.defects.items()}
        shifts = {int(l): int(i) for l, i in self.integer_shift.items()}
        bad = {l: d for l, d in defects.items() if not d >= 0}
        if bad:
            raise DomainError(f"quantum defects must be non-negative, got {bad}")
        object.__setattr__(self, "defects", defects)
        object.__setattr__(self, "integer_shift", shifts)

    def delta(self, l: int) -> float:
        if l not in self.defects:
            if self.defects:
                warnings.warn(f"no quantum defect for l={l}; using 0", stacklevel=2)
            return 0.0
        return self.defects[l]

    def shift(self, l: int) -> int:
        return self.integer_shift.get(l, 0)

    @classmethod
    def from_dict(cls, doc: dict) -> "DefectTable":
        return cls(doc.get("defects", {}), doc.get("integer_shift", {}))

    @classmethod
    def load(cls, path) -> "DefectTable":
        """Read ``{"defects": {"0": 1.35, ...}, "integer_shift": {"0": 1}}``."""
        return cls.from_dict(json.loads(Path(path).read_text()))

    def to_dict(self) -> dict:
        return {
            "defects": {str(l): d for l, d in sorted(self.defects.items())},
            "integer_shift": {str(l): i for l, i in sorted(self.integer_shift.items())},
        }


@dataclass(frozen=True)
class SqdtLabels:
    n_star: float
    l_star: float
    degree: int

    def __post_init__(self):
        if int(self.degree) != self.degree or self.degree < 0:
            raise DomainError(f"Laguerre degree must be a non-negative integer, got {self.degree}")
        if not self.l_star > -1:
            raise DomainError(f"l* must exceed -1, got {self.l_star}")
        if not self.n_star > self.l_star:
            raise DomainError(f"need n* > l*, got n*={self.n_star}, l*={self.l_star}")
        # n* - l* - 1 equals the degree whenever the labels come from a table
        if abs(self.n_star - self.l_star - 1 - self.degree) > 1e-9:
            raise DomainError("labels inconsistent: n* - l* - 1 must equal the degree")


def sqdt_labels(n: int, l: int, table: DefectTable) -> SqdtLabels:
    d, i = table.delta(l), table.shift(l)
    return SqdtLabels(n - d, l - d + i, n - l - i - 1)


def shifted_level(n, l, table: DefectTable) -> float:
    n_star = n - table.delta(l)
    if not n_star > 0:
        raise DomainError(f"n* = {n_star} is not positive")
    return n_star


def sqdt_energy(n: int, l: int, table: DefectTable) -> float:
    """Rydberg-series level ``-1/(2 (n - delta(l))^2)``."""
    return -0.5 / shifted_level(n, l, table) ** 2


def sqdt_radial(labels: SqdtLabels, r):
    """Normalised radial eigenfunction with real labels ``(n*, l*)``."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise DomainError("radius must be non-negative")
    log_mag, sign = radial_log_form(labels.n_star, labels.l_star, labels.degree, r)
    out = sign * np.exp(log_mag)
    return float(out) if out.ndim == 0 else out


class SqdtBasis:
    """Radial basis and level scheme of a defect table."""

    name = "sqdt"

    def __init__(self, table: DefectTable):
        self.table = table

    def valid(self, n, l):
        if not 0 <= l < n <= MAX_N:
            return False
        try:
            sqdt_labels(n, l, self.table)
        except DomainError:
            return False
        return True

    def radial(self, n, l, r):
        return sqdt_radial(sqdt_labels(n, l, self.table), r)

    def energy(self, n, l):
        return sqdt_energy(n, l, self.table)

    def key(self, l):
        d, i = self.table.delta(l), self.table.shift(l)
        if d == 0.0 and i == 0:
            return ("hydrogen",)
        return ("sqdt", d, i)


def sqdt_expand(state: KssState, window: Window, table: DefectTable,
                method="quadrature", workers=1, rtol=1e-8) -> CoeffTable:
    """Coefficients on the defect eigenbasis, with levels ``E_{n*}``."""
    return expand_in_basis(state, window, SqdtBasis(table), method, workers, rtol)


def fit_params_qdt(cond: InitConditions, table: DefectTable) -> KssState:
    """Fit with ``<H> = E_{n_bar*}`` and ``<r> = r_out*``, ``n_bar* = n_bar - delta(beta)``.

    The energy target is imposed on the closed-form ``<H>`` of the
    hydrogenic-form KSS; ``sum |c|^2 E_{n*}`` from :func:`sqdt_expand` is a
    post-fit diagnostic.
    """
    n_star = cond.n_bar - table.delta(int(cond.l3_target))
    if not n_star > cond.l3_target:
        raise DomainError(f"shifted level n*={n_star} must exceed <L3>={cond.l3_target}")
    return fit_with_level(cond, n_star)


def n_bar_star(cond: InitConditions, table: DefectTable) -> float:
    return cond.n_bar - table.delta(int(cond.l3_target))


def energy_star(cond: InitConditions, table: DefectTable) -> float:
    return -0.5 / n_bar_star(cond, table) ** 2

