import json
import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kss import InitConditions, Window, kss_energy
from kss.angular import sss_expectations
from kss.core import orbit_geometry
from kss.errors import DomainError
from kss.evolution import HydrogenBasis
from kss.qdt import (
    DefectTable,
    SqdtBasis,
    SqdtLabels,
    fit_params_qdt,
    sqdt_energy,
    sqdt_expand,
    sqdt_labels,
    sqdt_radial,
)
from kss.radial import rss_expectations
from kss.specfun import composite_gauss_legendre, hydro_radial, integrate

ZERO = DefectTable({l: 0.0 for l in range(80)})


def test_table_json_round_trip(tmp_path):
    doc = {"defects": {"0": 1.35, "1": 0.85, "2": 0.013}, "integer_shift": {"0": 1}}
    path = tmp_path / "d.json"
    path.write_text(json.dumps(doc))
    t = DefectTable.load(path)
    assert t.delta(0) == 1.35 and t.shift(0) == 1 and t.shift(2) == 0
    assert t.to_dict() == doc
    assert DefectTable.from_dict(t.to_dict()) == t


def test_table_validation_and_missing_l():
    with pytest.raises(DomainError):
        DefectTable({0: -0.1})
    t = DefectTable({0: 1.35})
    with pytest.warns(UserWarning, match="l=5"):
        assert t.delta(5) == 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert DefectTable().delta(5) == 0.0


def test_labels():
    t = DefectTable({0: 1.35, 30: 0.35}, {0: 1})
    lab = sqdt_labels(45, 30, t)
    assert lab == SqdtLabels(44.65, 29.65, 14)
    lab0 = sqdt_labels(10, 0, t)
    assert lab0.l_star == pytest.approx(-0.35)
    assert lab0.degree == 8
    assert lab0.n_star - lab0.l_star - 1 == pytest.approx(lab0.degree, abs=1e-12)
    with pytest.raises(DomainError):
        SqdtLabels(5.0, 4.5, -1)
    with pytest.raises(DomainError):
        SqdtLabels(3.0, -1.2, 3)
    with pytest.raises(DomainError):
        SqdtLabels(5.0, 2.0, 1)


@given(st.integers(1, 100), st.data())
def test_degree_is_integer(n, data):
    l = data.draw(st.integers(0, n - 1))
    d = data.draw(st.floats(0.0, 0.999))
    i = data.draw(st.integers(0, 1))
    t = DefectTable({l: d}, {l: i})
    try:
        lab = sqdt_labels(n, l, t)
    except DomainError:
        assert n - l - i - 1 < 0
        return
    assert isinstance(lab.degree, int)
    assert lab.degree == n - l - i - 1


def test_energy():
    assert sqdt_energy(45, 30, DefectTable()) == -0.5 / 45**2
    assert sqdt_energy(45, 30, DefectTable({30: 0.5})) == -0.5 / 44.5**2
    es = [sqdt_energy(45, 30, DefectTable({30: d})) for d in (0.0, 0.1, 0.5, 2.0)]
    assert es == sorted(es, reverse=True)
    with pytest.raises(DomainError):
        sqdt_energy(1, 0, DefectTable({0: 1.5}))


def test_radial_reduces_to_hydrogen():
    r = np.linspace(0, 9000, 301)
    for n, l in [(45, 30), (3, 0), (60, 59)]:
        np.testing.assert_allclose(sqdt_radial(sqdt_labels(n, l, ZERO), r), hydro_radial(n, l, r),
                                   rtol=0, atol=1e-12)
    with pytest.raises(DomainError):
        sqdt_radial(sqdt_labels(5, 1, ZERO), -1.0)


def test_radial_normalised():
    t = DefectTable({30: 0.35})
    rule = composite_gauss_legendre(256, 32, 0.0, 9000.0)
    norm = integrate(lambda r: sqdt_radial(sqdt_labels(45, 30, t), r) ** 2 * r * r, rule)
    assert norm == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("delta,shift", [(0.35, 0), (1.35, 1), (0.05, 0)])
def test_radial_orthogonal_within_l(delta, shift):
    l = 2
    t = DefectTable({l: delta}, {l: shift})
    ns = [n for n in range(3, 15) if n - l - shift - 1 >= 0]
    rule = composite_gauss_legendre(128, 32, 0.0, 4.0 * 15**2)
    f = [sqdt_radial(sqdt_labels(n, l, t), rule.nodes) for n in ns]
    gram = np.array([[np.sum(rule.weights * a * b * rule.nodes**2) for b in f] for a in f])
    np.testing.assert_allclose(gram, np.eye(len(ns)), atol=1e-7)


def test_basis_interface():
    b = SqdtBasis(DefectTable({30: 0.5}))
    assert b.valid(45, 30) and not b.valid(30, 30)
    assert b.energy(45, 30) == -0.5 / 44.5**2
    assert b.key(30) != HydrogenBasis().key(30)
    assert SqdtBasis(ZERO).key(30) == HydrogenBasis().key(30)


def test_expand_zero_defects_identical(worked_state, narrow_table):
    t = sqdt_expand(worked_state, Window.narrow(45, 30), ZERO)
    assert t.entries == narrow_table.entries
    assert t.energies == narrow_table.energies


def test_expand_small_defects_continuous(worked_state, wide_table):
    t = sqdt_expand(worked_state, Window.symmetric(45, 30), DefectTable({l: 0.05 for l in range(80)}))
    assert t.captured_norm == pytest.approx(wide_table.captured_norm, rel=0.01)
    assert math.isfinite(t.mean_energy())
    assert t.energies[(45, 30)] == -0.5 / 44.95**2


def test_fit_zero_defects_identical(worked_cond, worked_state):
    assert fit_params_qdt(worked_cond, ZERO) == worked_state


def test_fit_shifted_level(worked_cond):
    s = fit_params_qdt(worked_cond, DefectTable({30: 0.5}))
    assert kss_energy(s) == pytest.approx(-0.5 / 44.5**2, abs=1e-9)
    ang = sss_expectations(s.sss)
    r_out_star = 44.5**2 * (1 + math.sqrt(1 - ang.l_sq / 44.5**2))
    assert rss_expectations(s.rss).r_mean == pytest.approx(r_out_star, rel=1e-12)
    assert r_out_star == pytest.approx(orbit_geometry(44.5, ang.l_sq).r_out)


def test_fit_rejects_level_below_l3():
    with pytest.raises(DomainError):
        fit_params_qdt(InitConditions(31, 30, 1.0), DefectTable({30: 1.5}))
