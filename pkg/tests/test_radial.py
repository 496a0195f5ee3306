import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from kss.errors import DomainError
from kss.radial import (
    RssState,
    energy_n,
    radial_extent,
    rss_coeff,
    rss_eval,
    rss_expectations,
    rss_overlaps,
)
from kss.specfun import hydro_radial

LATTICE = list(itertools.product((5.0, 30.0, 62.846), (0.01834, 0.1, 1.0), (0.0, 0.01, 0.1)))


@pytest.mark.parametrize("alpha,g0,g1", LATTICE)
def test_moments_vs_quadpack(alpha, g0, g1):
    ref = oracles.rss_moments_quad(alpha, g0, g1)
    got = rss_expectations(RssState(alpha, g0, g1))
    assert ref["norm"] == pytest.approx(1.0, abs=1e-11)
    for k in ("r_mean", "r_inv", "r_sq", "r_inv_sq", "p_r_sq", "dr_dpr"):
        assert getattr(got, k) == pytest.approx(ref[k], rel=1e-8), k
    assert got.p_r == -g1


@given(st.floats(0.01, 200.0), st.floats(1e-3, 10.0), st.floats(-1.0, 1.0))
def test_uncertainty_product_above_half(alpha, g0, g1):
    m = rss_expectations(RssState(alpha, g0, g1))
    assert m.dr_dpr > 0.5
    assert m.dr_dpr == pytest.approx(0.5 * math.sqrt((2 * alpha + 3) / (2 * alpha + 1)))
    assert m.r_sq > m.r_mean**2


def test_wavefunction_closed_form():
    s = RssState(3.0, 0.5, 0.2)
    r = np.array([0.0, 0.5, 4.0, 30.0])
    norm = math.sqrt((2 * 0.5) ** 9 / math.gamma(9))
    ref = norm * r**3 * np.exp(-0.5 * r - 0.2j * r)
    np.testing.assert_allclose(rss_eval(s, r), ref, rtol=1e-13, atol=0)
    assert isinstance(rss_eval(s, 1.0), complex)


def test_state_validation():
    with pytest.raises(DomainError):
        RssState(0.0, 1.0)
    with pytest.raises(DomainError):
        RssState(1.0, -1.0)
    with pytest.raises(DomainError):
        rss_eval(RssState(1.0, 1.0), -1.0)


def test_radial_extent_covers_tail():
    s = RssState(62.846, 0.01834)
    r_max = radial_extent(s)
    assert abs(rss_eval(s, r_max)) ** 2 * r_max**2 < 1e-40
    assert radial_extent(s, n_bar=60) >= 4 * 60**2


def test_rss_coeff_matches_hand_quadrature():
    s = RssState(62.846, 0.01834)
    from scipy import integrate

    ref, _ = integrate.quad(
        lambda r: oracles.hydro_radial_sum(45, 30, r) * math.exp(oracles.rss_log_psi(62.846, 0.01834, r)) * r * r,
        0, 12000, points=[3400], limit=400, epsabs=1e-14, epsrel=1e-11,
    )
    assert rss_coeff(s, 45, 30).real == pytest.approx(ref, abs=1e-10)
    with pytest.raises(DomainError):
        rss_coeff(s, 30, 30)


def test_radial_overlaps_sum_to_one():
    # the hydrogenic bound states at fixed l are complete enough for this packet
    s = RssState(62.846, 0.01834)
    fns = [lambda r, n=n: hydro_radial(n, 30, r) for n in range(31, 121)]
    c = rss_overlaps(s, fns, r_max=4 * 120**2)
    assert np.sum(np.abs(c) ** 2) == pytest.approx(1.0, abs=1e-6)
    assert 40 <= 31 + int(np.argmax(np.abs(c))) <= 50


def test_phase_factor_moves_into_coefficients():
    # gamma1 only rotates the phase pointwise; |overlap| changes but the norm sum does not
    fns = [lambda r, n=n: hydro_radial(n, 30, r) for n in range(31, 121)]
    c = rss_overlaps(RssState(62.846, 0.01834, 0.003), fns, r_max=4 * 120**2)
    assert np.sum(np.abs(c) ** 2) == pytest.approx(1.0, abs=1e-6)


def test_energy_n():
    assert energy_n(45) == -0.5 / 45**2
    assert energy_n(44.5) == -0.5 / 44.5**2
    with pytest.raises(DomainError):
        energy_n(0)
