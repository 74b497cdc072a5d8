from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from modinv.characters import (
    QSeries,
    ZSpectrum,
    characters,
    circle_character,
    eta,
    geometric_circle_spectrum,
    geometric_orbifold_spectrum,
    orbifold_character,
    theta,
    theta_sum,
    z_from_mipf,
)
from modinv.spectra import TheoryId, modular_data

F = Fraction


def test_eta_pentagonal():
    e = eta(12)
    assert e.leading == F(1, 24)
    assert e.coeffs == (1, -1, -1, 0, 0, 1, 0, 1, 0, 0, 0, 0)
    assert eta(13).coeffs[12] == -1


@pytest.mark.parametrize("k", [2, 3, 4])
def test_theta_product_equals_sum(k):
    assert theta(k, 12) == theta_sum(k, 12)


def test_theta3_second_coefficient():
    assert theta(3, 4).coefficient(F(1, 2)) == 2


def test_jacobi_identities():
    e = eta(12)
    t2, t3, t4 = theta(2, 12), theta(3, 12), theta(4, 12)
    assert not (t2 * t3 * t4 - (e * e * e).scale(2)).normalized().coeffs
    assert not (t3 * t3 * t3 * t3 - t2 * t2 * t2 * t2 - t4 * t4 * t4 * t4).normalized().coeffs


def test_incommensurate_addition_rejected():
    a = QSeries(0, 1, [1, 1], 2)
    b = QSeries(F(1, 3), 1, [1], 2)
    with pytest.raises(ValueError, match="incommensurate"):
        a + b
    assert (a * b).leading == F(1, 3)


def test_beyond_horizon_is_an_error():
    with pytest.raises(ValueError, match="horizon"):
        eta(3).coefficient(5)


series = st.lists(st.integers(-5, 5), min_size=1, max_size=8).map(
    lambda cs: QSeries(0, 1, [1] + cs, len(cs) + 1))


@settings(max_examples=50, deadline=None)
@given(series, series)
def test_series_ring_laws(a, b):
    assert (a * b).coeffs == (b * a).coeffs
    assert ((a + b) - b).coeffs == a.coeffs[: len((a + b).coeffs)]
    one = a * a.inverse()
    assert one.coeffs[0] == 1 and not any(one.coeffs[1:])


@settings(max_examples=30, deadline=None)
@given(series)
def test_sqrt_of_square(a):
    sq = a * a
    assert sq.sqrt().coeffs == a.coeffs[: len(sq.sqrt().coeffs)]


def test_circle_character_vacuum():
    ch = circle_character(1, 0, 6)
    assert ch.leading == F(-1, 24) and ch.coeffs[0] == 1


@pytest.mark.parametrize("r", [1, 2, 3, 4, 7])
def test_orbifold_characters_integral_and_leading(r):
    md = modular_data(TheoryId("orb", r))
    for lab, h, ch in zip(md.labels, md.h, characters(md.theory, 12)):
        assert ch.leading == h - F(1, 24), lab
        assert ch.is_integral() and ch.is_nonnegative(), lab


def test_twist_character_leading():
    ch = orbifold_character(3, "[sigma]", 8)
    assert ch.leading == F(1, 48) and ch.coeffs[0] == 1


def test_vacuum_has_no_current():
    # the dX state sits in [V]
    ch = orbifold_character(5, "[0]", 8)
    assert ch.coefficient(1 - F(1, 24)) == 0
    assert orbifold_character(5, "[V]", 8).leading == 1 - F(1, 24)


def test_characters_refuse_affine():
    with pytest.raises(ValueError, match="no character support"):
        characters(TheoryId("D2", 4), 6)


def _eye(md):
    return np.eye(md.size, dtype=int)


@pytest.mark.parametrize("fam,geo", [("u1", geometric_circle_spectrum), ("orb", geometric_orbifold_spectrum)])
@pytest.mark.parametrize("r", range(1, 9))
def test_diagonal_matches_geometry(fam, geo, r):
    md = modular_data(TheoryId(fam, r))
    assert z_from_mipf(md, _eye(md), 6) == geo(r, 1, 6)


@pytest.mark.parametrize("r", [1, 3, 4])
def test_charge_conjugation_is_t_dual(r):
    md = modular_data(TheoryId("u1", r))
    C = np.zeros((md.size, md.size), dtype=int)
    C[np.arange(md.size), md.conjugation] = 1
    assert z_from_mipf(md, C, 6) == geometric_circle_spectrum(1, r, 6)


def test_geometric_spectra_physical():
    z = geometric_circle_spectrum(2, 3, 5)
    assert z.is_physical() and z.counts[(F(0), F(0))] == 1
    with pytest.raises(ValueError, match="gcd"):
        geometric_circle_spectrum(2, 4)


def test_zspectrum_csv_and_validation():
    z = ZSpectrum({(F(1, 2), F(1, 2)): 3, (F(0), F(0)): 1}, 2)
    assert z.to_csv().splitlines() == ["h_L,h_R,multiplicity", "0/1,0/1,1", "1/2,1/2,3"]
    with pytest.raises(ValueError, match="negative"):
        ZSpectrum({(F(0), F(0)): -1}, 1)
