import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from modinv import lie_data
from modinv.characters import geometric_circle_spectrum, z_from_mipf
from modinv.fusion import simple_currents, verlinde
from modinv.invariants import (
    CurrentExistenceError,
    Mipf,
    automorphism_search,
    build_b_series,
    build_dinv,
    build_scinv,
    charge_conjugation,
    diagonal,
    dinv_blocks,
    galex_sublist,
    simple_current_invariant,
    tensor_multipliers,
    verify,
)
from modinv.lie_data import AlgebraId
from modinv.spectra import TheoryId, modular_data

F = Fraction


def _support(md, m):
    return [sorted(md.labels[i] for i in np.nonzero(b)[0]) for b, _ in m.blocks]


def test_diagonal_and_conjugation():
    md = modular_data("u1:5")
    rep = verify(md, diagonal(md))
    assert rep.passed and rep.commutes_with_S < 1e-14
    C = charge_conjugation(md)
    assert C.permutation() == [(-j) % 10 for j in range(10)]
    assert verify(md, C).passed
    assert np.array_equal(charge_conjugation(modular_data("orb:6")).M, np.eye(13, dtype=int))


def test_mipf_validation_and_json():
    with pytest.raises(ValueError):
        Mipf("u1:1", np.ones((2, 3)))
    with pytest.raises(ValueError):
        Mipf("u1:1", [[1.0, 0.5], [0.5, 1.0]])
    m = build_dinv(1, 3)
    back = Mipf.from_json(json.loads(json.dumps(m.to_json())))
    assert back.theory == m.theory and np.array_equal(back.M, m.M)
    assert back.builder == "dinv" and back.params == {"rtilde": 1, "m": 3, "family": "D2"}
    assert back.blocks == m.blocks


def test_verify_size_mismatch():
    with pytest.raises(ValueError, match="size mismatch"):
        verify(modular_data("u1:2"), np.eye(3, dtype=int))


def test_simple_current_radius_claims():
    md = modular_data("u1:6")
    for J, (p, q) in [("4", (2, 3)), ("6", (3, 2))]:
        m = simple_current_invariant(md, J)
        assert verify(md, m).passed
        assert z_from_mipf(md, m, 6) == geometric_circle_spectrum(p, q, 6)


def test_current_existence_obstruction():
    with pytest.raises(CurrentExistenceError):
        simple_current_invariant(modular_data("u1:6"), "1")


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 12), st.data())
def test_every_admissible_circle_current_is_invariant(r, data):
    md = modular_data(TheoryId("u1", r))
    J = data.draw(st.sampled_from(simple_currents(verlinde(md))))
    try:
        m = simple_current_invariant(md, J)
    except CurrentExistenceError:
        return
    assert verify(md, m).passed


def test_scinv_blocks_and_count():
    m = build_scinv(8)
    md = modular_data("D2:8")
    sup = _support(md, m)
    assert ["A(2)", "A(6)"] in sup
    assert md.h[md.index("A(2)")] == F(7, 8) and md.h[md.index("A(6)")] == F(15, 8)
    assert build_scinv(16).field_count() == 11
    with pytest.raises(ValueError):
        build_scinv(6)


@pytest.mark.parametrize("r", [4, 8, 12, 16])
@pytest.mark.parametrize("family", ["D2", "orb"])
def test_scinv_verifies_and_is_the_current_invariant(r, family):
    m = build_scinv(r, family)
    md = modular_data(m.theory)
    assert verify(md, m).passed
    assert m.field_count() == r // 4 + 7
    sc = simple_current_invariant(md, md.labels[2])
    assert np.array_equal(sc.M, m.M)


def test_dinv_r9_blocks():
    md = modular_data("D2:9")
    sup = _support(md, build_dinv(1, 3))
    assert sup == [["A(6)", "O"], ["A(6)", "VV"], ["A(3)", "SS"], ["A(3)", "CC"], ["S"], ["C"], ["VC"], ["VS"]]
    assert md.h[md.index("A(6)")] == 2
    assert (md.h[md.index("A(3)")] - md.h[md.index("SS")]).denominator == 1


def test_dinv_tensor_block_r18():
    md = modular_data("D2:18")
    sup = _support(md, build_dinv(2, 3))
    assert ["A(15)", "A(3)", "A(9)"] in sup


def test_dinv_identity_block_r25():
    md = modular_data("D2:25")
    assert _support(md, build_dinv(1, 5))[0] == ["A(10)", "A(20)", "O"]


@pytest.mark.parametrize("rtilde,M", [(1, 3), (2, 3), (3, 3), (1, 5), (2, 5), (4, 3), (1, 7)])
def test_dinv_verifies(rtilde, M):
    for family in ("D2", "orb"):
        m = build_dinv(rtilde, M, family)
        assert len(m.blocks) == rtilde + 7
        assert verify(modular_data(m.theory), m).passed


def test_dinv_rejects_bad_parameters():
    for args in [(1, 4), (1, 1), (0, 3)]:
        with pytest.raises(ValueError):
            dinv_blocks(*args)


def test_dinv_single_flip_fails():
    md = modular_data("D2:9")
    M = build_dinv(1, 3).M.copy()
    M[1, 2] = M[2, 1] = 1
    rep = verify(md, Mipf(md.theory, M))
    assert not rep.passed and rep.commutes_with_S > 0.01
    assert rep.failures()


def test_b_series_examples():
    md = modular_data("B2:4")
    m = build_b_series(1, 3)
    assert _support(md, m) == [["A(3)", "O"], ["A(3)", "VV"], ["Sp"], ["SpV"]]
    assert md.h[md.index("A(3)")] == 1
    m5 = build_b_series(1, 5)
    md5 = modular_data(m5.theory)
    assert _support(md5, m5)[0] == ["A(10)", "A(5)", "O"] and md5.c == 24
    m27 = build_b_series(3, 3)
    md27 = modular_data(m27.theory)
    assert ["A(12)", "A(3)", "A(6)"] in _support(md27, m27)


@pytest.mark.parametrize("ltilde,M", [(1, 3), (1, 5), (3, 3), (5, 3), (1, 7)])
def test_b_series_verifies(ltilde, M):
    m = build_b_series(ltilde, M)
    assert len(m.blocks) == (ltilde - 1) // 2 + 4
    assert verify(modular_data(m.theory), m).passed


def test_b_series_literal_subscripts_refused():
    with pytest.raises(ValueError, match="literal subscripts"):
        build_b_series(1, 3, literal=True)
    with pytest.raises(ValueError):
        build_b_series(2, 3)


def test_search_circle():
    md = modular_data("u1:6")
    perms = [m.permutation() for m in automorphism_search(md)]
    assert [(5 * j) % 12 for j in range(12)] in perms
    assert list(range(12)) in perms and md.conjugation in perms


@pytest.mark.parametrize("r", [6, 15])
def test_search_d2_galex(r):
    md = modular_data(TheoryId("D2", r))
    found = automorphism_search(md)
    perms = [m.permutation() for m in found]
    assert list(range(md.size)) in perms
    swap = {"SS": "CC", "CC": "SS", "S": "C", "C": "S", "VS": "VC", "VC": "VS"}
    spinor = [md.index(swap.get(lab, lab)) for lab in md.labels]
    assert spinor in perms
    galex = galex_sublist(md, found)
    assert len(galex) >= 2
    assert any(tensor_multipliers(md, m) and tensor_multipliers(md, m)[0] != 1 for m in galex)
    assert all(verify(md, m).commutes_with_S < 1e-12 for m in found)


def test_search_size_cap():
    with pytest.raises(ValueError, match="cap"):
        automorphism_search(modular_data("u1:6"), max_size=5)
