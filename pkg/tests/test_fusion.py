from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from modinv.fusion import (
    FusionError,
    FusionRing,
    find_current,
    fusion_isomorphic,
    iter_fusion_isomorphisms,
    monodromy_charge,
    simple_currents,
    verlinde,
)
from modinv.numerics import mod1
from modinv.spectra import ModularData, TheoryId, modular_data

F = Fraction


def test_circle_fusion_is_cyclic_group():
    ring = verlinde(modular_data("u1:3"))
    for a in range(6):
        for b in range(6):
            assert ring.product(a, b) == {(a + b) % 6: 1}


@pytest.mark.parametrize("t", ["u1:4", "orb:3", "orb:6", "D2:7", "D2:12", "B2:5"])
def test_verlinde_axioms(t):
    ring = verlinde(modular_data(t))
    assert ring.residual < 1e-9
    assert ring.check() == {}
    assert np.array_equal(ring.N[0], np.eye(ring.size, dtype=int))


def test_orbifold_v_squared():
    md = modular_data("orb:2")
    ring = verlinde(md)
    assert ring.product(md.index("[V]"), md.index("[V]")) == {0: 1}


@pytest.mark.parametrize("r", range(2, 13))
def test_orbifold_has_four_currents(r):
    md = modular_data(TheoryId("orb", r))
    assert [J.label for J in simple_currents(verlinde(md))] == ["[0]", "[V]", "[S]", "[C]"]


@pytest.mark.parametrize("r", [1, 5, 8])
def test_circle_all_currents(r):
    assert len(simple_currents(verlinde(modular_data(TheoryId("u1", r))))) == 2 * r


def test_currents_have_unit_quantum_dimension():
    md = modular_data("D2:10")
    qd = md.quantum_dimensions()
    for J in simple_currents(verlinde(md)):
        assert abs(qd[J.index] - 1) < 1e-12


def test_monodromy_examples():
    md = modular_data("orb:4")
    ring = verlinde(md)
    V = find_current(ring, "[V]")
    assert monodromy_charge(md, V, md.index("[sigma]")) == F(1, 2)
    assert monodromy_charge(md, V, 0) == 0


@pytest.mark.parametrize("r", [3, 5, 6])
def test_circle_monodromy_formula(r):
    md = modular_data(TheoryId("u1", r))
    ring = verlinde(md)
    for J in simple_currents(ring):
        for a in range(2 * r):
            assert monodromy_charge(md, J, a) == mod1(F(-J.index * a, 2 * r))


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(["u1", "orb", "D2", "B2"]), st.integers(2, 12), st.data())
def test_monodromy_additive(fam, r, data):
    md = modular_data(TheoryId(fam, r))
    ring = verlinde(md)
    J = data.draw(st.sampled_from(simple_currents(ring)))
    a = data.draw(st.integers(0, md.size - 1))
    b = data.draw(st.integers(0, md.size - 1))
    qa, qb = monodromy_charge(md, J, a), monodromy_charge(md, J, b)
    for c in ring.product(a, b):
        assert monodromy_charge(md, J, c) == mod1(qa + qb)


def test_orbifold_r1_is_circle_r4():
    pi = fusion_isomorphic(verlinde(modular_data("orb:1")), verlinde(modular_data("u1:4")))
    assert pi is not None and sorted(pi) == list(range(8))


def test_self_isomorphism_and_size_mismatch():
    ring = verlinde(modular_data("D2:6"))
    assert fusion_isomorphic(ring, ring) == list(range(ring.size))
    assert fusion_isomorphic(verlinde(modular_data("u1:3")), verlinde(modular_data("u1:4"))) is None


@settings(max_examples=15, deadline=None)
@given(st.sampled_from(["orb:3", "D2:5", "B2:4", "u1:5"]), st.randoms(use_true_random=False))
def test_isomorphism_of_relabeled_ring(t, rnd):
    ring = verlinde(modular_data(t))
    n = ring.size
    perm = [0] + rnd.sample(range(1, n), n - 1)
    N2 = np.zeros_like(ring.N)
    P = np.array(perm)
    N2[np.ix_(P, P, P)] = ring.N
    other = FusionRing(N2)
    pi = fusion_isomorphic(ring, other)
    assert pi is not None
    assert np.array_equal(ring.N, other.N[np.ix_(pi, pi, pi)])
    back = fusion_isomorphic(other, ring)
    assert np.array_equal(other.N, ring.N[np.ix_(back, back, back)])


def test_non_isomorphic_same_size():
    # Z4 vs Z2 x Z2
    z4 = verlinde(modular_data("u1:2"))
    N = np.zeros((4, 4, 4), dtype=int)
    for a in range(4):
        for b in range(4):
            N[a, b, a ^ b] = 1
    assert fusion_isomorphic(z4, FusionRing(N)) is None
    assert list(iter_fusion_isomorphisms(FusionRing(N), FusionRing(N)))  # six automorphisms
    assert len(list(iter_fusion_isomorphisms(FusionRing(N), FusionRing(N)))) == 6


def test_verlinde_rejects_non_integral():
    md = modular_data("orb:3")
    theta = 0.3
    R = np.eye(md.size, dtype=complex)
    R[4:6, 4:6] = [[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]]
    bad = ModularData("rotated", md.labels, R @ md.S @ R.T, md.h, md.c)
    with pytest.raises(FusionError):
        verlinde(bad)


def test_fusion_csv():
    text = verlinde(modular_data("u1:1")).to_csv().splitlines()
    assert text == ["a,b,c,N", "0,0,0,1", "0,1,1,1", "1,0,1,1", "1,1,0,1"]
