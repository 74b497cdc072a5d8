"""Extensions: block decomposition of extension-type invariants, the
extended S and T, the clone comparison and the meromorphic chain."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .fusion import iter_fusion_isomorphisms, simple_currents, verlinde
from .invariants import Mipf, build_b_series, build_dinv, simple_current_invariant, verify
from .numerics import Tolerance, default_tolerance, frac_str, max_abs, mod1
from .spectra import ModularData, TheoryId, check_modular_invariants, modular_data


class AutomorphismTypeError(ValueError):
    """M is not a sum of block outer products: automorphism type, no extension."""


class FixedPointResolutionRequired(ValueError):
    """Blocks with multiplicity > 1 need a fixed point resolution to define S."""

    def __init__(self, multiplicities):
        self.multiplicities = list(multiplicities)
        super().__init__(
            "fixed point resolution required: blocks with multiplicity "
            f"{sorted(set(m for m in self.multiplicities if m > 1))} cannot be resolved "
            "from S and T alone, so the extended S matrix is not computed")


class ExtensionError(ValueError):
    def __init__(self, relation: str, residual: float):
        self.relation = relation
        self.residual = residual
        super().__init__(f"{relation} (residual {residual:.3e})")


@dataclass(frozen=True, eq=False)
class BlockDecomposition:
    """M = sum_I multiplicities[I] * outer(blocks[I], blocks[I])."""

    blocks: np.ndarray  # (n_blocks, n_parent) non-negative integers
    multiplicities: tuple

    @property
    def matrix(self) -> np.ndarray:
        B = self.blocks
        return (B.T * np.array(self.multiplicities)) @ B

    def supports(self) -> list[list[int]]:
        return [list(map(int, np.nonzero(b)[0])) for b in self.blocks]


def block_decompose(m) -> BlockDecomposition:
    """Write M as a sum of multiplicity-weighted rank-one integer blocks.

    Repeatedly peels the block through a primary whose diagonal entry is
    minimal (that row is d times the block); backtracks over the choice of
    primary when the remainder goes negative.
    """
    M = np.asarray(m.M if isinstance(m, Mipf) else m, dtype=np.int64)
    if not np.array_equal(M, M.T):
        raise AutomorphismTypeError("M is not symmetric: automorphism type, no extension")
    if np.any(M < 0) or M[0, 0] != 1:
        raise ValueError("M must be non-negative with M[0,0] = 1")

    def peel(R, depth=0):
        if not R.any():
            return []
        diag = np.diag(R)
        if np.any((diag == 0) & (R.any(axis=1))):
            return None
        live = np.nonzero(diag)[0]
        dmin = diag[live].min()
        for i in live[diag[live] == dmin]:
            row = R[i]
            for d in sorted({k for k in range(1, dmin + 1) if dmin % k == 0}, reverse=True):
                # block b with b[i] = 1 and multiplicity d: row = d * b
                if np.any(row % d):
                    continue
                b = row // d
                if b[i] != 1:
                    continue
                rest = R - d * np.outer(b, b)
                if np.any(rest < 0):
                    continue
                tail = peel(rest, depth + 1)
                if tail is not None:
                    return [(b, d)] + tail
        return None

    found = peel(M.copy())
    if found is None:
        raise AutomorphismTypeError("M is not a sum of block outer products: automorphism type, no extension")
    found.sort(key=lambda bd: tuple(np.nonzero(bd[0])[0]))
    B = np.array([b for b, _ in found], dtype=np.int64)
    if B[0, 0] != 1 or np.count_nonzero(B[:, 0]) != 1:
        raise ValueError("the vacuum must sit in exactly one block with coefficient 1")
    if np.linalg.matrix_rank(B.astype(float)) != len(B):
        raise ValueError("blocks are linearly dependent")
    return BlockDecomposition(B, tuple(int(d) for _, d in found))


@dataclass(frozen=True, eq=False)
class ExtendedTheory:
    parent: ModularData
    decomposition: BlockDecomposition
    data: ModularData
    s_residual: float

    @property
    def S(self) -> np.ndarray:
        return self.data.S

    @property
    def h(self) -> tuple:
        return self.data.h

    @property
    def c(self) -> Fraction:
        return self.data.c

    @property
    def labels(self) -> tuple:
        return self.data.labels


def extended_modular_data(parent: ModularData, dec, tol=None) -> ExtendedTheory:
    """Solve S_ext B = B S on the block span; T_ext from block members.

    The extended weight of a block is the smallest weight among its
    members; all members must agree mod 1.
    """
    eps = (tol or default_tolerance()).eps
    if isinstance(dec, Mipf):
        dec = block_decompose(dec)
    if any(m != 1 for m in dec.multiplicities):
        raise FixedPointResolutionRequired(dec.multiplicities)
    B = dec.blocks.astype(complex)
    S_ext = (B @ parent.S @ B.T) @ np.linalg.inv(B @ B.T)
    res = max_abs(S_ext @ B - B @ parent.S)
    if res > eps:
        raise ExtensionError("S_ext B = B S not solvable on the block span", res)
    h_ext, labels = [], []
    for b in dec.blocks:
        idx = list(np.nonzero(b)[0])
        hs = [parent.h[i] for i in idx]
        if len({mod1(x) for x in hs}) != 1:
            raise ExtensionError(f"block {[parent.labels[i] for i in idx]} mixes T eigenvalues", 1.0)
        h_ext.append(min(hs))
        labels.append("+".join(parent.labels[i] for i in idx))
    name = f"ext[{parent.theory}]"
    resid = check_modular_invariants(S_ext, h_ext, parent.c, Tolerance(eps), context=name)
    resid["S_ext B = B S"] = res
    data = ModularData(name, tuple(labels), S_ext, tuple(h_ext), parent.c, resid)
    return ExtendedTheory(parent, dec, data, res)


def extend(m: Mipf, tol=None) -> ExtendedTheory:
    parent = m.theory if isinstance(m.theory, ModularData) else modular_data(m.theory, tol)
    return extended_modular_data(parent, block_decompose(m), tol)


# --- clones -----------------------------------------------------------------


def clone_target(rtilde: int, family: str = "D2") -> ModularData:
    """D2 target of the clone comparison; rtilde = 1 uses the formal D2:1 data."""
    return modular_data(TheoryId(family, rtilde))


def _best_bijection(ext: ModularData, target: ModularData, tol):
    """Fusion isomorphism under which the S matrices agree best."""
    eps = (tol or default_tolerance()).eps
    r1, r2 = verlinde(ext, tol), verlinde(target, tol)
    best, best_res, count = None, np.inf, 0
    for pi in iter_fusion_isomorphisms(r1, r2):
        count += 1
        res = max_abs(ext.S - target.S[np.ix_(pi, pi)])
        if res < best_res:
            best, best_res = pi, res
        if res <= eps:
            break
    return best, best_res, count


@dataclass
class CloneReport:
    rtilde: int
    M: int
    family: str
    block_count: int
    multiplicities: list
    s_residual: float
    bijection: list | None
    s_match_residual: float
    labels_ext: list
    labels_target: list
    weights_parent: list
    weights_target: list
    spinor_weight_difference: Fraction | None
    t_match: bool
    v_current_ok: bool
    imag_max: float
    eps: float

    @property
    def iso_found(self) -> bool:
        return self.bijection is not None

    @property
    def expected_spinor_difference(self) -> Fraction:
        """rtilde (M^2 - 1) / 8 for D2; the orbifold twist fields keep h = 1/16."""
        if self.family == "orb":
            return Fraction(0)
        return Fraction(self.rtilde * (self.M ** 2 - 1), 8)

    @property
    def passed(self) -> bool:
        return (self.iso_found and self.s_match_residual <= self.eps and self.t_match
                and self.spinor_weight_difference == self.expected_spinor_difference
                and self.v_current_ok)

    def to_json(self) -> dict:
        return {
            "params": {"rtilde": self.rtilde, "m": self.M, "family": self.family},
            "block_count": self.block_count,
            "multiplicities": self.multiplicities,
            "s_residual": self.s_residual,
            "iso_bijection": None if self.bijection is None else
            {a: self.labels_target[b] for a, b in zip(self.labels_ext, self.bijection)},
            "s_match_residual": self.s_match_residual,
            "weights_parent": dict(zip(self.labels_ext, map(frac_str, self.weights_parent))),
            "weights_target": dict(zip(self.labels_target, map(frac_str, self.weights_target))),
            "spinor_weight_difference": None if self.spinor_weight_difference is None
            else frac_str(self.spinor_weight_difference),
            "t_match": self.t_match,
            "v_current_ok": self.v_current_ok,
            "imag_max": self.imag_max,
            "verdict": "pass" if self.passed else "fail",
        }


def clone_check(rtilde: int, M: int, family: str = "D2", tol=None) -> CloneReport:
    """Extend the Dinv invariant at r = rtilde M^2 and compare with the rtilde theory."""
    eps = (tol or default_tolerance()).eps
    inv = build_dinv(rtilde, M, family)
    parent = modular_data(inv.theory, tol)
    rep = verify(parent, inv, tol)
    if not rep.passed:
        raise ExtensionError("Dinv invariant failed verification", max(rep.commutes_with_S, rep.commutes_with_T))
    ext = extended_modular_data(parent, block_decompose(inv), tol)
    target = clone_target(rtilde, family)
    pi, s_res, _ = _best_bijection(ext.data, target, tol)
    t_match = False
    spin_diff = None
    v_ok = False
    if pi is not None:
        t_match = all(mod1(ext.h[a] - target.h[b]) == 0 for a, b in enumerate(pi))
        spinor = target.labels.index("S" if family == "D2" else "[sigma]")
        a = pi.index(spinor)
        spin_diff = ext.h[a] - target.h[spinor]
        v = target.labels.index("VV" if family == "D2" else "[V]")
        av = pi.index(v)
        ring = verlinde(ext.data, tol)
        v_ok = mod1(ext.h[av]) == 0 and av in {J.index for J in simple_currents(ring)}
    return CloneReport(
        rtilde, M, family, len(ext.decomposition.blocks), list(ext.decomposition.multiplicities),
        ext.s_residual, pi, s_res, list(ext.labels), list(target.labels),
        list(ext.h), list(target.h), spin_diff, t_match, v_ok,
        float(np.max(np.abs(ext.S.imag))), eps)


# --- meromorphic chain ------------------------------------------------------


@dataclass
class MeromorphicReport:
    M: int
    ltilde: int
    c: Fraction
    intermediate_labels: list
    intermediate_weights: list
    all_simple_currents: bool
    current: str
    final_labels: list
    final_count: int

    @property
    def passed(self) -> bool:
        return self.final_count == 1 and self.all_simple_currents and self.c % 8 == 0

    def to_json(self) -> dict:
        return {
            "params": {"ltilde": self.ltilde, "m": self.M},
            "c": frac_str(self.c),
            "intermediate": dict(zip(self.intermediate_labels, map(frac_str, self.intermediate_weights))),
            "all_simple_currents": self.all_simple_currents,
            "current": self.current,
            "final_labels": self.final_labels,
            "final_count": self.final_count,
            "verdict": "pass" if self.passed else "fail",
        }


def meromorphic_chain(M: int, ltilde: int = 1, tol=None) -> MeromorphicReport:
    """B-series extension at L = M^2, then the integer-spin spinor current."""
    if ltilde != 1:
        raise ValueError("the meromorphic chain starts from ltilde = 1")
    inv = build_b_series(ltilde, M)
    first = extend(inv, tol)
    ring = verlinde(first.data, tol)
    currents = simple_currents(ring)
    all_sc = len(currents) == first.data.size
    # spinor-type blocks are the singletons of the Sp and SpV primaries
    spinors = [i for i, lab in enumerate(first.labels) if lab in ("Sp", "SpV")]
    integral = [i for i in spinors if first.h[i].denominator == 1]
    if len(integral) != 1:
        raise ArithmeticError(f"expected exactly one integer-spin spinor, weights {[first.h[i] for i in spinors]}")
    J = next(j for j in currents if j.index == integral[0])
    second_inv = simple_current_invariant(first.data, J, ring)
    rep = verify(first.data, second_inv, tol)
    if not rep.passed:
        raise ExtensionError("second extension is not invariant", rep.commutes_with_S)
    second = extended_modular_data(first.data, block_decompose(second_inv), tol)
    return MeromorphicReport(M, ltilde, first.c, list(first.labels), list(first.h), all_sc,
                             first.labels[J.index], list(second.labels), second.data.size)
