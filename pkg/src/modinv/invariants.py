"""Modular invariant partition functions: builders, verification and search.

A :class:`Mipf` is a non-negative integer matrix ``M`` indexed by the
primaries of a theory (in canonical order) with ``M[0, 0] == 1``.  The
extension-type builders also record the blocks they were assembled from,
``M = sum_I b_I b_I^T``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import lie_data
from .fusion import SimpleCurrent, find_current, monodromy_charge, verlinde
from .lie_data import AlgebraId
from .numerics import default_tolerance, max_abs, mod1
from .spectra import ModularData, TheoryId, modular_data

# Index of each named field in the (aligned) D2 / orb canonical orders.
_HEAD = {"0": 0, "vv": 1, "ss": 2, "cc": 3, "s": 4, "c": 5, "vc": 6, "vs": 7}
_B_HEAD = {"0": 0, "vv": 1, "s": 2, "sv": 3}


@dataclass(frozen=True, eq=False)
class Mipf:
    theory: object
    M: np.ndarray
    builder: str = "custom"
    params: dict = field(default_factory=dict)
    blocks: tuple = ()

    def __post_init__(self):
        M = np.asarray(self.M)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise ValueError(f"M must be square, got shape {M.shape}")
        if not np.issubdtype(M.dtype, np.integer):
            if not np.all(M == np.round(M)):
                raise ValueError("M must have integer entries")
            M = np.round(M).astype(np.int64)
        object.__setattr__(self, "M", M)

    @property
    def size(self) -> int:
        return self.M.shape[0]

    def is_permutation(self) -> bool:
        M = self.M
        return bool(np.all((M == 0) | (M == 1)) and np.all(M.sum(0) == 1) and np.all(M.sum(1) == 1))

    def permutation(self) -> list[int]:
        if not self.is_permutation():
            raise ValueError("not a permutation invariant")
        return [int(np.argmax(row)) for row in self.M]

    def field_count(self) -> int:
        """Number of extended fields, counting a multiplicity-k block k times."""
        return sum(self.block_multiplicities()) if self.blocks else self.size

    def block_multiplicities(self) -> list[int]:
        return [m for _, m in self.blocks]

    def to_json(self) -> dict:
        doc = {
            "theory": str(self.theory),
            "M": self.M.tolist(),
            "builder": self.builder,
            "params": dict(self.params),
        }
        if self.blocks:
            doc["blocks"] = [{"support": list(map(int, b)), "multiplicity": int(m)} for b, m in self.blocks]
        return doc

    @classmethod
    def from_json(cls, doc) -> "Mipf":
        if isinstance(doc, str):
            doc = json.loads(doc)
        theory = doc["theory"]
        try:
            theory = TheoryId.parse(theory)
        except ValueError:
            pass
        blocks = tuple((tuple(b["support"]), b["multiplicity"]) for b in doc.get("blocks", []))
        return cls(theory, np.array(doc["M"], dtype=np.int64), doc.get("builder", "custom"),
                   dict(doc.get("params", {})), blocks)


def _from_blocks(theory, n, blocks, builder, params) -> Mipf:
    """blocks: list of (index list, multiplicity); repeated indices add up."""
    M = np.zeros((n, n), dtype=np.int64)
    stored = []
    for idx, mult in blocks:
        b = np.zeros(n, dtype=np.int64)
        for i in idx:
            b[i] += 1
        M += mult * np.outer(b, b)
        stored.append((tuple(int(x) for x in b), mult))
    return Mipf(theory, M, builder, params, tuple(stored))


@dataclass
class InvarianceReport:
    commutes_with_S: float
    commutes_with_T: float
    vacuum_ok: bool
    nonneg_ok: bool
    eps: float

    @property
    def passed(self) -> bool:
        return (self.commutes_with_S <= self.eps and self.commutes_with_T <= self.eps
                and self.vacuum_ok and self.nonneg_ok)

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    def failures(self) -> list[str]:
        out = []
        if self.commutes_with_S > self.eps:
            out.append(f"SM=MS residual {self.commutes_with_S:.3e}")
        if self.commutes_with_T > self.eps:
            out.append(f"TM=MT residual {self.commutes_with_T:.3e}")
        if not self.vacuum_ok:
            out.append("M[0,0] != 1")
        if not self.nonneg_ok:
            out.append("negative entry in M")
        return out

    def to_json(self) -> dict:
        return {
            "commutes_with_S": self.commutes_with_S,
            "commutes_with_T": self.commutes_with_T,
            "vacuum_ok": self.vacuum_ok,
            "nonneg_ok": self.nonneg_ok,
            "eps": self.eps,
            "verdict": self.verdict,
        }


def verify(md: ModularData, m: Mipf, tol=None) -> InvarianceReport:
    eps = (tol or default_tolerance()).eps
    M = np.asarray(m.M if isinstance(m, Mipf) else m)
    if M.shape != (md.size, md.size):
        raise ValueError(f"size mismatch: M is {M.shape}, theory has {md.size} primaries")
    Mc = M.astype(complex)
    T = md.Tphase
    rs = max_abs(md.S @ Mc - Mc @ md.S)
    rt = max_abs(T[:, None] * Mc - Mc * T[None, :])
    return InvarianceReport(rs, rt, bool(M[0, 0] == 1), bool(np.all(M >= 0)), eps)


# --- basic invariants -------------------------------------------------------


def _md(t) -> ModularData:
    return t if isinstance(t, ModularData) else modular_data(t)


def diagonal(t) -> Mipf:
    md = _md(t)
    return _from_blocks(md.theory, md.size, [([i], 1) for i in range(md.size)], "diag", {})


def charge_conjugation(t) -> Mipf:
    md = _md(t)
    conj = md.conjugation
    M = np.zeros((md.size, md.size), dtype=np.int64)
    M[np.arange(md.size), conj] = 1
    return Mipf(md.theory, M, "conj", {})


# --- simple currents --------------------------------------------------------


class CurrentExistenceError(ValueError):
    """The simple current admits no modular invariant (spin obstruction)."""


def spin_offset(md: ModularData, J: SimpleCurrent) -> int:
    """Even rho mod 2N with h_J = rho (N - 1) / 2N mod 1, N = ord(J)."""
    N = J.order
    h = mod1(md.h[J.index])
    for rho in range(0, 2 * N, 2):
        if mod1(Fraction(rho * (N - 1), 2 * N) - h) == 0:
            return rho
    raise CurrentExistenceError(
        f"current {J.label} of order {N} with h = {h} has no even spin offset; "
        "no simple-current invariant exists")


def simple_current_invariant(md: ModularData, J, ring=None) -> Mipf:
    """M_{a, J^n a} = #{n mod N : Q_J(a) + n rho / 2N = 0 mod 1}."""
    md = _md(md)
    ring = ring or verlinde(md)
    if not isinstance(J, SimpleCurrent):
        J = find_current(ring, J)
    rho = spin_offset(md, J)
    N = J.order
    n_pr = md.size
    M = np.zeros((n_pr, n_pr), dtype=np.int64)
    for a in range(n_pr):
        q = monodromy_charge(md, J, a)
        b = a
        for n in range(N):
            if mod1(q + Fraction(n * rho, 2 * N)) == 0:
                M[a, b] += 1
            b = J.action[b]
    return Mipf(md.theory, M, "sc", {"current": J.label})


# --- the D and B series -----------------------------------------------------


def _theory(family: str, param: int) -> TheoryId:
    if family not in ("D2", "orb"):
        raise ValueError(f"family must be 'D2' or 'orb', got {family!r}")
    return TheoryId(family, param)


def _ladder_index(r: int, ell: int) -> int:
    """Position of the tensor A(ell) (orb: [ell]) after folding ell ~ 2r - ell."""
    ell %= 2 * r
    if ell > r:
        ell = 2 * r - ell
    if not 1 <= ell <= r - 1:
        raise ValueError(f"tensor index {ell} folds outside 1..{r - 1}")
    return 7 + ell


def build_scinv(r: int, family: str = "D2") -> Mipf:
    """Simple-current invariant of the SS / [S] current for 4 | r."""
    if r % 4 or r < 4:
        raise ValueError(f"scinv needs r divisible by 4, got r={r}")
    t = _theory(family, r)
    H, A = _HEAD, (lambda ell: _ladder_index(r, ell))
    blocks = [
        ([H["0"], H["ss"]], 1),
        ([H["vv"], H["cc"]], 1),
        ([H["s"]], 2),
        ([H["vc"]], 2),
        ([A(r // 2)], 2),
    ]
    blocks += [([A(ell), A(r - ell)], 1) for ell in range(2, r // 2 - 1, 2)]
    return _from_blocks(t, r + 7, blocks, "scinv", {"r": r, "family": family})


def dinv_blocks(rtilde: int, M: int) -> list[list[int]]:
    """Index lists of the Dinv blocks on the aligned D2/orb order at r = rtilde M^2."""
    if M % 2 == 0:
        raise ValueError("M must be odd; even M goes through the scinv chain")
    if M < 3 or rtilde < 1:
        raise ValueError(f"need M >= 3 and rtilde >= 1, got rtilde={rtilde}, M={M}")
    r = rtilde * M * M
    H, A = _HEAD, (lambda ell: _ladder_index(r, ell))
    half = (M - 1) // 2
    even = [A(2 * m * rtilde * M) for m in range(1, half + 1)]
    odd = [A((2 * m - 1) * rtilde * M) for m in range(1, half + 1)]
    blocks = [[H["0"]] + even, [H["vv"]] + even, [H["ss"]] + odd, [H["cc"]] + odd]
    blocks += [[H[k]] for k in ("s", "c", "vc", "vs")]
    for l in range(1, rtilde):
        blocks.append([A(r - abs(r - l * M - 2 * m * rtilde * M)) for m in range(M)])
    return blocks


def build_dinv(rtilde: int, M: int, family: str = "D2") -> Mipf:
    """Extension invariant of SO(2 rtilde M^2)_2 (or the orbifold at r = rtilde M^2)."""
    blocks = dinv_blocks(rtilde, M)
    r = rtilde * M * M
    return _from_blocks(_theory(family, r), r + 7, [(b, 1) for b in blocks], "dinv",
                        {"rtilde": rtilde, "m": M, "family": family})


def _fold_b(L: int, ell: int) -> int:
    ell %= L
    return min(ell, L - ell)


def build_b_series(ltilde: int, M: int, literal: bool = False) -> Mipf:
    """Extension invariant of SO(L)_2 with L = ltilde M^2 (both odd)."""
    if ltilde < 1 or ltilde % 2 == 0 or M < 3 or M % 2 == 0:
        raise ValueError(f"need odd ltilde >= 1 and odd M >= 3, got ltilde={ltilde}, M={M}")
    L = ltilde * M * M
    s = (L - 1) // 2
    if literal:
        bad = [m * L * M for m in range(1, (M - 1) // 2 + 1)]
        raise ValueError(
            f"literal subscripts m*L*M = {bad} exceed the tensor range 1..{s} for L={L} and fold onto "
            f"the vacuum/identity (m*L*M = 0 mod L); use the m*ltilde*M reading")
    t = TheoryId("B2", s)

    def A(ell):
        ell = _fold_b(L, ell)
        if not 1 <= ell <= s:
            raise ValueError(f"tensor index {ell} folds outside 1..{s}")
        return 3 + ell

    H = _B_HEAD
    first = [A(m * ltilde * M) for m in range(1, (M - 1) // 2 + 1)]
    blocks = [[H["0"]] + first, [H["vv"]] + first, [H["s"]], [H["sv"]]]
    for l in range(1, (ltilde - 1) // 2 + 1):
        blocks.append([A(l * M + m * ltilde * M) for m in range(M)])
    return _from_blocks(t, s + 4, [(b, 1) for b in blocks], "bseries",
                        {"ltilde": ltilde, "m": M, "literal": False})


# --- automorphism search ----------------------------------------------------

SEARCH_MAX_SIZE = 90


def automorphism_search(md, tol=None, max_size: int = SEARCH_MAX_SIZE) -> list[Mipf]:
    """Every permutation pi with T_{pi a} = T_a and S_{pi a, pi b} = S_ab.

    Candidates are pruned by h mod 1 and by the vacuum-row entry (quantum
    dimension); results are sorted lexicographically by permutation.
    """
    md = _md(md)
    n = md.size
    if n > max_size:
        raise ValueError(f"{n} primaries exceeds the search cap of {max_size}")
    eps = (tol or default_tolerance()).eps
    S = md.S
    hmod = [mod1(x) for x in md.h]
    row0 = S[0]
    cands = [[b for b in range(n) if hmod[b] == hmod[a] and abs(row0[b] - row0[a]) <= eps]
             for a in range(n)]
    cands[0] = [0]
    order = sorted(range(n), key=lambda a: (len(cands[a]), a))
    pi = [-1] * n
    used = [False] * n
    done: list[int] = []
    found = []

    def rec(k):
        if k == n:
            found.append(tuple(pi))
            return
        a = order[k]
        for b in cands[a]:
            if used[b] or abs(S[a, a] - S[b, b]) > eps:
                continue
            if done:
                ia = np.array(done)
                if max_abs(S[a, ia] - S[b, [pi[x] for x in done]]) > eps:
                    continue
            pi[a], used[b] = b, True
            done.append(a)
            rec(k + 1)
            done.pop()
            pi[a], used[b] = -1, False

    rec(0)
    out = []
    for perm in sorted(found):
        M = np.zeros((n, n), dtype=np.int64)
        M[np.arange(n), perm] = 1
        out.append(Mipf(md.theory, M, "search", {}))
    return out


def tensor_multipliers(md: ModularData, m: Mipf) -> list[int]:
    """Units w mod 4r whose ladder action ell -> fold(w ell) reproduces the permutation.

    Applies to D2 theories only; empty if the permutation does not act on
    the tensor ladder as multiplication by a unit.
    """
    t = md.theory
    if not isinstance(t, TheoryId) or t.family != "D2" or t.param < 3:
        return []
    r = t.param
    perm = m.permutation()
    alg = AlgebraId("D", r)
    pos = {lab: i for i, lab in enumerate(md.labels)}
    out = []
    for w in range(1, 4 * r, 2):
        if math.gcd(w, 4 * r) != 1:
            continue
        ok = True
        for ell in range(1, r):
            tgt = (w * ell) % (2 * r)
            if tgt in (0, r):
                ok = False
                break
            if perm[pos[lie_data.ladder_rep(alg, ell).label]] != pos[lie_data.ladder_rep(alg, tgt).label]:
                ok = False
                break
        if ok:
            out.append(w)
    return out


def galex_sublist(md: ModularData, found: list[Mipf]) -> list[Mipf]:
    """Search results that act on the tensor ladder as ell -> w ell, one per ladder action."""
    seen, out = set(), []
    for m in found:
        if not tensor_multipliers(md, m):
            continue
        key = tuple(m.permutation()[8:])
        if key not in seen:
            seen.add(key)
            out.append(m)
    return out
