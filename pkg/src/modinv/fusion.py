"""Verlinde fusion rings, simple currents, monodromy charges and ring isomorphisms."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .numerics import default_tolerance, mod1
from .spectra import ModularData


class FusionError(ValueError):
    """Verlinde output is not a valid non-negative integer fusion ring."""

    def __init__(self, relation: str, residual: float, context: str = ""):
        self.relation = relation
        self.residual = residual
        msg = f"{relation} (residual {residual:.3e})"
        super().__init__(f"{context}: {msg}" if context else msg)


@dataclass(frozen=True, eq=False)
class FusionRing:
    """``N[a, b, c]`` = N_{ab}^c with vacuum at index ``vacuum``."""

    N: np.ndarray
    labels: tuple = ()
    vacuum: int = 0
    residual: float = 0.0

    def __post_init__(self):
        N = np.asarray(self.N)
        if N.ndim != 3 or len(set(N.shape)) != 1:
            raise ValueError(f"fusion tensor must be n x n x n, got {N.shape}")
        if not self.labels:
            object.__setattr__(self, "labels", tuple(str(i) for i in range(N.shape[0])))

    @property
    def size(self) -> int:
        return self.N.shape[0]

    @property
    def conjugation(self) -> list[int]:
        return [int(np.argmax(self.N[a, :, self.vacuum])) for a in range(self.size)]

    def product(self, a: int, b: int) -> dict:
        return {int(c): int(self.N[a, b, c]) for c in np.nonzero(self.N[a, b])[0]}

    def fusion_matrix(self, a: int) -> np.ndarray:
        """(N_a)_{bc} = N_{ab}^c."""
        return self.N[a]

    def quantum_dimensions(self) -> np.ndarray:
        """Perron-Frobenius eigenvalue of each fusion matrix."""
        return np.array([float(np.max(np.abs(np.linalg.eigvals(self.N[a].astype(float)))))
                         for a in range(self.size)])

    def check(self) -> dict:
        """Unit, commutativity, associativity and conjugation axioms; returns violations."""
        N = self.N
        n, v = self.size, self.vacuum
        eye = np.eye(n, dtype=N.dtype)
        bad = {}
        if not np.array_equal(N[v], eye):
            bad["unit"] = int(np.sum(N[v] != eye))
        if not np.array_equal(N, N.transpose(1, 0, 2)):
            bad["commutativity"] = int(np.sum(N != N.transpose(1, 0, 2)))
        lhs = np.einsum("abe,ecd->abcd", N, N)
        rhs = np.einsum("bce,aed->abcd", N, N)
        if not np.array_equal(lhs, rhs):
            bad["associativity"] = int(np.sum(lhs != rhs))
        conj = self.conjugation
        dual = np.zeros((n, n), dtype=N.dtype)
        dual[np.arange(n), conj] = 1
        if not np.array_equal(N[:, :, v], dual):
            bad["conjugation"] = int(np.sum(N[:, :, v] != dual))
        return bad

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["a", "b", "c", "N"])
        for a, b, c in zip(*np.nonzero(self.N)):
            w.writerow([self.labels[a], self.labels[b], self.labels[c], int(self.N[a, b, c])])
        return buf.getvalue()


def verlinde(md: ModularData, tol=None) -> FusionRing:
    """N_{ab}^c = sum_m S_am S_bm conj(S_cm) / S_0m, rounded to integers.

    Raises FusionError if the rounding residual exceeds eps or an entry is negative.
    """
    eps = (tol or default_tolerance()).eps
    S = np.asarray(md.S, dtype=complex)
    W = S / S[0][None, :]
    raw = np.einsum("am,bm,cm->abc", W, S, S.conj(), optimize=True)
    N = np.rint(raw.real).astype(np.int64)
    res = float(np.max(np.abs(raw - N)))
    ctx = str(md.theory)
    if res > eps:
        raise FusionError("Verlinde coefficients not integral", res, ctx)
    if np.any(N < 0):
        raise FusionError("negative Verlinde coefficient", float(-N.min()), ctx)
    ring = FusionRing(N, tuple(md.labels), 0, res)
    bad = ring.check()
    if bad:
        raise FusionError(f"fusion axioms violated: {sorted(bad)}", 1.0, ctx)
    return ring


@dataclass(frozen=True)
class SimpleCurrent:
    index: int
    label: str
    order: int
    # action[a] = J x a
    action: tuple = field(repr=False, default=())

    def power(self, n: int, a: int) -> int:
        for _ in range(n % self.order):
            a = self.action[a]
        return a


def simple_currents(ring: FusionRing) -> list[SimpleCurrent]:
    """All J whose fusion with every primary yields exactly one primary."""
    out = []
    for j in range(ring.size):
        if not np.all(ring.N[j].sum(axis=1) == 1):
            continue
        action = tuple(int(np.argmax(ring.N[j, b])) for b in range(ring.size))
        order, a = 1, action[ring.vacuum]
        while a != ring.vacuum:
            a = action[a]
            order += 1
        out.append(SimpleCurrent(j, ring.labels[j], order, action))
    return out


def find_current(ring: FusionRing, label) -> SimpleCurrent:
    for J in simple_currents(ring):
        if J.label == str(label) or J.index == label:
            return J
    raise ValueError(f"{label!r} is not a simple current of this theory")


def monodromy_charge(md: ModularData, J: SimpleCurrent, a: int) -> Fraction:
    """Q_J(a) = h(J) + h(a) - h(J a) mod 1."""
    return mod1(md.h[J.index] + md.h[a] - md.h[J.action[a]])


# --- isomorphisms -----------------------------------------------------------


def _signatures(ring: FusionRing) -> list[tuple]:
    """Relabeling-invariant data per element used to prune the search."""
    qd = ring.quantum_dimensions()
    N = ring.N
    conj = ring.conjugation
    sig = []
    for a in range(ring.size):
        order, x, seen = 1, a, set()
        # orbit length under repeated fusion with itself (for simple currents)
        if N[a].sum(axis=1).max() == 1:
            x = int(np.argmax(N[a, a]))
            while x != ring.vacuum and x not in seen and order < ring.size + 1:
                seen.add(x)
                x = int(np.argmax(N[a, x]))
                order += 1
        else:
            order = 0
        sig.append((
            round(float(qd[a]), 6),
            conj[a] == a,
            order,
            tuple(sorted(N[a, a])),
            tuple(sorted(N[a].sum(axis=0))),
        ))
    return sig


def iter_fusion_isomorphisms(r1: FusionRing, r2: FusionRing):
    """Yield every bijection pi with N1_{ab}^c = N2_{pi a, pi b}^{pi c}."""
    if r1.size != r2.size:
        return
    n = r1.size
    s1, s2 = _signatures(r1), _signatures(r2)
    if sorted(s1) != sorted(s2):
        return
    N1, N2 = r1.N, r2.N
    cands = [[b for b in range(n) if s2[b] == s1[a]] for a in range(n)]
    # most constrained first, vacuum pinned
    order = [r1.vacuum] + sorted((a for a in range(n) if a != r1.vacuum), key=lambda a: (len(cands[a]), a))
    cands[r1.vacuum] = [r2.vacuum] if r2.vacuum in cands[r1.vacuum] else []
    pi = [-1] * n
    used = [False] * n
    done = []

    def consistent(a):
        ia = np.array(done)
        ib = np.array([pi[x] for x in done])
        pa = pi[a]
        if N1[a, a, a] != N2[pa, pa, pa]:
            return False
        if len(done) == 0:
            return True
        # products involving a and assigned elements, in every slot
        if not np.array_equal(N1[a][np.ix_(ia, ia)], N2[pa][np.ix_(ib, ib)]):
            return False
        if not np.array_equal(N1[np.ix_(ia, ia)][:, :, a], N2[np.ix_(ib, ib)][:, :, pa]):
            return False
        if not np.array_equal(N1[a, a][ia], N2[pa, pa][ib]):
            return False
        if not np.array_equal(N1[a, ia, a], N2[pa, ib, pa]):
            return False
        return True

    def rec(k):
        if k == n:
            yield list(pi)
            return
        a = order[k]
        for b in cands[a]:
            if used[b]:
                continue
            pi[a], used[b] = b, True
            if consistent(a):
                done.append(a)
                yield from rec(k + 1)
                done.pop()
            pi[a], used[b] = -1, False

    yield from rec(0)


def fusion_isomorphic(r1: FusionRing, r2: FusionRing):
    """First bijection found (as a list, ``pi[a]`` in r2), or None."""
    return next(iter_fusion_isomorphisms(r1, r2), None)
