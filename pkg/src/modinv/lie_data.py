"""Weights, conformal weights and Kac-Peterson S matrices for B_r and D_r.

Weights live in the orthonormal epsilon basis with long roots of length
squared 2.  Only levels 1 and 2 are supported; level 1 exists so that the
D_{r,1} and B_{s,1} data used by the coset dictionaries can be checked
with the same machinery.
"""
from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .numerics import default_tolerance, symmetry_residual, unitarity_residual

KP_MAX_RANK = 8


@dataclass(frozen=True)
class AlgebraId:
    series: str
    rank: int

    def __post_init__(self):
        if self.series not in ("B", "D"):
            raise ValueError(f"series must be 'B' or 'D', got {self.series!r}")
        if self.series == "D" and self.rank < 2:
            raise ValueError("D_r requires rank >= 2")
        if self.series == "B" and self.rank < 1:
            raise ValueError("B_s requires rank >= 1")

    @property
    def N(self) -> int:
        return 2 * self.rank + (1 if self.series == "B" else 0)

    @property
    def L(self) -> int:
        if self.series != "B":
            raise AttributeError("L is only defined for the B series")
        return self.N

    @property
    def dual_coxeter(self) -> int:
        return 2 * self.rank - 1 if self.series == "B" else 2 * self.rank - 2

    @property
    def dim(self) -> int:
        n = self.N
        return n * (n - 1) // 2

    def __str__(self):
        return f"{self.series}{self.rank}"


@dataclass(frozen=True)
class Level2Rep:
    """Integrable highest weight; ``name`` is one of the fixed labels, or
    ``"A"`` for the antisymmetric tensor ladder with rank ``ell``."""

    name: str
    ell: int = 0

    @property
    def label(self) -> str:
        return f"A({self.ell})" if self.name == "A" else self.name

    def __str__(self):
        return self.label


D_FIXED = ("O", "V", "VV", "S", "C", "VS", "VC", "SS", "CC", "SC")
B_FIXED = ("O", "VV", "Sp", "SpV")

_A_RE = re.compile(r"^A\(?(\d+)\)?$")


def parse_rep(alg: AlgebraId, rep) -> Level2Rep:
    """Parse and canonicalise a level-2 label (D: A(1)->V, A(r-1)->SC)."""
    if isinstance(rep, Level2Rep):
        name, ell = rep.name, rep.ell
    else:
        s = str(rep).strip()
        m = _A_RE.match(s)
        name, ell = ("A", int(m.group(1))) if m else (s, 0)
    r = alg.rank
    if alg.series == "D":
        if name == "A":
            if ell == 1:
                return Level2Rep("V")
            if ell == r - 1:
                return Level2Rep("SC")
            if not 2 <= ell <= r - 2:
                raise ValueError(f"A({ell}) out of range for D{r} level 2")
            return Level2Rep("A", ell)
        if name not in D_FIXED:
            raise ValueError(f"unknown D level-2 label {rep!r}")
        if name == "SC" and r == 2:
            return Level2Rep("V")
        return Level2Rep(name)
    if name == "A":
        if not 1 <= ell <= (alg.L - 1) // 2:
            raise ValueError(f"A({ell}) out of range for B{r} level 2")
        return Level2Rep("A", ell)
    if name not in B_FIXED:
        raise ValueError(f"unknown B level-2 label {rep!r}")
    return Level2Rep(name)


def ladder_rep(alg: AlgebraId, ell: int) -> Level2Rep:
    """Antisymmetric tensor of rank ``ell`` with the doubled-range folding.

    D: 1 <= ell <= r-1 with ell == 2r - ell.  B: 1 <= ell <= L-1 with
    ell == L - ell.
    """
    period = 2 * alg.rank if alg.series == "D" else alg.L
    ell %= period
    if ell > period // 2:
        ell = period - ell
    if alg.series == "D" and ell in (0, alg.rank):
        raise ValueError(f"ladder index folds onto {'O' if ell == 0 else 'SS/CC'}; not a tensor label")
    if alg.series == "B" and ell == 0:
        raise ValueError("ladder index folds onto the vacuum; not a tensor label")
    return parse_rep(alg, Level2Rep("A", ell))


def level2_reps(alg: AlgebraId) -> list[Level2Rep]:
    """All level-2 primaries in canonical order.

    D: O, VV, SS, CC, S, C, VC, VS, then the ladder V, A(2..r-2), SC.
    B: O, VV, Sp, SpV, A(1..(L-1)/2).
    """
    r = alg.rank
    if alg.series == "D":
        head = [Level2Rep(n) for n in ("O", "VV", "SS", "CC", "S", "C", "VC", "VS")]
        return head + [ladder_rep(alg, ell) for ell in range(1, r)]
    head = [Level2Rep(n) for n in ("O", "VV", "Sp", "SpV")]
    return head + [Level2Rep("A", ell) for ell in range(1, (alg.L - 1) // 2 + 1)]


def level1_reps(alg: AlgebraId) -> list[Level2Rep]:
    if alg.series == "D":
        return [Level2Rep(n) for n in ("O", "V", "S", "C")]
    return [Level2Rep(n) for n in ("O", "V", "Sp")]


def rho(alg: AlgebraId) -> tuple[Fraction, ...]:
    r = alg.rank
    if alg.series == "D":
        return tuple(Fraction(r - i) for i in range(1, r + 1))
    return tuple(Fraction(2 * (r - i) + 1, 2) for i in range(1, r + 1))


def weight_vector(alg: AlgebraId, rep) -> tuple[Fraction, ...]:
    """Highest weight in the epsilon basis."""
    r = alg.rank
    if not isinstance(rep, Level2Rep):
        m = _A_RE.match(str(rep))
        rep = Level2Rep("A", int(m.group(1))) if m else Level2Rep(str(rep))
    name, ell = rep.name, rep.ell
    h = Fraction(1, 2)
    one, zero = Fraction(1), Fraction(0)

    def unit(*idx):
        v = [zero] * r
        for i in idx:
            v[i] += 1
        return tuple(v)

    if name == "O":
        return (zero,) * r
    if name == "V":
        return unit(0)
    if name == "VV":
        return unit(0, 0)
    if name == "A":
        return unit(*range(ell))
    if alg.series == "D":
        table = {
            "S": (h,) * r,
            "C": (h,) * (r - 1) + (-h,),
            "VS": (h + 1,) + (h,) * (r - 1),
            "VC": (h + 1,) + (h,) * (r - 2) + (-h,),
            "SS": (one,) * r,
            "CC": (one,) * (r - 1) + (-one,),
            "SC": (one,) * (r - 1) + (zero,),
        }
    else:
        table = {"Sp": (h,) * r, "SpV": (h + 1,) + (h,) * (r - 1)}
    if name not in table:
        raise ValueError(f"no weight for {name!r} in {alg}")
    return table[name]


def _dot(x, y) -> Fraction:
    return sum((a * b for a, b in zip(x, y)), Fraction(0))


def casimir_weight(alg: AlgebraId, rep, level: int = 2) -> Fraction:
    """(lambda, lambda + 2 rho) / (2 (k + g)) evaluated exactly."""
    lam = weight_vector(alg, rep)
    two_rho = [2 * x for x in rho(alg)]
    return _dot(lam, [a + b for a, b in zip(lam, two_rho)]) / (2 * (level + alg.dual_coxeter))


def conformal_weight(alg: AlgebraId, rep) -> Fraction:
    """Closed-form level-2 conformal weight."""
    rep = parse_rep(alg, rep)
    r = alg.rank
    F = Fraction
    if alg.series == "D":
        if rep.name == "A":
            ell = rep.ell
            return F(ell * (2 * r - ell), 4 * r)
        return {
            "O": F(0),
            "V": F(2 * r - 1, 4 * r),
            "VV": F(1),
            "S": F(2 * r - 1, 16),
            "C": F(2 * r - 1, 16),
            "VS": F(2 * r - 1, 16) + F(1, 2),
            "VC": F(2 * r - 1, 16) + F(1, 2),
            "SS": F(r, 4),
            "CC": F(r, 4),
            "SC": F(r * r - 1, 4 * r),
        }[rep.name]
    L = alg.L
    if rep.name == "A":
        return F(rep.ell * (L - rep.ell), 2 * L)
    return {"O": F(0), "VV": F(1), "Sp": F(L - 1, 16), "SpV": F(L + 7, 16)}[rep.name]


def central_charge(alg: AlgebraId, level: int = 2) -> Fraction:
    return Fraction(level * alg.dim, level + alg.dual_coxeter)


def _perm_signs(perms: np.ndarray) -> np.ndarray:
    n = perms.shape[1]
    inv = np.zeros(len(perms), dtype=np.int64)
    for i in range(n):
        for j in range(i + 1, n):
            inv += perms[:, i] > perms[:, j]
    return np.where(inv % 2 == 0, 1.0, -1.0)


def _weyl_sum(alg: AlgebraId, shifted: np.ndarray, kappa: int) -> np.ndarray:
    """Sum over W of det(w) exp(-2 pi i (w x, y) / kappa) for all rows x, y.

    Permutations are enumerated explicitly; the sign-flip subgroup (all
    flips for B, even flips for D) is summed coordinate by coordinate.
    """
    r = alg.rank
    perms = np.array(list(itertools.permutations(range(r))), dtype=np.int64)
    psign = _perm_signs(perms)
    n = shifted.shape[0]
    out = np.zeros((n, n), dtype=complex)
    for a in range(n):
        xa = shifted[a][perms]  # (|S_r|, r): x_{sigma(i)}
        theta = 2 * np.pi * xa[:, None, :] * shifted[None, :, :] / kappa  # (P, n, r)
        odd = np.prod(-2j * np.sin(theta), axis=2)
        if alg.series == "B":
            total = odd
        else:
            even = np.prod(2 * np.cos(theta), axis=2)
            total = 0.5 * (odd + even)
        out[a] = psign @ total
    return out


def kac_peterson_S(alg: AlgebraId, level: int = 2, tol=None) -> tuple[list[Level2Rep], np.ndarray]:
    """Brute-force Weyl-sum S matrix, normalised to be unitary with a
    positive vacuum row.  Rows follow :func:`level2_reps` (or
    :func:`level1_reps` at level 1)."""
    if alg.rank > KP_MAX_RANK:
        raise ValueError(f"rank {alg.rank} too large for the Weyl sum (max {KP_MAX_RANK})")
    if level not in (1, 2):
        raise ValueError("only levels 1 and 2 are supported")
    reps = level2_reps(alg) if level == 2 else level1_reps(alg)
    rho_v = np.array([float(x) for x in rho(alg)])
    shifted = np.array([[float(x) for x in weight_vector(alg, rep)] for rep in reps]) + rho_v
    kappa = level + alg.dual_coxeter
    raw = _weyl_sum(alg, shifted, kappa)
    raw = raw * (abs(raw[0, 0]) / raw[0, 0])
    S = raw / np.linalg.norm(raw[0])
    eps = (tol or default_tolerance()).eps
    if unitarity_residual(S) > eps or symmetry_residual(S) > eps:
        raise ArithmeticError(f"Weyl sum for {alg} level {level} did not produce a unitary symmetric S")
    if np.any(S[0].real <= 0) or np.max(np.abs(S[0].imag)) > eps:
        raise ArithmeticError(f"Weyl sum for {alg} level {level}: vacuum row not positive")
    return reps, S


def level1_S(alg: AlgebraId) -> tuple[list[Level2Rep], np.ndarray]:
    """Closed-form level-1 S matrices (D_{r,1} lattice form, B_{s,1} Ising-like)."""
    if alg.series == "D":
        w = (-1j) ** alg.rank
        S = 0.5 * np.array(
            [[1, 1, 1, 1], [1, 1, -1, -1], [1, -1, w, -w], [1, -1, -w, w]], dtype=complex
        )
        return level1_reps(alg), S
    r2 = 1 / math.sqrt(2)
    S = np.array([[0.5, 0.5, r2], [0.5, 0.5, -r2], [r2, -r2, 0]], dtype=complex)
    return level1_reps(alg), S
