"""Theory registry and validated modular data for the four families.

Families (``TheoryId.family``):

``u1``   rational circle with 2r primaries (R^2 = 2r)
``orb``  Z2 orbifold of that circle, r + 7 primaries
``D2``   SO(2r) level 2, r + 7 primaries
``B2``   SO(2s+1) level 2, s + 4 primaries

Canonical primary order (frozen; S matrices are byte-comparable):

* u1:  0, 1, ..., 2r-1
* orb: [0] [V] [S] [C] [sigma] [sigma~] [sigma'] [sigma~'] [1] ... [r-1]
* D2:  O VV SS CC S C VC VS V A(2) ... A(r-2) SC
* B2:  O VV Sp SpV A(1) ... A((L-1)/2)

The D2 and orb orders are aligned entry by entry through the coset
dictionary, so an index matrix built for one family applies to the other.
"""
from __future__ import annotations

import functools
import importlib.resources
import itertools
import json
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import lie_data
from .lie_data import AlgebraId, Level2Rep
from .numerics import (
    Tolerance,
    default_tolerance,
    frac_str,
    max_abs,
    mod1,
    permutation_from_matrix,
    phase,
    symmetry_residual,
    unitarity_residual,
)

FAMILIES = ("u1", "orb", "D2", "B2")
_FAMILY_ALIASES = {
    "u1": "u1", "U1": "u1", "circle": "u1", "CircleU1": "u1",
    "orb": "orb", "orbifold": "orb", "OrbifoldC1": "orb",
    "D2": "D2", "d2": "D2", "AffineD2": "D2",
    "B2": "B2", "b2": "B2", "AffineB2": "B2",
}

ORB_HEAD = ("[0]", "[V]", "[S]", "[C]", "[sigma]", "[sigma~]", "[sigma']", "[sigma~']")
TWIST_LABELS = ORB_HEAD[4:]


class InvariantViolation(ValueError):
    """A modular-data relation failed; carries the relation name and residual."""

    def __init__(self, relation: str, residual: float, context: str = ""):
        self.relation = relation
        self.residual = residual
        msg = f"{relation} violated (residual {residual:.3e})"
        super().__init__(f"{context}: {msg}" if context else msg)


@dataclass(frozen=True)
class TheoryId:
    family: str
    param: int

    def __post_init__(self):
        fam = _FAMILY_ALIASES.get(self.family)
        if fam is None:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        object.__setattr__(self, "family", fam)
        lo = {"u1": 1, "orb": 1, "D2": 1, "B2": 1}[fam]
        if int(self.param) != self.param or self.param < lo:
            raise ValueError(f"{fam} needs an integer parameter >= {lo}, got {self.param!r}")

    @classmethod
    def parse(cls, spec: str) -> "TheoryId":
        m = re.fullmatch(r"\s*([A-Za-z0-9]+)\s*:\s*(\d+)\s*", spec)
        if not m:
            raise ValueError(f"theory spec must look like 'family:param', got {spec!r}")
        return cls(m.group(1), int(m.group(2)))

    def __str__(self):
        return f"{self.family}:{self.param}"

    @property
    def algebra(self) -> AlgebraId:
        if self.family == "D2":
            return AlgebraId("D", self.param)
        if self.family == "B2":
            return AlgebraId("B", self.param)
        raise AttributeError(f"{self} is not an affine theory")

    @property
    def n_primaries(self) -> int:
        p = self.param
        return {"u1": 2 * p, "orb": p + 7, "D2": p + 7, "B2": p + 4}[self.family]


@dataclass(frozen=True)
class Primary:
    theory: TheoryId
    label: str

    def __str__(self):
        return self.label


def _d_labels(r: int) -> list[str]:
    head = ["O", "VV", "SS", "CC", "S", "C", "VC", "VS"]
    if r == 1:
        return head
    return head + [lie_data.ladder_rep(AlgebraId("D", r), ell).label for ell in range(1, r)]


def primary_labels(t: TheoryId) -> list[str]:
    r = t.param
    if t.family == "u1":
        return [str(j) for j in range(2 * r)]
    if t.family == "orb":
        return list(ORB_HEAD) + [f"[{ell}]" for ell in range(1, r)]
    if t.family == "D2":
        return _d_labels(r)
    return [rep.label for rep in lie_data.level2_reps(t.algebra)]


def enumerate_primaries(t: TheoryId) -> list[Primary]:
    return [Primary(t, lab) for lab in primary_labels(t)]


@dataclass(frozen=True, eq=False)
class ModularData:
    """Ordered primaries with S, T phases, conformal weights and central charge.

    ``theory`` is a :class:`TheoryId` for the registry families and a
    descriptive string for extended theories.
    """

    theory: object
    labels: tuple[str, ...]
    S: np.ndarray
    h: tuple[Fraction, ...]
    c: Fraction
    residuals: dict = field(default_factory=dict, compare=False)

    @property
    def size(self) -> int:
        return len(self.labels)

    @property
    def Tphase(self) -> np.ndarray:
        return np.array([phase(x - self.c / 24) for x in self.h])

    @property
    def T(self) -> np.ndarray:
        return np.diag(self.Tphase)

    def index(self, label) -> int:
        return self.labels.index(str(label))

    @property
    def conjugation(self) -> list[int]:
        perm, _ = permutation_from_matrix(self.S @ self.S, Tolerance(1e-6))
        return perm

    def quantum_dimensions(self) -> np.ndarray:
        return (self.S[:, 0] / self.S[0, 0]).real


def check_modular_invariants(S, h, c, tol=None, context: str = "") -> dict:
    """Verify S = S^T, S S^dag = 1, S^2 = C (involutive permutation fixing
    the vacuum), (S T)^3 = S^2 and vacuum-row positivity.

    Returns the residual of each relation; raises InvariantViolation on
    the first failure.
    """
    eps = (tol or default_tolerance()).eps
    S = np.asarray(S, dtype=complex)
    T = np.diag([phase(x - c / 24) for x in h])
    res = {}

    def need(name, value):
        res[name] = value
        if value > eps:
            raise InvariantViolation(name, value, context)

    need("S=S^T", symmetry_residual(S))
    need("SS^dag=1", unitarity_residual(S))
    S2 = S @ S
    try:
        perm, r_perm = permutation_from_matrix(S2, Tolerance(eps))
    except ValueError:
        raise InvariantViolation("S^2=C permutation", max_abs(np.abs(S2) - np.round(np.abs(S2))), context)
    res["S^2=C permutation"] = r_perm
    if perm[0] != 0 or any(perm[perm[i]] != i for i in range(len(perm))):
        raise InvariantViolation("C^2=1 fixing vacuum", 1.0, context)
    need("(ST)^3=S^2", max_abs(np.linalg.matrix_power(S @ T, 3) - S2))
    row0 = S[0]
    vac = max(float(np.max(np.abs(row0.imag))), float(max(0.0, -np.min(row0.real))))
    if np.any(row0.real <= eps):
        raise InvariantViolation("vacuum row positive", float(-np.min(row0.real)), context)
    res["vacuum row positive"] = vac
    need("vacuum row real", float(np.max(np.abs(row0.imag))))
    return res


# --- closed forms -----------------------------------------------------------


def circle_S(r: int) -> np.ndarray:
    j = np.arange(2 * r)
    return np.exp(-1j * np.pi * np.outer(j, j) / r) / math.sqrt(2 * r)


def circle_weights(r: int) -> list[Fraction]:
    return [Fraction(min(j, 2 * r - j) ** 2, 4 * r) for j in range(2 * r)]


def orbifold_S(r: int) -> np.ndarray:
    """Closed-form S of the Z2 orbifold at R^2 = 2r in canonical order."""
    n = r + 7
    e = 1 / math.sqrt(8 * r)
    f = 1 / (2 * math.sqrt(2))
    w = (-1j) ** r  # i^{-r}
    S = np.zeros((n, n), dtype=complex)
    sgn_r = (-1) ** r
    S[0:2, 0:4] = e
    S[2:4, 0:2] = e
    S[2:4, 2:4] = sgn_r * e
    ells = np.arange(1, r)
    lad = slice(8, n)
    S[0:2, lad] = 2 * e
    S[2:4, lad] = 2 * e * (-1.0) ** ells
    S[lad, lad] = 4 * e * np.cos(np.pi * np.outer(ells, ells) / r)
    chi = np.array([1, -1, 1, -1])  # sigma, sigma~, sigma', sigma~'
    eps_t = np.array([1, 1, -1, -1])
    S[0, 4:8] = f
    S[1, 4:8] = -f
    S[2, 4:8] = w * chi * f
    S[3, 4:8] = -w * chi * f
    S[4:8, 4:8] = 0.25 * np.outer(eps_t, eps_t) * (1 + np.outer(chi, chi) * w)
    S[4:8, 0:4] = S[0:4, 4:8].T
    S[lad, 0:4] = S[0:4, lad].T
    return S


def orbifold_weights(r: int) -> list[Fraction]:
    F = Fraction
    head = [F(0), F(1), F(r, 4), F(r, 4), F(1, 16), F(1, 16), F(9, 16), F(9, 16)]
    return head + [F(ell * ell, 4 * r) for ell in range(1, r)]


def b_series_S(s: int) -> np.ndarray:
    """The level-2 B_s matrix in canonical order (O, VV, Sp, SpV, A(1..))."""
    L = 2 * s + 1
    a = 1 / (2 * math.sqrt(L))
    k = (L - 1) // 2
    n = k + 4
    S = np.zeros((n, n), dtype=complex)
    S[0:2, 0:2] = a
    S[0, 2] = S[0, 3] = 0.5
    S[1, 2] = S[1, 3] = -0.5
    S[2, 2] = S[3, 3] = 0.5
    S[2, 3] = -0.5
    ells = np.arange(1, k + 1)
    S[0:2, 4:] = 2 * a
    S[4:, 4:] = 4 * a * np.cos(2 * np.pi * np.outer(ells, ells) / L)
    lower = np.tril_indices(n, -1)
    S[lower] = S.T[lower]
    return S


# --- D2 from the orbifold through the coset ---------------------------------


def coset_partner(r: int) -> list[str]:
    """Level-1 label b with (0, b; lambda) in the D dictionary, per canonical index."""
    odd = r % 2 == 1
    head = ["0", "0", "v" if odd else "0", "v" if odd else "0",
            "c" if odd else "s", "s" if odd else "c", "c" if odd else "s", "s" if odd else "c"]
    return head + ["0" if ell % 2 == 0 else "v" for ell in range(1, r)]


def _pattern_path():
    return importlib.resources.files("modinv") / "data" / "d2_phase_pattern.json"


@functools.lru_cache(maxsize=None)
def load_phase_pattern() -> dict:
    with _pattern_path().open() as fh:
        raw = json.load(fh)
    out = {}
    for res, table in raw["pattern"].items():
        out[int(res)] = {tuple(k.split(",")): complex(*v) for k, v in table.items()}
    return out


def fit_phase_pattern(ranks=range(2, lie_data.KP_MAX_RANK + 1), tol=None) -> dict:
    """Fit S_D2 / conj(S_orb) per coset-partner class pair against Kac-Peterson.

    Returns ``{r mod 4: {(b_row, b_col): phase}}`` with phases snapped to
    eighth roots of unity.  Raises if a class pair is not constant or two
    ranks with the same residue disagree.
    """
    eps = (tol or default_tolerance()).eps
    fitted: dict[int, dict] = {}
    for r in ranks:
        _, kp = lie_data.kac_peterson_S(AlgebraId("D", r))
        orb = orbifold_S(r)
        part = coset_partner(r)
        table: dict = {}
        for x, y in itertools.product(range(r + 7), repeat=2):
            if abs(orb[x, y]) < 1e-6:
                if abs(kp[x, y]) > eps:
                    raise ArithmeticError(f"D{r}: zero pattern mismatch at ({x},{y})")
                continue
            ratio = kp[x, y] / np.conj(orb[x, y])
            k = round(float(np.angle(ratio)) / (np.pi / 4)) % 8
            snapped = complex(np.exp(1j * np.pi * k / 4))
            if abs(ratio - snapped) > 1e-6:
                raise ArithmeticError(f"D{r}: ratio {ratio} at ({x},{y}) is not an eighth root")
            key = (part[x], part[y])
            if key in table and abs(table[key] - snapped) > 1e-9:
                raise ArithmeticError(f"D{r}: class pair {key} is not constant")
            table[key] = snapped
        prev = fitted.setdefault(r % 4, {})
        for key, v in table.items():
            if key in prev and abs(prev[key] - v) > 1e-9:
                raise ArithmeticError(f"D{r}: disagrees with earlier rank of residue {r % 4}")
            prev[key] = v
    return fitted


def write_phase_pattern(path=None) -> dict:
    fitted = fit_phase_pattern()
    doc = {
        "description": "S(D_{r,2}) = conj(S(orbifold r)) * pattern[r mod 4][b_row, b_col]; "
                       "b = level-1 coset partner label; fitted against the Weyl sum",
        "ranks": list(range(2, lie_data.KP_MAX_RANK + 1)),
        "pattern": {
            str(res): {f"{a},{b}": [round(v.real, 12) + 0.0, round(v.imag, 12) + 0.0]
                       for (a, b), v in sorted(tab.items())}
            for res, tab in sorted(fitted.items())
        },
    }
    target = path or _pattern_path()
    with open(target, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")
    load_phase_pattern.cache_clear()
    return doc


def d2_from_orbifold(r: int) -> np.ndarray:
    """S(D_{r,2}) via conj(S_orb) and the stored class-pair phase pattern."""
    pattern = load_phase_pattern()[r % 4]
    part = coset_partner(r)
    orb = orbifold_S(r)
    P = np.array([[pattern.get((a, b), 0j) for b in part] for a in part])
    missing = (np.abs(orb) > 1e-12) & (P == 0)
    if missing.any():
        raise ArithmeticError(f"phase pattern lacks an entry needed at rank {r}")
    return np.conj(orb) * P


def d2_weights(r: int) -> list[Fraction]:
    if r == 1:
        F = Fraction
        return [F(0), F(1), F(1, 4), F(1, 4), F(1, 16), F(1, 16), F(9, 16), F(9, 16)]
    alg = AlgebraId("D", r)
    return [lie_data.conformal_weight(alg, lab) for lab in _d_labels(r)]


# --- registry ---------------------------------------------------------------


@functools.lru_cache(maxsize=256)
def _modular_data_cached(t: TheoryId, eps: float) -> ModularData:
    r = t.param
    F = Fraction
    if t.family == "u1":
        S, h, c = circle_S(r), circle_weights(r), F(1)
    elif t.family == "orb":
        S, h, c = orbifold_S(r), orbifold_weights(r), F(1)
    elif t.family == "B2":
        S, h = b_series_S(r), [lie_data.conformal_weight(t.algebra, rep) for rep in lie_data.level2_reps(t.algebra)]
        c = lie_data.central_charge(t.algebra)
    else:
        if 2 <= r <= lie_data.KP_MAX_RANK:
            _, S = lie_data.kac_peterson_S(AlgebraId("D", r))
        else:
            S = d2_from_orbifold(r)
        h = d2_weights(r)
        c = F(2 * r - 1)
    S = np.array(S, dtype=complex)
    res = check_modular_invariants(S, h, c, Tolerance(eps), context=str(t))
    S.setflags(write=False)
    return ModularData(t, tuple(primary_labels(t)), S, tuple(h), c, res)


def modular_data(t, tol=None) -> ModularData:
    """Validated modular data; raises InvariantViolation naming the failed relation.

    ``D2:1`` is accepted as the formal r=1 member of the D series obtained
    from the r=1 orbifold through the coset phases; it has no Lie algebra.
    """
    if isinstance(t, str):
        t = TheoryId.parse(t)
    eps = (tol or default_tolerance()).eps
    return _modular_data_cached(t, eps)


def modular_data_to_json(md: ModularData) -> dict:
    return {
        "theory": str(md.theory),
        "labels": list(md.labels),
        "c": frac_str(md.c),
        "h": [frac_str(x) for x in md.h],
        "S": [[[float(z.real), float(z.imag)] for z in row] for row in md.S],
        "T": [[float(z.real), float(z.imag)] for z in md.Tphase],
    }


def modular_data_from_json(doc: dict, tol=None) -> ModularData:
    S = np.array([[complex(a, b) for a, b in row] for row in doc["S"]])
    h = [Fraction(x) for x in doc["h"]]
    c = Fraction(doc["c"])
    res = check_modular_invariants(S, h, c, tol, context=doc["theory"])
    theory = doc["theory"]
    try:
        theory = TheoryId.parse(theory)
    except ValueError:
        pass
    return ModularData(theory, tuple(doc["labels"]), S, tuple(h), c, res)


# --- coset dictionaries -----------------------------------------------------


@dataclass(frozen=True)
class CosetField:
    algebra: AlgebraId
    left1: str
    left2: str
    bottom: Level2Rep
    copy: int = 0  # 1 or 2 for the resolved fixed point (s,s;l)_1/2

    def __str__(self):
        sub = f"_{self.copy}" if self.copy else ""
        return f"({self.left1},{self.left2};{self.bottom.label}){sub}"


def coset_dictionary(t: TheoryId) -> dict[str, list[tuple[CosetField, Primary]]]:
    """Coset <-> orbifold tables for every realisation available at this r.

    ``"D"``: SO(2r)_1^2 / SO(2r)_2, for r >= 2.
    ``"B"``: SO(L)_1^2 / SO(L)_2, when r = 2L with L odd >= 3.
    """
    if isinstance(t, str):
        t = TheoryId.parse(t)
    if t.family != "orb":
        raise ValueError("coset dictionaries are defined for orbifold theories")
    r = t.param
    out = {}
    labels = primary_labels(t)
    if r >= 2:
        alg = AlgebraId("D", r)
        part = coset_partner(r)
        reps = [lie_data.parse_rep(alg, lab) for lab in _d_labels(r)]
        out["D"] = [
            (CosetField(alg, "0", b, rep), Primary(t, lab))
            for b, rep, lab in zip(part, reps, labels)
        ]
    if r % 2 == 0 and (r // 2) % 2 == 1 and r // 2 >= 3:
        L = r // 2
        alg = AlgebraId("B", (L - 1) // 2)

        def P(lab):
            return Primary(t, lab)

        def rep(name, ell=0):
            return Level2Rep(name, ell)

        rows = [
            (CosetField(alg, "0", "0", rep("O")), P("[0]")),
            (CosetField(alg, "0", "0", rep("VV")), P("[V]")),
            (CosetField(alg, "0", "v", rep("O")), P("[S]")),
            (CosetField(alg, "v", "0", rep("O")), P("[C]")),
            (CosetField(alg, "0", "s", rep("Sp")), P("[sigma]")),
            (CosetField(alg, "s", "0", rep("Sp")), P("[sigma~]")),
            (CosetField(alg, "0", "s", rep("SpV")), P("[sigma']")),
            (CosetField(alg, "s", "0", rep("SpV")), P("[sigma~']")),
            (CosetField(alg, "s", "s", rep("O")), P(f"[{L}]")),
        ]
        for ell in range(1, (L - 1) // 2 + 1):
            even = ell % 2 == 0
            rows.append((CosetField(alg, "0", "0", rep("A", ell)), P(f"[{2 * ell if even else 2 * L - 2 * ell}]")))
            rows.append((CosetField(alg, "0", "v", rep("A", ell)), P(f"[{2 * L - 2 * ell if even else 2 * ell}]")))
            rows.append((CosetField(alg, "s", "s", rep("A", ell), 1), P(f"[{L - 2 * ell}]")))
            rows.append((CosetField(alg, "s", "s", rep("A", ell), 2), P(f"[{L + 2 * ell}]")))
        out["B"] = rows
    return out


def level1_weight(alg: AlgebraId, label: str) -> Fraction:
    if label == "0":
        return Fraction(0)
    if label == "v":
        return Fraction(1, 2)
    if alg.series == "D":
        return Fraction(alg.rank, 8)
    return Fraction(alg.L, 16)


@dataclass
class DictionaryReport:
    theory: TheoryId
    rows: list = field(default_factory=list)  # (realisation, coset field, primary, residue)

    @property
    def passed(self) -> bool:
        return all(res == 0 for *_, res in self.rows)

    def failures(self):
        return [row for row in self.rows if row[-1] != 0]


def dictionary_weight_check(t, strict: bool = True) -> DictionaryReport:
    """h(left1) + h(left2) - h(bottom) == h(orbifold primary) mod 1, exactly."""
    if isinstance(t, str):
        t = TheoryId.parse(t)
    h_orb = dict(zip(primary_labels(t), orbifold_weights(t.param)))
    report = DictionaryReport(t)
    for real, rows in coset_dictionary(t).items():
        seen = [p.label for _, p in rows]
        if sorted(seen) != sorted(h_orb):
            raise ValueError(f"{real}-realisation of {t} does not list every primary exactly once")
        for cf, prim in rows:
            lhs = level1_weight(cf.algebra, cf.left1) + level1_weight(cf.algebra, cf.left2)
            lhs -= lie_data.conformal_weight(cf.algebra, cf.bottom)
            report.rows.append((real, cf, prim, mod1(lhs - h_orb[prim.label])))
    if strict and not report.passed:
        bad = ", ".join(f"{cf}->{p} (residue {res})" for _, cf, p, res in report.failures())
        raise ValueError(f"dictionary weight congruence fails for {t}: {bad}")
    return report


# --- constraint solver for the twisted block --------------------------------


def solve_twisted_block(r: int, tol=None) -> list[np.ndarray]:
    """Search the finite pattern space for the twisted-sector part of S_orb.

    Fixed input: the rows/columns of [0], [V] and [l] (including their
    +-1/(2 sqrt 2) and 0 entries against twist fields).  Unknowns: the
    [S]/[C] self block (phases in {+-1, +-i}/sqrt(8r)), the [S]/[C] versus
    twist entries ({+-1, +-i}/(2 sqrt 2)) and the 4x4 twist block with
    entries in {0, +-1/2, +-i/2, (+-1 +- i)/4}.  Candidates are pruned by
    row orthonormality and kept only if they pass every modular-data
    relation and Verlinde integrality.
    """
    eps = (tol or default_tolerance()).eps
    base = orbifold_S(r)
    n = r + 7
    h = orbifold_weights(r)
    known = [0, 1] + list(range(8, n))
    e = 1 / math.sqrt(8 * r)
    f = 1 / (2 * math.sqrt(2))
    units = np.array([1, -1, 1j, -1j])
    tw_vals = np.array([0, 0.5, -0.5, 0.5j, -0.5j, (1 + 1j) / 4, (1 - 1j) / 4, (-1 + 1j) / 4, (-1 - 1j) / 4])

    def grid(choices_per_slot):
        return np.array(list(itertools.product(*choices_per_slot)), dtype=complex)

    fixed0 = np.array([base[i] for i in known])
    solutions = []
    # row [S]: columns [S], [C], then the four twist fields
    cand = np.tile(base[2], (4 ** 6, 1))
    cand[:, [2, 3, 4, 5, 6, 7]] = grid([units * e, units * e] + [units * f] * 4)
    rows_S = cand[_orthonormal_mask(cand, fixed0)]
    for rowS in rows_S:
        cand = np.tile(base[3], (4 ** 5, 1))
        cand[:, 2] = rowS[3]
        cand[:, [3, 4, 5, 6, 7]] = grid([units * e] + [units * f] * 4)
        fixed1 = np.vstack([fixed0, rowS])
        for rowC in cand[_orthonormal_mask(cand, fixed1)]:
            solutions.extend(_fill_twist_rows(base, rowS, rowC, np.vstack([fixed1, rowC]), tw_vals))
    good = []
    for S in solutions:
        try:
            check_modular_invariants(S, h, Fraction(1), Tolerance(eps))
        except InvariantViolation:
            continue
        if _verlinde_integral(S, eps):
            good.append(S)
    return good


def _orthonormal_mask(cand, fixed):
    norm_ok = np.abs(np.einsum("ij,ij->i", cand, cand.conj()) - 1) < 1e-9
    orth_ok = np.all(np.abs(cand @ fixed.conj().T) < 1e-9, axis=1)
    return norm_ok & orth_ok


def _fill_twist_rows(base, rowS, rowC, fixed, tw_vals):
    out = []

    def rec(k, rows, fixed_rows):
        if k == 4:
            S = base.copy()
            for i, row in zip((2, 3, 4, 5, 6, 7), [rowS, rowC] + rows):
                S[i] = row
                S[:, i] = row
            out.append(S)
            return
        t = 4 + k
        row = base[t].copy()
        row[2], row[3] = rowS[t], rowC[t]
        for i, prev in enumerate(rows):
            row[4 + i] = prev[t]
        free = list(range(t, 8))
        cand = np.tile(row, (len(tw_vals) ** len(free), 1))
        cand[:, free] = np.array(list(itertools.product(tw_vals, repeat=len(free))))
        for c in cand[_orthonormal_mask(cand, fixed_rows)]:
            rec(k + 1, rows + [c], np.vstack([fixed_rows, c]))

    rec(0, [], fixed)
    return out


def _verlinde_integral(S, eps) -> bool:
    N = np.einsum("am,bm,cm,m->abc", S, S, S.conj(), 1 / S[0], optimize=True)
    R = np.round(N.real)
    return max_abs(N - R) <= max(eps, 1e-8) and R.min() >= 0


def twist_relabelings():
    """Label permutations of the orbifold head that preserve all weights."""
    swaps = [(2, 3), (4, 5), (6, 7)]
    for mask in itertools.product((0, 1), repeat=3):
        perm = list(range(8))
        for on, (a, b) in zip(mask, swaps):
            if on:
                perm[a], perm[b] = perm[b], perm[a]
        yield perm


def same_up_to_relabeling(S1, S2, tol=1e-9) -> bool:
    n = S1.shape[0]
    for head in twist_relabelings():
        perm = head + list(range(8, n))
        if max_abs(S1[np.ix_(perm, perm)] - S2) <= tol:
            return True
    return False
