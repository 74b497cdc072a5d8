"""Exact truncated q-series, c=1 characters and partition-function spectra.

No floating point is used here: exponents and coefficients are
``Fraction``/``int`` throughout, and spectra compare as exact multisets.
"""
from __future__ import annotations

import csv
import io
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .numerics import frac_str
from .spectra import ModularData, TheoryId, primary_labels

F = Fraction


def _fgcd(a: Fraction, b: Fraction) -> Fraction:
    a, b = F(a), F(b)
    return F(math.gcd(a.numerator * b.denominator, b.numerator * a.denominator), a.denominator * b.denominator)


@dataclass(frozen=True)
class QSeries:
    """sum_n coeffs[n] q^(leading + n*step), exact for exponents < horizon."""

    leading: Fraction
    step: Fraction
    coeffs: tuple
    horizon: Fraction

    def __post_init__(self):
        object.__setattr__(self, "leading", F(self.leading))
        object.__setattr__(self, "step", F(self.step))
        object.__setattr__(self, "horizon", F(self.horizon))
        if self.step <= 0:
            raise ValueError("step must be positive")
        keep = max(0, math.ceil((self.horizon - self.leading) / self.step))
        object.__setattr__(self, "coeffs", tuple(_intify(self.coeffs[:keep])))

    @property
    def order(self) -> Fraction:
        return self.horizon - self.leading

    def exponent(self, n: int) -> Fraction:
        return self.leading + n * self.step

    def terms(self):
        for n, c in enumerate(self.coeffs):
            if c:
                yield self.exponent(n), c

    def coefficient(self, exponent) -> Fraction:
        k = (F(exponent) - self.leading) / self.step
        if exponent >= self.horizon:
            raise ValueError(f"q^{exponent} lies beyond the truncation horizon {self.horizon}")
        if k.denominator != 1 or k < 0 or k >= len(self.coeffs):
            return 0
        return self.coeffs[int(k)]

    def normalized(self) -> "QSeries":
        """Drop leading zero coefficients so ``leading`` is the true leading exponent."""
        for n, c in enumerate(self.coeffs):
            if c:
                return QSeries(self.exponent(n), self.step, self.coeffs[n:], self.horizon)
        return QSeries(self.horizon, self.step, (), self.horizon)

    def refined(self, step) -> "QSeries":
        step = F(step)
        k = self.step / step
        if k.denominator != 1:
            raise ValueError(f"cannot refine step {self.step} to {step}")
        k = int(k)
        out = [0] * (len(self.coeffs) * k)
        out[::k] = self.coeffs
        return QSeries(self.leading, step, out, self.horizon)

    def shifted(self, delta) -> "QSeries":
        return QSeries(self.leading + delta, self.step, self.coeffs, self.horizon + delta)

    def _common(self, other, aligned=True):
        step = _fgcd(self.step, other.step)
        if aligned and ((self.leading - other.leading) / step).denominator != 1:
            raise ValueError("series live on incommensurate exponent lattices")
        return self.refined(step), other.refined(step), step

    def __add__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        a, b, step = self._common(other)
        lead = min(a.leading, b.leading)
        hor = min(a.horizon, b.horizon)
        n = max(0, math.ceil((hor - lead) / step))
        out = [0] * n
        for s in (a, b):
            off = int((s.leading - lead) / step)
            for i, c in enumerate(s.coeffs):
                if off + i < n:
                    out[off + i] += c
        return QSeries(lead, step, out, hor)

    def __neg__(self):
        return QSeries(self.leading, self.step, [-c for c in self.coeffs], self.horizon)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, k) -> "QSeries":
        return QSeries(self.leading, self.step, [k * c for c in self.coeffs], self.horizon)

    def __mul__(self, other):
        if not isinstance(other, QSeries):
            return self.scale(other)
        a, b, step = self._common(other, aligned=False)
        lead = a.leading + b.leading
        hor = min(a.horizon + b.leading, b.horizon + a.leading)
        n = max(0, math.ceil((hor - lead) / step))
        out = [0] * n
        for i, x in enumerate(a.coeffs[:n]):
            if x:
                for j, y in enumerate(b.coeffs[: n - i]):
                    out[i + j] += x * y
        return QSeries(lead, step, out, hor)

    __rmul__ = scale

    def inverse(self) -> "QSeries":
        a = self.normalized()
        if not a.coeffs:
            raise ZeroDivisionError("inverse of a series with no known non-zero term")
        n = len(a.coeffs)
        a0 = F(a.coeffs[0])
        out = [F(0)] * n
        out[0] = 1 / a0
        for k in range(1, n):
            s = sum((a.coeffs[i] * out[k - i] for i in range(1, k + 1)), F(0))
            out[k] = -s / a0
        return QSeries(-a.leading, a.step, _intify(out), -a.leading + a.order)

    def sqrt(self) -> "QSeries":
        """Square root by Newton iteration; branch with positive leading coefficient."""
        a = self.normalized()
        if not a.coeffs:
            raise ValueError("square root of an empty series")
        a0 = F(a.coeffs[0])
        r0 = _rational_sqrt(a0)
        # work with the unit series u = a / (a0 q^lead), so sqrt(a) = r0 q^(lead/2) sqrt(u)
        u = QSeries(0, a.step, [F(c) / a0 for c in a.coeffs], a.order)
        n = len(u.coeffs)
        y = QSeries(0, a.step, [F(1)], a.order)
        prec = 1
        while True:
            prec = min(2 * prec, n)
            ut = QSeries(0, a.step, u.coeffs[:prec], a.step * prec)
            yt = QSeries(0, a.step, y.coeffs[:prec] + (F(0),) * max(0, prec - len(y.coeffs)), a.step * prec)
            y = (yt + ut * yt.inverse()).scale(F(1, 2))
            if prec >= n:
                break
        out = [r0 * c for c in y.coeffs]
        return QSeries(a.leading / 2, a.step, _intify(out), a.leading / 2 + a.order)

    def is_integral(self) -> bool:
        return all(F(c).denominator == 1 for c in self.coeffs)

    def is_nonnegative(self) -> bool:
        return all(c >= 0 for c in self.coeffs)


def _intify(vals):
    return [int(v) if F(v).denominator == 1 else F(v) for v in vals]


def _rational_sqrt(x: Fraction) -> Fraction:
    x = F(x)
    if x <= 0:
        raise ValueError("leading coefficient must be positive to fix the square-root branch")
    n, d = math.isqrt(x.numerator), math.isqrt(x.denominator)
    if n * n != x.numerator or d * d != x.denominator:
        raise ValueError(f"leading coefficient {x} is not a rational square")
    return F(n, d)


# --- eta and theta ----------------------------------------------------------


def _product_series(factors, step, order) -> QSeries:
    """prod over (power, sign, exponent) of (1 + sign q^power)^exponent, leading q^0."""
    step = F(step)
    n = math.ceil(F(order) / step)
    out = [0] * n
    out[0] = 1
    for power, sign, expo in factors:
        k = int(F(power) / step)
        if k >= n or k <= 0:
            continue
        for _ in range(abs(expo)):
            if expo > 0:
                for i in range(n - 1, k - 1, -1):
                    out[i] += sign * out[i - k]
            else:
                for i in range(k, n):
                    out[i] -= sign * out[i - k]
    return QSeries(0, step, out, F(order))


def _powers(order, start=1, shift=F(0)):
    n = start
    while n + shift < order:
        yield n + shift
        n += 1


def eta(order) -> QSeries:
    """q^(1/24) prod (1 - q^n)."""
    order = F(order)
    base = _product_series([(n, -1, 1) for n in _powers(order)], 1, order)
    return base.shifted(F(1, 24))


def theta(k: int, order) -> QSeries:
    """Jacobi theta functions in the normalisation theta_3 = sum q^(n^2/2)."""
    order = F(order)
    half = F(1, 2)
    if k == 2:
        f = [(n, -1, 1) for n in _powers(order)] + [(n, 1, 2) for n in _powers(order)]
        return _product_series(f, 1, order).scale(2).shifted(F(1, 8))
    if k in (3, 4):
        sign = 1 if k == 3 else -1
        f = [(n, -1, 1) for n in _powers(order)] + [(p, sign, 2) for p in _powers(order, 1, -half)]
        return _product_series(f, half, order)
    raise ValueError("theta index must be 2, 3 or 4")


def theta_sum(k: int, order) -> QSeries:
    """Sum form of theta_k, independent of the product form."""
    order = F(order)
    half = F(1, 2)
    if k == 2:
        lead = F(1, 8)
        coeffs = Counter()
        n = 0
        while (F(2 * n + 1, 2) ** 2) / 2 - lead < order:
            coeffs[(F(2 * n + 1, 2) ** 2 / 2 - lead)] += 2
            n += 1
        step = F(1)
    else:
        lead = F(0)
        coeffs = Counter()
        n = 0
        while F(n * n, 2) < order:
            coeffs[F(n * n, 2)] += (1 if n == 0 else 2) * ((-1) ** n if k == 4 else 1)
            n += 1
        step = half
    size = math.ceil(order / step)
    out = [0] * size
    for e, c in coeffs.items():
        out[int(e / step)] += c
    return QSeries(lead, step, out, lead + order)


# --- characters -------------------------------------------------------------


def _lattice_sum(r: int, j: int, order) -> QSeries:
    """sum_n q^((j + 2 r n)^2 / 4r), with leading exponent min over n."""
    order = F(order)
    vals = Counter()
    lead = F(min(j % (2 * r), 2 * r - j % (2 * r)) ** 2, 4 * r)
    n = 0
    while True:
        added = False
        for m in {n, -n}:
            e = F((j + 2 * r * m) ** 2, 4 * r)
            if e - lead < order:
                vals[e - lead] += 1
                added = True
        if not added and n > 0:
            break
        n += 1
    size = math.ceil(order)
    out = [0] * size
    for e, c in vals.items():
        out[int(e)] += c
    return QSeries(lead, 1, out, lead + order)


def circle_character(r: int, j: int, order) -> QSeries:
    if not 0 <= j < 2 * r:
        raise ValueError(f"circle label {j} out of range for r={r}")
    return (_lattice_sum(r, j, order) * eta(order).inverse()).normalized()


def orbifold_character(r: int, label: str, order) -> QSeries:
    order = F(order)
    half = F(1, 2)
    if label.startswith("[") and label[1:-1].isdigit() and label != "[0]":
        ell = int(label[1:-1])
        if not 1 <= ell <= r - 1:
            raise ValueError(f"{label} out of range for r={r}")
        return circle_character(r, ell, order)
    et = eta(order + 1)
    if label in ("[0]", "[V]"):
        lam0 = circle_character(r, 0, order)
        tw = (et * theta(2, order + 1).inverse()).scale(2).sqrt()
        out = lam0 + tw if label == "[0]" else lam0 - tw
        return out.scale(half).normalized()
    if label in ("[S]", "[C]"):
        return circle_character(r, r, order).scale(half).normalized()
    if label in ("[sigma]", "[sigma~]", "[sigma']", "[sigma~']"):
        a = (et * theta(4, order + 1).inverse()).sqrt()
        b = (et * theta(3, order + 1).inverse()).sqrt()
        out = a + b if "'" not in label else a - b
        return QSeries(out.leading, out.step, out.coeffs, min(out.horizon, out.leading + order)).scale(half).normalized()
    raise ValueError(f"unknown orbifold label {label!r}")


def characters(t, order) -> list[QSeries]:
    if isinstance(t, ModularData):
        t = t.theory
    if isinstance(t, str):
        t = TheoryId.parse(t)
    if not isinstance(t, TheoryId) or t.family not in ("u1", "orb"):
        raise ValueError(f"no character support for {t}; only u1 and orb theories")
    if t.family == "u1":
        return [circle_character(t.param, j, order) for j in range(2 * t.param)]
    return [orbifold_character(t.param, lab, order) for lab in primary_labels(t)]


# --- spectra ----------------------------------------------------------------


@dataclass
class ZSpectrum:
    """Multiset of (h_L, h_R) with h_L + h_R <= cutoff."""

    counts: dict
    cutoff: Fraction

    def __post_init__(self):
        self.cutoff = F(self.cutoff)
        clean = {}
        for (a, b), m in self.counts.items():
            if F(a) + F(b) > self.cutoff:
                continue
            if F(m).denominator != 1:
                raise ValueError(f"non-integral multiplicity {m} at ({a}, {b})")
            if m < 0:
                raise ValueError(f"negative multiplicity {m} at ({a}, {b})")
            if m:
                clean[(F(a), F(b))] = int(m)
        self.counts = clean

    def __eq__(self, other):
        return isinstance(other, ZSpectrum) and self.counts == other.counts and self.cutoff == other.cutoff

    def rows(self):
        return sorted((a, b, m) for (a, b), m in self.counts.items())

    def total(self) -> int:
        return sum(self.counts.values())

    def is_physical(self) -> bool:
        return all((a - b).denominator == 1 for a, b in self.counts)

    def difference(self, other) -> dict:
        keys = set(self.counts) | set(other.counts)
        return {k: self.counts.get(k, 0) - other.counts.get(k, 0) for k in sorted(keys)
                if self.counts.get(k, 0) != other.counts.get(k, 0)}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["h_L", "h_R", "multiplicity"])
        for a, b, m in self.rows():
            w.writerow([frac_str(a), frac_str(b), m])
        return buf.getvalue()


def z_from_mipf(md: ModularData, M, cutoff=6) -> ZSpectrum:
    """Expand sum_ij M_ij chi_i chibar_j and collect (h_L, h_R) multiplicities."""
    M = np.asarray(getattr(M, "M", M))
    cutoff = F(cutoff)
    chis = characters(md, cutoff + 1)
    shift = md.c / 24
    counts = Counter()
    for i, j in zip(*np.nonzero(M)):
        mij = int(M[i, j])
        left = [(e + shift, c) for e, c in chis[i].terms() if e + shift <= cutoff]
        right = [(e + shift, c) for e, c in chis[j].terms() if e + shift <= cutoff]
        for hl, cl in left:
            for hr, cr in right:
                if hl + hr <= cutoff:
                    counts[(hl, hr)] += mij * cl * cr
    return ZSpectrum(dict(counts), cutoff)


def _partitions(n: int) -> list[int]:
    p = [1] + [0] * n
    for k in range(1, n + 1):
        for i in range(k, n + 1):
            p[i] += p[i - k]
    return p


def _lattice_points(p: int, q: int, cutoff):
    """(h_L, h_R) for momentum m, winding w at R^2 = 2p/q."""
    cutoff = F(cutoff)
    mmax = math.isqrt(int(2 * p * cutoff / q)) + 1
    wmax = math.isqrt(int(2 * q * cutoff / p)) + 1
    for m in range(-mmax, mmax + 1):
        for w in range(-wmax, wmax + 1):
            hl = F(m * m * q, 4 * p) + F(m * w, 2) + F(w * w * p, 4 * q)
            hr = hl - m * w
            if hl + hr <= cutoff:
                yield m, w, hl, hr


def _with_oscillators(base: Counter, cutoff, left, right) -> Counter:
    out = Counter()
    for (hl, hr), mult in base.items():
        for nl, a in enumerate(left):
            if hl + nl + hr > cutoff:
                break
            for nr, b in enumerate(right):
                if hl + nl + hr + nr > cutoff:
                    break
                out[(hl + nl, hr + nr)] += mult * a * b
    return out


def geometric_circle_spectrum(p: int, q: int, cutoff=6) -> ZSpectrum:
    """Compact boson at R^2 = 2p/q from the momentum/winding lattice."""
    if math.gcd(p, q) != 1:
        raise ValueError(f"gcd({p}, {q}) != 1")
    cutoff = F(cutoff)
    lattice = Counter((hl, hr) for _, _, hl, hr in _lattice_points(p, q, cutoff))
    osc = _partitions(int(cutoff) + 1)
    return ZSpectrum(dict(_with_oscillators(lattice, cutoff, osc, osc)), cutoff)


def _signed_partitions(n: int) -> list[int]:
    """Coefficients of prod 1/(1 + q^k)."""
    out = [1] + [0] * n
    for k in range(1, n + 1):
        for i in range(k, n + 1):
            out[i] -= out[i - k]
    return out


def _half_partitions(n_half: int) -> list[int]:
    """Coefficients (in powers of q^(1/2)) of prod_{k>=1} 1/(1 - q^(k - 1/2))."""
    out = [1] + [0] * n_half
    for k in range(1, n_half + 1, 2):
        for i in range(k, n_half + 1):
            out[i] += out[i - k]
    return out


def geometric_orbifold_spectrum(p: int, q: int, cutoff=6) -> ZSpectrum:
    """Z2 orbifold of the R^2 = 2p/q boson: projected untwisted sector plus
    the two fixed-point twisted sectors."""
    if math.gcd(p, q) != 1:
        raise ValueError(f"gcd({p}, {q}) != 1")
    cutoff = F(cutoff)
    top = int(cutoff) + 1
    lattice = Counter((hl, hr) for _, _, hl, hr in _lattice_points(p, q, cutoff))
    osc = _partitions(top)
    total = Counter()
    for k, v in _with_oscillators(lattice, cutoff, osc, osc).items():
        total[k] += F(v, 2)
    signed = _signed_partitions(top)
    for k, v in _with_oscillators(Counter({(F(0), F(0)): 1}), cutoff, signed, signed).items():
        total[k] += F(v, 2)
    alpha = _half_partitions(2 * top)
    h0 = F(1, 16)
    for a, ca in enumerate(alpha):
        for b, cb in enumerate(alpha):
            hl, hr = h0 + F(a, 2), h0 + F(b, 2)
            if hl + hr > cutoff:
                break
            if (a + b) % 2 == 0:
                total[(hl, hr)] += 2 * ca * cb
    return ZSpectrum(dict(total), cutoff)
