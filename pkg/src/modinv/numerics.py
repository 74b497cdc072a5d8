"""Dense complex matrices, exact rationals and the shared tolerance policy.

Every numerical verification in the package goes through this module so
that a single ``eps`` governs pass/fail decisions.  Residuals are always
max-abs-entry norms.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

Rational = Fraction

DEFAULT_EPS = 1e-9


@dataclass(frozen=True)
class Tolerance:
    eps: float = DEFAULT_EPS

    def __post_init__(self):
        if not (0.0 < self.eps < 1e-3):
            raise ValueError(f"tolerance must satisfy 0 < eps < 1e-3, got {self.eps!r}")


def default_tolerance() -> Tolerance:
    """Tolerance from ``MIPF_TOL`` if set, otherwise the package default."""
    raw = os.environ.get("MIPF_TOL")
    if raw:
        return Tolerance(float(raw))
    return Tolerance()


def _tol(tol) -> Tolerance:
    if tol is None:
        return default_tolerance()
    if isinstance(tol, Tolerance):
        return tol
    return Tolerance(float(tol))


def as_cmatrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or 0 in m.shape:
        raise ValueError(f"expected a non-empty 2-d matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def max_abs(a) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def mat_mul(a, b) -> np.ndarray:
    a, b = as_cmatrix(a), as_cmatrix(b)
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"dimension mismatch: {a.shape} x {b.shape}")
    return a @ b


def approx_eq(a, b, tol=None) -> tuple[bool, float]:
    """Entrywise comparison; returns ``(equal, max_abs_deviation)``."""
    a, b = as_cmatrix(a), as_cmatrix(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    dev = max_abs(a - b)
    return dev <= _tol(tol).eps, dev


def _square(a) -> np.ndarray:
    a = as_cmatrix(a)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix is not square: {a.shape}")
    return a


def unitarity_residual(a) -> float:
    a = _square(a)
    return max_abs(a @ a.conj().T - np.eye(a.shape[0]))


def symmetry_residual(a) -> float:
    a = _square(a)
    return max_abs(a - a.T)


def is_unitary_symmetric(a, tol=None) -> bool:
    eps = _tol(tol).eps
    return unitarity_residual(a) <= eps and symmetry_residual(a) <= eps


def permutation_from_matrix(a, tol=None) -> tuple[list[int], float]:
    """Read a (numerical) permutation matrix as ``perm`` with ``a[i, perm[i]] == 1``.

    Raises ValueError if ``a`` is not within ``eps`` of a permutation matrix.
    Returns the permutation and the residual against the exact permutation.
    """
    a = _square(a)
    n = a.shape[0]
    perm = [int(np.argmax(np.abs(a[i]))) for i in range(n)]
    if sorted(perm) != list(range(n)):
        raise ValueError("matrix is not a permutation matrix (repeated column)")
    exact = np.zeros((n, n))
    exact[np.arange(n), perm] = 1.0
    res = max_abs(a - exact)
    if res > _tol(tol).eps:
        raise ValueError(f"matrix is not a permutation matrix (residual {res:.3e})")
    return perm, res


def mod1(x: Fraction) -> Fraction:
    return x - (x.numerator // x.denominator)


def frac_str(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_frac(s: str) -> Fraction:
    return Fraction(s)


def phase(x: Fraction) -> complex:
    """exp(2 pi i x) for rational x, reduced mod 1 first to keep precision."""
    y = mod1(Fraction(x))
    return complex(np.exp(2j * np.pi * (y.numerator / y.denominator)))
