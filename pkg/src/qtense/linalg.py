"""Dense complex linear algebra on small Hermitian problems.

Matrices and state vectors are plain ``numpy`` arrays of dtype complex128.
Time is dimensionless (hbar = 1).
"""
from __future__ import annotations

import numpy as np

DEFAULT_TOL = 1e-9
MAX_DIM = 64


class LinalgError(ValueError):
    pass


class NotSquare(LinalgError):
    pass


class NotHermitian(LinalgError):
    pass


class DimensionCap(LinalgError):
    pass


def as_matrix(m) -> np.ndarray:
    return np.asarray(m, dtype=np.complex128)


def max_abs_diff(a, b) -> float:
    """Max-abs entry difference; the tolerance metric used everywhere."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a - b)))


def matrices_equal(a, b, tol: float = DEFAULT_TOL) -> bool:
    return np.shape(a) == np.shape(b) and max_abs_diff(a, b) <= tol


def check_square(m: np.ndarray) -> None:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NotSquare(f"matrix of shape {m.shape} is not square")
    if m.shape[0] > MAX_DIM:
        raise DimensionCap(f"dimension {m.shape[0]} exceeds cap {MAX_DIM}")


def hermiticity_residual(m) -> float:
    m = as_matrix(m)
    return max_abs_diff(m, m.conj().T)


def check_hermitian(m: np.ndarray, tol: float = DEFAULT_TOL) -> None:
    check_square(m)
    r = hermiticity_residual(m)
    if r > tol:
        raise NotHermitian(f"matrix not Hermitian (max |m - m^dag| = {r:.3g})")


def hermitian_eigen(m, tol: float = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Ascending eigenvalues and a unitary eigenvector matrix of ``m``.

    ``m == V @ diag(w) @ V^dag`` within ``tol``.
    """
    m = as_matrix(m)
    check_hermitian(m, tol)
    # symmetrize away the sub-tolerance anti-Hermitian part before eigh
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    return w, v


def evolution_operator(h, t: float, tol: float = DEFAULT_TOL, eigen=None) -> np.ndarray:
    """U(t) = exp(-i h t), built from the eigendecomposition of ``h``.

    ``eigen`` may carry a precomputed ``(w, v)`` pair for ``h``.
    """
    w, v = eigen if eigen is not None else hermitian_eigen(h, tol)
    phases = np.exp(-1j * w * t)
    return (v * phases) @ v.conj().T


def is_projector(m, tol: float = DEFAULT_TOL) -> bool:
    m = as_matrix(m)
    check_square(m)
    return max_abs_diff(m @ m, m) <= tol and hermiticity_residual(m) <= tol


def is_unitary(u, tol: float = DEFAULT_TOL) -> bool:
    u = as_matrix(u)
    return max_abs_diff(u.conj().T @ u, np.eye(u.shape[0])) <= tol


def normalize_state(v) -> np.ndarray:
    v = np.asarray(v, dtype=np.complex128)
    n = np.linalg.norm(v)
    if n == 0:
        raise LinalgError("cannot normalize the zero vector")
    return v / n


def is_normalized(v, tol: float = DEFAULT_TOL) -> bool:
    return abs(np.linalg.norm(v) - 1.0) <= tol


def random_hermitian(dim: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return scale * 0.5 * (a + a.conj().T)


def random_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    return normalize_state(rng.normal(size=dim) + 1j * rng.normal(size=dim))
