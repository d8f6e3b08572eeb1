"""Symmetric eigendecomposition and the matrix functions built on it."""
from __future__ import annotations

import math

import numpy as np

from .errors import ConditioningError, ConvergenceError, DimensionError

__all__ = ["sym_eig", "jacobi_eigh", "sym_fn", "spd_inverse", "min_eig",
           "symmetrize", "COND_MAX"]

COND_MAX = 1e12
_EPS = 0.5 * np.finfo(float).eps


def symmetrize(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    return 0.5 * (a + a.T)


def _check_square(a: np.ndarray) -> None:
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")


def jacobi_eigh(a, tol: float = 1e-15, max_sweeps: int = 60):
    """Cyclic Jacobi eigensolver for a symmetric matrix.

    Returns ``(w, q)`` with eigenvalues ``w`` ascending and orthonormal
    eigenvectors in the columns of ``q``. Each sweep rotates every
    off-diagonal pair once; iteration stops when the off-diagonal Frobenius
    mass drops below ``tol * ||A||_F`` or when a whole sweep finds every
    pivot negligible against its diagonal pair (the rounding floor, which
    can sit above ``tol`` for larger matrices).
    """
    a = symmetrize(a).copy()
    _check_square(a)
    d = a.shape[0]
    v = np.eye(d)
    scale = np.linalg.norm(a)
    if scale == 0.0 or d == 1:
        return np.diag(a).copy(), v
    for _ in range(max_sweeps):
        off = math.sqrt(max(np.sum(a * a) - np.sum(np.diag(a) ** 2), 0.0))
        if off <= tol * scale:
            break
        rotated = False
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = a[p, q]
                if abs(apq) <= 1e-300 or abs(apq) <= _EPS * math.sqrt(abs(a[p, p] * a[q, q])):
                    continue
                rotated = True
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.hypot(t, 1.0)
                s = t * c
                cp, cq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * cp - s * cq
                a[:, q] = s * cp + c * cq
                rp, rq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
        if not rotated:
            break
    else:
        raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps")
    w = np.diag(a).copy()
    order = np.argsort(w)
    return w[order], v[:, order]


def sym_eig(a, method: str = "lapack"):
    """Eigenvalues (ascending) and orthonormal eigenvectors of a symmetric matrix.

    ``method="lapack"`` calls :func:`numpy.linalg.eigh`; ``method="jacobi"``
    uses the cyclic Jacobi solver in this module. Both satisfy
    ``||A Q - Q diag(w)||_F <= 1e-10 ||A||_F``.
    """
    a = np.asarray(a, dtype=float)
    _check_square(a)
    if method == "jacobi":
        return jacobi_eigh(a)
    if method != "lapack":
        raise ValueError(f"unknown eigensolver {method!r}")
    try:
        w, q = np.linalg.eigh(symmetrize(a))
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise ConvergenceError(str(exc)) from exc
    return w, q


def min_eig(a) -> float:
    return float(sym_eig(a)[0][0])


def sym_fn(a, fn) -> np.ndarray:
    """Apply a scalar function to a symmetric matrix through its eigenvalues."""
    w, q = sym_eig(a)
    return symmetrize((q * fn(w)) @ q.T)


def spd_inverse(a, cond_max: float = COND_MAX) -> np.ndarray:
    w, q = sym_eig(a)
    if w[0] <= 0.0:
        raise ConditioningError("matrix is not positive definite")
    if w[-1] / w[0] > cond_max:
        raise ConditioningError(
            f"condition number {w[-1] / w[0]:.3g} exceeds {cond_max:.0e}")
    return symmetrize((q / w) @ q.T)
