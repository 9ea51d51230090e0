"""Dense complex linear algebra for 4x4 and 16x16 matrices.

Thin validated wrappers around the kernels in :mod:`nhqubits._kernels`.
Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels

MAX_DIM = 16
MAX_ITER_PER_EIG = 60


class EigenConvergenceError(ArithmeticError):
    """QR iteration did not deflate within the iteration cap."""

    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual


class ExpmOverflowError(OverflowError):
    pass


def as_matrix(a) -> np.ndarray:
    m = np.ascontiguousarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenpairs ordered by (real part, imaginary part).

    ``vectors[:, i]`` is the unit right eigenvector for ``values[i]`` and
    ``residuals[i] = ||A v_i - lambda_i v_i||``.  Near an exceptional point two
    columns may be (almost) parallel; the residuals then stay small while
    ``cond(vectors)`` blows up.
    """

    values: np.ndarray
    vectors: np.ndarray
    residuals: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.vectors
        return v @ np.diag(self.values) @ np.linalg.inv(v)

    def condition_number(self) -> float:
        return float(np.linalg.cond(self.vectors))


def _lexicographic_order(w: np.ndarray, tol: float) -> np.ndarray:
    """Sort by real part, breaking near-ties (``|dRe| <= tol``) by imaginary part.

    Exact ties in the real part are common (conjugate-like pairs), and plain
    float comparison would order them by rounding noise.
    """
    order = list(np.argsort(w.real, kind="stable"))
    groups, current = [], [order[0]]
    for i in order[1:]:
        if w[i].real - w[current[-1]].real <= tol:
            current.append(i)
        else:
            groups.append(current)
            current = [i]
    groups.append(current)
    return np.array([i for g in groups for i in sorted(g, key=lambda k: w[k].imag)])


def eig(a) -> EigenDecomposition:
    """Eigendecomposition via Hessenberg QR plus inverse iteration.

    Raises :class:`EigenConvergenceError` if the QR sweep fails to deflate.
    When a cluster of eigenvalues is defective, the best inverse-iteration
    vector is returned together with its (large) residual instead of failing.
    """
    m = as_matrix(a)
    scale = max(float(np.abs(m).sum(axis=0).max()), 1.0)
    w, v, res, status, qr_res = _kernels.eig_kernel(
        m, MAX_ITER_PER_EIG, 1e-10 * scale, 1e-9 * scale
    )
    if status != _kernels.OK:
        raise EigenConvergenceError(
            f"QR iteration did not converge (sub-diagonal {qr_res:.3e})", qr_res
        )
    order = _lexicographic_order(w, 1e-9 * scale)
    return EigenDecomposition(w[order].copy(), v[:, order].copy(), res[order].copy())


def eigvals(a) -> np.ndarray:
    """Eigenvalues only, in the same order as :func:`eig`."""
    m = as_matrix(a)
    w, status, qr_res = _kernels.hessenberg_eigvals(_kernels.hessenberg(m), MAX_ITER_PER_EIG)
    if status != _kernels.OK:
        raise EigenConvergenceError(
            f"QR iteration did not converge (sub-diagonal {qr_res:.3e})", qr_res
        )
    scale = max(float(np.abs(m).sum(axis=0).max()), 1.0)
    return w[_lexicographic_order(w, 1e-9 * scale)]


def expm(a, t: float = 1.0) -> np.ndarray:
    """``exp(a * t)`` by scaling and squaring with Pade approximants."""
    m = as_matrix(a)
    t = float(t)
    if not np.isfinite(t):
        raise ValueError("t must be finite")
    at = m * t
    # 2**1000 squarings already overflow double precision
    if _kernels.norm1(at) > 7.0e2 * 2.0 ** 10:
        raise ExpmOverflowError(f"||A t||_1 = {_kernels.norm1(at):.3e} is out of range")
    with np.errstate(over="ignore", invalid="ignore"):
        r = _kernels.expm_kernel(at)
    if not np.all(np.isfinite(r)):
        raise ExpmOverflowError("matrix exponential overflowed")
    return r


def expm_eig(a, t: float = 1.0) -> np.ndarray:
    """Cross-check route ``V exp(diag(lambda) t) V^-1``; unreliable near EPs."""
    d = eig(a)
    v = d.vectors
    return v @ np.diag(np.exp(d.values * t)) @ np.linalg.inv(v)


def kron(a, b) -> np.ndarray:
    a = as_matrix(a)
    b = as_matrix(b)
    n = a.shape[0] * b.shape[0]
    if n > MAX_DIM:
        raise ValueError(f"Kronecker product of dimension {n} exceeds {MAX_DIM}")
    return np.kron(a, b)


def dagger(a) -> np.ndarray:
    return np.conj(np.asarray(a)).T
