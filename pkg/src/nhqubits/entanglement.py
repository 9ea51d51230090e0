"""Two-qubit concurrence for pure states and density matrices."""

from __future__ import annotations

import numpy as np

from .linalg import eigvals, kron
from .model import SIGMA_Y

YY = kron(SIGMA_Y, SIGMA_Y)

# eigenvalues of R below this (relative to the largest) are rounding noise;
# their square roots would otherwise leak ~1e-8 into the result
_NOISE_FLOOR = 1e-13
_PSD_TOL = 1e-8


class NotPositiveError(ValueError):
    """Density matrix is not positive semidefinite within tolerance."""


def concurrence_pure(psi) -> float:
    """``2 |alpha eta - beta zeta|`` for a unit vector ``(alpha, beta, zeta, eta)``."""
    a, b, z, e = np.asarray(psi, dtype=np.complex128)
    return float(min(2.0 * abs(a * e - b * z), 1.0))


def spin_flip(rho) -> np.ndarray:
    """``(sy x sy) rho* (sy x sy)`` in the fixed basis ordering."""
    return YY @ np.conj(rho) @ YY


def wootters_eigenvalues(rho) -> np.ndarray:
    """Descending eigenvalues of ``rho (sy x sy) rho* (sy x sy)``, clamped to be real and >= 0."""
    r = rho @ spin_flip(rho)
    lam = eigvals(r)
    vals = np.sort(np.maximum(lam.real, 0.0))[::-1]
    top = max(vals[0], 0.0)
    vals[vals < _NOISE_FLOOR * max(top, 1.0)] = 0.0
    return vals


def concurrence_mixed(rho, *, check: bool = True) -> float:
    """Wootters concurrence ``max(0, l1 - l2 - l3 - l4)`` of a normalized density matrix.

    With ``check`` the input is validated as Hermitian, unit trace and
    positive semidefinite (tolerance 1e-8); a violation raises
    :class:`NotPositiveError`.
    """
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.shape != (4, 4):
        raise ValueError(f"expected a 4x4 density matrix, got shape {rho.shape}")
    if check:
        if np.abs(rho - rho.conj().T).max() > _PSD_TOL:
            raise NotPositiveError("density matrix is not Hermitian")
        if abs(np.trace(rho) - 1.0) > 1e-6:
            raise NotPositiveError(f"density matrix trace {np.trace(rho).real:.3e} != 1")
        lowest = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0]
        if lowest < -_PSD_TOL:
            raise NotPositiveError(f"density matrix has eigenvalue {lowest:.3e} < 0")
    lam = np.sqrt(wootters_eigenvalues(rho))
    c = lam[0] - lam[1] - lam[2] - lam[3]
    return float(min(max(c, 0.0), 1.0))


def werner_state(p: float) -> np.ndarray:
    """``p |B><B| + (1-p) I/4`` with ``|B> = (|ff> + |ee>)/sqrt 2``."""
    bell = np.array([1, 0, 0, 1], dtype=np.complex128) / np.sqrt(2)
    return p * np.outer(bell, bell.conj()) + (1 - p) * np.eye(4) / 4
