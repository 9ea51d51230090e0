"""Time evolution under the non-Hermitian Hamiltonian.

Two propagators are provided for every problem: the exact exponential of the
(time-independent) generator, evaluated per sample, and an adaptive
Dormand-Prince integrator.  They share nothing but the generator matrix and
serve as cross-checks of one another.

Pure states follow ``d psi/dt = -i H psi``.  Density matrices follow the
no-jump conditioned master equation

    d rho/dt = -i (H rho - rho H^dag) + sum_j D[G_j] rho,

which does not preserve the trace; ``Tr rho(t)`` is the probability that no
decay event has been recorded up to ``t``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .entanglement import concurrence_mixed, concurrence_pure
from .linalg import as_matrix, dagger

DECAY_CUTOFF = 1e-12
RTOL = 1e-9
ATOL = 1e-12
MAX_STEPS = 5_000_000
METHODS = ("exact", "rk")

DEFAULT_T_MAX = 20.0
DEFAULT_SAMPLES = 2001


class FullDecayError(ArithmeticError):
    """The state norm (or trace) dropped below the decay cutoff."""


class StepSizeUnderflowError(ArithmeticError):
    def __init__(self, message, t_reached):
        super().__init__(message)
        self.t_reached = t_reached


def time_grid(t_max: float = DEFAULT_T_MAX, n_samples: int = DEFAULT_SAMPLES) -> np.ndarray:
    if not t_max > 0:
        raise ValueError("t_max must be > 0")
    if n_samples < 2:
        raise ValueError("n_samples must be >= 2")
    return np.linspace(0.0, t_max, n_samples)


def _check_grid(t_grid) -> np.ndarray:
    t = np.ascontiguousarray(t_grid, dtype=np.float64)
    if t.ndim != 1 or t.size < 1:
        raise ValueError("time grid must be a non-empty 1-d array")
    if t[0] != 0.0:
        raise ValueError("time grid must start at 0")
    if np.any(np.diff(t) <= 0):
        raise ValueError("time grid must be strictly increasing")
    if not np.all(np.isfinite(t)):
        raise ValueError("time grid must be finite")
    return t


def normalize(psi) -> np.ndarray:
    """Rescale to unit norm; the global phase is left alone."""
    psi = np.asarray(psi, dtype=np.complex128)
    nrm = np.linalg.norm(psi)
    if nrm <= DECAY_CUTOFF:
        raise FullDecayError(f"state norm {nrm:.3e} is below {DECAY_CUTOFF:g}")
    return psi / nrm


def populations(state) -> np.ndarray:
    """Basis populations ``(P1, P2, P3, P4)`` of |ff>, |fe>, |ef>, |ee>.

    Accepts a normalized state vector or a normalized density matrix.
    """
    s = np.asarray(state)
    if s.ndim == 1:
        return np.abs(s) ** 2
    return np.real(np.diagonal(s)).copy()


def liouvillian(h, jumps=()) -> np.ndarray:
    """Generator ``L`` with ``vec(d rho/dt) = L vec(rho)`` for row-major ``vec``.

    Uses ``vec(A X B) = (A kron B^T) vec(X)``.
    """
    h = as_matrix(h)
    n = h.shape[0]
    ident = np.eye(n, dtype=np.complex128)
    gen = -1j * (np.kron(h, ident) - np.kron(ident, h.conj()))
    for g in jumps:
        g = as_matrix(g)
        gg = dagger(g) @ g
        gen += np.kron(g, g.conj()) - 0.5 * np.kron(gg, ident) - 0.5 * np.kron(ident, gg.T)
    return np.ascontiguousarray(gen)


def _propagate(gen, y0, t, method):
    if method == "exact":
        return _kernels.propagate_exact(gen, y0, t), t.size
    if method == "rk":
        out, n_done, status, t_reached = _kernels.dopri_linear(gen, y0, t, RTOL, ATOL, MAX_STEPS)
        if status != _kernels.OK:
            raise StepSizeUnderflowError(
                f"adaptive integration stalled at t = {t_reached:.6g}", t_reached
            )
        return out, n_done
    raise ValueError(f"method must be one of {METHODS}, got {method!r}")


def _first_below(values, cutoff):
    idx = np.flatnonzero(values < cutoff)
    return int(idx[0]) if idx.size else None


@dataclass
class Trajectory:
    """Sampled evolution; every series has one entry per retained sample.

    ``raw`` holds unnormalized states (shape ``(n, 4)``) or density matrices
    (shape ``(n, 4, 4)``); ``weight`` is the squared norm or the trace, i.e.
    the no-jump probability.  ``terminated_at`` is set when the weight fell
    below the decay cutoff and the trajectory was cut short.
    """

    times: np.ndarray
    raw: np.ndarray
    normalized: np.ndarray
    weight: np.ndarray
    populations: np.ndarray
    concurrence: np.ndarray
    kind: str
    method: str
    terminated_at: float | None = None
    meta: dict = field(default_factory=dict)

    @property
    def norm(self) -> np.ndarray:
        """State norm (pure) or trace (mixed)."""
        return np.sqrt(self.weight) if self.kind == "pure" else self.weight

    def __len__(self):
        return self.times.size


def evolve_pure(h, psi0, t_grid, method: str = "exact") -> Trajectory:
    """Propagate ``psi0`` with ``d psi/dt = -i H psi`` and sample the grid."""
    h = as_matrix(h)
    t = _check_grid(t_grid)
    psi0 = np.ascontiguousarray(psi0, dtype=np.complex128)
    if psi0.shape != (h.shape[0],):
        raise ValueError("psi0 does not match the Hamiltonian dimension")
    if abs(np.linalg.norm(psi0) - 1.0) > 1e-6:
        raise ValueError("psi0 must be normalized")
    raw, n_done = _propagate(np.ascontiguousarray(-1j * h), psi0, t, method)
    raw = raw[:n_done]
    weight = np.sum(np.abs(raw) ** 2, axis=1)
    cut = _first_below(weight, DECAY_CUTOFF)
    terminated_at = None
    if cut is not None:
        terminated_at = float(t[cut])
        raw, weight = raw[:cut], weight[:cut]
    normalized = raw / np.sqrt(weight)[:, None]
    conc = np.array([concurrence_pure(s) for s in normalized])
    return Trajectory(
        times=t[: raw.shape[0]].copy(),
        raw=raw,
        normalized=normalized,
        weight=weight,
        populations=np.abs(normalized) ** 2,
        concurrence=conc,
        kind="pure",
        method=method,
        terminated_at=terminated_at,
    )


def evolve_master(h, jumps, rho0, t_grid, method: str = "exact", concurrence: bool = True) -> Trajectory:
    """Propagate ``rho0`` under the no-jump conditioned master equation.

    The density matrix is vectorized row-major into 16 components and moved by
    the Liouvillian.  ``weight`` is ``Tr rho(t)``; ``normalized`` is
    ``rho / Tr rho``.  The trajectory stops at the first sample whose trace is
    below the decay cutoff.
    """
    h = as_matrix(h)
    t = _check_grid(t_grid)
    rho0 = as_matrix(rho0)
    if np.abs(rho0 - dagger(rho0)).max() > 1e-9:
        raise ValueError("rho0 must be Hermitian")
    if abs(np.trace(rho0) - 1.0) > 1e-9:
        raise ValueError("rho0 must have unit trace")
    if np.linalg.eigvalsh(rho0)[0] < -1e-9:
        raise ValueError("rho0 must be positive semidefinite")
    n = h.shape[0]
    gen = liouvillian(h, jumps)
    vec, n_done = _propagate(gen, np.ascontiguousarray(rho0.reshape(-1)), t, method)
    raw = vec[:n_done].reshape(-1, n, n)
    # enforce exact Hermiticity; the generator preserves it up to rounding
    raw = 0.5 * (raw + np.conj(np.transpose(raw, (0, 2, 1))))
    weight = np.real(np.trace(raw, axis1=1, axis2=2))
    cut = _first_below(weight, DECAY_CUTOFF)
    terminated_at = None
    if cut is not None:
        terminated_at = float(t[cut])
        raw, weight = raw[:cut], weight[:cut]
    normalized = raw / weight[:, None, None]
    if concurrence:
        conc = np.array([concurrence_mixed(r) for r in normalized])
    else:
        conc = np.full(weight.size, np.nan)
    return Trajectory(
        times=t[: raw.shape[0]].copy(),
        raw=raw,
        normalized=normalized,
        weight=weight,
        populations=np.real(np.diagonal(normalized, axis1=1, axis2=2)).copy(),
        concurrence=conc,
        kind="mixed",
        method=method,
        terminated_at=terminated_at,
    )


def pure_density(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=np.complex128)
    return np.outer(psi, psi.conj())


# ---------------------------------------------------------------------------
# long-time behaviour of a concurrence series
# ---------------------------------------------------------------------------

STABLE_FRACTION = 0.25
STABLE_BAND = 0.05


def tail(series, fraction: float) -> np.ndarray:
    series = np.asarray(series)
    start = int(np.floor(series.size * (1.0 - fraction)))
    return series[start:]


def swing(series, fraction: float = 1.0) -> float:
    """max - min over the final ``fraction`` of the samples."""
    x = tail(series, fraction)
    return float(x.max() - x.min())


def is_stabilized(series, band: float = STABLE_BAND, fraction: float = STABLE_FRACTION) -> bool:
    """True when the final-quarter swing is below ``band``."""
    return swing(series, fraction) < band


def plateau(series, fraction: float = STABLE_FRACTION) -> float:
    """Mean over the final ``fraction`` of the samples."""
    return float(tail(series, fraction).mean())
