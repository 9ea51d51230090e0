"""Complex spectrum of the two-qubit Hamiltonian and its PT-symmetry phases.

In the unbroken phase all four eigenvalues share one imaginary part, so after
normalization the eigenstate weights never change and the state keeps
oscillating.  In the broken phase the imaginary parts split, the
least-damped participating eigenstate wins, and the normalized state settles.
The boundary between the two is a line of exceptional points.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .dynamics import normalize
from .entanglement import concurrence_pure
from .linalg import EigenConvergenceError, eig
from .model import SystemParams, basis_state, build_total_h

EPSILON_PHASE = 1e-6
EP_TOLERANCE = 1e-6
MAX_CONDITION = 1e6
OVERLAP_FLOOR = 1e-10
ARGMAX_MARGIN = 1e-6

UNBROKEN = "unbroken"
BROKEN = "broken"
UNCLASSIFIED = "unclassified"


class PhaseError(ValueError):
    """Input is in the wrong PT phase for the requested operation."""


class BracketError(ValueError):
    """No phase transition inside the requested gamma bracket."""


class NearExceptionalPointError(ArithmeticError):
    """Eigenvector matrix too ill-conditioned for a spectral expansion."""

    def __init__(self, message, condition):
        super().__init__(message)
        self.condition = condition


@dataclass(frozen=True)
class SpectrumResult:
    params: SystemParams | None
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    residuals: np.ndarray
    max_im_spread: float
    min_gap: float


@dataclass(frozen=True)
class PhaseLabel:
    label: str
    criterion: float
    epsilon: float

    @property
    def broken(self) -> bool:
        return self.label == BROKEN


@dataclass(frozen=True)
class EPResult:
    gamma_ep: float
    min_gap: float
    iterations: int
    bracket: tuple[float, float]


@dataclass(frozen=True)
class PhaseDiagram:
    omega: np.ndarray
    gamma: np.ndarray
    labels: np.ndarray  # (n_omega, n_gamma) of str
    im_spread: np.ndarray  # NaN where unclassified
    ep_boundary: list[tuple[float, float]]


@dataclass(frozen=True)
class SpectralExpansion:
    coefficients: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    condition: float

    def state(self, t: float) -> np.ndarray:
        """Unnormalized ``sum_n c_n exp(-i Re(l_n) t) exp(Im(l_n) t) |l_n>``."""
        lam = self.eigenvalues
        phase = np.exp(-1j * lam.real * t) * np.exp(lam.imag * t)
        return self.eigenvectors @ (self.coefficients * phase)

    def states(self, times) -> np.ndarray:
        return np.array([self.state(t) for t in np.asarray(times, dtype=float)])

    def reconstruction_error(self, psi0) -> float:
        return float(np.abs(self.eigenvectors @ self.coefficients - psi0).max())


def _pairwise(values):
    d = np.abs(values[:, None] - values[None, :])
    return d[np.triu_indices(values.size, 1)]


def analyze_matrix(h, params: SystemParams | None = None) -> SpectrumResult:
    d = eig(h)
    return SpectrumResult(
        params=params,
        eigenvalues=d.values,
        eigenvectors=d.vectors,
        residuals=d.residuals,
        max_im_spread=float(_pairwise(d.values.imag).max()),
        min_gap=float(_pairwise(d.values).min()),
    )


def analyze(p: SystemParams) -> SpectrumResult:
    return analyze_matrix(build_total_h(p), p)


def classify_phase(s: SpectrumResult, epsilon: float = EPSILON_PHASE) -> PhaseLabel:
    label = UNBROKEN if s.max_im_spread < epsilon else BROKEN
    return PhaseLabel(label, s.max_im_spread, epsilon)


def phase_of(p: SystemParams, epsilon: float = EPSILON_PHASE) -> PhaseLabel:
    return classify_phase(analyze(p), epsilon)


def find_ep(
    p_template: SystemParams,
    gamma_lo: float,
    gamma_hi: float,
    *,
    epsilon: float = EPSILON_PHASE,
    tol: float = EP_TOLERANCE,
) -> EPResult:
    """Bisect on the phase label for the gamma (both qubits) where PT breaks.

    ``gamma_lo`` must be unbroken and ``gamma_hi`` broken.
    """
    if not gamma_lo < gamma_hi:
        raise BracketError(f"bracket must satisfy lo < hi, got [{gamma_lo}, {gamma_hi}]")
    lo_label = phase_of(p_template.with_gamma(gamma_lo), epsilon).label
    hi_label = phase_of(p_template.with_gamma(gamma_hi), epsilon).label
    if lo_label != UNBROKEN or hi_label != BROKEN:
        raise BracketError(
            f"no unbroken->broken transition in [{gamma_lo}, {gamma_hi}] "
            f"(labels {lo_label}, {hi_label})"
        )
    lo, hi = float(gamma_lo), float(gamma_hi)
    iterations = 0
    while hi - lo >= tol:
        mid = 0.5 * (lo + hi)
        if phase_of(p_template.with_gamma(mid), epsilon).broken:
            hi = mid
        else:
            lo = mid
        iterations += 1
    gamma_ep = 0.5 * (lo + hi)
    gap = analyze(p_template.with_gamma(gamma_ep)).min_gap
    return EPResult(gamma_ep, gap, iterations, (float(gamma_lo), float(gamma_hi)))


def _classify_column(base, omega, gamma_grid, epsilon):
    labels, spreads = [], []
    for g in gamma_grid:
        try:
            s = analyze(base.with_omega(omega).with_gamma(g))
        except EigenConvergenceError:
            labels.append(UNCLASSIFIED)
            spreads.append(np.nan)
            continue
        labels.append(classify_phase(s, epsilon).label)
        spreads.append(s.max_im_spread)
    boundary = None
    for k in range(len(gamma_grid) - 1):
        if labels[k] == UNBROKEN and labels[k + 1] == BROKEN:
            ep = find_ep(base.with_omega(omega), gamma_grid[k], gamma_grid[k + 1], epsilon=epsilon)
            boundary = (float(omega), ep.gamma_ep)
            break
    return labels, spreads, boundary


def classify_grid(
    omega_grid,
    gamma_grid,
    base: SystemParams | None = None,
    *,
    epsilon: float = EPSILON_PHASE,
    workers: int = 1,
) -> PhaseDiagram:
    """Label every (omega, gamma) cell and trace the EP line per omega column.

    Columns are independent and may run on a thread pool; results are
    assembled in grid order.
    """
    omega_grid = np.asarray(omega_grid, dtype=float)
    gamma_grid = np.asarray(gamma_grid, dtype=float)
    for name, grid in (("omega", omega_grid), ("gamma", gamma_grid)):
        if grid.ndim != 1 or grid.size < 1 or np.any(np.diff(grid) <= 0):
            raise ValueError(f"{name} grid must be a strictly increasing 1-d array")
    if base is None:
        base = SystemParams.symmetric(J=10.0)

    def run(omega):
        return _classify_column(base, omega, gamma_grid, epsilon)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            columns = list(pool.map(run, omega_grid))
    else:
        columns = [run(o) for o in omega_grid]
    labels = np.array([c[0] for c in columns], dtype=object)
    spreads = np.array([c[1] for c in columns], dtype=float)
    boundary = [c[2] for c in columns if c[2] is not None]
    return PhaseDiagram(omega_grid, gamma_grid, labels, spreads, boundary)


def sweep_phase_diagram(
    omega_range=(0.1, 5.0),
    gamma_range=(0.1, 5.0),
    resolution=(50, 50),
    base: SystemParams | None = None,
    **kw,
) -> PhaseDiagram:
    """Uniform-grid wrapper around :func:`classify_grid`."""
    if np.isscalar(resolution):
        resolution = (int(resolution), int(resolution))
    n_omega, n_gamma = (int(r) for r in resolution)
    if n_omega < 1 or n_gamma < 1:
        raise ValueError("resolution must be positive")
    for name, (lo, hi) in (("omega", omega_range), ("gamma", gamma_range)):
        if lo < 0 or hi <= lo:
            raise ValueError(f"{name} range must satisfy 0 <= lo < hi")
    return classify_grid(
        np.linspace(*omega_range, n_omega),
        np.linspace(*gamma_range, n_gamma),
        base,
        **kw,
    )


def expand_initial_state(p: SystemParams, psi0=None, *, h=None) -> SpectralExpansion:
    """Coefficients ``c`` with ``V c = psi0`` for the right eigenvectors ``V``.

    Raises :class:`NearExceptionalPointError` when ``cond(V)`` exceeds 1e6.
    """
    if psi0 is None:
        psi0 = basis_state("ff")
    psi0 = np.asarray(psi0, dtype=np.complex128)
    d = eig(build_total_h(p) if h is None else h)
    cond = d.condition_number()
    if not cond < MAX_CONDITION:
        raise NearExceptionalPointError(
            f"eigenvector matrix condition number {cond:.3e} >= {MAX_CONDITION:g}", cond
        )
    c = np.linalg.solve(d.vectors, psi0)
    return SpectralExpansion(c, d.values, d.vectors, cond)


def steady_state(p: SystemParams, psi0=None, *, h=None, epsilon: float = EPSILON_PHASE) -> np.ndarray:
    """Normalized least-damped eigenstate among those present in ``psi0``."""
    if h is None:
        h = build_total_h(p)
    if not classify_phase(analyze_matrix(h, p), epsilon).broken:
        raise PhaseError("steady state requires the PT-broken phase")
    ex = expand_initial_state(p, psi0, h=h)
    present = np.abs(ex.coefficients) >= OVERLAP_FLOOR
    im = np.where(present, ex.eigenvalues.imag, -np.inf)
    order = np.argsort(im)[::-1]
    best, runner_up = im[order[0]], im[order[1]]
    if np.isfinite(runner_up) and best - runner_up <= ARGMAX_MARGIN:
        raise PhaseError("no unique least-damped eigenstate")
    return normalize(ex.eigenvectors[:, order[0]])


def steady_state_concurrence(p: SystemParams, psi0=None, **kw) -> float:
    return concurrence_pure(steady_state(p, psi0, **kw))


def track_branches(eigenvalue_rows) -> np.ndarray:
    """Reorder each row so columns follow continuous curves.

    Each row is matched to the previous one by the permutation with the
    smallest total distance (brute force over 4! permutations).
    """
    rows = np.array(eigenvalue_rows, dtype=np.complex128)
    out = rows.copy()
    n = rows.shape[1]
    perms = [np.array(p) for p in itertools.permutations(range(n))]
    last = None
    for i in range(rows.shape[0]):
        if np.any(~np.isfinite(rows[i])):
            continue
        if last is not None:
            cost = [np.abs(rows[i][p] - last).sum() for p in perms]
            out[i] = rows[i][perms[int(np.argmin(cost))]]
        last = out[i]
    return out
