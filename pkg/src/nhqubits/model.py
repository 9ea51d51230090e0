"""Two-qubit non-Hermitian Hamiltonian and jump operators.

Each qubit lives on the levels ``|f>`` and ``|e>`` of a driven qutrit; the
third level ``|g>`` never enters the simulated space and only shows up as
probability leaking out of it.  Two-qubit states use the ordering
``|ff>, |fe>, |ef>, |ee>`` (qubit 1 first), so the amplitudes
``(alpha, beta, zeta, eta)`` of a state sit at indices 0..3.

Units are those of the figures being reproduced: angular frequencies in
rad/us, rates in 1/us and times in us.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, fields, replace

import numpy as np

from .linalg import kron

BASIS_LABELS = ("ff", "fe", "ef", "ee")
QUBIT_LEVELS = ("f", "e")
LOSS_LEVELS = ("e", "f")

F = 0
E = 1

SIGMA_MINUS = np.array([[0, 0], [1, 0]], dtype=np.complex128)  # |e><f|
SIGMA_PLUS = SIGMA_MINUS.T.copy()  # |f><e|
SIGMA_X = SIGMA_MINUS + SIGMA_PLUS
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
ID2 = np.eye(2, dtype=np.complex128)


def basis_state(label: str) -> np.ndarray:
    """Unit vector for one of ``ff``, ``fe``, ``ef``, ``ee``."""
    try:
        k = BASIS_LABELS.index(label)
    except ValueError:
        raise ValueError(f"unknown basis label {label!r}; use one of {BASIS_LABELS}") from None
    psi = np.zeros(4, dtype=np.complex128)
    psi[k] = 1.0
    return psi


@dataclass(frozen=True)
class SystemParams:
    """Physical parameters of the coupled pair, stored per qubit.

    ``loss_level`` selects which qubit level carries the non-Hermitian loss
    term ``-i gamma/2``.  ``"e"`` (default) is the physical picture in which
    ``|e>`` decays to ``|g>`` and relaxation ``|f> -> |e>`` feeds the lossy
    level.  ``"f"`` attaches the loss to ``sigma+ sigma- = |f><f|``, the
    operator written in the single-qubit Hamiltonian of the source model.
    Both give identical spectra and are related by flipping ``f <-> e`` on
    both qubits, so pure-state dynamics only differ in the initial state.
    """

    delta1: float = 0.0
    delta2: float = 0.0
    gamma1: float = 0.0
    gamma2: float = 0.0
    omega1: float = 0.0
    omega2: float = 0.0
    J: float = 0.0
    alpha1: float = 0.0
    alpha2: float = 0.0
    loss_level: str = field(default="e")

    def __post_init__(self):
        for f in fields(self):
            if f.name == "loss_level":
                continue
            value = getattr(self, f.name)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise ValueError(f"{f.name} must be a finite real number, got {value!r}")
            object.__setattr__(self, f.name, float(value))
        for name in ("gamma1", "gamma2", "alpha1", "alpha2"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.loss_level not in LOSS_LEVELS:
            raise ValueError(f"loss_level must be one of {LOSS_LEVELS}")

    @classmethod
    def symmetric(cls, *, gamma=0.0, omega=0.0, J=0.0, alpha=0.0, delta=0.0, loss_level="e"):
        """Identical qubits, the scenario used throughout the figures."""
        return cls(
            delta1=delta, delta2=delta,
            gamma1=gamma, gamma2=gamma,
            omega1=omega, omega2=omega,
            J=J,
            alpha1=alpha, alpha2=alpha,
            loss_level=loss_level,
        )

    def with_gamma(self, gamma: float) -> "SystemParams":
        return replace(self, gamma1=gamma, gamma2=gamma)

    def with_omega(self, omega: float) -> "SystemParams":
        return replace(self, omega1=omega, omega2=omega)

    def with_alpha(self, alpha: float) -> "SystemParams":
        return replace(self, alpha1=alpha, alpha2=alpha)

    def swapped(self) -> "SystemParams":
        """Exchange the roles of qubit 1 and qubit 2."""
        return replace(
            self,
            delta1=self.delta2, delta2=self.delta1,
            gamma1=self.gamma2, gamma2=self.gamma1,
            omega1=self.omega2, omega2=self.omega1,
            alpha1=self.alpha2, alpha2=self.alpha1,
        )

    def to_dict(self) -> dict:
        return asdict(self)


# reference scenario: J = 10 rad/us, Omega = 1.6 rad/us, resonant drive
REF_J = 10.0
REF_OMEGA = 1.6


def reference_params(gamma: float, alpha: float = 0.0, **kw) -> SystemParams:
    return SystemParams.symmetric(gamma=gamma, omega=REF_OMEGA, J=REF_J, alpha=alpha, **kw)


def build_single_qubit_h(delta: float, gamma: float, omega: float, loss_level: str = "e") -> np.ndarray:
    """2x2 Hamiltonian ``(delta - i gamma/2) P + omega sigma_x`` on ``[|f>, |e>]``.

    ``P`` is ``sigma+ sigma- = |f><f|`` for ``loss_level="f"`` and ``|e><e|``
    for ``loss_level="e"``.
    """
    if gamma < 0:
        raise ValueError("gamma must be >= 0")
    if loss_level not in LOSS_LEVELS:
        raise ValueError(f"loss_level must be one of {LOSS_LEVELS}")
    h = omega * SIGMA_X.copy()
    k = F if loss_level == "f" else E
    h[k, k] += delta - 0.5j * gamma
    return h


def build_total_h(p: SystemParams) -> np.ndarray:
    """4x4 Hamiltonian: local terms plus exchange coupling ``J`` between |fe> and |ef>."""
    h1 = build_single_qubit_h(p.delta1, p.gamma1, p.omega1, p.loss_level)
    h2 = build_single_qubit_h(p.delta2, p.gamma2, p.omega2, p.loss_level)
    exchange = kron(SIGMA_PLUS, SIGMA_MINUS) + kron(SIGMA_MINUS, SIGMA_PLUS)
    return kron(h1, ID2) + kron(ID2, h2) + p.J * exchange


def build_jump_ops(p: SystemParams) -> list[np.ndarray]:
    """Relaxation ``|f> -> |e>`` on each qubit: ``sqrt(alpha_j) |e><f|``."""
    return [
        math.sqrt(p.alpha1) * kron(SIGMA_MINUS, ID2),
        math.sqrt(p.alpha2) * kron(ID2, SIGMA_MINUS),
    ]


SWAP = np.eye(4, dtype=np.complex128)[[0, 2, 1, 3]]
