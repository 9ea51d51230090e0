"""Entanglement dynamics of two coupled, driven non-Hermitian qubits."""

__version__ = "0.1.0"
