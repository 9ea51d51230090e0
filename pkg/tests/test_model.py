import numpy as np
import pytest

from nhqubits import model
from nhqubits.model import SystemParams, build_jump_ops, build_single_qubit_h, build_total_h


class TestSingleQubit:
    def test_zero(self):
        np.testing.assert_array_equal(build_single_qubit_h(0, 0, 0), np.zeros((2, 2)))

    def test_pure_drive(self):
        h = build_single_qubit_h(0, 0, 1.3)
        np.testing.assert_array_equal(h, h.conj().T)
        np.testing.assert_allclose(np.sort(np.linalg.eigvalsh(h)), [-1.3, 1.3])

    def test_literal_operator_form(self):
        # (Delta - i gamma/2) sigma+ sigma- + Omega sigma_x with sigma- = |e><f|:
        # sigma+ sigma- = |f><e|e><f| = |f><f| -> entry (0, 0) in [|f>, |e>]
        expected = np.array([[-0.5j, 1.6], [1.6, 0.0]])
        np.testing.assert_array_equal(build_single_qubit_h(0, 1, 1.6, loss_level="f"), expected)

    def test_loss_on_e(self):
        expected = np.array([[0.0, 1.6], [1.6, -0.5j]])
        np.testing.assert_array_equal(build_single_qubit_h(0, 1, 1.6, loss_level="e"), expected)

    def test_detuning_rides_with_loss(self):
        h = build_single_qubit_h(0.3, 0.0, 0.0, loss_level="f")
        assert h[0, 0] == 0.3 and h[1, 1] == 0

    def test_negative_gamma(self):
        with pytest.raises(ValueError):
            build_single_qubit_h(0, -1, 0)


class TestTotal:
    def test_zero(self):
        np.testing.assert_array_equal(build_total_h(SystemParams()), np.zeros((4, 4)))

    def test_pure_exchange(self):
        h = build_total_h(SystemParams(J=10))
        expected = np.zeros((4, 4))
        expected[1, 2] = expected[2, 1] = 10
        np.testing.assert_array_equal(h, expected)

    def test_hand_expansion_literal(self):
        # hand expansion, loss on |f>: |ff> carries both losses, |ee> none
        p = SystemParams.symmetric(gamma=1, omega=1.6, J=10, loss_level="f")
        o, j = 1.6, 10.0
        expected = np.array([
            [-1j, o, o, 0],
            [o, -0.5j, j, o],
            [o, j, -0.5j, o],
            [0, o, o, 0],
        ])
        np.testing.assert_allclose(build_total_h(p), expected, atol=0)

    def test_hand_expansion_default(self):
        p = SystemParams.symmetric(gamma=1, omega=1.6, J=10)
        np.testing.assert_allclose(np.diag(build_total_h(p)), [0, -0.5j, -0.5j, -1j], atol=0)

    def test_levels_related_by_global_flip(self):
        xx = np.kron(model.SIGMA_X, model.SIGMA_X)
        pe = SystemParams(gamma1=0.7, gamma2=1.3, omega1=1.1, omega2=2.0, J=4, delta1=0.2)
        pf = SystemParams(**{**pe.to_dict(), "loss_level": "f"})
        np.testing.assert_allclose(xx @ build_total_h(pf) @ xx, build_total_h(pe), atol=1e-15)

    @pytest.mark.parametrize("level", ["e", "f"])
    def test_hermitian_without_loss(self, level):
        h = build_total_h(SystemParams(omega1=1.2, omega2=0.4, J=3, delta1=0.5, delta2=-0.1, loss_level=level))
        np.testing.assert_array_equal(h, h.conj().T)

    def test_swap_conjugation(self):
        p = SystemParams(gamma1=0.3, gamma2=1.7, omega1=1.0, omega2=2.5, J=7, delta1=0.1, delta2=-0.4)
        np.testing.assert_allclose(model.SWAP @ build_total_h(p) @ model.SWAP, build_total_h(p.swapped()), atol=1e-15)

    def test_anti_hermitian_part_is_diagonal(self):
        gamma = 1.37
        diff = build_total_h(model.reference_params(gamma, loss_level="f")) - build_total_h(model.reference_params(0, loss_level="f"))
        np.testing.assert_allclose(diff, -0.5j * gamma * np.diag([2, 1, 1, 0]), atol=1e-15)

    def test_per_qubit_parameters_are_independent(self):
        h = build_total_h(SystemParams(gamma1=2.0, loss_level="f"))
        np.testing.assert_allclose(np.diag(h), [-1j, -1j, 0, 0])


class TestJumps:
    def test_zero(self):
        for g in build_jump_ops(SystemParams()):
            np.testing.assert_array_equal(g, np.zeros((4, 4)))

    def test_first_qubit_relaxation(self):
        g1, g2 = build_jump_ops(SystemParams(alpha1=1.0))
        np.testing.assert_array_equal(g1 @ model.basis_state("ff"), model.basis_state("ef"))
        np.testing.assert_array_equal(g1 @ model.basis_state("fe"), model.basis_state("ee"))
        np.testing.assert_array_equal(g1 @ model.basis_state("ef"), np.zeros(4))
        np.testing.assert_array_equal(g2, np.zeros((4, 4)))

    def test_square_root_rate(self):
        for g in build_jump_ops(SystemParams.symmetric(alpha=0.25)):
            nz = g[g != 0]
            assert nz.size == 2
            np.testing.assert_array_equal(nz, 0.5)


class TestParams:
    @pytest.mark.parametrize("field", ["gamma1", "gamma2", "alpha1", "alpha2"])
    def test_negative_rates(self, field):
        with pytest.raises(ValueError):
            SystemParams(**{field: -0.1})

    def test_non_finite(self):
        with pytest.raises(ValueError):
            SystemParams(J=float("inf"))

    def test_bad_loss_level(self):
        with pytest.raises(ValueError):
            SystemParams(loss_level="g")

    def test_basis_labels(self):
        for k, label in enumerate(model.BASIS_LABELS):
            assert model.basis_state(label)[k] == 1
        with pytest.raises(ValueError):
            model.basis_state("gg")
