import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from nhqubits import linalg
from nhqubits.model import ID2, SIGMA_X, basis_state


def taylor_expm(a, t):
    """Independent oracle: plain Taylor series in 40-digit arithmetic."""
    mpmath.mp.dps = 40
    m = mpmath.matrix(a.tolist()) * t
    n = m.rows
    total = mpmath.eye(n)
    term = mpmath.eye(n)
    k = 1
    while True:
        term = term * m / k
        total += term
        if mpmath.mnorm(term, 1) < mpmath.mpf(10) ** -35 * max(1, mpmath.mnorm(total, 1)):
            break
        k += 1
    return np.array([[complex(total[i, j]) for j in range(n)] for i in range(n)])


class TestEig:
    def test_diagonal(self):
        d = linalg.eig(np.diag([1.0, 2.0, 3.0, 4.0]))
        np.testing.assert_allclose(d.values, [1, 2, 3, 4])
        np.testing.assert_allclose(np.abs(d.vectors), np.eye(4), atol=1e-14)

    def test_ordering_is_lexicographic(self):
        a = np.diag([2 + 1j, -1 + 3j, 2 - 1j, -1 - 2j])
        d = linalg.eig(a)
        np.testing.assert_allclose(d.values, [-1 - 2j, -1 + 3j, 2 - 1j, 2 + 1j])

    def test_hermitian_spectrum_is_real(self, rng):
        for _ in range(20):
            z = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
            d = linalg.eig(z + z.conj().T)
            assert np.abs(d.values.imag).max() < 1e-10

    def test_pt_broken_hamiltonian(self, ref_h):
        im = np.sort(linalg.eig(ref_h(2.0)).values.imag)
        assert np.unique(np.round(im, 6)).size >= 2
        assert np.ptp(im) > 1.0

    @pytest.mark.parametrize("n", [2, 4, 16])
    def test_residuals_and_reconstruction(self, rng, n):
        for _ in range(10):
            a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
            d = linalg.eig(a)
            scale = np.linalg.norm(a, 2)
            np.testing.assert_allclose(np.linalg.norm(d.vectors, axis=0), 1.0, atol=1e-13)
            for i in range(n):
                true_res = np.linalg.norm(a @ d.vectors[:, i] - d.values[i] * d.vectors[:, i])
                assert true_res <= d.residuals[i] + 1e-14 * scale
                assert d.residuals[i] <= 1e-9 * scale
            if d.condition_number() < 1e6:
                assert np.linalg.norm(d.reconstruct() - a) / np.linalg.norm(a) <= 1e-8

    def test_matches_generic_solver(self, rng):
        for _ in range(10):
            a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
            ours = np.sort_complex(linalg.eig(a).values)
            ref = np.sort_complex(np.linalg.eigvals(a))
            np.testing.assert_allclose(ours, ref, atol=1e-12)

    def test_shift_moves_eigenvalues_only(self, rng):
        a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        c = 2.5 - 0.75j
        d0 = linalg.eig(a)
        d1 = linalg.eig(a + c * np.eye(4))
        np.testing.assert_allclose(np.sort_complex(d1.values - c), np.sort_complex(d0.values), atol=1e-9)
        for i in range(4):
            j = np.argmin(np.abs(d1.values - c - d0.values[i]))
            overlap = abs(np.vdot(d0.vectors[:, i], d1.vectors[:, j]))
            assert overlap == pytest.approx(1.0, abs=1e-9)

    def test_degenerate_semisimple_gets_independent_vectors(self):
        d = linalg.eig(np.eye(4) * (2 - 1j))
        assert d.residuals.max() < 1e-12
        assert d.condition_number() == pytest.approx(1.0, abs=1e-9)

    def test_defective_returns_best_residual(self):
        jordan = np.array([[1.0, 1.0], [0.0, 1.0]])
        d = linalg.eig(jordan)
        assert np.all(np.isfinite(d.vectors))
        assert d.residuals.max() < 1e-8
        # the two vectors coalesce: that is the signal consumed near EPs
        assert abs(np.vdot(d.vectors[:, 0], d.vectors[:, 1])) == pytest.approx(1.0, abs=1e-8)

    def test_convergence_failure_carries_residual(self, monkeypatch, rng):
        monkeypatch.setattr(linalg, "MAX_ITER_PER_EIG", 0)
        with pytest.raises(linalg.EigenConvergenceError) as info:
            linalg.eig(rng.normal(size=(4, 4)))
        assert info.value.residual > 0

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            linalg.eig(np.ones((3, 4)))
        with pytest.raises(ValueError):
            linalg.eig(np.array([[np.nan, 0], [0, 1]]))


class TestExpm:
    def test_zero_is_identity(self):
        np.testing.assert_array_equal(linalg.expm(np.zeros((4, 4)), 3.7), np.eye(4))

    def test_diagonal(self):
        r = linalg.expm(np.diag([-1.0, -2.0, 0.0, 0.0]), 1.0)
        np.testing.assert_allclose(r, np.diag([np.exp(-1), np.exp(-2), 1, 1]), rtol=1e-14)

    @pytest.mark.parametrize("t", [0.01, 0.3, 2.0, 17.5])
    def test_hermitian_gives_unitary(self, ref_h, t):
        u = linalg.expm(-1j * ref_h(0.0), t)
        np.testing.assert_allclose(u.conj().T @ u, np.eye(4), atol=1e-9)

    @pytest.mark.parametrize("seed,scale,n", [(0, 0.01, 4), (1, 0.2, 4), (2, 1.0, 4), (3, 3.0, 4), (4, 1.0, 16)])
    def test_against_taylor_series(self, seed, scale, n):
        r = np.random.default_rng(seed)
        a = scale * (r.normal(size=(n, n)) + 1j * r.normal(size=(n, n)))
        ref = taylor_expm(a, 1.0)
        err = np.linalg.norm(linalg.expm(a) - ref) / np.linalg.norm(ref)
        assert err <= 1e-9

    @pytest.mark.parametrize("gamma,t", [(0.0, 1.3), (1.5, 0.8), (0.97, 2.0)])
    def test_reference_propagator_against_taylor(self, ref_h, gamma, t):
        a = -1j * ref_h(gamma)
        ref = taylor_expm(a, t)
        err = np.linalg.norm(linalg.expm(a, t) - ref) / np.linalg.norm(ref)
        assert err <= 1e-9

    def test_semigroup(self, rng, ref_h):
        a = -1j * ref_h(1.5)
        for t1, t2 in [(0.3, 1.1), (2.0, 5.5), (0.001, 9.0)]:
            lhs = linalg.expm(a, t1 + t2)
            rhs = linalg.expm(a, t1) @ linalg.expm(a, t2)
            assert np.linalg.norm(lhs - rhs) / np.linalg.norm(lhs) <= 1e-8

    def test_eigen_route_cross_check(self, ref_h):
        a = -1j * ref_h(0.5)
        np.testing.assert_allclose(linalg.expm_eig(a, 2.0), linalg.expm(a, 2.0), atol=1e-10)

    def test_overflow_is_explicit(self):
        with pytest.raises(linalg.ExpmOverflowError):
            linalg.expm(np.diag([1.0, 0, 0, 0]), 1e4)
        with pytest.raises(linalg.ExpmOverflowError):
            linalg.expm(np.eye(4), 1e9)


class TestKron:
    def test_identity(self):
        np.testing.assert_array_equal(linalg.kron(ID2, ID2), np.eye(4))

    def test_flip_first_qubit(self):
        out = linalg.kron(SIGMA_X, ID2) @ basis_state("ff")
        np.testing.assert_array_equal(out, basis_state("ef"))
        out = linalg.kron(SIGMA_X, ID2) @ basis_state("fe")
        np.testing.assert_array_equal(out, basis_state("ee"))

    def test_dimension_cap(self):
        with pytest.raises(ValueError):
            linalg.kron(np.eye(4), np.eye(8))

    @settings(max_examples=50, deadline=None)
    @given(arrays(np.complex128, (4, 2, 2), elements=st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)))
    def test_mixed_product(self, m):
        a, b, c, d = m
        lhs = linalg.kron(a, b) @ linalg.kron(c, d)
        np.testing.assert_allclose(lhs, linalg.kron(a @ c, b @ d), atol=1e-9)
