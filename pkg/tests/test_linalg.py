import math

import numpy as np
import pytest

from fermicomp import linalg
from fermicomp.errors import DenseCapExceeded, DimensionMismatch, NonHermitian, NotPSD


def random_hermitian(rng, n):
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (g + g.conj().T) / 2


def random_psd(rng, n, trace=1.0):
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    m = g @ g.conj().T
    return m * (trace / np.real(np.trace(m)))


class TestEigHermitian:
    def test_sigma_z(self):
        dec = linalg.eig_hermitian(np.diag([1.0, -1.0]))
        np.testing.assert_allclose(dec.eigenvalues, [1.0, -1.0])

    def test_identity_tie_rule(self):
        dec = linalg.eig_hermitian(np.eye(2))
        np.testing.assert_allclose(dec.eigenvalues, [1.0, 1.0])
        # anchors order the degenerate pair: e0 first, e1 second
        np.testing.assert_allclose(np.abs(dec.eigenvectors), np.eye(2), atol=1e-12)

    def test_offdiagonal_half(self):
        # characteristic polynomial x^2 - 1/4 by hand
        dec = linalg.eig_hermitian([[0, 0.5], [0.5, 0]])
        np.testing.assert_allclose(dec.eigenvalues, [0.5, -0.5], atol=1e-12)

    def test_rejects_non_hermitian(self):
        with pytest.raises(NonHermitian):
            linalg.eig_hermitian([[0, 1], [0, 0]])

    def test_reconstruction_random(self):
        rng = np.random.default_rng(11)
        for n in (2, 5, 16, 40):
            h = random_hermitian(rng, n)
            dec = linalg.eig_hermitian(h)
            back = (dec.eigenvectors * dec.eigenvalues) @ dec.eigenvectors.conj().T
            assert linalg.trace_norm(back - h) <= 1e-9 * max(1.0, linalg.trace_norm(h))
            gram = dec.eigenvectors.conj().T @ dec.eigenvectors
            assert np.max(np.abs(gram - np.eye(n))) <= 1e-10

    def test_deterministic_on_identical_input(self):
        rng = np.random.default_rng(3)
        h = random_hermitian(rng, 9)
        a = linalg.eig_hermitian(h)
        b = linalg.eig_hermitian(h.copy())
        np.testing.assert_array_equal(a.eigenvalues, b.eigenvalues)
        np.testing.assert_array_equal(a.eigenvectors, b.eigenvectors)

    def test_dense_cap(self):
        with pytest.raises(DenseCapExceeded):
            linalg.eig_hermitian(np.eye(2048))


class TestPsdFunctions:
    def test_sqrt_diagonal(self):
        np.testing.assert_allclose(linalg.matrix_sqrt_psd(np.diag([4.0, 9.0])),
                                   np.diag([2.0, 3.0]), atol=1e-12)

    def test_sqrt_zero(self):
        np.testing.assert_allclose(linalg.matrix_sqrt_psd(np.zeros((3, 3))),
                                   np.zeros((3, 3)))

    def test_sqrt_spectrum(self):
        r = linalg.matrix_sqrt_psd(np.diag([0.9, 0.1]))
        np.testing.assert_allclose(np.diag(r).real,
                                   [math.sqrt(0.9), math.sqrt(0.1)], atol=1e-12)

    def test_sqrt_squares_back(self):
        rng = np.random.default_rng(5)
        for n in (2, 8, 17):
            a = random_psd(rng, n)
            r = linalg.matrix_sqrt_psd(a)
            assert linalg.trace_norm(r @ r - a) <= 1e-8 * max(1.0, linalg.trace_norm(a))

    def test_sqrt_rejects_negative(self):
        with pytest.raises(NotPSD):
            linalg.matrix_sqrt_psd(np.diag([1.0, -1e-6]))

    def test_log_identity(self):
        np.testing.assert_allclose(linalg.matrix_log_psd(np.eye(2)), np.zeros((2, 2)))

    def test_log_powers_of_two(self):
        np.testing.assert_allclose(linalg.matrix_log_psd(np.diag([2.0, 4.0])),
                                   np.diag([1.0, 2.0]), atol=1e-12)

    def test_log_kernel_convention(self):
        # log2(0.5) = -1 on the support; the kernel maps to 0
        np.testing.assert_allclose(linalg.matrix_log_psd(np.diag([0.5, 0.0])),
                                   np.diag([-1.0, 0.0]), atol=1e-12)

    def test_log_inverts_exp2_spectrally(self):
        rng = np.random.default_rng(7)
        a = random_psd(rng, 6) + 0.2 * np.eye(6)  # full rank
        lg = linalg.matrix_log_psd(a)
        w_log = np.sort(np.linalg.eigvalsh(lg))
        w_a = np.sort(np.log2(np.linalg.eigvalsh(a)))
        np.testing.assert_allclose(w_log, w_a, atol=1e-8)


class TestTraceNorm:
    def test_examples(self):
        assert linalg.trace_norm(np.diag([1.0, -1.0])) == pytest.approx(2.0)
        assert linalg.trace_norm([[0, 0.5], [0.5, 0]]) == pytest.approx(1.0)
        assert linalg.trace_norm(np.zeros((4, 4))) == 0.0

    def test_requires_square(self):
        with pytest.raises(DimensionMismatch):
            linalg.trace_norm(np.ones((2, 3)))

    def test_unitary_invariance(self):
        rng = np.random.default_rng(13)
        for _ in range(10):
            n = int(rng.integers(2, 9))
            x = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
            u, _ = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
            v, _ = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
            assert linalg.trace_norm(u @ x @ v) == pytest.approx(
                linalg.trace_norm(x), abs=1e-9)


class TestUhlmannFidelity:
    def test_self_fidelity(self):
        rng = np.random.default_rng(17)
        a = random_psd(rng, 4)
        assert linalg.uhlmann_fidelity_matrices(a, a) == pytest.approx(1.0, abs=1e-9)

    def test_pure_state_formula(self):
        # F(rho, |0><0|) = sqrt(<0|rho|0>) by the pure-state formula
        rho = np.diag([0.5, 0.5])
        pure = np.diag([1.0, 0.0])
        assert linalg.uhlmann_fidelity_matrices(rho, pure) == pytest.approx(
            math.sqrt(0.5), abs=1e-10)

    def test_orthogonal_supports(self):
        assert linalg.uhlmann_fidelity_matrices(
            np.diag([1.0, 0.0]), np.diag([0.0, 1.0])) == pytest.approx(0.0, abs=1e-10)

    def test_symmetry_and_range(self):
        rng = np.random.default_rng(19)
        for _ in range(10):
            a = random_psd(rng, 6)
            b = random_psd(rng, 6)
            fab = linalg.uhlmann_fidelity_matrices(a, b)
            fba = linalg.uhlmann_fidelity_matrices(b, a)
            assert fab == pytest.approx(fba, abs=1e-9)
            assert -1e-9 <= fab <= 1.0 + 1e-8

    def test_rejects_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            linalg.uhlmann_fidelity_matrices(np.eye(2) / 2, np.eye(4) / 4)
