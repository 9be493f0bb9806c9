import math
from fractions import Fraction

import numpy as np
import pytest

from fermicomp import states, typicality
from fermicomp.errors import DenseCapExceeded, NotNormalized
from oracles import binary_best_rank_mass_exact, binary_mass_exact, brute_force_binary


def binary_state(p0=0.9):
    return states.new_state(np.diag([p0, 1 - p0]), 1)


def binary_source(p0=0.9):
    return typicality.spectral_source(binary_state(p0))


class TestSpectralSource:
    def test_uniform(self):
        src = typicality.spectral_source(states.new_state(np.eye(2) / 2, 1))
        assert src.probabilities == (0.5, 0.5)
        assert src.parities == (0, 1)

    def test_biased(self):
        src = binary_source()
        assert src.probabilities == pytest.approx((0.9, 0.1))
        assert src.parities == (0, 1)
        assert src.entropy == pytest.approx(0.4689955935892812, abs=1e-12)

    def test_pure_bell(self):
        v = np.zeros(4, dtype=complex)
        v[0] = v[3] = 2**-0.5
        src = typicality.spectral_source(states.pure_state(v, 2))
        assert len(src.probabilities) == 1
        assert src.probabilities[0] == pytest.approx(1.0)
        assert src.parities == (0,)

    def test_requires_normalization(self):
        with pytest.raises(NotNormalized):
            typicality.spectral_source(states.new_state(np.diag([0.5, 0.1]), 1))


class TestIsTypical:
    def test_uniform_always_typical(self):
        src = typicality.spectral_source(states.new_state(np.eye(2) / 2, 1))
        spec = typicality.make_spec(src, 6, 0.01)
        assert all(typicality.is_typical(tc, spec)
                   for tc in typicality.iter_type_classes(src, 6))

    def test_pure_source_single_type(self):
        src = typicality.spectral_source(states.vacuum_state(1))
        spec = typicality.make_spec(src, 5, 0.1)
        classes = list(typicality.iter_type_classes(src, 5))
        assert len(classes) == 1
        assert typicality.is_typical(classes[0], spec)

    def test_balanced_half_split_not_typical(self):
        # -(1/10) log2(0.9^5 0.1^5) ~ 1.737 versus S ~ 0.469
        src = binary_source()
        spec = typicality.make_spec(src, 10, 0.1)
        tc = next(t for t in typicality.iter_type_classes(src, 10) if t.counts == (5, 5))
        assert -tc.log_prob_per_seq / 10 == pytest.approx(1.736966, abs=1e-5)
        assert not typicality.is_typical(tc, spec)


class TestTypicalMass:
    def test_uniform(self):
        src = typicality.spectral_source(states.new_state(np.eye(2) / 2, 1))
        for copies in (1, 4, 9):
            assert typicality.typical_mass(
                src, typicality.make_spec(src, copies, 0.01)) == pytest.approx(1.0)

    def test_pure(self):
        src = typicality.spectral_source(states.vacuum_state(1))
        assert typicality.typical_mass(
            src, typicality.make_spec(src, 7, 0.05)) == pytest.approx(1.0)

    def test_against_enumeration(self):
        src = binary_source()
        copies = 20
        probs, ones = brute_force_binary(0.9, copies)
        for eps in (0.1, 0.2, 0.3):
            spec = typicality.make_spec(src, copies, eps)
            mask = np.abs(-np.log2(probs) / copies - src.entropy) <= eps
            assert typicality.typical_mass(src, spec) == pytest.approx(
                float(probs[mask].sum()), abs=1e-9)

    def test_against_exact_fractions(self):
        src = binary_source()
        for copies, eps in ((50, 0.05), (500, 0.05), (2000, 0.05), (2000, 0.1)):
            spec = typicality.make_spec(src, copies, eps)
            exact = float(binary_mass_exact(Fraction(9, 10), copies, eps))
            assert typicality.typical_mass(src, spec) == pytest.approx(exact, abs=1e-9)


class TestTypicalDim:
    def test_uniform(self):
        src = typicality.spectral_source(states.new_state(np.eye(2) / 2, 1))
        res = typicality.typical_dim(src, typicality.make_spec(src, 4, 0.05))
        assert res.log2_count == pytest.approx(4.0)
        assert res.exact_count == 16

    def test_pure(self):
        src = typicality.spectral_source(states.vacuum_state(1))
        res = typicality.typical_dim(src, typicality.make_spec(src, 5, 0.1))
        assert res.log2_count == pytest.approx(0.0)
        assert res.exact_count == 1

    def test_against_enumeration(self):
        src = binary_source()
        copies = 20
        probs, _ = brute_force_binary(0.9, copies)
        spec = typicality.make_spec(src, copies, 0.1)
        mask = np.abs(-np.log2(probs) / copies - src.entropy) <= 0.1
        res = typicality.typical_dim(src, spec)
        assert res.exact_count == int(mask.sum())
        assert res.log2_count == pytest.approx(math.log2(mask.sum()), abs=1e-9)


class TestBestRankMass:
    def test_uniform_full_budget(self):
        src = typicality.spectral_source(states.new_state(np.eye(2) / 2, 1))
        assert typicality.best_rank_mass(src, 2, 2.0) == 1.0

    def test_uniform_half_rate(self):
        src = typicality.spectral_source(states.new_state(np.eye(2) / 2, 1))
        assert typicality.best_rank_mass(src, 10, 5.0) == pytest.approx(2.0**-5, abs=1e-12)

    def test_top_eigenvalue(self):
        assert typicality.best_rank_mass(binary_source(), 2, 0.0) == pytest.approx(0.81)

    def test_fractional_class(self):
        exact = float(binary_best_rank_mass_exact(Fraction(9, 10), 2, 0.6))
        assert typicality.best_rank_mass(binary_source(), 2, 0.6) == pytest.approx(
            exact, abs=1e-12)
        assert exact == pytest.approx(0.81 + (2**0.6 - 1) * 0.09, abs=1e-12)

    def test_against_enumeration(self):
        src = binary_source()
        copies = 20
        probs, _ = brute_force_binary(0.9, copies)
        top64 = float(np.sort(probs)[::-1][:64].sum())
        assert typicality.best_rank_mass(src, copies, 6.0) == pytest.approx(top64, abs=1e-9)

    def test_against_exact_fractions_large(self):
        src = binary_source()
        for copies in (500, 1000, 2000):
            exact = float(binary_best_rank_mass_exact(Fraction(9, 10), copies, copies * 0.3))
            got = typicality.best_rank_mass(src, copies, copies * 0.3)
            assert got == pytest.approx(exact, rel=1e-9)


class TestDenseProjector:
    def test_uniform_two_copies_is_identity(self):
        src = typicality.spectral_source(states.new_state(np.eye(2) / 2, 1))
        rep = typicality.typical_projector_dense(src, typicality.make_spec(src, 2, 0.05))
        np.testing.assert_allclose(rep.projector, np.eye(4), atol=1e-12)

    def test_pure_three_copies_rank_one(self):
        src = typicality.spectral_source(states.vacuum_state(1))
        rep = typicality.typical_projector_dense(src, typicality.make_spec(src, 3, 0.05))
        assert rep.typical_sequences == 1
        assert np.linalg.matrix_rank(rep.projector) == 1

    def test_trace_against_mass_and_structure(self):
        rng = np.random.default_rng(73)
        rho = states.random_blocked_state(2, rng)
        rho = states.new_state(rho.matrix / rho.trace, 2)
        src = typicality.spectral_source(rho)
        spec = typicality.make_spec(src, 3, 0.8)
        rep = typicality.typical_projector_dense(src, spec)
        rho_n = np.array([[1.0 + 0j]])
        for _ in range(3):
            rho_n = np.kron(rho_n, rho.matrix)
        got = float(np.real(np.trace(rep.projector @ rho_n)))
        assert got == pytest.approx(typicality.typical_mass(src, spec), abs=1e-9)
        assert rep.idempotency_residual <= 1e-10
        assert rep.parity_residual <= 1e-10
        # projector commutes with the N-copy state
        comm = rep.projector @ rho_n - rho_n @ rep.projector
        assert np.max(np.abs(comm)) <= 1e-10

    def test_cap_enforced(self):
        src = binary_source()
        with pytest.raises(DenseCapExceeded):
            typicality.typical_projector_dense(src, typicality.make_spec(src, 11, 0.1))
        typicality.typical_projector_dense(
            src, typicality.make_spec(src, 8, 0.2), dense_cap=8)
        with pytest.raises(DenseCapExceeded):
            typicality.typical_projector_dense(
                src, typicality.make_spec(src, 8, 0.2), dense_cap=6)


class TestAsymptotics:
    def test_mass_reaches_any_level(self):
        src = binary_source()
        grid = list(range(50, 2001, 50))
        masses = {n: typicality.typical_mass(src, typicality.make_spec(src, n, 0.05))
                  for n in grid}
        for delta in (0.2, 0.1, 0.05):
            n0 = next((n for n in grid
                       if all(masses[m] >= 1 - delta for m in grid if m >= n)), None)
            assert n0 is not None, f"mass never stays above {1 - delta}"
        tail = [masses[n] for n in grid[-3:]]
        assert all(b >= a for a, b in zip(tail, tail[1:]))

    def test_best_rank_mass_decays_below_entropy(self):
        src = binary_source()
        rate = src.entropy - 0.15
        grid = list(range(50, 2001, 50))
        vals = [typicality.best_rank_mass(src, n, n * rate) for n in grid]
        assert all(b <= a for a, b in zip(vals, vals[1:]))
        assert vals[-1] <= 1e-9
