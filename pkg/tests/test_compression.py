import math
from fractions import Fraction

import numpy as np
import pytest

from fermicomp import channels, compression, linalg, states, typicality
from fermicomp.errors import (
    DenseUnavailable,
    EmptyTypicalSet,
    RateNotBelowEntropy,
)
from oracles import (
    binary_best_rank_mass_exact,
    binary_mass_exact,
    binary_parity_counts,
    brute_force_binary,
    modes_needed,
)

# frozen from the exact big-integer/Fraction oracle (see oracles.py)
GOLDEN = {
    "mass_2000": 0.981171844605864,
    "fid_2000": 0.962698188647274,
    "rate_2000": 0.5145,
    "mass_200": 0.590820046652837,
    "fid_200": 0.349068327526861,
    "converse_500": 3.155381567282867e-08,
    "converse_1000": 1.222485985186664e-14,
    "converse_2000": 1.998649023545917e-27,
}


def binary_state(p0=0.9):
    return states.new_state(np.diag([p0, 1 - p0]), 1)


def uniform_state():
    return states.new_state(np.eye(2) / 2, 1)


class TestBuildScheme:
    def test_uniform_two_copies(self):
        scheme = compression.build_scheme(uniform_state(), 2, 0.1)
        assert (scheme.even_count, scheme.odd_count) == (2, 2)
        assert scheme.target_modes == 2
        assert scheme.rate == pytest.approx(1.0)
        assert scheme.typical_mass == pytest.approx(1.0)

    def test_pure_state(self):
        for copies in (1, 3, 6):
            scheme = compression.build_scheme(states.vacuum_state(1), copies, 0.1)
            assert (scheme.even_count, scheme.odd_count) == (1, 0)
            assert scheme.target_modes == 1
            assert scheme.rate == pytest.approx(1 / copies)

    def test_counts_against_enumeration(self):
        scheme = compression.build_scheme(binary_state(), 8, 0.2)
        even, odd = binary_parity_counts(Fraction(9, 10), 8, 0.2)
        assert (scheme.even_count, scheme.odd_count) == (even, odd)
        assert scheme.target_modes == modes_needed(even, odd) == 4
        assert scheme.standard_sequence == (0, 0, 0, 0, 0, 0, 0, 1)

    def test_empty_typical_set(self):
        with pytest.raises(EmptyTypicalSet):
            compression.build_scheme(binary_state(), 2, 0.05)

    def test_isometry_structure(self):
        scheme = compression.build_scheme(binary_state(), 8, 0.2)
        v = scheme.dense.isometry
        p = scheme.dense.projector
        assert np.max(np.abs(v.conj().T @ v - p)) <= 1e-10
        vvd = v @ v.conj().T
        assert np.max(np.abs(vvd @ vvd - vvd)) <= 1e-10
        # independent construction of the typical projector agrees
        rep = typicality.typical_projector_dense(scheme.source, scheme.spec)
        assert np.max(np.abs(rep.projector - p)) <= 1e-10

    def test_channels_are_valid_and_parity_definite(self):
        scheme = compression.build_scheme(binary_state(), 6, 0.35)
        for chan in (scheme.dense.encoder, scheme.dense.decoder):
            assert chan.deterministic
            total = sum(k.matrix.conj().T @ k.matrix for k in chan.kraus)
            assert linalg.trace_norm(total - np.eye(total.shape[0])) <= 1e-9

    def test_dense_cap_skips_channels(self):
        scheme = compression.build_scheme(binary_state(), 12, 0.1)
        assert scheme.dense is None
        with pytest.raises(DenseUnavailable):
            compression.scheme_fidelity_dense(scheme)


class TestSchemeFidelity:
    def test_uniform_is_perfect(self):
        for copies in (2, 4):
            scheme = compression.build_scheme(uniform_state(), copies, 0.1)
            assert compression.scheme_fidelity(scheme) == pytest.approx(1.0)
            assert compression.scheme_fidelity_dense(scheme) == pytest.approx(1.0, abs=1e-9)

    def test_dense_equals_spectral(self):
        for copies, eps in ((4, 0.35), (6, 0.35), (8, 0.2)):
            scheme = compression.build_scheme(binary_state(), copies, eps)
            spectral = compression.scheme_fidelity(scheme)
            dense = compression.scheme_fidelity_dense(scheme)
            assert spectral == pytest.approx(scheme.typical_mass**2, abs=1e-15)
            assert dense == pytest.approx(spectral, abs=1e-8)

    def test_dense_equals_spectral_two_mode_source(self):
        rng = np.random.default_rng(79)
        rho = states.random_blocked_state(2, rng)
        rho = states.new_state(rho.matrix / rho.trace, 2)
        for copies, eps in ((2, 0.8), (3, 0.8)):
            scheme = compression.build_scheme(rho, copies, eps)
            assert 0 < scheme.typical_mass < 1
            assert compression.scheme_fidelity_dense(scheme) == pytest.approx(
                compression.scheme_fidelity(scheme), abs=1e-8)

    def test_golden_large_n(self):
        sch = compression.build_scheme(binary_state(), 2000, 0.05)
        assert sch.typical_mass == pytest.approx(GOLDEN["mass_2000"], abs=1e-9)
        assert compression.scheme_fidelity(sch) == pytest.approx(GOLDEN["fid_2000"], abs=1e-9)
        assert sch.rate == pytest.approx(GOLDEN["rate_2000"], abs=1e-12)

    def test_rate_approaches_entropy_within_margin(self):
        src_entropy = typicality.spectral_source(binary_state()).entropy
        eps = 0.05
        for copies in (500, 1000, 2000):
            scheme = compression.build_scheme(binary_state(), copies, eps)
            assert src_entropy - 2 * eps <= scheme.rate <= src_entropy + 2 * eps


class TestConverse:
    def test_hand_value_small(self):
        res = compression.converse_scheme_fidelity(binary_state(), 2, 0.3)
        exact = float(binary_best_rank_mass_exact(Fraction(9, 10), 2, 2 * 0.3))
        assert res.best_mass == pytest.approx(exact, abs=1e-12)
        assert res.fidelity_bound == pytest.approx(exact**2, abs=1e-12)

    def test_uniform(self):
        res = compression.converse_scheme_fidelity(uniform_state(), 10, 0.5)
        assert res.best_mass == pytest.approx(2.0**-5, abs=1e-12)
        assert res.fidelity_bound == pytest.approx(2.0**-10, abs=1e-12)

    def test_goldens(self):
        for copies in (500, 1000, 2000):
            res = compression.converse_scheme_fidelity(binary_state(), copies, 0.3)
            assert res.fidelity_bound == pytest.approx(
                GOLDEN[f"converse_{copies}"], rel=1e-9)

    def test_rate_guard(self):
        with pytest.raises(RateNotBelowEntropy):
            compression.converse_scheme_fidelity(binary_state(), 10, 0.5)
        with pytest.raises(RateNotBelowEntropy):
            compression.converse_scheme_fidelity(binary_state(), 10, -0.1)

    def test_monotone_decay(self):
        vals = [compression.converse_scheme_fidelity(binary_state(), n, 0.3).fidelity_bound
                for n in (500, 1000, 2000)]
        assert vals[0] > vals[1] > vals[2]
        assert vals[2] <= 0.01


class TestReliability:
    def test_uniform_perfect(self):
        scheme = compression.build_scheme(uniform_state(), 2, 0.1)
        rep = compression.reliability_report(scheme, 2, seed=3)
        assert rep.delta == pytest.approx(0.0, abs=1e-12)
        assert all(v <= 1e-9 for v in rep.closeness_values)
        assert rep.bound_satisfied

    def test_pure_source_perfect(self):
        scheme = compression.build_scheme(states.vacuum_state(1), 3, 0.1)
        rep = compression.reliability_report(scheme, 2, seed=5)
        assert rep.delta == pytest.approx(0.0, abs=1e-12)
        assert rep.bound_satisfied

    def test_biased_source_bound(self):
        scheme = compression.build_scheme(binary_state(), 6, 0.35)
        rep = compression.reliability_report(scheme, 3, seed=11)
        assert rep.epsilon_bound == pytest.approx(
            2 * math.sqrt(1 - compression.scheme_fidelity(scheme)), abs=1e-12)
        assert rep.bound_satisfied
        assert max(rep.closeness_values) > 0.01  # genuinely lossy scheme

    def test_eight_copies_five_families(self):
        # the heavyweight configuration: five seeded families at N = 8
        scheme = compression.build_scheme(binary_state(), 8, 0.2)
        rep = compression.reliability_report(scheme, 5, seed=7, kept_modes=0)
        assert len(rep.closeness_values) == 5
        assert rep.bound_satisfied
        assert all(0.01 < v <= rep.epsilon_bound for v in rep.closeness_values)

    def test_requires_dense(self):
        scheme = compression.build_scheme(binary_state(), 12, 0.1)
        with pytest.raises(DenseUnavailable):
            compression.reliability_report(scheme, 1, seed=0)


class TestEnumerationCrossCheck:
    def test_fidelity_matches_enumeration(self):
        copies = 20
        probs, _ = brute_force_binary(0.9, copies)
        src = typicality.spectral_source(binary_state())
        for eps in (0.2, 0.3):
            scheme = compression.build_scheme(binary_state(), copies, eps)
            mask = np.abs(-np.log2(probs) / copies - src.entropy) <= eps
            mass = float(probs[mask].sum())
            assert compression.scheme_fidelity(scheme) == pytest.approx(
                mass**2, abs=1e-9)
