"""Invariant suites behind the `selftest` command and endpoint.

Each suite re-checks one family of package-level guarantees end to end and
reports a worst-case figure. Everything is seeded; dense suites respect the
requested mode cap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import typicality
from .channels import (
    apply,
    closeness_upon_input,
    compose_sequential,
    connect_purifications,
    entanglement_fidelity,
    extend,
    identity_channel,
    parallel_compose,
    parity_channel,
    random_channel,
    random_even_unitary,
    sample_refinements,
)
from .compression import build_scheme, scheme_fidelity, scheme_fidelity_dense, source_state
from .errors import FermionicError, NotPSD, ParityViolation
from .fock import (
    ModeOrdering,
    dim,
    jw_field,
    parity_indices,
    reorder_unitary,
    vacuum_vector,
    validate_car,
)
from .linalg import trace_norm
from .states import (
    Purification,
    entropy,
    fidelity,
    minimal_purification,
    new_state,
    partial_trace,
    pure_state,
    random_blocked_state,
    trace_distance,
)

SMALL_N_EPSILON = 0.35  # keeps the typical set of diag(0.9, 0.1) nonempty for N >= 2


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    detail: str


def _result(name, passed, detail) -> SuiteResult:
    return SuiteResult(name, bool(passed), detail)


def suite_car(dense_cap: int, seed: int) -> SuiteResult:
    worst = 0.0
    top = min(8, max(2, dense_cap))
    for modes in range(1, top + 1):
        worst = max(worst, validate_car(modes).max_deviation)
    return _result("car", worst <= 1e-12, f"max anticommutator deviation {worst:.2e} (L<={top})")


def suite_parity_grading(dense_cap: int, seed: int) -> SuiteResult:
    worst = 0.0
    for modes in range(1, min(6, dense_cap) + 1):
        even, odd = parity_indices(modes)
        for i in range(1, modes + 1):
            f = jw_field(i, modes)
            keep = np.abs(f[np.ix_(even, even)]).max() + np.abs(f[np.ix_(odd, odd)]).max()
            worst = max(worst, float(keep), float(np.abs(f @ f).max()))
    return _result("parity-grading", worst <= 1e-12,
                   f"fields block-antidiagonal and nilpotent to {worst:.2e}")


def suite_state_guard(dense_cap: int, seed: int) -> SuiteResult:
    plus = np.full((2, 2), 0.5, dtype=complex)
    try:
        new_state(plus, 1)
        return _result("state-validation-guard", False, "parity violation not rejected")
    except ParityViolation:
        pass
    except FermionicError as err:
        return _result("state-validation-guard", False, f"wrong rejection {type(err).__name__}")
    try:
        new_state(np.diag([1.0, -0.5]), 1)
        return _result("state-validation-guard", False, "negative state not rejected")
    except NotPSD:
        return _result("state-validation-guard", True,
                       "ParityViolation and NotPSD raised as expected")


def suite_parity_counterexample(dense_cap: int, seed: int) -> SuiteResult:
    channel = parity_channel(1)
    worst_local = 0.0
    for q in np.linspace(0.0, 1.0, 21):
        rho = new_state(np.diag([q, 1.0 - q]), 1)
        worst_local = max(worst_local, trace_norm(apply(channel, rho).matrix - rho.matrix))
    bell = np.zeros(4, dtype=complex)
    bell[0] = bell[3] = 2 ** -0.5
    psi = pure_state(bell, 2)
    extended = parallel_compose(channel, identity_channel(1))
    dist = trace_norm(apply(extended, psi).matrix - psi.matrix)
    ent = entanglement_fidelity(new_state(np.eye(2) / 2, 1), channel)
    ok = worst_local <= 1e-12 and abs(dist - 1.0) <= 1e-9 and abs(ent - 0.5) <= 1e-9
    return _result("parity-counterexample", ok,
                   f"local residual {worst_local:.2e}, extended distance {dist:.9f}, "
                   f"entanglement fidelity {ent:.9f}")


def suite_fuchs_van_de_graaf(dense_cap: int, seed: int) -> SuiteResult:
    rng = np.random.default_rng(seed)
    worst = -1.0
    for _ in range(50):
        modes = int(rng.integers(1, 4))
        a = random_blocked_state(modes, rng)
        b = random_blocked_state(modes, rng)
        f = fidelity(a, b)
        d = trace_distance(a, b)
        worst = max(worst, (1.0 - f) - d, d - math.sqrt(max(0.0, 1.0 - f * f)))
    return _result("fuchs-van-de-graaf", worst <= 1e-9, f"worst bound violation {worst:.2e}")


def suite_ordering_independence(dense_cap: int, seed: int) -> SuiteResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(6):
        modes = int(rng.integers(2, 5))
        rho = random_blocked_state(modes, rng)
        sigma = random_blocked_state(modes, rng)
        base = (entropy(rho), fidelity(rho, sigma), trace_distance(rho, sigma))
        for _ in range(4):
            perm = tuple(int(x) for x in rng.permutation(modes) + 1)
            u = reorder_unitary(ModeOrdering(modes), ModeOrdering(modes, perm))
            rho2 = new_state(u @ rho.matrix @ u.conj().T, modes)
            sigma2 = new_state(u @ sigma.matrix @ u.conj().T, modes)
            now = (entropy(rho2), fidelity(rho2, sigma2), trace_distance(rho2, sigma2))
            worst = max(worst, max(abs(x - y) for x, y in zip(base, now)))
    return _result("ordering-independence", worst <= 1e-9, f"worst drift {worst:.2e}")


def suite_oracle_equivalence(dense_cap: int, seed: int) -> SuiteResult:
    rho = new_state(np.diag([0.9, 0.1]), 1)
    src = typicality.spectral_source(rho)
    copies, eps = 16, 0.2
    spec = typicality.make_spec(src, copies, eps)
    # brute force over all 2**N sequences
    ones = np.bitwise_count(np.arange(1 << copies, dtype=np.uint64)).astype(int)
    probs = 0.9 ** (copies - ones) * 0.1 ** ones
    rate = -np.log2(probs) / copies
    mask = np.abs(rate - src.entropy) <= eps
    gap_mass = abs(typicality.typical_mass(src, spec) - float(probs[mask].sum()))
    dimres = typicality.typical_dim(src, spec)
    gap_dim = abs(dimres.exact_count - int(mask.sum()))
    top = np.sort(probs)[::-1][: 1 << 6]
    gap_rank = abs(typicality.best_rank_mass(src, copies, 6.0) - float(top.sum()))
    n_dense = min(6, dense_cap)
    scheme = build_scheme(rho, n_dense, SMALL_N_EPSILON, dense_cap=dense_cap)
    gap_dense = abs(scheme_fidelity(scheme) - scheme_fidelity_dense(scheme))
    ok = gap_mass <= 1e-9 and gap_dim == 0 and gap_rank <= 1e-9 and gap_dense <= 1e-8
    return _result("oracle-equivalence", ok,
                   f"mass gap {gap_mass:.2e}, dim gap {gap_dim}, rank gap {gap_rank:.2e}, "
                   f"dense fidelity gap {gap_dense:.2e}")


def suite_prop3_bounds(dense_cap: int, seed: int) -> SuiteResult:
    rho = new_state(np.diag([0.9, 0.1]), 1)
    src = typicality.spectral_source(rho)
    s = src.entropy
    violations = 0
    checked = 0
    for eps in (0.05, 0.1):
        for copies in range(50, 2001, 50):
            spec = typicality.make_spec(src, copies, eps)
            mass = typicality.typical_mass(src, spec)
            log_dim = typicality.typical_dim(src, spec).log2_count
            upper = copies * (s + eps)
            if log_dim > upper + 1e-9:
                violations += 1
            if mass > 0:
                lower = math.log2(mass) + copies * (s - eps)
                if log_dim < lower - 1e-9:
                    violations += 1
            checked += 1
    return _result("prop3-bounds", violations == 0,
                   f"{checked} grid points, {violations} violations")


def suite_purification(dense_cap: int, seed: int) -> SuiteResult:
    rng = np.random.default_rng(seed)
    worst_marginal = 0.0
    worst_connect = 0.0
    for _ in range(8):
        modes = int(rng.integers(1, 3))
        rho = random_blocked_state(modes, rng)
        pur = minimal_purification(rho)
        back = partial_trace(pur.state, range(modes + 1, pur.total_modes + 1))
        worst_marginal = max(worst_marginal, trace_norm(back.matrix - rho.matrix))
        other = _scrambled_purification(pur, rng, pad=int(rng.integers(0, 2)))
        chan = connect_purifications(pur, other)
        moved = apply(extend(chan, modes, side="before"), pur.state)
        worst_connect = max(worst_connect, trace_norm(moved.matrix - other.state.matrix))
    ok = worst_marginal <= 1e-9 and worst_connect <= 1e-7
    return _result("purification", ok,
                   f"worst marginal error {worst_marginal:.2e}, "
                   f"worst connection error {worst_connect:.2e}")


def _scrambled_purification(pur, rng, pad=0):
    vec, purifier = pur.vector, pur.purifier_modes
    if pad:
        vec = np.kron(vec, vacuum_vector(pad))
        purifier += pad
    w = random_even_unitary(purifier, rng)
    vec = (vec.reshape(dim(pur.system_modes), dim(purifier)) @ w.T).reshape(-1)
    return Purification(pure_state(vec, pur.system_modes + purifier),
                        pur.system_modes, purifier, pur.marginal, vec)


def suite_reliability(dense_cap: int, seed: int) -> SuiteResult:
    rho = new_state(np.diag([0.9, 0.1]), 1)
    copies = min(6, dense_cap)
    scheme = build_scheme(rho, copies, SMALL_N_EPSILON, dense_cap=dense_cap)
    composed = compose_sequential(scheme.dense.decoder, scheme.dense.encoder)
    delta = 1.0 - scheme_fidelity(scheme)
    bound = 2.0 * math.sqrt(max(0.0, delta))
    ident = identity_channel(source_state(scheme).modes)
    worst = 0.0
    for fam in range(2):
        family = sample_refinements(source_state(scheme), 2, seed + fam, kept_modes=1)
        worst = max(worst, closeness_upon_input(composed, ident, family).value)
    return _result("reliability", worst <= bound + 1e-9,
                   f"worst closeness {worst:.6f} vs bound {bound:.6f}")


ALL_SUITES = (
    suite_car,
    suite_parity_grading,
    suite_state_guard,
    suite_parity_counterexample,
    suite_fuchs_van_de_graaf,
    suite_ordering_independence,
    suite_oracle_equivalence,
    suite_prop3_bounds,
    suite_purification,
    suite_reliability,
)


def run_selftest(dense_cap: int = 10, seed: int = 0) -> list[SuiteResult]:
    return [suite(dense_cap, seed) for suite in ALL_SUITES]
