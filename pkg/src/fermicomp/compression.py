"""Typical-subspace compression schemes and their figures of merit.

The encoder measures {P, I-P} against the typical projector, replaces atypical
outcomes by a fixed standard sequence, and embeds the typical subspace into a
small register through a parity-preserving partial isometry V; the decoder is
the co-isometry V^dag completed to a channel. The target register gets
max(1, ceil(log2(2 * max(|T_even|, |T_odd|)))) modes: each parity sector of the
register must hold the typical sequences of that parity, and one extra bit of
headroom guarantees the parity-preserving embedding exists.

Fidelities have two routes: a spectral one (exact type-class sums, any N) and
a dense one (explicit Kraus channels, N*L small) used to cross-check it.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import typicality
from .channels import (
    FermionicChannel,
    closeness_upon_input,
    compose_sequential,
    entanglement_fidelity,
    identity_channel,
    new_channel,
    sample_refinements,
)
from .errors import DenseUnavailable, EmptyTypicalSet, RateNotBelowEntropy
from .fock import dim, parity_indices
from .states import FermionicState, new_state
from .typicality import (
    DEFAULT_DENSE_CAP,
    SpectralSource,
    TypicalSpec,
    best_rank_mass,
    is_typical,
    iter_type_classes,
    make_spec,
    spectral_source,
)


@dataclass(frozen=True)
class DenseScheme:
    encoder: FermionicChannel
    decoder: FermionicChannel
    isometry: np.ndarray
    projector: np.ndarray


@dataclass(frozen=True)
class CompressionScheme:
    copies: int
    epsilon: float
    source: SpectralSource
    target_modes: int
    rate: float
    typical_mass: float
    even_count: int  # |T_even|, exact
    odd_count: int   # |T_odd|, exact
    standard_sequence: tuple[int, ...]
    dense: DenseScheme | None

    @property
    def spec(self) -> TypicalSpec:
        return make_spec(self.source, self.copies, self.epsilon)


def _typical_parity_counts(source: SpectralSource, spec: TypicalSpec):
    even = odd = 0
    smallest = None
    for tc in iter_type_classes(source, spec.copies):
        if not is_typical(tc, spec):
            continue
        mult = typicality.multinomial_exact(spec.copies, tc.counts)
        if tc.parity(source.parities):
            odd += mult
        else:
            even += mult
        rep = _lex_smallest_of_class(tc.counts)
        if smallest is None or rep < smallest:
            smallest = rep
    return even, odd, smallest


def _lex_smallest_of_class(counts) -> tuple[int, ...]:
    seq = []
    for sym, k in enumerate(counts):
        seq.extend([sym] * k)
    return tuple(seq)


def target_modes_for(even_count: int, odd_count: int) -> int:
    biggest = max(even_count, odd_count, 1)
    return max(1, (2 * biggest - 1).bit_length())


def build_scheme(rho: FermionicState, copies: int, epsilon: float,
                 dense_cap: int = DEFAULT_DENSE_CAP) -> CompressionScheme:
    """Construct the scheme for N copies of the source at width epsilon.

    The standard sequence is the lexicographically smallest typical one. Dense
    encoder/decoder channels are materialized only when N*L fits the cap.
    """
    source = spectral_source(rho)
    spec = make_spec(source, copies, epsilon)
    even_count, odd_count, standard = _typical_parity_counts(source, spec)
    if standard is None:
        raise EmptyTypicalSet(
            f"no typical sequence at N={copies}, epsilon={epsilon}; increase either"
        )
    target = target_modes_for(even_count, odd_count)
    mass = typicality.typical_mass(source, spec)
    dense = None
    cap = min(dense_cap, typicality.MAX_DENSE_MODES)
    if source.modes is not None and source.modes * copies <= cap:
        dense = _build_dense(source, spec, target, standard)
    return CompressionScheme(
        copies=copies,
        epsilon=epsilon,
        source=source,
        target_modes=target,
        rate=target / copies,
        typical_mass=mass,
        even_count=even_count,
        odd_count=odd_count,
        standard_sequence=standard,
        dense=dense,
    )


def _build_dense(source: SpectralSource, spec: TypicalSpec, target: int,
                 standard: tuple[int, ...]) -> DenseScheme:
    copies = spec.copies
    big = dim(source.modes * copies)
    small = dim(target)
    even_slots, odd_slots = parity_indices(target)
    slots = {0: list(even_slots), 1: list(odd_slots)}
    used = {0: 0, 1: 0}
    used_fock = set()
    typical = list(typicality.typical_sequences(source, spec))
    v = np.zeros((small, big), dtype=complex)
    standard_fock = None
    # typical_sequences iterates lexicographically, so the per-parity Fock
    # assignment is the k-th lex sequence -> k-th lex Fock vector of its parity
    for seq in typical:
        par = sum(source.parities[s] for s in seq) & 1
        fock = slots[par][used[par]]
        used[par] += 1
        used_fock.add(fock)
        v[fock, :] = typicality.sequence_vector(source, seq).conj()
        if seq == standard:
            standard_fock = fock
    assert standard_fock is not None
    projector = v.conj().T @ v
    standard_vec = typicality.sequence_vector(source, standard)

    encoder_kraus = [v]
    target_basis = np.zeros(small, dtype=complex)
    target_basis[standard_fock] = 1.0
    # measure-and-prepare branch: atypical eigenbasis vectors collapse to the
    # standard sequence; typical ones give exactly-zero Kraus and are omitted.
    # The basis must include kernel eigenvectors or the channel is incomplete
    # for rank-deficient sources.
    if source.kernel_vectors is not None and source.kernel_vectors.shape[1]:
        full_basis = np.hstack([source.eigenvectors, source.kernel_vectors])
    else:
        full_basis = source.eigenvectors
    full_size = full_basis.shape[1]
    typical_set = frozenset(typical)
    for seq in itertools.product(range(full_size), repeat=copies):
        if seq in typical_set:
            continue
        e = np.array([1.0 + 0j])
        for sym in seq:
            e = np.kron(e, full_basis[:, sym])
        encoder_kraus.append(np.outer(target_basis, e.conj()))
    encoder = new_channel(encoder_kraus, source.modes * copies, target, deterministic=True)

    decoder_kraus = [v.conj().T]
    for fock in range(small):
        if fock in used_fock:
            continue
        row = np.zeros(small, dtype=complex)
        row[fock] = 1.0
        decoder_kraus.append(np.outer(standard_vec, row.conj()))
    decoder = new_channel(decoder_kraus, target, source.modes * copies, deterministic=True)
    return DenseScheme(encoder, decoder, v, projector)


def scheme_fidelity(scheme: CompressionScheme) -> float:
    """Entanglement fidelity of the scheme on the N-copy source state.

    Spectral path: the composed channel's Kraus reduce to {P} plus the
    replace branches, whose cross terms vanish, so F = typical_mass**2.
    """
    return scheme.typical_mass ** 2


def source_state(scheme: CompressionScheme) -> FermionicState:
    """N-copy source state rebuilt from the stored spectrum (dense path)."""
    src = scheme.source
    if src.eigenvectors is None:
        raise DenseUnavailable("source spectrum carries no eigenvectors")
    u = src.eigenvectors
    rho1 = (u * np.asarray(src.probabilities)) @ u.conj().T
    rho = np.array([[1.0 + 0j]])
    for _ in range(scheme.copies):
        rho = np.kron(rho, rho1)
    return new_state(rho, src.modes * scheme.copies)


def scheme_fidelity_dense(scheme: CompressionScheme) -> float:
    """Same fidelity through the explicit Kraus channels (dense matrix route)."""
    if scheme.dense is None:
        raise DenseUnavailable("scheme was built without the dense channels")
    composed = compose_sequential(scheme.dense.decoder, scheme.dense.encoder)
    return entanglement_fidelity(source_state(scheme), composed)


@dataclass(frozen=True)
class ConverseResult:
    copies: int
    rate: float
    best_mass: float  # max mass any projector of rank 2**(N R) captures
    fidelity_bound: float  # best_mass**2


def converse_scheme_fidelity(rho: FermionicState, copies: int, rate: float) -> ConverseResult:
    """Fidelity of the best rank-limited scheme at a rate below the entropy.

    ``best_mass`` certifies that ANY projector of rank at most 2**(N*rate)
    captures no more probability; the rank-limited analogue of the forward
    construction then has entanglement fidelity best_mass**2.
    """
    source = spectral_source(rho)
    entropy = source.entropy
    if not 0 < rate < entropy:
        raise RateNotBelowEntropy(
            f"rate {rate} is not inside (0, S={entropy:.6f})"
        )
    mass = best_rank_mass(source, copies, copies * rate)
    return ConverseResult(copies, rate, mass, mass * mass)


@dataclass(frozen=True)
class ReliabilityReport:
    delta: float
    epsilon_bound: float  # 2 sqrt(delta)
    closeness_values: tuple[float, ...]
    bound_satisfied: bool
    seed: int


def reliability_report(scheme: CompressionScheme, family_count: int, seed: int,
                       refinements_per_family: int = 2,
                       kept_modes: int | None = None) -> ReliabilityReport:
    """Check the reliability bound on sampled refinement families.

    delta = 1 - F implies closeness-upon-input of the compression map and the
    identity at most 2 sqrt(delta); each family is drawn with its own seed.
    """
    if scheme.dense is None:
        raise DenseUnavailable("reliability needs the dense channels (N*L within cap)")
    rho_n = source_state(scheme)
    if kept_modes is None:
        kept_modes = 1 if rho_n.modes <= 9 else 0
    composed = compose_sequential(scheme.dense.decoder, scheme.dense.encoder)
    ident = identity_channel(rho_n.modes)
    delta = max(0.0, 1.0 - scheme_fidelity(scheme))
    bound = 2.0 * math.sqrt(delta)
    values = []
    for fam in range(family_count):
        family = sample_refinements(
            rho_n, refinements_per_family, seed + fam, kept_modes=kept_modes
        )
        values.append(closeness_upon_input(composed, ident, family).value)
    ok = all(v <= bound + 1e-9 for v in values)
    return ReliabilityReport(delta, bound, tuple(values), ok, seed)
