"""Typical-subspace computations on the spectrum of a state.

Per-sequence probability and typicality depend only on the symbol counts, so
every quantity here is an exact sum over type classes — at most
C(N+m-1, m-1) of them for an m-letter spectrum — instead of m**N sequences.
Probabilities are handled in log2 space throughout (they reach 2**-1000 and
below on the sweeps this package is meant for); multinomials go through
log-gamma. A dense projector path exists for small N*L and is cross-checked
against the spectral path by the test suite.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import DenseCapExceeded, NotNormalized
from .fock import dim
from .states import FermionicState, blocked_eigh, parity_residual

ZERO_EIGENVALUE_TOL = 1e-12
DEFAULT_DENSE_CAP = 10
MAX_DENSE_MODES = 10  # dimension 2**10, the dense-kernel ceiling
MAX_TYPE_CLASSES = 50_000_000
LN2 = math.log(2.0)


@dataclass(frozen=True)
class SpectralSource:
    """Spectrum of a normalized state: descending probabilities with parity
    labels, plus the eigenvectors when a dense path is wanted.

    Zero eigenvalues are excluded from the alphabet (they occur in no emitted
    sequence) but their eigenvectors are kept aside: dense channel
    constructions need a complete basis of the N-copy space."""

    probabilities: tuple[float, ...]
    parities: tuple[int, ...]
    eigenvectors: np.ndarray | None = None
    modes: int | None = None
    kernel_vectors: np.ndarray | None = None
    kernel_parities: tuple[int, ...] = ()

    @property
    def alphabet_size(self) -> int:
        return len(self.probabilities)

    @property
    def entropy(self) -> float:
        return float(-sum(p * math.log2(p) for p in self.probabilities if p > 0))

    @property
    def log2_probabilities(self) -> tuple[float, ...]:
        return tuple(math.log2(p) for p in self.probabilities)


def spectral_source(rho: FermionicState) -> SpectralSource:
    """Extract the parity-labelled spectrum; zero eigenvalues are dropped
    (they cannot occur in any emitted sequence)."""
    if not rho.is_normalized():
        raise NotNormalized(f"source state has trace {rho.trace:.12f}")
    w, u, parities = blocked_eigh(rho.matrix, rho.modes)
    keep = w > ZERO_EIGENVALUE_TOL
    return SpectralSource(
        probabilities=tuple(float(x) for x in w[keep]),
        parities=tuple(int(p) for p in parities[keep]),
        eigenvectors=u[:, keep],
        modes=rho.modes,
        kernel_vectors=u[:, ~keep],
        kernel_parities=tuple(int(p) for p in parities[~keep]),
    )


@dataclass(frozen=True)
class TypicalSpec:
    copies: int
    epsilon: float
    entropy: float

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.copies < 1:
            raise ValueError("need at least one copy")


def make_spec(source: SpectralSource, copies: int, epsilon: float) -> TypicalSpec:
    return TypicalSpec(copies, epsilon, source.entropy)


@dataclass(frozen=True)
class TypeClass:
    counts: tuple[int, ...]
    log_prob_per_seq: float  # log2 of one sequence's probability
    log_multiplicity: float  # log2 of the multinomial coefficient

    def parity(self, parities) -> int:
        return sum(k for k, p in zip(self.counts, parities) if p) & 1


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def class_count(copies: int, alphabet: int) -> int:
    return math.comb(copies + alphabet - 1, alphabet - 1)


def iter_type_classes(source: SpectralSource, copies: int):
    """All type classes of length-``copies`` sequences over the source alphabet."""
    m = source.alphabet_size
    if class_count(copies, m) > MAX_TYPE_CLASSES:
        raise ValueError(
            f"{class_count(copies, m)} type classes exceed the supported budget; "
            "reduce N or the alphabet size"
        )
    logp = source.log2_probabilities
    lg_n = math.lgamma(copies + 1)
    for counts in _compositions(copies, m):
        log_mult = (lg_n - sum(math.lgamma(k + 1) for k in counts)) / LN2
        log_prob = sum(k * lp for k, lp in zip(counts, logp))
        yield TypeClass(counts, log_prob, log_mult)


def is_typical(tc: TypeClass, spec: TypicalSpec) -> bool:
    """|-(1/N) log2 P - S| <= epsilon; zero-probability sequences never qualify."""
    if not math.isfinite(tc.log_prob_per_seq):
        return False
    return abs(-tc.log_prob_per_seq / spec.copies - spec.entropy) <= spec.epsilon


def _logsumexp2(values) -> float:
    values = [v for v in values if v != -math.inf]
    if not values:
        return -math.inf
    top = max(values)
    return top + math.log2(sum(2.0 ** (v - top) for v in values))


def typical_mass(source: SpectralSource, spec: TypicalSpec) -> float:
    """Probability that an emitted sequence is typical (= Tr[P rho^(x)N])."""
    total = _logsumexp2(
        tc.log_multiplicity + tc.log_prob_per_seq
        for tc in iter_type_classes(source, spec.copies)
        if is_typical(tc, spec)
    )
    if total == -math.inf:
        return 0.0
    return min(1.0, 2.0 ** total)  # clip accumulation noise above certainty


@dataclass(frozen=True)
class TypicalDim:
    log2_count: float  # -inf when the typical set is empty
    exact_count: int | None  # big-int count when cheaply available


def typical_dim(source: SpectralSource, spec: TypicalSpec) -> TypicalDim:
    """Dimension of the typical subspace, in log2 and (when cheap) exactly."""
    log_counts = []
    want_exact = class_count(spec.copies, source.alphabet_size) <= 100_000
    exact = 0 if want_exact else None
    for tc in iter_type_classes(source, spec.copies):
        if not is_typical(tc, spec):
            continue
        log_counts.append(tc.log_multiplicity)
        if want_exact:
            exact += multinomial_exact(spec.copies, tc.counts)
    return TypicalDim(_logsumexp2(log_counts), exact)


def multinomial_exact(total: int, counts) -> int:
    out, left = 1, total
    for k in counts:
        out *= math.comb(left, k)
        left -= k
    return out


def best_rank_mass(source: SpectralSource, copies: int, log2_rank: float) -> float:
    """Largest probability mass any projector of rank <= 2**log2_rank captures
    on the N-copy state: the sum of that many largest eigenvalues.

    Classes are taken in order of per-sequence probability; the final class
    may contribute fractionally. Everything is accumulated in log2 space.
    """
    if log2_rank < 0:
        raise ValueError("log2_rank must be nonnegative")
    m = source.alphabet_size
    if log2_rank >= copies * math.log2(m) - 1e-12:
        return 1.0
    classes = sorted(
        iter_type_classes(source, copies),
        key=lambda tc: (-tc.log_prob_per_seq, tc.counts),
    )
    cum = -math.inf  # log2 of sequences taken so far
    terms = []
    for tc in classes:
        new_cum = _log2_add(cum, tc.log_multiplicity)
        if new_cum <= log2_rank:
            terms.append(tc.log_multiplicity + tc.log_prob_per_seq)
            cum = new_cum
            if cum == log2_rank:
                break
        else:
            remaining = _log2_sub(log2_rank, cum)
            if remaining != -math.inf:
                terms.append(remaining + tc.log_prob_per_seq)
            break
    total = _logsumexp2(terms)
    if total == -math.inf:
        return 0.0
    return min(1.0, 2.0 ** total)


def _log2_add(a: float, b: float) -> float:
    if a == -math.inf:
        return b
    if b == -math.inf:
        return a
    hi, lo = (a, b) if a >= b else (b, a)
    return hi + math.log2(1.0 + 2.0 ** (lo - hi))


def _log2_sub(a: float, b: float) -> float:
    """log2(2**a - 2**b) for a >= b."""
    if b == -math.inf:
        return a
    diff = 1.0 - 2.0 ** (b - a)
    if diff <= 0.0:
        return -math.inf
    return a + math.log2(diff)


@dataclass(frozen=True)
class DenseProjectorReport:
    projector: np.ndarray
    typical_sequences: int
    parity_residual: float
    idempotency_residual: float


def sequence_vector(source: SpectralSource, seq) -> np.ndarray:
    vec = np.array([1.0 + 0j])
    for sym in seq:
        vec = np.kron(vec, source.eigenvectors[:, sym])
    return vec


def typical_sequences(source: SpectralSource, spec: TypicalSpec):
    """Lexicographic iterator over typical symbol sequences (dense path only)."""
    typical_counts = {
        tc.counts for tc in iter_type_classes(source, spec.copies) if is_typical(tc, spec)
    }
    m = source.alphabet_size
    for seq in itertools.product(range(m), repeat=spec.copies):
        counts = tuple(seq.count(s) for s in range(m))
        if counts in typical_counts:
            yield seq


def typical_projector_dense(source: SpectralSource, spec: TypicalSpec,
                            dense_cap: int = DEFAULT_DENSE_CAP) -> DenseProjectorReport:
    """P = sum over typical sequences of the N-fold eigenvector projectors.

    The projector is even-parity blocked: each factor projects onto a
    definite-parity eigenvector, so every term is an even operator.
    """
    if source.eigenvectors is None or source.modes is None:
        raise DenseCapExceeded("source carries no eigenvectors; dense path unavailable")
    cap = min(dense_cap, MAX_DENSE_MODES)
    total_modes = source.modes * spec.copies
    if total_modes > cap:
        raise DenseCapExceeded(
            f"dense projector needs N*L <= {cap}, got {total_modes}"
        )
    d = dim(total_modes)
    cols = [sequence_vector(source, seq) for seq in typical_sequences(source, spec)]
    if cols:
        v = np.array(cols).T
        p = v @ v.conj().T
    else:
        p = np.zeros((d, d), dtype=complex)
    return DenseProjectorReport(
        projector=p,
        typical_sequences=len(cols),
        parity_residual=parity_residual(p, total_modes),
        idempotency_residual=float(np.max(np.abs(p @ p - p))),
    )
