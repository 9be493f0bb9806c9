"""Parity-superselected fermionic states.

A state is stored as its Jordan-Wigner representative under the canonical
ordering (mode 1 = most significant bit). Validity means: hermitian PSD up to
the clipping tolerance, block-diagonal across the even/odd Fock sectors, and
trace at most one. Sub-normalized states are allowed; they show up as the
outputs of non-deterministic transformations and as refinements.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import (
    DimensionMismatch,
    EmptyComplement,
    InvalidState,
    NotNormalized,
    NotPSD,
    ParityViolation,
    TraceTooLarge,
)
from .fock import ModeOrdering, dim, parity_indices, reorder_unitary

PARITY_TOL = 1e-10
TRACE_TOL = 1e-10
NORMALIZATION_TOL = 1e-9
RANK_TOL = 1e-10


@dataclass(frozen=True)
class FermionicState:
    """Validated parity-blocked density matrix on ``modes`` modes."""

    modes: int
    matrix: np.ndarray

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix)))

    @property
    def dim(self) -> int:
        return dim(self.modes)

    def is_normalized(self, tol: float = NORMALIZATION_TOL) -> bool:
        return abs(self.trace - 1.0) <= tol


def parity_residual(matrix: np.ndarray, modes: int) -> float:
    """||P0 M P1||_1 + ||P1 M P0||_1 with P0/P1 the parity-sector projectors."""
    even, odd = parity_indices(modes)
    upper = matrix[np.ix_(even, odd)]
    lower = matrix[np.ix_(odd, even)]
    return linalg.singular_value_sum(upper) + linalg.singular_value_sum(lower)


def validation_report(matrix, modes: int) -> dict:
    """Diagnostics used by the loader and the service: parity residual,
    minimum eigenvalue, hermiticity deviation, trace."""
    m = linalg.as_matrix(matrix)
    if m.shape != (dim(modes), dim(modes)):
        raise DimensionMismatch(f"matrix of shape {m.shape} does not match {modes} modes")
    herm_dev = float(np.max(np.abs(m - m.conj().T)))
    sym = (m + m.conj().T) / 2
    eigs = np.linalg.eigvalsh(sym)
    return {
        "modes": modes,
        "hermiticity_deviation": herm_dev,
        "parity_residual": parity_residual(m, modes),
        "min_eigenvalue": float(eigs[0]),
        "trace": float(np.real(np.trace(m))),
    }


def new_state(matrix, modes: int) -> FermionicState:
    """Validate a matrix as a fermionic state.

    Raises NotPSD / ParityViolation / TraceTooLarge naming the violated
    invariant; tiny negative eigenvalues within the clipping tolerance pass.
    """
    report = validation_report(matrix, modes)
    if report["hermiticity_deviation"] > linalg.HERMITICITY_TOL * max(1.0, abs(report["trace"])):
        raise NotPSD(f"matrix is not hermitian (deviation {report['hermiticity_deviation']:.3e})")
    if report["min_eigenvalue"] < -linalg.EIG_CLIP:
        raise NotPSD(f"minimum eigenvalue {report['min_eigenvalue']:.3e} below -{linalg.EIG_CLIP}")
    if report["parity_residual"] > PARITY_TOL:
        raise ParityViolation(
            f"state couples parity sectors (residual {report['parity_residual']:.3e})"
        )
    if report["trace"] > 1.0 + TRACE_TOL:
        raise TraceTooLarge(f"trace {report['trace']:.12f} exceeds 1")
    m = linalg.as_matrix(matrix).copy()
    m.setflags(write=False)
    return FermionicState(modes, m)


def blocked_eigh(matrix: np.ndarray, modes: int):
    """Eigendecomposition with parity-definite eigenvectors.

    Each parity sector is diagonalized separately and the results are merged
    in descending order with the deterministic tie rule of the dense kernels.

    Returns:
        (eigenvalues, eigenvectors, parities) with eigenvectors as columns of a
        full-dimension matrix and parities an int array of 0 (even) / 1 (odd).
    """
    d = dim(modes)
    even, odd = parity_indices(modes)
    values, vectors, parities = [], [], []
    for par, idx in ((0, even), (1, odd)):
        if idx.size == 0:
            continue
        block = matrix[np.ix_(idx, idx)]
        dec = linalg.eig_hermitian(block)
        emb = np.zeros((d, idx.size), dtype=complex)
        emb[idx, :] = dec.eigenvectors
        values.append(dec.eigenvalues)
        vectors.append(emb)
        parities.extend([par] * idx.size)
    w = np.concatenate(values)
    u = np.hstack(vectors)
    perm = linalg.deterministic_order(w, u)
    return w[perm], u[:, perm], np.asarray(parities, dtype=int)[perm]


def pure_state(vector, modes: int) -> FermionicState:
    """State |v><v| of a (normalized, definite-parity) vector."""
    v = np.asarray(vector, dtype=complex).reshape(-1)
    if v.size != dim(modes):
        raise DimensionMismatch(f"vector of length {v.size} does not match {modes} modes")
    return new_state(np.outer(v, v.conj()), modes)


def vacuum_state(modes: int) -> FermionicState:
    v = np.zeros(dim(modes), dtype=complex)
    v[0] = 1.0
    return pure_state(v, modes)


def compose(rho: FermionicState, sigma: FermionicState) -> FermionicState:
    """Parallel composition; the JW representative of even operators tensors."""
    return new_state(np.kron(rho.matrix, sigma.matrix), rho.modes + sigma.modes)


def fermionic_trace(rho: FermionicState) -> float:
    return rho.trace


def partial_trace(rho: FermionicState, traced) -> FermionicState:
    """Fermionic partial trace over the given mode labels (1-based).

    The traced modes are first moved to the trailing slots through adjacent
    fermionic swaps; terms odd on the traced modes then have traceless tails,
    so the ordinary matrix partial trace implements the fermionic one.
    """
    traced = sorted(set(int(t) for t in traced))
    for t in traced:
        if not 1 <= t <= rho.modes:
            raise DimensionMismatch(f"mode {t} outside 1..{rho.modes}")
    kept = [m for m in range(1, rho.modes + 1) if m not in traced]
    if not kept:
        raise EmptyComplement("all modes traced; use fermionic_trace for the scalar")
    if not traced:
        return rho
    perm = [0] * rho.modes
    for slot, mode in enumerate(kept + traced, start=1):
        perm[mode - 1] = slot
    if perm == list(range(1, rho.modes + 1)):
        m = rho.matrix
    else:
        u = reorder_unitary(ModeOrdering(rho.modes), ModeOrdering(rho.modes, tuple(perm)))
        m = u @ rho.matrix @ u.conj().T
    dk, dt = dim(len(kept)), dim(len(traced))
    m = m.reshape(dk, dt, dk, dt)
    reduced = np.einsum("atbt->ab", m)
    return new_state(reduced, len(kept))


def sqrt_state(rho: FermionicState) -> np.ndarray:
    """Even-operator square root of the JW representative."""
    return linalg.matrix_sqrt_psd(rho.matrix)


def log_state(rho: FermionicState) -> np.ndarray:
    """Even-operator base-2 logarithm on the support."""
    return linalg.matrix_log_psd(rho.matrix)


def entropy(rho: FermionicState) -> float:
    """Von Neumann entropy in bits, with the 0 log 0 = 0 convention."""
    if not rho.is_normalized():
        raise NotNormalized(f"entropy needs trace 1, got {rho.trace:.12f}")
    w, _, _ = blocked_eigh(rho.matrix, rho.modes)
    w = w[w > 0]
    return float(-np.sum(w * np.log2(w)))


def trace_distance(rho: FermionicState, sigma: FermionicState) -> float:
    if rho.modes != sigma.modes:
        raise DimensionMismatch("states live on different mode counts")
    if not (rho.is_normalized() and sigma.is_normalized()):
        raise NotNormalized("trace distance is defined here for normalized states")
    return 0.5 * linalg.trace_norm(rho.matrix - sigma.matrix)


def fidelity(rho: FermionicState, sigma: FermionicState) -> float:
    if rho.modes != sigma.modes:
        raise DimensionMismatch("states live on different mode counts")
    if not (rho.is_normalized() and sigma.is_normalized()):
        raise NotNormalized("fidelity is defined here for normalized states")
    return linalg.uhlmann_fidelity_matrices(rho.matrix, sigma.matrix)


@dataclass(frozen=True)
class Purification:
    """Pure state on system + purifier modes, tagged with its marginal."""

    state: FermionicState
    system_modes: int
    purifier_modes: int
    marginal: np.ndarray
    vector: np.ndarray

    @property
    def total_modes(self) -> int:
        return self.system_modes + self.purifier_modes


def _sector_basis_indices(modes: int) -> tuple[list[int], list[int]]:
    even, odd = parity_indices(modes)
    return list(even), list(odd)


def minimal_purification_vector(rho: FermionicState) -> tuple[np.ndarray, int]:
    """Vector of the minimal purification, without materializing its density
    matrix (which is quadratically larger). Returns (psi, purifier_modes)."""
    if not rho.is_normalized():
        raise InvalidState(f"purification needs a normalized state, got trace {rho.trace:.9f}")
    w, u, parities = blocked_eigh(rho.matrix, rho.modes)
    keep = w > RANK_TOL
    w, parities = w[keep], parities[keep]
    u = u[:, keep]
    r = max(int(np.sum(parities == 0)), int(np.sum(parities == 1)), 1)
    purifier = max(1, (2 * r - 1).bit_length())
    even_slots, odd_slots = _sector_basis_indices(purifier)
    dp = dim(purifier)
    psi = np.zeros(rho.dim * dp, dtype=complex)
    used = {0: 0, 1: 0}
    for k in range(w.size):
        par = int(parities[k])
        slot = (even_slots if par == 0 else odd_slots)[used[par]]
        used[par] += 1
        psi[slot::dp] += np.sqrt(w[k]) * u[:, k]
    # marginal check straight from the vector: Tr_purifier |psi><psi|
    mat = psi.reshape(rho.dim, dp)
    if linalg.trace_norm(mat @ mat.conj().T - rho.matrix) > 1e-9:
        raise InvalidState("purification marginal check failed")
    return psi, purifier


def minimal_purification(rho: FermionicState) -> Purification:
    """Purify on the fewest modes that parity allows.

    The eigenvectors of the state have definite parity; the k-th even (odd)
    one, in descending eigenvalue order, is paired with the k-th lexicographic
    even (odd) Fock vector of the purifier, so the global pure state has even
    parity. The purifier needs ceil(log2(2 r)) modes, r the larger sector rank.
    """
    psi, purifier = minimal_purification_vector(rho)
    state = new_state(np.outer(psi, psi.conj()), rho.modes + purifier)
    return Purification(state, rho.modes, purifier, rho.matrix.copy(), psi)


def random_blocked_state(modes: int, rng: np.random.Generator, pure: bool = False) -> FermionicState:
    """Random valid state: independent Wishart blocks per parity sector, or a
    random definite-parity pure state."""
    even, odd = parity_indices(modes)
    d = dim(modes)
    m = np.zeros((d, d), dtype=complex)
    if pure:
        idx = even if rng.integers(2) == 0 else odd
        v = rng.normal(size=idx.size) + 1j * rng.normal(size=idx.size)
        v /= np.linalg.norm(v)
        full = np.zeros(d, dtype=complex)
        full[idx] = v
        return new_state(np.outer(full, full.conj()), modes)
    weights = rng.dirichlet((1.0, 1.0))
    for idx, weight in zip((even, odd), weights):
        g = rng.normal(size=(idx.size, idx.size)) + 1j * rng.normal(size=(idx.size, idx.size))
        block = g @ g.conj().T
        block *= weight / np.real(np.trace(block))
        m[np.ix_(idx, idx)] = block
    return new_state(m, modes)
