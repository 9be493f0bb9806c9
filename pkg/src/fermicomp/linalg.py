"""Dense complex-matrix kernels: eigendecomposition, PSD functions, trace norm,
Uhlmann fidelity.

Nothing in here knows about fermions; matrices are plain 2-D complex arrays.
All kernels are capped at dimension 2**10 — larger instances must go through
the spectral (type-class) path instead of dense algebra.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DenseCapExceeded, DimensionMismatch, NoConvergence, NonHermitian, NotPSD

MAX_DENSE_DIM = 1024
HERMITICITY_TOL = 1e-9
EIG_CLIP = 1e-10  # eigenvalues in [-EIG_CLIP, 0) are numerical noise and get clipped to 0
_TIE_TOL = 1e-12


@dataclass(frozen=True)
class EigenDecomposition:
    """Spectral decomposition H = U diag(w) U^dag, eigenvalues descending."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_matrix(x) -> np.ndarray:
    a = np.asarray(x, dtype=complex)
    if a.ndim != 2:
        raise DimensionMismatch(f"expected a matrix, got array of shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    return a


def _square(x) -> np.ndarray:
    a = as_matrix(x)
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] > MAX_DENSE_DIM:
        raise DenseCapExceeded(
            f"dense kernels support dimension <= {MAX_DENSE_DIM}, got {a.shape[0]}"
        )
    return a


def hermiticity_deviation(a: np.ndarray) -> float:
    """Trace-norm deviation ||A - A^dag||_1 (exact, via the spectrum of the skew part)."""
    skew = 1j * (a - a.conj().T)  # hermitian; its eigenvalues are the singular values we need
    return float(np.sum(np.abs(np.linalg.eigvalsh(skew))))


def _require_hermitian(a: np.ndarray) -> None:
    # Cheap sufficient check first; the exact trace-norm comparison only runs near the boundary.
    n = a.shape[0]
    dev_f = float(np.linalg.norm(a - a.conj().T))
    scale_f = max(1.0, float(np.linalg.norm(a)))
    if np.sqrt(n) * dev_f <= HERMITICITY_TOL * scale_f:
        return
    scale = max(1.0, trace_norm(a))
    if hermiticity_deviation(a) > HERMITICITY_TOL * scale:
        raise NonHermitian(
            f"matrix deviates from hermiticity by more than {HERMITICITY_TOL} (relative)"
        )


def deterministic_order(eigenvalues: np.ndarray, eigenvectors: np.ndarray) -> np.ndarray:
    """Permutation sorting eigenpairs descending with a fixed tie rule.

    Within a cluster of (numerically) equal eigenvalues, vectors are ordered by
    the smallest index of their largest-magnitude component. This keeps golden
    tests stable across runs and platforms.
    """
    order = np.argsort(-eigenvalues, kind="stable")
    w = eigenvalues[order]
    anchors = np.argmax(np.abs(eigenvectors[:, order]), axis=0)
    n = len(w)
    i = 0
    final = []
    while i < n:
        j = i + 1
        while j < n and (w[i] - w[j]) <= _TIE_TOL * max(1.0, abs(w[i])):
            j += 1
        group = sorted(range(i, j), key=lambda k: int(anchors[k]))
        final.extend(group)
        i = j
    return order[np.asarray(final, dtype=int)]


def _fix_phases(u: np.ndarray) -> np.ndarray:
    u = u.copy()
    for k in range(u.shape[1]):
        a = int(np.argmax(np.abs(u[:, k])))
        pivot = u[a, k]
        if abs(pivot) > 0:
            u[:, k] *= pivot.conjugate() / abs(pivot)
    return u


def eig_hermitian(h) -> EigenDecomposition:
    """Eigendecomposition of a hermitian matrix with deterministic output.

    Eigenvalues come back descending. Ties are broken by the anchor-index rule
    of :func:`deterministic_order`, and each eigenvector's phase is fixed so
    its largest-magnitude component is real positive, so identical inputs give
    identical outputs.

    Raises:
        NonHermitian: if ||H - H^dag||_1 exceeds 1e-9 relative to max(1, ||H||_1).
        NoConvergence: if the underlying iterative kernel fails.
    """
    a = _square(h)
    _require_hermitian(a)
    a = (a + a.conj().T) / 2
    try:
        w, u = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence("eigensolver failed to converge") from exc
    perm = deterministic_order(w, u)
    return EigenDecomposition(w[perm], _fix_phases(u[:, perm]))


def _psd_eigensystem(a) -> EigenDecomposition:
    dec = eig_hermitian(a)
    w = dec.eigenvalues
    if np.any(w < -EIG_CLIP):
        raise NotPSD(f"matrix has eigenvalue {w.min():.3e} below -{EIG_CLIP}")
    return EigenDecomposition(np.where(w < 0, 0.0, w), dec.eigenvectors)


def matrix_sqrt_psd(a) -> np.ndarray:
    """Hermitian PSD square root; negative eigenvalues above -1e-10 clip to zero."""
    dec = _psd_eigensystem(a)
    u = dec.eigenvectors
    r = (u * np.sqrt(dec.eigenvalues)) @ u.conj().T
    return (r + r.conj().T) / 2


def matrix_log_psd(a) -> np.ndarray:
    """Base-2 logarithm on the support; kernel eigenvectors contribute zero."""
    dec = _psd_eigensystem(a)
    w = dec.eigenvalues
    lw = np.where(w > 0, np.log2(np.where(w > 0, w, 1.0)), 0.0)
    u = dec.eigenvectors
    r = (u * lw) @ u.conj().T
    return (r + r.conj().T) / 2


def trace_norm(x) -> float:
    """Sum of singular values of a square matrix.

    Hermitian inputs take the (faster and exact) eigenvalue path.
    """
    a = _square(x)
    scale = float(np.max(np.abs(a))) if a.size else 0.0
    if scale == 0.0:
        return 0.0
    if np.max(np.abs(a - a.conj().T)) <= 1e-12 * max(1.0, scale):
        return float(np.sum(np.abs(np.linalg.eigvalsh((a + a.conj().T) / 2))))
    return float(np.sum(np.linalg.svd(a, compute_uv=False)))


def singular_value_sum(x) -> float:
    """Trace norm for possibly rectangular blocks (internal use)."""
    a = as_matrix(x)
    if a.size == 0 or not np.any(a):
        return 0.0
    return float(np.sum(np.linalg.svd(a, compute_uv=False)))


def uhlmann_fidelity_matrices(a, b) -> float:
    """Tr[(A^{1/2} B A^{1/2})^{1/2}] for PSD A, B of equal dimension.

    Evaluated as the nuclear norm of A^{1/2} B^{1/2}, which is the same number
    but avoids taking the square root of roundoff noise when either input is
    rank deficient (e.g. a purification).
    """
    am = _square(a)
    bm = _square(b)
    if am.shape != bm.shape:
        raise DimensionMismatch(f"fidelity needs equal shapes, got {am.shape} vs {bm.shape}")
    product = matrix_sqrt_psd(am) @ matrix_sqrt_psd(bm)
    return float(np.sum(np.linalg.svd(product, compute_uv=False)))
