"""Fermionic transformations as parity-validated Kraus sets.

Every Kraus matrix must have definite parity: block-diagonal across the Fock
parity sectors (even) or block-antidiagonal (odd). Mixed-parity Kraus inputs
are rejected rather than split, so modeling errors surface early. Extension
and parallel composition insert the parity-conditioned z-strings that the
Jordan-Wigner representation demands; structure-preserving constructors skip
re-validation because validity is inherited exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import linalg
from .errors import (
    CompletenessViolation,
    DimensionMismatch,
    IndefiniteParityKraus,
    MarginalMismatch,
    NotAnEffect,
    NotDeterministic,
    NotNormalized,
    ParityViolation,
)
from .fock import dim, parity_indices, parity_signs, vacuum_vector
from .states import (
    FermionicState,
    Purification,
    blocked_eigh,
    compose,
    minimal_purification,
    minimal_purification_vector,
    new_state,
    vacuum_state,
)

PARITY_CLASS_TOL = 1e-10
COMPLETENESS_TOL = 1e-9
EVEN, ODD = 0, 1


@dataclass(frozen=True)
class KrausOperator:
    matrix: np.ndarray
    parity: int  # EVEN or ODD
    in_modes: int
    out_modes: int


@dataclass(frozen=True)
class FermionicChannel:
    kraus: tuple[KrausOperator, ...]
    in_modes: int
    out_modes: int
    deterministic: bool

    @property
    def matrices(self) -> list[np.ndarray]:
        return [k.matrix for k in self.kraus]


def _sector_blocks(matrix, in_modes, out_modes):
    ein, oin = parity_indices(in_modes)
    eout, oout = parity_indices(out_modes)
    keep = matrix[np.ix_(eout, ein)], matrix[np.ix_(oout, oin)]
    flip = matrix[np.ix_(oout, ein)], matrix[np.ix_(eout, oin)]
    return keep, flip


def classify_parity(matrix, in_modes: int, out_modes: int) -> int:
    """EVEN if the matrix preserves Fock parity, ODD if it flips it.

    Raises IndefiniteParityKraus when both kinds of blocks carry weight.
    """
    m = linalg.as_matrix(matrix)
    keep, flip = _sector_blocks(m, in_modes, out_modes)
    # Frobenius bounds decide cleanly separated cases without any SVD.
    keep_f = float(np.linalg.norm(keep[0])) + float(np.linalg.norm(keep[1]))
    flip_f = float(np.linalg.norm(flip[0])) + float(np.linalg.norm(flip[1]))
    scale = max(1.0, keep_f + flip_f)
    if flip_f <= PARITY_CLASS_TOL * scale:
        return EVEN
    if keep_f <= PARITY_CLASS_TOL * scale:
        return ODD
    flip_tn = sum(linalg.singular_value_sum(b) for b in flip)
    keep_tn = sum(linalg.singular_value_sum(b) for b in keep)
    scale_tn = max(1.0, keep_tn + flip_tn)
    if flip_tn <= PARITY_CLASS_TOL * scale_tn:
        return EVEN
    if keep_tn <= PARITY_CLASS_TOL * scale_tn:
        return ODD
    raise IndefiniteParityKraus(
        f"Kraus mixes parity blocks (keep {keep_tn:.3e}, flip {flip_tn:.3e})"
    )


def new_channel(matrices, in_modes: int, out_modes: int | None = None,
                deterministic: bool = True) -> FermionicChannel:
    """Validate a Kraus list: shapes, per-Kraus definite parity, completeness."""
    if out_modes is None:
        out_modes = in_modes
    din, dout = dim(in_modes), dim(out_modes)
    ops = []
    for m in matrices:
        a = linalg.as_matrix(m)
        if a.shape != (dout, din):
            raise DimensionMismatch(
                f"Kraus of shape {a.shape}, expected {(dout, din)} for {in_modes}->{out_modes} modes"
            )
        ops.append(KrausOperator(a, classify_parity(a, in_modes, out_modes), in_modes, out_modes))
    if not ops:
        raise CompletenessViolation("a channel needs at least one Kraus operator")
    total = np.zeros((din, din), dtype=complex)
    for k in ops:
        total += k.matrix.conj().T @ k.matrix
    if deterministic:
        dev = linalg.trace_norm(total - np.eye(din))
        if dev > COMPLETENESS_TOL:
            raise CompletenessViolation(
                f"sum K^dag K deviates from identity by {dev:.3e} in trace norm"
            )
    else:
        top = float(np.max(np.linalg.eigvalsh((total + total.conj().T) / 2)))
        if top > 1.0 + COMPLETENESS_TOL:
            raise CompletenessViolation(f"sum K^dag K has eigenvalue {top:.12f} above 1")
    return FermionicChannel(tuple(ops), in_modes, out_modes, deterministic)


def _channel(ops, in_modes, out_modes, deterministic) -> FermionicChannel:
    # Internal constructor for operations that preserve validity exactly.
    return FermionicChannel(tuple(ops), in_modes, out_modes, deterministic)


def identity_channel(modes: int) -> FermionicChannel:
    return new_channel([np.eye(dim(modes))], modes, modes, deterministic=True)


def parity_channel(modes: int = 1) -> FermionicChannel:
    """Measure-and-forget of the total parity: Kraus {P_even, P_odd}."""
    even, odd = parity_indices(modes)
    d = dim(modes)
    p0 = np.zeros((d, d), dtype=complex)
    p1 = np.zeros((d, d), dtype=complex)
    p0[even, even] = 1.0
    p1[odd, odd] = 1.0
    return new_channel([p0, p1], modes, modes, deterministic=True)


def apply(channel: FermionicChannel, rho: FermionicState) -> FermionicState:
    """sum_i K_i J(rho) K_i^dag, revalidated as a (possibly sub-normalized) state."""
    if channel.in_modes != rho.modes:
        raise DimensionMismatch(
            f"channel acts on {channel.in_modes} modes, state has {rho.modes}"
        )
    dout = dim(channel.out_modes)
    result = np.zeros((dout, dout), dtype=complex)
    mats = channel.matrices
    # chunked batched evaluation keeps scratch memory bounded
    chunk = max(1, (1 << 22) // max(1, dout * rho.dim))
    for i in range(0, len(mats), chunk):
        stack = np.stack(mats[i:i + chunk])
        tmp = stack @ rho.matrix
        result += np.tensordot(tmp, stack.conj(), axes=([0, 2], [0, 2]))
    result = (result + result.conj().T) / 2
    return new_state(result, channel.out_modes)


def extend(channel: FermionicChannel, extra: int, side: str = "after") -> FermionicChannel:
    """Act jointly with the identity on ``extra`` additional modes.

    With the extra modes after the acting ones, z-strings never reach them and
    every Kraus extends as K (x) I. With the extra modes in front, odd Kraus
    pick up the string Z^(x)extra on the new modes.
    """
    if side not in ("after", "before"):
        raise ValueError(f"side must be 'after' or 'before', got {side!r}")
    if extra == 0:
        return channel
    if extra < 0:
        raise DimensionMismatch("cannot extend by a negative number of modes")
    eye = np.eye(dim(extra), dtype=complex)
    zstring = np.diag(parity_signs(extra)).astype(complex)
    ops = []
    for k in channel.kraus:
        if side == "after":
            m = np.kron(k.matrix, eye)
        else:
            m = np.kron(eye if k.parity == EVEN else zstring, k.matrix)
        ops.append(KrausOperator(m, k.parity, k.in_modes + extra, k.out_modes + extra))
    return _channel(ops, channel.in_modes + extra, channel.out_modes + extra,
                    channel.deterministic)


def parallel_compose(c: FermionicChannel, d: FermionicChannel) -> FermionicChannel:
    """Joint action on side-by-side systems, first factor's modes first.

    The JW representative of C_i D_j is a plain tensor product only when D_j
    is even; odd D_j leave the string Z^(x)L on the first factor's input side.
    Output parities multiply.
    """
    zl = np.diag(parity_signs(c.in_modes)).astype(complex)
    ops = []
    for kc in c.kraus:
        left_plain = kc.matrix
        left_strung = kc.matrix @ zl
        for kd in d.kraus:
            left = left_plain if kd.parity == EVEN else left_strung
            ops.append(
                KrausOperator(
                    np.kron(left, kd.matrix),
                    kc.parity ^ kd.parity,
                    c.in_modes + d.in_modes,
                    c.out_modes + d.out_modes,
                )
            )
    return _channel(ops, c.in_modes + d.in_modes, c.out_modes + d.out_modes,
                    c.deterministic and d.deterministic)


def compose_sequential(outer: FermionicChannel, inner: FermionicChannel,
                       drop_tol: float = 1e-12) -> FermionicChannel:
    """Channel applying ``inner`` then ``outer``; Kraus set {O_i I_j}.

    Products with Frobenius norm below ``drop_tol`` are dropped; they change
    the completeness sum by at most drop_tol**2 per pair.
    """
    if inner.out_modes != outer.in_modes:
        raise DimensionMismatch(
            f"cannot chain {inner.out_modes}-mode output into {outer.in_modes}-mode input"
        )
    ops = []
    for ko in outer.kraus:
        for ki in inner.kraus:
            m = ko.matrix @ ki.matrix
            if float(np.linalg.norm(m)) <= drop_tol:
                continue
            ops.append(KrausOperator(m, ko.parity ^ ki.parity, ki.in_modes, ko.out_modes))
    return _channel(ops, inner.in_modes, outer.out_modes,
                    outer.deterministic and inner.deterministic)


def entanglement_fidelity(rho: FermionicState, channel: FermionicChannel) -> float:
    """sum_i |Tr[J(rho) K_i]|^2, the Kraus-decomposition form."""
    if not channel.deterministic:
        raise NotDeterministic("entanglement fidelity needs a deterministic channel")
    if channel.in_modes != channel.out_modes or channel.in_modes != rho.modes:
        raise DimensionMismatch("entanglement fidelity needs an L->L channel on the state's modes")
    if not rho.is_normalized():
        raise NotNormalized(f"state has trace {rho.trace:.12f}")
    total = 0.0
    for k in channel.kraus:
        total += abs(np.trace(rho.matrix @ k.matrix)) ** 2
    return float(total)


def entanglement_fidelity_via_purification(
    rho: FermionicState,
    channel: FermionicChannel,
    purification: Purification | None = None,
) -> float:
    """Squared Uhlmann fidelity between a purification and its image under
    (channel (x) identity); agrees with the Kraus form for any purification."""
    if not channel.deterministic:
        raise NotDeterministic("entanglement fidelity needs a deterministic channel")
    if not rho.is_normalized():
        raise NotNormalized(f"state has trace {rho.trace:.12f}")
    pur = purification if purification is not None else minimal_purification(rho)
    extended = extend(channel, pur.purifier_modes, side="after")
    image = apply(extended, pur.state)
    f = linalg.uhlmann_fidelity_matrices(pur.state.matrix, image.matrix)
    return float(f * f)


@dataclass(frozen=True)
class Effect:
    matrix: np.ndarray
    modes: int


def validate_effect(matrix, modes: int) -> Effect:
    """Accept 0 <= a <= I operators that are even-parity blocked."""
    m = linalg.as_matrix(matrix)
    if m.shape != (dim(modes), dim(modes)):
        raise DimensionMismatch(f"effect of shape {m.shape} does not match {modes} modes")
    if float(np.max(np.abs(m - m.conj().T))) > 1e-9:
        raise NotAnEffect("effect must be hermitian")
    ein, oin = parity_indices(modes)
    off = float(np.linalg.norm(m[np.ix_(ein, oin)])) + float(np.linalg.norm(m[np.ix_(oin, ein)]))
    if off > PARITY_CLASS_TOL * max(1.0, float(np.linalg.norm(m))):
        raise ParityViolation("effect couples the parity sectors")
    w = np.linalg.eigvalsh((m + m.conj().T) / 2)
    if w[0] < -linalg.EIG_CLIP or w[-1] > 1.0 + COMPLETENESS_TOL:
        raise NotAnEffect(f"effect spectrum [{w[0]:.3e}, {w[-1]:.12f}] outside [0, 1]")
    return Effect(m, modes)


# ---------------------------------------------------------------------------
# seeded randomness: unitaries, channels, POVMs, refinement families


def random_even_unitary(modes: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-style random unitary acting within each parity sector."""
    d = dim(modes)
    u = np.zeros((d, d), dtype=complex)
    for idx in parity_indices(modes):
        n = idx.size
        g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        q, r = np.linalg.qr(g)
        ph = np.diagonal(r).copy()
        ph = ph / np.abs(ph)
        u[np.ix_(idx, idx)] = q * ph[None, :]
    return u


def random_channel(modes: int, rng: np.random.Generator, env_modes: int = 1) -> FermionicChannel:
    """Random deterministic channel from a parity-preserving dilation unitary.

    The environment starts in the vacuum; tracing it out yields Kraus with the
    definite parities of the environment basis, so both parities occur.
    """
    u = random_even_unitary(modes + env_modes, rng)
    de = dim(env_modes)
    u4 = u.reshape(dim(modes), de, dim(modes), de)
    kraus = [u4[:, b, :, 0] for b in range(de)]
    return new_channel(kraus, modes, modes, deterministic=True)


def random_even_povm(modes: int, count: int, rng: np.random.Generator) -> list[np.ndarray]:
    """Seeded POVM of even-parity effects: rotated positive diagonals,
    symmetrically normalized to sum to the identity."""
    if count == 1:
        return [np.eye(dim(modes), dtype=complex)]
    raw = []
    for _ in range(count):
        u = random_even_unitary(modes, rng)
        diag = rng.uniform(0.05, 1.0, dim(modes))
        raw.append((u * diag) @ u.conj().T)
    total = np.sum(raw, axis=0)
    w, v = np.linalg.eigh((total + total.conj().T) / 2)
    inv_sqrt = (v / np.sqrt(w)) @ v.conj().T
    return [inv_sqrt @ g @ inv_sqrt for g in raw]


def refinements_from_vector(vector: np.ndarray, total_modes: int, measured_modes: int,
                            povm) -> list[FermionicState]:
    """Condition a pure state on a POVM over its trailing modes and trace them.

    Returns one sub-normalized state on the leading modes per POVM element;
    the family sums to the marginal of the pure state.
    """
    kept = total_modes - measured_modes
    mat = np.asarray(vector, dtype=complex).reshape(dim(kept), dim(measured_modes))
    out = []
    for b in povm:
        sigma = mat @ np.asarray(b, dtype=complex).T @ mat.conj().T
        out.append(new_state((sigma + sigma.conj().T) / 2, kept))
    return out


def sample_refinements(rho: FermionicState, count: int, seed: int, *,
                       kept_modes: int | None = None,
                       measured_modes: int | None = None) -> list[FermionicState]:
    """Seeded refinement family {Sigma_i} whose sum is a dilation of ``rho``.

    A minimal purification is scrambled by a random parity-preserving unitary
    on the purifier, a random even-parity POVM is measured on the trailing
    ``measured_modes``, and each outcome is conditioned and traced out. The
    ``kept_modes`` of purifier stay with the system, so the refinements live on
    ``rho.modes + kept_modes`` modes.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    psi, mp = minimal_purification_vector(rho)
    if measured_modes is None and kept_modes is None:
        measured_modes = min(2, mp)
        kept_modes = mp - measured_modes
    elif measured_modes is None:
        measured_modes = max(1, mp - kept_modes)
    elif kept_modes is None:
        kept_modes = max(0, mp - measured_modes)
    pad = kept_modes + measured_modes - mp
    if pad < 0:
        raise DimensionMismatch(
            f"purifier has {mp} modes; kept {kept_modes} + measured {measured_modes} too small"
        )
    rng = np.random.default_rng(seed)
    if pad:
        psi = np.kron(psi, vacuum_vector(pad))
    scramble = random_even_unitary(mp + pad, rng)
    psi = (psi.reshape(rho.dim, dim(mp + pad)) @ scramble.T).reshape(-1)
    povm = random_even_povm(measured_modes, count, rng)
    total = rho.modes + kept_modes + measured_modes
    return refinements_from_vector(psi, total, measured_modes, povm)


@dataclass(frozen=True)
class ClosenessResult:
    value: float
    discrimination_bound: float


def closeness_upon_input(c1: FermionicChannel, c2: FermionicChannel,
                         family) -> ClosenessResult:
    """sum_i ||[(C1 - C2) (x) I](Sigma_i)||_1 over a refinement family.

    Also reports the induced discrimination bound 1/2 + value/4.
    """
    if (c1.in_modes, c1.out_modes) != (c2.in_modes, c2.out_modes):
        raise DimensionMismatch("channels being compared must share their mode counts")
    family = list(family)
    if not family:
        raise ValueError("need at least one refinement")
    total = 0.0
    cache: dict[int, tuple[FermionicChannel, FermionicChannel]] = {}
    for sigma in family:
        extra = sigma.modes - c1.in_modes
        if extra < 0:
            raise DimensionMismatch(
                f"refinement on {sigma.modes} modes is smaller than the channel input"
            )
        if extra not in cache:
            cache[extra] = (extend(c1, extra, "after"), extend(c2, extra, "after"))
        e1, e2 = cache[extra]
        diff = apply(e1, sigma).matrix - apply(e2, sigma).matrix
        total += linalg.trace_norm(diff)
    return ClosenessResult(float(total), 0.5 + 0.25 * float(total))


# ---------------------------------------------------------------------------
# purification uniqueness


def _global_parity(vector: np.ndarray, modes: int) -> int:
    even, odd = parity_indices(modes)
    we = float(np.linalg.norm(vector[even]))
    wo = float(np.linalg.norm(vector[odd]))
    return EVEN if we >= wo else ODD


def _sector_complement(used: list[np.ndarray], sector: np.ndarray, full_dim: int) -> list[np.ndarray]:
    if not used:
        basis = []
        for i in sector:
            e = np.zeros(full_dim, dtype=complex)
            e[i] = 1.0
            basis.append(e)
        return basis
    block = np.array([u[sector] for u in used])  # rows: used vectors restricted to the sector
    null = scipy.linalg.null_space(block.conj())
    out = []
    for j in range(null.shape[1]):
        e = np.zeros(full_dim, dtype=complex)
        e[sector] = null[:, j]
        out.append(e)
    return out


def _connecting_unitary(psi: Purification, phi: Purification) -> np.ndarray:
    """Unitary on the shared-size purifier with (I (x) U) psi = phi (up to phase).

    Schmidt vectors are read off against the parity-definite eigenbasis of the
    common marginal and paired sector by sector. When the two purifications
    have different global parity the connector is odd; its extension then
    carries a z-string over the system modes, which is compensated by a sign
    on each odd-parity Schmidt branch.
    """
    l_modes = psi.system_modes
    p_modes = psi.purifier_modes
    w, u, pars = blocked_eigh(psi.marginal, l_modes)
    keep = w > 1e-12
    w, pars = w[keep], pars[keep]
    u = u[:, keep]
    lam = np.sqrt(w)
    psi_mat = psi.vector.reshape(dim(l_modes), dim(p_modes))
    phi_mat = phi.vector.reshape(dim(l_modes), dim(p_modes))
    flip = _global_parity(psi.vector, psi.total_modes) ^ _global_parity(phi.vector, phi.total_modes)
    used_a: dict[int, list[np.ndarray]] = {EVEN: [], ODD: []}
    used_b: dict[int, list[np.ndarray]] = {EVEN: [], ODD: []}
    conn = np.zeros((dim(p_modes), dim(p_modes)), dtype=complex)
    gp_psi = _global_parity(psi.vector, psi.total_modes)
    for k in range(lam.size):
        a = (u[:, k].conj() @ psi_mat) / lam[k]
        b = (u[:, k].conj() @ phi_mat) / lam[k]
        sign = -1.0 if (flip and pars[k] == ODD) else 1.0
        conn += sign * np.outer(b, a.conj())
        used_a[gp_psi ^ pars[k]].append(a)
        used_b[(gp_psi ^ pars[k]) ^ flip].append(b)
    even_idx, odd_idx = parity_indices(p_modes)
    sectors = {EVEN: even_idx, ODD: odd_idx}
    for par in (EVEN, ODD):
        comp_a = _sector_complement(used_a[par], sectors[par], dim(p_modes))
        comp_b = _sector_complement(used_b[par ^ flip], sectors[par ^ flip], dim(p_modes))
        for a, b in zip(comp_a, comp_b):
            conn += np.outer(b, a.conj())
    # polish away the O(marginal mismatch) non-unitarity; parity is preserved
    uu, _, vv = np.linalg.svd(conn)
    return uu @ vv


def _padded(pur: Purification, extra: int) -> Purification:
    state = compose(pur.state, vacuum_state(extra))
    vec = np.kron(pur.vector, vacuum_vector(extra))
    return Purification(state, pur.system_modes, pur.purifier_modes + extra,
                        pur.marginal, vec)


def connect_purifications(psi: Purification, phi: Purification) -> FermionicChannel:
    """Channel on the purifier mapping one purification of a state to another.

    Equal purifier sizes yield a parity-definite unitary; a smaller source
    purifier is padded with a pure mode first, and a larger one is unitarily
    rotated and then partially traced.
    """
    if psi.system_modes != phi.system_modes:
        raise DimensionMismatch("purifications have different system sizes")
    if linalg.trace_norm(psi.marginal - phi.marginal) > 1e-8:
        raise MarginalMismatch("the two purifications do not share a marginal")
    mp, kp = psi.purifier_modes, phi.purifier_modes
    if mp == kp:
        return new_channel([_connecting_unitary(psi, phi)], mp, kp, deterministic=True)
    if mp < kp:
        u = _connecting_unitary(_padded(psi, kp - mp), phi)
        embed = np.kron(np.eye(dim(mp), dtype=complex),
                        vacuum_vector(kp - mp).reshape(-1, 1))
        return new_channel([u @ embed], mp, kp, deterministic=True)
    u = _connecting_unitary(psi, _padded(phi, mp - kp))
    dropped = dim(mp - kp)
    ops = []
    for b in range(dropped):
        row = np.zeros((1, dropped), dtype=complex)
        row[0, b] = 1.0
        ops.append(np.kron(np.eye(dim(kp), dtype=complex), row) @ u)
    return new_channel(ops, mp, kp, deterministic=True)
