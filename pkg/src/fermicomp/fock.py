"""Fock-space bookkeeping and the Jordan-Wigner representation.

Conventions, fixed once for the whole package:

* mode 1 occupies the most significant bit, so ``|n1 ... nL>`` has Fock index
  ``sum_i n_i * 2**(L-i)``;
* the annihilator of mode ``i`` maps to ``sigma_z^(i-1) (x) sigma_minus (x) I``
  with ``sigma_minus = |0><1|`` (it lowers the occupation 1 -> 0);
* with these two choices, raising the vacuum in increasing mode order produces
  the computational basis vector with coefficient +1, so qubit basis == Fock
  basis with no hidden phases.

Mode reorderings are realised exclusively through adjacent fermionic swaps, so
there is a single audited source of permutation signs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import DimensionMismatch, ModeOutOfRange
from .linalg import as_matrix

SIGMA_MINUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
ID2 = np.eye(2, dtype=complex)

CAR_TOL = 1e-12
CAR_MAX_MODES = 8


def dim(modes: int) -> int:
    return 1 << modes


def parity_of_index(index) -> np.ndarray | int:
    """Occupation parity of a Fock index (vectorised over arrays)."""
    return np.bitwise_count(np.asarray(index, dtype=np.uint64)).astype(np.int64) & 1


def occupations(index: int, modes: int) -> tuple[int, ...]:
    """Bit vector (n_1 ... n_L) of a Fock index, mode 1 most significant."""
    if not 0 <= index < dim(modes):
        raise ModeOutOfRange(f"index {index} outside the {modes}-mode Fock space")
    return tuple((index >> (modes - 1 - k)) & 1 for k in range(modes))


def parity_indices(modes: int) -> tuple[np.ndarray, np.ndarray]:
    """Indices of the even and odd Fock sectors, each in ascending order."""
    idx = np.arange(dim(modes))
    par = parity_of_index(idx)
    return idx[par == 0], idx[par == 1]


def parity_signs(modes: int) -> np.ndarray:
    """Diagonal of sigma_z^{(x) modes}: (-1)^{occupation parity}."""
    return 1.0 - 2.0 * parity_of_index(np.arange(dim(modes))).astype(float)


def parity_projectors(modes: int) -> tuple[np.ndarray, np.ndarray]:
    even, odd = parity_indices(modes)
    p0 = np.zeros((dim(modes), dim(modes)), dtype=complex)
    p1 = np.zeros_like(p0)
    p0[even, even] = 1.0
    p1[odd, odd] = 1.0
    return p0, p1


@dataclass(frozen=True)
class ModeOrdering:
    """Assignment of logical modes to qubit slots; ``permutation[i-1]`` is the
    slot (1-based) of logical mode ``i``."""

    count: int
    permutation: tuple[int, ...] = field(default=())

    def __post_init__(self):
        perm = self.permutation or tuple(range(1, self.count + 1))
        object.__setattr__(self, "permutation", perm)
        if sorted(perm) != list(range(1, self.count + 1)):
            raise ModeOutOfRange(f"permutation {perm} is not a bijection on 1..{self.count}")

    def slot_of(self, mode: int) -> int:
        return self.permutation[mode - 1]


def _check_mode(i: int, modes: int) -> None:
    if not 1 <= i <= modes:
        raise ModeOutOfRange(f"mode {i} outside 1..{modes}")


@lru_cache(maxsize=None)
def _jw_at_slot(slot: int, modes: int) -> np.ndarray:
    m = np.array([[1.0 + 0j]])
    for s in range(1, modes + 1):
        if s < slot:
            m = np.kron(m, SIGMA_Z)
        elif s == slot:
            m = np.kron(m, SIGMA_MINUS)
        else:
            m = np.kron(m, ID2)
    m.setflags(write=False)
    return m


def jw_field(i: int, modes: int, ordering: ModeOrdering | None = None) -> np.ndarray:
    """Matrix of the annihilator of mode ``i`` on ``modes`` modes.

    Under an explicit ordering the operator sits at the mode's qubit slot with
    the z-string covering lower slots.
    """
    _check_mode(i, modes)
    slot = ordering.slot_of(i) if ordering is not None else i
    return _jw_at_slot(slot, modes)


def vacuum_projector(modes: int) -> np.ndarray:
    if modes < 1:
        raise ModeOutOfRange("need at least one mode")
    p = np.zeros((dim(modes), dim(modes)), dtype=complex)
    p[0, 0] = 1.0
    return p


def vacuum_vector(modes: int) -> np.ndarray:
    v = np.zeros(dim(modes), dtype=complex)
    v[0] = 1.0
    return v


@dataclass(frozen=True)
class CarReport:
    modes: int
    max_deviation: float
    passed: bool


def validate_car(modes: int) -> CarReport:
    """Check {phi_i, phi_j^dag} = delta_ij I and {phi_i, phi_j} = 0 densely."""
    if modes > CAR_MAX_MODES:
        raise ModeOutOfRange(f"dense CAR check supports at most {CAR_MAX_MODES} modes")
    fields = [jw_field(i, modes) for i in range(1, modes + 1)]
    eye = np.eye(dim(modes))
    worst = 0.0
    for i, fi in enumerate(fields):
        for j, fj in enumerate(fields):
            acc = fi @ fj.conj().T + fj.conj().T @ fi
            if i == j:
                acc = acc - eye
            worst = max(worst, float(np.max(np.abs(acc))))
            worst = max(worst, float(np.max(np.abs(fi @ fj + fj @ fi))))
    return CarReport(modes, worst, worst <= CAR_TOL)


def fswap_adjacent(i: int, modes: int) -> np.ndarray:
    """Fermionic swap of modes (i, i+1): |01> <-> |10>, |11> -> -|11>."""
    if not 1 <= i <= modes - 1:
        raise ModeOutOfRange(f"adjacent swap index {i} outside 1..{modes - 1}")
    f = np.array(
        [
            [1, 0, 0, 0],
            [0, 0, 1, 0],
            [0, 1, 0, 0],
            [0, 0, 0, -1],
        ],
        dtype=complex,
    )
    left = np.eye(dim(i - 1), dtype=complex)
    right = np.eye(dim(modes - i - 1), dtype=complex)
    return np.kron(np.kron(left, f), right)


def reorder_unitary(frm: ModeOrdering, to: ModeOrdering) -> np.ndarray:
    """Product of adjacent fermionic swaps turning the ``frm`` layout into ``to``.

    Because fermionic swaps satisfy the symmetric-group relations, the result
    depends only on the two orderings, not on the bubble-sort path taken.
    """
    if frm.count != to.count:
        raise DimensionMismatch("orderings act on different mode counts")
    modes = frm.count
    # contents[s-1] = logical mode currently sitting at slot s
    contents = [0] * modes
    for mode in range(1, modes + 1):
        contents[frm.slot_of(mode) - 1] = mode
    target = [0] * modes
    for mode in range(1, modes + 1):
        target[to.slot_of(mode) - 1] = mode
    u = np.eye(dim(modes), dtype=complex)
    for pos in range(modes):
        want = target[pos]
        cur = contents.index(want)
        while cur > pos:
            u = fswap_adjacent(cur, modes) @ u
            contents[cur - 1], contents[cur] = contents[cur], contents[cur - 1]
            cur -= 1
    return u


def reorder_modes(matrix, frm: ModeOrdering, to: ModeOrdering) -> np.ndarray:
    """Re-express an operator's matrix under a different mode ordering."""
    m = as_matrix(matrix)
    if m.shape[0] != dim(frm.count) or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(
            f"matrix of shape {m.shape} does not match {frm.count} modes"
        )
    u = reorder_unitary(frm, to)
    return u @ m @ u.conj().T


@dataclass(frozen=True)
class FieldPolynomial:
    """Linear combination of the monomials
    ``prod_i phi_i^dag^{s_i} (phi_i phi_i^dag) phi_i^{t_i}``.

    Keys are ``(s, t)`` bit tuples of length ``modes``. Every matrix on the
    Fock space has a unique expansion in this basis; a monomial is even exactly
    when ``s`` and ``t`` have equal parity.
    """

    modes: int
    coefficients: dict[tuple[tuple[int, ...], tuple[int, ...]], complex]

    def even_part_only(self) -> bool:
        return all(
            (sum(s) + sum(t)) % 2 == 0 for (s, t) in self.coefficients
        )


@lru_cache(maxsize=None)
def _monomial_factor(i: int, modes: int, s: int, t: int) -> np.ndarray:
    f = jw_field(i, modes)
    m = f @ f.conj().T
    if s:
        m = f.conj().T @ m
    if t:
        m = m @ f
    m.setflags(write=False)
    return m


def poly_to_matrix(poly: FieldPolynomial, ordering: ModeOrdering | None = None) -> np.ndarray:
    """Evaluate a field polynomial as a dense matrix, one JW product per monomial."""
    modes = poly.modes
    if ordering is not None and ordering.count != modes:
        raise DimensionMismatch("ordering does not match polynomial mode count")
    out = np.zeros((dim(modes), dim(modes)), dtype=complex)
    for (s, t), coeff in poly.coefficients.items():
        if len(s) != modes or len(t) != modes:
            raise DimensionMismatch(f"key {(s, t)} does not match {modes} modes")
        term = np.eye(dim(modes), dtype=complex)
        for i in range(1, modes + 1):
            term = term @ _monomial_factor(i, modes, s[i - 1], t[i - 1])
        out += coeff * term
    if ordering is not None:
        out = reorder_modes(out, ModeOrdering(modes), ordering)
    return out


def _monomial_sign(s: tuple[int, ...], t: tuple[int, ...]) -> int:
    # The monomial equals sign * |s><t|; each parity-flipping factor i picks up
    # (-1)^(t_1 + ... + t_{i-1}) from the z-string acting on still-unchanged slots.
    sign = 1
    prefix = 0
    for si, ti in zip(s, t):
        if si != ti and prefix % 2 == 1:
            sign = -sign
        prefix += ti
    return sign


def matrix_to_poly(matrix, modes: int) -> FieldPolynomial:
    """Expand a matrix in the monomial basis (inverse of :func:`poly_to_matrix`)."""
    m = as_matrix(matrix)
    if m.shape != (dim(modes), dim(modes)):
        raise DimensionMismatch(f"matrix of shape {m.shape} does not match {modes} modes")
    coeffs = {}
    for row in range(dim(modes)):
        s = occupations(row, modes)
        for col in range(dim(modes)):
            if m[row, col] == 0:
                continue
            t = occupations(col, modes)
            coeffs[(s, t)] = _monomial_sign(s, t) * m[row, col]
    return FieldPolynomial(modes, coeffs)


def double_ket(x) -> np.ndarray:
    """|X>> = sum_ij X_ij |i>|j>, i.e. row-major vectorisation."""
    return as_matrix(x).reshape(-1)


def double_ket_inv(v, rows: int, cols: int) -> np.ndarray:
    vec = np.asarray(v, dtype=complex).reshape(-1)
    if vec.size != rows * cols:
        raise DimensionMismatch(f"vector of length {vec.size} is not {rows}x{cols}")
    return vec.reshape(rows, cols)
