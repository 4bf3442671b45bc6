"""Dense complex linear algebra for one- and two-qudit states.

States are plain numpy arrays wrapped in thin value types that validate
their defining invariants once, at construction.  The joint index
convention for a pair is (n1, n2) -> n1 * d + n2.  All comparisons use a
single numeric tolerance; probabilities that dip below zero by more than
that tolerance are treated as bugs, not noise.
"""

from __future__ import annotations

from typing import Iterator, Sequence

import numpy as np

TOLERANCE = 1e-10


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def _check_dims(dims: tuple[int, ...], size: int) -> tuple[int, ...]:
    dims = tuple(int(x) for x in dims)
    if len(dims) not in (1, 2) or any(x < 2 for x in dims):
        raise ValueError(f"dims must be (D,) or (d, d), got {dims}")
    if len(dims) == 2 and dims[0] != dims[1]:
        raise ValueError(f"pair dims must be equal, got {dims}")
    if int(np.prod(dims)) != size:
        raise ValueError(f"dims {dims} do not match vector size {size}")
    return dims


class Ket:
    """A unit-norm complex amplitude vector.

    ``dims`` is ``(D,)`` for a single system or ``(d, d)`` for a qudit
    pair.  Construction rejects non-unit vectors; use :meth:`normalized`
    to rescale explicitly.
    """

    __slots__ = ("_amps", "_dims")

    def __init__(self, amplitudes: Sequence[complex] | np.ndarray,
                 dims: tuple[int, ...] | None = None):
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1).copy()
        self._dims = _check_dims(dims if dims is not None else (amps.size,), amps.size)
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > TOLERANCE:
            raise ValueError(f"ket must have unit norm, got {norm!r}")
        self._amps = _frozen(amps)

    @classmethod
    def normalized(cls, amplitudes: Sequence[complex] | np.ndarray,
                   dims: tuple[int, ...] | None = None) -> Ket:
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        norm = np.linalg.norm(amps)
        if norm <= TOLERANCE:
            raise ValueError("cannot normalize a (near-)zero vector")
        return cls(amps / norm, dims)

    @classmethod
    def basis_state(cls, index: int, dims: tuple[int, ...] | int) -> Ket:
        if isinstance(dims, int):
            dims = (dims,)
        size = int(np.prod(dims))
        if not 0 <= index < size:
            raise ValueError(f"basis index {index} outside [0, {size})")
        amps = np.zeros(size, dtype=complex)
        amps[index] = 1.0
        return cls(amps, dims)

    @property
    def amplitudes(self) -> np.ndarray:
        return self._amps

    @property
    def dims(self) -> tuple[int, ...]:
        return self._dims

    @property
    def size(self) -> int:
        return self._amps.size

    def __repr__(self) -> str:
        return f"Ket(dims={self._dims}, amplitudes={self._amps!r})"


def tensor(a: Ket, b: Ket) -> Ket:
    """Joint state of two single qudits of equal dimension."""
    if len(a.dims) != 1 or len(b.dims) != 1:
        raise ValueError("tensor expects two single-qudit kets")
    if a.dims != b.dims:
        raise ValueError(f"tensor expects equal dims, got {a.dims} and {b.dims}")
    d = a.dims[0]
    return Ket(np.kron(a.amplitudes, b.amplitudes), dims=(d, d))


def inner(a: Ket, b: Ket) -> complex:
    """Hermitian inner product <a|b>, conjugate-linear in ``a``."""
    if a.size != b.size:
        raise ValueError(f"size mismatch: {a.size} vs {b.size}")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


class DensityOperator:
    """A density matrix: Hermitian, unit trace, positive semidefinite.

    All three properties are checked at construction within
    :data:`TOLERANCE`, so anything that survives construction is safe to
    feed onward without re-validation.
    """

    __slots__ = ("_matrix", "_dims")

    def __init__(self, matrix: np.ndarray, dims: tuple[int, ...] | None = None):
        m = np.asarray(matrix, dtype=complex).copy()
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"density matrix must be square, got shape {m.shape}")
        self._dims = _check_dims(dims if dims is not None else (m.shape[0],), m.shape[0])
        if np.abs(m - m.conj().T).max() > TOLERANCE:
            raise ValueError("density matrix must be Hermitian")
        tr = np.trace(m)
        if abs(tr - 1.0) > TOLERANCE:
            raise ValueError(f"density matrix must have unit trace, got {tr!r}")
        lo = np.linalg.eigvalsh((m + m.conj().T) / 2.0).min()
        if lo < -TOLERANCE:
            raise ValueError(f"density matrix must be positive semidefinite, "
                             f"smallest eigenvalue {lo!r}")
        self._matrix = _frozen(m)

    @classmethod
    def from_ket(cls, ket: Ket) -> DensityOperator:
        amps = ket.amplitudes
        return cls(np.outer(amps, amps.conj()), dims=ket.dims)

    @classmethod
    def maximally_mixed(cls, dims: tuple[int, ...] | int) -> DensityOperator:
        if isinstance(dims, int):
            dims = (dims,)
        size = int(np.prod(dims))
        return cls(np.eye(size, dtype=complex) / size, dims=dims)

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def dims(self) -> tuple[int, ...]:
        return self._dims

    @property
    def size(self) -> int:
        return self._matrix.shape[0]

    def __repr__(self) -> str:
        return f"DensityOperator(dims={self._dims}, trace={np.trace(self._matrix)!r})"


class OrthonormalBasis:
    """A complete orthonormal set of kets for one system.

    Completeness and pairwise orthonormality are checked once via the
    Gram matrix; the column matrix (ket i in column i) is kept for fast
    vectorized projections.
    """

    __slots__ = ("_kets", "_matrix", "_dims")

    def __init__(self, kets: Sequence[Ket]):
        kets = tuple(kets)
        if not kets:
            raise ValueError("basis needs at least one ket")
        dims = kets[0].dims
        if any(k.dims != dims for k in kets):
            raise ValueError("all basis kets must share the same dims")
        size = kets[0].size
        if len(kets) != size:
            raise ValueError(f"basis must have {size} kets, got {len(kets)}")
        matrix = np.column_stack([k.amplitudes for k in kets])
        gram = matrix.conj().T @ matrix
        if np.abs(gram - np.eye(size)).max() > TOLERANCE:
            raise ValueError("kets are not orthonormal")
        self._kets = kets
        self._matrix = _frozen(matrix)
        self._dims = dims

    @property
    def kets(self) -> tuple[Ket, ...]:
        return self._kets

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def dims(self) -> tuple[int, ...]:
        return self._dims

    def __len__(self) -> int:
        return len(self._kets)

    def __getitem__(self, i: int) -> Ket:
        return self._kets[i]

    def __iter__(self) -> Iterator[Ket]:
        return iter(self._kets)


def _clean_probabilities(p: np.ndarray) -> np.ndarray:
    if p.min() < -TOLERANCE:
        raise ValueError(f"probability {p.min()!r} below -tolerance; "
                         "upstream state is corrupt")
    p = np.clip(p, 0.0, None)
    total = p.sum()
    if abs(total - 1.0) > TOLERANCE:
        raise ValueError(f"probabilities sum to {total!r}, expected 1")
    return p


def born_probabilities(rho: DensityOperator, basis: OrthonormalBasis) -> np.ndarray:
    """Outcome probabilities <e_i|rho|e_i| for a projective measurement."""
    if rho.dims != basis.dims:
        raise ValueError(f"dims mismatch: state {rho.dims}, basis {basis.dims}")
    b = basis.matrix
    p = np.einsum("ji,jk,ki->i", b.conj(), rho.matrix, b).real
    return _clean_probabilities(p)


def nonselective_measure(rho: DensityOperator, subsystem: int,
                         basis: OrthonormalBasis) -> DensityOperator:
    """Measure one half of a pair projectively and forget the outcome.

    Returns sum_m P_m rho P_m with P_m acting on ``subsystem`` (1 or 2).
    """
    if len(rho.dims) != 2:
        raise ValueError("nonselective_measure expects a two-qudit state")
    if subsystem not in (1, 2):
        raise ValueError(f"subsystem must be 1 or 2, got {subsystem}")
    d = rho.dims[0]
    if basis.dims != (d,):
        raise ValueError(f"basis dims {basis.dims} do not match subsystem dim {d}")
    eye = np.eye(d, dtype=complex)
    out = np.zeros_like(rho.matrix)
    for ket in basis:
        proj = np.outer(ket.amplitudes, ket.amplitudes.conj())
        lifted = np.kron(proj, eye) if subsystem == 1 else np.kron(eye, proj)
        out += lifted @ rho.matrix @ lifted
    return DensityOperator(out, dims=rho.dims)


def partial_trace(rho: DensityOperator, keep: int) -> DensityOperator:
    """Reduced state of one half of a pair (``keep`` is 1 or 2)."""
    if len(rho.dims) != 2:
        raise ValueError("partial_trace expects a two-qudit state")
    if keep not in (1, 2):
        raise ValueError(f"keep must be 1 or 2, got {keep}")
    d = rho.dims[0]
    r = rho.matrix.reshape(d, d, d, d)
    if keep == 1:
        reduced = np.trace(r, axis1=1, axis2=3)
    else:
        reduced = np.trace(r, axis1=0, axis2=2)
    return DensityOperator(reduced, dims=(d,))


def sample_outcome(probs: np.ndarray, rng: np.random.Generator,
                   size: int | None = None) -> int | np.ndarray:
    """Draw outcome indices by inverse-CDF in the given ordering.

    With ``size=None`` returns a single int; otherwise an int64 array.
    """
    p = _clean_probabilities(np.asarray(probs, dtype=float))
    cdf = np.cumsum(p)
    u = rng.random() if size is None else rng.random(size)
    idx = np.searchsorted(cdf, u, side="right")
    idx = np.minimum(idx, p.size - 1)
    if size is None:
        return int(idx)
    return idx.astype(np.int64)
