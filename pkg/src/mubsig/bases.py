"""Construction of the measurement bases and entangled pair bases.

Two families are built for each prime dimension d:

* the plain family: the computational basis plus d quadratic-phase bases
  |m;b> = (1/sqrt d) sum_n |n> w^(b n^2 - 2 n m), all d+1 mutually
  unbiased, where w = i for d = 2 and w = exp(2 pi i / d) otherwise;
* the hat family: the same construction transported through the basis
  |m-hat> = sum_n |n> h[m, n], where h is the principal square root of
  the d-dimensional Fourier matrix.

The phase exponent b n^2 - 2 n m is an exact integer and is reduced only
modulo the true period of w (4 when d = 2, else d); reducing mod d first
would silently corrupt the d = 2 bases.

Entangled pair states |c,r;s> = (1/sqrt d) sum_n |n>|c-n> w^(s n^2 - 2 r n)
form, for fixed s, an orthonormal basis of the pair space; the hat
variant transports the s = 0 basis through the hat unitary on both halves.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .finite_field import PrimeDim
from .quantum import Ket, OrthonormalBasis, TOLERANCE, _frozen


class Family(enum.Enum):
    """Which of the two basis families a label refers to."""

    PLAIN = "plain"
    HAT = "hat"


@dataclass(frozen=True)
class BasisId:
    """Family plus label of one measurement basis.

    ``quad`` is None for the computational-type basis of the family and
    the quadratic label b in 0..d-1 otherwise.
    """

    family: Family
    quad: int | None = None

    def __post_init__(self) -> None:
        if self.quad is not None and (isinstance(self.quad, bool)
                                      or not isinstance(self.quad, int)):
            raise TypeError("quad label must be an int or None")
        if self.quad is not None and self.quad < 0:
            raise ValueError(f"quad label must be nonnegative, got {self.quad}")

    @property
    def is_computational(self) -> bool:
        return self.quad is None

    def text(self) -> str:
        label = "comp" if self.quad is None else f"q{self.quad}"
        return label if self.family is Family.PLAIN else f"hat-{label}"

    @classmethod
    def parse(cls, text: str) -> BasisId:
        body = text.strip()
        family = Family.PLAIN
        if body.startswith("hat-"):
            family = Family.HAT
            body = body[4:]
        if body == "comp":
            return cls(family, None)
        if body.startswith("q") and body[1:].isdigit():
            return cls(family, int(body[1:]))
        raise ValueError(f"unrecognized basis label {text!r}")


def basis_alphabet(d: int, families: tuple[Family, ...] = (Family.PLAIN,)
                   ) -> tuple[BasisId, ...]:
    """All basis labels of the given families, computational first."""
    _prime(d)
    out: list[BasisId] = []
    for family in families:
        out.append(BasisId(family, None))
        out.extend(BasisId(family, b) for b in range(d))
    return tuple(out)


@functools.lru_cache(maxsize=None)
def _prime(d: int) -> PrimeDim:
    return PrimeDim(d)


_I_POWERS = (1 + 0j, 1j, -1 + 0j, -1j)


def omega(d: int) -> complex:
    """The phase unit for dimension d: i for d = 2, exp(2 pi i / d) otherwise."""
    return omega_power(d, 1)


def omega_power(d: int, exponent: int) -> complex:
    """omega(d) raised to an exact integer exponent.

    The exponent is reduced modulo the actual period of omega: 4 for
    d = 2 (omega = i), d otherwise.
    """
    _prime(d)
    if d == 2:
        return _I_POWERS[exponent % 4]
    return complex(np.exp(2j * np.pi * (exponent % d) / d))


def mub_ket(d: int, basis: BasisId, m: int) -> Ket:
    """The m-th ket of one measurement basis (either family)."""
    _prime(d)
    if not 0 <= m < d:
        raise ValueError(f"ket index {m} outside [0, {d})")
    if basis.quad is not None and basis.quad >= d:
        raise ValueError(f"quad label {basis.quad} outside [0, {d})")
    if basis.family is Family.HAT:
        plain = mub_ket(d, BasisId(Family.PLAIN, basis.quad), m)
        return Ket(hat_unitary(d) @ plain.amplitudes)
    if basis.quad is None:
        return Ket.basis_state(m, d)
    b = basis.quad
    n = np.arange(d)
    amps = np.array([omega_power(d, b * k * k - 2 * k * m) for k in n]) / math.sqrt(d)
    return Ket(amps)


@functools.lru_cache(maxsize=None)
def measurement_basis(d: int, basis: BasisId) -> OrthonormalBasis:
    """All d kets of one measurement basis, validated as orthonormal."""
    return OrthonormalBasis([mub_ket(d, basis, m) for m in range(d)])


def _fourier_matrix(d: int) -> np.ndarray:
    n = np.arange(d)
    return np.exp(2j * np.pi * np.outer(n, n) / d) / math.sqrt(d)


@functools.lru_cache(maxsize=None)
def hadamard_root(d: int) -> np.ndarray:
    """Principal square root h of the Fourier matrix, so h @ h = F.

    F is unitary, hence normal; its Schur form is diagonal and the
    eigenphases theta in (-pi, pi] halve to give the principal root.
    Eigenvalues that land infinitesimally below the branch cut at -pi
    are folded back to +pi so roundoff cannot flip a branch.
    """
    _prime(d)
    f = _fourier_matrix(d)
    t, q = scipy.linalg.schur(f, output="complex")
    off = np.abs(t - np.diag(np.diag(t))).max()
    if off > 1e-8:
        raise RuntimeError(f"Schur form of a normal matrix not diagonal (off={off!r})")
    eig = np.diag(t)
    eig = eig / np.abs(eig)
    theta = np.angle(eig)
    theta[theta < -np.pi + 1e-9] = np.pi
    h = (q * np.exp(0.5j * theta)) @ q.conj().T
    if np.abs(h @ h - f).max() > TOLERANCE:
        raise RuntimeError("matrix square root failed to reproduce the Fourier matrix")
    if np.abs(h @ h.conj().T - np.eye(d)).max() > TOLERANCE:
        raise RuntimeError("matrix square root is not unitary")
    return _frozen(h)


def hat_ket(d: int, m: int) -> Ket:
    """|m-hat> = sum_n |n> h[m, n]."""
    if not 0 <= m < d:
        raise ValueError(f"ket index {m} outside [0, {d})")
    return Ket(hadamard_root(d)[m, :])


@functools.lru_cache(maxsize=None)
def hat_unitary(d: int) -> np.ndarray:
    """The unitary sending |m> to |m-hat> (column m is the m-th hat ket).

    The hat basis is only useful if it is genuinely different from the
    computational basis and not mutually unbiased to it; both properties
    are checked here per dimension and violations raise.
    """
    u = np.column_stack([hat_ket(d, m).amplitudes for m in range(d)])
    eye = np.eye(d)
    separation = max(
        np.linalg.norm(u[:, [m]] - eye, axis=0).min() for m in range(d)
    )
    if separation <= 0.1:
        raise RuntimeError(
            f"hat basis coincides with the computational basis at d={d}")
    overlap_dev = np.abs(np.abs(u) ** 2 - 1.0 / d).max()
    if overlap_dev <= 1e-3:
        raise RuntimeError(
            f"hat basis is mutually unbiased to the computational basis at d={d}")
    return _frozen(u)


def entangled_ket(d: int, c: int, r: int, s: int) -> Ket:
    """|c,r;s> = (1/sqrt d) sum_n |n>|c-n> w^(s n^2 - 2 r n), indices mod d."""
    _prime(d)
    for name, v in (("c", c), ("r", r), ("s", s)):
        if not 0 <= v < d:
            raise ValueError(f"label {name}={v} outside [0, {d})")
    amps = np.zeros(d * d, dtype=complex)
    for n in range(d):
        amps[n * d + (c - n) % d] = omega_power(d, s * n * n - 2 * r * n)
    return Ket(amps / math.sqrt(d), dims=(d, d))


def hat_entangled_ket(d: int, c: int, r: int) -> Ket:
    """The s = 0 entangled ket with both halves transported to the hat basis."""
    u = hat_unitary(d)
    plain = entangled_ket(d, c, r, 0)
    return Ket(np.kron(u, u) @ plain.amplitudes, dims=(d, d))


def pair_outcome_labels(d: int) -> tuple[tuple[int, int], ...]:
    """(c, r) labels of the entangled basis, in flat index order c*d + r."""
    _prime(d)
    return tuple((c, r) for c in range(d) for r in range(d))


@functools.lru_cache(maxsize=None)
def entangled_basis(d: int, s: int = 0, family: Family = Family.PLAIN
                    ) -> OrthonormalBasis:
    """The d^2 entangled kets {|c,r;s>} as a pair basis, ordered by (c, r).

    The hat family is defined only at s = 0.
    """
    _prime(d)
    if not 0 <= s < d:
        raise ValueError(f"label s={s} outside [0, {d})")
    if family is Family.HAT:
        if s != 0:
            raise ValueError("hat entangled basis exists only for s=0")
        kets = [hat_entangled_ket(d, c, r) for c, r in pair_outcome_labels(d)]
    else:
        kets = [entangled_ket(d, c, r, s) for c, r in pair_outcome_labels(d)]
    return OrthonormalBasis(kets)
