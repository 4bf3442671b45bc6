import numpy as np
import pytest
from numpy.testing import assert_allclose

from mubsig.bases import (
    BasisId,
    Family,
    basis_alphabet,
    entangled_basis,
    entangled_ket,
    hadamard_root,
    hat_entangled_ket,
    hat_ket,
    hat_unitary,
    measurement_basis,
    mub_ket,
    omega,
    omega_power,
    pair_outcome_labels,
)

SQRT2 = np.sqrt(2.0)


def fourier_matrix(d):
    m, n = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    return np.exp(2j * np.pi * m * n / d) / np.sqrt(d)


# ---------------------------------------------------------------------------
# Labels
# ---------------------------------------------------------------------------

def test_basis_id_text_round_trip():
    for b in [BasisId(Family.PLAIN, None), BasisId(Family.PLAIN, 2),
              BasisId(Family.HAT, None), BasisId(Family.HAT, 0)]:
        assert BasisId.parse(b.text()) == b
    assert BasisId(Family.PLAIN, None).text() == "comp"
    assert BasisId(Family.PLAIN, 1).text() == "q1"
    assert BasisId(Family.HAT, 1).text() == "hat-q1"


def test_basis_id_parse_rejects_garbage():
    for bad in ["", "comp2", "qx", "hat", "hat-", "q-1"]:
        with pytest.raises(ValueError):
            BasisId.parse(bad)


def test_basis_id_validation():
    with pytest.raises(ValueError):
        BasisId(Family.PLAIN, -1)
    assert BasisId(Family.PLAIN, None).is_computational
    assert not BasisId(Family.PLAIN, 0).is_computational


def test_basis_alphabet_order_and_count():
    plain = basis_alphabet(3)
    assert len(plain) == 4
    assert plain[0].is_computational
    assert [b.quad for b in plain[1:]] == [0, 1, 2]
    both = basis_alphabet(2, (Family.PLAIN, Family.HAT))
    assert len(both) == 6
    assert [b.family for b in both] == [Family.PLAIN] * 3 + [Family.HAT] * 3


# ---------------------------------------------------------------------------
# Roots of unity: exact integer exponents, special period-4 case at d=2.
# ---------------------------------------------------------------------------

def test_omega_d2_has_period_four():
    assert omega(2) == 1j
    assert omega_power(2, 2) == -1
    assert omega_power(2, 3) == -1j
    assert omega_power(2, 4) == 1
    # reducing mod d instead of mod 4 would alias these two
    assert omega_power(2, 1) != omega_power(2, 3)


def test_omega_odd_prime():
    for d in (3, 5, 7):
        assert_allclose(omega(d), np.exp(2j * np.pi / d), atol=1e-15)
        assert_allclose(omega_power(d, d), 1.0, atol=1e-12)
        total = sum(omega_power(d, k) for k in range(d))
        assert abs(total) < 1e-12


def test_omega_power_handles_negative_exponents():
    assert omega_power(2, -1) == -1j
    assert_allclose(omega_power(5, -2) * omega_power(5, 2), 1.0, atol=1e-14)


# ---------------------------------------------------------------------------
# Single-qudit bases
# ---------------------------------------------------------------------------

def test_mub_ket_d2_frozen_amplitudes():
    """The exact d=2 kets: quadratic phases land on {1, i, -1, -i}."""
    assert_allclose(mub_ket(2, BasisId(Family.PLAIN, 0), 0).amplitudes,
                    np.array([1, 1]) / SQRT2, atol=1e-15)
    assert_allclose(mub_ket(2, BasisId(Family.PLAIN, 1), 0).amplitudes,
                    np.array([1, 1j]) / SQRT2, atol=1e-15)
    assert_allclose(mub_ket(2, BasisId(Family.PLAIN, 0), 1).amplitudes,
                    np.array([1, -1]) / SQRT2, atol=1e-15)
    assert_allclose(mub_ket(2, BasisId(Family.PLAIN, 1), 1).amplitudes,
                    np.array([1, -1j]) / SQRT2, atol=1e-15)


def test_mub_ket_computational():
    for d in (2, 3):
        for m in range(d):
            amps = mub_ket(d, BasisId(Family.PLAIN, None), m).amplitudes
            expected = np.zeros(d)
            expected[m] = 1.0
            assert_allclose(amps, expected)


def test_mub_ket_label_range():
    with pytest.raises(ValueError):
        mub_ket(3, BasisId(Family.PLAIN, 3), 0)
    with pytest.raises(ValueError):
        mub_ket(3, BasisId(Family.PLAIN, 0), 3)


def test_measurement_bases_orthonormal():
    for d in (2, 3, 5):
        for b in basis_alphabet(d, (Family.PLAIN, Family.HAT)):
            m = measurement_basis(d, b).matrix
            assert_allclose(m.conj().T @ m, np.eye(d), atol=1e-10)


def test_plain_unbiasedness_exhaustive():
    """|<m;b|m';b'>|^2 = 1/d for every distinct plain pair."""
    for d in (2, 3, 5):
        ids = basis_alphabet(d)
        mats = {b: measurement_basis(d, b).matrix for b in ids}
        for i, b1 in enumerate(ids):
            for b2 in ids[i + 1:]:
                overlaps = np.abs(mats[b1].conj().T @ mats[b2]) ** 2
                assert_allclose(overlaps, 1.0 / d, atol=1e-10)


# ---------------------------------------------------------------------------
# The square root of the Fourier matrix and the hat family.
# ---------------------------------------------------------------------------

def test_hadamard_root_squares_to_fourier():
    for d in (2, 3, 5, 7, 11):
        h = hadamard_root(d)
        assert_allclose(h @ h, fourier_matrix(d), atol=1e-12)
        assert_allclose(h @ h.conj().T, np.eye(d), atol=1e-12)


def test_hadamard_root_cached_and_frozen():
    h = hadamard_root(3)
    assert hadamard_root(3) is h
    with pytest.raises(ValueError):
        h[0, 0] = 0.0


def test_hat_kets_are_root_rows():
    for d in (2, 3):
        h = hadamard_root(d)
        for m in range(d):
            assert_allclose(hat_ket(d, m).amplitudes, h[m, :], atol=1e-15)


def test_hat_unitary_columns_are_hat_kets():
    u = hat_unitary(3)
    for m in range(3):
        assert_allclose(u[:, m], hat_ket(3, m).amplitudes, atol=1e-15)


def test_hat_family_differs_from_computational_but_is_not_unbiased():
    """The transported family must be distinct from the plain one yet
    share no unbiasedness with it; both margins are checked numerically."""
    for d in (2, 3, 5):
        u = hat_unitary(d)
        overlaps = np.abs(u) ** 2
        assert np.abs(overlaps - 1.0 / d).max() > 1e-3
        assert overlaps.max() < 1.0 - 1e-6  # no hat ket equals a plain ket


def test_hat_unbiasedness_within_family():
    for d in (2, 3, 5):
        ids = basis_alphabet(d, (Family.HAT,))
        mats = {b: measurement_basis(d, b).matrix for b in ids}
        for i, b1 in enumerate(ids):
            for b2 in ids[i + 1:]:
                overlaps = np.abs(mats[b1].conj().T @ mats[b2]) ** 2
                assert_allclose(overlaps, 1.0 / d, atol=1e-10)


# ---------------------------------------------------------------------------
# Entangled pair states
# ---------------------------------------------------------------------------

def test_entangled_ket_d2_is_bell_state():
    amps = entangled_ket(2, 0, 0, 0).amplitudes
    assert_allclose(amps, np.array([1, 0, 0, 1]) / SQRT2, atol=1e-15)


def test_entangled_ket_structure():
    """Amplitude of |n, c-n> is w^(s n^2 - 2 r n)/sqrt(d); all else 0."""
    for d in (2, 3, 5):
        for (c, r, s) in [(0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 1, 1),
                          (d - 1, d - 1, d - 1)]:
            amps = entangled_ket(d, c, r, s).amplitudes
            for n in range(d):
                expected = omega_power(d, s * n * n - 2 * r * n) / np.sqrt(d)
                assert abs(amps[n * d + (c - n) % d] - expected) < 1e-14
            assert np.count_nonzero(np.abs(amps) > 1e-14) == d


def test_entangled_ket_label_range():
    with pytest.raises(ValueError):
        entangled_ket(3, 3, 0, 0)
    with pytest.raises(ValueError):
        entangled_ket(3, 0, -1, 0)


def test_entangled_basis_orthonormal_every_s():
    for d in (2, 3, 5):
        for s in range(d):
            m = entangled_basis(d, s).matrix
            assert_allclose(m.conj().T @ m, np.eye(d * d), atol=1e-10)


def test_entangled_basis_projector_completeness():
    for d in (2, 3):
        m = entangled_basis(d, 0).matrix
        total = sum(np.outer(m[:, i], m[:, i].conj()) for i in range(d * d))
        assert_allclose(total, np.eye(d * d), atol=1e-10)


def test_hat_entangled_ket_is_transported_plain():
    for d in (2, 3):
        u = hat_unitary(d)
        for (c, r) in [(0, 0), (1, 0), (0, 1)]:
            expected = np.kron(u, u) @ entangled_ket(d, c, r, 0).amplitudes
            assert_allclose(hat_entangled_ket(d, c, r).amplitudes, expected,
                            atol=1e-12)


def test_hat_entangled_basis_requires_s_zero():
    entangled_basis(3, 0, Family.HAT)
    with pytest.raises(ValueError):
        entangled_basis(3, 1, Family.HAT)


def test_pair_outcome_labels_row_major():
    assert pair_outcome_labels(2) == ((0, 0), (0, 1), (1, 0), (1, 1))


def test_reduced_states_maximally_mixed():
    """Either half of any pair ket carries no information at all."""
    from mubsig.quantum import DensityOperator, partial_trace

    for d in (2, 3):
        for (c, r, s) in [(0, 0, 0), (1, 0, 0), (0, 1, 1)]:
            rho = DensityOperator.from_ket(entangled_ket(d, c, r, s))
            for keep in (1, 2):
                reduced = partial_trace(rho, keep=keep)
                assert_allclose(reduced.matrix, np.eye(d) / d, atol=1e-10)
