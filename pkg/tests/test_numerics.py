import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from matprobe.errors import DimensionError, ValidationError
from matprobe.numerics import (RandomStream, dft, draw_sequence, hermitian_eigenvalues,
                               hermitian_norm, least_squares, singular_values, spectral_norm)

from conftest import crandn


def test_dft_delta_is_constant():
    np.testing.assert_allclose(dft([1, 0, 0], (3,)), np.full(3, 1 / 3))


def test_dft_constant_is_delta():
    out = dft(np.ones(5), (5,))
    np.testing.assert_allclose(out, [0, 0, 1, 0, 0], atol=1e-15)


def test_dft_centered_frequency_order():
    # e^{2 pi i x} has its mass at xi = +1, index xi0 + 1
    x = np.arange(7) / 7
    out = dft(np.exp(2j * np.pi * x), (7,))
    np.testing.assert_allclose(out, np.eye(7)[4], atol=1e-14)


@given(st.integers(1, 40), st.integers(0, 2**31))
@settings(max_examples=30, deadline=None)
def test_dft_round_trip(n, seed):
    v = crandn(np.random.default_rng(seed), n)
    back = dft(dft(v, (n,)), (n,), "inverse")
    assert np.linalg.norm(back - v) <= 1e-12 * np.linalg.norm(v)


def test_dft_round_trip_n12_and_2d(rng):
    v = crandn(rng, 12)
    np.testing.assert_allclose(dft(dft(v, (12,)), (12,), "inverse"), v, rtol=1e-12)
    w = crandn(rng, 3, 25)
    np.testing.assert_allclose(dft(dft(w, (5, 5)), (5, 5), "inverse"), w, atol=1e-12)


def test_dft_2d_is_separable(rng):
    v = crandn(rng, 25)
    direct = np.fft.fftshift(np.fft.fft2(v.reshape(5, 5))).ravel() / 25
    np.testing.assert_allclose(dft(v, (5, 5)), direct, atol=1e-14)


def test_dft_rejects_bad_input():
    with pytest.raises(DimensionError):
        dft(np.ones(6), (5,))
    with pytest.raises(ValidationError):
        dft(np.ones(5), (5,), "sideways")


def test_least_squares_identity(rng):
    b = crandn(rng, 4)
    res = least_squares(np.eye(4), b)
    np.testing.assert_allclose(res.solution, b)
    assert not res.rank_deficient


def test_least_squares_consistent_system(rng):
    L = crandn(rng, 50, 10)
    c = crandn(rng, 10)
    res = least_squares(L, L @ c)
    assert np.linalg.norm(res.solution - c) <= 1e-10 * np.linalg.norm(c)
    assert res.rank == 10


def test_least_squares_duplicated_column_flags(rng):
    L = crandn(rng, 20, 4)
    L[:, 3] = L[:, 1]
    res = least_squares(L, crandn(rng, 20))
    assert res.rank_deficient
    assert np.all(np.isfinite(res.solution))


def test_least_squares_underdetermined_raises(rng):
    with pytest.raises(DimensionError):
        least_squares(crandn(rng, 3, 5), crandn(rng, 3))
    with pytest.raises(DimensionError):
        least_squares(crandn(rng, 5, 3), crandn(rng, 4))
    with pytest.raises(ValidationError):
        least_squares(np.full((5, 3), np.nan), np.ones(5))


def test_singular_values_examples(rng):
    np.testing.assert_allclose(singular_values(np.diag([3.0, 1.0, 2.0])), [3, 2, 1])
    np.testing.assert_allclose(singular_values(np.ones((3, 3))), [3, 0, 0], atol=1e-14)
    A = crandn(rng, 6, 4)
    s = singular_values(A)
    assert abs(np.sum(s**2) - np.linalg.norm(A, "fro") ** 2) <= 1e-10 * np.sum(s**2)
    assert spectral_norm(A) == pytest.approx(s[0])


def test_hermitian_eigenvalues_examples(rng):
    np.testing.assert_allclose(hermitian_eigenvalues(np.eye(3)), [1, 1, 1])
    np.testing.assert_allclose(hermitian_eigenvalues(np.diag([5.0, -1.0, 2.0])), [-1, 2, 5])
    X = crandn(rng, 5, 5)
    H = X + X.conj().T
    assert abs(hermitian_eigenvalues(H).sum() - np.trace(H).real) <= 1e-10
    assert hermitian_norm(np.diag([1.0, -4.0])) == pytest.approx(4.0)


def test_hermitian_eigenvalues_rejects_non_hermitian():
    with pytest.raises(ValidationError):
        hermitian_eigenvalues(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_rademacher_entries():
    v = draw_sequence(RandomStream(99), 1000, "rademacher")
    assert set(np.unique(v.real)) == {-1.0, 1.0}
    assert np.all(v.imag == 0)


def test_stream_determinism():
    a = draw_sequence(RandomStream(5, (1, 2)), 64)
    b = draw_sequence(RandomStream(5, (1, 2)), 64)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, draw_sequence(RandomStream(5, (1, 3)), 64))
    assert not np.array_equal(a, draw_sequence(RandomStream(6, (1, 2)), 64))


def test_stream_counter_advances():
    s = RandomStream(0)
    first, second = s.draw(8), s.draw(8)
    assert not np.array_equal(first, second)
    np.testing.assert_array_equal(RandomStream(0).draw(8), first)


def test_gaussian_moments():
    n = 10**5
    v = draw_sequence(RandomStream(2024), n).real
    assert abs(v.mean()) <= 3 / np.sqrt(n)
    assert 0.95 <= v.var() <= 1.05


def test_unknown_kind_rejected():
    with pytest.raises(ValidationError):
        draw_sequence(RandomStream(0), 4, "uniform")
