"""Dense linear algebra, centered DFTs and reproducible random probes.

Vectors live on the last axis; leading axes are batch axes.  The DFT
convention is

    forward:  u_hat(xi) = (1/n) sum_x u(x) exp(-2 pi i xi.x)
    inverse:  u(x)      = sum_xi u_hat(xi) exp(+2 pi i xi.x)

with frequencies in centered order (``-(n1 // 2), ..., n1 - 1 - n1 // 2``
per axis, row-major over axes).
"""

from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np
import scipy.linalg

from .errors import DimensionError, ValidationError

RANK_TOL = 1e-12


def _check_finite(*arrays):
    for a in arrays:
        if not np.all(np.isfinite(a)):
            raise ValidationError("non-finite entries in input")


def dft(v, shape: Sequence[int], direction: str = "forward") -> np.ndarray:
    """Centered multi-axis DFT of the trailing axis of ``v``.

    ``shape`` gives the per-axis lengths of the grid flattened row-major
    into the last axis.  Any positive length is accepted.
    """
    v = np.asarray(v, dtype=complex)
    shape = tuple(int(s) for s in shape)
    if any(s < 1 for s in shape):
        raise DimensionError(f"axis lengths must be positive, got {shape}")
    n = int(np.prod(shape))
    if v.shape[-1:] != (n,):
        raise DimensionError(f"vector length {v.shape[-1:]} does not match grid {shape}")
    batch = v.shape[:-1]
    axes = tuple(range(len(batch), len(batch) + len(shape)))
    w = v.reshape(batch + shape)
    if direction == "forward":
        out = np.fft.fftshift(np.fft.fftn(w, axes=axes), axes=axes) / n
    elif direction == "inverse":
        out = np.fft.ifftn(np.fft.ifftshift(w, axes=axes), axes=axes) * n
    else:
        raise ValidationError(f"unknown direction {direction!r}")
    return out.reshape(batch + (n,))


class LstsqResult(NamedTuple):
    solution: np.ndarray
    rank: int
    rank_deficient: bool


def least_squares(L, b) -> LstsqResult:
    """Minimize ``||L c - b||`` by column-pivoted Householder QR.

    Columns whose pivot falls below ``RANK_TOL`` times the largest pivot are
    treated as dependent; the minimal-norm minimizer is then returned and
    ``rank_deficient`` is set.
    """
    L = np.asarray(L, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if L.ndim != 2 or b.ndim != 1:
        raise DimensionError("expected a matrix and a vector")
    m, p = L.shape
    if m < p:
        raise DimensionError(f"underdetermined system: {m} rows < {p} columns")
    if b.shape[0] != m:
        raise DimensionError(f"right-hand side has length {b.shape[0]}, expected {m}")
    _check_finite(L, b)

    Q, R, perm = scipy.linalg.qr(L, mode="economic", pivoting=True)
    pivots = np.abs(np.diag(R))
    if pivots.size == 0 or pivots[0] == 0.0:
        return LstsqResult(np.zeros(p, dtype=complex), 0, True)
    rank = int(np.sum(pivots > RANK_TOL * pivots[0]))
    if rank == p:
        y = scipy.linalg.solve_triangular(R, Q.conj().T @ b)
        c = np.empty(p, dtype=complex)
        c[perm] = y
        return LstsqResult(c, rank, False)
    c, *_ = np.linalg.lstsq(L, b, rcond=RANK_TOL)
    return LstsqResult(c, rank, True)


def singular_values(A) -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    _check_finite(A)
    return np.linalg.svd(A, compute_uv=False)


def hermitian_eigenvalues(M, tol: float = 1e-12) -> np.ndarray:
    """Ascending eigenvalues of a Hermitian matrix (symmetrized first)."""
    M = np.asarray(M, dtype=complex)
    _check_finite(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError(f"expected a square matrix, got {M.shape}")
    scale = max(1.0, float(np.max(np.abs(M)))) if M.size else 1.0
    if np.max(np.abs(M - M.conj().T), initial=0.0) > tol * scale:
        raise ValidationError("matrix is not Hermitian")
    return np.linalg.eigvalsh(0.5 * (M + M.conj().T))


def spectral_norm(A) -> float:
    return float(singular_values(A)[0])


def hermitian_norm(M) -> float:
    """Spectral norm of a Hermitian matrix via its eigenvalues."""
    ev = hermitian_eigenvalues(M, tol=1e-8)
    return float(max(abs(ev[0]), abs(ev[-1])))


class RandomStream:
    """Counter-based random stream keyed by ``(seed, key)``.

    Every draw uses a fresh PCG64 generator seeded from
    ``SeedSequence(seed, spawn_key=key + (counter,))``, so a draw depends only
    on the seed, the key and how many draws preceded it.  Independent
    sub-streams are obtained with :meth:`substream`, never by sharing.
    """

    algorithm = "pcg64"

    def __init__(self, seed: int, key: tuple = ()):
        seed = int(seed)
        if not 0 <= seed < 2**64:
            raise ValidationError("seed must be a 64-bit unsigned integer")
        self.seed = seed
        self.key = tuple(int(k) for k in key)
        self.counter = 0

    def substream(self, *key: int) -> "RandomStream":
        return RandomStream(self.seed, self.key + tuple(key))

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=self.key + (self.counter,))
        self.counter += 1
        return np.random.Generator(np.random.PCG64(ss))

    def draw(self, n: int, kind: str = "gaussian") -> np.ndarray:
        return draw_sequence(self, n, kind)

    def __repr__(self):
        return f"RandomStream(seed={self.seed}, key={self.key}, counter={self.counter})"


def draw_sequence(stream: RandomStream, n: int, kind: str = "gaussian") -> np.ndarray:
    """Real-valued iid probe vector (stored complex) from the next stream slot."""
    if n < 1:
        raise ValidationError("n must be at least 1")
    if kind not in ("gaussian", "rademacher"):
        raise ValidationError(f"unknown probe kind {kind!r}")
    rng = stream.generator()
    if kind == "gaussian":
        x = rng.standard_normal(n)
    else:
        x = 2.0 * rng.integers(0, 2, size=n) - 1.0
    return x.astype(complex)
