"""Separable symbol bases ``e_j(x) g_k(xi) |xi|^m`` and their conditioning.

Elements are ordered lexicographically in ``(j, k)``: element ``i`` has
spatial label ``j_labels[i // n_k]`` and frequency label ``k_labels[i % n_k]``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DimensionError, ValidationError
from .numerics import hermitian_eigenvalues, singular_values
from .operators import LinearOperator
from .symbols import DiscreteSymbol, Grid


def order_weight(grid: Grid, m: float) -> np.ndarray:
    """``|xi|^m`` with the DC value set to 1 for ``m == 0`` and 0 otherwise."""
    r = grid.freq_norm
    w = np.ones_like(r)
    if m != 0:
        nz = r > 0
        w[nz] = r[nz] ** m
        w[~nz] = 0.0
    return w


def chebyshev(k_max: int, z) -> np.ndarray:
    """Rows ``T_0(z), ..., T_{k_max}(z)`` by the three-term recurrence."""
    z = np.asarray(z, dtype=float)
    T = np.empty((k_max + 1,) + z.shape)
    T[0] = 1.0
    if k_max >= 1:
        T[1] = z
    for k in range(1, k_max):
        T[k + 1] = 2 * z * T[k] - T[k - 1]
    return T


def _centered_labels(count: int, what: str) -> np.ndarray:
    if count < 1 or count % 2 == 0:
        raise ValidationError(f"{what} must be a positive odd count, got {count}")
    h = (count - 1) // 2
    return np.arange(-h, h + 1)


def _fourier_spatial(grid: Grid, J: int):
    labels_1d = _centered_labels(J, "J")
    if J > grid.n1:
        raise ValidationError(f"J={J} exceeds grid points per axis {grid.n1}")
    labels = list(itertools.product(labels_1d.tolist(), repeat=grid.d))
    E = np.exp(2j * np.pi * (np.array(labels, dtype=float) @ grid.points.T))
    return labels, E


@dataclass(frozen=True, eq=False)
class SeparableBasisElement:
    grid: Grid
    e: np.ndarray
    g: np.ndarray
    labels: tuple = ()
    order: float = 0.0

    def symbol(self) -> DiscreteSymbol:
        return DiscreteSymbol(self.grid, self.e[:, None] * self.g[None, :])

    def to_dense(self) -> np.ndarray:
        """Spatial-domain matrix ``diag(e) F^-1 diag(g) F``."""
        eye = np.eye(self.grid.n, dtype=complex)
        return basis_apply(self, eye).T


def basis_apply(B: SeparableBasisElement, u) -> np.ndarray:
    """FFT, multiply by ``g``, inverse FFT, multiply by ``e``."""
    u = B.grid.check_vector(u)
    return B.e * B.grid.inverse(B.g * B.grid.forward(u))


@dataclass(frozen=True, eq=False)
class BasisFamily:
    grid: Grid
    kind: str
    J: int
    K: int
    order: float
    e_table: np.ndarray
    g_table: np.ndarray
    j_labels: list
    k_labels: list
    normalized: bool = False
    K1: int = 1

    @property
    def p(self) -> int:
        return len(self.j_labels) * len(self.k_labels)

    def __len__(self):
        return self.p

    def element(self, i: int) -> SeparableBasisElement:
        nk = len(self.k_labels)
        a, b = divmod(i, nk)
        return SeparableBasisElement(self.grid, self.e_table[a], self.g_table[b],
                                     (self.j_labels[a], self.k_labels[b]), self.order)

    @property
    def elements(self) -> list:
        return [self.element(i) for i in range(self.p)]

    def descriptor(self) -> dict:
        return {"family": self.kind, "J": self.J, "K": self.K, "K1": self.K1,
                "order": self.order, "normalized": self.normalized,
                "dim": self.grid.d, "grid": self.grid.n1}

    def apply_all(self, u) -> np.ndarray:
        """Every ``B_i u`` at once: ``(..., n) -> (..., p, n)``."""
        u = self.grid.check_vector(u)
        w = self.grid.inverse(self.g_table * self.grid.forward(u)[..., None, :])
        out = self.e_table[:, None, :] * w[..., None, :, :]
        return out.reshape(u.shape[:-1] + (self.p, self.grid.n))

    def combine(self, c) -> LinearOperator:
        """Operator ``v -> sum_i c_i B_i v`` using one FFT pair per spatial label."""
        c = np.asarray(c, dtype=complex)
        if c.shape != (self.p,):
            raise DimensionError(f"need {self.p} coefficients, got {c.shape}")
        multipliers = c.reshape(len(self.j_labels), len(self.k_labels)) @ self.g_table
        grid, E = self.grid, self.e_table

        def apply(v):
            v_hat = grid.forward(v)
            w = grid.inverse(multipliers * v_hat[..., None, :])
            return np.sum(E * w, axis=-2)

        return LinearOperator(apply, grid.n, name=f"{self.kind}-expansion")


def _family(grid, kind, J, K, m, j_labels, E, k_labels, G, normalized=False, K1=1):
    G = G * order_weight(grid, m)[None, :]
    if normalized:
        G = G / np.linalg.norm(G, axis=1, keepdims=True)
    return BasisFamily(grid, kind, J, K, float(m), E.astype(complex), G.astype(complex),
                       list(j_labels), list(k_labels), normalized, K1)


def make_fourier_family(grid: Grid, J: int, K: int, m: float = 0) -> BasisFamily:
    j_labels, E = _fourier_spatial(grid, J)
    k1d = _centered_labels(K, "K")
    if K > grid.n1:
        raise ValidationError(f"K={K} exceeds grid points per axis {grid.n1}")
    k_labels = list(itertools.product(k1d.tolist(), repeat=grid.d))
    phi = (grid.freqs + grid.xi0) / grid.n1
    G = np.exp(2j * np.pi * (np.array(k_labels, dtype=float) @ phi.T))
    return _family(grid, "fourier", J, K, m, j_labels, E, k_labels, G)


def make_cheb1d_family(grid: Grid, J: int, K: int, m: float = 0) -> BasisFamily:
    """Fourier in ``x`` times ``T_k(xi / xi0)`` for degrees ``k = 0 .. K-1``."""
    if grid.d != 1:
        raise DimensionError("cheb1d family needs a 1D grid")
    if K < 1:
        raise ValidationError("K must be at least 1")
    j_labels, E = _fourier_spatial(grid, J)
    G = chebyshev(K - 1, grid.freqs[:, 0] / grid.xi0)
    return _family(grid, "cheb1d", J, K, m, j_labels, E, [(k,) for k in range(K)], G)


def make_chebdisk_family(grid: Grid, J: int, K: int, m: float = 0,
                         normalized: bool = False, K1: int = 3) -> BasisFamily:
    """Fourier in ``x`` times ``exp(i k1 arg xi) T_k2(sqrt(2) |xi| / xi0 - 1)``.

    ``k1`` runs over ``K1`` centered angular labels and ``k2 = 0 .. K-1``.
    The angular factor is taken as 0 at ``xi = 0`` whenever ``k1 != 0``.
    """
    if grid.d != 2:
        raise DimensionError("chebdisk family needs a 2D grid")
    if K < 1:
        raise ValidationError("K must be at least 1")
    k1_labels = _centered_labels(K1, "K1")
    j_labels, E = _fourier_spatial(grid, J)
    r = grid.freq_norm
    theta = np.arctan2(grid.freqs[:, 1], grid.freqs[:, 0])
    radial = chebyshev(K - 1, np.clip(np.sqrt(2) * r / grid.xi0 - 1, -1.0, 1.0))
    rows, k_labels = [], []
    for k1 in k1_labels.tolist():
        ang = np.exp(1j * k1 * theta)
        ang[r == 0] = 1.0 if k1 == 0 else 0.0
        for k2 in range(K):
            rows.append(ang * radial[k2])
            k_labels.append((k1, k2))
    return _family(grid, "chebdisk", J, K, m, j_labels, E, k_labels, np.array(rows),
                   normalized=normalized, K1=int(K1))


def make_family(grid: Grid, kind: str, J: int, K: int, m: float = 0,
                normalized: bool = False, K1: int = 3) -> BasisFamily:
    if kind == "fourier":
        return make_fourier_family(grid, J, K, m)
    if kind == "cheb1d":
        return make_cheb1d_family(grid, J, K, m)
    if kind == "chebdisk":
        return make_chebdisk_family(grid, J, K, m, normalized, K1)
    raise ValidationError(f"unknown family kind {kind!r}")


@dataclass
class GramDiagnostics:
    N: np.ndarray
    kappa: float
    lam: float
    lam_elements: np.ndarray
    rank: Optional[int] = None
    effective_lam: Optional[float] = None
    extras: dict = field(default_factory=dict)


def _kappa(N) -> float:
    ev = hermitian_eigenvalues(N, tol=1e-9)
    if ev[0] <= 1e-14 * ev[-1]:
        return float("inf")
    return float(ev[-1] / ev[0])


def gram_matrix(family: BasisFamily) -> GramDiagnostics:
    """Gram matrix from the factored inner products ``<e, e'><g, g'>``."""
    n = family.grid.n
    E, G = family.e_table, family.g_table
    Ne = E.conj() @ E.T / n
    Ng = G.conj() @ G.T
    N = np.kron(Ne, Ng)
    e_sq, g_sq = np.real(np.diag(Ne)), np.real(np.diag(Ng))
    abs_e = np.abs(E)
    lam = np.empty(family.p)
    nk = len(family.k_labels)
    for i in range(family.p):
        a, b = divmod(i, nk)
        fro = np.sqrt(e_sq[a] * g_sq[b])
        if np.ptp(abs_e[a]) <= 1e-12 * abs_e[a].max():
            spec = abs_e[a].max() * np.abs(G[b]).max()
        else:
            spec = singular_values(family.element(i).to_dense())[0]
        lam[i] = spec * np.sqrt(n) / fro
    return GramDiagnostics(N, _kappa(N), float(lam.max()), lam)


def dense_diagnostics(mats) -> GramDiagnostics:
    """Gram data of explicit matrices via ``<B_j, B_k> = tr(B_j* B_k)``."""
    V = np.array([np.asarray(B, dtype=complex).ravel() for B in mats])
    N = V.conj() @ V.T
    lam = np.array([singular_values(B)[0] * np.sqrt(B.shape[1]) / np.linalg.norm(B)
                    for B in mats])
    return GramDiagnostics(N, _kappa(N), float(lam.max()), lam)


def replicated_diagnostics(family: BasisFamily, q: int) -> GramDiagnostics:
    """Diagnostics of the block-diagonal copies ``I_q (x) B_j``."""
    eye = np.eye(q)
    return dense_diagnostics([np.kron(eye, B.to_dense()) for B in family.elements])


def transformed_family(family: BasisFamily, A: LinearOperator,
                       rank_tol: float = 1e-10, chunk: int = 2**22) -> GramDiagnostics:
    """Diagnostics of ``{B_1 A, ..., B_p A}`` from dense assemblies.

    Also reports the numerical rank of ``A`` and the effective weak
    condition number ``sqrt(rank / n) * lambda``.
    """
    if A.n != family.grid.n:
        raise DimensionError(f"operator size {A.n} does not match grid size {family.grid.n}")
    Ad = A.to_dense()
    n, p = family.grid.n, family.p
    s = singular_values(Ad)
    rank = int(np.sum(s > rank_tol * s[0]))

    # rows of At are columns of A, so apply_all(At)[c, i] is column c of B_i A
    At = Ad.T
    N = np.zeros((p, p), dtype=complex)
    fro2 = np.zeros(p)
    step = max(1, chunk // (p * n))
    for start in range(0, n, step):
        X = family.apply_all(At[start:start + step])  # (cols, p, n)
        Xf = X.transpose(1, 0, 2).reshape(p, -1)
        N += Xf.conj() @ Xf.T
        fro2 += np.sum(np.abs(Xf) ** 2, axis=1)
    # with |e| constant, ||diag(e) F^-1 diag(g) F A|| = max|e| sqrt(n) ||diag(g) F A||,
    # so one SVD per frequency label suffices
    nk = len(family.k_labels)
    abs_e = np.abs(family.e_table)
    flat_e = np.ptp(abs_e, axis=1) <= 1e-12 * abs_e.max(axis=1)
    FA = family.grid.forward(At) if flat_e.any() else None
    spec_k = {}
    lam = np.empty(p)
    for i in range(p):
        a, b = divmod(i, nk)
        if flat_e[a]:
            if b not in spec_k:
                spec_k[b] = np.sqrt(n) * singular_values(FA * family.g_table[b])[0]
            spec = abs_e[a].max() * spec_k[b]
        else:
            spec = singular_values(basis_apply(family.element(i), At).T)[0]
        lam[i] = spec * np.sqrt(n) / np.sqrt(fro2[i])
    lam_max = float(lam.max())
    return GramDiagnostics(N, _kappa(N), lam_max, lam, rank=rank,
                           effective_lam=float(np.sqrt(rank / n) * lam_max))
