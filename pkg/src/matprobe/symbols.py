"""Discrete symbols on periodic grids and their calculus.

A discrete symbol ``a(x, xi)`` acts on a grid function by

    (A u)(x) = sum_{xi in Xi} exp(2 pi i xi.x) a(x, xi) u_hat(xi).

Frequency differences such as ``eta - xi`` are reduced modulo the per-axis
point count and mapped back into the centered window; on the discrete torus
this is exact.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DimensionError, ValidationError
from .numerics import dft


@dataclass(frozen=True)
class Grid:
    """Periodic lattice with ``n1 = 2 * xi0 + 1`` points per axis."""

    d: int
    xi0: int

    def __post_init__(self):
        if self.d not in (1, 2):
            raise ValidationError(f"grid dimension must be 1 or 2, got {self.d}")
        if self.xi0 < 1:
            raise ValidationError(f"band limit must be positive, got {self.xi0}")

    @classmethod
    def from_points(cls, n1: int, d: int = 1) -> "Grid":
        if n1 < 3 or n1 % 2 == 0:
            raise ValidationError(f"points per axis must be odd and >= 3, got {n1}")
        return cls(d, (n1 - 1) // 2)

    @property
    def n1(self) -> int:
        return 2 * self.xi0 + 1

    @property
    def n(self) -> int:
        return self.n1**self.d

    @property
    def shape(self) -> tuple:
        return (self.n1,) * self.d

    @cached_property
    def points(self) -> np.ndarray:
        """Spatial points, shape ``(n, d)``, row-major."""
        axis = np.arange(self.n1) / self.n1
        mesh = np.meshgrid(*([axis] * self.d), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    @cached_property
    def freqs(self) -> np.ndarray:
        """Integer frequencies, shape ``(n, d)``, centered row-major order."""
        axis = np.arange(-self.xi0, self.xi0 + 1)
        mesh = np.meshgrid(*([axis] * self.d), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    @cached_property
    def freq_norm(self) -> np.ndarray:
        return np.sqrt(np.sum(self.freqs.astype(float) ** 2, axis=1))

    @cached_property
    def phases(self) -> np.ndarray:
        """``exp(2 pi i xi.x)`` indexed ``[x, xi]``."""
        return np.exp(2j * np.pi * (self.points @ self.freqs.T))

    def index_of(self, f) -> np.ndarray:
        """Flat index of integer frequencies ``f`` (last axis ``d``), wrapped."""
        f = np.asarray(f)
        idx = np.mod(f + self.xi0, self.n1)
        flat = np.zeros(idx.shape[:-1], dtype=np.intp)
        for k in range(self.d):
            flat = flat * self.n1 + idx[..., k]
        return flat

    @cached_property
    def _diff_index(self) -> np.ndarray:
        # [eta, xi] -> index of eta - xi
        f = self.freqs
        return self.index_of(f[:, None, :] - f[None, :, :])

    @cached_property
    def _sum_index(self) -> np.ndarray:
        # [j, xi] -> index of j + xi
        f = self.freqs
        return self.index_of(f[:, None, :] + f[None, :, :])

    @cached_property
    def _neg_index(self) -> np.ndarray:
        return self.index_of(-self.freqs)

    def forward(self, u) -> np.ndarray:
        return dft(u, self.shape, "forward")

    def inverse(self, u_hat) -> np.ndarray:
        return dft(u_hat, self.shape, "inverse")

    def check_vector(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=complex)
        if u.shape[-1:] != (self.n,):
            raise DimensionError(f"expected trailing length {self.n}, got {u.shape}")
        return u


@dataclass(frozen=True, eq=False)
class DiscreteSymbol:
    """Dense table of ``a(x, xi)`` indexed ``[x, xi]``."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != (self.grid.n, self.grid.n):
            raise DimensionError(f"symbol table has shape {v.shape}, grid needs {(self.grid.n,) * 2}")
        if not np.all(np.isfinite(v)):
            raise ValidationError("symbol has non-finite entries")
        object.__setattr__(self, "values", v)

    @classmethod
    def from_function(cls, grid: Grid, fn) -> "DiscreteSymbol":
        """Sample ``fn(x, xi)``; ``x`` is ``(n, 1, d)`` and ``xi`` is ``(1, n, d)``."""
        x = grid.points[:, None, :]
        xi = grid.freqs[None, :, :].astype(float)
        vals = np.broadcast_to(fn(x, xi), (grid.n, grid.n))
        return cls(grid, np.array(vals, dtype=complex))

    @classmethod
    def from_hat(cls, grid: Grid, a_hat) -> "DiscreteSymbol":
        # a(x, xi) = sum_j a_hat(j, xi) exp(2 pi i j.x)
        return cls(grid, grid.inverse(np.asarray(a_hat).T).T)

    def hat(self) -> np.ndarray:
        """Compact form ``a_hat[j, xi] = (1/n) sum_x a(x, xi) exp(-2 pi i j.x)``."""
        return self.grid.forward(self.values.T).T


def _same_grid(a: DiscreteSymbol, b: DiscreteSymbol):
    if a.grid != b.grid:
        raise DimensionError("symbols live on different grids")


def symbol_apply(a: DiscreteSymbol, u) -> np.ndarray:
    u = a.grid.check_vector(u)
    u_hat = a.grid.forward(u)
    return u_hat @ (a.grid.phases * a.values).T


def symbol_to_matrix(a: DiscreteSymbol) -> np.ndarray:
    """Matrix in the Fourier basis: ``A[eta, xi] = a_hat(eta - xi, xi)``."""
    a_hat = a.hat()
    cols = np.arange(a.grid.n)[None, :]
    return a_hat[a.grid._diff_index, cols]


def matrix_to_symbol(A, grid: Grid) -> DiscreteSymbol:
    A = np.asarray(A, dtype=complex)
    if A.shape != (grid.n, grid.n):
        raise DimensionError(f"matrix shape {A.shape} does not match grid size {grid.n}")
    E = grid.phases
    return DiscreteSymbol(grid, E.conj() * (E @ A))


def symbol_trace(a: DiscreteSymbol) -> complex:
    return complex(np.sum(np.mean(a.values, axis=0)))


def symbol_adjoint(a: DiscreteSymbol) -> DiscreteSymbol:
    """Symbol of ``A*``: ``c_hat(j, xi) = conj(a_hat(-j, j + xi))``."""
    g = a.grid
    a_hat = a.hat()
    c_hat = np.conj(a_hat[g._neg_index[:, None], g._sum_index])
    return DiscreteSymbol.from_hat(g, c_hat)


def symbol_compose(a: DiscreteSymbol, b: DiscreteSymbol) -> DiscreteSymbol:
    """Symbol of ``A B``: ``c_hat(j, xi) = sum_zeta a_hat(j+xi-zeta, zeta) b_hat(zeta-xi, xi)``."""
    _same_grid(a, b)
    g = a.grid
    a_hat, b_hat = a.hat(), b.hat()
    f = g.freqs
    zeta = np.arange(g.n)
    c_hat = np.empty((g.n, g.n), dtype=complex)
    for xi in range(g.n):
        # rows j, columns zeta
        first = a_hat[g.index_of(f[:, None, :] + f[xi] - f[None, :, :]), zeta[None, :]]
        second = b_hat[g._diff_index[:, xi], xi]
        c_hat[:, xi] = first @ second
    return DiscreteSymbol.from_hat(g, c_hat)


def write_symbol_csv(a: DiscreteSymbol, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(f"# grid d={a.grid.d} xi0={a.grid.xi0}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x_index", "xi_index", "real", "imag"])
        for i in range(a.grid.n):
            for k in range(a.grid.n):
                v = a.values[i, k]
                w.writerow([i, k, f"{v.real:.17g}", f"{v.imag:.17g}"])


def read_symbol_csv(path) -> DiscreteSymbol:
    grid = None
    rows = []
    with open(path, newline="") as fh:
        for line in fh:
            if line.startswith("#"):
                fields = dict(tok.split("=") for tok in line[1:].split() if "=" in tok)
                if "d" in fields and "xi0" in fields:
                    grid = Grid(int(fields["d"]), int(fields["xi0"]))
                continue
            if line.startswith("x_index") or not line.strip():
                continue
            rows.append(line.strip().split(","))
    if grid is None:
        raise ValidationError(f"{path}: missing grid header")
    vals = np.zeros((grid.n, grid.n), dtype=complex)
    for i, k, re, im in rows:
        vals[int(i), int(k)] = complex(float(re), float(im))
    return DiscreteSymbol(grid, vals)
