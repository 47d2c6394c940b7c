"""Reference operators: variable-media elliptic operators and foveation.

All operators act on grid functions stored along the last axis, so a batch
of vectors ``(k, n)`` is applied in one call.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import CapabilityError, DimensionError, ValidationError
from .numerics import singular_values
from .symbols import DiscreteSymbol, Grid

DENSE_LIMIT = 2601


class LinearOperator:
    """Black-box linear map on grid functions of length ``n``.

    ``apply`` must accept arrays of shape ``(..., n)``.  ``nullity`` is the
    declared dimension of the nullspace (not detected numerically).
    """

    def __init__(self, apply: Callable, n: int, nullity: int = 0,
                 dense: Optional[Callable] = None, name: str = ""):
        self._apply = apply
        self.n = int(n)
        self.nullity = int(nullity)
        self._dense = dense
        self.name = name

    def __call__(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=complex)
        if u.shape[-1:] != (self.n,):
            raise DimensionError(f"operator expects length {self.n}, got {u.shape}")
        return self._apply(u)

    apply = __call__

    @property
    def assemblable(self) -> bool:
        return self._dense is not None or self.n <= DENSE_LIMIT

    def to_dense(self) -> np.ndarray:
        """Dense spatial-domain matrix, built column by column."""
        if self._dense is not None:
            return np.asarray(self._dense(), dtype=complex)
        if self.n > DENSE_LIMIT:
            raise CapabilityError(
                f"dense assembly refused for n={self.n} > {DENSE_LIMIT}; use the matrix-free apply")
        return self(np.eye(self.n, dtype=complex)).T

    def __repr__(self):
        return f"LinearOperator({self.name or 'anonymous'}, n={self.n}, nullity={self.nullity})"


def dense_operator(A, nullity: int = 0, name: str = "dense") -> LinearOperator:
    A = np.asarray(A, dtype=complex)
    return LinearOperator(lambda u: u @ A.T, A.shape[1], nullity, dense=lambda: A, name=name)


def identity_operator(n: int) -> LinearOperator:
    return LinearOperator(lambda u: u.copy(), n, 0, dense=lambda: np.eye(n, dtype=complex),
                          name="identity")


def symbol_operator(a: DiscreteSymbol, nullity: int = 0, name: str = "symbol") -> LinearOperator:
    from .symbols import symbol_apply
    return LinearOperator(lambda u: symbol_apply(a, u), a.grid.n, nullity, name=name)


@dataclass(frozen=True)
class NullspaceFilter:
    """Projection of probe vectors onto the orthogonal complement of null(A)."""

    project: Callable
    name: str = ""

    def __call__(self, u) -> np.ndarray:
        return self.project(np.asarray(u, dtype=complex))


def identity_filter() -> NullspaceFilter:
    return NullspaceFilter(lambda u: u.copy(), "identity")


def mean_filter(grid: Grid) -> NullspaceFilter:
    """Remove the constant component (nullspace of periodic elliptic operators)."""
    def project(u):
        return u - np.mean(u, axis=-1, keepdims=True)
    return NullspaceFilter(project, "mean")


@dataclass(frozen=True)
class EllipticMedia:
    """Coefficient field ``alpha`` of ``-div(alpha grad u)``.

    ``d == 1``: ``1 + 0.4 cos(4 pi x) + 0.2 cos(6 pi x)``.
    ``d == 2``: ``1/T + cos^2(pi gamma x1) sin^2(pi gamma x2)`` with contrast
    ``T`` and integer roughness ``gamma``.
    ``constant`` overrides both with a uniform medium.
    """

    d: int
    contrast: float = 10.0
    roughness: int = 1
    constant: Optional[float] = None

    def __post_init__(self):
        if self.d not in (1, 2):
            raise ValidationError("media dimension must be 1 or 2")
        if self.constant is not None and self.constant <= 0:
            raise ValidationError("constant media must be positive")
        if self.contrast <= 0:
            raise ValidationError("contrast must be positive")
        if int(self.roughness) != self.roughness or self.roughness < 1:
            raise ValidationError("roughness must be a positive integer")

    @property
    def bandwidth(self) -> int:
        """Largest frequency present in ``alpha`` per axis."""
        if self.constant is not None:
            return 0
        return 3 if self.d == 1 else int(self.roughness)

    def alpha(self, points) -> np.ndarray:
        x = np.asarray(points, dtype=float)
        if self.constant is not None:
            return np.full(x.shape[0], float(self.constant))
        if self.d == 1:
            t = x[:, 0]
            return 1 + 0.4 * np.cos(4 * np.pi * t) + 0.2 * np.cos(6 * np.pi * t)
        g = self.roughness
        return 1.0 / self.contrast + np.cos(np.pi * g * x[:, 0]) ** 2 * np.sin(np.pi * g * x[:, 1]) ** 2

    def grad_alpha_exact(self, points) -> np.ndarray:
        """Analytic gradient, shape ``(n, d)``."""
        x = np.asarray(points, dtype=float)
        if self.constant is not None:
            return np.zeros_like(x)
        if self.d == 1:
            t = x[:, 0]
            return (-1.6 * np.pi * np.sin(4 * np.pi * t) - 1.2 * np.pi * np.sin(6 * np.pi * t))[:, None]
        g = self.roughness
        c1, s1 = np.cos(np.pi * g * x[:, 0]), np.sin(np.pi * g * x[:, 0])
        c2, s2 = np.cos(np.pi * g * x[:, 1]), np.sin(np.pi * g * x[:, 1])
        return np.stack([-2 * np.pi * g * c1 * s1 * s2**2, 2 * np.pi * g * c1**2 * s2 * c2], axis=1)


def _check_media(media: EllipticMedia, grid: Grid):
    if media.d != grid.d:
        raise DimensionError(f"media is {media.d}D but grid is {grid.d}D")
    if media.bandwidth > grid.xi0:
        raise ValidationError(f"grid band {grid.xi0} cannot resolve media bandwidth {media.bandwidth}")


def spectral_gradient(values, grid: Grid) -> np.ndarray:
    """Gradient of a band-limited grid function, shape ``(n, d)``."""
    v_hat = grid.forward(values)
    return np.stack([grid.inverse(2j * np.pi * grid.freqs[:, k] * v_hat) for k in range(grid.d)],
                    axis=1)


def elliptic_operator(media: EllipticMedia, grid: Grid, form: str = "symbol") -> LinearOperator:
    """Periodic ``-div(alpha grad u)`` applied pseudospectrally.

    ``form="symbol"`` evaluates ``-alpha lap(u) - grad(alpha).grad(u)`` pointwise,
    whose discrete symbol is exactly ``alpha 4 pi^2 |xi|^2 - sum_k 2 pi i xi_k d_k alpha``.
    ``form="divergence"`` differentiates, multiplies by ``alpha`` and
    differentiates again; it is exactly Hermitian but its symbol picks up
    aliasing near the band edge.
    """
    _check_media(media, grid)
    alpha = media.alpha(grid.points)
    xi = grid.freqs.astype(float)
    if form == "symbol":
        grad_a = spectral_gradient(alpha, grid).real
        lap = -4 * np.pi**2 * grid.freq_norm**2

        def apply(u):
            u_hat = grid.forward(u)
            out = -alpha * grid.inverse(lap * u_hat)
            for k in range(grid.d):
                out -= grad_a[:, k] * grid.inverse(2j * np.pi * xi[:, k] * u_hat)
            return out
    elif form == "divergence":
        def apply(u):
            u_hat = grid.forward(u)
            out = np.zeros_like(u)
            for k in range(grid.d):
                flux = alpha * grid.inverse(2j * np.pi * xi[:, k] * u_hat)
                out -= grid.inverse(2j * np.pi * xi[:, k] * grid.forward(flux))
            return out
    else:
        raise ValidationError(f"unknown elliptic form {form!r}")
    label = f"elliptic{grid.d}d[{form}]"
    return LinearOperator(apply, grid.n, nullity=1, name=label)


def elliptic_symbol(media: EllipticMedia, grid: Grid, form: str = "symbol") -> DiscreteSymbol:
    _check_media(media, grid)
    alpha = media.alpha(grid.points)
    xi = grid.freqs.astype(float)
    if form == "symbol":
        grad_a = spectral_gradient(alpha, grid)
        vals = alpha[:, None] * (4 * np.pi**2 * grid.freq_norm**2)[None, :]
        for k in range(grid.d):
            vals = vals - (2j * np.pi * xi[:, k])[None, :] * grad_a[:, k][:, None]
        return DiscreteSymbol(grid, vals)
    if form == "divergence":
        # a_hat(j, xi) = 4 pi^2 alpha_hat(j) xi . wrap(j + xi)
        alpha_hat = grid.forward(alpha)
        out_freq = xi[grid._sum_index]
        a_hat = 4 * np.pi**2 * alpha_hat[:, None] * np.einsum("jxk,xk->jx", out_freq, xi)
        return DiscreteSymbol.from_hat(grid, a_hat)
    raise ValidationError(f"unknown elliptic form {form!r}")


@dataclass(frozen=True)
class FoveationSpec:
    """Width function ``w(x) = sqrt(a |x - x0|^2 + b)``."""

    a: float
    b: float
    x0: tuple = (0.5, 0.5)

    def __post_init__(self):
        if self.a < 0 or self.b <= 0:
            raise ValidationError("need a >= 0 and b > 0")

    @classmethod
    def from_widths(cls, center: float, corner: float, x0=(0.5, 0.5)) -> "FoveationSpec":
        """Match ``w(x0) = center`` and ``w(1, 1) = corner``."""
        r2 = (1 - x0[0]) ** 2 + (1 - x0[1]) ** 2
        b = center**2
        return cls((corner**2 - b) / r2, b, tuple(x0))

    def width(self, points) -> np.ndarray:
        x = np.asarray(points, dtype=float)
        r2 = (x[:, 0] - self.x0[0]) ** 2 + (x[:, 1] - self.x0[1]) ** 2
        return np.sqrt(self.a * r2 + self.b)

    def symbol_rows(self, points, freq_norm) -> np.ndarray:
        w = self.width(points)
        return np.exp(-2 * np.pi**2 * (w**2)[:, None] * (freq_norm**2)[None, :])


def foveation_symbol(spec: FoveationSpec, grid: Grid) -> DiscreteSymbol:
    if grid.d != 2:
        raise DimensionError("foveation is defined on 2D grids")
    return DiscreteSymbol(grid, spec.symbol_rows(grid.points, grid.freq_norm))


def foveation_operator(spec: FoveationSpec, grid: Grid, block: int = 256) -> LinearOperator:
    """Space-variant Gaussian blur through its symbol, in row blocks.

    The symbol table is never stored whole, so grids beyond dense scale work.
    """
    if grid.d != 2:
        raise DimensionError("foveation is defined on 2D grids")
    pts, freqs, fnorm = grid.points, grid.freqs.astype(float), grid.freq_norm

    def apply(u):
        u_hat = grid.forward(u)
        out = np.empty_like(u_hat)
        for start in range(0, grid.n, block):
            rows = slice(start, min(start + block, grid.n))
            kernel = np.exp(2j * np.pi * (pts[rows] @ freqs.T)) * spec.symbol_rows(pts[rows], fnorm)
            out[..., rows] = u_hat @ kernel.T
        return out

    return LinearOperator(apply, grid.n, nullity=0, name="foveation")


def condition_number(A: LinearOperator, nullity: Optional[int] = None) -> float:
    """``sigma_max / sigma_min`` after discarding the ``nullity`` smallest."""
    if nullity is None:
        nullity = A.nullity
    if not A.assemblable:
        raise CapabilityError(f"condition number needs dense assembly, n={A.n}")
    if not 0 <= nullity < A.n:
        raise ValidationError(f"nullity {nullity} out of range for n={A.n}")
    s = singular_values(A.to_dense())
    return float(s[0] / s[A.n - 1 - nullity])
