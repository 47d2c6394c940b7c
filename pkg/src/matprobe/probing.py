"""Forward and backward matrix probing.

Forward probing recovers ``A = sum_j c_j B_j`` from ``A u``; backward probing
recovers ``A^+`` from ``v = A u`` with the filtered probe on the solution side.
Probe ``i`` of a run is drawn from the sub-stream ``(seed, *stream_key, i)``,
so runs with different ``q`` share their leading probes.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .basis import BasisFamily, gram_matrix, transformed_family
from .errors import DimensionError, ValidationError
from .numerics import RandomStream, draw_sequence, hermitian_norm, least_squares, singular_values
from .operators import LinearOperator, NullspaceFilter


@dataclass(frozen=True)
class ProbeConfig:
    family: BasisFamily
    q: int = 1
    seed: int = 0
    kind: str = "gaussian"
    stream_key: tuple = ()

    def __post_init__(self):
        if self.q < 1:
            raise ValidationError("q must be at least 1")
        if self.kind not in ("gaussian", "rademacher"):
            raise ValidationError(f"unknown probe kind {self.kind!r}")
        if self.family.grid.n * self.q < self.family.p:
            raise ValidationError(
                f"n*q = {self.family.grid.n * self.q} < p = {self.family.p}: system is underdetermined")

    def probes(self) -> np.ndarray:
        base = RandomStream(self.seed, self.stream_key)
        n = self.family.grid.n
        return np.array([draw_sequence(base.substream(i), n, self.kind) for i in range(self.q)])


@dataclass
class ProbeResult:
    c: np.ndarray
    cond_L: float
    residual: float
    rank_deficient: bool
    M: np.ndarray
    N: Optional[np.ndarray] = None
    deviation: Optional[float] = None
    probe_norm: float = 0.0
    q: int = 1
    mode: str = "forward"


def _stack_columns(family: BasisFamily, vectors) -> np.ndarray:
    # vectors (q, n) -> L (q*n, p)
    cols = family.apply_all(vectors)  # (q, p, n)
    return cols.transpose(0, 2, 1).reshape(-1, family.p)


def _solve(L, rhs, q, mode, probes, N_single) -> ProbeResult:
    sol = least_squares(L, rhs)
    s = singular_values(L)
    cond_L = float(s[0] / s[-1]) if s[-1] > 0 else float("inf")
    res = float(np.linalg.norm(L @ sol.solution - rhs) / np.linalg.norm(rhs))
    M = L.conj().T @ L
    N = deviation = None
    if N_single is not None:
        N = q * N_single
        deviation = hermitian_norm(M - N) / hermitian_norm(N)
    return ProbeResult(sol.solution, cond_L, res, sol.rank_deficient, M, N, deviation,
                       float(np.linalg.norm(probes)), q, mode)


def _check(A: LinearOperator, cfg: ProbeConfig):
    if A.n != cfg.family.grid.n:
        raise DimensionError(f"operator size {A.n} does not match family grid size {cfg.family.grid.n}")


def forward_probe(A: LinearOperator, cfg: ProbeConfig, with_gram: bool = True) -> ProbeResult:
    """Solve the stacked system ``L c = A u`` in the least squares sense."""
    _check(A, cfg)
    U = cfg.probes()
    L = _stack_columns(cfg.family, U)
    rhs = A(U).reshape(-1)
    N = gram_matrix(cfg.family).N if with_gram else None
    return _solve(L, rhs, cfg.q, "forward", U, N)


def backward_probe(A: LinearOperator, nullspace_filter: NullspaceFilter, cfg: ProbeConfig,
                   with_gram: bool = False) -> ProbeResult:
    """Probe ``A^+``: columns ``B_j A u_i``, right-hand side the filtered ``u_i``.

    ``with_gram`` assembles ``A`` densely to report the deviation against the
    Gram matrix of ``{B_j A}``.
    """
    _check(A, cfg)
    U = cfg.probes()
    V = A(U)
    rhs = nullspace_filter(U).reshape(-1)
    L = _stack_columns(cfg.family, V)
    N = transformed_family(cfg.family, A).N if with_gram else None
    return _solve(L, rhs, cfg.q, "backward", U, N)


def reconstruct(family: BasisFamily, c) -> LinearOperator:
    return family.combine(c)


def error_bound_check(result: ProbeResult, family: BasisFamily, eps: float,
                      A: Optional[LinearOperator] = None) -> dict:
    """Compare the measured reconstruction error with the a-posteriori bound

        eps * (1 + lambda |u| sqrt(kappa p / ((1 - t) n q))),

    where ``t = kappa ||M - qN|| / ||qN||``.  The bound only applies when
    ``t < 1``; otherwise the report is flagged inconclusive.
    """
    if result.N is None:
        raise ValidationError("result carries no Gram matrix; rerun with with_gram=True")
    gd = gram_matrix(family)
    kappa, lam = gd.kappa, gd.lam
    n, p, q = family.grid.n, family.p, result.q
    t = kappa * hermitian_norm(result.M - result.N) / hermitian_norm(result.N)
    report = {"t": t, "kappa": kappa, "lambda": lam, "eps": eps, "inconclusive": t >= 1}
    if t < 1:
        report["bound"] = eps * (1 + lam * result.probe_norm * np.sqrt(kappa * p / ((1 - t) * n * q)))
    else:
        report["bound"] = float("inf")
    if A is not None:
        Ad = A.to_dense()
        err = singular_values(Ad - reconstruct(family, result.c).to_dense())[0]
        report["measured"] = float(err)
        slack = 1e-8 * max(1.0, singular_values(Ad)[0])
        report["holds"] = bool(err <= report["bound"] + slack)
    return report


def write_result_csv(result: ProbeResult, fh, header: dict) -> None:
    """Header comments echo the config; body lists coefficients; footer diagnostics."""
    for key, val in header.items():
        fh.write(f"# {key}={val}\n")
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["index", "real", "imag"])
    for i, v in enumerate(result.c):
        w.writerow([i, f"{v.real:.17g}", f"{v.imag:.17g}"])
    fh.write(f"# cond_L={result.cond_L:.17g}\n")
    fh.write(f"# residual={result.residual:.17g}\n")
    dev = "" if result.deviation is None else f"{result.deviation:.17g}"
    fh.write(f"# deviation={dev}\n")
    fh.write(f"# rank_deficient={int(result.rank_deficient)}\n")


def read_coefficients(path) -> np.ndarray:
    vals = []
    with open(path) as fh:
        for line in fh:
            if line.startswith("#") or line.startswith("index") or not line.strip():
                continue
            _, re, im = line.strip().split(",")
            vals.append(complex(float(re), float(im)))
    return np.array(vals)
