"""Sweeps behind the command line: each returns table rows plus footer facts.

Trial ``t`` of any Monte Carlo sweep draws its probes from the stream
``(seed, t, i)``, so results do not depend on evaluation order.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Sequence

import numpy as np

from .basis import (gram_matrix, make_cheb1d_family, make_chebdisk_family, make_family,
                    make_fourier_family, transformed_family)
from .errors import ValidationError
from .numerics import RandomStream, draw_sequence, hermitian_norm, singular_values
from .operators import (EllipticMedia, FoveationSpec, condition_number, elliptic_operator,
                        foveation_operator, identity_operator, mean_filter)
from .probing import ProbeConfig, backward_probe, forward_probe, reconstruct
from .symbols import Grid

REFERENCE_IMAGE_SIDE = 201
REFERENCE_FOVEA_WIDTHS = (0.003, 0.012)


def odd_ceil(x: float) -> int:
    n = math.ceil(x - 1e-9)
    return n if n % 2 else n + 1


def sample_stats(values) -> dict:
    v = np.asarray(values, dtype=float)
    return {"mean": float(v.mean()),
            "sigma": float(v.std(ddof=1)) if v.size >= 2 else None,
            "trials": int(v.size)}


def loglog_slope(x, y) -> float:
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def deviation_samples(family, trials: int, seed: int, kind: str = "gaussian",
                      first: int = 0, budget: int = 2**22) -> np.ndarray:
    """``||M - N|| / ||N||`` for trials ``first .. first + trials - 1``.

    Probe vectors coincide with ``ProbeConfig(family, 1, seed, kind, (t,))``.
    """
    N = gram_matrix(family).N
    norm_N = hermitian_norm(N)
    n, p = family.grid.n, family.p
    out = np.empty(trials)
    step = max(1, budget // (p * n))
    for s in range(0, trials, step):
        idx = range(first + s, first + min(trials, s + step))
        U = np.array([draw_sequence(RandomStream(seed, (t, 0)), n, kind) for t in idx])
        L = family.apply_all(U)
        M = np.einsum("bjn,bkn->bjk", L.conj(), L)
        D = M - N
        ev = np.linalg.eigvalsh(0.5 * (D + D.conj().transpose(0, 2, 1)))
        out[s:s + len(idx)] = np.max(np.abs(ev), axis=1) / norm_N
    return out


def _fourier_side(p: int) -> int:
    J = math.isqrt(p)
    if J * J != p or J % 2 == 0:
        raise ValidationError(f"p={p} is not the square of an odd integer")
    return J


def run_statstudy(p_list: Sequence[int], c_list: Sequence[float], trials: int, seed: int,
                  n_list: Optional[Sequence[int]] = None, kind: str = "gaussian"):
    """Mean deviation for ``n = p log^c p`` (rounded up to odd), or for fixed ``n``."""
    if trials < 1:
        raise ValidationError("trials must be at least 1")
    rows, footer = [], {}
    for p in p_list:
        J = _fourier_side(int(p))
        if n_list:
            points = [(None, None, int(n)) for n in n_list]
        else:
            points = [(c, p * math.log(p) ** c, odd_ceil(p * math.log(p) ** c)) for c in c_list]
        for c, raw, n in points:
            if n % 2 == 0 or n < J:
                raise ValidationError(f"n={n} must be odd and at least J={J}")
            fam = make_fourier_family(Grid.from_points(n, 1), J, J)
            dev = deviation_samples(fam, trials, seed, kind)
            rows.append({"p": p, "c": c, "n_raw": raw, "n": n, **sample_stats(dev)})
        if n_list and len(n_list) >= 2:
            sub = [r for r in rows if r["p"] == p]
            footer[f"fit_slope_p{p}"] = loglog_slope([r["n"] for r in sub], [r["mean"] for r in sub])
            footer[f"fit_range_p{p}"] = f"n={min(n_list)}..{max(n_list)}"
    return rows, footer


def run_tail(p: int, n: int, samples: int, seed: int, thresholds: Sequence[float],
             kind: str = "gaussian"):
    """Empirical exceedance ``P(||M - N|| / ||N|| > t)``."""
    J = _fourier_side(int(p))
    fam = make_fourier_family(Grid.from_points(int(n), 1), J, J)
    dev = deviation_samples(fam, samples, seed, kind)
    rows = []
    for t in thresholds:
        count = int(np.sum(dev > t))
        rows.append({"t": float(t), "count": count, "probability": count / samples})
    footer = {"mean": float(dev.mean()), "median": float(np.median(dev))}
    usable = [r for r in rows if r["count"] >= 10]
    upper = [r for r in usable if r["t"] >= footer["median"]]
    if len(upper) >= 3:
        tt = np.array([r["t"] for r in upper])
        lp = np.log([r["probability"] for r in upper])
        footer["fit_upper_slope"] = float(np.polyfit(tt, lp, 1)[0])
        footer["fit_upper_range"] = f"t={tt.min():g}..{tt.max():g}"
    if len(usable) >= 4:
        tt = np.array([r["t"] for r in usable])
        lp = np.log([r["probability"] for r in usable])
        footer["fit_quadratic_coeff"] = float(np.polyfit(tt, lp, 2)[0])
        footer["fit_full_range"] = f"t={tt.min():g}..{tt.max():g}"
    return rows, footer


def run_chebcond(K_list: Sequence[int], dim: int, n1: int, K1: int = 3, J: int = 1,
                 m: float = 0):
    """Gram condition number and weak condition number of Chebyshev families."""
    grid = Grid.from_points(n1, dim)
    rows = []
    for K in K_list:
        if dim == 1:
            gd = gram_matrix(make_cheb1d_family(grid, J, K, m))
            row = {"K": K, "p": J * K}
        else:
            fam = make_chebdisk_family(grid, J, K, m, K1=K1)
            gd = gram_matrix(fam)
            gn = gram_matrix(make_chebdisk_family(grid, J, K, m, normalized=True, K1=K1))
            row = {"K": K, "p": fam.p, "kappa_normalized": gn.kappa, "lambda_normalized": gn.lam}
        row.update(kappa=gd.kappa, lam=gd.lam, kappa_over_K=gd.kappa / K)
        rows.append(row)
    footer = {}
    if len(K_list) >= 2:
        footer["fit_exponent"] = loglog_slope(K_list, [r["kappa"] for r in rows])
        footer["fit_range"] = f"K={min(K_list)}..{max(K_list)}"
    return rows, footer


def synthetic_image(n1: int) -> np.ndarray:
    """Deterministic test pattern: smooth waves, a disk and a bar, in ``[0, 1]``."""
    t = np.arange(n1) / n1
    x1, x2 = np.meshgrid(t, t, indexing="ij")
    img = (0.5 + 0.3 * np.sin(6 * np.pi * x1) * np.cos(4 * np.pi * x2)
           + ((x1 - 0.3) ** 2 + (x2 - 0.6) ** 2 < 0.04) + 0.5 * (np.abs(x1 - 0.7) < 0.05))
    return img / img.max()


def fovea_spec(n1: int, widths=None) -> FoveationSpec:
    """Width function with the reference widths rescaled to an ``n1`` grid."""
    if widths is None:
        s = REFERENCE_IMAGE_SIDE / n1
        widths = (REFERENCE_FOVEA_WIDTHS[0] * s, REFERENCE_FOVEA_WIDTHS[1] * s)
    return FoveationSpec.from_widths(*widths)


def build_operator(name: str, grid: Grid, contrast: float = 10.0, roughness: int = 1,
                   form: str = "symbol", widths=None):
    if name == "identity":
        return identity_operator(grid.n)
    if name in ("elliptic1d", "elliptic2d", "elliptic"):
        return elliptic_operator(EllipticMedia(grid.d, contrast, roughness), grid, form)
    if name == "foveation":
        return foveation_operator(fovea_spec(grid.n1, widths), grid)
    raise ValidationError(f"unknown operator {name!r}")


def preconditioned_ratio(A, Ad, family, c, cond_A) -> float:
    """``cond(C A) / cond(A)``, both skipping one zero singular value."""
    C = reconstruct(family, c).to_dense()
    s = singular_values(C @ Ad)
    return float(s[0] / s[-1 - A.nullity] / cond_A)


def run_probe(mode: str, A, family, q: int, seed: int, kind: str = "gaussian"):
    """One probing run plus the dense quality metrics available at this size."""
    cfg = ProbeConfig(family, q, seed, kind)
    facts = {}
    if mode == "forward":
        result = forward_probe(A, cfg)
        if A.assemblable:
            Ad = A.to_dense()
            C = reconstruct(family, result.c).to_dense()
            facts["relative_error"] = float(singular_values(C - Ad)[0] / singular_values(Ad)[0])
    elif mode == "backward":
        result = backward_probe(A, mean_filter(family.grid) if A.nullity else _identity_filter(), cfg)
        Ad = A.to_dense()
        cond_A = condition_number(A)
        ratio = preconditioned_ratio(A, Ad, family, result.c, cond_A)
        facts.update(cond_A=cond_A, cond_CA=ratio * cond_A, ratio=ratio)
    else:
        raise ValidationError(f"unknown probing mode {mode!r}")
    return result, facts


def _identity_filter():
    from .operators import identity_filter
    return identity_filter()


def auto_probes(p: int, n: int) -> int:
    """Probe count giving at least ``8 p`` rows (and never fewer than 4 probes)."""
    return max(4, math.ceil(8 * p / n))


def run_precond2d(T_list, gamma_list, J_list, trials: int, seed: int, n1: int = 21,
                  m: float = -2, q: Optional[int] = None, kind: str = "gaussian",
                  constant: Optional[float] = None, workers: int = 1):
    """``cond(CA) / cond(A)`` for backward-probed Fourier preconditioners, ``p = J^4``."""
    grid = Grid.from_points(n1, 2)
    filt = mean_filter(grid)
    rows = []
    for T in T_list:
        for gamma in gamma_list:
            media = EllipticMedia(2, T, int(gamma), constant=constant)
            A = elliptic_operator(media, grid)
            Ad = A.to_dense()
            cond_A = condition_number(A)
            for J in J_list:
                fam = make_fourier_family(grid, J, J, m)
                qq = q or auto_probes(fam.p, grid.n)

                def one(t, fam=fam, qq=qq):
                    r = backward_probe(A, filt, ProbeConfig(fam, qq, seed, kind, (t,)))
                    return preconditioned_ratio(A, Ad, fam, r.c, cond_A)

                with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
                    ratios = list(pool.map(one, range(trials)))
                rows.append({"T": T, "gamma": gamma, "J": J, "p": fam.p, "q": qq,
                             "cond_A": cond_A, **sample_stats(ratios)})
    return rows, {}


def run_ordercorrect(m_list, n1_list, operator: str = "elliptic1d", family: str = "fourier",
                     J: int = 5, K: int = 5, K1: int = 3, normalized: bool = False,
                     contrast: float = 10.0, roughness: int = 2, form: str = "symbol"):
    """Conditioning of ``{B_j A}`` across order corrections and grid sizes."""
    dim = 1 if operator in ("elliptic1d", "identity1d") else 2
    rows = []
    for n1 in n1_list:
        grid = Grid.from_points(int(n1), dim)
        if operator.startswith("identity"):
            A = identity_operator(grid.n)
        else:
            A = build_operator(operator, grid, contrast, roughness, form)
        for m in m_list:
            fam = make_family(grid, family, J, K, m, normalized, K1)
            gd = transformed_family(fam, A)
            rows.append({"m": m, "n1": int(n1), "n": grid.n, "p": fam.p, "kappa": gd.kappa,
                         "lam": gd.lam, "effective_lam": gd.effective_lam, "rank": gd.rank})
    return rows, {}


def run_foveate(image: np.ndarray, J_list, seed: int, q: int = 1, kind: str = "gaussian",
                widths=None):
    """Forward-probe the foveation operator with Fourier families ``J = K``."""
    image = np.asarray(image, dtype=float)
    if image.ndim != 2 or image.shape[0] != image.shape[1]:
        raise ValidationError(f"image must be square, got shape {image.shape}")
    n1 = image.shape[0]
    grid = Grid.from_points(n1, 2)
    A = foveation_operator(fovea_spec(n1, widths), grid)
    z = image.reshape(-1).astype(complex)
    Az = A(z)
    rows, images = [], {"Az": Az.real.reshape(n1, n1)}
    for J in J_list:
        fam = make_fourier_family(grid, J, J, 0)
        result = forward_probe(A, ProbeConfig(fam, q, seed, kind), with_gram=False)
        Cz = reconstruct(fam, result.c)(z)
        err = float(np.linalg.norm(Cz - Az) / np.linalg.norm(Az))
        rows.append({"J": J, "p": fam.p, "q": q, "relative_error": err, "cond_L": result.cond_L})
        images[f"Cz_J{J}"] = Cz.real.reshape(n1, n1)
    return rows, {}, images
