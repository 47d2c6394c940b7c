"""``matprobe <command> [options]``: experiment sweeps written as CSV.

Every output starts with ``# key=value`` lines echoing the resolved run
parameters (everything except ``--out``), so a rerun with the same flags
reproduces the file byte for byte.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import experiments as ex
from .basis import make_family
from .errors import CapabilityError, DimensionError, ValidationError
from .io import format_value, read_pgm, render_csv, write_pgm
from .probing import write_result_csv
from .symbols import Grid

COMMANDS = ("statstudy", "tail", "chebcond", "probe", "precond2d", "ordercorrect", "foveate")

COLUMNS = {
    "statstudy": ["p", "c", "n_raw", "n", "mean", "sigma", "trials"],
    "tail": ["t", "count", "probability"],
    "chebcond": ["K", "p", "kappa", "lam", "kappa_over_K", "kappa_normalized", "lambda_normalized"],
    "precond2d": ["T", "gamma", "J", "p", "q", "cond_A", "mean", "sigma", "trials"],
    "ordercorrect": ["m", "n1", "n", "p", "kappa", "lam", "effective_lam", "rank"],
    "foveate": ["J", "p", "q", "relative_error", "cond_L"],
}


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="matprobe", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--grid", type=int, help="points per axis (odd)")
    p.add_argument("--dim", type=int, choices=(1, 2))
    p.add_argument("--family", choices=("fourier", "cheb1d", "chebdisk"))
    p.add_argument("--J", type=int)
    p.add_argument("--K", type=int)
    p.add_argument("--K1", type=int, help="angular label count of the chebdisk family")
    p.add_argument("--order", type=float, help="order correction m")
    p.add_argument("--normalized", action="store_true")
    p.add_argument("--q", type=int, help="number of probe vectors")
    p.add_argument("--rng", choices=("gaussian", "rademacher"), default="gaussian")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int)
    p.add_argument("--sweep", action="append", default=[], metavar="KEY=V1,V2,...")
    p.add_argument("--out", help="CSV path (stdout if omitted)")
    p.add_argument("--mode", choices=("forward", "backward"))
    p.add_argument("--operator", choices=("elliptic1d", "elliptic2d", "foveation", "identity"))
    p.add_argument("--T", type=float, help="contrast of the 2D medium")
    p.add_argument("--gamma", type=int, help="roughness of the 2D medium")
    p.add_argument("--form", choices=("symbol", "divergence"))
    p.add_argument("--p", type=int, help="family size for tail")
    p.add_argument("--samples", type=int, help="Monte Carlo samples for tail")
    p.add_argument("--image", help="square PGM image with odd side")
    p.add_argument("--workers", type=int, default=1, help="threads for Monte Carlo trials")
    return p


def _sweeps(items) -> dict:
    out = {}
    for item in items:
        key, sep, vals = item.partition("=")
        if not sep or not key or not vals:
            raise ValidationError(f"--sweep expects key=v1,v2,... got {item!r}")
        out[key.strip()] = [v.strip() for v in vals.split(",") if v.strip()]
    return out


def _nums(sw, key, default, cast=float):
    vals = sw.pop(key, None)
    if vals is None:
        return list(default)
    try:
        nums = [float(v) for v in vals]
    except ValueError:
        raise ValidationError(f"--sweep {key}: cannot parse {vals}") from None
    if cast is int and not all(v.is_integer() for v in nums):
        raise ValidationError(f"--sweep {key}: expected integers, got {vals}")
    return [cast(v) for v in nums]


def _need_positive(name, v):
    if v is not None and v < 1:
        raise ValidationError(f"--{name} must be positive")


def run(args) -> tuple:
    """Return ``(spec, columns, rows, footer, extra_files)``; extra files are ``(suffix, writer)``."""
    sw = _sweeps(args.sweep)
    for name in ("grid", "J", "K", "K1", "q", "trials", "samples", "p", "workers"):
        _need_positive(name, getattr(args, name))
    spec = {"command": args.command, "seed": args.seed, "rng": args.rng}
    extra = []
    cmd = args.command

    if cmd == "statstudy":
        trials = args.trials or 100
        ps = _nums(sw, "p", (9, 25, 49, 81), int)
        ns = _nums(sw, "n", (), int)
        cs = [] if ns else _nums(sw, "c", (1.5,))
        spec.update(trials=trials, p=ps, c=cs, n=ns)
        rows, footer = ex.run_statstudy(ps, cs, trials, args.seed, ns or None, args.rng)
    elif cmd == "tail":
        p, n = args.p or 25, args.grid or 51
        samples = args.samples or args.trials or 100000
        ts = _nums(sw, "t", np.round(np.arange(0, 4.0001, 0.1), 10))
        spec.update(p=p, grid=n, samples=samples, t=ts)
        rows, footer = ex.run_tail(p, n, samples, args.seed, ts, args.rng)
    elif cmd == "chebcond":
        dim = args.dim or 1
        n1 = args.grid or (1601 if dim == 1 else 55)
        Ks = _nums(sw, "K", (4, 8, 16) if dim == 1 else range(2, 9), int)
        J, K1, m = args.J or 1, args.K1 or 3, args.order or 0
        spec.update(dim=dim, grid=n1, J=J, K1=K1, order=m, K=Ks)
        rows, footer = ex.run_chebcond(Ks, dim, n1, K1, J, m)
    elif cmd == "probe":
        operator = args.operator or ("elliptic1d" if (args.dim or 2) == 1 else "elliptic2d")
        dim = 1 if operator == "elliptic1d" else (args.dim or 2)
        if operator in ("elliptic2d", "foveation") and dim != 2:
            raise ValidationError(f"operator {operator} needs --dim 2")
        mode = args.mode or "forward"
        n1 = args.grid or (201 if dim == 1 else 21)
        family = args.family or ("fourier" if dim == 1 else "chebdisk")
        J, K = args.J or 5, args.K or (5 if family == "fourier" else 3)
        K1 = args.K1 or 3
        m = args.order if args.order is not None else (-2.0 if mode == "backward" else 0.0)
        q = args.q or 1
        T, gamma, form = args.T or 10.0, args.gamma or 2, args.form or "symbol"
        spec.update(mode=mode, operator=operator, dim=dim, grid=n1, family=family, J=J, K=K,
                    K1=K1 if family == "chebdisk" else None, order=m,
                    normalized=args.normalized, q=q, T=T, gamma=gamma, form=form)
        grid = Grid.from_points(n1, dim)
        A = ex.build_operator(operator, grid, T, gamma, form)
        fam = make_family(grid, family, J, K, m, args.normalized, K1)
        result, facts = ex.run_probe(mode, A, fam, q, args.seed, args.rng)
        rows = [{"index": i, "real": v.real, "imag": v.imag} for i, v in enumerate(result.c)]
        footer = {"cond_L": result.cond_L, "residual": result.residual,
                  "deviation": result.deviation, "rank_deficient": result.rank_deficient, **facts}
        header = {k: _fmt(v) for k, v in _echo(spec).items()}
        extra.append((".coef.csv", lambda path: _write_coef(path, result, header)))
        if sw:
            raise ValidationError(f"unused --sweep keys for probe: {sorted(sw)}")
        return spec, ["index", "real", "imag"], rows, footer, extra
    elif cmd == "precond2d":
        n1 = args.grid or 21
        Ts = _nums(sw, "T", (1e4,))
        gammas = _nums(sw, "gamma", (2,), int)
        Js = _nums(sw, "J", (3, 5), int)
        trials = args.trials or 10
        m = args.order if args.order is not None else -2.0
        spec.update(grid=n1, T=Ts, gamma=gammas, J=Js, trials=trials, order=m, q=args.q)
        rows, footer = ex.run_precond2d(Ts, gammas, Js, trials, args.seed, n1, m, args.q,
                                        args.rng, workers=args.workers)
    elif cmd == "ordercorrect":
        ms = _nums(sw, "m", (0, -1, -2, -3))
        n1s = _nums(sw, "n1", (101, 201), int)
        operator = args.operator or ("elliptic1d" if (args.dim or 1) == 1 else "elliptic2d")
        family = args.family or "fourier"
        J, K, K1 = args.J or 5, args.K or 5, args.K1 or 3
        T, gamma, form = args.T or 10.0, args.gamma or 2, args.form or "symbol"
        spec.update(m=ms, n1=n1s, operator=operator, family=family, J=J, K=K, K1=K1,
                    normalized=args.normalized, T=T, gamma=gamma, form=form)
        if operator == "identity":
            operator = "identity1d" if (args.dim or 1) == 1 else "identity2d"
        rows, footer = ex.run_ordercorrect(ms, n1s, operator, family, J, K, K1,
                                           args.normalized, T, gamma, form)
    elif cmd == "foveate":
        if args.image:
            image = read_pgm(args.image)
        else:
            image = ex.synthetic_image(args.grid or 65)
        Js = _nums(sw, "J", (1, 3, 5, 7), int)
        q = args.q or 1
        spec.update(image=args.image or "synthetic", grid=image.shape[0], J=Js, q=q)
        rows, footer, images = ex.run_foveate(image, Js, args.seed, q, args.rng)
        for name, img in images.items():
            extra.append((f".{name}.pgm", lambda path, img=img: write_pgm(path, img)))
    if sw:
        raise ValidationError(f"unused --sweep keys for {cmd}: {sorted(sw)}")
    return spec, COLUMNS[cmd], rows, footer, extra


def _echo(spec: dict) -> dict:
    return {k: spec[k] for k in sorted(spec) if spec[k] is not None and spec[k] != []}


def _fmt(v) -> str:
    return format_value(v)


def _write_coef(path, result, header):
    with open(path, "w") as fh:
        write_result_csv(result, fh, header)


def _stem(out: str) -> str:
    p = Path(out)
    return str(p.with_suffix("")) if p.suffix == ".csv" else str(p)


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        spec, columns, rows, footer, extra = run(args)
        text = render_csv(_echo(spec), columns, rows, footer)
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text)
            for suffix, writer in extra:
                writer(_stem(args.out) + suffix)
        else:
            sys.stdout.write(text)
    except (ValidationError, DimensionError) as exc:
        print(f"matprobe: error: {exc}", file=sys.stderr)
        return 2
    except CapabilityError as exc:
        print(f"matprobe: capability error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
