"""Command-line front end: ``tlvca <subcommand> [options]``.

Every subcommand writes one CSV (stdout when ``--out`` is omitted).  With
``--out`` a manifest ``<out>.manifest.json`` is written next to it, and
optionally a gnuplot script and a PNG.  Files are only put in place once
everything has been computed, so a failed run leaves nothing behind.

Exit codes: 0 success, 2 usage error, 3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import shlex
import sys
import tempfile
from dataclasses import asdict
from typing import Sequence

import numpy as np

from . import __version__
from .analytics import (
    decode_failure_bound,
    lightcone_bound,
    sparse_params,
    survival_bound_finite,
)
from .ca_core import MIRRORED, PERIODIC, Family, RuleSet, enumerate_fixed_points, measure_eroder
from .circuit2d import geometric_gof, row_netlist, run_circuit_sim
from .noise_sim import (
    CorrectionMode,
    ExperimentConfig,
    TmaxPolicy,
    estimate_pdec,
    estimate_tff,
    make_rng,
    validate_sparse_bound,
)

SEED_ENV = "TLVCA_SEED"
SCHEMA = {
    "decode": 1,
    "ff": 1,
    "circuit": 1,
    "bounds": 1,
    "fixed-points": 1,
    "eroder": 1,
    "sparse": 1,
}

# point sets behind the "+" grid step
FIG_L = (16, 64, 144, 256, 400, 576, 784)
FIG_P0_STEP = 0.025


class UsageError(Exception):
    pass


class InvariantViolation(Exception):
    pass


# --------------------------------------------------------------------- grids


def _frange(a: float, b: float, step: float) -> list[float]:
    if step <= 0:
        raise UsageError("grid step must be positive")
    n = math.floor((b - a) / step + 1e-9)
    return [round(a + i * step, 12) for i in range(n + 1)]


def parse_grid(text: str, integer: bool) -> tuple:
    """Comma-separated items, each a value or ``start:stop[:step]`` (inclusive).

    A ``+`` step picks the figure point set inside ``[start, stop]``.
    """
    out: list = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            raise UsageError(f"empty item in grid {text!r}")
        parts = item.split(":")
        try:
            if len(parts) == 1:
                out.append(int(parts[0]) if integer else float(parts[0]))
                continue
            if len(parts) not in (2, 3):
                raise UsageError(f"bad grid item {item!r}")
            a, b = float(parts[0]), float(parts[1])
            step = parts[2] if len(parts) == 3 else None
            if step == "+":
                if integer:
                    out.extend(L for L in FIG_L if a <= L <= b)
                else:
                    out.extend(_frange(a, b, FIG_P0_STEP))
            elif integer:
                s = int(step) if step is not None else 1
                if s <= 0 or a != int(a) or b != int(b):
                    raise UsageError(f"bad integer grid {item!r}")
                out.extend(range(int(a), int(b) + 1, s))
            else:
                out.extend(_frange(a, b, float(step) if step is not None else 0.05))
        except ValueError as exc:
            raise UsageError(f"bad grid item {item!r}: {exc}") from None
    if not out:
        raise UsageError(f"grid {text!r} is empty")
    return tuple(dict.fromkeys(out))


def _tmax(text: str) -> TmaxPolicy:
    try:
        return TmaxPolicy.parse(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _dl(policy: str, L: int) -> int:
    if policy == "sqrt":
        return max(1, math.isqrt(L))
    if policy == "linear":
        return L
    if policy.startswith("const:"):
        try:
            v = int(policy[6:])
        except ValueError:
            v = 0
        if v >= 1:
            return v
    raise UsageError(f"bad D_L policy {policy!r}; use const:<n>, sqrt or linear")


def default_seed() -> int:
    v = os.environ.get(SEED_ENV)
    if v is None:
        return 0
    try:
        return int(v)
    except ValueError:
        raise UsageError(f"{SEED_ENV}={v!r} is not an integer") from None


# -------------------------------------------------------------------- output


def _fmt(v, integral: bool = False):
    if isinstance(v, np.generic):
        v = v.item()
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if integral and v.is_integer():
            return str(int(v))
        return repr(v)
    return v


# float columns that only carry whole numbers (or inf)
INTEGRAL = {"cap", "bound_ml"}


def to_csv(rows: Sequence[dict], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r[c], c in INTEGRAL) for c in columns])
    return buf.getvalue()


def gnuplot_hints(sub: str, csv_path: str, columns: Sequence[str]) -> str:
    """A gnuplot script that plots the main columns of ``csv_path``."""
    col = {c: i + 1 for i, c in enumerate(columns)}
    head = f'set datafile separator ","\nset key autotitle columnhead\nset key left\n'
    if sub == "decode":
        return head + (
            'set logscale y\nset xlabel "L"\nset ylabel "P_fail"\n'
            f'plot "{csv_path}" using {col["L"]}:{col["p_fail"]}:{col["p_fail_stderr"]} with yerrorbars\n'
        )
    if sub == "ff":
        return head + (
            'set logscale y\nset xlabel "L"\nset ylabel "<T_ff>"\n'
            f'plot "{csv_path}" using {col["L"]}:{col["mean_tff"]}:{col["stderr_tff"]} with yerrorbars\n'
        )
    if sub == "circuit":
        return head + (
            'set logscale y\nset xlabel "L"\nset ylabel "failure per step"\n'
            f'plot "{csv_path}" using {col["L"]}:{col["p_fail"]}:{col["p_fail_stderr"]} with yerrorbars\n'
        )
    if sub == "eroder":
        return head + (
            'set xlabel "l"\nset ylabel "t_dec"\n'
            f'plot "{csv_path}" using {col["l"]}:{col["t_dec"]} with steps, '
            f'"" using {col["l"]}:{col["bound_3l4"]} with lines\n'
        )
    if sub == "sparse":
        return head + (
            'set logscale y\nset xlabel "level"\nset ylabel "uncovered fraction"\n'
            f'plot "{csv_path}" using {col["level"]}:{col["uncovered_frac"]} with linespoints, '
            f'"" using {col["level"]}:{col["bound_clamped"]} with lines\n'
        )
    if sub == "bounds":
        return head + (
            'set logscale xy\nset xlabel "L"\nset ylabel "raw bound"\n'
            f'plot "{csv_path}" using {col["L"]}:($1 eq "decode_failure_bound" ? ${col["raw"]} : 1/0) '
            "with linespoints title \"decode_failure_bound\"\n"
        )
    return head + f'# no default plot for {sub}; columns: {", ".join(columns)}\n'


def _write_atomic(files: dict[str, bytes | str]) -> None:
    tmps = []
    try:
        for path, data in files.items():
            d = os.path.dirname(os.path.abspath(path))
            fd, tmp = tempfile.mkstemp(dir=d, prefix=".tlvca-")
            with os.fdopen(fd, "wb") as fh:
                fh.write(data.encode() if isinstance(data, str) else data)
            tmps.append((tmp, path))
        for tmp, path in tmps:
            os.replace(tmp, path)
    except BaseException:
        for tmp, _ in tmps:
            if os.path.exists(tmp):
                os.unlink(tmp)
        raise


def _png(sub: str, rows: Sequence[dict]) -> bytes:
    from .plotting import PLOTTERS

    with tempfile.TemporaryDirectory() as d:
        p = os.path.join(d, "fig.png")
        PLOTTERS[sub](rows, p)
        with open(p, "rb") as fh:
            return fh.read()


def _stem(path: str) -> str:
    return path[:-4] if path.endswith(".csv") else path


def emit(args, sub: str, rows: list[dict], columns: Sequence[str], config: dict, extra: dict | None = None) -> None:
    text = to_csv(rows, columns)
    if not args.out:
        sys.stdout.write(text)
        return
    stem = _stem(args.out)
    files: dict[str, bytes | str] = {args.out: text}
    outputs = {"csv": args.out}
    if args.gnuplot_hints:
        files[stem + ".gp"] = gnuplot_hints(sub, os.path.basename(args.out), columns)
        outputs["gnuplot"] = stem + ".gp"
    if args.plot:
        files[stem + ".png"] = _png(sub, rows)
        outputs["png"] = stem + ".png"
    for name, (path, data) in (extra or {}).items():
        files[path] = data
        outputs[name] = path
    manifest = {
        "subcommand": sub,
        "argv": args.argv,
        "config": config,
        "seed": getattr(args, "seed", None),
        "version": __version__,
        "schema_version": SCHEMA[sub],
        "columns": list(columns),
        "outputs": outputs,
    }
    files[stem + ".manifest.json"] = json.dumps(manifest, indent=2, sort_keys=True) + "\n"
    _write_atomic(files)


# --------------------------------------------------------------- subcommands


DECODE_COLUMNS = ("L", "p0", "tmax_policy", "trials", "p_fail", "p_fail_stderr", "cycle_frac", "mean_tdec", "median_tdec")
FF_COLUMNS = ("L", "p0", "mode", "trials", "mean_tff", "stderr_tff", "censored_frac", "cap", "sampler")
CIRCUIT_COLUMNS = (
    "L", "dl_policy", "D_L", "p0", "horizon", "lanes", "patterns", "failures",
    "p_fail", "p_fail_stderr", "mean_ttff", "stderr_ttff", "n_ttff", "gof_pvalue",
)  # fmt: skip
BOUNDS_COLUMNS = ("quantity", "L", "param", "raw", "clamped", "exact")
FP_COLUMNS = ("L", "boundary", "family", "state", "weight")
ERODER_COLUMNS = ("l", "t_dec", "bound_3l4", "bound_ml")
SPARSE_COLUMNS = ("level", "uncovered_frac", "stderr", "bound_raw", "bound_clamped")


def _config(args, **kw) -> ExperimentConfig:
    try:
        return ExperimentConfig(**kw, seed=args.seed, threads=args.threads)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_decode(args) -> int:
    L_grid = parse_grid(args.L_grid, integer=True)
    bad = [L for L in L_grid if L < 2 or L % 2]
    if bad:
        raise UsageError(f"TLV with mirrored boundaries needs even L >= 2, got {bad}")
    cfg = _config(
        args,
        L_grid=L_grid,
        p0_grid=parse_grid(args.p0_grid, integer=False),
        trials=args.trials,
        tmax=_tmax(args.tmax),
        tdec_bin=args.tdec_bin,
    )
    stats = estimate_pdec(cfg)
    for p in stats.points:
        if not 0.0 <= p.p_fail <= 1.0 or p.n_clean + p.n_flip + p.n_cycle + p.n_timeout != p.trials:
            raise InvariantViolation(f"inconsistent counts at L={p.L}, p0={p.p0}")
    emit(args, "decode", stats.rows(), DECODE_COLUMNS, cfg.to_dict())
    return 0


def cmd_ff(args) -> int:
    L_grid = parse_grid(args.L_grid, integer=True)
    if any(L < 2 or L % 2 for L in L_grid):
        raise UsageError("L must be even and >= 2")
    cfg = _config(
        args,
        L_grid=L_grid,
        p0_grid=parse_grid(args.p0_grid, integer=False),
        trials=args.trials,
        mode=CorrectionMode(args.mode),
        ff_cap=args.cap,
    )
    stats = estimate_tff(cfg, sampler=args.sampler)
    d = cfg.to_dict()
    d["sampler"] = args.sampler
    emit(args, "ff", stats.rows(), FF_COLUMNS, d)
    return 0


def cmd_circuit(args) -> int:
    L_grid = parse_grid(args.L_grid, integer=True)
    if any(L < 2 or L % 2 for L in L_grid):
        raise UsageError("L must be even and >= 2")
    p0_grid = parse_grid(args.p0_grid, integer=False)
    if args.horizon < 1 or args.lanes < 1:
        raise UsageError("horizon and lanes must be >= 1")
    rows = []
    idx = 0
    for L in L_grid:
        D = _dl(args.dl, L)
        for p0 in p0_grid:
            if not 0 <= p0 <= 1:
                raise UsageError(f"p0 {p0} outside [0, 1]")
            r = run_circuit_sim(L, D, p0, args.horizon, make_rng(args.seed, idx, 0), lanes=args.lanes)
            idx += 1
            if r.failures > r.patterns:
                raise InvariantViolation("more failures than patterns")
            gof = geometric_gof(r.ttff)[1] if r.ttff.size >= 50 else math.nan
            rows.append(
                {
                    "L": L,
                    "dl_policy": args.dl,
                    "D_L": D,
                    "p0": p0,
                    "horizon": args.horizon,
                    "lanes": args.lanes,
                    "patterns": r.patterns,
                    "failures": r.failures,
                    "p_fail": r.p_fail,
                    "p_fail_stderr": r.p_fail_stderr,
                    "mean_ttff": r.mean_ttff,
                    "stderr_ttff": r.stderr_ttff,
                    "n_ttff": int(r.ttff.size),
                    "gof_pvalue": gof,
                }
            )
    extra = {}
    if args.emit_netlist:
        net = row_netlist(L_grid[0])
        extra["netlist"] = (args.emit_netlist, net.to_text())
    config = {
        "L_grid": list(L_grid),
        "p0_grid": list(p0_grid),
        "dl": args.dl,
        "horizon": args.horizon,
        "lanes": args.lanes,
        "seed": args.seed,
    }
    if not args.out and extra:
        # netlist still goes to its file when the table goes to stdout
        _write_atomic({args.emit_netlist: extra["netlist"][1]})
    emit(args, "circuit", rows, CIRCUIT_COLUMNS, config, extra)
    return 0


def cmd_bounds(args) -> int:
    R, m = (4, 1) if args.preset == "tlv" else (args.R, args.m)
    if R is None or m is None:
        raise UsageError("give --preset tlv or both --R and --m")
    if not 0.0 <= args.p0 <= 1.0:
        raise UsageError("p0 must lie in [0, 1]")
    if not 0.0 < args.kappa < 1.0:
        raise UsageError("kappa must lie in (0, 1)")
    sp = sparse_params(R, m, args.p0)
    k = sp.k
    rows = [
        {"quantity": "k", "L": "", "param": "", "raw": float(k), "clamped": float(k), "exact": str(k)},
        {"quantity": "beta", "L": "", "param": "", "raw": sp.beta, "clamped": sp.beta, "exact": f"ln(2)/ln({4 * k + 3})"},
        {"quantity": "alpha", "L": "", "param": f"p0={args.p0!r}", "raw": sp.alpha, "clamped": sp.alpha,
         "exact": f"{2 * k * (4 * k + 3)}*sqrt(p0)"},
        {"quantity": "gamma", "L": "", "param": f"p0={args.p0!r}", "raw": sp.gamma, "clamped": sp.gamma, "exact": "-ln(alpha)"},
        {"quantity": "p_tilde_c", "L": "", "param": "", "raw": float(sp.p_tilde_c), "clamped": float(sp.p_tilde_c),
         "exact": str(sp.p_tilde_c)},
        {"quantity": "a", "L": "", "param": "", "raw": float(sp.a), "clamped": float(sp.a), "exact": str(sp.a)},
    ]  # fmt: skip
    for L in parse_grid(args.L_grid, integer=True):
        if L < 1:
            raise UsageError("L must be positive")
        t = math.floor(L**args.kappa + 1e-9)
        s = survival_bound_finite(L, t, sp)
        d = decode_failure_bound(L, args.kappa, sp)
        lc = lightcone_bound(L, R * t, min(args.p0, 0.5))
        for q, b, param in (
            ("survival_bound_finite", (s.raw, s.clamped), f"t={t}"),
            ("decode_failure_bound", (d.raw, d.clamped), f"kappa={args.kappa!r}"),
            ("lightcone_success_bound", (lc, lc), f"D={R * t}"),
        ):
            rows.append({"quantity": q, "L": L, "param": param, "raw": b[0], "clamped": b[1], "exact": ""})
    config = {"R": R, "m": m, "p0": args.p0, "kappa": args.kappa, "L_grid": args.L_grid}
    emit(args, "bounds", rows, BOUNDS_COLUMNS, config)
    return 0


def cmd_fixed_points(args) -> int:
    if args.L < 2:
        raise UsageError("L must be >= 2")
    boundary = MIRRORED if args.boundary == "mirrored" else PERIODIC
    try:
        rules = RuleSet(Family(args.family), boundary)
        rules.check_length(args.L)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.L > 24:
        raise UsageError("exhaustive census is limited to L <= 24")
    fps = sorted(enumerate_fixed_points(args.L, rules), key=lambda s: s.to_string())
    rows = [
        {"L": args.L, "boundary": args.boundary, "family": args.family, "state": s.to_string(), "weight": s.weight}
        for s in fps
    ]
    emit(args, "fixed-points", rows, FP_COLUMNS, {"L": args.L, "boundary": args.boundary, "family": args.family})
    return 0


def cmd_eroder(args) -> int:
    if args.lmax < 1:
        raise UsageError("lmax must be >= 1")
    try:
        table = measure_eroder(args.lmax, m=args.m)
    except RuntimeError as exc:
        raise InvariantViolation(str(exc)) from None
    rows = [
        {"l": l, "t_dec": t, "bound_3l4": (3 * l) // 4 + 1, "bound_ml": args.m * l}
        for l, t in table.rows
        if l >= 1
    ]
    bad = table.violations()
    if bad:
        raise InvariantViolation(f"eroder bound violated at (l, t_dec) = {bad[:5]}")
    emit(args, "eroder", rows, ERODER_COLUMNS, {"lmax": args.lmax, "m": args.m})
    return 0


def cmd_sparse(args) -> int:
    if not 0.0 <= args.p0 <= 1.0:
        raise UsageError("p0 must lie in [0, 1]")
    if args.k < 1 or args.half_width < 1 or args.windows < 1:
        raise UsageError("k, half-width and windows must be >= 1")
    try:
        table = validate_sparse_bound(
            args.p0, k=args.k, half_width=args.half_width, windows=args.windows, l_max=args.lmax, seed=args.seed
        )
    except AssertionError as exc:
        raise InvariantViolation(str(exc)) from None
    fr = [r.uncovered_frac for r in table]
    if any(b > a for a, b in zip(fr, fr[1:])):
        raise InvariantViolation("uncovered fraction increased with level")
    rows = [asdict(r) for r in table]
    config = {"p0": args.p0, "k": args.k, "half_width": args.half_width, "windows": args.windows, "lmax": args.lmax}
    emit(args, "sparse", rows, SPARSE_COLUMNS, config)
    return 0


def cmd_replay(args) -> int:
    try:
        with open(args.manifest) as fh:
            manifest = json.load(fh)
        argv = list(manifest["argv"])
    except (OSError, ValueError, KeyError) as exc:
        raise UsageError(f"cannot read manifest: {exc}") from None
    if args.out:
        if "--out" in argv:
            argv[argv.index("--out") + 1] = args.out
        else:
            argv += ["--out", args.out]
    return run(argv)


# ------------------------------------------------------------------- parser


def _common(p: argparse.ArgumentParser, seeded: bool = True) -> None:
    if seeded:
        p.add_argument("--seed", type=int, default=None, help=f"RNG seed (default: ${SEED_ENV} or 0)")
    p.add_argument("--out", help="CSV path; also writes <out>.manifest.json (default: CSV to stdout)")
    p.add_argument("--gnuplot-hints", action="store_true", help="write a gnuplot script <out>.gp")
    p.add_argument("--plot", action="store_true", help="render <out>.png with matplotlib")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tlvca", description=__doc__.split("\n\n")[0])
    ap.add_argument("--version", action="version", version=f"tlvca {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    grid_help = "comma list of values or start:stop[:step]; step + selects the figure point set"

    p = sub.add_parser("decode", help="static decoding sweep (failure probability, decoding time)")
    p.add_argument("--L-grid", default="50,100,200,300", help=grid_help)
    p.add_argument("--p0-grid", default="0.1,0.3", help=grid_help)
    p.add_argument("--trials", type=int, default=10**6)
    p.add_argument("--tmax", default="unbounded", help="unbounded | linear[:c] | pow:<kappa> | const:<T>")
    p.add_argument("--tdec-bin", type=int, default=10, help="t_dec histogram bin width")
    p.add_argument("--threads", type=int, default=1, help="worker threads across grid points")
    _common(p)
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("ff", help="continuous noise: time to the first majority flip")
    p.add_argument("--L-grid", default="10,50,100,210", help=grid_help)
    p.add_argument("--p0-grid", default="0.125", help=grid_help)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--mode", choices=[m.value for m in CorrectionMode], default="tlv1d")
    p.add_argument("--cap", type=int, default=10**7, help="step cap for stepped runs")
    p.add_argument("--sampler", choices=("auto", "stepped", "skip"), default="auto",
                   help="global mode only: skip rounds too light to flip the majority")  # fmt: skip
    p.add_argument("--threads", type=int, default=1)
    _common(p)
    p.set_defaults(func=cmd_ff)

    p = sub.add_parser("circuit", help="2D pipeline co-simulation under continuous noise")
    p.add_argument("--L-grid", default="100", help=grid_help)
    p.add_argument("--p0-grid", default="0.2", help=grid_help)
    p.add_argument("--dl", default="const:10", help="pipeline depth: const:<n> | sqrt | linear")
    p.add_argument("--horizon", type=int, default=2000, help="time steps per lane")
    p.add_argument("--lanes", type=int, default=256, help="independent co-simulations")
    p.add_argument("--emit-netlist", metavar="PATH", help="write the gate-level row netlist for the first L")
    _common(p)
    p.set_defaults(func=cmd_circuit)

    p = sub.add_parser("bounds", help="closed-form constants and bounds (raw and clamped)")
    p.add_argument("--preset", choices=("tlv",), help="R=4, m=1")
    p.add_argument("--R", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--p0", type=float, default=1e-7)
    p.add_argument("--kappa", type=float, default=0.5)
    p.add_argument("--L-grid", default="1000,10000,100000,1000000,10000000,100000000,1000000000", help=grid_help)
    _common(p, seeded=False)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("fixed-points", help="exhaustive fixed-point census")
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--boundary", choices=("mirrored", "periodic"), default="mirrored")
    p.add_argument("--family", choices=("tlv", "gkl"), default="tlv")
    _common(p, seeded=False)
    p.set_defaults(func=cmd_fixed_points)

    p = sub.add_parser("eroder", help="cleanup time of contiguous clusters")
    p.add_argument("--lmax", type=int, default=64)
    p.add_argument("--m", type=float, default=1.0)
    _common(p, seeded=False)
    p.set_defaults(func=cmd_eroder)

    p = sub.add_parser("sparse", help="cluster decomposition of mirrored Bernoulli windows")
    p.add_argument("--p0", type=float, default=0.01)
    p.add_argument("--k", type=int, default=8)
    p.add_argument("--half-width", type=int, default=32)
    p.add_argument("--windows", type=int, default=1000)
    p.add_argument("--lmax", type=int, default=None)
    _common(p)
    p.set_defaults(func=cmd_sparse)

    p = sub.add_parser("replay", help="re-run the command recorded in a manifest")
    p.add_argument("manifest")
    p.add_argument("--out", help="write to this CSV instead of the recorded path")
    p.set_defaults(func=cmd_replay)
    return ap


def run(argv: Sequence[str]) -> int:
    ap = build_parser()
    argv = list(argv)
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if hasattr(args, "seed") and args.seed is None:
            args.seed = default_seed()
        if args.command != "replay":
            # record the resolved seed so the manifest replays exactly
            args.argv = argv if "--seed" in argv or not hasattr(args, "seed") else argv + ["--seed", str(args.seed)]
        return args.func(args)
    except UsageError as exc:
        print(f"tlvca {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except InvariantViolation as exc:
        print(f"tlvca {args.command}: invariant violated: {exc}", file=sys.stderr)
        return 3


def main(argv: Sequence[str] | None = None) -> int:
    return run(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
