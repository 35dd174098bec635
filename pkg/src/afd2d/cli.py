"""Command-line front end: ``afd2d <decompose|toy|compare|bounds>``.

Exit status: 0 success, 1 usage error, 2 I/O error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .bounds import bound_traces, synthetic_member, woga_apriori_bound
from .dictionary import build_parameter_grid
from .engines import (ENGINES, is_product, level_for_terms, relative_error_db,
                      reconstruct_at, run_engine, steps_for_terms, term_rows)
from .errors import DomainError, NumericalFailure
from .images import read_image, read_signal_csv, write_pgm
from .metrics import evaluate
from .realsig import decompose_real, reconstruct_real
from .signal import Signal2D, TorusGrid, sample_toy_signal

log = logging.getLogger("afd2d")

FLOAT = "%.12e"
DEFAULT_RMAX = 0.95
TOY_SIZE = 128
TOY_TERMS = 25


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    engine: str = "preoga"
    terms: int = 256
    grid_nt: int = 8
    grid_ns: int = 8
    rmax: float | None = None
    offset: float = 0.5
    input: str | None = None
    out: str = "."
    bins: int = 256
    tol: float = 1e-8
    max_mult: int = 8
    levels: tuple = (1, 16, 64, 256)
    t_seq: tuple | None = None
    atoms: int = 8
    size: int = 32
    seed: int = 0
    figures: bool = True


def _fmt(x) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return FLOAT % x


def _write_csv(path: Path, header: list[str], rows) -> Path:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(v if isinstance(v, str) else str(v) if isinstance(v, (int, np.integer))
                              else _fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def _int_list(text: str) -> tuple:
    try:
        vals = tuple(int(v) for v in str(text).split(",") if v.strip())
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None
    if not vals or min(vals) < 1:
        raise UsageError("levels must be positive integers")
    return vals


def _float_list(text: str) -> tuple:
    try:
        vals = tuple(float(v) for v in str(text).split(",") if v.strip())
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None
    if not vals or any(not 0.0 < t <= 1.0 for t in vals):
        raise UsageError("weakness values must lie in (0, 1]")
    return vals


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    g = common.add_argument_group("common options")
    g.add_argument("--engine", choices=ENGINES, help="decomposition engine (default preoga)")
    g.add_argument("--terms", type=int,
                   help="effective number of terms; fd/afd run ceil(sqrt(terms)) levels (default 256)")
    g.add_argument("--grid-nt", type=int, help="angular subdivisions of the parameter grid (default 8)")
    g.add_argument("--grid-ns", type=int, help="radial subdivisions of the parameter grid (default 8)")
    g.add_argument("--rmax", type=float,
                   help="drop grid points with |a| > rmax (default 0.95 for decompose/compare, "
                        "no cut for toy/bounds)")
    g.add_argument("--offset", type=float, help="sampling node offset in grid steps (default 0.5)")
    g.add_argument("--input", help="input image (PGM P2/P5, PNG with Pillow) or complex-signal CSV")
    g.add_argument("--out", help="output directory (default .)")
    g.add_argument("--bins", type=int, help="histogram bins (default 256)")
    g.add_argument("--tol", type=float, help="Gram-Schmidt dependence tolerance (default 1e-8)")
    g.add_argument("--max-mult", type=int, help="Pre-OGA multiplicity cap (default 8)")
    g.add_argument("--levels", help="comma-separated term counts to report (default 1,16,64,256)")
    g.add_argument("--t-seq", help="comma-separated weakness parameters; the last one repeats")
    g.add_argument("--atoms", type=int, help="bounds: atoms in the synthetic function (default 8)")
    g.add_argument("--size", type=int, help="bounds: signal side length (default 32)")
    g.add_argument("--seed", type=int, help="bounds: random seed (default 0)")
    g.add_argument("--no-figures", dest="figures", action="store_false", default=None,
                   help="skip PNG figures")
    g.add_argument("--config", help="JSON file with option defaults; flags override it")
    g.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")

    parser = _Parser(prog="afd2d", description="Adaptive 2D rational decompositions of images and signals.")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True
    sub.add_parser("decompose", parents=[common], help="decompose one input and write terms, "
                   "reconstructions and metrics")
    sub.add_parser("toy", parents=[common], help="toy experiment: relative error of all engines "
                   "up to 25 terms on a 128x128 sampled function")
    sub.add_parser("compare", parents=[common], help="all engines on one image at several term counts")
    sub.add_parser("bounds", parents=[common], help="observed OGA/Pre-OGA remainders against error bounds")
    return parser


_NON_CONFIG = {"command", "config", "verbose"}


def parse_config(argv) -> RunConfig:
    ns = build_parser().parse_args(argv)
    values = {}
    if ns.config:
        try:
            raw = json.loads(Path(ns.config).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise UsageError(f"config {ns.config}: {exc}") from None
        if not isinstance(raw, dict):
            raise UsageError("config file must hold a JSON object")
        fields = set(RunConfig.__dataclass_fields__) - _NON_CONFIG
        for key, val in raw.items():
            k = key.replace("-", "_")
            if k not in fields:
                raise UsageError(f"unknown config key {key!r}")
            values[k] = val
    for k, v in vars(ns).items():
        if k not in _NON_CONFIG and v is not None:
            values[k] = v
    if "levels" in values and not isinstance(values["levels"], tuple):
        v = values["levels"]
        values["levels"] = _int_list(",".join(map(str, v)) if isinstance(v, list) else v)
    if values.get("t_seq") is not None and not isinstance(values["t_seq"], tuple):
        v = values["t_seq"]
        values["t_seq"] = _float_list(",".join(map(str, v)) if isinstance(v, list) else v)
    if "rmax" not in values and ns.command in ("decompose", "compare"):
        values["rmax"] = DEFAULT_RMAX
    cfg = RunConfig(command=ns.command, **values)
    try:
        _validate(cfg)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad option value: {exc}") from None
    if ns.verbose:
        logging.basicConfig(level=logging.INFO, format="%(message)s")
    return cfg


def _validate(cfg: RunConfig) -> None:
    if cfg.engine not in ENGINES:
        raise UsageError(f"engine must be one of {ENGINES}")
    for name in ("terms", "grid_nt", "grid_ns", "bins", "atoms", "max_mult"):
        if int(getattr(cfg, name)) < 1:
            raise UsageError(f"--{name.replace('_', '-')} must be at least 1")
    if cfg.size < 11:
        raise UsageError("--size must be at least 11")
    if cfg.rmax is not None and not 0.0 < cfg.rmax < 1.0:
        raise UsageError("--rmax must lie in (0, 1)")
    if not cfg.tol > 0:
        raise UsageError("--tol must be positive")
    if cfg.command in ("decompose", "compare") and not cfg.input:
        raise UsageError(f"{cfg.command} needs --input")


def _param_grid(cfg: RunConfig):
    return build_parameter_grid(cfg.grid_nt, cfg.grid_ns, cfg.rmax)


def _engine_opts(cfg: RunConfig) -> dict:
    return {"tol": cfg.tol, "t_seq": cfg.t_seq, "max_multiplicity": cfg.max_mult}


def _engine_steps(engine: str, terms: int, shape) -> int:
    steps = steps_for_terms(engine, terms)
    if is_product(engine):
        steps = min(steps, min(shape))
    return steps


def _level(engine: str, terms: int) -> int:
    return level_for_terms(engine, terms)


def _out_dir(cfg: RunConfig) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


TERM_HEADER = ["step", "a_re", "a_im", "b_re", "b_im", "ma", "mb", "coeff_re", "coeff_im",
               "residual_energy"]


def _term_csv(path: Path, result) -> Path:
    rows = [(step, a.real, a.imag, b.real, b.imag, ma, mb, c.real, c.imag, res)
            for step, a, b, ma, mb, c, res in term_rows(result)]
    return _write_csv(path, TERM_HEADER, rows)


def cmd_decompose(cfg: RunConfig) -> int:
    out = _out_dir(cfg)
    params = _param_grid(cfg)
    src = Path(cfg.input)
    if src.suffix.lower() == ".csv":
        return _decompose_complex(cfg, read_signal_csv(src), params, out)
    image = read_image(src)
    grid = TorusGrid(*image.shape, offset=cfg.offset)
    steps = _engine_steps(cfg.engine, cfg.terms, grid.shape)
    log.info("decompose %s: %s, %d steps", src.name, cfg.engine, steps)
    parts = decompose_real(Signal2D(grid, image), cfg.engine, steps, params, **_engine_opts(cfg))
    _term_csv(out / "terms_lift.csv", parts.lift)
    _term_csv(out / "terms_flip.csv", parts.flip)
    rows, panels = [], {"input": image}
    for T in cfg.levels:
        K = _level(cfg.engine, T)
        approx = reconstruct_real(parts, K).real
        res = image - approx
        rep = evaluate(image, approx, cfg.bins)
        rows.append((T, K, float(np.mean(res ** 2)), rep.bhattacharyya, rep.psnr_db, rep.mssim))
        write_pgm(out / f"recon_{T}.pgm", approx)
        write_pgm(out / f"residual_{T}.pgm", 128.0 + res)
        panels[f"{T} terms"] = approx
    _write_csv(out / "metrics.csv",
               ["terms", "level", "residual_energy", "bhattacharyya", "psnr_db", "mssim"], rows)
    if cfg.figures:
        from .plotting import plot_error_curves, plot_image_grid
        plot_image_grid(panels, out / "reconstructions.png")
        plot_error_curves([r[0] for r in rows], {cfg.engine: [r[4] for r in rows]},
                          out / "psnr.png", ylabel="PSNR (dB)")
    return 0


def _decompose_complex(cfg: RunConfig, f: Signal2D, params, out: Path) -> int:
    steps = _engine_steps(cfg.engine, cfg.terms, f.grid.shape)
    result = run_engine(f, cfg.engine, steps, params, **_engine_opts(cfg))
    _term_csv(out / "terms.csv", result)
    rows = [(T, _level(cfg.engine, T), relative_error_db(result, _level(cfg.engine, T)))
            for T in cfg.levels]
    _write_csv(out / "errors.csv", ["terms", "level", "relative_error_db"], rows)
    return 0


def _relative_db(result, level: int) -> float:
    # 20 log10 of an amplitude ratio equals 10 log10 of the energy ratio.
    return relative_error_db(result, level)


def cmd_toy(cfg: RunConfig) -> int:
    out = _out_dir(cfg)
    grid = TorusGrid(TOY_SIZE, TOY_SIZE, cfg.offset)
    f = sample_toy_signal(grid)
    params = _param_grid(cfg)
    results = {}
    for engine in ENGINES:
        steps = _engine_steps(engine, TOY_TERMS, grid.shape)
        log.info("toy: %s, %d steps", engine, steps)
        results[engine] = run_engine(f, engine, steps, params, **_engine_opts(cfg))
    terms = list(range(1, TOY_TERMS + 1))
    curves = {e: [_relative_db(r, _level(e, T)) for T in terms] for e, r in results.items()}
    _write_csv(out / "toy_errors.csv", ["terms", *ENGINES],
               [(T, *(curves[e][i] for e in ENGINES)) for i, T in enumerate(terms)])
    first = []
    for e in ("ga", "oga", "afd", "preoga"):
        row = term_rows(results[e])[0]
        first.append((e, row[1].real, row[1].imag, row[2].real, row[2].imag))
    _write_csv(out / "toy_first.csv", ["engine", "a_re", "a_im", "b_re", "b_im"], first)
    if cfg.figures:
        from .plotting import plot_error_curves, plot_image_grid
        plot_error_curves(terms, curves, out / "toy_errors.png")
        panels = {"signal (real part)": f.values.real}
        for e, r in results.items():
            panels[e] = reconstruct_at(r, _level(e, TOY_TERMS)).values.real
        lo, hi = float(f.values.real.min()), float(f.values.real.max())
        plot_image_grid(panels, out / "toy_reconstructions.png", ncols=3, vmin=lo, vmax=hi)
    return 0


COMPARE_HEADER = ["engine", "terms", "level", "residual_energy", "bhattacharyya", "psnr_db", "mssim"]


def cmd_compare(cfg: RunConfig) -> int:
    out = _out_dir(cfg)
    image = read_image(cfg.input)
    grid = TorusGrid(*image.shape, offset=cfg.offset)
    params = _param_grid(cfg)
    F = Signal2D(grid, image)
    top = max(cfg.levels)
    rows, curves, panels = [], {}, {"input": image}
    for engine in ENGINES:
        steps = _engine_steps(engine, top, grid.shape)
        log.info("compare: %s, %d steps", engine, steps)
        parts = decompose_real(F, engine, steps, params, **_engine_opts(cfg))
        curves[engine] = []
        for T in cfg.levels:
            K = _level(engine, T)
            approx = reconstruct_real(parts, K).real
            rep = evaluate(image, approx, cfg.bins)
            rows.append((engine, T, K, float(np.mean((image - approx) ** 2)),
                         rep.bhattacharyya, rep.psnr_db, rep.mssim))
            curves[engine].append(rep.psnr_db)
            write_pgm(out / f"compare_{engine}_{T}.pgm", approx)
            if T == top:
                panels[f"{engine}, {T} terms"] = approx
    _write_csv(out / "compare.csv", COMPARE_HEADER, rows)
    if cfg.figures:
        from .plotting import plot_error_curves, plot_image_grid
        plot_error_curves(list(cfg.levels), curves, out / "compare_psnr.png", ylabel="PSNR (dB)")
        plot_image_grid(panels, out / "compare_reconstructions.png", ncols=3)
    return 0


BOUNDS_HEADER = ["engine", "n", "observed", "oga_apriori", "woga_posteriori",
                 "wpreoga_posteriori", "preoga_completed"]


def cmd_bounds(cfg: RunConfig) -> int:
    out = _out_dir(cfg)
    grid = TorusGrid(cfg.size, cfg.size, cfg.offset)
    params = _param_grid(cfg)
    rng = np.random.default_rng(cfg.seed)
    f, M, atoms = synthetic_member(grid, params, cfg.atoms, rng)
    steps = min(cfg.terms, cfg.atoms)
    rows, violations, plots = [], 0, {}
    for engine in ("oga", "preoga"):
        state = run_engine(f, engine, steps, params, **_engine_opts(cfg))
        traces = {t.name: t for t in bound_traces(state, M, atoms, N_budget=M, t_seq=cfg.t_seq)}
        keep = (("woga_apriori", "woga_posteriori") if engine == "oga"
                else ("wpreoga_posteriori", "preoga_completed"))
        violations += sum(len(traces[k].violations()) for k in keep)
        obs = traces["woga_apriori"].observed_curve
        for i in range(len(obs)):
            n = i + 1
            cols = [traces[k].bound_curve[i] if k in keep else math.nan
                    for k in ("woga_apriori", "woga_posteriori", "wpreoga_posteriori",
                              "preoga_completed")]
            rows.append((engine, n, obs[i], *cols))
        plots[engine] = (list(range(1, len(obs) + 1)), obs,
                         {k: traces[k].bound_curve for k in keep})
    _write_csv(out / "bounds.csv", BOUNDS_HEADER, rows)
    _write_csv(out / "bounds_function.csv", ["atoms", "M", "apriori_n1"],
               [(cfg.atoms, M, woga_apriori_bound(M, cfg.t_seq, 1))])
    if violations:
        print(f"warning: {violations} observed remainder(s) exceed their bound", file=sys.stderr)
    if cfg.figures:
        from .plotting import plot_bounds
        for engine, (ns, obs, curves) in plots.items():
            plot_bounds(ns, obs, curves, out / f"bounds_{engine}.png", title=engine)
    return 0


COMMANDS = {"decompose": cmd_decompose, "toy": cmd_toy, "compare": cmd_compare, "bounds": cmd_bounds}


def main(argv=None) -> int:
    try:
        cfg = parse_config(sys.argv[1:] if argv is None else argv)
        return COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        print(f"afd2d: usage error: {exc}", file=sys.stderr)
        return 1
    except DomainError as exc:
        print(f"afd2d: usage error: {exc}", file=sys.stderr)
        return 1
    except NumericalFailure as exc:
        print(f"afd2d: numerical failure: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"afd2d: I/O error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        # Malformed input files surface as ValueError from the readers.
        print(f"afd2d: input error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
