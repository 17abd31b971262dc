"""Command-line interface.

Commands::

    propcover interval --x 50 --n 100 --method wald --level 0.95
    propcover grid --levels 95 --methods all10 --nmax 100 --mode exact
    propcover ttest --level 99 --eps 5 6 --runs 100 --nmax 100
    propcover reproduce table2
    propcover legend --levels 90,95,99

Options resolve in the order command-line flag, then ``--config`` JSON file,
then built-in default.  The default output directory is ``$PROPCOVER_OUTDIR``
or ``./out``.  Every command that writes files also writes ``manifest.json``
with the resolved configuration and a SHA-256 of each output.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import platform
import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .analysis import build_spp_table, paired_spp_runs, paired_t_test
from .coverage import Mode, SamplingScheme
from .estimators import (
    ConfidenceLevel,
    EstimatorSpec,
    Method,
    SampleSummary,
)
from .grid import GridSpec, PixelGrid, run_grid, write_grid_csv, write_grids_json
from .palette import ColorCode
from .render import render_grid, render_legend, write_png, write_ppm

log = logging.getLogger("propcover")

OUTDIR_ENV = "PROPCOVER_OUTDIR"
REFERENCE_LEVELS = (0.90, 0.95, 0.99)

DEFAULTS = {
    "levels": "95",
    "methods": "all10",
    "epsilon": None,
    "nmin": 1,
    "nmax": 100,
    "p_stride": 1,
    "mode": "exact",
    "scheme": None,
    "population": 10_000,
    "shuffle": False,
    "n_sim": 1000,
    "seed": "0",
    "threads": 1,
    "scale": 1,
    "legend": False,
    "formats": "csv,ppm",
    "precise": False,
    "out": None,
}


class CliError(ValueError):
    """Bad input detected after argument parsing; reported as JSON, exit 1."""


# -- parsing helpers ------------------------------------------------------------


def parse_level(text) -> float:
    """'95', '0.95' and 95 all mean 0.95."""
    value = float(text)
    if value > 1:
        value /= 100
    if not 0 < value < 1:
        raise CliError(f"confidence level out of range: {text!r}")
    return round(value, 12)


def parse_levels(text) -> list[float]:
    if isinstance(text, (list, tuple)):
        return [parse_level(t) for t in text]
    return [parse_level(t) for t in str(text).split(",") if t.strip()]


def parse_seed(text) -> int:
    """Unsigned 64-bit seed, decimal or 0x-prefixed hex."""
    try:
        value = int(str(text), 0)
    except ValueError:
        raise CliError(f"seed must be a decimal or hex integer, got {text!r}") from None
    if not 0 <= value < 2**64:
        raise CliError(f"seed must fit in 64 unsigned bits, got {text!r}")
    return value


def best_epsilon(level: float) -> int:
    """Pseudo-observation count used for 'best': 3, 4, 6 at 90/95/99%, else round(z^2)."""
    table = _reference_data()["best_epsilon"]
    key = f"{level * 100:.10g}"
    if key in table:
        return int(table[key])
    return max(1, round(ConfidenceLevel(level).z ** 2))


def resolve_methods(text: str, level: float, epsilons: Sequence[int] | None = None) -> list[EstimatorSpec]:
    """Expand a comma list of method tokens for one level.

    Tokens: ``all10`` (Wald, Wilson, adjusted Wilson 1..8), ``wald``,
    ``wilson``, ``best``, ``adjwilsonK`` and ``adj-wilson`` (uses
    ``epsilons``).
    """
    out: list[EstimatorSpec] = []
    for token in (t.strip().lower() for t in text.split(",")):
        if not token:
            continue
        if token == "all10":
            out += [EstimatorSpec.wald(level), EstimatorSpec.wilson(level)]
            out += [EstimatorSpec.adjusted_wilson(e, level) for e in range(1, 9)]
        elif token == "wald":
            out.append(EstimatorSpec.wald(level))
        elif token == "wilson":
            out.append(EstimatorSpec.wilson(level))
        elif token == "best":
            out.append(EstimatorSpec.adjusted_wilson(best_epsilon(level), level))
        elif token in ("adj-wilson", "adjwilson", "adj"):
            if not epsilons:
                raise CliError(f"method {token!r} needs --epsilon")
            out += [EstimatorSpec.adjusted_wilson(int(e), level) for e in epsilons]
        elif token.startswith("adjwilson") and token[9:].isdigit():
            out.append(EstimatorSpec.adjusted_wilson(int(token[9:]), level))
        else:
            raise CliError(f"unknown method {token!r}")
    # drop duplicates, keep order
    seen, unique = set(), []
    for e in out:
        if e not in seen:
            seen.add(e)
            unique.append(e)
    return unique


def _reference_data() -> dict:
    text = resources.files("propcover").joinpath("data/reference_tables.json").read_text("utf-8")
    return json.loads(text)


# -- config -----------------------------------------------------------------------


@dataclass
class RunConfig:
    levels: list
    methods: str
    epsilon: list | None
    nmin: int
    nmax: int
    p_stride: int
    mode: str
    scheme: str | None
    population: int
    shuffle: bool
    n_sim: int
    seed: int
    threads: int
    scale: int
    legend: bool
    formats: list
    precise: bool
    out: str

    def sampling(self) -> SamplingScheme:
        if self.scheme is None:
            return SamplingScheme.binomial() if self.grid_mode is Mode.EXACT else self._finite()
        if self.scheme == "binomial":
            return SamplingScheme.binomial()
        if self.scheme == "finite":
            return self._finite()
        raise CliError(f"unknown scheme {self.scheme!r}")

    def _finite(self) -> SamplingScheme:
        return SamplingScheme.finite(self.population, self.shuffle)

    @property
    def grid_mode(self) -> Mode:
        try:
            return Mode(self.mode)
        except ValueError:
            raise CliError(f"mode must be 'exact' or 'mc', got {self.mode!r}") from None

    @property
    def p_indices(self) -> tuple[int, ...]:
        if self.p_stride < 1:
            raise CliError("--p-stride must be >= 1")
        return tuple(range(1, 100, self.p_stride))

    def as_dict(self) -> dict:
        d = dict(self.__dict__)
        d["seed"] = str(self.seed)
        return d


def resolve_config(args: argparse.Namespace) -> RunConfig:
    file_cfg = {}
    if getattr(args, "config", None):
        try:
            file_cfg = json.loads(Path(args.config).read_text("utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise CliError(f"cannot read config {args.config}: {exc}") from None
        unknown = set(file_cfg) - set(DEFAULTS)
        if unknown:
            raise CliError(f"unknown config keys: {sorted(unknown)}")
    merged = {}
    for key, default in DEFAULTS.items():
        flag = getattr(args, key, None)
        merged[key] = flag if flag is not None else file_cfg.get(key, default)
    if merged["out"] is None:
        merged["out"] = os.environ.get(OUTDIR_ENV, "out")
    formats = merged["formats"]
    if isinstance(formats, str):
        formats = [f.strip().lower() for f in formats.split(",") if f.strip()]
    bad = set(formats) - {"csv", "json", "ppm", "png"}
    if bad:
        raise CliError(f"unknown output formats: {sorted(bad)}")
    eps = merged["epsilon"]
    if isinstance(eps, int):
        eps = [eps]
    return RunConfig(
        levels=parse_levels(merged["levels"]),
        methods=str(merged["methods"]),
        epsilon=list(eps) if eps else None,
        nmin=int(merged["nmin"]),
        nmax=int(merged["nmax"]),
        p_stride=int(merged["p_stride"]),
        mode=str(merged["mode"]),
        scheme=None if merged["scheme"] is None else str(merged["scheme"]),
        population=int(merged["population"]),
        shuffle=bool(merged["shuffle"]),
        n_sim=int(merged["n_sim"]),
        seed=parse_seed(merged["seed"]),
        threads=max(1, int(merged["threads"])),
        scale=int(merged["scale"]),
        legend=bool(merged["legend"]),
        formats=formats,
        precise=bool(merged["precise"]),
        out=str(merged["out"]),
    )


# -- output bookkeeping ---------------------------------------------------------


class OutputDir:
    def __init__(self, path) -> None:
        self.path = Path(path)
        try:
            self.path.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise CliError(f"cannot create output directory {self.path}: {exc}") from None
        if not os.access(self.path, os.W_OK):
            raise CliError(f"output directory {self.path} is not writable")
        self.files: list[Path] = []

    def __truediv__(self, name: str) -> Path:
        p = self.path / name
        self.files.append(p)
        return p

    def write_text(self, name: str, text: str) -> Path:
        p = self / name
        with open(p, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        return p

    def write_json(self, name: str, obj) -> Path:
        return self.write_text(name, json.dumps(obj, indent=2, sort_keys=True) + "\n")

    def manifest(self, command: list[str], config: dict, extra: dict | None = None) -> Path:
        outputs = {}
        for p in sorted(set(self.files)):
            outputs[p.name] = hashlib.sha256(p.read_bytes()).hexdigest()
        body = {
            "command": command,
            "config": config,
            "versions": {
                "propcover": __version__,
                "python": platform.python_version(),
                "numpy": np.__version__,
            },
            "outputs": outputs,
        }
        if extra:
            body.update(extra)
        path = self.path / "manifest.json"
        path.write_text(json.dumps(body, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        return path


def _stem(est: EstimatorSpec, n_max: int) -> str:
    return f"{est.name}_{est.level.percent}_{n_max}"


def emit_grids(grids: Sequence[PixelGrid], cfg: RunConfig, out: OutputDir) -> None:
    """Write per-estimator grid files and images, plus one SPP table per level."""
    n_max = grids[0].spec.n_max
    for g in grids:
        stem = _stem(g.estimator, n_max)
        if "csv" in cfg.formats:
            write_grid_csv([g], out / f"{stem}.csv", precise=cfg.precise)
        if "ppm" in cfg.formats or "png" in cfg.formats:
            image = render_grid(g, scale=cfg.scale, legend=cfg.legend)
            if "ppm" in cfg.formats:
                write_ppm(image, out / f"{stem}.ppm")
            if "png" in cfg.formats:
                write_png(image, out / f"{stem}.png")
            out.write_json(f"{stem}.meta.json", image.meta)
    by_level: dict[float, list[PixelGrid]] = {}
    for g in grids:
        by_level.setdefault(g.estimator.level.level, []).append(g)
    for level, group in by_level.items():
        if "json" in cfg.formats:
            write_grids_json(group, out / f"grids_{group[0].estimator.level.percent}_{n_max}.json")
        table = build_spp_table(group)
        tag = f"{group[0].estimator.level.percent}_{n_max}"
        out.write_text(f"spp_{tag}.csv", table.to_csv())
        out.write_text(f"spp_{tag}.txt", table.to_text())


def compute_grids(cfg: RunConfig, estimators: Sequence[EstimatorSpec], n_max: int) -> list[PixelGrid]:
    spec = GridSpec(tuple(estimators), cfg.nmin, n_max, cfg.p_indices, cfg.grid_mode,
                    cfg.sampling(), cfg.n_sim, cfg.seed)
    log.info("grid: %d estimators x %d pixels (%s)", len(estimators), spec.pixel_count, cfg.mode)
    return run_grid(spec, threads=cfg.threads)


def _check_levels(levels: Sequence[float]) -> None:
    for level in levels:
        try:
            ColorCode.for_level(level)
        except ValueError as exc:
            raise CliError(f"level {level}: {exc}") from None


# -- commands -------------------------------------------------------------------


def cmd_interval(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    if args.n < 1 or not 0 <= args.x <= args.n:
        parser.error(f"need 0 <= x <= n and n >= 1 (got x={args.x}, n={args.n})")
    level = parse_level(args.level)
    method = args.method.lower()
    if method in ("adj-wilson", "adjwilson", "adj"):
        eps = args.epsilon[0] if args.epsilon else best_epsilon(level)
        spec = EstimatorSpec.adjusted_wilson(eps, level)
    elif method in ("wald", "wilson"):
        spec = EstimatorSpec(Method(method), ConfidenceLevel(level))
    else:
        parser.error(f"unknown method {args.method!r}")
    iv = spec.interval(args.x, args.n)
    s = SampleSummary(args.x, args.n)
    print(f"{spec.label} {spec.level.percent}% interval for x={s.successes}, n={s.trials} "
          f"(z={spec.level.z:.6f})")
    print(f"unclipped: [{iv.lower:.6f}, {iv.upper:.6f}]")
    print(f"clipped:   [{iv.clipped_lower:.6f}, {iv.clipped_upper:.6f}]")
    return 0


def cmd_grid(args: argparse.Namespace, argv: list[str]) -> int:
    cfg = resolve_config(args)
    _check_levels(cfg.levels)
    estimators = [e for level in cfg.levels for e in resolve_methods(cfg.methods, level, cfg.epsilon)]
    if not estimators:
        raise CliError("no estimators selected")
    out = OutputDir(cfg.out)
    grids = compute_grids(cfg, estimators, cfg.nmax)
    emit_grids(grids, cfg, out)
    for level in cfg.levels:
        print(build_spp_table([g for g in grids if g.estimator.level.level == level]).to_text())
    out.manifest(["grid"] + argv, cfg.as_dict())
    print(f"wrote {len(out.files)} files to {out.path}")
    return 0


def _ttest_report(level: float, eps: Sequence[int], spp_a, spp_b, res) -> str:
    lines = [f"paired t-test: adjusted Wilson {eps[0]} vs {eps[1]} at {level * 100:.10g}%",
             "run  spp_a     spp_b     diff"]
    for i, (a, b) in enumerate(zip(spp_a, spp_b)):
        lines.append(f"{i:<4} {a:.6f}  {b:.6f}  {a - b:+.6f}")
    lines.append(f"t = {res.t:.6f}, df = {res.df}, p = {res.p_value:.6g}")
    return "\n".join(lines) + "\n"


def cmd_ttest(args: argparse.Namespace, parser: argparse.ArgumentParser, argv: list[str]) -> int:
    if args.runs < 2:
        parser.error("--runs must be at least 2")
    cfg = resolve_config(args)
    cfg.mode = Mode.MONTE_CARLO.value  # repeated runs are always simulated
    level = parse_level(args.level)
    ea = EstimatorSpec.adjusted_wilson(args.eps[0], level)
    eb = EstimatorSpec.adjusted_wilson(args.eps[1], level)
    spp_a, spp_b = paired_spp_runs(ea, eb, args.runs, cfg.seed, cfg.nmax, cfg.n_sim,
                                   cfg.sampling(), cfg.p_indices, cfg.threads)
    res = paired_t_test(spp_a, spp_b)
    report = _ttest_report(level, args.eps, spp_a, spp_b, res)
    print(report, end="")
    if args.save:
        out = OutputDir(cfg.out)
        tag = f"{level * 100:.10g}_eps{args.eps[0]}_vs_{args.eps[1]}"
        out.write_text(f"ttest_{tag}.txt", report)
        out.write_json(f"ttest_{tag}.json", {
            "spp_a": spp_a, "spp_b": spp_b, "t": res.t, "df": res.df, "p_value": res.p_value})
        out.manifest(["ttest"] + argv, cfg.as_dict())
    return 0


def cmd_legend(args: argparse.Namespace, argv: list[str]) -> int:
    cfg = resolve_config(args)
    _check_levels(cfg.levels)
    out = OutputDir(cfg.out)
    _write_legend(cfg, out)
    out.manifest(["legend"] + argv, cfg.as_dict())
    return 0


def _write_legend(cfg: RunConfig, out: OutputDir) -> None:
    image = render_legend([ColorCode.for_level(level) for level in cfg.levels])
    stem = "legend_" + "-".join(f"{level * 100:.10g}" for level in cfg.levels)
    write_ppm(image, out / f"{stem}.ppm")
    if "png" in cfg.formats:
        write_png(image, out / f"{stem}.png")
    out.write_json(f"{stem}.meta.json", image.meta)
    print(f"wrote {out.path / (stem + '.ppm')}")


def _comparison(table, reference_rows, column_of, n_max: int) -> list[dict]:
    rows = []
    for ref in reference_rows:
        method = Method(ref["method"])
        for level_key, reference_value in column_of(ref):
            level = parse_level(level_key)
            ours = table.get(level, method, int(ref["epsilon"]), n_max)
            rows.append({
                "level": f"{level * 100:.10g}",
                "method": method.value,
                "epsilon": int(ref["epsilon"]),
                "n_max": n_max,
                "reference": reference_value,
                "ours": round(ours.spp, 6),
                "delta": round(ours.spp - reference_value, 6),
                "ours_is_max": ours.is_max,
            })
    return rows


def _comparison_text(rows: list[dict]) -> str:
    lines = ["level  method           eps  n_max   ref.     ours     delta"]
    for r in rows:
        lines.append(f"{r['level']:<6} {r['method']:<16} {r['epsilon']:>3}  {r['n_max']:>5}  "
                     f"{r['reference']:.4f}  {r['ours']:.4f}  {r['delta']:+.4f}{' *' if r['ours_is_max'] else ''}")
    lines.append(f"max |delta| = {max(abs(r['delta']) for r in rows):.4f}")
    return "\n".join(lines) + "\n"


def _comparison_csv(rows: list[dict]) -> str:
    cols = ["level", "method", "epsilon", "n_max", "reference", "ours", "delta", "ours_is_max"]
    lines = [",".join(cols)]
    for r in rows:
        lines.append(",".join(str(int(r[c]) if c == "ours_is_max" else r[c]) for c in cols))
    return "\n".join(lines) + "\n"


REPRODUCE_TARGETS = ("table2", "table3", "fig1", "fig2", "fig3", "fig4", "fig5")


def cmd_reproduce(args: argparse.Namespace, argv: list[str]) -> int:
    target = args.target
    reference = _reference_data()
    cfg = resolve_config(args)
    out = OutputDir(cfg.out)
    extra = {"target": target}

    if target == "fig1":
        cfg.levels = list(REFERENCE_LEVELS)
        _write_legend(cfg, out)
    elif target in ("fig2", "fig3", "fig4", "table2"):
        levels = {"fig2": [0.90], "fig3": [0.95], "fig4": [0.99]}.get(target, list(REFERENCE_LEVELS))
        cfg.levels = levels
        estimators = [e for lv in levels for e in resolve_methods("all10", lv)]
        grids = compute_grids(cfg, estimators, 100)
        if target == "table2":
            cfg.formats = [f for f in cfg.formats if f not in ("ppm", "png")]
        emit_grids(grids, cfg, out)
        if target == "table2":
            table = build_spp_table(grids)
            out.write_text("table2.csv", table.to_csv())
            out.write_text("table2.txt", table.to_text())
            rows = _comparison(table, reference["table2"]["rows"],
                               lambda ref: [(k, ref[k]) for k in ("90", "95", "99")], 100)
            out.write_text("table2_comparison.csv", _comparison_csv(rows))
            text = _comparison_text(rows)
            out.write_text("table2_comparison.txt", text)
            print(table.to_text())
            print(text, end="")
            extra["max_abs_delta"] = max(abs(r["delta"]) for r in rows)
    elif target in ("fig5", "table3"):
        cfg.levels = list(REFERENCE_LEVELS)
        estimators = [e for lv in REFERENCE_LEVELS for e in resolve_methods("wald,wilson,best", lv)]
        grids = compute_grids(cfg, estimators, 1000)
        if target == "table3":
            cfg.formats = [f for f in cfg.formats if f not in ("ppm", "png")]
        emit_grids(grids, cfg, out)
        if target == "table3":
            table = build_spp_table(grids)
            out.write_text("table3.csv", table.to_csv())
            out.write_text("table3.txt", table.to_text())
            refs = reference["table3"]["rows"]
            rows = []
            for ref in refs:
                rows += _comparison(table, [ref], lambda r: [(r["level"], r["1000"])], 1000)
            out.write_text("table3_comparison.csv", _comparison_csv(rows))
            text = _comparison_text(rows)
            out.write_text("table3_comparison.txt", text)
            print(table.to_text())
            print(text, end="")
            extra["max_abs_delta"] = max(abs(r["delta"]) for r in rows)
    else:  # argparse restricts choices; kept for direct callers
        raise CliError(f"unknown target {target!r}; choose from {', '.join(REPRODUCE_TARGETS)}")
    out.manifest(["reproduce"] + argv, cfg.as_dict(), extra)
    print(f"wrote {len(set(out.files))} files to {out.path}")
    return 0


# -- parser ---------------------------------------------------------------------


def _add_run_options(p: argparse.ArgumentParser, grid_shape: bool = True) -> None:
    p.add_argument("--config", help="JSON file of option defaults")
    p.add_argument("--out", help=f"output directory (default ${OUTDIR_ENV} or ./out)")
    if grid_shape:
        p.add_argument("--mode", choices=("exact", "mc"), help="exact sum or Monte Carlo (default exact)")
    p.add_argument("--scheme", choices=("finite", "binomial"),
                   help="sampling model (default binomial for exact, finite population for mc)")
    p.add_argument("--population", type=int, help="finite population size N (default 10000)")
    p.add_argument("--shuffle", action="store_true", default=None,
                   help="Monte Carlo: literal partial Fisher-Yates shuffle per replicate")
    p.add_argument("--n-sim", dest="n_sim", type=int, help="Monte Carlo replicates per pixel (default 1000)")
    p.add_argument("--seed", help="master seed, decimal or 0x hex (default 0)")
    p.add_argument("--threads", type=int, help="worker threads (default 1)")
    p.add_argument("--nmax", type=int, help="largest n (default 100)")
    p.add_argument("--p-stride", dest="p_stride", type=int,
                   help="use every k-th p value 0.01, 0.01+k/100, ... (default 1)")
    p.add_argument("--formats", help="comma list of csv,json,ppm,png (default csv,ppm)")
    if grid_shape:
        p.add_argument("--nmin", type=int, help="smallest n (default 1)")
        p.add_argument("--scale", type=int, help="image pixels per grid cell (default 1)")
        p.add_argument("--legend", action="store_true", default=None, help="append a colour strip")
        p.add_argument("--precise", action="store_true", default=None,
                       help="exact mode: 15 significant digits in CSV")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="propcover", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("interval", help="one confidence interval")
    p.add_argument("--x", type=int, required=True, help="successes")
    p.add_argument("--n", type=int, required=True, help="trials")
    p.add_argument("--method", required=True, help="wald, wilson or adj-wilson")
    p.add_argument("--epsilon", type=int, nargs=1, help="pseudo-observations for adj-wilson")
    p.add_argument("--level", default="0.95", help="confidence level (default 0.95)")

    p = sub.add_parser("grid", help="coverage grids, images and SPP tables")
    p.add_argument("--levels", help="comma list, e.g. 90,95,99 (default 95)")
    p.add_argument("--methods", help="all10 or comma list of wald,wilson,best,adjwilsonK,adj-wilson")
    p.add_argument("--epsilon", type=int, nargs="+", help="epsilons for adj-wilson")
    _add_run_options(p)

    p = sub.add_parser("ttest", help="paired t-test of two adjusted Wilson intervals over repeated runs")
    p.add_argument("--level", default="99")
    p.add_argument("--eps", type=int, nargs=2, required=True, metavar=("A", "B"))
    p.add_argument("--runs", type=int, default=100)
    p.add_argument("--save", action="store_true", help="also write the report to --out")
    _add_run_options(p, grid_shape=False)

    p = sub.add_parser("reproduce", help="regenerate a published table or figure")
    p.add_argument("target", choices=REPRODUCE_TARGETS)
    _add_run_options(p)

    p = sub.add_parser("legend", help="colour-code legend image")
    p.add_argument("--levels", help="comma list (default 95)")
    p.add_argument("--config")
    p.add_argument("--out")
    p.add_argument("--formats")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    rest = argv[argv.index(args.command) + 1:]
    try:
        if args.command == "interval":
            return cmd_interval(args, parser)
        if args.command == "grid":
            return cmd_grid(args, rest)
        if args.command == "ttest":
            return cmd_ttest(args, parser, rest)
        if args.command == "reproduce":
            return cmd_reproduce(args, rest)
        if args.command == "legend":
            return cmd_legend(args, rest)
    except (CliError, ValueError, KeyError, OSError, RuntimeError) as exc:
        report = {"error": type(exc).__name__, "message": str(exc).strip("'\""),
                  "command": args.command}
        print(json.dumps(report), file=sys.stderr)
        return 1
    parser.error(f"unknown command {args.command!r}")
    return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
