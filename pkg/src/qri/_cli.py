"""Command line interface for qri.

Every subcommand resolves its arguments into a RunConfig, runs one library
operation, and renders the result as a rich table, a JSON report or CSV.
JSON reports carry the tool version and the full resolved configuration so
a run can be repeated exactly.
"""

import argparse
import io
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Any, Final

import pandas as pd
from loguru import logger
from rich.console import Console
from rich.table import Table
from scipy import integrate

from . import __version__
from ._constants import (
    DEFAULT_ALPHA,
    DEFAULT_COUNT_SCALE,
    DEFAULT_GRID_SIZE,
    DEFAULT_KDE_POINTS,
    DEFAULT_PERCENTILES,
    DEFAULT_TAIL_SHAPE,
    DISPLAY_DECIMALS,
)
from ._distributions import SeededRng, parse_distribution
from ._estimation import (
    BandwidthPolicy,
    DecompositionEstimate,
    SortedSample,
    exact_i,
    exact_ik,
    ik_hat_grid,
    ingest,
)
from ._exceptions import FileError, NonIntegerBlockBoundary, QRIError
from ._grouped import (
    BUNDLED_TABLES,
    SynthConfig,
    kde_bandwidth,
    kde_export,
    load_bundled_bins,
    percentile_table,
    read_bins,
    subsample,
    synth_population,
    tail_scale,
)
from ._json import serialize_json
from ._partitions import SymmetricPartition, equi_partition, parse_partition
from ._reader import read_incomes
from ._simulation import (
    DESK_SCALE_FAMILIES,
    REFERENCE_FAMILIES,
    coverage_experiment,
    coverage_table,
    resolve_workers,
)
from ._theory import QuadratureConfig, ratio_curves, true_I, true_Ik
from ._writer import atomic_replace, frame_to_csv, write_csv, write_json

if TYPE_CHECKING:
    from collections.abc import Callable, Sequence

    from ._types import OutputFormat

__all__ = ["RunConfig", "main", "run"]

_TOOL: Final[str] = "qri"
_FILE_TABLE_WIDTH: Final[int] = 120
_LOG_LEVELS: Final[tuple[str, ...]] = ("WARNING", "INFO", "DEBUG")
_DATA_COMMANDS: Final[frozenset[str]] = frozenset({"synth", "kde"})

# argparse destinations that become RunConfig fields rather than options
_CONFIG_KEYS: Final[frozenset[str]] = frozenset(
    {
        "command",
        "verbose",
        "input",
        "out",
        "partition",
        "equi",
        "partition_default",
        "grid",
        "alpha",
        "seed",
        "tail_shape",
        "bandwidth",
        "format",
    }
)


@dataclass(frozen=True, slots=True)
class RunConfig:
    """The fully resolved configuration of one command line run.

    Attributes:
        command: The subcommand name.
        input: Input file, checked to exist before any computation.
        output: Output file; its directory is checked to exist.
        partition: The symmetric partition, for commands that take one.
        grid_size: Grid size J of the grid estimators.
        alpha: Nominal error rate of the confidence intervals.
        seed: Seed of the random stream, for commands that sample.
        tail_shape: Pareto shape of the open top bin (synth only).
        bandwidth: Override of the quantile-density bandwidth coefficient.
        output_format: How the report is rendered.
        options: Remaining subcommand-specific settings.
    """

    command: str
    input: Path | None = None
    output: Path | None = None
    partition: SymmetricPartition | None = None
    grid_size: int = DEFAULT_GRID_SIZE
    alpha: float = DEFAULT_ALPHA
    seed: int | None = None
    tail_shape: float | None = None
    bandwidth: float | None = None
    output_format: "OutputFormat" = "table"
    options: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        """Resolve parsed arguments, validating paths and the partition.

        Raises:
            FileError: If the input file does not exist or the output
                directory is missing.
            PartitionError: If the partition literal is invalid.
            ParseError: If a cut is not a number.
        """
        values = vars(args)
        input_path = _existing_file(values.get("input"))
        output_path = _writable_path(values.get("out"))
        options = {k: v for k, v in values.items() if k not in _CONFIG_KEYS}
        if options.get("curve") is not None:
            _ = _writable_path(options["curve"])
        if values["command"] == "coverage":
            options["workers"] = resolve_workers(options.get("workers"))
        return cls(
            command=values["command"],
            input=input_path,
            output=output_path,
            partition=_resolve_partition(values),
            grid_size=values.get("grid", DEFAULT_GRID_SIZE),
            alpha=values.get("alpha", DEFAULT_ALPHA),
            seed=values.get("seed"),
            tail_shape=values.get("tail_shape"),
            bandwidth=values.get("bandwidth"),
            output_format=_resolve_format(
                values["command"], values.get("format"), output_path
            ),
            options=options,
        )

    def policy(self) -> BandwidthPolicy:
        """Return the bandwidth policy implied by the overrides."""
        edge = self.options.get("edge", "shift")
        window = self.options.get("window", "local")
        if self.bandwidth is None:
            return BandwidthPolicy(edge=edge, window=window)
        return BandwidthPolicy(coefficient=self.bandwidth, edge=edge, window=window)

    def as_dict(self) -> dict[str, Any]:
        """Return the configuration as a JSON-ready mapping."""
        return {
            "command": self.command,
            "input": None if self.input is None else str(self.input),
            "output": None if self.output is None else str(self.output),
            "cuts": None if self.partition is None else list(self.partition.cuts),
            "grid_size": self.grid_size,
            "alpha": self.alpha,
            "seed": self.seed,
            "tail_shape": self.tail_shape,
            "bandwidth": self.bandwidth,
            "format": self.output_format,
            **self.options,
        }


@dataclass(frozen=True, slots=True)
class _Output:
    result: dict[str, Any]
    frame: pd.DataFrame
    table: Table


def _existing_file(value: str | None) -> Path | None:
    if value is None:
        return None
    path = Path(value)
    if not path.is_file():
        msg = f"input file not found: {path}"
        raise FileError(msg)
    return path


def _writable_path(value: str | None) -> Path | None:
    if value is None:
        return None
    path = Path(value)
    if not path.parent.is_dir():
        msg = f"output directory does not exist: {path.parent}"
        raise FileError(msg)
    return path


def _resolve_partition(values: dict[str, Any]) -> SymmetricPartition | None:
    if values.get("equi") is not None:
        return equi_partition(values["equi"])
    if values.get("partition") is not None:
        return parse_partition(values["partition"])
    default = values.get("partition_default")
    return None if default is None else parse_partition(default)


def _resolve_format(
    command: str, explicit: "OutputFormat | None", output: Path | None
) -> "OutputFormat":
    if explicit is not None:
        return explicit
    if output is None or command in _DATA_COMMANDS:
        return "table"
    return "csv" if output.suffix.lower() == ".csv" else "json"


# Formatting


def _fmt(value: float | None) -> str:
    if value is None or not math.isfinite(value):
        return "n/a"
    return f"{value:.{DISPLAY_DECIMALS}f}"


def _interval(low: float | None, high: float | None) -> str:
    if low is None or high is None:
        return "n/a"
    return f"[{_fmt(low)}, {_fmt(high)}]"


def _caption(cfg: RunConfig, **extra: object) -> str:
    settings = {**cfg.as_dict(), **extra}
    shown = (f"{k}={v}" for k, v in settings.items() if v is not None and k != "format")
    return ", ".join(shown)


_TOTAL_MEMBER: Final[dict[str, Any]] = {
    "k": "total",
    "lower": 0.0,
    "upper": 0.5,
    "weight": 1.0,
}


def _member_rows(partition: SymmetricPartition) -> list[dict[str, Any]]:
    return [
        {"k": str(k), "lower": lower, "upper": upper, "weight": weight}
        for k, (lower, upper, weight) in enumerate(partition.members(), start=1)
    ]


# Subcommands


def _subsample(cfg: RunConfig, population: SortedSample) -> SortedSample:
    size = cfg.options.get("subsample")
    if size is None:
        return population
    drawn = subsample(population, size, SeededRng(cfg.seed or 0))
    logger.info("kept a random subsample of {} of {}", drawn.n, population.n)
    return drawn


def _load_sample(cfg: RunConfig) -> SortedSample:
    if cfg.input is None:  # pragma: no cover
        msg = "no input file"
        raise FileError(msg)
    sample = ingest(read_incomes(cfg.input))
    logger.info("read {} incomes from {}", sample.n, cfg.input)
    return _subsample(cfg, sample)


def _decomposition_output(
    cfg: RunConfig, estimate: DecompositionEstimate, s: SortedSample
) -> _Output:
    components = estimate.components
    total = estimate.total
    rows = [
        {
            **member,
            "value": c.value,
            "se": c.se,
            "ci_low": c.ci_low,
            "ci_high": c.ci_high,
            "contribution": contribution,
            "share": share,
        }
        for member, c, contribution, share in zip(
            _member_rows(estimate.partition),
            components,
            estimate.contributions,
            estimate.shares,
            strict=True,
        )
    ]
    rows.append(
        {
            **_TOTAL_MEMBER,
            "value": total.value,
            "se": total.se,
            "ci_low": total.ci_low,
            "ci_high": total.ci_high,
            "contribution": math.fsum(estimate.contributions),
            "share": 1.0,
        }
    )
    frame = pd.DataFrame(rows)

    table = Table(
        title=f"Quantile ratio index ({estimate.method}, n={s.n})",
        caption=_caption(cfg),
    )
    for name in ("k", "p range", "weight", "I_k", "se", "CI", "w_k I_k", "share"):
        table.add_column(name, justify="left" if name in {"k", "p range"} else "right")
    for k, (c, contribution, share) in enumerate(
        zip(components, estimate.contributions, estimate.shares, strict=True),
        start=1,
    ):
        lower, upper = estimate.partition.bounds(k)
        table.add_row(
            str(k),
            f"[{lower:g}, {upper:g}]",
            _fmt(estimate.partition.weights[k - 1]),
            _fmt(c.value),
            _fmt(c.se),
            _interval(c.ci_low, c.ci_high),
            _fmt(contribution),
            _fmt(share),
        )
    table.add_row(
        "I",
        "[0, 0.5]",
        _fmt(1.0),
        _fmt(total.value),
        _fmt(total.se),
        _interval(total.ci_low, total.ci_high),
        _fmt(math.fsum(estimate.contributions)),
        _fmt(1.0),
        style="bold",
    )
    result = {"n": s.n, "zero_fraction": s.zero_fraction, **estimate.as_dict()}
    return _Output(result, frame, table)


def _exact_decomposition(
    cfg: RunConfig, s: SortedSample, partition: SymmetricPartition, *, strict: bool
) -> DecompositionEstimate:
    with_se = bool(cfg.options.get("with_se", False))
    policy = cfg.policy()
    if len(partition) == 1 and not strict:
        total = exact_i(
            s, with_se=with_se, grid_size=cfg.grid_size, alpha=cfg.alpha, policy=policy
        )
        return DecompositionEstimate(partition, (total,), total, "exact")
    try:
        return exact_ik(
            s,
            partition,
            with_se=with_se,
            grid_size=cfg.grid_size,
            alpha=cfg.alpha,
            policy=policy,
        )
    except NonIntegerBlockBoundary as e:
        if strict:
            raise
        logger.warning("{}; falling back to the grid estimator", e)
        return ik_hat_grid(s, partition, cfg.grid_size, cfg.alpha, policy)


def _cmd_estimate(cfg: RunConfig) -> _Output:
    s = _load_sample(cfg)
    partition = cfg.partition or parse_partition("")
    if cfg.options.get("method") == "exact":
        estimate = _exact_decomposition(cfg, s, partition, strict=False)
    else:
        estimate = ik_hat_grid(s, partition, cfg.grid_size, cfg.alpha, cfg.policy())
    return _decomposition_output(cfg, estimate, s)


def _cmd_decompose_exact(cfg: RunConfig) -> _Output:
    s = _load_sample(cfg)
    partition = cfg.partition or parse_partition("")
    estimate = _exact_decomposition(cfg, s, partition, strict=True)
    return _decomposition_output(cfg, estimate, s)


def _cmd_theory(cfg: RunConfig) -> _Output:
    d = parse_distribution(cfg.options["dist"])
    partition = cfg.partition or parse_partition("")
    quad = QuadratureConfig(abs_tol=cfg.options["quad_tol"])
    total = true_I(d, quad)
    components = true_Ik(d, partition, quad)
    contributions = [w * v for w, v in zip(partition.weights, components, strict=True)]
    weighted = math.fsum(contributions)
    shares = [c / weighted if weighted else 0.0 for c in contributions]

    curve = cfg.options.get("curve")
    if curve is not None:
        write_csv(curve, ratio_curves(d, partition, cfg.options["points"]))
        logger.info("wrote ratio curves to {}", curve)

    rows = [
        {**member, "value": value, "contribution": contribution, "share": share}
        for member, value, contribution, share in zip(
            _member_rows(partition), components, contributions, shares, strict=True
        )
    ]
    rows.append(
        {**_TOTAL_MEMBER, "value": total, "contribution": weighted, "share": 1.0}
    )
    frame = pd.DataFrame(rows)

    table = Table(title=f"Quantile ratio index of {d.literal()}", caption=_caption(cfg))
    for name in ("k", "p range", "weight", "I_k", "w_k I_k", "share"):
        table.add_column(name, justify="left" if name in {"k", "p range"} else "right")
    for k, (value, contribution, share) in enumerate(
        zip(components, contributions, shares, strict=True), start=1
    ):
        lower, upper = partition.bounds(k)
        table.add_row(
            str(k),
            f"[{lower:g}, {upper:g}]",
            _fmt(partition.weights[k - 1]),
            _fmt(value),
            _fmt(contribution),
            _fmt(share),
        )
    table.add_row(
        "I", "[0, 0.5]", _fmt(1.0), _fmt(total), _fmt(weighted), _fmt(1.0), style="bold"
    )

    result = {
        "distribution": d.literal(),
        "I": total,
        "cuts": list(partition.cuts),
        "weights": list(partition.weights),
        "components": components,
        "contributions": contributions,
        "shares": shares,
    }
    return _Output(result, frame, table)


def _cmd_synth(cfg: RunConfig) -> _Output:
    name = cfg.options.get("table")
    if name is not None:
        bins = load_bundled_bins(name)
    elif cfg.input is not None:
        bins = read_bins(cfg.input)
    else:  # pragma: no cover
        msg = "no grouped table given"
        raise FileError(msg)
    shape = DEFAULT_TAIL_SHAPE if cfg.tail_shape is None else cfg.tail_shape
    seed = 0 if cfg.seed is None else cfg.seed
    synth = SynthConfig(
        tail_shape=shape, count_scale=cfg.options["scale"], rng=SeededRng(seed)
    )
    population = _subsample(cfg, synth_population(bins, synth))
    frame = pd.DataFrame({"income": population.values})
    if cfg.output is not None:
        write_csv(cfg.output, frame)
        logger.info("wrote {} incomes to {}", population.n, cfg.output)

    scale = tail_scale(bins, shape) if bins.open_bin is not None else None
    result = {
        "source": name if name is not None else str(cfg.input),
        "bins": len(bins),
        "table_total": bins.total,
        "n": population.n,
        "tail_scale": scale,
        "min": float(population.values[0]),
        "max": float(population.values[-1]),
        "zero_fraction": population.zero_fraction,
    }
    table = Table(title="Synthesized population", caption=_caption(cfg))
    table.add_column("quantity")
    table.add_column("value", justify="right")
    for key, value in result.items():
        shown = _fmt(value) if isinstance(value, float) else str(value)
        table.add_row(key, shown)
    return _Output(result, frame, table)


def _cmd_percentiles(cfg: RunConfig) -> _Output:
    s = _load_sample(cfg)
    percentiles = percentile_table(s, cfg.options["probs"])
    exact = exact_i(s).value
    frame = percentiles.as_frame()

    table = Table(title=f"Percentiles (n={s.n})", caption=_caption(cfg))
    table.add_column("prob")
    table.add_column("value", justify="right")
    for prob, value in frame.itertuples(index=False, name=None):
        table.add_row(prob, _fmt(value))
    table.add_row("exact I", _fmt(exact), style="bold")

    result = {
        "n": s.n,
        "percentiles": [{"prob": p, "value": v} for p, v in percentiles.rows],
        "max": percentiles.maximum,
        "exact_i": exact,
    }
    return _Output(result, frame, table)


def _cmd_kde(cfg: RunConfig) -> _Output:
    s = _load_sample(cfg)
    frame = kde_export(s, cfg.options["truncate"], cfg.options["points"])
    if cfg.output is not None:
        write_csv(cfg.output, frame)
        logger.info("wrote density curve to {}", cfg.output)
    result = {
        "n": s.n,
        "bandwidth": kde_bandwidth(s.values),
        "points": len(frame),
        "truncate": cfg.options["truncate"],
        "mass": float(integrate.trapezoid(frame["density"], frame["x"])),
    }
    table = Table(title="Kernel density", caption=_caption(cfg))
    table.add_column("quantity")
    table.add_column("value", justify="right")
    for key, value in result.items():
        shown = _fmt(value) if isinstance(value, float) else str(value)
        table.add_row(key, shown)
    return _Output(result, frame, table)


def _coverage_grid(cfg: RunConfig, partition: SymmetricPartition) -> _Output:
    labels = (
        tuple(REFERENCE_FAMILIES)
        if cfg.options["families"] == "all"
        else DESK_SCALE_FAMILIES
    )
    frame = coverage_table(
        partition,
        cfg.options["sizes"],
        cfg.options["trials"],
        {label: REFERENCE_FAMILIES[label] for label in labels},
        cfg.grid_size,
        cfg.alpha,
        SeededRng(cfg.seed or 0),
        policy=cfg.policy(),
        workers=cfg.options.get("workers"),
    )
    table = Table(
        title=f"Coverage of {1 - cfg.alpha:g} intervals", caption=_caption(cfg)
    )
    for name in frame.columns:
        table.add_column(str(name), justify="left" if name == "family" else "right")
    for row in frame.itertuples(index=False, name=None):
        table.add_row(
            *(_fmt(v) if isinstance(v, float) else str(v) for v in row)
        )
    result = {"rows": frame.to_dict(orient="records")}
    return _Output(result, frame, table)


def _cmd_coverage(cfg: RunConfig) -> _Output:
    partition = cfg.partition or parse_partition("")
    if cfg.options.get("families") is not None:
        return _coverage_grid(cfg, partition)
    d = parse_distribution(cfg.options["dist"])
    report = coverage_experiment(
        d,
        cfg.options["n"],
        partition,
        cfg.options["trials"],
        cfg.grid_size,
        cfg.alpha,
        SeededRng(cfg.seed or 0),
        policy=cfg.policy(),
        workers=cfg.options.get("workers"),
    )
    quantities = [*(f"I_{k}" for k in range(1, len(partition) + 1)), "I"]
    coverages = [*report.per_component, report.total]
    frame = pd.DataFrame(
        {
            "quantity": quantities,
            "true_value": [c.true_value for c in coverages],
            "hits": [c.hits for c in coverages],
            "coverage": [c.coverage for c in coverages],
            "mean_width": [c.mean_width for c in coverages],
        }
    )
    table = Table(
        title=(
            f"Coverage of {report.nominal:g} intervals for {d.literal()} "
            f"(n={report.n}, {report.trials} trials)"
        ),
        caption=_caption(cfg, failed_trials=report.failed_trials),
    )
    for name in ("quantity", "true value", "hits", "coverage", "mean width"):
        table.add_column(name, justify="left" if name == "quantity" else "right")
    for quantity, c in zip(quantities, coverages, strict=True):
        table.add_row(
            quantity,
            _fmt(c.true_value),
            str(c.hits),
            _fmt(c.coverage),
            _fmt(c.mean_width),
        )
    return _Output(report.as_dict(), frame, table)


_COMMANDS: "Final[dict[str, Callable[[RunConfig], _Output]]]" = {
    "estimate": _cmd_estimate,
    "decompose-exact": _cmd_decompose_exact,
    "theory": _cmd_theory,
    "synth": _cmd_synth,
    "percentiles": _cmd_percentiles,
    "kde": _cmd_kde,
    "coverage": _cmd_coverage,
}


# Rendering


def _envelope(cfg: RunConfig, output: _Output) -> dict[str, Any]:
    return {
        "tool": _TOOL,
        "version": __version__,
        "config": cfg.as_dict(),
        "result": output.result,
    }


def _render(cfg: RunConfig, output: _Output) -> str:
    if cfg.output_format == "json":
        return serialize_json(_envelope(cfg, output), indent=2) + "\n"
    if cfg.output_format == "csv":
        return frame_to_csv(output.frame)
    buffer = io.StringIO()
    Console(file=buffer, width=_FILE_TABLE_WIDTH, highlight=False).print(output.table)
    return buffer.getvalue()


def _emit(cfg: RunConfig, output: _Output) -> None:
    report_path = None if cfg.command in _DATA_COMMANDS else cfg.output
    if report_path is not None:
        if cfg.output_format == "json":
            write_json(report_path, _envelope(cfg, output))
        elif cfg.output_format == "csv":
            write_csv(report_path, output.frame)
        else:
            atomic_replace(report_path, _render(cfg, output))
        logger.info("wrote {} report to {}", cfg.output_format, report_path)
        return
    if cfg.output_format == "table":
        Console(highlight=False).print(output.table)
        return
    _ = sys.stdout.write(_render(cfg, output))


# Argument parsing


def _float_list(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError as e:
        msg = f"expected comma-separated numbers, got {text!r}"
        raise argparse.ArgumentTypeError(msg) from e
    if not values:
        msg = "expected at least one number"
        raise argparse.ArgumentTypeError(msg)
    return values


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError as e:
        msg = f"expected comma-separated integers, got {text!r}"
        raise argparse.ArgumentTypeError(msg) from e


def _add_partition(parser: argparse.ArgumentParser, *, required: bool) -> None:
    group = parser.add_mutually_exclusive_group(required=required)
    _ = group.add_argument(
        "--partition",
        metavar="CUTS",
        help="comma-separated interior cuts in (0, 1/2), e.g. 0.2,0.4",
    )
    _ = group.add_argument(
        "--equi", type=int, metavar="K", help="equi-K-partition with K members"
    )


def _add_inference(parser: argparse.ArgumentParser) -> None:
    _ = parser.add_argument(
        "--grid", type=int, default=DEFAULT_GRID_SIZE, metavar="J", help="grid size"
    )
    _ = parser.add_argument(
        "--alpha", type=float, default=DEFAULT_ALPHA, help="nominal error rate"
    )
    _ = parser.add_argument(
        "--bandwidth",
        type=float,
        metavar="C",
        help="quantile-density bandwidth coefficient (h = C n^-1/5)",
    )
    _ = parser.add_argument(
        "--edge",
        choices=("shift", "clip"),
        default="shift",
        help="quantile-density window handling at the sample edges",
    )
    _ = parser.add_argument(
        "--window",
        choices=("local", "fixed"),
        default="local",
        help="narrow the quantile-density window in the tails, or keep it fixed",
    )


def _add_subsample(parser: argparse.ArgumentParser) -> None:
    _ = parser.add_argument(
        "--subsample",
        type=int,
        metavar="N",
        help="estimate from a random subsample of N incomes",
    )
    _ = parser.add_argument(
        "--seed", type=int, default=0, help="seed of the subsample draw"
    )


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    _ = common.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="log progress to stderr (-vv for debug output)",
    )
    _ = common.add_argument(
        "--format", choices=("table", "json", "csv"), help="output format"
    )
    _ = common.add_argument("--out", metavar="PATH", help="write output to PATH")

    parser = argparse.ArgumentParser(
        prog=_TOOL,
        description="Quantile ratio index of relative inequality.",
    )
    _ = parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    commands = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    estimate = commands.add_parser(
        "estimate", parents=[common], help="estimate I and I_k from a sample"
    )
    _ = estimate.add_argument("--in", dest="input", required=True, metavar="CSV")
    _add_partition(estimate, required=False)
    _add_inference(estimate)
    _ = estimate.add_argument("--method", choices=("grid", "exact"), default="grid")
    _ = estimate.add_argument(
        "--with-se",
        action="store_true",
        help="borrow grid standard errors for the exact estimates",
    )
    _add_subsample(estimate)
    estimate.set_defaults(partition_default="")

    decompose = commands.add_parser(
        "decompose-exact",
        parents=[common],
        help="exact decomposition over integer block boundaries",
    )
    _ = decompose.add_argument("--in", dest="input", required=True, metavar="CSV")
    _add_partition(decompose, required=True)
    _add_inference(decompose)
    _ = decompose.add_argument("--with-se", action="store_true")

    theory = commands.add_parser(
        "theory", parents=[common], help="true I and I_k of a parametric distribution"
    )
    _ = theory.add_argument(
        "--dist", required=True, metavar="FAMILY:PARAMS", help="e.g. lognormal:0,1"
    )
    _add_partition(theory, required=False)
    _ = theory.add_argument("--quad-tol", type=float, default=1e-8)
    _ = theory.add_argument(
        "--curve", metavar="CSV", help="also write R(p) and R_k(p) to CSV"
    )
    _ = theory.add_argument("--points", type=int, default=100)
    theory.set_defaults(partition_default="")

    synth = commands.add_parser(
        "synth", parents=[common], help="synthesize a population from a grouped table"
    )
    source = synth.add_mutually_exclusive_group(required=True)
    _ = source.add_argument("--bins", dest="input", metavar="CSV")
    _ = source.add_argument("--table", choices=BUNDLED_TABLES)
    _ = synth.add_argument("--tail-shape", type=float, default=DEFAULT_TAIL_SHAPE)
    _ = synth.add_argument("--scale", type=float, default=DEFAULT_COUNT_SCALE)
    _ = synth.add_argument("--seed", type=int, default=0)
    _ = synth.add_argument(
        "--subsample",
        type=int,
        metavar="N",
        help="keep a random subsample of N synthesized incomes",
    )

    percentiles = commands.add_parser(
        "percentiles", parents=[common], help="Type 8 percentiles of a population"
    )
    _ = percentiles.add_argument("--in", dest="input", required=True, metavar="CSV")
    _ = percentiles.add_argument(
        "--probs", type=_float_list, default=DEFAULT_PERCENTILES, metavar="P,P,..."
    )

    kde = commands.add_parser(
        "kde", parents=[common], help="Gaussian kernel density on [0, truncate]"
    )
    _ = kde.add_argument("--in", dest="input", required=True, metavar="CSV")
    _ = kde.add_argument("--truncate", type=float, required=True)
    _ = kde.add_argument("--points", type=int, default=DEFAULT_KDE_POINTS)

    coverage = commands.add_parser(
        "coverage", parents=[common], help="Monte-Carlo coverage of the intervals"
    )
    target = coverage.add_mutually_exclusive_group(required=True)
    _ = target.add_argument("--dist", metavar="FAMILY:PARAMS")
    _ = target.add_argument("--families", choices=("desk", "all"))
    _ = coverage.add_argument("--n", type=int, help="sample size (with --dist)")
    _ = coverage.add_argument(
        "--sizes", type=_int_list, default=(100, 1000), metavar="N,N,..."
    )
    _add_partition(coverage, required=False)
    _add_inference(coverage)
    _ = coverage.add_argument("--trials", type=int, default=1000)
    _ = coverage.add_argument("--seed", type=int, default=0)
    _ = coverage.add_argument("--workers", type=int, help="worker threads")
    coverage.set_defaults(partition_default="0.25")

    return parser


def _check_usage(parser: argparse.ArgumentParser, args: argparse.Namespace) -> None:
    if args.command == "coverage":
        if args.dist is not None and args.n is None:
            parser.error("coverage --dist needs --n")
        if args.families is not None and not args.sizes:
            parser.error("coverage --families needs at least one size in --sizes")


def _exit_code(e: SystemExit) -> int:
    if e.code is None:
        return 0
    if isinstance(e.code, int):
        return e.code
    return 1


def _configure_logging(verbosity: int) -> int:
    level = _LOG_LEVELS[min(verbosity, len(_LOG_LEVELS) - 1)]
    logger.remove()
    logger.enable("qri")
    return logger.add(sys.stderr, level=level, format="{level}: {message}")


def run(argv: "Sequence[str] | None" = None) -> int:
    """Run the command line tool.

    Args:
        argv: Arguments without the program name; defaults to sys.argv.

    Returns:
        The exit status: 0 on success, 1 on a data or file error (reported
        as ``ErrorName: message`` on stderr), 2 on a usage error.
    """
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        _check_usage(parser, args)
    except SystemExit as e:
        return _exit_code(e)

    sink = _configure_logging(args.verbose)
    try:
        cfg = RunConfig.from_args(args)
        logger.info("resolved configuration: {}", cfg.as_dict())
        _emit(cfg, _COMMANDS[cfg.command](cfg))
    except QRIError as e:
        Console(stderr=True, soft_wrap=True).print(
            f"{type(e).__name__}: {e}", markup=False, highlight=False
        )
        return 1
    finally:
        logger.remove(sink)
        logger.disable("qri")
    return 0


def main() -> None:
    """Console script entry point."""
    sys.exit(run())
