"""Experiment runner: seeded, reproducible commands emitting CSV/JSON reports.

Every command echoes its configuration, emits fixed-column rows, and exits
0 on pass, 1 on a failed criterion, 2 on usage or domain errors. Reports
are byte-identical across runs for identical (config, seed, workers); the
wall_time_seconds field in JSON reports is the one excluded timing field.
"""

from __future__ import annotations

import csv
import io
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field

import click
import numpy as np

from .balls import BallSpec, ball_volume_exact, ball_volume_mc, g4_closed_form
from .covering import (
    Covering,
    build_internal_covering,
    coverage_verify,
    external_covering_lower_bound,
    internal_covering_bounds,
)
from .encoding import (
    OCTAHEDRON_EPSILON,
    bit_length_bounds_deterministic,
    bit_length_bounds_probabilistic,
    deterministic_encode,
    octahedron_book,
    octahedron_demo,
    probabilistic_encode,
    rate_bits,
    verify_minimax,
)
from .states import DensityMatrix, PureState, SeededSampler, sample_amplitudes

COVERAGE_PASS_THRESHOLD = 0.999
MINIMAX_TOLERANCE = 1e-3
FIG3_P0_GRID = (0.55, 0.65, 0.75, 0.85, 0.95)


@dataclass
class ExperimentConfig:
    command: str
    dim: int | None = None
    epsilon: float | None = None
    samples: int | None = None
    seed: int = 0
    workers: int = 1
    output_path: str = "-"
    format: str = "csv"
    x: float | None = None
    fail_streak_limit: int | None = None
    book: str | None = None
    book_out: str | None = None


@dataclass
class ExperimentReport:
    command: str
    config: dict
    columns: list
    rows: list
    passed: bool | None = None
    wall_time_seconds: float = 0.0
    extra_json: dict = field(default_factory=dict)

    def body_csv(self) -> str:
        out = io.StringIO()
        for key, value in self.config.items():
            if value is not None:
                out.write(f"# {key}={_csv_cell(value)}\n")
        if self.passed is not None:
            out.write(f"# pass={_csv_cell(self.passed)}\n")
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([_csv_cell(row.get(col)) for col in self.columns])
        return out.getvalue()

    def body_json(self) -> str:
        doc = {
            "command": self.command,
            "config": self.config,
            "columns": self.columns,
            "rows": self.rows,
            "pass": self.passed,
            **self.extra_json,
            "wall_time_seconds": self.wall_time_seconds,
        }
        return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _config_echo(config: ExperimentConfig) -> dict:
    return {k: v for k, v in asdict(config).items()}


def _load_book(spec: str) -> Covering:
    if spec == "octahedron":
        return octahedron_book()
    if spec == "basis":
        return Covering(2, 1.0, [PureState.basis(2, 0), PureState.basis(2, 1)])
    return Covering.load(spec)


# ---------------------------------------------------------------------------
# Command handlers. Each returns (columns, rows, passed, extra_json).
# ---------------------------------------------------------------------------


def _run_volume(cfg: ExperimentConfig):
    center = PureState.basis(cfg.dim, 0).density()
    est = ball_volume_mc(
        BallSpec(center, cfg.epsilon),
        cfg.samples,
        SeededSampler(cfg.seed),
        workers=cfg.workers,
    )
    exact = ball_volume_exact(cfg.epsilon, cfg.dim)
    err = abs(est.point_estimate - exact)
    ok = err <= 3.0 * est.std_error
    row = est.to_row(seed=cfg.seed)
    row.update({"exact": exact, "abs_error": err, "pass": ok})
    return list(row.keys()), [row], ok, {}


def _run_fig3(cfg: ExperimentConfig):
    epsilon = 0.5
    rows = []
    all_ok = True
    for i, p0 in enumerate(FIG3_P0_GRID):
        center = DensityMatrix.diagonal([p0, 1.0 - p0, 0.0, 0.0])
        est = ball_volume_mc(
            BallSpec(center, epsilon),
            cfg.samples,
            SeededSampler(cfg.seed, stream_id=i),
            workers=cfg.workers,
        )
        bound = g4_closed_form(epsilon, p0)
        ok = est.point_estimate <= bound + 3.0 * est.std_error
        all_ok = all_ok and ok
        row = est.to_row(p0=p0, seed=cfg.seed)
        row.update({"g4_bound": bound, "pass": ok})
        rows.append(row)
    return list(rows[0].keys()), rows, all_ok, {}


def _run_covering_build(cfg: ExperimentConfig):
    book = build_internal_covering(
        cfg.dim,
        cfg.epsilon,
        x=cfg.x,
        fail_streak_limit=cfg.fail_streak_limit,
        sampler=SeededSampler(cfg.seed),
    )
    if cfg.book_out:
        book.save(cfg.book_out)
    upper = internal_covering_bounds(cfg.dim, cfg.epsilon).upper
    meta = book.construction_meta
    ok = len(book) <= upper
    row = {
        "dim": cfg.dim,
        "epsilon": cfg.epsilon,
        "size": len(book),
        "J_R": meta["J_R"],
        "J_P": meta["J_P"],
        "epsilon_R": meta["epsilon_R"],
        "epsilon_P": meta["epsilon_P"],
        "x": meta["x"],
        "fail_streak_limit": meta["fail_streak_limit"],
        "seed": cfg.seed,
        "size_upper_bound": upper,
        "pass": ok,
    }
    return list(row.keys()), [row], ok, {}


def _run_covering_verify(cfg: ExperimentConfig):
    book = _load_book(cfg.book)
    epsilon = cfg.epsilon if cfg.epsilon is not None else book.radius
    report = coverage_verify(
        book, epsilon, cfg.samples, SeededSampler(cfg.seed), workers=cfg.workers
    )
    ok = report.covered_fraction >= COVERAGE_PASS_THRESHOLD
    row = {
        "dim": book.dim,
        "book_size": len(book),
        "radius": book.radius,
        "epsilon": epsilon,
        "covered_fraction": report.covered_fraction,
        "worst_gap": report.worst_gap,
        "std_error": report.std_error,
        "num_samples": report.num_samples,
        "seed": cfg.seed,
        "threshold": COVERAGE_PASS_THRESHOLD,
        "pass": ok,
    }
    return list(row.keys()), [row], ok, {}


def _run_encode(cfg: ExperimentConfig):
    book = _load_book(cfg.book)
    rng_sampler = SeededSampler(cfg.seed)
    targets = sample_amplitudes(book.dim, cfg.samples, rng_sampler.rng)
    det = np.empty(cfg.samples)
    prob = np.empty(cfg.samples)
    gaps = np.empty(cfg.samples)
    for i, amps in enumerate(targets):
        phi = PureState(amps)
        det[i] = deterministic_encode(phi, book).distance
        result = probabilistic_encode(phi, book)
        prob[i] = result.achieved_distance
        gaps[i] = result.duality_gap
    row = {
        "dim": book.dim,
        "book_size": len(book),
        "num_targets": cfg.samples,
        "seed": cfg.seed,
        "max_det_distance": float(det.max()),
        "mean_det_distance": float(det.mean()),
        "max_prob_distance": float(prob.max()),
        "mean_prob_distance": float(prob.mean()),
        "max_duality_gap": float(gaps.max()),
    }
    return list(row.keys()), [row], None, {}


def _run_minimax(cfg: ExperimentConfig):
    book = _load_book(cfg.book)
    check = verify_minimax(book, cfg.samples, SeededSampler(cfg.seed))
    defect = abs(check.lhs - check.rhs)
    ok = defect <= MINIMAX_TOLERANCE
    row = {
        "book": cfg.book,
        "dim": book.dim,
        "book_size": len(book),
        "num_samples": cfg.samples,
        "seed": cfg.seed,
        "lhs": check.lhs,
        "rhs": check.rhs,
        "defect": defect,
        "tolerance": MINIMAX_TOLERANCE,
        "pass": ok,
    }
    return list(row.keys()), [row], ok, {}


def _run_octahedron(cfg: ExperimentConfig):
    demo = octahedron_demo()
    eps_ref = OCTAHEDRON_EPSILON
    delta_ref = math.sqrt(OCTAHEDRON_EPSILON)
    ok = (
        abs(demo["epsilon"] - eps_ref) <= 1e-9
        and abs(demo["delta"] - delta_ref) <= 1e-9
        and abs(demo["delta_squared_minus_epsilon"]) <= 1e-9
    )
    row = {
        "epsilon": demo["epsilon"],
        "delta": demo["delta"],
        "delta_squared_minus_epsilon": demo["delta_squared_minus_epsilon"],
        "epsilon_reference": eps_ref,
        "delta_reference": delta_ref,
        "pass": ok,
    }
    return list(row.keys()), [row], ok, dict(demo)


def _run_halving(cfg: ExperimentConfig):
    epsilon = cfg.epsilon
    radius = math.sqrt(epsilon)
    book = build_internal_covering(
        2,
        radius,
        x=cfg.x,
        fail_streak_limit=cfg.fail_streak_limit,
        sampler=SeededSampler(cfg.seed, stream_id=0),
    )
    targets = sample_amplitudes(2, cfg.samples, SeededSampler(cfg.seed, stream_id=1).rng)
    det = np.empty(cfg.samples)
    prob = np.empty(cfg.samples)
    for i, amps in enumerate(targets):
        phi = PureState(amps)
        det[i] = deterministic_encode(phi, book).distance
        prob[i] = probabilistic_encode(phi, book).achieved_distance
    ok = bool(prob.max() < epsilon)
    row = {
        "epsilon": epsilon,
        "sqrt_epsilon": radius,
        "book_size": len(book),
        "num_targets": cfg.samples,
        "seed": cfg.seed,
        "max_prob_distance": float(prob.max()),
        "max_det_distance": float(det.max()),
        "det_exceeds_epsilon": bool(det.max() > epsilon),
        "pass": ok,
    }
    return list(row.keys()), [row], ok, {}


def _run_bounds(cfg: ExperimentConfig):
    d, eps = cfg.dim, cfg.epsilon
    internal = internal_covering_bounds(d, eps)
    prob = bit_length_bounds_probabilistic(d, eps)
    if eps <= 0.5:
        external = external_covering_lower_bound(d, eps)
        det = bit_length_bounds_deterministic(d, eps)
        det_lower, det_upper = det.lower_bits, det.upper_bits
    else:
        external = None
        det_lower = det_upper = None
    row = {
        "dim": d,
        "epsilon": eps,
        "rate_bits": rate_bits(d, eps),
        "internal_covering_lower": internal.lower,
        "internal_covering_upper": internal.upper,
        "external_covering_lower": external,
        "det_bits_lower": det_lower,
        "det_bits_upper": det_upper,
        "prob_bits_lower_raw": prob.lower_bits,
        "prob_bits_lower": max(0.0, prob.lower_bits),
        "prob_bits_upper": prob.upper_bits,
    }
    return list(row.keys()), [row], None, {}


_HANDLERS = {
    "volume": _run_volume,
    "fig3": _run_fig3,
    "covering-build": _run_covering_build,
    "covering-verify": _run_covering_verify,
    "encode": _run_encode,
    "minimax": _run_minimax,
    "octahedron": _run_octahedron,
    "halving": _run_halving,
    "bounds": _run_bounds,
}


def run(config: ExperimentConfig) -> ExperimentReport:
    """Dispatch a config to its command handler and assemble the report."""
    handler = _HANDLERS.get(config.command)
    if handler is None:
        raise ValueError(f"unknown command {config.command!r}")
    start = time.perf_counter()
    columns, rows, passed, extra = handler(config)
    elapsed = time.perf_counter() - start
    return ExperimentReport(
        command=config.command,
        config=_config_echo(config),
        columns=columns,
        rows=rows,
        passed=passed,
        wall_time_seconds=elapsed,
        extra_json=extra,
    )


def _write_report(report: ExperimentReport, output_path: str, fmt: str) -> None:
    body = report.body_csv() if fmt == "csv" else report.body_json()
    if output_path == "-":
        click.echo(body, nl=False)
    else:
        with open(output_path, "w") as fh:
            fh.write(body)
    click.echo(f"wall_time_seconds={report.wall_time_seconds:.3f}", err=True)


def _execute(config: ExperimentConfig) -> None:
    try:
        report = run(config)
    except ValueError as exc:
        diagnostic = ExperimentReport(
            command=config.command,
            config=_config_echo(config),
            columns=["error"],
            rows=[{"error": str(exc)}],
            passed=None,
        )
        _write_report(diagnostic, config.output_path, config.format)
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    _write_report(report, config.output_path, config.format)
    if report.passed is False:
        sys.exit(1)


def _common_options(fn):
    fn = click.option(
        "--seed", type=int, default=0, envvar="QSC_SEED", show_default=True,
        help="RNG seed (falls back to QSC_SEED).",
    )(fn)
    fn = click.option("--output", "output_path", default="-", show_default=True,
                      help="Report path, '-' for stdout.")(fn)
    fn = click.option("--format", "fmt", type=click.Choice(["csv", "json"]),
                      default="csv", show_default=True)(fn)
    return fn


@click.group()
def main():
    """Desk-scale experiments on state geometry, coverings, and encodings."""


@main.command()
@click.option("--dim", type=int, required=True)
@click.option("--epsilon", type=float, required=True)
@click.option("--samples", type=int, default=1_000_000, show_default=True)
@click.option("--workers", type=int, default=1, show_default=True)
@_common_options
def volume(dim, epsilon, samples, workers, seed, output_path, fmt):
    """Monte Carlo ball volume around a pure center vs the exact power law."""
    _execute(ExperimentConfig(
        command="volume", dim=dim, epsilon=epsilon, samples=samples,
        seed=seed, workers=workers, output_path=output_path, format=fmt,
    ))


@main.command()
@click.option("--samples", type=int, default=1_000_000, show_default=True,
              help="Haar samples per grid point.")
@click.option("--workers", type=int, default=1, show_default=True)
@_common_options
def fig3(samples, workers, seed, output_path, fmt):
    """Mixed-center ball volumes in dim 4 against the closed-form bound."""
    _execute(ExperimentConfig(
        command="fig3", samples=samples, seed=seed, workers=workers,
        output_path=output_path, format=fmt,
    ))


@main.command(name="covering-build")
@click.option("--dim", type=int, required=True)
@click.option("--epsilon", type=float, required=True)
@click.option("--x", type=float, default=None, help="Phase radius ratio (>= 1).")
@click.option("--fail-streak", "fail_streak", type=int, default=None,
              help="Consecutive packing rejections before stopping.")
@click.option("--book-out", "book_out", type=click.Path(), default=None,
              help="Where to write the code-book JSON.")
@_common_options
def covering_build(dim, epsilon, x, fail_streak, book_out, seed, output_path, fmt):
    """Build an internal covering and report its size against the bound."""
    _execute(ExperimentConfig(
        command="covering-build", dim=dim, epsilon=epsilon, seed=seed,
        output_path=output_path, format=fmt, x=x, fail_streak_limit=fail_streak,
        book_out=book_out,
    ))


@main.command(name="covering-verify")
@click.option("--book", required=True, help="Code-book JSON path, or octahedron/basis.")
@click.option("--epsilon", type=float, default=None,
              help="Radius to verify (defaults to the book's radius).")
@click.option("--samples", type=int, default=100_000, show_default=True)
@click.option("--workers", type=int, default=1, show_default=True)
@_common_options
def covering_verify_cmd(book, epsilon, samples, workers, seed, output_path, fmt):
    """Monte Carlo coverage check of a code book."""
    _execute(ExperimentConfig(
        command="covering-verify", epsilon=epsilon, samples=samples, seed=seed,
        workers=workers, output_path=output_path, format=fmt, book=book,
    ))


@main.command()
@click.option("--book", required=True, help="Code-book JSON path, or octahedron/basis.")
@click.option("--samples", type=int, default=1000, show_default=True)
@_common_options
def encode(book, samples, seed, output_path, fmt):
    """Encode Haar-random targets both ways and summarize the distances."""
    _execute(ExperimentConfig(
        command="encode", samples=samples, seed=seed,
        output_path=output_path, format=fmt, book=book,
    ))


@main.command()
@click.option("--book", required=True, help="Code-book JSON path, or octahedron/basis.")
@click.option("--samples", type=int, default=2000, show_default=True)
@_common_options
def minimax(book, samples, seed, output_path, fmt):
    """Sampled check that worst-case distance and fidelity extrema agree."""
    _execute(ExperimentConfig(
        command="minimax", samples=samples, seed=seed,
        output_path=output_path, format=fmt, book=book,
    ))


@main.command()
@_common_options
def octahedron(seed, output_path, fmt):
    """Worst-case encoder distances for the Pauli-eigenstate octahedron."""
    _execute(ExperimentConfig(
        command="octahedron", seed=seed, output_path=output_path, format=fmt,
    ))


@main.command()
@click.option("--epsilon", type=float, default=0.25, show_default=True)
@click.option("--samples", type=int, default=10_000, show_default=True)
@click.option("--x", type=float, default=None)
@click.option("--fail-streak", "fail_streak", type=int, default=None)
@_common_options
def halving(epsilon, samples, x, fail_streak, seed, output_path, fmt):
    """Show a sqrt(epsilon)-covering reaching precision epsilon via mixtures."""
    _execute(ExperimentConfig(
        command="halving", epsilon=epsilon, samples=samples, seed=seed,
        output_path=output_path, format=fmt, x=x, fail_streak_limit=fail_streak,
    ))


@main.command()
@click.option("--dim", type=int, required=True)
@click.option("--epsilon", type=float, required=True)
@_common_options
def bounds(dim, epsilon, seed, output_path, fmt):
    """Evaluate all covering-number and bit-length bound formulas."""
    _execute(ExperimentConfig(
        command="bounds", dim=dim, epsilon=epsilon, seed=seed,
        output_path=output_path, format=fmt,
    ))


if __name__ == "__main__":
    main()
