"""Command-line front end: run scenarios, compare variants, certify traces.

Exit codes: 0 on success, 1 when a certificate is violated (or a run aborts),
2 on usage, parse, or validation errors.  Trace CSVs store one row per grid
point with full round-trip float precision, so a certify pass over a freshly
written file sees exactly the numbers the run produced.
"""

from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .analysis import (
    BASELINE_VARIANTS,
    CertificateReport,
    certify_trace,
    tracking_metrics,
)
from .errors import SimulationError
from .scenario import (
    ParseError,
    Scenario,
    ValidationError,
    VARIANT_DSC,
    VARIANT_PROPOSED,
    VARIANTS,
    bundled_scenario_names,
    bundled_scenario_path,
    parse_scenario,
)
from .sim import SimTrace, run

__all__ = ["main", "entrypoint", "trace_columns", "write_trace_csv", "read_trace_csv"]

log = logging.getLogger("ctfb")

EXIT_OK = 0
EXIT_VIOLATED = 1
EXIT_USAGE = 2


def trace_columns(n: int) -> list[str]:
    """Fixed CSV column order for an order-n trace."""
    cols = ["t"]
    cols += [f"x{i}" for i in range(1, n + 1)]
    cols += ["u"]
    cols += [f"alpha_{i}" for i in range(1, n)]
    cols += [f"alpha_hat_{i}" for i in range(1, n)]
    cols += [f"zeta_{i}" for i in range(1, n + 1)]
    cols += [f"z{i}" for i in range(1, n + 1)]
    cols += [f"s{i}" for i in range(1, n + 1)]
    cols += ["mu"]
    cols += [f"sigma_{i}" for i in range(1, n + 1)]
    cols += ["V0", "Vn"]
    return cols


def write_trace_csv(trace: SimTrace, path) -> None:
    """Write a trace with shortest round-trip decimal representation."""
    n = trace.n
    blocks = [
        trace.t[:, None], trace.x, trace.u[:, None], trace.alpha,
        trace.alpha_hat, trace.zeta, trace.z, trace.s,
        trace.mu[:, None], trace.sigma, trace.V0[:, None], trace.Vn[:, None],
    ]
    table = np.hstack(blocks)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(trace_columns(n))
        for row in table:
            writer.writerow([repr(float(v)) for v in row])


def read_trace_csv(path, scenario: Optional[Scenario] = None) -> SimTrace:
    """Load a trace CSV back into a SimTrace (columns checked by name)."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"trace file {path} is empty") from None
        rows = [row for row in reader if row]
    if not rows:
        raise ParseError(f"trace file {path} has no data rows")
    # infer the order from the x-columns
    n = sum(1 for c in header if c.startswith("x") and c[1:].isdigit())
    if n < 2 or header != trace_columns(n):
        raise ParseError(
            f"trace file {path} does not match the expected column layout for n={n}"
        )
    try:
        table = np.array([[float(v) for v in row] for row in rows])
    except ValueError:
        raise ParseError(f"trace file {path} contains non-numeric data") from None
    if table.shape[1] != len(header):
        raise ParseError(f"trace file {path} has ragged rows")

    idx = 0

    def block(width: int) -> np.ndarray:
        nonlocal idx
        out = table[:, idx : idx + width]
        idx += width
        return out

    def column() -> np.ndarray:
        return block(1)[:, 0]

    return SimTrace(
        t=column(), x=block(n), u=column(), alpha=block(n - 1),
        alpha_hat=block(n - 1), zeta=block(n), z=block(n), s=block(n),
        mu=column(), sigma=block(n), V0=column(), Vn=column(),
        scenario=scenario,
    )


def write_report(report: CertificateReport, trace_path: Path) -> tuple[Path, Path]:
    """Write the human-readable and machine-readable report sidecars."""
    txt = trace_path.with_suffix(".report.txt")
    machine = trace_path.with_suffix(".report.csv")
    txt.write_text(report.summary_text() + "\n")
    with open(machine, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["key", "value"])
        writer.writerows(report.rows())
    return txt, machine


def _load_scenario(spec: str) -> Scenario:
    path = Path(spec)
    if not path.exists() and "/" not in spec and not spec.endswith(".toml"):
        path = bundled_scenario_path(spec)
    return parse_scenario(path)


def _apply_overrides(scenario: Scenario, args) -> Scenario:
    updates = {}
    if getattr(args, "step", None) is not None:
        updates["h"] = args.step
    if getattr(args, "horizon", None) is not None:
        updates["horizon"] = args.horizon
    if getattr(args, "variant", None) is not None:
        updates["variant"] = args.variant
    if not updates:
        return scenario
    from dataclasses import replace

    return replace(scenario, **updates)


def _cmd_run(args) -> int:
    scenario = _apply_overrides(_load_scenario(args.scenario), args)
    out = Path(args.out) if args.out else Path(f"{scenario.name}_{scenario.variant}.csv")
    log.info("running scenario %s (variant %s)", scenario.name, scenario.variant)
    trace = run(scenario)
    write_trace_csv(trace, out)
    print(f"trace written to {out} ({trace.t.shape[0]} rows)")

    if scenario.variant == VARIANT_DSC:
        print("variant dsc carries no decay certificate; skipping report")
        return EXIT_OK
    report = certify_trace(trace)
    txt, machine = write_report(report, out)
    print(f"report written to {txt} and {machine}")
    print(report.summary_text())
    return EXIT_OK if report.passed else EXIT_VIOLATED


def _cmd_certify(args) -> int:
    scenario = _load_scenario(args.scenario)
    if args.variant is not None:
        scenario = scenario.with_variant(args.variant)
    trace = read_trace_csv(args.trace, scenario)
    report = certify_trace(trace)
    txt, machine = write_report(report, Path(args.trace))
    print(report.summary_text())
    print(f"report written to {txt} and {machine}")
    return EXIT_OK if report.passed else EXIT_VIOLATED


def _cmd_compare(args) -> int:
    scenario = _apply_overrides(_load_scenario(args.scenario), args)
    variants = (VARIANT_PROPOSED,) + BASELINE_VARIANTS
    rows = []
    for variant in variants:
        variant_scenario = scenario.with_variant(variant)
        log.info("running variant %s", variant)
        trace = run(variant_scenario)
        metrics = tracking_metrics(trace)
        rows.append((variant, metrics))
        if args.out:
            base = Path(args.out)
            path = base.with_name(f"{base.stem}_{variant}{base.suffix or '.csv'}")
            write_trace_csv(trace, path)
            print(f"trace written to {path}")

    headers = ["variant"] + list(rows[0][1].row().keys())
    widths = [max(len(h), 18) for h in headers]
    print("  ".join(h.ljust(w) for h, w in zip(headers, widths)))
    for variant, metrics in rows:
        cells = [variant] + [f"{v:.6e}" for v in metrics.row().values()]
        print("  ".join(c.ljust(w) for c, w in zip(cells, widths)))
    return EXIT_OK


def _cmd_list_scenarios(args) -> int:
    for name in bundled_scenario_names():
        print(f"{name}\t{bundled_scenario_path(name)}")
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ctfb",
        description=(
            "Simulate and certify command-filtered backstepping with a "
            "bounded time-varying gain."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_scenario_arg(p):
        p.add_argument(
            "--scenario",
            required=False,
            default="electromech_paper",
            help="scenario TOML path or bundled scenario name",
        )

    p_run = sub.add_parser("run", help="simulate a scenario and write trace + report")
    add_scenario_arg(p_run)
    p_run.add_argument("--out", help="trace CSV output path")
    p_run.add_argument("--step", type=float, help="override integrator step h")
    p_run.add_argument("--horizon", type=float, help="override horizon in seconds")
    p_run.add_argument("--variant", choices=sorted(VARIANTS), help="override variant")
    p_run.set_defaults(fn=_cmd_run)

    p_cert = sub.add_parser("certify", help="re-check an existing trace CSV")
    p_cert.add_argument("trace", help="trace CSV produced by run")
    add_scenario_arg(p_cert)
    p_cert.add_argument(
        "--variant",
        choices=sorted(VARIANTS - {VARIANT_DSC}),
        help="variant the trace was produced with (default proposed)",
    )
    p_cert.set_defaults(fn=_cmd_certify)

    p_cmp = sub.add_parser(
        "compare", help="run proposed plus both ablation baselines, print metrics"
    )
    add_scenario_arg(p_cmp)
    p_cmp.add_argument("--out", help="base path for per-variant trace CSVs")
    p_cmp.add_argument("--step", type=float, help="override integrator step h")
    p_cmp.add_argument("--horizon", type=float, help="override horizon in seconds")
    p_cmp.set_defaults(fn=_cmd_compare)

    p_list = sub.add_parser("list-scenarios", help="list bundled scenarios")
    p_list.set_defaults(fn=_cmd_list_scenarios)
    return parser


def _configure_logging() -> None:
    level_name = os.environ.get("CTFB_LOG", "warning").upper()
    level = getattr(logging, level_name, None)
    if not isinstance(level, int):
        level = logging.WARNING
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point returning the process exit code."""
    _configure_logging()
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    try:
        return args.fn(args)
    except (ParseError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SimulationError as exc:
        print(f"run aborted: {exc}", file=sys.stderr)
        return EXIT_VIOLATED
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def entrypoint() -> None:
    sys.exit(main(sys.argv[1:]))


if __name__ == "__main__":
    entrypoint()
