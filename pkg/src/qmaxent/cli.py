"""Command-line entry point: ``qmaxent run|check|list``.

Exit codes:
    0  every scenario converged and met its tolerance
    2  configuration could not be parsed or validated
    3  infeasible constraints
    4  solver non-convergence (or an oracle delta above tolerance)
    5  precondition violation (state form, unsupported channel, ...)
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .config import ConfigError, RunConfig, ScenarioEntry, parse_config
from .errors import (
    ConvergenceError,
    InconsistentInputError,
    InfeasibleError,
    InvalidInputError,
    PreconditionError,
    UnsupportedError,
)
from .maxent import SolverOptions
from .scenarios import (
    REGISTRY,
    ScenarioReport,
    scenario_coarse_grained,
    scenario_dephasing_channel,
    scenario_fine_grained,
    scenario_joint_coarse,
    scenario_maxent,
    scenario_obs_channel,
    scenario_one_to_one,
    scenario_open_system,
)

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_INFEASIBLE = 3
EXIT_NONCONVERGENCE = 4
EXIT_PRECONDITION = 5

OUTPUT_ENV = "QMAXENT_OUTPUT_DIR"
DEFAULT_OUTPUT = "qmaxent_output"
CSV_HEADER = ("scenario", "quantity", "value", "oracle_delta", "seed")

log = logging.getLogger("qmaxent")


def invoke(entry: ScenarioEntry, opts: SolverOptions) -> ScenarioReport:
    """Call the scenario function for one configured entry."""
    p = entry.params
    sid = entry.scenario_id
    if sid == "scenario_fine_grained":
        return scenario_fine_grained(p["state"], p["evolution"], p.get("basis_schedule"), opts=opts)
    if sid == "scenario_coarse_grained":
        cgs = (p["coarse_graining_initial"], p["coarse_graining_final"])
        return scenario_coarse_grained(p["state"], cgs, p["evolution"], opts=opts)
    if sid == "scenario_open_system":
        kw = {"knowledge": p["knowledge"]} if "knowledge" in p else {}
        return scenario_open_system(
            p["system_state"], p["environment_state"], p["unitary"], h_e=p.get("environment_hamiltonian"), opts=opts, **kw
        )
    if sid == "scenario_joint_coarse":
        return scenario_joint_coarse(p["state"], p["environment_coarse_graining"], p["unitary"], opts=opts)
    if sid == "scenario_one_to_one":
        return scenario_one_to_one(p["channel"], p["state"], opts=opts)
    if sid == "scenario_dephasing_channel":
        return scenario_dephasing_channel(p["basis"], p["state"], opts=opts)
    if sid == "scenario_obs_channel":
        return scenario_obs_channel(p["coarse_graining"], p["state"], opts=opts)
    if sid == "scenario_maxent":
        return scenario_maxent(p["state"], p["constraints"], opts=opts)
    raise InvalidInputError(f"no runner for scenario {sid!r}")


def _classify(exc: Exception) -> int:
    if isinstance(exc, InfeasibleError):
        return EXIT_INFEASIBLE
    if isinstance(exc, ConvergenceError):
        return EXIT_NONCONVERGENCE
    if isinstance(exc, (PreconditionError, UnsupportedError, InconsistentInputError)):
        return EXIT_PRECONDITION
    if isinstance(exc, (InvalidInputError, ConfigError)):
        return EXIT_PARSE
    raise exc


def _run_one(entry: ScenarioEntry, cfg: RunConfig, tol: float):
    try:
        report = invoke(entry, cfg.solver_options())
    except Exception as exc:  # noqa: BLE001 - classified, unknown errors re-raised
        return None, _classify(exc), f"{entry.name}: {type(exc).__name__}: {exc}"
    report.seed = cfg.seed
    report.tolerance = tol
    if not report.converged:
        return report, EXIT_NONCONVERGENCE, f"{entry.name}: solver did not converge within {cfg.max_iter} iterations"
    if not report.passed():
        worst = max(report.oracle_deltas, key=lambda k: report.oracle_deltas[k])
        msg = f"{entry.name}: oracle delta {worst} = {report.oracle_deltas[worst]:.3e} exceeds tolerance {tol:g}"
        return report, EXIT_NONCONVERGENCE, msg
    return report, EXIT_OK, None


def render_csv(reports: list[tuple[str, ScenarioReport]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for name, report in reports:
        w.writerows(report.csv_rows(name))
    return buf.getvalue()


def render_reports(reports: list[tuple[str, ScenarioReport]]) -> str:
    payload = [{"name": name, **r.to_dict()} for name, r in reports]
    return json.dumps(payload, indent=2) + "\n"


def run(cfg: RunConfig, output_dir: str | os.PathLike, tol: float | None = None, parallel: int = 1) -> int:
    """Run every configured scenario and write the CSV and JSON reports.

    Returns:
        The process exit status; the first failing scenario (in config
        order) decides it. Reports of the other scenarios are still written.
    """
    tol = cfg.scenario_tol if tol is None else tol
    entries = cfg.scenarios
    if parallel > 1:
        with ThreadPoolExecutor(max_workers=parallel) as pool:
            results = list(pool.map(lambda e: _run_one(e, cfg, tol), entries))
    else:
        results = [_run_one(e, cfg, tol) for e in entries]

    status = EXIT_OK
    done = []
    for entry, (report, code, msg) in zip(entries, results):
        if report is not None:
            done.append((entry.name, report))
        if code != EXIT_OK:
            log.error(msg)
            if status == EXIT_OK:
                status = code
        else:
            log.info("%s: ok (max delta %.3e)", entry.name, report.max_delta)

    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / cfg.csv_name).write_text(render_csv(done), encoding="utf-8")
    (out / cfg.report_name).write_text(render_reports(done), encoding="utf-8")
    return status


def list_scenarios() -> str:
    """Text table of scenario ids, their parameters and what each reproduces."""
    rows = [(sid, ", ".join(info.parameters), info.anchor) for sid, info in REGISTRY.items()]
    widths = [max(len(r[i]) for r in rows + [("scenario", "parameters", "reproduces")]) for i in range(3)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(("scenario", "parameters", "reproduces"), widths)).rstrip()]
    lines += ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows]
    lines.append("(parameters ending in ? are optional)")
    return "\n".join(lines)


def _load(path: str, seed: int | None) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError([]) from e
    return parse_config(text, seed=seed)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qmaxent", description="Max-entropy entropy-production scenarios.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run the scenarios of a config file")
    p_run.add_argument("config")
    p_run.add_argument("--output", help=f"output directory (default: ${OUTPUT_ENV}, config, or ./{DEFAULT_OUTPUT})")
    p_run.add_argument("--seed", type=int, help="override the config seed")
    p_run.add_argument("--tol", type=float, help="override the scenario tolerance")
    p_run.add_argument("--parallel", type=int, default=1, help="scenarios to run concurrently")

    p_check = sub.add_parser("check", help="validate a config file without running it")
    p_check.add_argument("config")
    p_check.add_argument("--seed", type=int)

    sub.add_parser("list", help="list available scenarios")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")

    if args.command == "list":
        print(list_scenarios())
        return EXIT_OK

    try:
        cfg = _load(args.config, args.seed)
    except ConfigError as e:
        if e.__cause__ is not None:
            print(f"error: cannot read {args.config}: {e.__cause__}", file=sys.stderr)
        for issue in e.issues:
            print(f"error: {issue}", file=sys.stderr)
        return EXIT_PARSE

    if args.command == "check":
        print(f"ok: {len(cfg.scenarios)} scenario(s)")
        return EXIT_OK

    if args.parallel < 1:
        print("error: --parallel must be at least 1", file=sys.stderr)
        return EXIT_PARSE
    if args.tol is not None and not args.tol > 0:
        print("error: --tol must be positive", file=sys.stderr)
        return EXIT_PARSE
    out = args.output or os.environ.get(OUTPUT_ENV) or cfg.output_dir or DEFAULT_OUTPUT
    status = run(cfg, out, tol=args.tol, parallel=args.parallel)
    if status != EXIT_OK:
        print(f"failed with exit status {status}; see messages above", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
