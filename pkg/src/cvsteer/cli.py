"""Command-line surface: scans, certification, coefficient tables, Monte Carlo.

Subcommands
-----------
``scan``        grid of channel efficiencies -> PPT / steering table (CSV or JSON)
``certify``     PPT + steering certification of a covariance-matrix file
``table-a1``    optimal displacement coefficients versus channel efficiency
``montecarlo``  shot-level validation of the analytic covariances

All output is deterministic given the inputs (including RNG seeds).  Exit
codes: 0 success, 2 usage or configuration error, 3 input-data error,
4 numerical failure (e.g. a covariance that is not positive definite).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import optimize, protocol, sampler
from .core import GaussianState
from .criteria import (
    Partition,
    SEPARABILITY_TOL,
    SteeringReport,
    full_report,
    ppt_min,
    steerability,
)
from .protocol import ProtocolParams, ScanResult, build_network_state, qss_scenario

__all__ = [
    "CliError",
    "InputDataError",
    "NumericalError",
    "RunConfig",
    "UsageError",
    "cmd_certify",
    "cmd_montecarlo",
    "cmd_scan",
    "cmd_table_a1",
    "main",
    "read_cov_matrix_file",
    "write_cov_matrix_file",
]

EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_NUMERIC = 4

#: Published matrices carry three decimals, so rounding alone can make them
#: asymmetric by up to 1e-3; accept that and symmetrize on ingestion.
INPUT_SYMMETRY_TOL = 2e-3

SCENARIOS = ("two_user", "three_user", "qss", "appendix_e")

_PARAM_FIELDS = {f.name for f in dataclasses.fields(ProtocolParams)} - {"users"}


class CliError(Exception):
    exit_code = EXIT_USAGE


class UsageError(CliError):
    exit_code = EXIT_USAGE


class InputDataError(CliError):
    exit_code = EXIT_INPUT


class NumericalError(CliError):
    exit_code = EXIT_NUMERIC


@dataclass(frozen=True)
class RunConfig:
    """Everything a scan or Monte Carlo run needs."""

    scenario: str = "two_user"
    eta_start: float = 0.1
    eta_stop: float = 1.0
    eta_steps: int = 10
    overrides: dict[str, float] = field(default_factory=dict)
    out: str | None = None
    fmt: str = "csv"
    seed: int = 12345
    shots: int = 1_000_000

    def etas(self) -> np.ndarray:
        return np.linspace(self.eta_start, self.eta_stop, self.eta_steps)


def _fmt(x: float) -> str:
    return format(float(x), ".6g")


def _round6(x: float) -> float:
    return float(_fmt(x))


def parse_eta_grid(spec: str) -> tuple[float, float, int]:
    """Parse ``start:stop:steps`` into grid bounds."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise UsageError(f"eta grid must look like start:stop:steps, got {spec!r}")
    try:
        start, stop, steps = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise UsageError(f"bad eta grid {spec!r}: {exc}") from None
    if steps < 1:
        raise UsageError("eta grid needs at least one step")
    for v in (start, stop):
        if not 0.0 <= v <= 1.0:
            raise UsageError(f"eta grid bounds must lie in [0, 1], got {v}")
    return start, stop, steps


def _parse_override(item: str) -> tuple[str, float]:
    if "=" not in item:
        raise UsageError(f"override must look like key=value, got {item!r}")
    key, _, raw = item.partition("=")
    key = key.strip()
    if key not in _PARAM_FIELDS:
        raise UsageError(f"unknown parameter {key!r}; settable: {sorted(_PARAM_FIELDS)}")
    try:
        return key, float(raw)
    except ValueError:
        raise UsageError(f"value for {key!r} is not a number: {raw!r}") from None


def load_config_file(path: str) -> dict[str, str]:
    """Flat ``key=value`` configuration file; '#' starts a comment line."""
    entries: dict[str, str] = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        entries[key.strip()] = value.strip()
    return entries


def build_run_config(args: argparse.Namespace) -> RunConfig:
    """Merge config-file entries with command-line flags (flags win)."""
    file_entries = load_config_file(args.config) if getattr(args, "config", None) else {}
    known = {"scenario", "eta_grid", "format", "out", "seed", "shots"}
    overrides: dict[str, float] = {}
    cfg: dict[str, object] = {}
    for key, value in file_entries.items():
        if key in _PARAM_FIELDS:
            overrides[key] = _parse_override(f"{key}={value}")[1]
        elif key == "scenario":
            cfg["scenario"] = value
        elif key == "eta_grid":
            cfg["eta_start"], cfg["eta_stop"], cfg["eta_steps"] = parse_eta_grid(value)
        elif key == "format":
            cfg["fmt"] = value
        elif key == "out":
            cfg["out"] = value
        elif key in ("seed", "shots"):
            try:
                cfg[key] = int(value)
            except ValueError:
                raise UsageError(f"{key} must be an integer, got {value!r}") from None
        else:
            raise UsageError(f"unknown config key {key!r}; known: {sorted(known | _PARAM_FIELDS)}")
    if getattr(args, "scenario", None):
        cfg["scenario"] = args.scenario
    if getattr(args, "eta_grid", None):
        cfg["eta_start"], cfg["eta_stop"], cfg["eta_steps"] = parse_eta_grid(args.eta_grid)
    for item in getattr(args, "set", None) or []:
        key, value = _parse_override(item)
        overrides[key] = value
    if getattr(args, "out", None):
        cfg["out"] = args.out
    if getattr(args, "format", None):
        cfg["fmt"] = args.format
    if getattr(args, "seed", None) is not None:
        cfg["seed"] = args.seed
    if getattr(args, "shots", None) is not None:
        cfg["shots"] = args.shots
    cfg["overrides"] = overrides
    config = RunConfig(**cfg)  # type: ignore[arg-type]
    if config.scenario not in SCENARIOS:
        raise UsageError(f"unknown scenario {config.scenario!r}; choose from {SCENARIOS}")
    if config.fmt not in ("csv", "json"):
        raise UsageError(f"format must be csv or json, got {config.fmt!r}")
    return config


# ---------------------------------------------------------------------------
# scenario parameterization
# ---------------------------------------------------------------------------


def _params_for(scenario: str, eta: float, ov: dict[str, float]) -> ProtocolParams:
    """Grid-point parameters with auto-optimal coefficients unless overridden."""
    if scenario == "two_user":
        params = ProtocolParams(users="two", eta_sb=eta, eta_ab=eta)
    elif scenario == "three_user":
        params = ProtocolParams(users="three", eta_sb=eta, eta_sd=eta, eta_ab=eta, eta_bd=eta)
    elif scenario == "qss":
        params = protocol.qss_params(eta)
    elif scenario == "appendix_e":
        params = ProtocolParams(users="two", eta_sa=eta, eta_sb=eta, eta_ab=eta)
    else:
        raise UsageError(f"unknown scenario {scenario!r}")
    if ov:
        try:
            params = params.replace(**ov)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    if scenario in ("two_user", "three_user") and "f_b" not in ov:
        params = params.replace(
            f_b=optimize.optimal_fb(params.t2, params.eta_sb, params.eta_ab,
                                    params.v_a, params.v_s))
    if scenario == "three_user" and "f_d" not in ov:
        params = params.replace(f_d=optimize.optimal_fd(eta, params.v_a, params.v_s))
    if scenario == "appendix_e" and "f_b" not in ov:
        params = params.replace(
            f_b=optimize.optimal_fb_general_loss(params.eta_sa, params.eta_sb,
                                                 params.eta_ab, params.v_a, params.v_s))
    return params


def _mc_stage(scenario: str) -> str:
    return "final_three_user" if scenario in ("three_user", "qss") else "final_two_user"


def cmd_scan(config: RunConfig) -> ScanResult:
    """One table row per grid efficiency for the configured scenario."""
    ov = config.overrides
    rows: list[dict[str, float]] = []
    if config.scenario == "qss":
        base = qss_scenario(config.etas(), overrides=ov)
        columns = base.columns + ("key_rate",)
        for row in base.rows:
            row = dict(row)
            row["key_rate"] = optimize.key_rate(row["G_BD_to_A"])
            rows.append(row)
        return ScanResult(columns, tuple(rows))

    if config.scenario == "two_user":
        columns = ("eta", "f_b", "PPT_A", "G_A_to_B", "G_B_to_A")
        for eta in config.etas():
            params = _params_for("two_user", float(eta), ov)
            state = build_network_state(params, "final_two_user")
            rows.append({
                "eta": float(eta),
                "f_b": params.f_b,
                "PPT_A": ppt_min(state, ["A"]),
                "G_A_to_B": steerability(state, Partition((0,), (1,))),
                "G_B_to_A": steerability(state, Partition((1,), (0,))),
            })
        return ScanResult(columns, tuple(rows))

    if config.scenario == "three_user":
        columns = ("eta", "f_b", "f_d", "PPT_A", "PPT_B", "PPT_D",
                   "G_A_to_BD", "G_A_to_B", "G_A_to_D", "G_B_to_D")
        for eta in config.etas():
            params = _params_for("three_user", float(eta), ov)
            state = build_network_state(params, "final_three_user")
            rows.append({
                "eta": float(eta),
                "f_b": params.f_b,
                "f_d": params.f_d,
                "PPT_A": ppt_min(state, ["A"]),
                "PPT_B": ppt_min(state, ["B"]),
                "PPT_D": ppt_min(state, ["D"]),
                "G_A_to_BD": steerability(state, Partition((0,), (1, 2))),
                "G_A_to_B": steerability(state, Partition((0,), (1,))),
                "G_A_to_D": steerability(state, Partition((0,), (2,))),
                "G_B_to_D": steerability(state, Partition((1,), (2,))),
            })
        return ScanResult(columns, tuple(rows))

    # appendix_e: lossy server-to-Alice link; two-user steering with the
    # general-loss optimum plus the secret-sharing direction for reference
    columns = ("eta", "f_b", "PPT_A", "G_A_to_B", "G_B_to_A",
               "G_BD_to_A_qss", "key_rate_qss")
    qss_rows = qss_scenario(config.etas(), eta_sa_follows=True).rows
    for eta, qrow in zip(config.etas(), qss_rows):
        params = _params_for("appendix_e", float(eta), ov)
        state = build_network_state(params, "final_two_user")
        rows.append({
            "eta": float(eta),
            "f_b": params.f_b,
            "PPT_A": ppt_min(state, ["A"]),
            "G_A_to_B": steerability(state, Partition((0,), (1,))),
            "G_B_to_A": steerability(state, Partition((1,), (0,))),
            "G_BD_to_A_qss": qrow["G_BD_to_A"],
            "key_rate_qss": optimize.key_rate(qrow["G_BD_to_A"]),
        })
    return ScanResult(columns, tuple(rows))


def format_scan_csv(result: ScanResult) -> str:
    lines = [",".join(result.columns)]
    for row in result.rows:
        lines.append(",".join(_fmt(row[c]) for c in result.columns))
    return "\n".join(lines) + "\n"


def format_scan_json(result: ScanResult) -> str:
    payload = {
        "columns": list(result.columns),
        "rows": [{c: _round6(row[c]) for c in result.columns} for row in result.rows],
    }
    return json.dumps(payload, indent=2) + "\n"


# ---------------------------------------------------------------------------
# covariance-matrix files
# ---------------------------------------------------------------------------


def read_cov_matrix_file(path: str) -> tuple[tuple[str, ...], np.ndarray]:
    """Parse a whitespace-separated square matrix with optional label header.

    The header line looks like ``# labels: A B0 C1``.  The matrix must be
    square with even dimension and symmetric within ``INPUT_SYMMETRY_TOL``
    (published matrices are rounded, so mild asymmetry is tolerated and
    symmetrized away).
    """
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputDataError(f"cannot read {path}: {exc}") from None
    labels: tuple[str, ...] | None = None
    rows: list[list[float]] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line.lstrip("#").strip()
            if body.lower().startswith("labels:"):
                labels = tuple(body[len("labels:"):].split())
            continue
        try:
            rows.append([float(tok) for tok in line.split()])
        except ValueError:
            raise InputDataError(f"{path}:{lineno}: non-numeric matrix entry") from None
    if not rows:
        raise InputDataError(f"{path}: no matrix data found")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise InputDataError(f"{path}: ragged rows; expected {width} entries per row")
    if len(rows) != width:
        raise InputDataError(f"{path}: matrix is {len(rows)} x {width}, not square")
    if width % 2:
        raise InputDataError(f"{path}: dimension {width} is odd; need 2 per mode")
    cov = np.array(rows)
    asym = float(np.abs(cov - cov.T).max())
    if asym > INPUT_SYMMETRY_TOL:
        raise InputDataError(
            f"{path}: matrix asymmetric by {asym:.3g} (tolerance {INPUT_SYMMETRY_TOL:g})")
    n = width // 2
    if labels is None:
        labels = tuple(f"M{i + 1}" for i in range(n))
    if len(labels) != n:
        raise InputDataError(f"{path}: {len(labels)} labels for {n} modes")
    return labels, (cov + cov.T) / 2.0


def write_cov_matrix_file(path: str, state: GaussianState) -> None:
    """Export a state in the plain-text matrix format ``read_cov_matrix_file`` reads."""
    lines = ["# labels: " + " ".join(state.labels)]
    for row in state.cov:
        lines.append(" ".join(_fmt(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def parse_split_spec(spec: str, labels: Sequence[str]) -> tuple[tuple[str, ...], tuple[str, ...]]:
    """Parse ``"A|B0,C1"`` into two label tuples; whitespace is ignored."""
    parts = [p.strip() for p in spec.split("|")]
    if len(parts) != 2:
        raise InputDataError(f"split {spec!r} must have exactly two parties separated by '|'")
    parties = []
    for part in parts:
        members = tuple(tok.strip() for tok in part.split(",") if tok.strip())
        if not members:
            raise InputDataError(f"split {spec!r} has an empty party")
        for m in members:
            if m not in labels:
                raise InputDataError(f"unknown mode label {m!r} in split {spec!r}; "
                                     f"file defines {tuple(labels)}")
        parties.append(members)
    overlap = set(parties[0]) & set(parties[1])
    if overlap:
        raise InputDataError(f"split {spec!r} repeats modes {sorted(overlap)}")
    return parties[0], parties[1]


def cmd_certify(
    path: str,
    splits: Sequence[str] | None = None,
    separability_tol: float = SEPARABILITY_TOL,
) -> SteeringReport:
    """Certify a covariance-matrix file across the requested splits.

    Without explicit splits, every one-mode-versus-rest bipartition is
    certified.  Raises ``NumericalError`` if the matrix is not positive
    definite (certification is undefined then).
    """
    labels, cov = read_cov_matrix_file(path)
    if np.linalg.eigvalsh(cov).min() <= 0:
        raise NumericalError(f"{path}: covariance is not positive definite")
    state = GaussianState(labels, cov)
    if splits:
        parsed = [parse_split_spec(s, labels) for s in splits]
    else:
        parsed = [((l,), tuple(m for m in labels if m != l)) for l in labels]
    partitions = [Partition.from_labels(state, n, m) for n, m in parsed]
    return full_report(state, partitions, separability_tol)


def format_report_json(report: SteeringReport) -> str:
    payload = {
        "separability_tol": report.separability_tol,
        "ppt": {k: _round6(v) for k, v in report.ppt_by_split.items()},
        "steering": {k: _round6(v) for k, v in report.steer_by_direction.items()},
        "verdicts": dict(report.verdicts),
    }
    return json.dumps(payload, indent=2) + "\n"


# ---------------------------------------------------------------------------
# coefficient table and Monte Carlo report
# ---------------------------------------------------------------------------

TABLE_ETAS = (1.0, 0.8, 0.6, 0.4, 0.2)


def cmd_table_a1() -> str:
    """Optimal displacement coefficients versus channel efficiency."""
    params = ProtocolParams()
    lines = ["eta    F_B      F_D"]
    for eta in TABLE_ETAS:
        f_b = optimize.optimal_fb(params.t2, eta, eta, params.v_a, params.v_s)
        f_d = optimize.optimal_fd(eta, params.v_a, params.v_s)
        lines.append(f"{eta:<6.1f} {f_b:<8.3f} {f_d:<8.3f}".rstrip())
    return "\n".join(lines) + "\n"


def cmd_montecarlo(config: RunConfig, dump_shots: str | None = None) -> str:
    """Run the shot sampler at the grid-start efficiency and report agreement."""
    eta = float(config.eta_start)
    params = _params_for(config.scenario, eta, config.overrides)
    stage = _mc_stage(config.scenario)
    batch = sampler.simulate_shots(params, stage, config.shots, config.seed)
    if dump_shots:
        header = ",".join(f"{q}_{l}" for l in batch.labels for q in ("x", "p"))
        np.savetxt(dump_shots, batch.quads, delimiter=",", header=header,
                   comments="", fmt="%.6g")
    estimated = sampler.estimate_covariance(batch)
    analytic = build_network_state(params, stage)
    comparison = sampler.compare_covariance(estimated, analytic.cov, batch.n_shots)

    lines = [
        "monte carlo validation",
        f"scenario: {config.scenario}",
        f"stage: {stage}",
        f"eta: {_fmt(eta)}",
        f"shots: {config.shots}",
        f"seed: {config.seed}",
        f"max abs deviation: {_fmt(comparison.max_abs_deviation)}",
        f"max z-score: {_fmt(float(comparison.z_scores.max()))}",
    ]
    if comparison.flagged:
        pairs = " ".join(f"({i},{j})" for i, j in comparison.flagged)
        lines.append(f"flagged elements (> {comparison.z_threshold:g} SE): {pairs}")
    else:
        lines.append(f"flagged elements (> {comparison.z_threshold:g} SE): none")

    est_state = GaussianState(batch.labels, estimated)
    lines.append("certification, estimated vs analytic:")
    for label in batch.labels:
        a = ppt_min(analytic, [label])
        e = ppt_min(est_state, [label])
        lines.append(f"  PPT {label}|rest: estimated {_fmt(e)} analytic {_fmt(a)} "
                     f"diff {_fmt(abs(e - a))}")
    first = Partition((0,), tuple(range(1, len(batch.labels))))
    for name, part in (("G first->rest", first), ("G rest->first", first.swapped())):
        a = steerability(analytic, part)
        e = steerability(est_state, part)
        lines.append(f"  {name}: estimated {_fmt(e)} analytic {_fmt(a)} "
                     f"diff {_fmt(abs(e - a))}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# argument parsing and entry point
# ---------------------------------------------------------------------------


def _add_run_flags(sub: argparse.ArgumentParser, *, grid_default: str | None) -> None:
    sub.add_argument("--scenario", choices=SCENARIOS, default=None,
                     help="network scenario (default two_user)")
    sub.add_argument("--eta-grid", default=grid_default, metavar="A:B:N",
                     help="efficiency grid start:stop:steps")
    sub.add_argument("--set", action="append", metavar="KEY=VALUE",
                     help="override a protocol parameter (repeatable)")
    sub.add_argument("--config", help="key=value configuration file (flags win)")
    sub.add_argument("--out", help="write output to this path instead of stdout")
    sub.add_argument("--seed", type=int, default=None, help="random seed")
    sub.add_argument("--shots", type=int, default=None, help="Monte Carlo shot count")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cvsteer",
        description="Gaussian entanglement/steering distribution over lossy networks",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    scan = subs.add_parser("scan", help="PPT / steering table over an efficiency grid")
    _add_run_flags(scan, grid_default=None)
    scan.add_argument("--format", choices=("csv", "json"), default=None,
                      help="output format (default csv)")

    certify = subs.add_parser("certify", help="certify a covariance-matrix file")
    certify.add_argument("file", help="plain-text covariance matrix")
    certify.add_argument("--split", action="append", metavar="N|M",
                         help='bipartition such as "A|B0,C1" (repeatable; '
                              "default: every mode versus the rest)")
    certify.add_argument("--out", help="write the JSON report to this path")

    table = subs.add_parser("table-a1", help="optimal displacement coefficients")
    table.add_argument("--out", help="write the table to this path")

    mc = subs.add_parser("montecarlo", help="validate covariances by sampling")
    _add_run_flags(mc, grid_default="1:1:1")
    mc.add_argument("--dump-shots", metavar="PATH",
                    help="also write the raw shot records as CSV")
    return parser


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "scan":
            config = build_run_config(args)
            result = cmd_scan(config)
            text = format_scan_csv(result) if config.fmt == "csv" else format_scan_json(result)
            _emit(text, config.out)
        elif args.command == "certify":
            report = cmd_certify(args.file, args.split)
            _emit(format_report_json(report), args.out)
        elif args.command == "table-a1":
            _emit(cmd_table_a1(), args.out)
        elif args.command == "montecarlo":
            config = build_run_config(args)
            _emit(cmd_montecarlo(config, dump_shots=args.dump_shots), config.out)
        else:  # pragma: no cover - argparse enforces the choices
            raise UsageError(f"unknown command {args.command!r}")
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return 0


if __name__ == "__main__":
    sys.exit(main())
