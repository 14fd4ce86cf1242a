"""Command-line workflow: generate campaigns, optimize, evaluate, assign.

Configuration is a flat ``key = value`` text file (``#`` comments allowed);
every key has a default, so an empty file reproduces the reference campaign
and swarm settings. Human-facing files carry angles in degrees; everything
internal is radians. Exit codes: 0 success, 2 configuration or input errors,
1 runtime failures.
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import sys
from pathlib import Path

import numpy as np

from .assignment import solve
from .fitness import (
    CampaignEvaluator,
    Candidate,
    EvaluationError,
    FitnessReport,
    ObservationSet,
    candidate_from_vector,
    candidate_to_vector,
)
from .orbits import OrbitalElements
from .scenario import (
    CampaignFormatError,
    LabeledObservationSet,
    ScenarioConfig,
    ScenarioError,
    TABLE_OF_TRUTH,
    default_truth,
    generate,
    read_campaign,
    score_assignments,
    write_campaign,
)
from .swarm import SearchBounds, SwarmConfig, optimize

__all__ = ["main"]

DEFAULT_SEED = 0

_CONFIG_KEYS = {
    # scenario
    "seed", "objects", "truth_rows", "nights", "photos_per_night",
    "photo_interval_s", "night_offsets_s", "station_lon_deg",
    "station_lat_deg", "sigma_alpha_deg", "sigma_psi_deg", "noise_sigma_deg",
    "fictitious_counts", "fictitious_margin_deg",
    # swarm
    "particles", "iterations", "eval_budget", "neighborhood_size", "topology",
    "local_search_steps", "worst_reset_count", "inertia", "cognitive",
    "social", "repulsion", "v_max_frac", "v_init_frac",
    # bounds
    "bounds_a_km", "bounds_e", "bounds_inc_deg", "bounds_raan_deg",
    "bounds_theta_deg",
}


class ConfigError(ValueError):
    """A configuration file problem, reported with the offending field."""


def _parse_config(path: str | None) -> dict[str, str]:
    if path is None:
        return {}
    raw: dict[str, str] = {}
    try:
        text = Path(path).read_text(encoding="ascii")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown config field {key!r}")
        raw[key] = value
    return raw


def _get(raw, key, cast, default):
    if key not in raw:
        return default
    try:
        return cast(raw[key])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"config field {key!r}: {exc}") from exc


def _float_list(text: str) -> tuple[float, ...]:
    return tuple(float(tok) for tok in text.split(","))


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(tok) for tok in text.split(","))


def _pair(text: str) -> tuple[float, float]:
    vals = _float_list(text)
    if len(vals) != 2:
        raise ValueError(f"expected 'low,high', got {text!r}")
    return vals[0], vals[1]


def _scenario_config(raw: dict[str, str], seed: int) -> ScenarioConfig:
    from .observation import GroundStation, UncertaintyProfile

    truth = default_truth()
    if "truth_rows" in raw:
        rows = _get(raw, "truth_rows", _int_list, None)
        bad = [r for r in rows if not (1 <= r <= len(TABLE_OF_TRUTH))]
        if bad:
            raise ConfigError(
                f"config field 'truth_rows': rows must be in "
                f"[1, {len(TABLE_OF_TRUTH)}], got {bad}"
            )
        truth = tuple(truth[r - 1] for r in rows)
    lat = _get(raw, "station_lat_deg", float, 45.0)
    lon = _get(raw, "station_lon_deg", float, 0.0)
    if not (-90.0 <= lat <= 90.0):
        raise ConfigError(
            f"config field 'station_lat_deg': {lat} outside [-90, 90]"
        )
    sig_a = _get(raw, "sigma_alpha_deg", float, 0.01)
    sig_p = _get(raw, "sigma_psi_deg", float, 0.01)
    if sig_a <= 0 or sig_p <= 0:
        raise ConfigError("config fields 'sigma_*_deg' must be > 0")
    offsets = _get(raw, "night_offsets_s", _float_list, None)
    counts = _get(raw, "fictitious_counts", _int_list, None)
    try:
        return ScenarioConfig(
            truth_elements=truth,
            nights=_get(raw, "nights", int, 3),
            photos_per_night=_get(raw, "photos_per_night", int, 10),
            photo_interval=_get(raw, "photo_interval_s", float, 1800.0),
            night_start_offsets=offsets,
            station=GroundStation(longitude=math.radians(lon),
                                  latitude=math.radians(lat)),
            sigma=UncertaintyProfile(math.radians(sig_a), math.radians(sig_p)),
            fictitious_counts=counts,
            fictitious_margin=math.radians(
                _get(raw, "fictitious_margin_deg", float, 0.5)),
            measurement_noise_sigma=math.radians(
                _get(raw, "noise_sigma_deg", float, 0.0)),
            seed=seed,
        )
    except ValueError as exc:
        raise ConfigError(f"invalid scenario configuration: {exc}") from exc


def _swarm_config(raw: dict[str, str], seed: int) -> SwarmConfig:
    try:
        return SwarmConfig(
            particle_count=_get(raw, "particles", int, 100),
            iteration_count=_get(raw, "iterations", int, 400),
            eval_budget=_get(raw, "eval_budget", int, None),
            neighborhood_size=_get(raw, "neighborhood_size", int, 10),
            topology=_get(raw, "topology", str, "closest"),
            local_search_steps=_get(raw, "local_search_steps", int, 2),
            worst_reset_count=_get(raw, "worst_reset_count", int, 2),
            inertia=_get(raw, "inertia", float, SwarmConfig.inertia),
            cognitive=_get(raw, "cognitive", float, SwarmConfig.cognitive),
            social=_get(raw, "social", float, SwarmConfig.social),
            repulsion=_get(raw, "repulsion", float, SwarmConfig.repulsion),
            v_max_frac=_get(raw, "v_max_frac", float, SwarmConfig.v_max_frac),
            v_init_frac=_get(raw, "v_init_frac", float, SwarmConfig.v_init_frac),
            seed=seed,
        )
    except ValueError as exc:
        raise ConfigError(f"invalid swarm configuration: {exc}") from exc


def _bounds(raw: dict[str, str], n_objects: int) -> SearchBounds:
    a_lo, a_hi = _get(raw, "bounds_a_km", _pair, (42164.0 - 200.0, 42164.0 + 200.0))
    e_lo, e_hi = _get(raw, "bounds_e", _pair, (0.0, 0.1))
    i_lo, i_hi = _get(raw, "bounds_inc_deg", _pair, (0.0, 1.5))
    o_lo, o_hi = _get(raw, "bounds_raan_deg", _pair, (-180.0, 180.0))
    t_lo, t_hi = _get(raw, "bounds_theta_deg", _pair, (-180.0, 180.0))
    try:
        return SearchBounds.for_objects(
            n_objects,
            a_range=(a_lo, a_hi),
            e_range=(e_lo, e_hi),
            inc_range=(math.radians(i_lo), math.radians(i_hi)),
            raan_range=(math.radians(o_lo), math.radians(o_hi)),
            theta_range=(math.radians(t_lo), math.radians(t_hi)),
        )
    except ValueError as exc:
        raise ConfigError(f"invalid bounds: {exc}") from exc


# -- output files -----------------------------------------------------------

def _fmt(x: float) -> str:
    return repr(float(x))


def _write_elements_csv(path: Path, candidate: Candidate) -> None:
    lines = ["object,a_km,e,inc_deg,raan_deg,theta_deg,lambda_deg"]
    for i, el in enumerate(candidate.elements, start=1):
        lines.append(",".join([
            str(i), _fmt(el.a), _fmt(el.e), _fmt(math.degrees(el.inc)),
            _fmt(math.degrees(el.raan)), _fmt(math.degrees(el.theta)),
            _fmt(math.degrees(el.total_longitude)),
        ]))
    path.write_text("\n".join(lines) + "\n", encoding="ascii")


def _read_elements_csv(path: Path) -> Candidate:
    lines = [ln for ln in path.read_text(encoding="ascii").splitlines()
             if ln.strip()]
    if not lines or not lines[0].startswith("object,"):
        raise ConfigError(f"{path}: expected an elements CSV with a header row")
    header = lines[0].split(",")
    idx = {name: k for k, name in enumerate(header)}
    needed = ("a_km", "e", "inc_deg", "raan_deg", "theta_deg")
    missing = [c for c in needed if c not in idx]
    if missing:
        raise ConfigError(f"{path}: missing columns {missing}")
    elements = []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        try:
            elements.append(OrbitalElements(
                a=float(parts[idx["a_km"]]),
                e=float(parts[idx["e"]]),
                inc=math.radians(float(parts[idx["inc_deg"]])),
                raan=math.radians(float(parts[idx["raan_deg"]])),
                theta=math.radians(float(parts[idx["theta_deg"]])),
                epoch=0.0,
            ))
        except (ValueError, IndexError) as exc:
            raise ConfigError(f"{path}:{lineno}: {exc}") from exc
    if not elements:
        raise ConfigError(f"{path}: no element rows")
    return Candidate(tuple(elements))


def _write_trace_csv(path: Path, trace) -> None:
    lines = ["iteration,best_fitness,mean_fitness,evaluations"]
    for it, best, mean, evals in trace.rows():
        lines.append(f"{it},{_fmt(best)},{_fmt(mean)},{evals}")
    path.write_text("\n".join(lines) + "\n", encoding="ascii")


def _write_residuals_csv(path: Path, obs: ObservationSet,
                         report: FitnessReport) -> None:
    n = report.residual_history.shape[1]
    header = "date_index,epoch_s,night," + ",".join(
        f"R_{i + 1}" for i in range(n))
    lines = [header]
    for j in range(obs.n_dates):
        row = [str(j), _fmt(obs.dates[j]), str(obs.night_membership[j])]
        row += [_fmt(v) for v in report.residual_history[j]]
        lines.append(",".join(row))
    path.write_text("\n".join(lines) + "\n", encoding="ascii")


def _write_assignments_csv(path: Path, obs: ObservationSet,
                           report: FitnessReport) -> None:
    lines = ["date_index,epoch_s,object,measurement_row,cost"]
    for j, assignment in enumerate(report.assignments):
        prev = report.residual_history[j - 1] if j else None
        for i, k in enumerate(assignment.row_of):
            cost = report.residual_history[j][i] - (prev[i] if j else 0.0)
            lines.append(f"{j},{_fmt(obs.dates[j])},{i + 1},{k},{_fmt(cost)}")
    path.write_text("\n".join(lines) + "\n", encoding="ascii")


def _write_scores_csv(path: Path, summary) -> None:
    lines = ["metric,value",
             f"purity,{_fmt(summary.purity)}",
             f"permutation_consistency,{_fmt(summary.permutation_consistency)}"]
    for j, p in enumerate(summary.per_date_purity):
        lines.append(f"purity_date_{j},{_fmt(p)}")
    path.write_text("\n".join(lines) + "\n", encoding="ascii")


# -- subcommands --------------------------------------------------------------

def cmd_generate(args) -> int:
    raw = _parse_config(args.config)
    seed = args.seed if args.seed is not None else _get(raw, "seed", int,
                                                        DEFAULT_SEED)
    config = _scenario_config(raw, seed)
    labeled = generate(config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    campaign_path = out / "campaign.txt"
    write_campaign(campaign_path, labeled)
    sizes = labeled.observations.batch_sizes
    print(f"campaign written to {campaign_path}")
    print(f"dates: {labeled.observations.n_dates}, objects: "
          f"{labeled.truth_candidate.n}, batch sizes: "
          f"{min(sizes)}..{max(sizes)}")
    return 0


def _load_campaign(path: str):
    try:
        return read_campaign(path)
    except OSError as exc:
        raise ConfigError(f"cannot read campaign {path}: {exc}") from exc


def cmd_optimize(args) -> int:
    raw = _parse_config(args.config)
    seed = args.seed if args.seed is not None else _get(raw, "seed", int,
                                                        DEFAULT_SEED)
    data = _load_campaign(args.campaign)
    labeled = data if isinstance(data, LabeledObservationSet) else None
    obs = labeled.observations if labeled else data

    n_objects = _get(raw, "objects", int, None)
    if n_objects is None:
        # Working hypothesis: recover as many objects as the smallest batch
        # can cover.
        n_objects = obs.min_batch
    if not (1 <= n_objects <= obs.min_batch):
        raise ConfigError(
            f"config field 'objects': {n_objects} outside [1, "
            f"{obs.min_batch}] (smallest batch)"
        )

    swarm_config = dataclasses.replace(_swarm_config(raw, seed),
                                       symmetry_blocks=n_objects)
    bounds = _bounds(raw, n_objects)
    evaluator = CampaignEvaluator(obs)

    warm = None
    if args.warm_start_truth:
        if labeled is None:
            raise ConfigError(
                "--warm-start-truth needs a labeled campaign with truth rows"
            )
        warm = candidate_to_vector(labeled.truth_candidate)
        if warm.size != bounds.dim:
            raise ConfigError(
                f"truth has {labeled.truth_candidate.n} objects but the "
                f"search is over {n_objects}"
            )

    result = optimize(evaluator, bounds, swarm_config, workers=args.workers,
                      warm_start=warm)
    if result.report is None:
        print("error: no candidate could be evaluated", file=sys.stderr)
        return 1
    best = candidate_from_vector(result.best_position)
    report = result.report

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_elements_csv(out / "elements.csv", best)
    _write_trace_csv(out / "trace.csv", result.trace)
    _write_residuals_csv(out / "residuals.csv", obs, report)
    _write_assignments_csv(out / "assignments.csv", obs, report)
    print(f"best fitness: {result.best_fitness!r} after "
          f"{result.evaluations} evaluations")
    if labeled is not None:
        summary = score_assignments(report, labeled.truth_labels)
        _write_scores_csv(out / "scores.csv", summary)
        print(f"purity: {summary.purity:.4f}, permutation consistency: "
              f"{summary.permutation_consistency:.4f}")
    print(f"results written to {out}")
    return 0


def cmd_evaluate(args) -> int:
    data = _load_campaign(args.campaign)
    obs = data.observations if isinstance(data, LabeledObservationSet) else data
    candidate = _read_elements_csv(Path(args.elements))
    try:
        report = CampaignEvaluator(obs).report(candidate)
    except EvaluationError as exc:
        print(f"evaluation failed: {exc}", file=sys.stderr)
        return 1
    k_sum = float(np.sum(report.per_date_costs))
    r_sum = float(np.sum(report.final_residuals))
    print(f"fitness: {report.fitness!r}")
    print("per-date costs:")
    for j, k in enumerate(report.per_date_costs.tolist()):
        print(f"  K_{j + 1} = {k!r}")
    print("per-object final residuals:")
    for i, r in enumerate(report.final_residuals.tolist()):
        print(f"  R_{i + 1} = {r!r}")
    rel = abs(k_sum - r_sum) / max(report.fitness, 1e-30)
    print(f"dual accounting |sum K - sum R| / F = {rel:.3e}")
    return 0


def cmd_assign(args) -> int:
    try:
        text = Path(args.matrix).read_text(encoding="ascii")
    except OSError as exc:
        raise ConfigError(f"cannot read matrix {args.matrix}: {exc}") from exc
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            rows.append([float(tok) for tok in line.split()])
        except ValueError as exc:
            raise ConfigError(f"{args.matrix}:{lineno}: {exc}") from exc
    if not rows or len({len(r) for r in rows}) != 1:
        raise ConfigError(f"{args.matrix}: expected equal-length numeric rows")
    try:
        assignment = solve(np.asarray(rows))
    except ValueError as exc:
        raise ConfigError(f"{args.matrix}: {exc}") from exc
    for i, k in enumerate(assignment.row_of):
        print(f"object {i + 1} -> row {k} (cost {rows[k][i]!r})")
    print(f"total cost: {assignment.total_cost!r}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swarmtraj",
        description="multi-object trajectory recovery from anonymous "
                    "angle tracks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("generate", help="write a synthetic campaign file")
    p_gen.add_argument("--config", help="flat key=value configuration file")
    p_gen.add_argument("--out", required=True, help="output directory")
    p_gen.add_argument("--seed", type=int, help="override the config seed")
    p_gen.set_defaults(func=cmd_generate)

    p_opt = sub.add_parser("optimize", help="recover orbits from a campaign")
    p_opt.add_argument("--campaign", required=True, help="campaign file")
    p_opt.add_argument("--config", help="flat key=value configuration file")
    p_opt.add_argument("--out", required=True, help="output directory")
    p_opt.add_argument("--seed", type=int, help="override the config seed")
    p_opt.add_argument("--workers", type=int, default=1,
                       help="evaluation worker processes")
    p_opt.add_argument("--warm-start-truth", action="store_true",
                       help="debug: plant the campaign truth in the swarm")
    p_opt.set_defaults(func=cmd_optimize)

    p_eval = sub.add_parser("evaluate", help="score an elements file against "
                                             "a campaign")
    p_eval.add_argument("--campaign", required=True, help="campaign file")
    p_eval.add_argument("--elements", required=True, help="elements CSV")
    p_eval.set_defaults(func=cmd_evaluate)

    p_asn = sub.add_parser("assign", help="solve a plain-text cost matrix")
    p_asn.add_argument("--matrix", required=True,
                       help="text file, one row per line")
    p_asn.set_defaults(func=cmd_assign)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, CampaignFormatError, ScenarioError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
