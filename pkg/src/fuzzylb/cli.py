"""Command-line experiment runner.

Three subcommands: `simulate` plays a single run and prints its metrics,
`compare` sweeps task counts over all three policies and emits the
comparison report (optionally with a rendered figure next to it), and
`fuzz-eval` exposes the controller pipeline for a single input pair.

Settings resolve in three layers: built-in defaults, then an optional
key=value config file, then command-line flags. `--show-config` prints the
fully resolved settings in the same key=value syntax the config file uses,
so any run can be reproduced from its own output.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .fuzzy import (
    DEFAULT_BREAKPOINTS,
    DEFAULT_RULES,
    Breakpoints,
    FuzzyEngine,
    HeavyCountPartition,
    format_rule,
    fuzzify_heavy_count,
    fuzzify_load,
    infer,
    parse_rule,
)
from .policies import PolicyKind
from .report import build_comparison, emit_report
from .simulation import (
    DEFAULT_ARRIVAL_RATE,
    DEFAULT_DEMAND_RANGE,
    DEFAULT_MIGRATION_DELAY,
    DEFAULT_SPEED_RANGE,
    RNG_KIND,
    ConfigError,
    SimConfig,
    run_experiment,
    run_simulation,
)

_POLICIES = ("fuzzy", "round_robin", "randomize")
_FORMATS = ("table", "csv")

# every key a config file may carry; "rule" may repeat
_SETTING_KEYS = (
    "nodes",
    "tasks",
    "seed",
    "seeds",
    "policy",
    "edge_prob",
    "arrival_rate",
    "breakpoints",
    "heavy_partition",
    "migration_delay",
    "neutral_band",
    "demand_range",
    "speed_range",
    "task_counts",
    "format",
    "out",
    "plot",
    "rule",
)


def _default_settings() -> dict:
    return {
        "nodes": 5,
        "tasks": 10,
        "seed": 0,
        "seeds": 30,
        "policy": "fuzzy",
        "edge_prob": 0.2,
        "arrival_rate": DEFAULT_ARRIVAL_RATE,
        "breakpoints": DEFAULT_BREAKPOINTS.to_string(),
        "heavy_partition": "",
        "migration_delay": DEFAULT_MIGRATION_DELAY,
        "neutral_band": 0.05,
        "demand_range": ",".join(format(x, "g") for x in DEFAULT_DEMAND_RANGE),
        "speed_range": ",".join(format(x, "g") for x in DEFAULT_SPEED_RANGE),
        "task_counts": "2,4,6,8,10",
        "format": "",
        "out": "",
        "plot": "",
        "rule": [format_rule(r) for r in DEFAULT_RULES],
    }


def parse_config_text(text: str) -> dict:
    """Parse key=value lines; '#' starts a comment, 'rule' keys accumulate."""
    raw: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        key, sep, value = stripped.partition("=")
        if not sep:
            raise ConfigError(f"line {lineno}: expected key=value, got {line!r}")
        key = key.strip().replace("-", "_")
        value = value.strip()
        if key not in _SETTING_KEYS:
            raise ConfigError(f"line {lineno}: unknown setting {key!r}")
        if key == "rule":
            raw.setdefault("rule", []).append(value)
        else:
            raw[key] = value
    return raw


_INT_KEYS = ("nodes", "tasks", "seed", "seeds")
_FLOAT_KEYS = ("edge_prob", "arrival_rate", "migration_delay", "neutral_band")


def _coerce(key: str, value):
    if isinstance(value, str):
        try:
            if key in _INT_KEYS:
                return int(value)
            if key in _FLOAT_KEYS:
                return float(value)
        except ValueError as exc:
            raise ConfigError(f"setting {key}: {exc}") from exc
    if key == "policy" and isinstance(value, str):
        value = value.replace("-", "_")
        if value not in _POLICIES:
            raise ConfigError(f"policy must be one of {_POLICIES}, got {value!r}")
    if key == "format" and value and value not in _FORMATS:
        raise ConfigError(f"format must be one of {_FORMATS}, got {value!r}")
    return value


def resolve_settings(args: argparse.Namespace) -> dict:
    """Defaults, then config file, then explicitly passed flags."""
    settings = _default_settings()
    config_path = getattr(args, "config", None)
    if config_path:
        try:
            text = Path(config_path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config file {config_path}: {exc}") from exc
        for key, value in parse_config_text(text).items():
            settings[key] = value
    for key in _SETTING_KEYS:
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            settings[key] = flag_value
    for key in _SETTING_KEYS:
        if key != "rule":
            settings[key] = _coerce(key, settings[key])
    return settings


def settings_to_lines(settings: dict) -> list[str]:
    lines = []
    for key in _SETTING_KEYS:
        if key == "rule":
            lines.extend(f"rule = {rule}" for rule in settings["rule"])
        else:
            value = settings[key]
            if isinstance(value, float):
                value = format(value, "g")
            lines.append(f"{key} = {value}")
    return lines


def _parse_pair(text: str, key: str) -> tuple[float, float]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 2:
        raise ConfigError(f"{key} must be two comma-separated numbers, got {text!r}")
    try:
        return (float(parts[0]), float(parts[1]))
    except ValueError as exc:
        raise ConfigError(f"bad {key} {text!r}: {exc}") from exc


def _parse_counts(text: str) -> list[int]:
    try:
        counts = [int(p.strip()) for p in text.split(",") if p.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad task_counts {text!r}: {exc}") from exc
    if not counts:
        raise ConfigError("task_counts must not be empty")
    return counts


def sim_config_from_settings(settings: dict) -> SimConfig:
    try:
        breakpoints = Breakpoints.from_string(settings["breakpoints"])
        heavy = (
            HeavyCountPartition.from_string(settings["heavy_partition"])
            if settings["heavy_partition"]
            else None
        )
        rules = tuple(parse_rule(r) for r in settings["rule"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    cfg = SimConfig(
        nodes=settings["nodes"],
        tasks=settings["tasks"],
        arrival_rate=settings["arrival_rate"],
        edge_prob=settings["edge_prob"],
        policy=PolicyKind(settings["policy"]),
        breakpoints=breakpoints,
        heavy_partition=heavy,
        rules=rules,
        speed_range=_parse_pair(settings["speed_range"], "speed_range"),
        demand_range=_parse_pair(settings["demand_range"], "demand_range"),
        migration_delay_per_hop=settings["migration_delay"],
        neutral_band=settings["neutral_band"],
        seed=settings["seed"],
    )
    cfg.validate()
    # record the derived heavy partition so the printed config is complete
    settings["heavy_partition"] = cfg.effective_heavy_partition().to_string()
    return cfg


def _metadata_lines(settings: dict, extra: dict | None = None) -> list[str]:
    lines = [f"# rng = {RNG_KIND}"]
    for key, value in (extra or {}).items():
        lines.append(f"# {key} = {value}")
    lines.extend(f"# {line}" for line in settings_to_lines(settings))
    return lines


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--nodes", type=int, help="number of nodes (default 5)")
    parser.add_argument("--seed", type=int, help="base RNG seed (default 0)")
    parser.add_argument("--edge-prob", dest="edge_prob", type=float,
                        help="edge probability of the random graph (default 0.2)")
    parser.add_argument("--arrival-rate", dest="arrival_rate", type=float,
                        help=f"task arrival rate (default {DEFAULT_ARRIVAL_RATE:g})")
    parser.add_argument("--breakpoints", help="eight comma-separated load thresholds p,q,r,s,t,u,v,w")
    parser.add_argument("--migration-delay", dest="migration_delay", type=float,
                        help=f"migration delay per hop (default {DEFAULT_MIGRATION_DELAY:g})")
    parser.add_argument("--format", choices=_FORMATS, help="output format")
    parser.add_argument("--out", help="write the report to this path instead of stdout")
    parser.add_argument("--config", help="key=value config file; flags override file values")
    parser.add_argument("--show-config", action="store_true",
                        help="print the fully resolved settings and exit")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fuzzylb",
        description="Discrete-event load-balancing simulator with a fuzzy controller "
        "and round-robin / random-placement baselines.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    simulate = sub.add_parser("simulate", help="run a single simulation")
    _add_common_flags(simulate)
    simulate.add_argument("--policy", type=lambda s: s.replace("-", "_"),
                          help="fuzzy | round_robin | randomize (default fuzzy)")
    simulate.add_argument("--tasks", type=int, help="number of tasks (default 10)")

    compare = sub.add_parser("compare", help="sweep task counts over all policies")
    _add_common_flags(compare)
    compare.add_argument("--seeds", type=int, help="number of seeds per cell (default 30)")
    compare.add_argument("--task-counts", dest="task_counts",
                         help="comma-separated task counts (default 2,4,6,8,10)")
    compare.add_argument("--plot", help="write a response-time figure to this path "
                         "(default: next to --out with a .png suffix)")

    fuzz = sub.add_parser("fuzz-eval", help="evaluate the fuzzy controller on one input")
    fuzz.add_argument("--load", type=float, required=True, help="load index of the node")
    fuzz.add_argument("--heavy", type=int, required=True, help="number of heavy nodes")
    fuzz.add_argument("--nodes", type=int, help="system size for the count partition (default 5)")
    fuzz.add_argument("--breakpoints", help="eight comma-separated load thresholds")
    fuzz.add_argument("--config", help="key=value config file")
    fuzz.add_argument("--show-config", action="store_true",
                      help="print the fully resolved settings and exit")

    return parser


def _write_output(text: str, out: str) -> None:
    if out:
        Path(out).write_text(text)
        print(f"report written to {out}")
    else:
        sys.stdout.write(text)


def cmd_simulate(args: argparse.Namespace) -> int:
    settings = resolve_settings(args)
    cfg = sim_config_from_settings(settings)
    if args.show_config:
        print("\n".join(settings_to_lines(settings)))
        return 0
    metrics = run_simulation(cfg)
    fmt = settings["format"] or "table"
    lines = _metadata_lines(settings)
    lines.append(f"# mean_response = {metrics.mean_response:.6f}")
    lines.append(f"# migrations = {metrics.migrations}")
    lines.append(
        "# completed_per_node = " + ",".join(str(c) for c in metrics.completed_per_node)
    )
    tasks_sorted = sorted(range(len(metrics.response_times)))
    if fmt == "csv":
        lines.append("task_id,response_time")
        lines.extend(f"{tid},{metrics.response_times[tid]:.6f}" for tid in tasks_sorted)
    else:
        lines.append(f"{'task_id':>8}{'response_time':>16}")
        lines.extend(
            f"{tid:>8}{metrics.response_times[tid]:>16.6f}" for tid in tasks_sorted
        )
    _write_output("\n".join(lines) + "\n", settings["out"])
    return 0


def cmd_compare(args: argparse.Namespace) -> int:
    settings = resolve_settings(args)
    cfg = sim_config_from_settings(settings)
    if args.show_config:
        print("\n".join(settings_to_lines(settings)))
        return 0
    task_counts = _parse_counts(settings["task_counts"])
    seeds = list(range(settings["seed"], settings["seed"] + settings["seeds"]))
    if not seeds:
        raise ConfigError(f"seeds must be >= 1, got {settings['seeds']}")
    means = run_experiment(cfg, task_counts, seeds, list(PolicyKind))
    table = build_comparison(task_counts, means)
    fmt = settings["format"] or "csv"
    report = emit_report(table, format=fmt)
    meta = _metadata_lines(settings, extra={"seed_list": f"{seeds[0]}..{seeds[-1]}"})
    _write_output("\n".join(meta) + "\n" + report, settings["out"])
    plot_path = settings["plot"]
    if not plot_path and settings["out"]:
        plot_path = str(Path(settings["out"]).with_suffix(".png"))
    if plot_path:
        from .figures import plot_response_times

        plot_response_times(table, plot_path)
        print(f"figure written to {plot_path}")
    return 0


def cmd_fuzz_eval(args: argparse.Namespace) -> int:
    settings = resolve_settings(args)
    try:
        breakpoints = Breakpoints.from_string(settings["breakpoints"])
        heavy = (
            HeavyCountPartition.from_string(settings["heavy_partition"])
            if settings["heavy_partition"]
            else HeavyCountPartition.default_for(settings["nodes"])
        )
        rules = tuple(parse_rule(r) for r in settings["rule"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    settings["heavy_partition"] = heavy.to_string()
    if args.show_config:
        print("\n".join(settings_to_lines(settings)))
        return 0
    engine = FuzzyEngine(
        breakpoints=breakpoints,
        heavy_partition=heavy,
        rules=rules,
        neutral_band=settings["neutral_band"],
    )
    if args.load < 0:
        raise ConfigError(f"load must be >= 0, got {args.load}")
    if args.heavy < 0:
        raise ConfigError(f"heavy count must be >= 0, got {args.heavy}")
    load_degrees = fuzzify_load(args.load, breakpoints)
    count_degrees = fuzzify_heavy_count(args.heavy, heavy)
    inference = infer(load_degrees, count_degrees, rules)
    result = engine.evaluate(args.load, args.heavy)
    print(f"load = {args.load:g}")
    for name, degree in load_degrees.items():
        print(f"  {name:<12}{degree:.6f}")
    print(f"heavy_count = {args.heavy}")
    for name, degree in count_degrees.items():
        print(f"  {name:<12}{degree:.6f}")
    print("activation")
    print(f"  {'receiver':<12}{inference.activation_receiver:.6f}")
    print(f"  {'sender':<12}{inference.activation_sender:.6f}")
    if result.centroid is None:
        print("centroid = none (no rule fired)")
    else:
        print(f"centroid = {result.centroid:.6f}")
    print(f"status = {result.status.value}")
    return 0


_COMMANDS = {"simulate": cmd_simulate, "compare": cmd_compare, "fuzz-eval": cmd_fuzz_eval}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        print(f"run 'fuzzylb {args.command} --help' for usage", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
