"""Command-line entry point.

Exit status: 0 success, 1 fatal configuration or I/O error, 2 evaluation
infeasible (a class missing or too small for the folds).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .bloc import DEFAULT_PAUSE_FLOOR, encode, render
from .classify import EvaluationError
from .distance import CODECS
from .experiment import (ConfigError, ExperimentConfig, run_experiment, sweep,
                         table_settings, write_outputs)
from .ingest import (AccountTimeline, ContentCounts, IngestError, PostEvent, load_events,
                     write_events)
from .report import format_table, results_table
from .segment import ChangeSetting
from .synth import SynthConfigError, automation_benchmark, coordination_benchmark, write_dataset

EXIT_OK, EXIT_FATAL, EXIT_INFEASIBLE = 0, 1, 2

log = logging.getLogger("blocchange")

# flag defaults; a config file overrides these and explicit flags override both
DEFAULTS = {
    "events": None, "labels": None, "task": "automation", "dataset": None,
    "segmentation": "sets-of-k", "k": 4, "pause_threshold": 3600.0,
    "count_pauses": "off", "selection": "cumulative", "distance": "compression",
    "bins": 10, "normalize_bins": "on", "action_only": "off", "cv": None, "folds": 5,
    "seed": 0, "min_posts": 20, "max_posts": 300, "codec": "deflate",
    "pause_floor": DEFAULT_PAUSE_FLOOR, "interval_days": 14, "target_accounts": 10,
    "cap_before_window": "off", "workers": 1, "out": None, "grid": "table",
}
_INT = {"k", "bins", "folds", "seed", "min_posts", "max_posts", "pause_floor",
        "interval_days", "target_accounts", "workers"}
_FLOAT = {"pause_threshold"}
_SWITCH = {"count_pauses", "normalize_bins", "action_only", "cap_before_window"}


def read_config_file(path) -> dict:
    """``key = value`` lines; keys are flag names with or without dashes."""
    out = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for n, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{n}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.lstrip("-").replace("-", "_")
        if key not in DEFAULTS:
            raise ConfigError(f"{path}:{n}: unknown key {key!r}")
        out[key] = value
    return out


def _coerce(key, value):
    if value is None:
        return None
    try:
        if key in _INT:
            return int(value)
        if key in _FLOAT:
            return float(value)
    except ValueError as exc:
        raise ConfigError(f"{key}: {exc}") from exc
    if key in _SWITCH:
        v = str(value).lower()
        if v not in ("on", "off", "true", "false", "1", "0", "yes", "no"):
            raise ConfigError(f"{key}: expected on/off, got {value!r}")
        return v in ("on", "true", "1", "yes")
    return value


def merged_options(args) -> dict:
    opts = dict(DEFAULTS)
    if getattr(args, "config", None):
        opts.update(read_config_file(args.config))
    for key in DEFAULTS:
        v = getattr(args, key, None)
        if v is not None:
            opts[key] = v
    return {k: _coerce(k, v) for k, v in opts.items()}


def build_config(opts: dict) -> ExperimentConfig:
    if not opts["events"] or not opts["labels"]:
        raise ConfigError("--events and --labels are required")
    setting = ChangeSetting(opts["segmentation"], opts["selection"], opts["distance"],
                            k=opts["k"], pause_threshold=opts["pause_threshold"],
                            count_pauses=opts["count_pauses"])
    return ExperimentConfig(
        events=opts["events"], labels=opts["labels"], task=opts["task"], setting=setting,
        dataset=opts["dataset"], min_posts=opts["min_posts"], max_posts=opts["max_posts"],
        bins=opts["bins"], normalize=opts["normalize_bins"], action_only=opts["action_only"],
        codec=opts["codec"], pause_floor=opts["pause_floor"], cv=opts["cv"],
        folds=opts["folds"], seed=opts["seed"], interval_days=opts["interval_days"],
        target_accounts=opts["target_accounts"], cap_before_window=opts["cap_before_window"],
        workers=opts["workers"], out=opts["out"],
    )


def parse_grid(spec: str, k: int, pause_threshold: float, task: str) -> list[ChangeSetting]:
    """``table`` (all 12 combinations; weeks dropped for coordination) or a
    comma-separated list of ``segmentation:selection:distance``."""
    if spec == "table":
        segs = ("sets_of_k", "pauses") if task == "coordination" else ("sets_of_k", "pauses", "weeks")
        return table_settings(segs, k, pause_threshold)
    grid = []
    for item in spec.split(","):
        parts = item.strip().split(":")
        if len(parts) != 3:
            raise ConfigError(f"bad grid entry {item!r}; expected segmentation:selection:distance")
        grid.append(ChangeSetting(*parts, k=k, pause_threshold=pause_threshold))
    return grid


def _add_experiment_flags(p: argparse.ArgumentParser):
    p.add_argument("--config", help="key = value file mirroring these flags")
    p.add_argument("--events", help="event-lines (JSON Lines) file")
    p.add_argument("--labels", help="account_id,label,task[,campaign] file")
    p.add_argument("--task", choices=["automation", "coordination"])
    p.add_argument("--dataset", help="dataset id used in reports (default: events file stem)")
    p.add_argument("--segmentation", choices=["pauses", "weeks", "sets-of-k"])
    p.add_argument("--k", type=int)
    p.add_argument("--pause-threshold", type=float, help="seconds (pauses segmentation)")
    p.add_argument("--count-pauses", choices=["on", "off"], help="sets-of-k: pause glyphs count toward k")
    p.add_argument("--selection", choices=["adjacent", "cumulative"])
    p.add_argument("--distance", choices=["cosine", "compression"])
    p.add_argument("--bins", type=int)
    p.add_argument("--normalize-bins", choices=["on", "off"])
    p.add_argument("--action-only", choices=["on", "off"])
    p.add_argument("--cv", choices=["stratified5", "loocv"])
    p.add_argument("--folds", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--min-posts", type=int)
    p.add_argument("--max-posts", type=int)
    p.add_argument("--codec", choices=list(CODECS))
    p.add_argument("--pause-floor", type=int, help="seconds; shorter gaps emit no pause glyph")
    p.add_argument("--interval-days", type=int)
    p.add_argument("--target-accounts", type=int)
    p.add_argument("--cap-before-window", choices=["on", "off"])
    p.add_argument("--workers", type=int)
    p.add_argument("--out", help="output directory")


def cmd_run(args) -> int:
    config = build_config(merged_options(args))
    features: list = []
    reports = run_experiment(config, features_out=features)
    if config.out:
        write_outputs(config.out, reports, features, config.bins)
    sys.stdout.write(format_table(results_table(reports)))
    return EXIT_OK


def cmd_sweep(args) -> int:
    opts = merged_options(args)
    config = build_config(opts)
    grid = parse_grid(opts["grid"], opts["k"], opts["pause_threshold"], config.task)
    reports, failures = sweep(config, grid)
    if config.out:
        write_outputs(config.out, reports)
    if reports:
        sys.stdout.write(format_table(results_table(reports)))
    for name, msg in failures:
        log.warning("setting %s failed: %s", name, msg)
    return EXIT_OK if reports else EXIT_INFEASIBLE


def cmd_synth(args) -> int:
    if args.kind == "automation":
        accounts = automation_benchmark(args.n, args.events_per_account, args.seed)
    else:
        accounts = coordination_benchmark(args.campaigns, args.n, args.events_per_account, args.seed)
    ev, lab = write_dataset(args.out, accounts)
    print(f"{ev}\n{lab}")
    return EXIT_OK


def nasa_fixture() -> AccountTimeline:
    """Three-event reply / post / reshare sequence with content, pauses of a few minutes."""
    t0 = 1_600_000_000
    events = (
        PostEvent("NASA", t0, "reply", ContentCounts(text_terms=12, media=1, mentions=1)),
        PostEvent("NASA", t0 + 300, "post", ContentCounts(text_terms=20, mentions=2)),
        PostEvent("NASA", t0 + 900, "reshare", ContentCounts(text_terms=15, mentions=5, links=1)),
    )
    return AccountTimeline("NASA", events)


def cmd_fixture(args) -> int:
    tl = nasa_fixture()
    if args.out:
        write_events(args.out, [tl])
    doc = encode(tl)
    print(render(doc, "action"))
    print(render(doc, "content"))
    return EXIT_OK


def cmd_encode(args) -> int:
    timelines, report = load_events(args.events)
    for account_id, tl in timelines.items():
        if args.account and account_id not in args.account:
            continue
        doc = encode(tl, args.pause_floor)
        print(json.dumps({"account_id": account_id, "action": render(doc, "action"),
                          "content": render(doc, "content")}))
    for lineno, msg in report.errors:
        log.warning("line %d: %s", lineno, msg)
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="blocchange",
                                     description="Behavioral-change features for bot and coordination detection")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one change setting")
    _add_experiment_flags(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="run a grid of change settings")
    _add_experiment_flags(p)
    p.add_argument("--grid", help="'table' or seg:sel:dist[,seg:sel:dist...]")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("synth", help="write a synthetic benchmark dataset")
    p.add_argument("kind", choices=["automation", "coordination"])
    p.add_argument("--out", required=True)
    p.add_argument("--n", type=int, default=None,
                   help="accounts per regime (automation, default 200) or per class per campaign (coordination, default 10)")
    p.add_argument("--campaigns", type=int, default=3)
    p.add_argument("--events-per-account", type=int, default=120)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("fixture", help="print (and optionally write) the three-event reference sequence")
    p.add_argument("--out", help="write it as an event-lines file")
    p.set_defaults(func=cmd_fixture)

    p = sub.add_parser("encode", help="dump BLOC strings for accounts in an event file")
    p.add_argument("events")
    p.add_argument("--account", action="append")
    p.add_argument("--pause-floor", type=int, default=DEFAULT_PAUSE_FLOOR)
    p.set_defaults(func=cmd_encode)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "synth" and args.n is None:
        args.n = 200 if args.kind == "automation" else 10
    try:
        return args.func(args)
    except EvaluationError as exc:
        log.error("evaluation infeasible: %s", exc)
        return EXIT_INFEASIBLE
    except (ConfigError, IngestError, SynthConfigError, ValueError, OSError) as exc:
        log.error("%s", exc)
        return EXIT_FATAL


if __name__ == "__main__":
    sys.exit(main())
