"""End-to-end runs: ingest -> encode -> features -> evaluation -> reports."""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import report as rpt
from .bloc import DEFAULT_PAUSE_FLOOR, encode
from .classify import K_RANGE, EvaluationError, loocv, stratified_kfold
from .distance import DEFAULT_CODEC, codec_params
from .features import (DEFAULT_BINS, NO_CONTENT_DISTANCES, ChangeFeatures, Exclusion,
                       FeatureOptions, account_features, write_features)
from .ingest import (AccountTimeline, Rejection, apply_eligibility, load_events,
                     load_labels, window_campaign)
from .segment import ChangeSetting

log = logging.getLogger(__name__)

PROTOCOLS = ("stratified5", "loocv")

UNLABELED = "unlabeled or other task"
NOT_SAMPLED = "outside campaign window or not sampled"


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    events: str
    labels: str
    task: str = "automation"
    setting: ChangeSetting = field(default_factory=ChangeSetting)
    dataset: Optional[str] = None
    min_posts: int = 20
    max_posts: int = 300
    bins: int = DEFAULT_BINS
    normalize: bool = True
    action_only: bool = False
    codec: str = DEFAULT_CODEC
    pause_floor: int = DEFAULT_PAUSE_FLOOR
    k_range: tuple = K_RANGE
    cv: Optional[str] = None  # default follows the task
    folds: int = 5
    seed: int = 0
    interval_days: int = 14
    target_accounts: int = 10
    cap_before_window: bool = False
    workers: int = 1
    out: Optional[str] = None

    def __post_init__(self):
        if self.task not in ("automation", "coordination"):
            raise ConfigError(f"unknown task {self.task!r}")
        if self.cv is None:
            self.cv = "stratified5" if self.task == "automation" else "loocv"
        if self.cv not in PROTOCOLS:
            raise ConfigError(f"unknown cv protocol {self.cv!r}")
        if self.min_posts < 1 or self.max_posts < self.min_posts:
            raise ConfigError("need 1 <= min_posts <= max_posts")
        if self.bins < 1:
            raise ConfigError("bins must be positive")
        if self.dataset is None:
            self.dataset = Path(self.events).stem

    def options(self) -> dict:
        return {
            "min_posts": self.min_posts, "max_posts": self.max_posts, "bins": self.bins,
            "normalize": self.normalize, "action_only": self.action_only,
            "pause_floor": self.pause_floor, "cv": self.cv, "folds": self.folds,
            "k_range": list(self.k_range), "interval_days": self.interval_days,
            "target_accounts": self.target_accounts, "cap_before_window": self.cap_before_window,
        }


def _features_job(args):
    timeline, setting, opts, pause_floor = args
    label = timeline.label.value if timeline.label else None
    return account_features(encode(timeline, pause_floor), setting, opts, label)


def compute_features(timelines: Sequence[AccountTimeline], setting: ChangeSetting,
                     opts: FeatureOptions, pause_floor: int = DEFAULT_PAUSE_FLOOR,
                     workers: int = 1) -> list:
    jobs = [(t, setting, opts, pause_floor) for t in timelines]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_features_job, jobs, chunksize=16))
    return [_features_job(j) for j in jobs]


def _evaluate(config: ExperimentConfig, feats: list[ChangeFeatures]):
    X = np.array([f.vector for f in feats]) if feats else np.zeros((0, 2 * config.bins))
    y = np.array([1 if f.label == "positive" else 0 for f in feats], dtype=int)
    if config.cv == "loocv":
        if len(y) < 2:
            raise EvaluationError(f"need at least 2 accounts for LOOCV, got {len(y)}")
        return loocv(X, y, config.k_range)
    return stratified_kfold(X, y, config.folds, config.seed, config.k_range)


def _eligible(timelines, config, excluded):
    kept = []
    for t in timelines:
        r = apply_eligibility(t, config.min_posts, config.max_posts)
        if isinstance(r, Rejection):
            excluded.append(r.reason)
        else:
            kept.append(r)
    return kept


def _run_group(config: ExperimentConfig, timelines: list[AccountTimeline], n_loaded: int,
               excluded: list[str], campaign: Optional[str], warnings: list[str],
               features_out: Optional[list] = None) -> rpt.RunReport:
    opts = FeatureOptions(config.bins, config.normalize, config.action_only, config.codec)
    results = compute_features(timelines, config.setting, opts, config.pause_floor, config.workers)
    feats = []
    degenerate = 0
    for r in results:
        if isinstance(r, Exclusion):
            excluded.append(r.reason)
            if r.reason == NO_CONTENT_DISTANCES:
                degenerate += r.n_segments - 1
        else:
            feats.append(r)
            pairs = r.n_segments - 1
            degenerate += (pairs - r.n_action_distances) + (pairs - r.n_content_distances)
    if features_out is not None:
        features_out.extend(feats)
    report = rpt.RunReport(
        dataset=config.dataset, setting=config.setting, task=config.task,
        accounts_loaded=n_loaded, accounts_in=len(feats),
        excluded=rpt.exclusion_tally(excluded), campaign=campaign,
        codec=codec_params(config.codec), seed=config.seed, options=config.options(),
        degenerate_pairs=degenerate, warnings=list(warnings),
    )
    try:
        report.class_histograms = rpt.class_histograms(feats)
    except rpt.ClassHistogramError as exc:
        report.warnings.append(str(exc))
    try:
        report.evaluation = _evaluate(config, feats)
    except EvaluationError as exc:
        report.error = str(exc)
    return report


def load_dataset(config: ExperimentConfig):
    labels = load_labels(config.labels)
    timelines, load_report = load_events(config.events, labels=labels)
    return timelines, load_report


def run_experiment(config: ExperimentConfig, strict: bool = True, timelines=None,
                   features_out: Optional[list] = None) -> list[rpt.RunReport]:
    """Run one change setting over a dataset.

    Automation yields one report.  Coordination yields one report per
    campaign (accounts without a campaign form a single unnamed group).  With
    ``strict`` an infeasible evaluation raises EvaluationError.
    """
    if timelines is None:
        timelines, load_report = load_dataset(config)
        load_warnings = ([f"{load_report.n_errors} malformed line(s) in {load_report.path}"]
                         if load_report.errors else [])
    else:
        load_warnings = []
    all_accounts = list(timelines.values())
    task_accounts = [t for t in all_accounts if t.label and t.label.task == config.task]
    n_other = len(all_accounts) - len(task_accounts)

    reports = []
    if config.task == "automation":
        excluded = [UNLABELED] * n_other
        kept = _eligible(task_accounts, config, excluded)
        reports.append(_run_group(config, kept, len(all_accounts), excluded, None,
                                  load_warnings, features_out))
    else:
        campaigns: dict[Optional[str], list[AccountTimeline]] = {}
        for t in task_accounts:
            campaigns.setdefault(t.label.campaign, []).append(t)
        for name in sorted(campaigns, key=lambda c: (c is not None, c or "")):
            members = campaigns[name]
            excluded: list[str] = []
            warnings = list(load_warnings)
            if name is None:
                kept = _eligible(members, config, excluded)
            else:
                if config.cap_before_window:
                    members = [replace(t, events=t.events[-config.max_posts:]) for t in members]
                window = window_campaign(members, config.interval_days,
                                         config.target_accounts, config.seed)
                if window.warning:
                    warnings.append(window.warning)
                excluded.extend([NOT_SAMPLED] * (len(members) - len(window.accounts)))
                kept = _eligible(window.accounts, config, excluded)
            reports.append(_run_group(config, kept, len(members), excluded, name,
                                      warnings, features_out))
    if strict:
        for r in reports:
            if r.error:
                where = f" (campaign {r.campaign})" if r.campaign else ""
                raise EvaluationError(f"{config.setting.name}{where}: {r.error}")
    return reports


def table_settings(segmentations=("sets_of_k", "pauses", "weeks"), k: int = 4,
                   pause_threshold: float = 3600) -> list[ChangeSetting]:
    """Every (segmentation, selection, distance) combination, in results-table order."""
    return [ChangeSetting(seg, sel, dist, k=k, pause_threshold=pause_threshold)
            for seg in segmentations
            for sel in ("adjacent", "cumulative")
            for dist in ("cosine", "compression")]


def sweep(config: ExperimentConfig, grid: Sequence[ChangeSetting]):
    """One run per setting; failures are isolated and returned alongside the reports."""
    if not grid:
        raise ConfigError("empty settings grid")
    timelines, load_report = load_dataset(config)
    reports, failures = [], []
    for setting in grid:
        cfg = replace(config, setting=setting)
        try:
            rs = run_experiment(cfg, strict=False, timelines=timelines)
        except (ValueError, EvaluationError) as exc:
            failures.append((setting.name, str(exc)))
            continue
        for r in rs:
            if load_report.errors:
                r.warnings.insert(0, f"{load_report.n_errors} malformed line(s) in {load_report.path}")
            if r.error:
                failures.append((setting.name + (f" [{r.campaign}]" if r.campaign else ""), r.error))
        reports.extend(rs)
    return reports, failures


def write_outputs(out_dir, reports: Sequence[rpt.RunReport], features=None, bins: int = DEFAULT_BINS):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "run_reports.json").write_text(rpt.dumps_reports(reports), encoding="utf-8")
    (out / "results.csv").write_text(rpt.format_table(rpt.results_table(reports)), encoding="utf-8")
    (out / "per_k.csv").write_text(
        rpt.format_table(rpt.per_k_table(reports), rpt.PER_K_COLUMNS), encoding="utf-8")
    if features is not None:
        write_features(out / "features.csv", features, bins)
        try:
            rpt.write_class_histograms(out / "class_histograms.csv", rpt.class_histograms(features))
        except rpt.ClassHistogramError:
            pass
    return out
