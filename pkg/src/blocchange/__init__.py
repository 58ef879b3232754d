"""Behavioral-change features from BLOC strings for bot and coordination detection."""

__version__ = "0.1.0"

from .bloc import BlocDocument, encode, render
from .classify import EvalReport, KnnModel, knn_predict, loocv, macro_metrics, stratified_kfold
from .distance import compression_distance, cosine_distance, pair_distances
from .experiment import ExperimentConfig, run_experiment, sweep
from .features import ChangeFeatures, account_features, build_histogram
from .ingest import (AccountTimeline, ContentCounts, PostEvent, apply_eligibility,
                     load_events, load_labels, window_campaign)
from .segment import ChangeSetting, Segment, SegmentPair, select_pairs

__all__ = [
    "AccountTimeline", "BlocDocument", "ChangeFeatures", "ChangeSetting", "ContentCounts",
    "EvalReport", "ExperimentConfig", "KnnModel", "PostEvent", "Segment", "SegmentPair",
    "account_features", "apply_eligibility", "build_histogram", "compression_distance",
    "cosine_distance", "encode", "knn_predict", "load_events", "load_labels", "loocv",
    "macro_metrics", "pair_distances", "render", "run_experiment", "select_pairs",
    "stratified_kfold", "sweep", "window_campaign",
]
