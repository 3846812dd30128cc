"""Conformal active learning: label-efficient text annotation with per-class
coverage guarantees on set predictions."""

from .classifier import NO, YES, SparseLogisticClassifier, TrainConfig
from .conformal import CalibrationSet, Thresholds, calibrate, prediction_set, uncertainty_score
from .corpus import Annotation, Dataset, Document, LabelTask, ingest_dataset
from .embed import TfidfEncoder
from .engine import Engine, EngineConfig
from .select import SelectionConfig

__all__ = [
    "NO",
    "YES",
    "SparseLogisticClassifier",
    "TrainConfig",
    "CalibrationSet",
    "Thresholds",
    "calibrate",
    "prediction_set",
    "uncertainty_score",
    "Annotation",
    "Dataset",
    "Document",
    "LabelTask",
    "ingest_dataset",
    "TfidfEncoder",
    "Engine",
    "EngineConfig",
    "SelectionConfig",
]
