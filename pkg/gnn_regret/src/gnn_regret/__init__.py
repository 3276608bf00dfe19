"""Learned regret approximation for TSP edges.

A line-graph attention network trained on exported solver datasets; it
predicts per-edge regret and writes it in the regret CSV format the
solver consumes as a search guide.
"""

from gnn_regret.dataset import RecordError, collate, load_records, record_tensors
from gnn_regret.model import ModelConfig, RegretModel, build_model, parameter_count
from gnn_regret.predict import predict_record, predict_to_dir, write_regret_file
from gnn_regret.train import TrainConfig, TrainResult, learning_rate, load_model, save_model, train

__all__ = [
    "RecordError",
    "collate",
    "load_records",
    "record_tensors",
    "ModelConfig",
    "RegretModel",
    "build_model",
    "parameter_count",
    "predict_record",
    "predict_to_dir",
    "write_regret_file",
    "TrainConfig",
    "TrainResult",
    "learning_rate",
    "load_model",
    "save_model",
    "train",
]
