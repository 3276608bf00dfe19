"""Inference: per-edge regret predictions in the solver's CSV format.

Predictions are inverse-scaled with the record's target scaling factor
and written as-is; the solver clamps negatives when it loads the file.
"""
from __future__ import annotations

from pathlib import Path
from typing import Dict, List, Sequence

import torch

from .dataset import record_tensors, validate_record
from .model import RegretModel


def predict_record(
    model: RegretModel, record: Dict, channels: Sequence[str]
) -> torch.Tensor:
    """Regret prediction per line-graph node, in instance units."""
    validate_record(record, channels)
    x, arcs, _ = record_tensors(record, channels)
    if x.shape[1] != model.cfg.d_x:
        raise ValueError(
            f"model expects {model.cfg.d_x} channels, got {x.shape[1]}"
        )
    model.eval()
    with torch.no_grad():
        scaled = model(x, arcs)
    return scaled * float(record["target_scaling"]["max"])


def regret_lines(record: Dict, values: torch.Tensor) -> List[str]:
    lines = ["# provenance: predicted", "i,j,regret"]
    for (i, j), v in zip(record["nodes"], values.tolist()):
        lines.append(f"{i},{j},{float(v)!r}")
    return lines


def write_regret_file(record: Dict, values: torch.Tensor, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write("\n".join(regret_lines(record, values)) + "\n")


def predict_to_dir(
    model: RegretModel,
    records: Sequence[Dict],
    channels: Sequence[str],
    out_dir,
) -> List[Path]:
    """One `<name>.regret.csv` per record; returns the written paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for rec in records:
        values = predict_record(model, rec, channels)
        path = out / f"{rec['name']}.regret.csv"
        write_regret_file(rec, values, path)
        paths.append(path)
    return paths
