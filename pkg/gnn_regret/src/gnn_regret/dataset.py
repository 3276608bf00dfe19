"""Reader for the exported line-graph dataset format.

Records are JSON lines with the fields written by the exporter: "name",
"n", "nodes" (edge list of the instance, lexicographic), "channels"
(per-channel min-max-scaled values per node), "target" (max-scaled
regrets), "target_scaling" {"max"}, "feature_scaling", "arcs" (directed
line-graph arcs as (target, source) pairs), and the embedded "instance".
This module never recomputes any of it; the file is the contract.
"""
from __future__ import annotations

import json
from typing import Dict, List, Sequence, Tuple

import numpy as np
import torch

REQUIRED_FIELDS = ("name", "n", "nodes", "channels", "target", "target_scaling", "arcs")


class RecordError(ValueError):
    pass


def load_records(path) -> List[Dict]:
    records = []
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if line:
                records.append(json.loads(line))
    return records


def validate_record(rec: Dict, channels: Sequence[str]) -> None:
    missing = [k for k in REQUIRED_FIELDS if k not in rec]
    if missing:
        raise RecordError(f"record is missing fields {missing}")
    m = len(rec["nodes"])
    expected = rec["n"] * (rec["n"] - 1) // 2
    if m != expected:
        raise RecordError(f"record has {m} line-graph nodes, expected {expected}")
    for name in channels:
        if name not in rec["channels"]:
            raise RecordError(f"record lacks feature channel {name!r}")
        if len(rec["channels"][name]) != m:
            raise RecordError(f"channel {name!r} has wrong length")
    if len(rec["target"]) != m:
        raise RecordError("target has wrong length")
    if "max" not in rec["target_scaling"]:
        raise RecordError("target_scaling lacks the max divisor")
    arcs = np.asarray(rec["arcs"], dtype=np.int64)
    if arcs.ndim != 2 or arcs.shape[1] != 2 or arcs.min() < 0 or arcs.max() >= m:
        raise RecordError("arcs are not a valid (k, 2) index list")


def record_tensors(
    rec: Dict, channels: Sequence[str]
) -> Tuple[torch.Tensor, torch.Tensor, torch.Tensor]:
    """(features (m, d_x), arcs (k, 2), target (m,)) for one record."""
    validate_record(rec, channels)
    x = torch.tensor(
        np.stack([rec["channels"][name] for name in channels], axis=1),
        dtype=torch.float32,
    )
    arcs = torch.tensor(rec["arcs"], dtype=torch.int64)
    target = torch.tensor(rec["target"], dtype=torch.float32)
    return x, arcs, target


def collate(
    records: Sequence[Dict], channels: Sequence[str]
) -> Tuple[torch.Tensor, torch.Tensor, torch.Tensor, List[slice]]:
    """Stack records block-diagonally: features and targets concatenate,
    arc indices shift by each record's node offset.  Returns the per-record
    node slices for splitting predictions back out."""
    xs, arcs, targets, slices = [], [], [], []
    offset = 0
    for rec in records:
        x, a, t = record_tensors(rec, channels)
        xs.append(x)
        arcs.append(a + offset)
        targets.append(t)
        slices.append(slice(offset, offset + x.shape[0]))
        offset += x.shape[0]
    return torch.cat(xs), torch.cat(arcs), torch.cat(targets), slices
