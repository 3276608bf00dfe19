"""Line-graph construction and training-data export.

The line graph of the complete instance graph has one node per
undirected edge (i, j), i < j, numbered lexicographically, and a
directed arc between two nodes whenever their underlying edges share an
endpoint.  A complete graph on n nodes yields n(n-1)/2 line-graph nodes
and n(n-1)(n-2) directed arcs (each undirected adjacency counted in
both directions).

Dataset records are one JSON object per line: per-node feature channels
min-max scaled to [0, 1] per instance, regret targets scaled by the
per-instance maximum regret, and the scaling factors needed to invert
both.  Export is deterministic, so rewriting the same instances yields
a byte-identical file.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .features import CHANNELS, feature_channels
from .instance import Instance, instance_to_record
from .regret import MAX_DP_NODES, regret_matrix

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class LineGraph:
    n: int
    pairs: np.ndarray  # (m, 2) int64, lexicographic (i < j)
    arcs: np.ndarray  # (n(n-1)(n-2), 2) int64 directed line-graph arcs

    @property
    def node_count(self) -> int:
        return len(self.pairs)

    def pair_index(self, i: int, j: int) -> int:
        if i == j:
            raise ValueError(f"({i},{i}) is not an edge")
        if i > j:
            i, j = j, i
        return i * (2 * self.n - i - 1) // 2 + (j - i - 1)


def line_graph(inst_or_n) -> LineGraph:
    """Line graph of the complete graph on n nodes."""
    n = inst_or_n.n if isinstance(inst_or_n, Instance) else int(inst_or_n)
    if n < 3:
        raise ValueError(f"n must be >= 3, got {n}")
    iu, ju = np.triu_indices(n, k=1)
    pairs = np.stack([iu, ju], axis=1).astype(np.int64)
    m = len(pairs)
    index = np.full((n, n), -1, dtype=np.int64)
    index[iu, ju] = index[ju, iu] = np.arange(m)
    arcs: List[Tuple[int, int]] = []
    for p in range(m):
        i, j = int(pairs[p, 0]), int(pairs[p, 1])
        neighbors = sorted(
            set(int(index[i, k]) for k in range(n) if k != i and k != j)
            | set(int(index[j, k]) for k in range(n) if k != i and k != j)
        )
        arcs.extend((p, q) for q in neighbors)
    return LineGraph(n=n, pairs=pairs, arcs=np.array(arcs, dtype=np.int64))


# -----------------------------
# Scaling
# -----------------------------
def scale_channel(x: np.ndarray) -> Tuple[np.ndarray, float, float]:
    """Min-max scale to [0, 1]; a constant channel maps to all zeros with
    scale 1 so inversion stays exact."""
    lo = float(x.min())
    span = float(x.max()) - lo
    if span <= 0.0:
        span = 1.0
    return (x - lo) / span, lo, span


def unscale_channel(x: np.ndarray, lo: float, span: float) -> np.ndarray:
    return x * span + lo


# -----------------------------
# Dataset export
# -----------------------------
def build_record(
    inst: Instance, channels: Optional[Sequence[str]] = None
) -> Dict:
    """One training record: scaled line-graph node features and regret
    targets for a single instance."""
    names = list(channels) if channels is not None else list(CHANNELS)
    unknown = [c for c in names if c not in CHANNELS]
    if unknown:
        raise ValueError(f"unknown feature channels: {unknown}")
    lg = line_graph(inst)
    iu, ju = lg.pairs[:, 0], lg.pairs[:, 1]
    mats = feature_channels(inst)
    feature_scaling = {}
    scaled_channels = {}
    for name in names:
        scaled, lo, span = scale_channel(mats[name][iu, ju])
        scaled_channels[name] = scaled.tolist()
        feature_scaling[name] = {"min": lo, "scale": span}
    rm = regret_matrix(inst)
    target_raw = rm.values[iu, ju]
    divisor = float(target_raw.max())
    if divisor <= 0.0:
        divisor = 1.0
    record = {
        "name": inst.name,
        "n": inst.n,
        "instance": instance_to_record(inst),
        "nodes": lg.pairs.tolist(),
        "channels": scaled_channels,
        "target": (target_raw / divisor).tolist(),
        "target_scaling": {"max": divisor},
        "feature_scaling": feature_scaling,
        "arcs": lg.arcs.tolist(),
    }
    return record


def export_dataset(
    instances: Iterable[Instance],
    path,
    channels: Optional[Sequence[str]] = None,
) -> int:
    """Write one record per instance; instances beyond the oracle bound
    are skipped with a logged reason.  Returns the record count."""
    count = 0
    skipped = 0
    with open(path, "w", encoding="utf-8") as f:
        for inst in instances:
            if inst.n > MAX_DP_NODES:
                skipped += 1
                log.warning(
                    "skipping %s: n=%d exceeds the n<=%d oracle bound",
                    inst.name, inst.n, MAX_DP_NODES,
                )
                continue
            f.write(json.dumps(build_record(inst, channels)) + "\n")
            count += 1
    if skipped:
        log.warning("skipped %d instance(s) beyond the oracle bound", skipped)
    return count


def load_dataset(path) -> List[Dict]:
    records = []
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if line:
                records.append(json.loads(line))
    return records


def split_dataset(
    records: Sequence, fractions: Tuple[float, float], seed: int
) -> Tuple[list, list]:
    """Deterministic shuffle-split into (train, validation)."""
    if abs(sum(fractions) - 1.0) > 1e-9:
        raise ValueError(f"fractions must sum to 1, got {fractions}")
    k = len(records)
    n_train = int(round(fractions[0] * k))
    perm = np.random.default_rng(seed).permutation(k)
    train = [records[int(i)] for i in perm[:n_train]]
    val = [records[int(i)] for i in perm[n_train:]]
    if not train or not val:
        raise ValueError(
            f"split of {k} records at {fractions} leaves an empty partition"
        )
    return train, val
