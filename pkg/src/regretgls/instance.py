"""TSP instance representation, random generation, and TSPLIB ingestion.

Instances are immutable after construction and safe to share across
concurrent solver runs.  Two metrics are supported:

  * ``euclidean-exact``      — full-precision straight-line distance
  * ``tsplib-euc2d-rounded`` — EUC_2D distance rounded to the nearest
                               integer (nint), the TSPLIB convention

Random instances are drawn uniformly from the unit square with numpy's
PCG64 generator, so a given (n, seed) pair reproduces byte-for-byte on
any machine.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, List, Optional

import numpy as np

METRIC_EUCLIDEAN = "euclidean-exact"
METRIC_TSPLIB_EUC2D = "tsplib-euc2d-rounded"

_METRICS = (METRIC_EUCLIDEAN, METRIC_TSPLIB_EUC2D)


class TsplibParseError(ValueError):
    """Raised when a TSPLIB document cannot be parsed."""


@dataclass(frozen=True)
class Instance:
    name: str
    n: int
    coords: np.ndarray  # (n, 2) float64
    metric: str = METRIC_EUCLIDEAN
    seed: Optional[int] = None
    # lazily built distance matrix; not part of identity
    _dist_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        coords = np.asarray(self.coords, dtype=np.float64)
        if coords.ndim != 2 or coords.shape[1] != 2:
            raise ValueError(f"coords must be (n, 2), got {coords.shape}")
        if self.n != coords.shape[0]:
            raise ValueError(f"n={self.n} but {coords.shape[0]} coordinates given")
        if self.n < 3:
            raise ValueError(f"instance needs at least 3 nodes, got n={self.n}")
        if self.metric not in _METRICS:
            raise ValueError(f"unknown metric {self.metric!r}")
        coords.setflags(write=False)
        object.__setattr__(self, "coords", coords)


def generate_random(n: int, seed: int, name: Optional[str] = None) -> Instance:
    """Generate a random instance with n i.i.d. uniform points in [0,1]^2."""
    if n < 3:
        raise ValueError(f"n must be >= 3, got {n}")
    rng = np.random.default_rng(seed)  # PCG64
    coords = rng.random((n, 2))
    return Instance(
        name=name if name is not None else f"random-n{n}-s{seed}",
        n=n,
        coords=coords,
        metric=METRIC_EUCLIDEAN,
        seed=seed,
    )


def edge_weight(inst: Instance, i: int, j: int) -> float:
    """Weight of edge (i, j).  Self-loops have no weight."""
    if i == j:
        raise ValueError(f"self-loop ({i},{i}) has no weight")
    n = inst.n
    if not (0 <= i < n and 0 <= j < n):
        raise ValueError(f"node out of range: ({i},{j}) for n={n}")
    dx = inst.coords[i, 0] - inst.coords[j, 0]
    dy = inst.coords[i, 1] - inst.coords[j, 1]
    # same operation order as distance_matrix so both paths agree to the ulp
    d = math.sqrt(dx * dx + dy * dy)
    if inst.metric == METRIC_TSPLIB_EUC2D:
        return float(_nint(d))
    return d


def _nint(x: float) -> int:
    # TSPLIB nint: round half up via floor(x + 0.5)
    return int(x + 0.5)


def distance_matrix(inst: Instance) -> np.ndarray:
    """Full symmetric distance matrix with zero diagonal, cached on the instance."""
    cached = inst._dist_cache.get("w")
    if cached is not None:
        return cached
    xy = inst.coords
    diff = xy[:, None, :] - xy[None, :, :]
    w = np.sqrt((diff * diff).sum(axis=2))
    if inst.metric == METRIC_TSPLIB_EUC2D:
        w = np.floor(w + 0.5)
    np.fill_diagonal(w, 0.0)
    w.setflags(write=False)
    inst._dist_cache["w"] = w
    return w


# -----------------------------
# TSPLIB (EUC_2D only)
# -----------------------------
def parse_tsplib(text: str) -> Instance:
    """Parse a TSPLIB document with TYPE TSP and EDGE_WEIGHT_TYPE EUC_2D."""
    name = "unnamed"
    dimension = None
    edge_weight_type = None
    problem_type = None
    coords: List[tuple] = []

    lines = text.splitlines()
    i = 0
    in_coords = False
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        upper = line.upper()
        if upper.startswith("EOF"):
            break
        if upper.startswith("NODE_COORD_SECTION"):
            in_coords = True
            continue
        if in_coords:
            parts = line.split()
            if len(parts) < 3:
                raise TsplibParseError(
                    f"line {lineno}: coordinate line needs 'index x y', got {line!r}"
                )
            try:
                x, y = float(parts[1]), float(parts[2])
            except ValueError:
                raise TsplibParseError(
                    f"line {lineno}: malformed coordinate in {line!r}"
                ) from None
            coords.append((x, y))
            continue
        if ":" in line:
            key, value = line.split(":", 1)
            key = key.strip().upper()
            value = value.strip()
            if key == "NAME":
                name = value
            elif key == "TYPE":
                problem_type = value.upper()
            elif key == "DIMENSION":
                try:
                    dimension = int(value)
                except ValueError:
                    raise TsplibParseError(
                        f"line {lineno}: DIMENSION must be an integer, got {value!r}"
                    ) from None
            elif key == "EDGE_WEIGHT_TYPE":
                edge_weight_type = value.upper()
        i += 1

    if problem_type is not None and problem_type != "TSP":
        raise TsplibParseError(f"unsupported TYPE {problem_type!r}; only TSP")
    if edge_weight_type is None:
        raise TsplibParseError("missing EDGE_WEIGHT_TYPE")
    if edge_weight_type != "EUC_2D":
        raise TsplibParseError(
            f"unsupported EDGE_WEIGHT_TYPE {edge_weight_type!r}; only EUC_2D"
        )
    if dimension is None:
        raise TsplibParseError("missing DIMENSION")
    if len(coords) != dimension:
        raise TsplibParseError(
            f"DIMENSION is {dimension} but NODE_COORD_SECTION has {len(coords)} entries"
        )

    return Instance(
        name=name,
        n=dimension,
        coords=np.array(coords, dtype=np.float64),
        metric=METRIC_TSPLIB_EUC2D,
    )


def render_tsplib(inst: Instance) -> str:
    """Render an instance as a TSPLIB EUC_2D document (round-trips with parse_tsplib)."""
    out = [
        f"NAME : {inst.name}",
        "TYPE : TSP",
        f"DIMENSION : {inst.n}",
        "EDGE_WEIGHT_TYPE : EUC_2D",
        "NODE_COORD_SECTION",
    ]
    for idx in range(inst.n):
        x, y = inst.coords[idx]
        out.append(f"{idx + 1} {float(x)!r} {float(y)!r}")
    out.append("EOF")
    return "\n".join(out) + "\n"


# -----------------------------
# Native instance files (JSON lines, one instance per line)
# -----------------------------
def instance_to_record(inst: Instance) -> dict:
    return {
        "name": inst.name,
        "n": inst.n,
        "seed": inst.seed,
        "metric": inst.metric,
        "coords": [[float(x), float(y)] for x, y in inst.coords],
    }


def instance_from_record(rec: dict) -> Instance:
    return Instance(
        name=rec["name"],
        n=int(rec["n"]),
        coords=np.array(rec["coords"], dtype=np.float64),
        metric=rec.get("metric", METRIC_EUCLIDEAN),
        seed=rec.get("seed"),
    )


def save_instances(instances: Iterable[Instance], path) -> int:
    count = 0
    with open(path, "w", encoding="utf-8") as f:
        for inst in instances:
            f.write(json.dumps(instance_to_record(inst)) + "\n")
            count += 1
    return count


def load_instances(path) -> List[Instance]:
    out = []
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if line:
                out.append(instance_from_record(json.loads(line)))
    return out
