"""Training loop: squared-error regression of scaled regret targets."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import torch

from .dataset import RecordError, collate, record_tensors
from .model import ModelConfig, RegretModel, build_model

log = logging.getLogger(__name__)

BASE_LR = 1e-3
LR_DECAY = 0.99


@dataclass
class TrainConfig:
    batch_size: int = 32
    epochs: int = 100
    patience: Optional[int] = 10  # None disables early stopping
    seed: int = 0
    channels: Tuple[str, ...] = ("weight",)

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if self.patience is not None and self.patience < 1:
            raise ValueError(f"patience must be >= 1 or None, got {self.patience}")


def learning_rate(epoch: int) -> float:
    """Schedule value for 0-based epoch e: 1e-3 * 0.99^e."""
    return BASE_LR * LR_DECAY**epoch


@dataclass
class EpochStats:
    epoch: int
    lr: float
    train_loss: float
    val_loss: Optional[float]


@dataclass
class TrainResult:
    history: List[EpochStats] = field(default_factory=list)
    best_epoch: int = -1
    best_val_loss: float = float("inf")
    skipped_records: int = 0


def _usable(records: Sequence[Dict], channels: Sequence[str]) -> Tuple[list, int]:
    good, skipped = [], 0
    for rec in records:
        try:
            record_tensors(rec, channels)
            good.append(rec)
        except (RecordError, KeyError, TypeError) as e:
            skipped += 1
            log.warning("skipping record %s: %s", rec.get("name", "?"), e)
    return good, skipped


def _epoch_loss(model: RegretModel, batches, loss_fn) -> float:
    model.eval()
    total, count = 0.0, 0
    with torch.no_grad():
        for x, arcs, target, _ in batches:
            pred = model(x, arcs)
            total += float(loss_fn(pred, target)) * target.shape[0]
            count += target.shape[0]
    return total / count


def train(
    model: RegretModel,
    train_records: Sequence[Dict],
    cfg: TrainConfig,
    val_records: Sequence[Dict] = (),
) -> TrainResult:
    """Fit in place; returns the history and early-stop bookkeeping.

    Malformed records are skipped with a logged count; an empty usable
    training set is an error.  With validation records and a patience,
    training stops after `patience` epochs without a validation
    improvement and the best-validation weights are restored.
    """
    train_use, skipped_t = _usable(train_records, cfg.channels)
    val_use, skipped_v = _usable(val_records, cfg.channels)
    if not train_use:
        raise ValueError(
            f"no usable training records ({skipped_t} skipped as malformed)"
        )

    torch.manual_seed(cfg.seed)
    gen = torch.Generator().manual_seed(cfg.seed)
    optimizer = torch.optim.Adam(model.parameters(), lr=BASE_LR)
    scheduler = torch.optim.lr_scheduler.LambdaLR(
        optimizer, lambda e: LR_DECAY**e
    )
    loss_fn = torch.nn.MSELoss()

    val_batches = (
        [collate(val_use[i : i + cfg.batch_size], cfg.channels) for i in range(0, len(val_use), cfg.batch_size)]
        if val_use
        else []
    )

    result = TrainResult(skipped_records=skipped_t + skipped_v)
    best_state = None
    stale = 0
    for epoch in range(cfg.epochs):
        lr = float(optimizer.param_groups[0]["lr"])
        order = torch.randperm(len(train_use), generator=gen).tolist()
        model.train()
        total, count = 0.0, 0
        for lo in range(0, len(order), cfg.batch_size):
            batch = [train_use[i] for i in order[lo : lo + cfg.batch_size]]
            x, arcs, target, _ = collate(batch, cfg.channels)
            optimizer.zero_grad()
            pred = model(x, arcs)
            loss = loss_fn(pred, target)
            loss.backward()
            optimizer.step()
            total += loss.item() * target.shape[0]
            count += target.shape[0]
        scheduler.step()
        train_loss = total / count

        val_loss = _epoch_loss(model, val_batches, loss_fn) if val_batches else None
        result.history.append(EpochStats(epoch, lr, train_loss, val_loss))

        if val_loss is not None:
            if val_loss < result.best_val_loss:
                result.best_val_loss = val_loss
                result.best_epoch = epoch
                best_state = {
                    k: v.detach().clone() for k, v in model.state_dict().items()
                }
                stale = 0
            else:
                stale += 1
                if cfg.patience is not None and stale >= cfg.patience:
                    log.info("early stop at epoch %d (best %d)", epoch, result.best_epoch)
                    break

    if best_state is not None:
        model.load_state_dict(best_state)
    return result


def save_history(result: TrainResult, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write("epoch,lr,train_loss,val_loss\n")
        for row in result.history:
            val = "" if row.val_loss is None else repr(row.val_loss)
            f.write(f"{row.epoch},{row.lr!r},{row.train_loss!r},{val}\n")


def save_model(model: RegretModel, channels: Sequence[str], path) -> None:
    torch.save(
        {
            "config": {
                "d_x": model.cfg.d_x,
                "d_h": model.cfg.d_h,
                "T": model.cfg.T,
                "heads": model.cfg.heads,
                "ff_dim": model.cfg.ff_dim,
            },
            "channels": list(channels),
            "state": model.state_dict(),
        },
        path,
    )


def load_model(path) -> Tuple[RegretModel, List[str]]:
    payload = torch.load(path, weights_only=True)
    model = build_model(ModelConfig(**payload["config"]))
    model.load_state_dict(payload["state"])
    model.eval()
    return model, list(payload["channels"])
