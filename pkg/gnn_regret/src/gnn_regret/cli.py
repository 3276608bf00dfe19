"""Command-line interface.

Subcommands:

  train    fit a regret model on an exported dataset
  predict  write predicted regret files for exported records

On failure the process prints a one-line diagnostic to stderr and
exits nonzero.
"""

from __future__ import annotations

import argparse
import sys
from typing import List, Optional

from .dataset import load_records
from .model import ModelConfig, build_model
from .predict import predict_to_dir
from .train import TrainConfig, save_history, save_model, load_model, train


def _cmd_train(args) -> int:
    records = load_records(args.data)
    val = load_records(args.val) if args.val else ()
    channels = tuple(args.channels.split(","))
    cfg = TrainConfig(
        batch_size=args.batch_size,
        epochs=args.epochs,
        patience=args.patience if args.patience > 0 else None,
        seed=args.seed,
        channels=channels,
    )
    model = build_model(ModelConfig(d_x=len(channels)), seed=args.seed)
    result = train(model, records, cfg, val)
    save_model(model, channels, args.out)
    if args.history:
        save_history(result, args.history)
    last = result.history[-1]
    print(
        f"trained {len(result.history)} epochs"
        f" (train loss {last.train_loss:.3e},"
        f" {result.skipped_records} records skipped); model at {args.out}"
    )
    return 0


def _cmd_predict(args) -> int:
    model, channels = load_model(args.model)
    records = load_records(args.data)
    paths = predict_to_dir(model, records, channels, args.out_dir)
    print(f"wrote {len(paths)} regret files to {args.out_dir}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gnn-regret")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("train", help="fit a regret model")
    t.add_argument("--data", required=True, help="training dataset (exported records)")
    t.add_argument("--val", default=None, help="validation dataset")
    t.add_argument("--out", required=True, help="model file to write")
    t.add_argument("--history", default=None, help="loss-curve CSV to write")
    t.add_argument("--epochs", type=int, default=100)
    t.add_argument("--batch-size", type=int, default=32)
    t.add_argument("--patience", type=int, default=10, help="0 disables early stopping")
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--channels", default="weight", help="comma-separated channel names")
    t.set_defaults(func=_cmd_train)

    r = sub.add_parser("predict", help="write predicted regret files")
    r.add_argument("--model", required=True)
    r.add_argument("--data", required=True, help="exported records to predict")
    r.add_argument("--out-dir", required=True)
    r.set_defaults(func=_cmd_predict)

    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
