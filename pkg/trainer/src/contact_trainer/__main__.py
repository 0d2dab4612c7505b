"""CLI: train on PIT splits and evaluate checkpoints.

    python -m contact_trainer train --index pit/index.json \
        --train-split train --val-split val --epochs 10 --out run/
    python -m contact_trainer evaluate --checkpoint run/model.pt \
        --index pit/index.json --split test --metrics-out run/metrics.json
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .data import as_dataset, load_split
from .training import (
    TrainConfig,
    evaluate,
    load_checkpoint,
    make_model,
    save_checkpoint,
    train,
    write_metrics,
)


def _splits(raw: str):
    parts = [p for p in raw.split(",") if p]
    return parts[0] if len(parts) == 1 else parts


def cmd_train(args) -> int:
    config = TrainConfig(
        lr=args.lr, epochs=args.epochs, batch_size=args.batch_size, seed=args.seed
    )
    train_x, train_y, names = load_split(args.index, _splits(args.train_split))
    val_x, val_y, _ = load_split(args.index, _splits(args.val_split))
    model = make_model(n_images=train_x.shape[1], config=config)
    best_state, history = train(model, as_dataset(train_x, train_y), as_dataset(val_x, val_y), config)
    model.load_state_dict(best_state)

    os.makedirs(args.out, exist_ok=True)
    ckpt = os.path.join(args.out, "model.pt")
    save_checkpoint(ckpt, model, config, history, names)
    with open(os.path.join(args.out, "history.json"), "w", encoding="utf-8") as fh:
        json.dump(history, fh, indent=2)
        fh.write("\n")
    print(json.dumps({"checkpoint": ckpt, "epochs": len(history), "best_val_loss": min(h["val_loss"] for h in history)}))
    return 0


def cmd_evaluate(args) -> int:
    model, _ = load_checkpoint(args.checkpoint)
    test_x, test_y, _ = load_split(args.index, _splits(args.split))
    metrics = evaluate(model, as_dataset(test_x, test_y))
    if args.metrics_out:
        write_metrics(args.metrics_out, metrics)
    print(json.dumps(metrics, indent=2, sort_keys=True))
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="contact_trainer", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train")
    p.add_argument("--index", required=True)
    p.add_argument("--train-split", default="train", help="split name, or comma-joined names")
    p.add_argument("--val-split", default="val")
    p.add_argument("--epochs", type=int, default=40)
    p.add_argument("--batch-size", type=int, default=64)
    p.add_argument("--lr", type=float, default=1e-4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("evaluate")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--index", required=True)
    p.add_argument("--split", default="test")
    p.add_argument("--metrics-out", default=None)

    args = parser.parse_args(argv)
    return {"train": cmd_train, "evaluate": cmd_evaluate}[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
