"""Training loop: cross-entropy, AdamW, plateau-scheduled learning rate.

Seeded runs reproduce their history on the same hardware/config. The best
validation-loss model state is retained and written to the checkpoint
together with the run configuration and pixel-scaling convention.
"""

from __future__ import annotations

import copy
import json
import time
from dataclasses import asdict, dataclass

import numpy as np
import torch
from torch import nn
from torch.utils.data import DataLoader, Dataset

from .errors import EmptyTestSet
from .metrics import contact_metrics
from .model import ConcatCnn, ConcatCnnSpec


@dataclass(frozen=True)
class TrainConfig:
    lr: float = 1e-4
    epochs: int = 40
    batch_size: int = 64
    plateau_factor: float = 0.2
    plateau_patience: int = 3
    dropout: float = 0.3
    weight_decay: float = 1e-2
    seed: int = 0
    num_workers: int = 0


def make_model(n_images: int, config: TrainConfig) -> ConcatCnn:
    torch.manual_seed(config.seed)
    return ConcatCnn(ConcatCnnSpec(n_images=n_images, dropout=config.dropout))


def _loader(dataset: Dataset, config: TrainConfig, shuffle: bool) -> DataLoader:
    gen = torch.Generator()
    gen.manual_seed(config.seed)
    return DataLoader(
        dataset,
        batch_size=config.batch_size,
        shuffle=shuffle,
        generator=gen if shuffle else None,
        num_workers=config.num_workers,
    )


def _run_epoch(model, loader, loss_fn, optimizer=None):
    training = optimizer is not None
    model.train(training)
    total_loss, total_correct, total = 0.0, 0, 0
    with torch.set_grad_enabled(training):
        for images, labels in loader:
            logits = model(images)
            loss = loss_fn(logits, labels)
            if training:
                optimizer.zero_grad()
                loss.backward()
                optimizer.step()
            total_loss += float(loss.detach()) * labels.size(0)
            total_correct += int((logits.argmax(dim=1) == labels).sum())
            total += labels.size(0)
    return total_loss / total, total_correct / total


def train(model: ConcatCnn, train_set: Dataset, val_set: Dataset, config: TrainConfig):
    """Returns (best_state_dict, history list of per-epoch dicts)."""
    torch.manual_seed(config.seed)
    loss_fn = nn.CrossEntropyLoss()
    optimizer = torch.optim.AdamW(model.parameters(), lr=config.lr, weight_decay=config.weight_decay)
    scheduler = torch.optim.lr_scheduler.ReduceLROnPlateau(
        optimizer, mode="min", factor=config.plateau_factor, patience=config.plateau_patience
    )
    train_loader = _loader(train_set, config, shuffle=True)
    val_loader = _loader(val_set, config, shuffle=False)

    history = []
    best_loss, best_state = float("inf"), copy.deepcopy(model.state_dict())
    for epoch in range(config.epochs):
        t0 = time.perf_counter()
        train_loss, train_acc = _run_epoch(model, train_loader, loss_fn, optimizer)
        val_loss, val_acc = _run_epoch(model, val_loader, loss_fn)
        scheduler.step(val_loss)
        if val_loss < best_loss:
            best_loss = val_loss
            best_state = copy.deepcopy(model.state_dict())
        history.append(
            {
                "epoch": epoch,
                "train_loss": train_loss,
                "train_acc": train_acc,
                "val_loss": val_loss,
                "val_acc": val_acc,
                "lr": optimizer.param_groups[0]["lr"],
                "seconds": time.perf_counter() - t0,
            }
        )
    return best_state, history


@torch.no_grad()
def predict(model: ConcatCnn, dataset: Dataset, batch_size: int = 256) -> np.ndarray:
    model.eval()
    loader = DataLoader(dataset, batch_size=batch_size, shuffle=False)
    preds = [model(images).argmax(dim=1).numpy() for images, _ in loader]
    if not preds:
        raise EmptyTestSet("no batches to predict")
    return np.concatenate(preds)


def evaluate(model: ConcatCnn, dataset: Dataset, batch_size: int = 256) -> dict:
    labels = np.asarray([int(dataset[i][1]) for i in range(len(dataset))], dtype=np.int64)
    if labels.size == 0:
        raise EmptyTestSet("empty test set")
    preds = predict(model, dataset, batch_size)
    return contact_metrics(labels, preds)


def save_checkpoint(path: str, model: ConcatCnn, config: TrainConfig, history, image_names) -> None:
    torch.save(
        {
            "model_state": model.state_dict(),
            "n_images": model.spec.n_images,
            "config": asdict(config),
            "history": history,
            "image_names": list(image_names),
            "pixel_scale": "u8/255",
        },
        path,
    )


def load_checkpoint(path: str) -> tuple:
    blob = torch.load(path, map_location="cpu", weights_only=False)
    config = TrainConfig(**blob["config"])
    model = ConcatCnn(ConcatCnnSpec(n_images=blob["n_images"], dropout=config.dropout))
    model.load_state_dict(blob["model_state"])
    return model, blob


def write_metrics(path: str, metrics: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(metrics, fh, indent=2, sort_keys=True)
        fh.write("\n")
