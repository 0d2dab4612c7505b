"""Contact-state metrics: strict 16-state accuracy plus per-leg breakdowns.

A prediction counts toward state accuracy only when all four feet match at
once; per-leg accuracy and binary F1 come from the bit decomposition of
the class index (bit 3 = LF, 2 = RF, 1 = LH, 0 = RH).
"""

from __future__ import annotations

import numpy as np

from .errors import EmptyTestSet

LEGS = ("LF", "RF", "LH", "RH")
LEG_BITS = {"LF": 3, "RF": 2, "LH": 1, "RH": 0}


def leg_bits(states: np.ndarray) -> dict:
    states = np.asarray(states, dtype=np.int64)
    return {leg: (states >> LEG_BITS[leg]) & 1 for leg in LEGS}


def binary_f1(y_true: np.ndarray, y_pred: np.ndarray) -> float:
    tp = int(np.sum((y_true == 1) & (y_pred == 1)))
    fp = int(np.sum((y_true == 0) & (y_pred == 1)))
    fn = int(np.sum((y_true == 1) & (y_pred == 0)))
    denom = 2 * tp + fp + fn
    return (2 * tp / denom) if denom else 0.0


def contact_metrics(y_true, y_pred) -> dict:
    y_true = np.asarray(y_true, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    if y_true.size == 0:
        raise EmptyTestSet("no samples to evaluate")
    if y_true.shape != y_pred.shape:
        raise EmptyTestSet(f"label/prediction shape mismatch: {y_true.shape} vs {y_pred.shape}")

    true_bits = leg_bits(y_true)
    pred_bits = leg_bits(y_pred)
    legs = {}
    for leg in LEGS:
        legs[leg] = {
            "acc": float(np.mean(true_bits[leg] == pred_bits[leg])),
            "f1": binary_f1(true_bits[leg], pred_bits[leg]),
        }
    return {
        "state_accuracy": float(np.mean(y_true == y_pred)),
        "legs": legs,
        "leg_avg_acc": float(np.mean([legs[leg]["acc"] for leg in LEGS])),
        "leg_avg_f1": float(np.mean([legs[leg]["f1"] for leg in LEGS])),
    }
