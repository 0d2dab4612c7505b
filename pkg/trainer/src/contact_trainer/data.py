"""Assemble PIT files into multi-image training tensors.

Body-scope images are cut into their four per-leg quadrants (LF, RF, LH,
RH order per the layout tag), trunk images pass through, pixels scale to
[0, 1] by /255. A sample is the stack of all N images for one timestep,
shaped (N, 3, H, W) channel-first for the CNN.
"""

from __future__ import annotations

import numpy as np
import torch
from torch.utils.data import Dataset, TensorDataset

from .errors import InconsistentRecordCounts, LayoutTagMismatch, ShapeMismatch
from .pit_reader import EXPECTED_LAYOUT_TAG, UNLABELED, read_records, split_files


def split_body_image(images: np.ndarray):
    """(n, 4w, 4w, 3) body images -> four (n, 2w, 2w, 3) leg images."""
    n, h, w, c = images.shape
    if h != w or h % 2:
        raise ShapeMismatch(f"body images must be square with even side, got {images.shape}")
    half = h // 2
    return {
        "LF": images[:, :half, :half],
        "RF": images[:, :half, half:],
        "LH": images[:, half:, :half],
        "RH": images[:, half:, half:],
    }


def load_split(index_path: str, split, expect_labels: bool = True):
    """Load one split (or a list of splits, concatenated) into tensors.

    Returns (images float32 (n, N, 3, H, W), labels int64 (n,), names).
    """
    splits = [split] if isinstance(split, str) else list(split)
    all_images, all_labels, names = [], [], None
    for name in splits:
        imgs, labels, img_names = _load_one_split(index_path, name, expect_labels)
        if names is None:
            names = img_names
        elif names != img_names:
            raise InconsistentRecordCounts(
                f"splits disagree on image composition: {names} vs {img_names}"
            )
        all_images.append(imgs)
        all_labels.append(labels)
    return np.concatenate(all_images), np.concatenate(all_labels), names


def _load_one_split(index_path: str, split: str, expect_labels: bool):
    entries = split_files(index_path, split)
    if not entries:
        raise InconsistentRecordCounts(f"split {split!r} lists no files")

    stacks, names = [], []
    ref_count, ref_labels = None, None
    for entry in entries:
        meta, labels, images = read_records(entry["path"])
        if meta.layout_tag != EXPECTED_LAYOUT_TAG:
            raise LayoutTagMismatch(
                f"{entry['path']}: layout tag {meta.layout_tag!r} != {EXPECTED_LAYOUT_TAG!r}"
            )
        if ref_count is None:
            ref_count, ref_labels = meta.record_count, labels
        elif meta.record_count != ref_count:
            raise InconsistentRecordCounts(
                f"{entry['path']} has {meta.record_count} records, expected {ref_count}"
            )
        elif not np.array_equal(labels, ref_labels):
            raise InconsistentRecordCounts(f"{entry['path']} labels disagree with the split")

        kind = entry.get("signal_kind", "signal")
        if entry.get("scope") == "body":
            for leg, leg_imgs in split_body_image(images).items():
                stacks.append(leg_imgs)
                names.append(f"{kind}/{leg}")
        else:
            stacks.append(images)
            names.append(f"{kind}/trunk")

    shape = stacks[0].shape[1:]
    for s, n in zip(stacks, names):
        if s.shape[1:] != shape:
            raise ShapeMismatch(f"image {n} shape {s.shape[1:]} != {shape}")

    if expect_labels and np.any(ref_labels == UNLABELED):
        raise InconsistentRecordCounts(f"split {split!r} contains unlabeled records")

    # (n, N, H, W, 3) -> (n, N, 3, H, W), scaled to [0, 1]
    stacked = np.stack(stacks, axis=1).astype(np.float32) / 255.0
    images = np.ascontiguousarray(stacked.transpose(0, 1, 4, 2, 3))
    labels = ref_labels.astype(np.int64)
    return images, labels, names


def as_dataset(images: np.ndarray, labels: np.ndarray) -> Dataset:
    return TensorDataset(torch.from_numpy(images), torch.from_numpy(labels))


def n_images_for(n_leg_kinds: int, n_trunk_kinds: int) -> int:
    """Leg-scope kinds contribute four separated leg images each."""
    return 4 * n_leg_kinds + n_trunk_kinds
