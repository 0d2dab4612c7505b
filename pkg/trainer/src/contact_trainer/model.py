"""Multi-image fusion CNN for 16-class contact-state estimation.

Every input image runs through one shared two-stage convolutional encoder
(Conv 3x3 pad 1 -> GroupNorm(4) -> LeakyReLU -> MaxPool 2x2, twice), which
maps a 3x20x20 image to 16x5x5 features. Per-image features concatenate
channel-wise into 16N x 5 x 5, a 3x3 fusion conv mixes them down to 32
channels, and a two-layer head (800 -> 128 -> 16, ReLU, dropout) predicts
the contact class.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch
from torch import nn

from .errors import ShapeMismatch

IMAGE_SIDE = 20
ENCODED_CHANNELS = 16
ENCODED_SIDE = 5
N_CLASSES = 16


@dataclass(frozen=True)
class ConcatCnnSpec:
    n_images: int
    hidden_dim: int = 128
    dropout: float = 0.3

    def __post_init__(self):
        if self.n_images < 1:
            raise ShapeMismatch(f"n_images must be >= 1, got {self.n_images}")


class ConcatCnn(nn.Module):
    def __init__(self, spec: ConcatCnnSpec):
        super().__init__()
        self.spec = spec
        self.encoder = nn.Sequential(
            nn.Conv2d(3, 8, kernel_size=3, padding=1),
            nn.GroupNorm(4, 8),
            nn.LeakyReLU(),
            nn.MaxPool2d(2),
            nn.Conv2d(8, ENCODED_CHANNELS, kernel_size=3, padding=1),
            nn.GroupNorm(4, ENCODED_CHANNELS),
            nn.LeakyReLU(),
            nn.MaxPool2d(2),
        )
        self.fusion = nn.Conv2d(ENCODED_CHANNELS * spec.n_images, 32, kernel_size=3, padding=1)
        self.head = nn.Sequential(
            nn.Flatten(),
            nn.Linear(32 * ENCODED_SIDE * ENCODED_SIDE, spec.hidden_dim),
            nn.ReLU(),
            nn.Dropout(spec.dropout),
            nn.Linear(spec.hidden_dim, N_CLASSES),
        )

    def encode_images(self, x: torch.Tensor) -> torch.Tensor:
        """(B, N, 3, 20, 20) -> concatenated feature maps (B, 16N, 5, 5)."""
        b, n = x.shape[:2]
        if n != self.spec.n_images:
            raise ShapeMismatch(f"expected {self.spec.n_images} images, got {n}")
        if x.shape[2:] != (3, IMAGE_SIDE, IMAGE_SIDE):
            raise ShapeMismatch(f"expected (3, {IMAGE_SIDE}, {IMAGE_SIDE}) images, got {tuple(x.shape[2:])}")
        feats = self.encoder(x.reshape(b * n, 3, IMAGE_SIDE, IMAGE_SIDE))
        return feats.reshape(b, n * ENCODED_CHANNELS, ENCODED_SIDE, ENCODED_SIDE)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.head(self.fusion(self.encode_images(x)))
