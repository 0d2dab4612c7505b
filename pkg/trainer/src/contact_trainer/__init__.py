"""Contact-state estimation harness over PIT image files."""

from .data import as_dataset, load_split, n_images_for, split_body_image
from .metrics import contact_metrics, leg_bits
from .model import ConcatCnn, ConcatCnnSpec
from .training import (
    TrainConfig,
    evaluate,
    load_checkpoint,
    make_model,
    predict,
    save_checkpoint,
    train,
    write_metrics,
)

__version__ = "0.1.0"
