class TrainerError(Exception):
    """Base class for trainer-side failures."""


class BadPitFile(TrainerError):
    """PIT file violates the documented byte layout."""


class InconsistentRecordCounts(TrainerError):
    """PIT files of one split disagree on record count or labels."""


class LayoutTagMismatch(TrainerError):
    """PIT layout tag differs from the tile contract this trainer expects."""


class ShapeMismatch(TrainerError):
    """Tensor shape differs from the architecture contract."""


class EmptyTestSet(TrainerError):
    """Evaluation was handed zero samples."""
