"""Exception types raised across the toolkit.

Each failure mode that callers are expected to distinguish gets its own
class; everything inherits from PulsetrainError so batch drivers can catch
one type per file and keep going.
"""


class PulsetrainError(Exception):
    """Base class for all toolkit errors."""


class AudioReadError(PulsetrainError):
    """File missing, unreadable, or not a RIFF/WAVE container."""


class UnsupportedAudioError(PulsetrainError):
    """Readable waveform file but an encoding we do not accept."""


class EmptyAudioError(PulsetrainError):
    """Zero-length audio payload."""


class ClipTooShortError(PulsetrainError):
    """Clip shorter than one analysis window."""


class EmptyBandError(PulsetrainError):
    """Requested frequency band contains no spectrogram bins."""


class NyquistError(PulsetrainError):
    """Clip sample rate too low for the configured analysis band."""


class EmptySpanError(PulsetrainError):
    """Requested time span contains no samples."""


class InfeasiblePackingError(PulsetrainError):
    """Synthesis spec cannot fit the requested pulses into the clip."""


class TrainingDivergedError(PulsetrainError):
    """Loss became non-finite during gradient descent."""

    def __init__(self, epoch, message=None):
        self.epoch = epoch
        super().__init__(message or f"training diverged at epoch {epoch}")


class CorruptModelError(PulsetrainError):
    """Model file unparseable or missing required fields."""


class UnsupportedModelVersionError(PulsetrainError):
    """Model file carries a format version this build does not read."""


class DegenerateTruthError(PulsetrainError):
    """ROC requested with only one truth class present."""


class PolarLatitudeError(PulsetrainError):
    """Day/night split undefined above the polar circles."""


class ConfigError(PulsetrainError):
    """Bad key, bad value, or unparseable line in a pipeline config file."""
