"""Pipeline configuration: a flat ``section.key = value`` text format.

Unknown keys are hard errors (typo safety); values are coerced and range
checked by the owning dataclass. A missing file or empty text yields the
documented defaults.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

from .detector import DetectorConfig
from .errors import ConfigError
from .evaluation import Site
from .network import Hyperparams
from .spectrogram import StftParams


@dataclass
class FeatureParams:
    snr_window_s: float = 60.0
    ioi_mode_bin_s: float = 0.01


@dataclass
class PipelineConfig:
    stft: StftParams = field(default_factory=StftParams)
    detector: DetectorConfig = field(default_factory=DetectorConfig)
    features: FeatureParams = field(default_factory=FeatureParams)
    hyper: Hyperparams = field(default_factory=Hyperparams)
    hidden_sizes: tuple[int, ...] = (32, 16, 8)
    site: Site = field(default_factory=lambda: Site(lat_deg=42.4, lon_deg=-70.3, utc_offset_hours=-4.0))


def _int(s: str) -> int:
    return int(s)


def _float(s: str) -> float:
    return float(s)


def _str(s: str) -> str:
    return s


def _int_tuple(s: str) -> tuple[int, ...]:
    return tuple(int(tok) for tok in s.replace(",", " ").split())


# key -> (coercer, (target attribute path))
_SCHEMA = {
    "stft.window_len": (_int, ("stft", "window_len_samples")),
    "stft.hop": (_int, ("stft", "hop_samples")),
    "stft.window": (_str, ("stft", "window_kind")),
    "stft.floor_db": (_float, ("stft", "floor_db")),
    "detector.band_lo_hz": (_float, ("detector", "band_lo_hz")),
    "detector.band_hi_hz": (_float, ("detector", "band_hi_hz")),
    "detector.binarize_pct": (_float, ("detector", "binarize_pct")),
    "detector.binarize_offset_db": (_float, ("detector", "binarize_offset_db")),
    "detector.pulse_dur_min_s": (_float, ("detector", "pulse_dur_min_s")),
    "detector.pulse_dur_max_s": (_float, ("detector", "pulse_dur_max_s")),
    "detector.max_gap_s": (_float, ("detector", "max_gap_s")),
    "detector.min_pulses": (_int, ("detector", "min_pulses")),
    "detector.train_dur_min_s": (_float, ("detector", "train_dur_min_s")),
    "detector.train_dur_max_s": (_float, ("detector", "train_dur_max_s")),
    "features.snr_window_s": (_float, ("features", "snr_window_s")),
    "features.ioi_mode_bin_s": (_float, ("features", "ioi_mode_bin_s")),
    "train.learning_rate": (_float, ("hyper", "learning_rate")),
    "train.max_epochs": (_int, ("hyper", "max_epochs")),
    "train.target_mse": (_float, ("hyper", "target_mse")),
    "train.seed": (_int, ("hyper", "seed")),
    "train.hidden": (_int_tuple, ("hidden_sizes",)),
    "site.lat_deg": (_float, ("site", "lat_deg")),
    "site.lon_deg": (_float, ("site", "lon_deg")),
    "site.utc_offset_hours": (_float, ("site", "utc_offset_hours")),
}


def parse_config_text(text: str) -> PipelineConfig:
    cfg = PipelineConfig()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'section.key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _SCHEMA:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        coerce, path = _SCHEMA[key]
        try:
            coerced = coerce(value)
        except ValueError as e:
            raise ConfigError(f"line {lineno}: bad value for {key}: {e}") from e
        if len(path) == 1:
            setattr(cfg, path[0], coerced)
        else:
            setattr(getattr(cfg, path[0]), path[1], coerced)

    # re-run the owning dataclasses' range checks on the final values
    try:
        cfg.stft = StftParams(
            window_len_samples=cfg.stft.window_len_samples,
            hop_samples=cfg.stft.hop_samples,
            window_kind=cfg.stft.window_kind,
            floor_db=cfg.stft.floor_db,
        )
        cfg.detector = DetectorConfig(**vars(cfg.detector))
        cfg.hyper = Hyperparams(**vars(cfg.hyper))
    except ValueError as e:
        raise ConfigError(str(e)) from e
    return cfg


def load_config(path: str | os.PathLike | None) -> PipelineConfig:
    """Parse a config file; None means all defaults."""
    if path is None:
        return PipelineConfig()
    try:
        with open(path) as f:
            text = f.read()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    return parse_config_text(text)
