"""pulsetrain: pulse-train detection, human scoring, and neural post-classification.

The pipeline runs detect -> extract -> (human scoring) -> train -> classify
-> roc/diel over archives of WAV files; every stage is also importable here
for scripted use.
"""

from .audio import AudioClip, load_audio, save_wav
from .config import PipelineConfig, load_config, parse_config_text
from .detector import (
    BinaryMask,
    DetectorConfig,
    Pulse,
    PulseTrainEvent,
    binarize,
    coalesce_pulses,
    detect_events,
    extract_pulses,
    group_pulse_trains,
)
from .evaluation import (
    DielGrid,
    RocCurve,
    Site,
    baseline_score,
    confusion_at,
    day_night,
    diel_grid,
    roc_curve,
    solar_elevation_deg,
    tpr_at_fpr,
)
from .features import (
    FEATURE_NAMES,
    FeatureVector,
    StandardizerStats,
    compute_leq,
    extract_features,
    fit_standardizer,
    standardize,
    unstandardize,
)
from .network import (
    Hyperparams,
    MlpModel,
    ScoreDistribution,
    TrainingVector,
    forward,
    gradient,
    init_model,
    load_model,
    mse_loss,
    predict_score,
    save_model,
    train,
)
from .spectrogram import (
    Spectrogram,
    StftParams,
    band_percentiles,
    compute_spectrogram,
    read_spectrogram_text,
    write_spectrogram_text,
)
from .synth import SynthesisSpec, planted_train_span, synthesize_bursts, synthesize_pulse_train

__version__ = "0.1.0"
