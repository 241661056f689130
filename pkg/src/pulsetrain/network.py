"""Feed-forward score classifier trained by full-batch steepest descent.

Architecture is fixed at 18 inputs, three sigmoid hidden layers, and a
5-way softmax output over the human quality scores 0..4. Training minimizes
mean squared error between the softmax distribution and the one-hot target,
updating all weights as w <- w - rho * grad each epoch until the loss drops
below the target or the epoch budget runs out.

Hidden layer l computes sigmoid(W_l a + b_l); the output layer applies a
max-stabilized softmax. Forward evaluation works on any layer chain so toy
networks can be checked by hand; ``init_model`` enforces the production
18-h1-h2-h3-5 shape.
"""

from __future__ import annotations

import copy
import json
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import CorruptModelError, TrainingDivergedError, UnsupportedModelVersionError
from .features import N_FEATURES, StandardizerStats

N_SCORES = 5
MODEL_FORMAT = "pulsetrain-model/1"


@dataclass
class MlpModel:
    weights: list[np.ndarray]  # W[l] shape (n_out, n_in)
    biases: list[np.ndarray]   # b[l] shape (n_out,)
    seed: int | None = None
    standardizer: StandardizerStats | None = field(default=None, compare=False)

    @property
    def layer_sizes(self) -> list[int]:
        return [self.weights[0].shape[1]] + [w.shape[0] for w in self.weights]

    @property
    def n_params(self) -> int:
        return sum(w.size + b.size for w, b in zip(self.weights, self.biases))

    def copy(self) -> "MlpModel":
        return MlpModel(
            weights=[w.copy() for w in self.weights],
            biases=[b.copy() for b in self.biases],
            seed=self.seed,
            standardizer=copy.deepcopy(self.standardizer),
        )


@dataclass
class Hyperparams:
    learning_rate: float = 0.5
    max_epochs: int = 2000
    target_mse: float = 0.01
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate < 0:
            raise ValueError("learning_rate must be >= 0")
        if self.target_mse <= 0:
            raise ValueError("target_mse must be > 0")


@dataclass
class ScoreDistribution:
    probs: np.ndarray  # shape (5,), sums to 1

    @property
    def argmax_score(self) -> int:
        # np.argmax takes the first maximum, i.e. ties resolve to the lower score
        return int(np.argmax(self.probs))

    @property
    def expected_score(self) -> float:
        return float(np.dot(np.arange(N_SCORES), self.probs))


@dataclass
class TrainingVector:
    values: np.ndarray  # standardized features, shape (18,)
    score: int

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.score not in range(N_SCORES):
            raise ValueError(f"score {self.score} outside 0..{N_SCORES - 1}")


def sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def softmax(z: np.ndarray) -> np.ndarray:
    shifted = z - z.max(axis=-1, keepdims=True)
    ez = np.exp(shifted)
    return ez / ez.sum(axis=-1, keepdims=True)


def init_model(layer_sizes: list[int], seed: int = 0) -> MlpModel:
    """Random model with the production architecture.

    Weights are uniform in [-r, r] with r = sqrt(6 / (fan_in + fan_out));
    biases start at zero. Reproducible from the seed.
    """
    if len(layer_sizes) != 5:
        raise ValueError("layer_sizes must name exactly three hidden layers")
    if layer_sizes[0] != N_FEATURES or layer_sizes[-1] != N_SCORES:
        raise ValueError(f"layer_sizes must run from {N_FEATURES} inputs to {N_SCORES} outputs")
    return _random_model(layer_sizes, seed)


def _random_model(layer_sizes: list[int], seed: int) -> MlpModel:
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for fan_in, fan_out in zip(layer_sizes[:-1], layer_sizes[1:]):
        r = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-r, r, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return MlpModel(weights=weights, biases=biases, seed=seed)


def forward_batch(model: MlpModel, inputs: np.ndarray) -> np.ndarray:
    """Output distributions for a (batch, n_in) matrix."""
    a = np.atleast_2d(np.asarray(inputs, dtype=np.float64))
    for w, b in zip(model.weights[:-1], model.biases[:-1]):
        a = sigmoid(a @ w.T + b)
    return softmax(a @ model.weights[-1].T + model.biases[-1])


def forward(model: MlpModel, values: np.ndarray) -> ScoreDistribution:
    """Score distribution for a single standardized feature vector."""
    x = np.asarray(values, dtype=np.float64)
    if x.shape != (model.layer_sizes[0],):
        raise ValueError(f"input shape {x.shape} does not match {model.layer_sizes[0]} inputs")
    return ScoreDistribution(probs=forward_batch(model, x)[0])


def _batch_matrices(batch: list[TrainingVector], n_out: int) -> tuple[np.ndarray, np.ndarray]:
    if not batch:
        raise ValueError("empty batch")
    x = np.stack([tv.values for tv in batch])
    t = np.zeros((len(batch), n_out))
    t[np.arange(len(batch)), [tv.score for tv in batch]] = 1.0
    return x, t


def mse_loss(model: MlpModel, batch: list[TrainingVector]) -> float:
    """Mean over the batch and the output slots of (prob - onehot)^2."""
    x, t = _batch_matrices(batch, model.layer_sizes[-1])
    p = forward_batch(model, x)
    return float(np.mean((p - t) ** 2))


def gradient(model: MlpModel, batch: list[TrainingVector]) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Exact gradient of mse_loss w.r.t. every weight and bias.

    Reverse-mode chain rule through the softmax Jacobian and the sigmoid
    layers. Returned as (weight grads, bias grads) shaped like the model.
    """
    x, t = _batch_matrices(batch, model.layer_sizes[-1])
    n, k = t.shape

    activations = [x]
    a = x
    for w, b in zip(model.weights[:-1], model.biases[:-1]):
        a = sigmoid(a @ w.T + b)
        activations.append(a)
    p = softmax(a @ model.weights[-1].T + model.biases[-1])

    # d loss / d probs, then through the softmax Jacobian row by row:
    # dz_k = p_k * (g_k - sum_j g_j p_j)
    g = 2.0 * (p - t) / (n * k)
    dz = p * (g - np.sum(g * p, axis=1, keepdims=True))

    w_grads: list[np.ndarray] = [None] * len(model.weights)
    b_grads: list[np.ndarray] = [None] * len(model.biases)
    for l in range(len(model.weights) - 1, -1, -1):
        w_grads[l] = dz.T @ activations[l]
        b_grads[l] = dz.sum(axis=0)
        if l > 0:
            a_prev = activations[l]
            dz = (dz @ model.weights[l]) * a_prev * (1.0 - a_prev)
    return w_grads, b_grads


def train(
    model: MlpModel,
    data: list[TrainingVector],
    hp: Hyperparams,
) -> tuple[MlpModel, list[float]]:
    """Full-batch steepest descent until mse < target or max_epochs.

    Returns a trained copy and the loss history (entry 0 is the loss before
    any update, then one entry per epoch). Raises TrainingDivergedError if
    the loss goes non-finite, carrying the offending epoch.
    """
    trained = model.copy()
    history = [mse_loss(trained, data)]
    if history[0] < hp.target_mse:
        return trained, history
    for epoch in range(1, hp.max_epochs + 1):
        w_grads, b_grads = gradient(trained, data)
        for w, gw in zip(trained.weights, w_grads):
            w -= hp.learning_rate * gw
        for b, gb in zip(trained.biases, b_grads):
            b -= hp.learning_rate * gb
        loss = mse_loss(trained, data)
        if not np.isfinite(loss):
            raise TrainingDivergedError(epoch)
        history.append(loss)
        if loss < hp.target_mse:
            break
    return trained, history


def predict_score(model: MlpModel, values: np.ndarray) -> tuple[int, float, ScoreDistribution]:
    """(argmax score, expected score, full distribution) for one vector.

    The expected score is the continuous ranking statistic used for ROC
    sweeps; argmax ties break toward the lower (conservative) score.
    """
    dist = forward(model, values)
    return dist.argmax_score, dist.expected_score, dist


def save_model(model: MlpModel, path: str | os.PathLike) -> None:
    """Write the model as versioned JSON; floats round-trip bit-exactly."""
    doc = {
        "format": MODEL_FORMAT,
        "layer_sizes": model.layer_sizes,
        "seed": model.seed,
        "weights": [w.tolist() for w in model.weights],
        "biases": [b.tolist() for b in model.biases],
        "standardizer": (
            {"mean": model.standardizer.mean.tolist(), "std": model.standardizer.std.tolist()}
            if model.standardizer is not None
            else None
        ),
    }
    with open(path, "w") as f:
        json.dump(doc, f, sort_keys=True)
        f.write("\n")


def load_model(path: str | os.PathLike) -> MlpModel:
    try:
        with open(path) as f:
            doc = json.load(f)
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        raise CorruptModelError(f"{path}: not a model file ({e})") from e

    if not isinstance(doc, dict) or "format" not in doc:
        raise CorruptModelError(f"{path}: missing format tag")
    if doc["format"] != MODEL_FORMAT:
        raise UnsupportedModelVersionError(f"{path}: format {doc['format']!r} not supported")
    try:
        weights = [np.array(w, dtype=np.float64) for w in doc["weights"]]
        biases = [np.array(b, dtype=np.float64) for b in doc["biases"]]
        sizes = doc["layer_sizes"]
        stats = None
        if doc.get("standardizer") is not None:
            stats = StandardizerStats(
                mean=np.array(doc["standardizer"]["mean"], dtype=np.float64),
                std=np.array(doc["standardizer"]["std"], dtype=np.float64),
            )
    except (KeyError, TypeError, ValueError) as e:
        raise CorruptModelError(f"{path}: malformed model payload ({e})") from e

    model = MlpModel(weights=weights, biases=biases, seed=doc.get("seed"), standardizer=stats)
    if model.layer_sizes != sizes:
        raise CorruptModelError(f"{path}: layer_sizes disagree with stored matrices")
    return model
