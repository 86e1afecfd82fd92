"""Reconstruction models: training, inference, serialization.

Six model kinds share one container and one ``reconstruct`` entry point:

* ``AE``    - autoencoder trained on the corrupted series itself (input ==
  target), per-sample, no temporal context.
* ``DAE``   - denoising autoencoder trained on a clean series with fresh
  random zero-corruption every epoch, per-sample.
* ``EDAE_NN``   - denoising autoencoder over neighbor-expanded windows with
  nearest-mean fake values at the corrupted slots, dense encoder/decoder.
* ``EDAE_LSTM`` - same windowed denoising task, but the window is consumed
  step by step by a peephole LSTM and the clean window is read out of the
  final hidden state.
* ``IM``    - no parameters; reconstruct applies the nearest-mean fill.
* ``ELM``   - frozen random hidden layer over the expanded window minus its
  center, read out by a ridge regression solved in closed form.

Models trained on normalized data carry their normalization parameters, so
``reconstruct`` accepts raw series and returns raw values, touching masked
entries only. Corruption during training happens in normalized space: a
zeroed raw entry lands exactly on the per-channel image of raw 0 under the
stored affine map, so the training-time corruption token and the zeros seen
at reconstruction time coincide.
"""

import json
import struct
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import (
    CorruptModelFileError,
    ModelShapeError,
    ModelVersionError,
    NumericFailureError,
)
from .io import atomic_write_bytes
from .nn import (
    DenseParams,
    LossConfig,
    LstmParams,
    OptimizerState,
    backward_dense,
    backward_lstm,
    dense_forward,
    glorot_uniform,
    init_dense,
    init_lstm,
    lstm_forward,
    optimizer_step,
    reconstruction_loss,
    sigmoid,
    sparsity_penalty,
)
from .rng import SplitMix64
from .series import (
    CorruptedSeries,
    NormParams,
    TimeSeries,
    WindowConfig,
    fill_nearest_mean,
    fit_norm,
    window_matrix,
)


class ModelKind(Enum):
    AE = "AE"
    DAE = "DAE"
    EDAE_NN = "EDAE_NN"
    EDAE_LSTM = "EDAE_LSTM"
    IM = "IM"
    ELM = "ELM"


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters shared by every trainable kind; each kind reads the
    fields it needs and ignores the rest.

    ``rho_train`` is the corruption proportion applied afresh each epoch by
    the denoising kinds (and once by ELM); callers evaluating at a known
    missing-rate usually set it to that rate.
    """

    window: WindowConfig = WindowConfig(5, 5)
    hidden_dense: int = 64
    hidden_lstm: int = 32
    loss: LossConfig = LossConfig()
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8
    epochs: int = 200
    batch_size: int = 32
    rho_train: float = 0.2
    seed: int = 0
    elm_hidden: int = 100
    elm_ridge: float = 1e-6
    diag_peepholes: bool = False

    def __post_init__(self):
        if not isinstance(self.window, WindowConfig):
            raise ValueError("window must be a WindowConfig")
        if not isinstance(self.loss, LossConfig):
            raise ValueError("loss must be a LossConfig")
        for name in ("hidden_dense", "hidden_lstm", "epochs", "batch_size", "elm_hidden"):
            v = getattr(self, name)
            if not (isinstance(v, int) and v >= 1):
                raise ValueError(f"{name} must be a positive int, got {v!r}")
        if not isinstance(self.seed, int):
            raise ValueError("seed must be an int")
        if not 0.0 <= self.rho_train <= 1.0:
            raise ValueError(f"rho_train must be in [0, 1], got {self.rho_train}")
        if not self.learning_rate > 0:
            raise ValueError(f"learning_rate must be positive, got {self.learning_rate}")
        if not self.elm_ridge > 0:
            raise ValueError(f"elm_ridge must be positive, got {self.elm_ridge}")


@dataclass
class AutoencoderParams:
    encoder: DenseParams
    decoder: DenseParams

    def __post_init__(self):
        if self.encoder.n_out != self.decoder.n_in:
            raise ValueError(
                f"encoder emits {self.encoder.n_out}, decoder expects {self.decoder.n_in}"
            )

    def named_arrays(self) -> dict:
        return {
            "encoder.W": self.encoder.W,
            "encoder.b": self.encoder.b,
            "decoder.W": self.decoder.W,
            "decoder.b": self.decoder.b,
        }


@dataclass
class ElmParams:
    """Frozen random hidden layer plus the ridge-solved readout.

    hidden_W is (H, F), hidden_b (H,), out_W (H, L): the readout is
    ``sigmoid(x @ hidden_W.T + hidden_b) @ out_W``.
    """

    hidden_W: np.ndarray
    hidden_b: np.ndarray
    out_W: np.ndarray
    ridge: float

    def __post_init__(self):
        self.hidden_W = np.asarray(self.hidden_W, dtype=np.float64)
        self.hidden_b = np.asarray(self.hidden_b, dtype=np.float64)
        self.out_W = np.asarray(self.out_W, dtype=np.float64)
        h = self.hidden_W.shape[0]
        if self.hidden_W.ndim != 2 or self.hidden_b.shape != (h,):
            raise ValueError("hidden_W must be (H, F) with hidden_b (H,)")
        if self.out_W.ndim != 2 or self.out_W.shape[0] != h:
            raise ValueError(f"out_W must be (H, L), got {self.out_W.shape}")
        if not self.ridge > 0:
            raise ValueError(f"ridge must be positive, got {self.ridge}")

    def named_arrays(self) -> dict:
        return {
            "hidden.W": self.hidden_W,
            "hidden.b": self.hidden_b,
            "out.W": self.out_W,
        }


@dataclass
class TrainedModel:
    """What reconstruction needs, bundled: the kind, its parameters (None
    for IM), the training-time normalization, the window geometry, and the
    channel layout the model was fitted to."""

    kind: ModelKind
    params: object
    norm: NormParams | None
    window: WindowConfig
    channel_names: tuple
    metadata: dict

    def __post_init__(self):
        if not isinstance(self.kind, ModelKind):
            raise ValueError("kind must be a ModelKind")
        if not isinstance(self.window, WindowConfig):
            raise ValueError("window must be a WindowConfig")
        self.channel_names = tuple(str(c) for c in self.channel_names)
        if not self.channel_names:
            raise ValueError("channel_names must be non-empty")

    @property
    def channels(self) -> int:
        return len(self.channel_names)


# ---------------------------------------------------------------------------
# Training


def _require_clean(series, where: str) -> None:
    if not isinstance(series, TimeSeries):
        raise ValueError(
            f"{where} trains against clean targets; pass the clean TimeSeries"
        )


def _fresh_mask(rng: SplitMix64, shape, rho: float) -> np.ndarray:
    total = shape[0] * shape[1]
    picks = rng.sample_without_replacement(total, round(rho * total))
    flags = np.zeros(total, dtype=bool)
    flags[picks] = True
    return flags.reshape(shape)


def _train_dense_autoencoder(make_epoch, n_in, n_out, config: TrainConfig, rng: SplitMix64):
    """Shared minibatch loop for the dense kinds.

    ``make_epoch(rng)`` returns this epoch's (inputs, targets); stochastic
    corruption happens inside it. Returns (params, mean loss of the last
    epoch). Draw order: encoder init, decoder init, then per epoch the
    epoch data first and the batch order second.
    """
    encoder = init_dense(n_in, config.hidden_dense, "sigmoid", rng)
    decoder = init_dense(config.hidden_dense, n_out, "identity", rng)
    params = AutoencoderParams(encoder, decoder)
    arrays = params.named_arrays()
    opt = OptimizerState(config.learning_rate, config.beta1, config.beta2, config.adam_eps)
    last_loss = float("nan")
    for _ in range(config.epochs):
        inputs, targets = make_epoch(rng)
        order = rng.permutation(inputs.shape[0])
        total = 0.0
        for start in range(0, order.size, config.batch_size):
            idx = order[start:start + config.batch_size]
            hidden, cache_enc = dense_forward(encoder, inputs[idx])
            out, cache_dec = dense_forward(decoder, hidden)
            loss, d_out = reconstruction_loss(targets[idx], out)
            penalty, d_hidden_pen = sparsity_penalty(hidden, config.loss)
            grads_dec, d_hidden = backward_dense(decoder, cache_dec, d_out)
            grads_enc, _ = backward_dense(encoder, cache_enc, d_hidden + d_hidden_pen)
            optimizer_grads = {
                "encoder.W": grads_enc["W"],
                "encoder.b": grads_enc["b"],
                "decoder.W": grads_dec["W"],
                "decoder.b": grads_dec["b"],
            }
            optimizer_step(opt, arrays, optimizer_grads)
            total += (loss + penalty) * idx.size
        last_loss = total / inputs.shape[0]
    return params, last_loss


def _train_lstm_autoencoder(make_epoch, channels, window, config: TrainConfig, rng: SplitMix64):
    """Minibatch loop for the recurrent kind: each expanded-window row is
    re-read as its sequence of per-step channel vectors, and only the final
    step's readout is scored against the clean window."""
    steps = window.steps
    n_out = window.expanded_dim(channels)
    params = init_lstm(channels, config.hidden_lstm, n_out, rng, config.diag_peepholes)
    arrays = params.named_arrays()
    opt = OptimizerState(config.learning_rate, config.beta1, config.beta2, config.adam_eps)
    last_loss = float("nan")
    for _ in range(config.epochs):
        inputs, targets = make_epoch(rng)
        order = rng.permutation(inputs.shape[0])
        total = 0.0
        for start in range(0, order.size, config.batch_size):
            idx = order[start:start + config.batch_size]
            xs = inputs[idx].reshape(idx.size, steps, channels).transpose(1, 0, 2)
            ys, _, cache = lstm_forward(params, xs)
            loss, d_last = reconstruction_loss(targets[idx], ys[-1])
            d_ys = np.zeros_like(ys)
            d_ys[-1] = d_last
            grads = backward_lstm(params, cache, d_ys)
            optimizer_step(opt, arrays, grads)
            total += loss * idx.size
        last_loss = total / inputs.shape[0]
    return params, last_loss


def train_ae(corrupted: CorruptedSeries, config: TrainConfig) -> TrainedModel:
    """Fit the plain autoencoder to a corrupted series as it stands: the
    normalized corrupted samples are both input and target, so whatever
    sits at the zeroed entries is reproduced, not repaired."""
    if not isinstance(corrupted, CorruptedSeries):
        raise ValueError("train_ae fits the series as observed; pass a CorruptedSeries")
    series = corrupted.series
    norm = fit_norm(series.values, ~corrupted.mask.flags)
    data = norm.apply(series.values)
    rng = SplitMix64(config.seed)

    def make_epoch(_rng):
        return data, data

    params, final_loss = _train_dense_autoencoder(
        make_epoch, series.channels, series.channels, config, rng
    )
    return TrainedModel(
        ModelKind.AE,
        params,
        norm,
        WindowConfig(0, 0),
        series.channel_names,
        _metadata(config, final_loss, rho_train=corrupted.rho),
    )


def train_dae(clean: TimeSeries, config: TrainConfig) -> TrainedModel:
    """Fit the denoising autoencoder: every epoch zeroes a fresh set of
    round(rho_train*T*L) normalized entries (set to the image of raw 0) and
    the clean normalized samples are the target."""
    _require_clean(clean, "train_dae")
    norm = fit_norm(clean.values)
    data = norm.apply(clean.values)
    token = norm.apply(np.zeros((1, clean.channels)))[0]
    rng = SplitMix64(config.seed)

    def make_epoch(epoch_rng):
        flags = _fresh_mask(epoch_rng, data.shape, config.rho_train)
        noisy = data.copy()
        noisy[flags] = np.broadcast_to(token, data.shape)[flags]
        return noisy, data

    params, final_loss = _train_dense_autoencoder(
        make_epoch, clean.channels, clean.channels, config, rng
    )
    return TrainedModel(
        ModelKind.DAE,
        params,
        norm,
        WindowConfig(0, 0),
        clean.channel_names,
        _metadata(config, final_loss, rho_train=config.rho_train),
    )


def train_edae(clean: TimeSeries, config: TrainConfig, kind: ModelKind) -> TrainedModel:
    """Fit a neighbor-window denoising autoencoder (dense or recurrent).

    Every epoch: corrupt afresh, fill the corrupted slots with the
    nearest-observed mean, expand to windows, and score the reconstruction
    of the whole clean window.
    """
    if kind not in (ModelKind.EDAE_NN, ModelKind.EDAE_LSTM):
        raise ValueError(f"kind must be a windowed denoising kind, got {kind}")
    if config.window.steps < 2:
        raise ValueError("windowed kinds need k_back + k_fwd >= 1")
    _require_clean(clean, "train_edae")
    norm = fit_norm(clean.values)
    data = norm.apply(clean.values)
    targets = window_matrix(data, config.window)
    rng = SplitMix64(config.seed)

    def make_epoch(epoch_rng):
        flags = _fresh_mask(epoch_rng, data.shape, config.rho_train)
        filled = fill_nearest_mean(data, flags)
        return window_matrix(filled, config.window), targets

    if kind is ModelKind.EDAE_NN:
        dim = config.window.expanded_dim(clean.channels)
        params, final_loss = _train_dense_autoencoder(make_epoch, dim, dim, config, rng)
    else:
        params, final_loss = _train_lstm_autoencoder(
            make_epoch, clean.channels, config.window, config, rng
        )
    return TrainedModel(
        kind,
        params,
        norm,
        config.window,
        clean.channel_names,
        _metadata(config, final_loss, rho_train=config.rho_train),
    )


def baseline_im(corrupted: CorruptedSeries) -> TrainedModel:
    """The parameterless interpolation baseline; nothing to fit."""
    if not isinstance(corrupted, CorruptedSeries):
        raise ValueError("baseline_im takes the CorruptedSeries it will later fill")
    return TrainedModel(
        ModelKind.IM,
        None,
        None,
        WindowConfig(0, 0),
        corrupted.series.channel_names,
        {"final_loss": None, "seed": None, "epochs": 0},
    )


def baseline_elm(clean: TimeSeries, config: TrainConfig) -> TrainedModel:
    """Fit the extreme-learning-machine baseline in closed form.

    One corruption draw, nearest-mean fill, window expansion with the center
    channel block removed; a frozen random sigmoid layer maps the context
    features to H units and ridge-regularized normal equations give the
    readout onto the clean center vector.
    """
    if config.window.steps < 2:
        raise ValueError("the context regression needs k_back + k_fwd >= 1")
    _require_clean(clean, "baseline_elm")
    norm = fit_norm(clean.values)
    data = norm.apply(clean.values)
    rng = SplitMix64(config.seed)
    flags = _fresh_mask(rng, data.shape, config.rho_train)
    filled = fill_nearest_mean(data, flags)
    windows = window_matrix(filled, config.window)
    center = config.window.k_back * clean.channels
    features = np.delete(windows, np.s_[center:center + clean.channels], axis=1)
    hidden_W = glorot_uniform(config.elm_hidden, features.shape[1], rng)
    hidden_b = rng.uniforms(config.elm_hidden) * 2.0 - 1.0
    hidden = sigmoid(features @ hidden_W.T + hidden_b)
    gram = hidden.T @ hidden + config.elm_ridge * np.eye(config.elm_hidden)
    moment = hidden.T @ data
    try:
        out_W = np.linalg.solve(gram, moment)
    except np.linalg.LinAlgError as exc:
        raise NumericFailureError(f"normal equations unsolvable: {exc}") from exc
    residual = np.linalg.norm(gram @ out_W - moment) / max(np.linalg.norm(moment), 1e-300)
    params = ElmParams(hidden_W, hidden_b, out_W, config.elm_ridge)
    meta = _metadata(config, float(np.mean((hidden @ out_W - data) ** 2)),
                     rho_train=config.rho_train)
    meta["normal_eq_residual"] = float(residual)
    return TrainedModel(
        ModelKind.ELM, params, norm, config.window, clean.channel_names, meta
    )


def _metadata(config: TrainConfig, final_loss, rho_train) -> dict:
    return {
        "final_loss": None if final_loss is None else float(final_loss),
        "seed": config.seed,
        "epochs": config.epochs,
        "rho_train": float(rho_train),
    }


def train_model(kind: ModelKind, clean_or_corrupted, config: TrainConfig) -> TrainedModel:
    """Kind-dispatching convenience. AE and IM take a CorruptedSeries, the
    denoising kinds and ELM take the clean TimeSeries."""
    if kind is ModelKind.AE:
        return train_ae(clean_or_corrupted, config)
    if kind is ModelKind.DAE:
        return train_dae(clean_or_corrupted, config)
    if kind in (ModelKind.EDAE_NN, ModelKind.EDAE_LSTM):
        return train_edae(clean_or_corrupted, config, kind)
    if kind is ModelKind.IM:
        return baseline_im(clean_or_corrupted)
    if kind is ModelKind.ELM:
        return baseline_elm(clean_or_corrupted, config)
    raise ValueError(f"unknown model kind {kind!r}")


# ---------------------------------------------------------------------------
# Reconstruction


def _model_outputs(model: TrainedModel, corrupted: CorruptedSeries) -> np.ndarray:
    """Raw-scale model estimate for every entry of the grid."""
    values = corrupted.series.values
    flags = corrupted.mask.flags
    if model.kind is ModelKind.IM:
        return fill_nearest_mean(values, flags)
    data = model.norm.apply(values)
    if model.kind in (ModelKind.AE, ModelKind.DAE):
        hidden, _ = dense_forward(model.params.encoder, data)
        out, _ = dense_forward(model.params.decoder, hidden)
        return model.norm.invert(out)
    filled = fill_nearest_mean(data, flags)
    windows = window_matrix(filled, model.window)
    center = model.window.k_back * model.channels
    if model.kind is ModelKind.ELM:
        features = np.delete(windows, np.s_[center:center + model.channels], axis=1)
        hidden = sigmoid(features @ model.params.hidden_W.T + model.params.hidden_b)
        return model.norm.invert(hidden @ model.params.out_W)
    if model.kind is ModelKind.EDAE_NN:
        hidden, _ = dense_forward(model.params.encoder, windows)
        out, _ = dense_forward(model.params.decoder, hidden)
    else:
        steps = model.window.steps
        xs = windows.reshape(windows.shape[0], steps, model.channels).transpose(1, 0, 2)
        ys, _, _ = lstm_forward(model.params, xs)
        out = ys[-1]
    return model.norm.invert(out[:, center:center + model.channels])


def reconstruct(model: TrainedModel, corrupted: CorruptedSeries) -> TimeSeries:
    """Replace exactly the masked entries with the model's estimates.

    Observed entries pass through verbatim; with an empty mask the output
    equals the input series.
    """
    if corrupted.series.channels != model.channels:
        raise ValueError(
            f"model fits {model.channels} channels, series has {corrupted.series.channels}"
        )
    values = corrupted.series.values.copy()
    flags = corrupted.mask.flags
    if not flags.any():
        return corrupted.series.with_values(values)
    estimates = _model_outputs(model, corrupted)
    values[flags] = estimates[flags]
    return corrupted.series.with_values(values)


# ---------------------------------------------------------------------------
# Serialization

MODEL_MAGIC = b"TSRM"
MODEL_FORMAT_VERSION = 1


def _array_manifest(model: TrainedModel) -> list:
    if model.params is None:
        return []
    return [(name, arr) for name, arr in model.params.named_arrays().items()]


def _header_dict(model: TrainedModel, manifest) -> dict:
    header = {
        "kind": model.kind.value,
        "channel_names": list(model.channel_names),
        "window": {"k_back": model.window.k_back, "k_fwd": model.window.k_fwd},
        "norm": None if model.norm is None else {
            "mins": [float(v) for v in model.norm.mins],
            "spans": [float(v) for v in model.norm.spans],
        },
        "arrays": [{"name": name, "shape": list(arr.shape)} for name, arr in manifest],
        "metadata": model.metadata,
        "extra": {},
    }
    if isinstance(model.params, AutoencoderParams):
        header["extra"] = {
            "encoder_activation": model.params.encoder.activation,
            "decoder_activation": model.params.decoder.activation,
        }
    elif isinstance(model.params, LstmParams):
        header["extra"] = {"diag_peepholes": bool(model.params.diag_peepholes)}
    elif isinstance(model.params, ElmParams):
        header["extra"] = {"ridge": float(model.params.ridge)}
    return header


def model_to_bytes(model: TrainedModel) -> bytes:
    """Container layout (all integers little-endian):

    * bytes 0-3: magic ``TSRM``
    * bytes 4-7: u32 format version (currently 1)
    * bytes 8-15: u64 byte length of the JSON header
    * the UTF-8 JSON header (sorted keys)
    * the arrays listed in header["arrays"], in that order, each float64
      little-endian, C row-major, no padding
    """
    manifest = _array_manifest(model)
    header = json.dumps(_header_dict(model, manifest), sort_keys=True).encode("utf-8")
    chunks = [MODEL_MAGIC, struct.pack("<I", MODEL_FORMAT_VERSION),
              struct.pack("<Q", len(header)), header]
    for _, arr in manifest:
        chunks.append(np.ascontiguousarray(arr, dtype="<f8").tobytes())
    return b"".join(chunks)


def save_model(path, model: TrainedModel) -> None:
    atomic_write_bytes(path, model_to_bytes(model))


def _take(buf: memoryview, offset: int, size: int, what: str):
    if offset + size > len(buf):
        raise CorruptModelFileError(
            f"truncated model file: needed {size} bytes for {what} at offset {offset}"
        )
    return buf[offset:offset + size], offset + size


def model_from_bytes(payload: bytes) -> TrainedModel:
    buf = memoryview(payload)
    raw, offset = _take(buf, 0, 4, "magic")
    if bytes(raw) != MODEL_MAGIC:
        raise CorruptModelFileError(f"bad magic {bytes(raw)!r}, not a model file")
    raw, offset = _take(buf, offset, 4, "version")
    version = struct.unpack("<I", raw)[0]
    if version != MODEL_FORMAT_VERSION:
        raise ModelVersionError(
            f"model format version {version} unsupported (this build reads "
            f"{MODEL_FORMAT_VERSION})"
        )
    raw, offset = _take(buf, offset, 8, "header length")
    header_len = struct.unpack("<Q", raw)[0]
    raw, offset = _take(buf, offset, header_len, "header")
    try:
        header = json.loads(bytes(raw).decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CorruptModelFileError(f"unreadable header: {exc}") from exc
    try:
        kind = ModelKind(header["kind"])
        names = tuple(header["channel_names"])
        window = WindowConfig(int(header["window"]["k_back"]), int(header["window"]["k_fwd"]))
        norm_spec = header["norm"]
        manifest = [(a["name"], tuple(int(s) for s in a["shape"])) for a in header["arrays"]]
        extra = header["extra"]
        metadata = header["metadata"]
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptModelFileError(f"malformed header: {exc}") from exc
    norm = None
    if norm_spec is not None:
        try:
            norm = NormParams(np.asarray(norm_spec["mins"]), np.asarray(norm_spec["spans"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise CorruptModelFileError(f"malformed normalization block: {exc}") from exc
    arrays = {}
    for name, shape in manifest:
        count = int(np.prod(shape, dtype=np.int64)) if shape else 1
        raw, offset = _take(buf, offset, 8 * count, f"array {name}")
        arrays[name] = np.frombuffer(raw, dtype="<f8").reshape(shape).astype(np.float64)
    if offset != len(buf):
        raise ModelShapeError(
            f"{len(buf) - offset} trailing bytes after the declared arrays"
        )
    try:
        params = _params_from_arrays(kind, arrays, extra)
    except (KeyError, ValueError) as exc:
        raise ModelShapeError(f"array block does not assemble a {kind.value}: {exc}") from exc
    return TrainedModel(kind, params, norm, window, names, dict(metadata))


def _params_from_arrays(kind: ModelKind, arrays: dict, extra: dict):
    if kind is ModelKind.IM:
        if arrays:
            raise ValueError("interpolation model carries no arrays")
        return None
    if kind in (ModelKind.AE, ModelKind.DAE, ModelKind.EDAE_NN):
        return AutoencoderParams(
            DenseParams(arrays["encoder.W"], arrays["encoder.b"],
                        str(extra.get("encoder_activation", "sigmoid"))),
            DenseParams(arrays["decoder.W"], arrays["decoder.b"],
                        str(extra.get("decoder_activation", "identity"))),
        )
    if kind is ModelKind.EDAE_LSTM:
        fields = {name: arrays[name] for name in LstmParams.FIELD_ORDER}
        return LstmParams(**fields, diag_peepholes=bool(extra.get("diag_peepholes", False)))
    if kind is ModelKind.ELM:
        return ElmParams(arrays["hidden.W"], arrays["hidden.b"], arrays["out.W"],
                         float(extra.get("ridge", 1e-6)))
    raise ValueError(f"unhandled kind {kind}")


def load_model(path) -> TrainedModel:
    with open(path, "rb") as fh:
        payload = fh.read()
    return model_from_bytes(payload)
