"""Dense and recurrent network kernels with hand-written gradients.

Everything is float64 numpy. Parameters live in small mutable dataclasses;
``named_arrays`` flattens them to an ordered {name: array} view that the
optimizer and the serializer share, so updates address parameters uniformly.

Each forward function returns a cache of intermediates; the matching
backward function consumes it and returns gradients under the same names as
``named_arrays``, verified against central finite differences in the tests.

The recurrent cell is an LSTM with peephole connections: both gates that
close over the cell state see it through full (not diagonal) square
matrices, the input and forget gates reading the previous cell state and
the output gate the just-updated one. The readout is an affine map of the
final hidden state.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .rng import SplitMix64

ACTIVATIONS = ("sigmoid", "tanh", "identity")


def sigmoid(x: np.ndarray) -> np.ndarray:
    # exp overflow for very negative inputs saturates to 0, which is the
    # correct limit; silence the spurious warning.
    with np.errstate(over="ignore"):
        return 1.0 / (1.0 + np.exp(-x))


def _apply_activation(name: str, pre: np.ndarray) -> np.ndarray:
    if name == "sigmoid":
        return sigmoid(pre)
    if name == "tanh":
        return np.tanh(pre)
    if name == "identity":
        return pre
    raise ValueError(f"unknown activation {name!r}, expected one of {ACTIVATIONS}")


def _activation_grad(name: str, out: np.ndarray) -> np.ndarray:
    # Derivative expressed through the activation's own output.
    if name == "sigmoid":
        return out * (1.0 - out)
    if name == "tanh":
        return 1.0 - out * out
    if name == "identity":
        return np.ones_like(out)
    raise ValueError(f"unknown activation {name!r}, expected one of {ACTIVATIONS}")


@dataclass
class DenseParams:
    """One affine layer with an elementwise activation. W is (out, in)."""

    W: np.ndarray
    b: np.ndarray
    activation: str = "sigmoid"

    def __post_init__(self):
        self.W = np.asarray(self.W, dtype=np.float64)
        self.b = np.asarray(self.b, dtype=np.float64)
        if self.W.ndim != 2 or self.b.shape != (self.W.shape[0],):
            raise ValueError(
                f"W must be (out, in) with b (out,), got {self.W.shape} and {self.b.shape}"
            )
        if self.activation not in ACTIVATIONS:
            raise ValueError(
                f"unknown activation {self.activation!r}, expected one of {ACTIVATIONS}"
            )

    @property
    def n_in(self) -> int:
        return self.W.shape[1]

    @property
    def n_out(self) -> int:
        return self.W.shape[0]

    def named_arrays(self) -> dict:
        return {"W": self.W, "b": self.b}


def glorot_uniform(n_out: int, n_in: int, rng: SplitMix64) -> np.ndarray:
    """Uniform init on +-sqrt(6/(fan_in+fan_out)), row-major draw order."""
    bound = math.sqrt(6.0 / (n_in + n_out))
    return (rng.uniforms(n_out * n_in) * 2.0 - 1.0).reshape(n_out, n_in) * bound


def init_dense(n_in: int, n_out: int, activation: str, rng: SplitMix64) -> DenseParams:
    if n_in < 1 or n_out < 1:
        raise ValueError(f"layer sizes must be positive, got {n_in}->{n_out}")
    return DenseParams(glorot_uniform(n_out, n_in, rng), np.zeros(n_out), activation)


def dense_forward(params: DenseParams, x: np.ndarray):
    """Returns (output, cache). x is a vector (n_in,) or a batch (B, n_in)."""
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    xb = x[np.newaxis, :] if single else x
    if xb.ndim != 2 or xb.shape[1] != params.n_in:
        raise ValueError(f"input shape {x.shape} does not feed a {params.n_in}-wide layer")
    out = _apply_activation(params.activation, xb @ params.W.T + params.b)
    cache = {"x": xb, "out": out, "single": single}
    return (out[0] if single else out, cache)


def backward_dense(params: DenseParams, cache: dict, d_out: np.ndarray):
    """Gradients for one dense layer.

    ``d_out`` is dLoss/d(output), shaped like the forward output. Returns
    (grads, d_x) with grads keyed like named_arrays.
    """
    d_out = np.asarray(d_out, dtype=np.float64)
    if cache["single"]:
        d_out = d_out[np.newaxis, :]
    da = d_out * _activation_grad(params.activation, cache["out"])
    grads = {"W": da.T @ cache["x"], "b": da.sum(axis=0)}
    d_x = da @ params.W
    return grads, (d_x[0] if cache["single"] else d_x)


# ---------------------------------------------------------------------------
# Peephole LSTM


@dataclass
class LstmParams:
    """Peephole LSTM weights plus the affine readout of the final state.

    Gate pre-activations (per step n, prev hidden m, prev cell c):
      input   a_i = W_ix x + W_im m + W_ic c      + b_i
      forget  a_f = W_fx x + W_fm m + W_fc c      + b_f
      cand    a_g = W_cx x + W_cm m               + b_c
      cell    c'  = sigmoid(a_f) * c + sigmoid(a_i) * tanh(a_g)
      output  a_o = W_ox x + W_om m + W_oc c'     + b_o
      hidden  m'  = sigmoid(a_o) * tanh(c')
    Readout (after the last step): y = W_ym m' + b_y.

    The peephole matrices W_ic, W_fc, W_oc are square (hidden x hidden); with
    ``diag_peepholes`` their off-diagonal entries are held at zero, giving the
    cheaper per-unit peephole variant.
    """

    W_ix: np.ndarray
    W_im: np.ndarray
    W_ic: np.ndarray
    b_i: np.ndarray
    W_fx: np.ndarray
    W_fm: np.ndarray
    W_fc: np.ndarray
    b_f: np.ndarray
    W_cx: np.ndarray
    W_cm: np.ndarray
    b_c: np.ndarray
    W_ox: np.ndarray
    W_om: np.ndarray
    W_oc: np.ndarray
    b_o: np.ndarray
    W_ym: np.ndarray
    b_y: np.ndarray
    diag_peepholes: bool = False

    FIELD_ORDER = (
        "W_ix", "W_im", "W_ic", "b_i",
        "W_fx", "W_fm", "W_fc", "b_f",
        "W_cx", "W_cm", "b_c",
        "W_ox", "W_om", "W_oc", "b_o",
        "W_ym", "b_y",
    )

    def __post_init__(self):
        for name in self.FIELD_ORDER:
            setattr(self, name, np.asarray(getattr(self, name), dtype=np.float64))
        h, d = self.W_ix.shape
        o = self.W_ym.shape[0]
        expect = {
            "W_ix": (h, d), "W_im": (h, h), "W_ic": (h, h), "b_i": (h,),
            "W_fx": (h, d), "W_fm": (h, h), "W_fc": (h, h), "b_f": (h,),
            "W_cx": (h, d), "W_cm": (h, h), "b_c": (h,),
            "W_ox": (h, d), "W_om": (h, h), "W_oc": (h, h), "b_o": (h,),
            "W_ym": (o, h), "b_y": (o,),
        }
        for name, shape in expect.items():
            got = getattr(self, name).shape
            if got != shape:
                raise ValueError(f"{name} must have shape {shape}, got {got}")

    @property
    def n_in(self) -> int:
        return self.W_ix.shape[1]

    @property
    def n_hidden(self) -> int:
        return self.W_ix.shape[0]

    @property
    def n_out(self) -> int:
        return self.W_ym.shape[0]

    def named_arrays(self) -> dict:
        return {name: getattr(self, name) for name in self.FIELD_ORDER}


@dataclass
class LstmState:
    """Recurrent state between steps: hidden vector m, cell vector c."""

    m: np.ndarray
    c: np.ndarray

    @classmethod
    def zeros(cls, batch: int, hidden: int) -> "LstmState":
        return cls(np.zeros((batch, hidden)), np.zeros((batch, hidden)))


def init_lstm(
    n_in: int,
    n_hidden: int,
    n_out: int,
    rng: SplitMix64,
    diag_peepholes: bool = False,
) -> LstmParams:
    """Glorot-uniform matrices in declaration order, zero biases except the
    forget bias at 1 (gates start open so gradients flow from step one)."""
    if min(n_in, n_hidden, n_out) < 1:
        raise ValueError(
            f"sizes must be positive, got in={n_in}, hidden={n_hidden}, out={n_out}"
        )
    shapes = {
        "W_ix": (n_hidden, n_in), "W_im": (n_hidden, n_hidden), "W_ic": (n_hidden, n_hidden),
        "W_fx": (n_hidden, n_in), "W_fm": (n_hidden, n_hidden), "W_fc": (n_hidden, n_hidden),
        "W_cx": (n_hidden, n_in), "W_cm": (n_hidden, n_hidden),
        "W_ox": (n_hidden, n_in), "W_om": (n_hidden, n_hidden), "W_oc": (n_hidden, n_hidden),
        "W_ym": (n_out, n_hidden),
    }
    arrays = {}
    for name in LstmParams.FIELD_ORDER:
        if name in shapes:
            rows, cols = shapes[name]
            arrays[name] = glorot_uniform(rows, cols, rng)
        else:
            size = n_out if name == "b_y" else n_hidden
            arrays[name] = np.zeros(size)
    arrays["b_f"] = np.ones(n_hidden)
    params = LstmParams(**arrays, diag_peepholes=diag_peepholes)
    if diag_peepholes:
        for name in ("W_ic", "W_fc", "W_oc"):
            arr = getattr(params, name)
            setattr(params, name, np.diag(np.diag(arr)))
    return params


def lstm_step(params: LstmParams, x: np.ndarray, state: LstmState):
    """One recurrence step. x is (B, n_in); returns (new state, readout y)."""
    x = np.asarray(x, dtype=np.float64)
    m_prev, c_prev = state.m, state.c
    gate_i = sigmoid(x @ params.W_ix.T + m_prev @ params.W_im.T + c_prev @ params.W_ic.T + params.b_i)
    gate_f = sigmoid(x @ params.W_fx.T + m_prev @ params.W_fm.T + c_prev @ params.W_fc.T + params.b_f)
    cand = np.tanh(x @ params.W_cx.T + m_prev @ params.W_cm.T + params.b_c)
    c_new = gate_f * c_prev + gate_i * cand
    gate_o = sigmoid(x @ params.W_ox.T + m_prev @ params.W_om.T + c_new @ params.W_oc.T + params.b_o)
    tanh_c = np.tanh(c_new)
    m_new = gate_o * tanh_c
    y = m_new @ params.W_ym.T + params.b_y
    step_cache = {
        "x": x, "m_prev": m_prev, "c_prev": c_prev,
        "i": gate_i, "f": gate_f, "g": cand, "o": gate_o,
        "c": c_new, "tanh_c": tanh_c, "m": m_new,
    }
    return LstmState(m_new, c_new), y, step_cache


def lstm_forward(params: LstmParams, xs: np.ndarray):
    """Run a whole sequence from zero state.

    xs is (S, B, n_in) or (S, n_in) for batch size 1. Returns
    (ys, final_state, cache) with ys (S, B, n_out) (or (S, n_out) matching
    the input convention).
    """
    xs = np.asarray(xs, dtype=np.float64)
    single = xs.ndim == 2
    if single:
        xs = xs[:, np.newaxis, :]
    if xs.ndim != 3 or xs.shape[2] != params.n_in:
        raise ValueError(f"xs shape {xs.shape} does not feed a {params.n_in}-wide cell")
    steps, batch = xs.shape[0], xs.shape[1]
    if steps < 1:
        raise ValueError("sequence must have at least one step")
    state = LstmState.zeros(batch, params.n_hidden)
    ys = np.empty((steps, batch, params.n_out))
    step_caches = []
    for n in range(steps):
        state, y, step_cache = lstm_step(params, xs[n], state)
        ys[n] = y
        step_caches.append(step_cache)
    cache = {"steps": step_caches, "single": single}
    return (ys[:, 0, :] if single else ys), state, cache


def backward_lstm(params: LstmParams, cache: dict, d_ys: np.ndarray) -> dict:
    """Backprop through time for the whole sequence.

    ``d_ys`` is dLoss/d(readout) per step, shaped like the forward ys (zero
    rows for steps whose readout the loss ignores). Returns gradients keyed
    like named_arrays. Order matters on the way back: the output gate is
    resolved first because its peephole looks at the updated cell, then the
    cell path closes over the input/forget peepholes into the previous step.
    """
    d_ys = np.asarray(d_ys, dtype=np.float64)
    if cache["single"]:
        d_ys = d_ys[:, np.newaxis, :]
    steps = cache["steps"]
    if d_ys.shape[0] != len(steps):
        raise ValueError(f"d_ys has {d_ys.shape[0]} steps, forward ran {len(steps)}")
    grads = {name: np.zeros_like(arr) for name, arr in params.named_arrays().items()}
    batch = steps[0]["x"].shape[0]
    d_m = np.zeros((batch, params.n_hidden))
    d_c = np.zeros((batch, params.n_hidden))
    for n in reversed(range(len(steps))):
        s = steps[n]
        d_y = d_ys[n]
        grads["W_ym"] += d_y.T @ s["m"]
        grads["b_y"] += d_y.sum(axis=0)
        d_m = d_m + d_y @ params.W_ym

        d_gate_o = d_m * s["tanh_c"] * s["o"] * (1.0 - s["o"])
        grads["W_ox"] += d_gate_o.T @ s["x"]
        grads["W_om"] += d_gate_o.T @ s["m_prev"]
        grads["W_oc"] += d_gate_o.T @ s["c"]
        grads["b_o"] += d_gate_o.sum(axis=0)

        d_c = d_c + d_m * s["o"] * (1.0 - s["tanh_c"] ** 2) + d_gate_o @ params.W_oc

        d_gate_i = d_c * s["g"] * s["i"] * (1.0 - s["i"])
        d_gate_f = d_c * s["c_prev"] * s["f"] * (1.0 - s["f"])
        d_cand = d_c * s["i"] * (1.0 - s["g"] ** 2)

        grads["W_ix"] += d_gate_i.T @ s["x"]
        grads["W_im"] += d_gate_i.T @ s["m_prev"]
        grads["W_ic"] += d_gate_i.T @ s["c_prev"]
        grads["b_i"] += d_gate_i.sum(axis=0)
        grads["W_fx"] += d_gate_f.T @ s["x"]
        grads["W_fm"] += d_gate_f.T @ s["m_prev"]
        grads["W_fc"] += d_gate_f.T @ s["c_prev"]
        grads["b_f"] += d_gate_f.sum(axis=0)
        grads["W_cx"] += d_cand.T @ s["x"]
        grads["W_cm"] += d_cand.T @ s["m_prev"]
        grads["b_c"] += d_cand.sum(axis=0)

        d_m = d_gate_i @ params.W_im + d_gate_f @ params.W_fm \
            + d_cand @ params.W_cm + d_gate_o @ params.W_om
        d_c = d_c * s["f"] + d_gate_i @ params.W_ic + d_gate_f @ params.W_fc
    if params.diag_peepholes:
        # Project onto the constraint set so constrained entries never move.
        for name in ("W_ic", "W_fc", "W_oc"):
            grads[name] = np.diag(np.diag(grads[name]))
    return grads


# ---------------------------------------------------------------------------
# Losses


def reconstruction_loss(target: np.ndarray, output: np.ndarray):
    """Mean squared entrywise error and its gradient w.r.t. the output."""
    target = np.asarray(target, dtype=np.float64)
    output = np.asarray(output, dtype=np.float64)
    if target.shape != output.shape:
        raise ValueError(f"shape mismatch: target {target.shape}, output {output.shape}")
    diff = output - target
    loss = float(np.mean(diff * diff))
    grad = (2.0 / diff.size) * diff
    return loss, grad


@dataclass(frozen=True)
class LossConfig:
    """Reconstruction loss plus an optional KL activity penalty on sigmoid
    hidden units (weight 0 disables it)."""

    sparsity_weight: float = 1e-3
    sparsity_target: float = 0.05

    def __post_init__(self):
        if not self.sparsity_weight >= 0:
            raise ValueError(f"sparsity_weight must be >= 0, got {self.sparsity_weight}")
        if not 0.0 < self.sparsity_target < 1.0:
            raise ValueError(
                f"sparsity_target must be inside (0, 1), got {self.sparsity_target}"
            )


_RHO_CLIP = 1e-6


def sparsity_penalty(hidden: np.ndarray, config: LossConfig):
    """KL(target || batch mean activation) summed over hidden units, scaled
    by the weight; returns (penalty, gradient w.r.t. hidden).

    Batch means are clipped away from {0, 1} so the penalty stays finite;
    clipped units get zero gradient (they sit on the clamp, not the curve).
    """
    hidden = np.asarray(hidden, dtype=np.float64)
    if hidden.ndim != 2:
        raise ValueError(f"hidden must be (batch, units), got shape {hidden.shape}")
    if config.sparsity_weight == 0.0:
        return 0.0, np.zeros_like(hidden)
    batch = hidden.shape[0]
    rho = config.sparsity_target
    rho_hat_raw = hidden.mean(axis=0)
    rho_hat = np.clip(rho_hat_raw, _RHO_CLIP, 1.0 - _RHO_CLIP)
    kl = rho * np.log(rho / rho_hat) + (1.0 - rho) * np.log((1.0 - rho) / (1.0 - rho_hat))
    penalty = float(config.sparsity_weight * kl.sum())
    d_rho_hat = config.sparsity_weight * (-rho / rho_hat + (1.0 - rho) / (1.0 - rho_hat))
    d_rho_hat = np.where(rho_hat == rho_hat_raw, d_rho_hat, 0.0)
    grad = np.broadcast_to(d_rho_hat / batch, hidden.shape).copy()
    return penalty, grad


# ---------------------------------------------------------------------------
# Optimizer


@dataclass
class OptimizerState:
    """Adam with bias correction; moments are allocated on first use."""

    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    m: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise ValueError(f"learning_rate must be positive, got {self.learning_rate}")
        if not (0.0 <= self.beta1 < 1.0 and 0.0 <= self.beta2 < 1.0):
            raise ValueError("decay rates must be in [0, 1)")
        if not self.eps > 0:
            raise ValueError(f"eps must be positive, got {self.eps}")


def optimizer_step(state: OptimizerState, arrays: dict, grads: dict) -> None:
    """One Adam update, in place, over every named array."""
    if set(arrays) != set(grads):
        raise ValueError(
            f"parameter/gradient name mismatch: {sorted(set(arrays) ^ set(grads))}"
        )
    state.step += 1
    correction1 = 1.0 - state.beta1 ** state.step
    correction2 = 1.0 - state.beta2 ** state.step
    for name, arr in arrays.items():
        g = grads[name]
        if g.shape != arr.shape:
            raise ValueError(f"gradient {name} shape {g.shape} != param {arr.shape}")
        if name not in state.m:
            state.m[name] = np.zeros_like(arr)
            state.v[name] = np.zeros_like(arr)
        m = state.m[name]
        v = state.v[name]
        m += (1.0 - state.beta1) * (g - m)
        v += (1.0 - state.beta2) * (g * g - v)
        arr -= state.learning_rate * (m / correction1) / (
            np.sqrt(v / correction2) + state.eps
        )


# ---------------------------------------------------------------------------
# Gradient verification


def finite_difference_gradients(loss_fn, arrays: dict, step: float = 1e-5) -> dict:
    """Central-difference dLoss/dArray for every entry of every named array.

    ``loss_fn`` takes no arguments and reads the arrays in place; entries are
    perturbed and restored one at a time. Meant for small parameter sets.
    """
    out = {}
    for name, arr in arrays.items():
        grad = np.zeros_like(arr)
        flat = arr.reshape(-1)
        gflat = grad.reshape(-1)
        for j in range(flat.size):
            keep = flat[j]
            flat[j] = keep + step
            hi = loss_fn()
            flat[j] = keep - step
            lo = loss_fn()
            flat[j] = keep
            gflat[j] = (hi - lo) / (2.0 * step)
        out[name] = grad
    return out


def max_relative_error(analytic: dict, numeric: dict, floor: float = 1e-8) -> float:
    """Worst entrywise |a-n| / max(|a|, |n|, floor) across all named arrays."""
    worst = 0.0
    for name in analytic:
        a = analytic[name]
        n = numeric[name]
        denom = np.maximum(np.maximum(np.abs(a), np.abs(n)), floor)
        worst = max(worst, float(np.max(np.abs(a - n) / denom)))
    return worst
