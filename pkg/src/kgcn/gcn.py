"""
Graph convolutional network
---------------------------

Each layer computes ``Z' = act(Z @ theta0 + L @ Z @ theta1)`` with ``L`` the
normalized Laplacian. Hidden layers use ReLU, the last layer a sigmoid, so the
single output channel is a per-node likelihood. The input is the node weight
vector as an ``n x 1`` feature matrix. There are no bias terms.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .errors import FormatError, ParameterError
from .graph import normalized_laplacian

MODEL_FORMAT = "kgcn-model"
MODEL_VERSION = 1
DEFAULT_DIMS = (1, 32, 1)
INIT_SCHEME = "uniform-fan-avg"


@dataclass(eq=False)
class GcnModel:
    theta0: list
    theta1: list
    init: str = INIT_SCHEME
    seed: int | None = None

    def __post_init__(self):
        if len(self.theta0) != len(self.theta1) or not self.theta0:
            raise ParameterError("model needs at least one layer with a theta0/theta1 pair")
        self.theta0 = [np.array(t, dtype=np.float64) for t in self.theta0]
        self.theta1 = [np.array(t, dtype=np.float64) for t in self.theta1]
        dims = [self.theta0[0].shape[0]]
        for t0, t1 in zip(self.theta0, self.theta1):
            if t0.ndim != 2 or t0.shape != t1.shape or t0.shape[0] != dims[-1]:
                raise ParameterError(f"layer shapes do not chain: {t0.shape}, {t1.shape} after {dims}")
            dims.append(t0.shape[1])
        if not all(np.isfinite(t).all() for t in self.parameters()):
            raise ParameterError("model parameters must be finite")

    @property
    def dims(self):
        return (self.theta0[0].shape[0],) + tuple(t.shape[1] for t in self.theta0)

    @property
    def n_layers(self):
        return len(self.theta0)

    def parameters(self):
        """Flat list of parameter arrays (theta0 and theta1 interleaved per layer)."""
        out = []
        for t0, t1 in zip(self.theta0, self.theta1):
            out += [t0, t1]
        return out

    def copy(self):
        return GcnModel([t.copy() for t in self.theta0], [t.copy() for t in self.theta1],
                        init=self.init, seed=self.seed)

    @classmethod
    def zeros(cls, dims=DEFAULT_DIMS):
        shapes = list(zip(dims[:-1], dims[1:]))
        return cls([np.zeros(s) for s in shapes], [np.zeros(s) for s in shapes], init="zeros")


def init_model(dims=DEFAULT_DIMS, rng=None, seed=None):
    """Random model with entries uniform on ``[-a, a]``, ``a = sqrt(6 / (fan_in + fan_out))``.

    Pass either a numpy ``Generator`` or an integer ``seed``.
    """
    dims = tuple(int(d) for d in dims)
    if len(dims) < 2:
        raise ParameterError(f"need at least two channel sizes, got {dims}")
    if dims[0] != 1:
        raise ParameterError(f"input channel count must be 1 (node weight), got {dims[0]}")
    if any(d < 1 for d in dims):
        raise ParameterError(f"channel sizes must be positive, got {dims}")
    if rng is None:
        rng = np.random.default_rng(seed)
    theta0, theta1 = [], []
    for c_in, c_out in zip(dims[:-1], dims[1:]):
        a = np.sqrt(6.0 / (c_in + c_out))
        theta0.append(rng.uniform(-a, a, (c_in, c_out)))
        theta1.append(rng.uniform(-a, a, (c_in, c_out)))
    return GcnModel(theta0, theta1, seed=seed)


@dataclass
class ForwardTrace:
    laplacian: np.ndarray
    inputs: list      # Z^l fed to each layer
    propagated: list  # L @ Z^l
    pre: list         # pre-activations
    dims: tuple


def forward(model, g, laplacian=None, weights=None):
    """Likelihoods ``pi`` (length n, in (0, 1)) and the trace needed for gradients.

    ``weights`` replaces ``g.weights`` as the input feature when given.
    """
    lap = normalized_laplacian(g) if laplacian is None else laplacian
    w = g.weights if weights is None else np.asarray(weights, dtype=np.float64)
    z = w[:, None]
    inputs, propagated, pre = [], [], []
    last = model.n_layers - 1
    for i, (t0, t1) in enumerate(zip(model.theta0, model.theta1)):
        lz = lap @ z
        h = z @ t0 + lz @ t1
        inputs.append(z)
        propagated.append(lz)
        pre.append(h)
        z = expit(h) if i == last else np.maximum(h, 0.0)
    return z[:, 0].copy(), ForwardTrace(lap, inputs, propagated, pre, model.dims)


def gradients(model, g, dcost_dpi, trace):
    """Reverse-mode gradients of a scalar cost given its partials w.r.t. ``pi``.

    Returns ``(grad_theta0, grad_theta1)``, lists matching the model's layers.
    The ReLU derivative at exactly 0 is taken as 0.
    """
    if trace.dims != model.dims or len(trace.inputs) != model.n_layers:
        raise ParameterError(f"trace dims {trace.dims} do not match model dims {model.dims}")
    if trace.inputs[0].shape[0] != g.n:
        raise ParameterError("trace was produced for a graph of different size")
    dpi = np.asarray(dcost_dpi, dtype=np.float64)
    if dpi.shape != (g.n,):
        raise ParameterError(f"dcost_dpi must have length {g.n}, got shape {dpi.shape}")
    lap = trace.laplacian
    g0 = [None] * model.n_layers
    g1 = [None] * model.n_layers
    last = model.n_layers - 1
    dz = dpi[:, None]
    for i in range(last, -1, -1):
        h = trace.pre[i]
        if i == last:
            s = expit(h)
            dh = dz * s * (1.0 - s)
        else:
            dh = dz * (h > 0)
        g0[i] = trace.inputs[i].T @ dh
        g1[i] = trace.propagated[i].T @ dh
        if i > 0:
            # L is symmetric, so L^T dh == L dh
            dz = dh @ model.theta0[i].T + lap @ (dh @ model.theta1[i].T)
    return g0, g1


# -- model files -----------------------------------------------------------

def _fmt(x):
    return format(float(x), ".17g")


def save_model(model, path):
    lines = [
        f"{MODEL_FORMAT} {MODEL_VERSION}",
        "dims " + " ".join(str(d) for d in model.dims),
        f"init {model.init}",
        f"seed {'none' if model.seed is None else model.seed}",
    ]
    for i, (t0, t1) in enumerate(zip(model.theta0, model.theta1)):
        for name, t in (("theta0", t0), ("theta1", t1)):
            lines.append(f"param {i} {name} {t.shape[0]} {t.shape[1]}")
            for row in t:
                lines.append(" ".join(_fmt(x) for x in row))
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("\n".join(lines) + "\n")


def load_model(path):
    with open(path, encoding="utf-8") as f:
        lines = [ln.rstrip("\n") for ln in f]
    it = iter(enumerate(lines, 1))

    def take(field):
        try:
            lineno, line = next(it)
        except StopIteration:
            raise FormatError(f"{path}: file truncated, expected '{field}'") from None
        return lineno, line.split()

    _, head = take("header")
    if len(head) != 2 or head[0] != MODEL_FORMAT:
        raise FormatError(f"{path}: field 'header': not a {MODEL_FORMAT} file")
    if head[1] != str(MODEL_VERSION):
        raise FormatError(f"{path}: field 'version': unsupported version {head[1]}")
    _, parts = take("dims")
    try:
        if parts[0] != "dims":
            raise ValueError
        dims = tuple(int(x) for x in parts[1:])
    except (ValueError, IndexError):
        raise FormatError(f"{path}: field 'dims' malformed") from None
    if len(dims) < 2:
        raise FormatError(f"{path}: field 'dims' needs at least two entries")
    _, parts = take("init")
    if len(parts) != 2 or parts[0] != "init":
        raise FormatError(f"{path}: field 'init' malformed")
    init = parts[1]
    _, parts = take("seed")
    if len(parts) != 2 or parts[0] != "seed":
        raise FormatError(f"{path}: field 'seed' malformed")
    seed = None if parts[1] == "none" else int(parts[1])

    theta = {"theta0": [], "theta1": []}
    for layer, (c_in, c_out) in enumerate(zip(dims[:-1], dims[1:])):
        for name in ("theta0", "theta1"):
            field = f"param {layer} {name}"
            lineno, parts = take(field)
            expected = ["param", str(layer), name]
            if parts[:3] != expected or len(parts) != 5:
                raise FormatError(f"{path}:{lineno}: expected '{field}' header")
            if (int(parts[3]), int(parts[4])) != (c_in, c_out):
                raise FormatError(f"{path}:{lineno}: field '{field}' shape {parts[3]}x{parts[4]} "
                                  f"does not match dims {c_in}x{c_out}")
            rows = []
            for _ in range(c_in):
                lineno, vals = take(field)
                if len(vals) != c_out:
                    raise FormatError(f"{path}:{lineno}: field '{field}' row has {len(vals)} values, "
                                      f"expected {c_out}")
                try:
                    rows.append([float(v) for v in vals])
                except ValueError:
                    raise FormatError(f"{path}:{lineno}: field '{field}' has a non-numeric value") from None
            theta[name].append(np.array(rows))
    for lineno, line in it:
        if line.strip():
            raise FormatError(f"{path}:{lineno}: unexpected trailing content")
    try:
        return GcnModel(theta["theta0"], theta["theta1"], init=init, seed=seed)
    except ParameterError as exc:
        raise FormatError(f"{path}: {exc}") from None
