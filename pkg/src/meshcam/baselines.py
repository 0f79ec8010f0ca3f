"""Hopfield-family baseline CAMs sharing one recall interface."""

from dataclasses import dataclass, field
import math

import numpy as np

from .numerics import DEFAULT_RCOND, make_rng, pseudoinverse, sgn
from .patterns import DENSE_BINARY, SPARSE_BINARY, PatternSet

HEBBIAN = "hebbian"
PINV = "pseudoinverse"
BOUNDED = "bounded"
SPARSE_INPUT = "sparse_input"
SPARSE_CONN = "sparse_conn"
VARIANTS = (HEBBIAN, PINV, BOUNDED, SPARSE_INPUT, SPARSE_CONN)

ASYNC = "asynchronous"
SYNC = "synchronous"

# bounded-synapse defaults: step lr/sqrt(N), hard bound A (see README)
DEFAULT_BOUND = 0.2
DEFAULT_LR = 1.0


@dataclass(frozen=True)
class HopfieldNet:
    weights: np.ndarray
    variant: str
    params: dict = field(default_factory=dict)
    update: str = ASYNC

    @property
    def n(self):
        return self.weights.shape[0]

    @property
    def threshold(self):
        return self.params.get("theta", 0.0)

    @property
    def zero_one(self):
        """True when states live in {0, 1} rather than {-1, +1}."""
        return self.variant == SPARSE_INPUT

    def with_params(self, **kw):
        return HopfieldNet(self.weights, self.variant, {**self.params, **kw}, self.update)


def _require_kind(patterns, kind):
    if not isinstance(patterns, PatternSet):
        raise TypeError("patterns must be a PatternSet")
    if patterns.kind != kind:
        raise ValueError(f"{kind} patterns required, got {patterns.kind}")


def train_hebbian(patterns):
    _require_kind(patterns, DENSE_BINARY)
    x = patterns.data
    w = x @ x.T / x.shape[0]
    np.fill_diagonal(w, 0.0)
    return HopfieldNet(w, HEBBIAN)


def train_pinv(patterns, rcond=DEFAULT_RCOND):
    """Projection rule W = X X^+; the diagonal is kept so W stays a projector."""
    _require_kind(patterns, DENSE_BINARY)
    x = patterns.data
    return HopfieldNet(x @ pseudoinverse(x, rcond), PINV, {"rcond": rcond})


def train_bounded(patterns, bound=DEFAULT_BOUND, lr=DEFAULT_LR):
    """Sequential Hebbian presentation with hard-clipped synapses."""
    _require_kind(patterns, DENSE_BINARY)
    if bound <= 0:
        raise ValueError("bound must be positive")
    n = patterns.n_bits
    step = lr / math.sqrt(n)
    w = np.zeros((n, n))
    for mu in range(patterns.n_patts):
        xi = patterns.data[:, mu]
        w += step * np.outer(xi, xi)
        np.clip(w, -bound, bound, out=w)
        np.fill_diagonal(w, 0.0)
    return HopfieldNet(w, BOUNDED, {"bound": bound, "lr": lr})


def train_sparse_input(patterns, p=None, theta=0.0):
    """Covariance rule for {0,1} patterns with global firing threshold ``theta``."""
    _require_kind(patterns, SPARSE_BINARY)
    p = patterns.params.get("p") if p is None else p
    if p is None or not 0 < p < 1:
        raise ValueError("sparse-input training needs a density p in (0, 1)")
    x = patterns.data - p
    w = x @ x.T / patterns.n_bits
    np.fill_diagonal(w, 0.0)
    return HopfieldNet(w, SPARSE_INPUT, {"p": p, "theta": theta})


def connectivity_mask(n, gamma, mask_seed):
    """Symmetric 0/1 mask with connection probability gamma and empty diagonal."""
    if not 0 < gamma <= 1:
        raise ValueError("gamma must be in (0, 1]")
    rng = make_rng(mask_seed, "mask")
    upper = np.triu(rng.random((n, n)) < gamma, k=1)
    return (upper | upper.T).astype(float)


def train_sparse_conn(patterns, gamma, mask_seed=0):
    _require_kind(patterns, DENSE_BINARY)
    n = patterns.n_bits
    x = patterns.data
    w = (x @ x.T) * connectivity_mask(n, gamma, mask_seed) / (gamma * n)
    np.fill_diagonal(w, 0.0)
    return HopfieldNet(w, SPARSE_CONN, {"gamma": gamma, "mask_seed": mask_seed})


def _activate(net, field_):
    if net.zero_one:
        return np.where(field_ - net.threshold >= 0, 1.0, 0.0)
    return sgn(field_)


def energy(net, s):
    """E = -1/2 s^T W s + theta * sum(s), per column for matrices."""
    s = np.asarray(s, dtype=float)
    quad = -0.5 * np.sum(s * (net.weights @ s), axis=0)
    return quad + net.threshold * np.sum(s, axis=0)


@dataclass
class HopfieldRecall:
    state: np.ndarray
    converged: np.ndarray  # bool per column
    sweeps: int


def hopfield_recall(net, cue, max_sweeps=50, update=None, seed=0):
    """Run the network from ``cue`` (vector or column matrix) to a fixed point.

    Asynchronous updates visit neurons in a fresh seeded random permutation
    each sweep and stop once a sweep changes nothing. Synchronous updates stop
    on a repeated state; 2-cycles and runs hitting ``max_sweeps`` are flagged
    as not converged.
    """
    update = update or net.update
    s = np.array(cue, dtype=float)
    if s.shape[0] != net.n:
        raise ValueError(f"cue has length {s.shape[0]}, expected {net.n}")
    vector = s.ndim == 1
    if vector:
        s = s[:, None]
    w = net.weights
    converged = np.zeros(s.shape[1], dtype=bool)
    sweeps = 0
    if update == ASYNC:
        rng = make_rng(seed, "async-order")
        for sweeps in range(1, max_sweeps + 1):
            changed = np.zeros(s.shape[1], dtype=bool)
            for i in rng.permutation(net.n):
                new = _activate(net, w[i] @ s)
                changed |= new != s[i]
                s[i] = new
            if not changed.any():
                converged[:] = True
                break
        else:
            converged = ~changed
    elif update == SYNC:
        prev = None
        active = np.ones(s.shape[1], dtype=bool)
        for sweeps in range(1, max_sweeps + 1):
            new = _activate(net, w @ s)
            fixed = np.all(new == s, axis=0)
            converged |= fixed & active
            cycled = np.zeros_like(fixed) if prev is None else np.all(new == prev, axis=0) & ~fixed
            active &= ~(fixed | cycled)
            prev = s
            s = np.where(active, new, s)
            if not active.any():
                break
    else:
        raise ValueError(f"unknown update mode {update!r}")
    return HopfieldRecall(s[:, 0] if vector else s, converged, sweeps)


def choose_threshold(net, patterns, cues, thetas=None, max_sweeps=30, seed=0):
    """Pick the global threshold maximizing mean recall MI for a sparse-input net."""
    from .metrics import mi_sparse_patterns

    p = net.params["p"]
    if thetas is None:
        lo, hi = -p * p * (1 - p), p * (1 - p) * (1 - p)
        thetas = np.linspace(lo, hi, 21)
    best = (-np.inf, 0.0)
    for theta in thetas:
        cand = net.with_params(theta=float(theta))
        out = hopfield_recall(cand, cues, max_sweeps=max_sweeps, seed=seed)
        score = float(np.mean(mi_sparse_patterns(patterns.data, out.state)))
        if score > best[0] + 1e-12:
            best = (score, float(theta))
    return best[1]
