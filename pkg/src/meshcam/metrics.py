"""Recall metrics: overlaps, mutual information, recovery errors, bounds.

Binary MI is in bits (perfect dense recall reads 1); continuous MI is in nats.
"""

from dataclasses import dataclass
import math

import numpy as np

from .numerics import erf

INFINITE = math.inf
INFINITE_TAG = "infinite"


def overlap_binary(stored, recovered):
    """m = mean_i sigma_i xi_i (per column for matrices)."""
    stored = np.asarray(stored, dtype=float)
    recovered = np.asarray(recovered, dtype=float)
    if stored.shape != recovered.shape:
        raise ValueError(f"shape mismatch {stored.shape} vs {recovered.shape}")
    return np.mean(stored * recovered, axis=0)


def _xlog2x(x):
    x = np.asarray(x, dtype=float)
    safe = np.where(x > 0, x, 1.0)
    return np.where(x > 0, x * np.log2(safe), 0.0)


def binary_entropy(p):
    """H(p) in bits, with 0 log 0 = 0."""
    p = np.asarray(p, dtype=float)
    out = -(_xlog2x(p) + _xlog2x(1.0 - p))
    return float(out) if out.ndim == 0 else out


def mi_dense_binary(m):
    """Bits per input bit for +-1 patterns recalled with overlap m."""
    m = np.asarray(m, dtype=float)
    if np.any(np.abs(m) > 1 + 1e-12):
        raise ValueError("overlap must lie in [-1, 1]")
    m = np.clip(m, -1.0, 1.0)
    out = 1.0 + _xlog2x((1 + m) / 2) + _xlog2x((1 - m) / 2)
    out = np.clip(out, 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


def mi_sparse_binary(p, q, m, tol=1e-12):
    """Bits per input bit for {0,1} patterns.

    p: stored activity, q: recovered activity, m: mean of sigma*xi.
    """
    p, q, m = (np.asarray(a, dtype=float) for a in (p, q, m))
    if np.any((p <= 0) | (p >= 1) | (q < 0) | (q > 1)):
        raise ValueError("need 0 < p < 1 and 0 <= q <= 1")
    p1e = 1.0 - m / p
    p0e = (q - m) / (1.0 - p)
    if np.any((p1e < -tol) | (p1e > 1 + tol) | (p0e < -tol) | (p0e > 1 + tol)):
        raise ValueError(f"inconsistent inputs: P_1e={p1e}, P_0e={p0e}")
    p1e, p0e = np.clip(p1e, 0, 1), np.clip(p0e, 0, 1)
    h_cond = p * binary_entropy(p1e) + (1 - p) * binary_entropy(p0e)
    out = np.maximum(binary_entropy(q) - h_cond, 0.0)
    return float(out) if out.ndim == 0 else out


def mi_sparse_patterns(stored, recovered):
    """Per-column sparse-binary MI from empirical activities; degenerate columns give 0."""
    stored = np.atleast_2d(np.asarray(stored, dtype=float).T).T
    recovered = np.atleast_2d(np.asarray(recovered, dtype=float).T).T
    p = stored.mean(axis=0)
    q = recovered.mean(axis=0)
    m = (stored * recovered).mean(axis=0)
    ok = (p > 0) & (p < 1)
    out = np.zeros(p.shape)
    if ok.any():
        out[ok] = mi_sparse_binary(p[ok], q[ok], m[ok])
    return out


def correlation(x, y, center=False):
    """Cosine between x and y (per column); ``center`` subtracts means first."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if center:
        x = x - x.mean(axis=0)
        y = y - y.mean(axis=0)
    den = np.linalg.norm(x, axis=0) * np.linalg.norm(y, axis=0)
    return np.sum(x * y, axis=0) / np.where(den > 0, den, 1.0)


def mi_continuous(r, tol=1e-12):
    """-ln(1 - r^2)/2 nats; |r| = 1 returns the INFINITE flag."""
    r = np.asarray(r, dtype=float)
    if np.any(np.abs(r) > 1 + tol):
        raise ValueError("correlation must lie in [-1, 1]")
    r2 = np.minimum(r * r, 1.0)
    perfect = r2 >= 1.0 - tol
    out = np.where(perfect, INFINITE, -0.5 * np.log1p(-np.where(perfect, 0.0, r2)))
    return float(out) if out.ndim == 0 else out


@dataclass
class RecoveryErrors:
    normalized: np.ndarray
    relative: np.ndarray | None


_LAYERS = ("feature", "label", "hidden")


def recovery_errors(stored, noisy_cue, recovered, layer, k=None):
    """Hamming-based recovery errors for one layer.

    ``normalized`` divides by 2*N (feature, hidden) or 2*k (label).
    ``relative`` divides by the cue's own Hamming distance; None when no cue
    is given.
    """
    if layer not in _LAYERS:
        raise ValueError(f"layer must be one of {_LAYERS}")
    stored = np.asarray(stored, dtype=float)
    recovered = np.asarray(recovered, dtype=float)
    if stored.shape != recovered.shape:
        raise ValueError("stored/recovered shape mismatch")
    dist = np.abs(recovered - stored).sum(axis=0)
    if layer == "label":
        if k is None:
            raise ValueError("label recovery error needs k")
        norm = 2.0 * k
    else:
        norm = 2.0 * stored.shape[0]
    relative = None
    if noisy_cue is not None:
        noisy_cue = np.asarray(noisy_cue, dtype=float)
        if noisy_cue.shape != stored.shape:
            raise ValueError("noisy cue shape mismatch")
        cue_dist = np.abs(noisy_cue - stored).sum(axis=0)
        if np.any(cue_dist == 0):
            raise ValueError("relative recovery error needs a corrupted cue")
        relative = dist / cue_dist
    return RecoveryErrors(dist / norm, relative)


def mi_bound_perinbit(n_hidden, n_feature, n_label, n_patts, cap=True):
    """Synaptic upper bound N_H (2 N_F + N_L) / (N_patts N_F)."""
    if n_patts < 1 or n_feature < 1:
        raise ValueError("n_patts and n_feature must be >= 1")
    val = n_hidden * (2 * n_feature + n_label) / (n_patts * n_feature)
    return min(1.0, val) if cap else val


def hebbian_error_probability(n_hidden, n_patts):
    return 0.5 * (1.0 - erf(math.sqrt(n_hidden / (2.0 * n_patts))))


def mi_hebbian_theory(n_hidden, n_patts):
    """One-step Hebbian hidden->feature MI per bit for random +-1 hidden states."""
    if n_patts < 1:
        raise ValueError("n_patts must be >= 1")
    p = hebbian_error_probability(n_hidden, n_patts)
    return 1.0 - binary_entropy(p)


@dataclass(frozen=True)
class SynapseCount:
    learnable: int
    fixed: int = 0

    @property
    def total(self):
        return self.learnable + self.fixed


def count_synapses(model, **dims):
    """Synapse budget for ``model`` in {"mesh", "hopfield"}.

    MESH counts W_HF, W_FH and W_LH as learnable and W_HL as fixed;
    Hopfield variants count N^2 scaled by the connection fraction gamma.
    """
    if model == "mesh":
        nl, nh, nf = dims["n_label"], dims["n_hidden"], dims["n_feature"]
        return SynapseCount(nh * (2 * nf + nl), nh * nl)
    if model == "hopfield":
        n = dims["n"]
        gamma = dims.get("gamma", 1.0)
        return SynapseCount(int(round(gamma * n * n)))
    raise ValueError(f"unknown model {model!r}")


@dataclass
class MIReport:
    mi_per_input_bit: float
    mi_total: float
    mi_per_synapse: float
    bound_per_input_bit: float
    n_synapses: int
    units: str = "bits"

    @property
    def infinite(self):
        return math.isinf(self.mi_per_input_bit)


def mi_report(per_pattern_mi, n_bits, n_synapses, bound, units="bits"):
    """Aggregate per-pattern MI: mean per bit, total over all stored bits, per synapse."""
    per_pattern_mi = np.asarray(per_pattern_mi, dtype=float)
    per_bit = float(np.mean(per_pattern_mi))
    total = per_bit * n_bits * per_pattern_mi.size
    return MIReport(per_bit, total, total / n_synapses, bound, n_synapses, units)


def binned_mi(x, y, bins=20):
    """Plug-in MI estimate (nats) from equiprobable 2-D binning."""
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    qs = np.linspace(0, 1, bins + 1)
    bx = np.clip(np.searchsorted(np.quantile(x, qs), x, side="right") - 1, 0, bins - 1)
    by = np.clip(np.searchsorted(np.quantile(y, qs), y, side="right") - 1, 0, bins - 1)
    joint = np.zeros((bins, bins))
    np.add.at(joint, (bx, by), 1.0)
    joint /= joint.sum()
    px = joint.sum(axis=1, keepdims=True)
    py = joint.sum(axis=0, keepdims=True)
    nz = joint > 0
    return float(np.sum(joint[nz] * np.log(joint[nz] / (px @ py)[nz])))


def mi_from_flips(stored, recovered):
    """Plug-in MI (bits per bit) of a +-1 channel from joint symbol counts."""
    stored = np.asarray(stored).ravel()
    recovered = np.asarray(recovered).ravel()
    joint = np.zeros((2, 2))
    for a, sa in enumerate((-1, 1)):
        for b, sb in enumerate((-1, 1)):
            joint[a, b] = np.mean((stored == sa) & (recovered == sb))
    px = joint.sum(axis=1, keepdims=True)
    py = joint.sum(axis=0, keepdims=True)
    nz = joint > 0
    return float(np.sum(joint[nz] * np.log2(joint[nz] / (px @ py)[nz])))
