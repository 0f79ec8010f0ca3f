"""MESH: heteroassociation of feature patterns onto scaffold states."""

from dataclasses import dataclass

import numpy as np

from .numerics import DEFAULT_RCOND, pseudoinverse, sgn
from .patterns import CONTINUOUS, PatternSet
from .scaffold import Scaffold, scaffold_settle

PSEUDOINVERSE = "pseudoinverse"
HEBBIAN = "hebbian"
BINARY = "binary"
CONTINUOUS_MODE = "continuous"


@dataclass(frozen=True)
class MeshNetwork:
    scaffold: Scaffold
    w_hf: np.ndarray  # N_H x N_F
    w_fh: np.ndarray  # N_F x N_H
    stored: PatternSet
    rule: str = PSEUDOINVERSE
    mode: str = BINARY

    @property
    def n_feature(self):
        return self.stored.n_bits

    @property
    def n_patts(self):
        return self.stored.n_patts

    @property
    def hidden_targets(self):
        return self.scaffold.hidden[:, : self.n_patts]

    @property
    def label_targets(self):
        return self.scaffold.labels[:, : self.n_patts]


@dataclass
class RecallResult:
    recovered: np.ndarray
    presign: np.ndarray
    label: np.ndarray
    hidden: np.ndarray
    steps_run: int


def mesh_store(scaffold, patterns, rule=PSEUDOINVERSE, mode=None, rcond=DEFAULT_RCOND):
    """Hook pattern mu onto scaffold state mu and learn W_HF, W_FH."""
    if not isinstance(patterns, PatternSet):
        raise TypeError("patterns must be a PatternSet")
    if patterns.n_patts > scaffold.n_states:
        raise ValueError(f"{patterns.n_patts} patterns exceed the {scaffold.n_states} scaffold states")
    if mode is None:
        mode = CONTINUOUS_MODE if patterns.kind == CONTINUOUS else BINARY
    if mode not in (BINARY, CONTINUOUS_MODE):
        raise ValueError(f"unknown mode {mode!r}")
    f = patterns.data
    h = scaffold.hidden[:, : patterns.n_patts]
    if rule == PSEUDOINVERSE:
        w_hf = h @ pseudoinverse(f, rcond)
        w_fh = f @ pseudoinverse(h, rcond)
    elif rule == HEBBIAN:
        w_hf = h @ f.T
        w_fh = f @ h.T
    else:
        raise ValueError(f"unknown learning rule {rule!r}")
    return MeshNetwork(scaffold, w_hf, w_fh, patterns, rule, mode)


def _readout(net, presign):
    if net.mode == BINARY:
        return sgn(presign)
    norm = np.linalg.norm(presign, axis=0)
    return presign / np.where(norm > 0, norm, 1.0)


def mesh_recall(net, cue, max_steps=5):
    """Feature -> hidden -> scaffold clean-up -> feature.

    ``cue`` may be one vector or a matrix of column cues.
    """
    cue = np.asarray(cue, dtype=float)
    if cue.shape[0] != net.n_feature:
        raise ValueError(f"cue has length {cue.shape[0]}, expected {net.n_feature}")
    h = sgn(net.w_hf @ cue)
    label, h, steps = scaffold_settle(net.scaffold, h, max_steps)
    presign = net.w_fh @ h
    return RecallResult(_readout(net, presign), presign, label, h, steps)


def presign_overlap(stored, presign):
    """dot(f, f_bar) / |f|^2 per column."""
    return np.sum(stored * presign, axis=0) / np.sum(stored * stored, axis=0)


def normalized_overlap(stored, recovered):
    """Cosine similarity per column."""
    num = np.sum(stored * recovered, axis=0)
    den = np.linalg.norm(stored, axis=0) * np.linalg.norm(recovered, axis=0)
    return num / np.where(den > 0, den, 1.0)


def voronoi_correct(stored, recovered):
    """Column mu is correct iff recovered_mu is strictly closest (by dot) to stored_mu."""
    scores = stored.T @ recovered  # scores[nu, mu] = <f^nu, r^mu>
    n = scores.shape[1]
    own = scores[np.arange(n), np.arange(n)]
    others = scores.copy()
    others[np.arange(n), np.arange(n)] = -np.inf
    if others.shape[0] == 1:
        return np.ones(n, dtype=bool)
    return own > others.max(axis=0)


def mesh_voronoi_check(net, mu, recovered=None):
    if not 0 <= mu < net.n_patts:
        raise IndexError(f"pattern index {mu} out of range")
    if recovered is None:
        recovered = mesh_recall(net, net.stored[mu]).recovered
    scores = net.stored.data.T @ recovered
    own = scores[mu]
    return bool(np.all(np.delete(scores, mu) < own))


@dataclass
class OverlapPoint:
    n_patts: int
    presign: float
    postsign: float
    presign_std: float
    postsign_std: float


def mesh_overlap_curve(make_net, n_patts_grid, trials):
    """Mean clean-cue overlaps per grid point.

    ``make_net(n_patts, trial)`` returns a stored MeshNetwork. Post-sign overlap
    is the normalized overlap of the read-out with the stored pattern.
    """
    out = []
    for n_patts in n_patts_grid:
        pre, post = [], []
        for t in range(trials):
            net = make_net(n_patts, t)
            res = mesh_recall(net, net.stored.data)
            pre.append(presign_overlap(net.stored.data, res.presign).mean())
            post.append(normalized_overlap(net.stored.data, res.recovered).mean())
        out.append(OverlapPoint(n_patts, float(np.mean(pre)), float(np.mean(post)),
                                float(np.std(pre)), float(np.std(post))))
    return out
