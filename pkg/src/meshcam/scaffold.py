"""The memory scaffold: a fixed label <-> hidden bipartite attractor over k-hot labels."""

from dataclasses import dataclass

import numpy as np

from .numerics import make_rng, sgn, topk, derive_seed
from .patterns import gen_khot_labels, khot_matrix, n_khot, unrank_combination, corrupt_columns, DENSE_BINARY

DEFAULT_MAX_BYTES = 1 << 30


class ScaffoldTooLarge(MemoryError):
    pass


@dataclass(frozen=True)
class ScaffoldConfig:
    n_label: int
    k: int
    n_hidden: int
    seed: int = 0
    label_limit: int | None = None
    max_bytes: int = DEFAULT_MAX_BYTES

    def __post_init__(self):
        if not 1 <= self.k <= self.n_label:
            raise ValueError(f"need 1 <= k <= n_label, got k={self.k}, n_label={self.n_label}")
        if self.n_hidden < 1:
            raise ValueError("n_hidden must be >= 1")
        if self.label_limit is not None and self.label_limit < 1:
            raise ValueError("label_limit must be >= 1")


@dataclass(frozen=True)
class Scaffold:
    config: ScaffoldConfig
    w_hl: np.ndarray  # N_H x N_L, fixed random projection
    w_lh: np.ndarray  # N_L x N_H, Hebbian return weights
    labels: np.ndarray  # N_L x n_states
    hidden: np.ndarray  # N_H x n_states

    @property
    def n_states(self):
        return self.labels.shape[1]

    @property
    def k(self):
        return self.config.k


def _select_labels(config):
    total = n_khot(config.n_label, config.k)
    limit = config.label_limit
    if limit is None or limit >= total:
        return gen_khot_labels(config.n_label, config.k).data
    # random label subsample, kept in lexicographic order
    rng = make_rng(config.seed, "labels")
    ranks = np.sort(rng.choice(total, size=limit, replace=False))
    return khot_matrix((unrank_combination(int(r), config.n_label, config.k) for r in ranks), config.n_label)


def hebbian_return_weights(labels, hidden):
    """W_LH = (1/C) sum_mu l^mu (h^mu)^T."""
    return labels @ hidden.T / labels.shape[1]


def build_scaffold(config):
    total = n_khot(config.n_label, config.k)
    n_states = total if config.label_limit is None else min(total, config.label_limit)
    est = 8 * (n_states * (config.n_label + 2 * config.n_hidden) + 2 * config.n_label * config.n_hidden)
    if est > config.max_bytes:
        raise ScaffoldTooLarge(
            f"scaffold with {n_states} states needs ~{est / 2**20:.0f} MiB "
            f"(cap {config.max_bytes / 2**20:.0f} MiB); set label_limit"
        )
    rng = make_rng(config.seed, "w_hl")
    w_hl = rng.standard_normal((config.n_hidden, config.n_label))
    labels = _select_labels(config)
    hidden = sgn(w_hl @ labels)
    return Scaffold(config, w_hl, hebbian_return_weights(labels, hidden), labels, hidden)


def _check_index(scaffold, mu):
    if not 0 <= mu < scaffold.n_states:
        raise IndexError(f"state index {mu} out of range [0, {scaffold.n_states})")


def scaffold_label(scaffold, mu):
    _check_index(scaffold, mu)
    return scaffold.labels[:, mu].copy()


def scaffold_hidden(scaffold, mu):
    _check_index(scaffold, mu)
    return scaffold.hidden[:, mu].copy()


def scaffold_step(scaffold, h, w_lh=None):
    """One label/hidden round trip: l = topk(W_LH h), h' = sgn(W_HL l).

    ``h`` may be a vector or a matrix of column states. ``w_lh`` overrides the
    scaffold's return weights (used by the capacity sweep on stored subsets).
    """
    h = np.asarray(h, dtype=float)
    if h.shape[0] != scaffold.config.n_hidden:
        raise ValueError(f"hidden state has length {h.shape[0]}, expected {scaffold.config.n_hidden}")
    w_lh = scaffold.w_lh if w_lh is None else w_lh
    label = topk(w_lh @ h, scaffold.k)
    return label, sgn(scaffold.w_hl @ label)


def scaffold_settle(scaffold, h, max_steps=5):
    """Iterate :func:`scaffold_step` until the hidden state repeats.

    Returns ``(label, hidden, steps)``; on matrices iteration stops when every
    column has settled.
    """
    h = np.asarray(h, dtype=float)
    label = None
    steps = 0
    for steps in range(1, max_steps + 1):
        label, h_next = scaffold_step(scaffold, h)
        settled = np.array_equal(h_next, h)
        h = h_next
        if settled:
            break
    return label, h, steps


@dataclass
class CapacityRow:
    n_label: int
    k: int
    n_hidden: int
    n_states: int
    capacity: int
    mean_error_all: float  # mean recovery error over every state, averaged over trials


def relative_recovery_error(true, noisy, recovered):
    """Hamming(recovered, true) / Hamming(noisy, true), column-wise."""
    num = np.abs(recovered - true).sum(axis=0)
    den = np.abs(noisy - true).sum(axis=0)
    if np.any(den == 0):
        raise ValueError("relative recovery error needs a corrupted cue")
    return num / den


def _trial_seed(seed, trial):
    return int(derive_seed(seed, "trial", trial).generate_state(1, np.uint64)[0] >> 1)


def scaffold_capacity(config_grid, noise_frac=0.2, error_threshold=0.03, trials=1, m_grid=None,
                      hebbian_over="all"):
    """Largest number of probed states whose mean relative recovery error stays under threshold.

    For each config the first m states (canonical order) are cued with
    ``noise_frac`` hidden-bit flips and run through one scaffold step.
    ``hebbian_over="all"`` keeps the fixed scaffold over every predefined state;
    ``"stored"`` rebuilds W_LH from only the first m labels for each m.
    """
    if not (0 <= noise_frac <= 1 and 0 <= error_threshold <= 1):
        raise ValueError("noise_frac and error_threshold must be in [0, 1]")
    if hebbian_over not in ("all", "stored"):
        raise ValueError("hebbian_over must be 'all' or 'stored'")
    rows = []
    for config in config_grid:
        errs_by_m = None
        mean_all = []
        for t in range(trials):
            cfg = ScaffoldConfig(config.n_label, config.k, config.n_hidden, _trial_seed(config.seed, t),
                                 config.label_limit, config.max_bytes)
            sc = build_scaffold(cfg)
            grid = list(m_grid) if m_grid is not None else list(range(1, sc.n_states + 1))
            grid = [m for m in grid if 1 <= m <= sc.n_states]
            rng = make_rng(cfg.seed, "capacity-noise")
            noisy = corrupt_columns(sc.hidden, noise_frac, rng, kind=DENSE_BINARY)
            if hebbian_over == "all":
                _, rec = scaffold_step(sc, noisy)
                per_state = relative_recovery_error(sc.hidden, noisy, rec)
                csum = np.cumsum(per_state)
                errs = np.array([csum[m - 1] / m for m in grid])
                mean_all.append(per_state.mean())
            else:
                errs = np.empty(len(grid))
                for i, m in enumerate(grid):
                    w_lh = hebbian_return_weights(sc.labels[:, :m], sc.hidden[:, :m])
                    _, rec = scaffold_step(sc, noisy[:, :m], w_lh=w_lh)
                    errs[i] = relative_recovery_error(sc.hidden[:, :m], noisy[:, :m], rec).mean()
                mean_all.append(errs[-1])
            errs_by_m = errs if errs_by_m is None else errs_by_m + errs
        mean_errs = errs_by_m / trials
        ok = [m for m, e in zip(grid, mean_errs) if e <= error_threshold]
        rows.append(CapacityRow(config.n_label, config.k, config.n_hidden, sc.n_states,
                                max(ok) if ok else 0, float(np.mean(mean_all))))
    return rows


def critical_hidden(n_label, k, n_hidden_grid, seed=0, noise_frac=0.2, error_threshold=0.03, trials=1,
                    fraction=0.95):
    """Smallest N_H in the grid whose capacity reaches ``fraction`` of C(N_L, k)."""
    for n_hidden in sorted(n_hidden_grid):
        row = scaffold_capacity([ScaffoldConfig(n_label, k, n_hidden, seed)], noise_frac,
                                error_threshold, trials)[0]
        if row.capacity >= fraction * row.n_states:
            return n_hidden
    return None

