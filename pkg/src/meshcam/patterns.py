"""Pattern families and cue corruption.

Patterns are stored column-wise: ``data[:, mu]`` is pattern ``mu``.
"""

from dataclasses import dataclass, field
from itertools import combinations, islice
import math

import numpy as np

DENSE_BINARY = "dense_binary"
SPARSE_BINARY = "sparse_binary"
K_HOT = "k_hot"
CONTINUOUS = "continuous_normal"
KINDS = (DENSE_BINARY, SPARSE_BINARY, K_HOT, CONTINUOUS)

_INT64_MAX = 2**63 - 1


@dataclass(frozen=True)
class PatternSet:
    data: np.ndarray
    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown pattern kind {self.kind!r}")
        if self.data.ndim != 2:
            raise ValueError("PatternSet.data must be 2-D (n_bits x n_patts)")

    @property
    def n_bits(self):
        return self.data.shape[0]

    @property
    def n_patts(self):
        return self.data.shape[1]

    def __getitem__(self, mu):
        return self.data[:, mu]

    def head(self, n):
        """First ``n`` patterns as a new set."""
        if n > self.n_patts:
            raise ValueError(f"requested {n} patterns, only {self.n_patts} available")
        return PatternSet(self.data[:, :n], self.kind, dict(self.params))


def n_khot(n_label, k):
    if not 0 <= k <= n_label:
        raise ValueError(f"k={k} must lie in [0, {n_label}]")
    c = math.comb(n_label, k)
    if c > _INT64_MAX:
        raise OverflowError(f"C({n_label},{k}) = {c} does not fit in 64 bits")
    return c


def khot_matrix(index_sets, n_label):
    sets = list(index_sets)
    out = np.zeros((n_label, len(sets)))
    for j, s in enumerate(sets):
        out[list(s), j] = 1.0
    return out


def gen_khot_labels(n_label, k, limit=None):
    """k-hot labels in lexicographic order of their active-index sets."""
    total = n_khot(n_label, k)
    if limit is None:
        limit = total
    if not 0 <= limit <= total:
        raise ValueError(f"limit={limit} exceeds C({n_label},{k}) = {total}")
    sets = islice(combinations(range(n_label), k), limit)
    return PatternSet(khot_matrix(sets, n_label), K_HOT, {"k": k})


def unrank_combination(rank, n, k):
    """Index set of the ``rank``-th k-subset of range(n) in lexicographic order."""
    out = []
    x = 0
    for remaining in range(k, 0, -1):
        while True:
            c = math.comb(n - x - 1, remaining - 1)
            if rank < c:
                break
            rank -= c
            x += 1
        out.append(x)
        x += 1
    return tuple(out)


def gen_dense_binary(n_bits, n_patts, rng):
    if n_bits < 1 or n_patts < 1:
        raise ValueError("n_bits and n_patts must be >= 1")
    data = np.where(rng.random((n_bits, n_patts)) < 0.5, 1.0, -1.0)
    return PatternSet(data, DENSE_BINARY)


def gen_sparse_binary(n_bits, n_patts, p, rng):
    if not 0 < p < 1:
        raise ValueError(f"density p={p} must be in (0, 1)")
    data = (rng.random((n_bits, n_patts)) < p).astype(float)
    return PatternSet(data, SPARSE_BINARY, {"p": p})


def gen_continuous(n_bits, n_patts, rng):
    return PatternSet(rng.standard_normal((n_bits, n_patts)), CONTINUOUS)


def _infer_kind(x):
    if np.all((x == 1) | (x == -1)):
        return DENSE_BINARY
    if np.all((x == 0) | (x == 1)):
        return SPARSE_BINARY
    return CONTINUOUS


def flip(pattern, positions, kind=None):
    """Flip the given positions of a binary pattern (involution)."""
    x = np.array(pattern, dtype=float)
    kind = kind or _infer_kind(x)
    if kind == DENSE_BINARY:
        x[positions] = -x[positions]
    elif kind in (SPARSE_BINARY, K_HOT):
        x[positions] = 1.0 - x[positions]
    else:
        raise ValueError("flip is only defined for binary patterns")
    return x


def corrupt(pattern, noise_frac, rng, kind=None, return_positions=False):
    """Noisy copy of one pattern.

    Binary patterns get exactly ``round(noise_frac * n)`` flipped positions;
    continuous ones get additive Gaussian noise with std ``noise_frac * rms``.
    """
    if not 0.0 <= noise_frac <= 1.0:
        raise ValueError(f"noise_frac={noise_frac} must be in [0, 1]")
    x = np.asarray(pattern, dtype=float)
    kind = kind or _infer_kind(x)
    if kind == CONTINUOUS:
        rms = math.sqrt(float(np.mean(x * x)))
        out = x + noise_frac * rms * rng.standard_normal(x.shape)
        return (out, None) if return_positions else out
    n_flip = int(round(noise_frac * x.size))
    positions = np.sort(rng.choice(x.size, size=n_flip, replace=False))
    out = flip(x, positions, kind)
    return (out, positions) if return_positions else out


def corrupt_columns(data, noise_frac, rng, kind=None):
    """Apply :func:`corrupt` independently to every column."""
    data = np.asarray(data, dtype=float)
    if noise_frac == 0:
        return data.copy()
    kind = kind or _infer_kind(data)
    out = np.empty_like(data)
    for j in range(data.shape[1]):
        out[:, j] = corrupt(data[:, j], noise_frac, rng, kind=kind)
    return out
