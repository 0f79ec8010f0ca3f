"""Numerical kernels shared by every model: sign, top-k, pseudoinverse, erf, seeded RNG."""

import math
import zlib

import numpy as np

RNG_ALGORITHM = "philox4x64"
DEFAULT_RCOND = 1e-10


class PseudoinverseError(np.linalg.LinAlgError):
    pass


def sgn(v):
    """Elementwise sign with sgn(0) = +1. Works on vectors and column-stacked matrices."""
    v = np.asarray(v, dtype=float)
    if not np.all(np.isfinite(v)):
        raise ValueError("sgn: input contains NaN or Inf")
    return np.where(v >= 0, 1.0, -1.0)


def topk(v, k):
    """k-winners-take-all: ones at the k largest entries, ties to the lowest index.

    A 2-D input is treated column by column.
    """
    v = np.asarray(v, dtype=float)
    n = v.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"topk: k={k} out of range for length {n}")
    # stable argsort on the negated values keeps lower indices first among equals
    order = np.argsort(-v, axis=0, kind="stable")[:k]
    out = np.zeros_like(v)
    np.put_along_axis(out, order, 1.0, axis=0)
    return out


def pseudoinverse(m, rcond=DEFAULT_RCOND):
    """Moore-Penrose pseudoinverse by SVD.

    Singular values below ``rcond * s_max`` are treated as zero.
    """
    m = np.asarray(m, dtype=float)
    if m.size == 0:
        raise ValueError("pseudoinverse: empty matrix")
    try:
        u, s, vt = np.linalg.svd(m, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise PseudoinverseError(f"SVD failed for {m.shape[0]}x{m.shape[1]} matrix: {exc}") from exc
    cutoff = rcond * s.max() if s.size else 0.0
    keep = s > cutoff
    s_inv = np.zeros_like(s)
    s_inv[keep] = 1.0 / s[keep]
    return (vt.T * s_inv) @ u.T


def numerical_rank(m, rcond=DEFAULT_RCOND):
    s = np.linalg.svd(np.asarray(m, dtype=float), compute_uv=False)
    if s.size == 0:
        return 0
    return int((s > rcond * s.max()).sum())


_erf_vec = np.vectorize(math.erf, otypes=[float])


def erf(x):
    """Gauss error function (scalar or array)."""
    if np.ndim(x) == 0:
        return math.erf(float(x))
    return _erf_vec(np.asarray(x, dtype=float))


def derive_seed(master_seed, *keys):
    """Mix a master seed with integer/string keys into a SeedSequence.

    Strings are hashed with CRC32 so the mapping is stable across processes.
    """
    words = []
    for key in keys:
        if isinstance(key, str):
            words.append(zlib.crc32(key.encode("utf-8")))
        else:
            words.append(int(key))
    return np.random.SeedSequence(entropy=int(master_seed), spawn_key=tuple(words))


def make_rng(seed, *keys):
    """Counter-based Philox generator; identical (seed, keys) give identical streams."""
    if isinstance(seed, np.random.SeedSequence):
        ss = seed
    else:
        ss = derive_seed(seed, *keys)
    return np.random.Generator(np.random.Philox(ss))
