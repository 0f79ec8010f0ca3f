"""Invariant checks with measured values, used by ``meshcam verify``."""

from dataclasses import dataclass
import math

import numpy as np

from . import baselines as bl
from . import mesh as ms
from .metrics import mi_dense_binary, mi_hebbian_theory, overlap_binary
from .numerics import DEFAULT_RCOND, make_rng, numerical_rank, sgn, topk
from .patterns import corrupt_columns, gen_continuous, gen_dense_binary, DENSE_BINARY
from .scaffold import Scaffold, ScaffoldConfig, build_scaffold, scaffold_step


@dataclass
class Check:
    name: str
    passed: bool
    measured: str
    expected: str


def corrupt_return_weights(sc):
    """Fault injection: cyclically shift the label rows of W_LH."""
    return Scaffold(sc.config, sc.w_hl, np.roll(sc.w_lh, 1, axis=0), sc.labels, sc.hidden)


def _scaffold(n_label, k, n_hidden, seed, corrupt):
    sc = build_scaffold(ScaffoldConfig(n_label, k, n_hidden, seed))
    return corrupt_return_weights(sc) if corrupt else sc


def check_fixed_points(seeds, corrupt=False, n_label=12, k=3, n_hidden=150):
    fails = []
    for seed in seeds:
        sc = _scaffold(n_label, k, n_hidden, seed, corrupt)
        label, hidden = scaffold_step(sc, sc.hidden)
        ok = np.all(label == sc.labels, axis=0) & np.all(hidden == sc.hidden, axis=0)
        fails.append(int((~ok).sum()))
    return Check(f"fixed points (N_L={n_label}, k={k}, N_H={n_hidden})", sum(fails) == 0,
                 f"non-fixed states per seed {fails}", "0 in every seed")


def check_one_step(seeds, corrupt=False, n_label=12, k=3, n_hidden=150, n_probe=1000):
    bad = 0
    for seed in seeds:
        sc = _scaffold(n_label, k, n_hidden, seed, corrupt)
        rng = make_rng(seed, "one-step-probe")
        h0 = sgn(rng.standard_normal((n_hidden, n_probe)))
        label, h1 = scaffold_step(sc, h0)
        _, h2 = scaffold_step(sc, h1)
        khot = np.all(label.sum(axis=0) == k)
        bad += int(not khot) + int((~np.all(h2 == h1, axis=0)).sum())
    return Check("one-step convergence", bad == 0, f"{bad} probes not settled after one step", "0")


def check_basins(seeds, corrupt=False, n_label=12, k=3, n_hidden=250, noise=0.2):
    fracs = []
    for seed in seeds:
        sc = _scaffold(n_label, k, n_hidden, seed, corrupt)
        noisy = corrupt_columns(sc.hidden, noise, make_rng(seed, "basin"), kind=DENSE_BINARY)
        _, rec = scaffold_step(sc, noisy)
        fracs.append(float(np.mean(np.all(rec == sc.hidden, axis=0))))
    worst = min(fracs)
    return Check(f"basin robustness ({noise:.0%} flips, N_H={n_hidden})", worst >= 0.97,
                 f"min exact-recovery fraction {worst:.4f}", ">= 0.97")


def check_label_stability(n_label=12, k=3):
    from .patterns import gen_khot_labels

    labels = gen_khot_labels(n_label, k).data
    ok = np.array_equal(topk(labels, k), labels)
    return Check("label self-stability topk(l) = l", ok, str(ok), "True")


def check_hidden_reconstruction(seeds, rcond=DEFAULT_RCOND, n_label=12, k=3, n_hidden=150, n_feature=220, n_patts=220):
    worst, sign_fail = 0.0, 0
    for seed in seeds:
        sc = build_scaffold(ScaffoldConfig(n_label, k, n_hidden, seed))
        pats = gen_dense_binary(n_feature, n_patts, make_rng(seed, "reconstruct"))
        net = ms.mesh_store(sc, pats, rcond=rcond)
        drive = net.w_hf @ pats.data
        worst = max(worst, float(np.max(np.abs(drive - net.hidden_targets))))
        sign_fail += int((~np.all(sgn(drive) == net.hidden_targets, axis=0)).sum())
    return Check(f"hidden reconstruction W_HF F = H (rcond={rcond:g})", worst < 1e-8 and sign_fail == 0,
                 f"max |W_HF F - H| = {worst:.2e}, sign failures {sign_fail}", "< 1e-8, 0")


def check_exact_recall(seeds, rcond=DEFAULT_RCOND, n_label=12, k=3, n_hidden=150, n_feature=220, n_patts=150):
    fails, rank_ok = 0, True
    for seed in seeds:
        sc = build_scaffold(ScaffoldConfig(n_label, k, n_hidden, seed))
        rank_ok &= numerical_rank(sc.hidden[:, :n_patts]) == min(n_patts, n_hidden)
        pats = gen_dense_binary(n_feature, n_patts, make_rng(seed, "exact-recall"))
        net = ms.mesh_store(sc, pats, rcond=rcond)
        res = ms.mesh_recall(net, pats.data)
        fails += int((~np.all(res.recovered == pats.data, axis=0)).sum())
    return Check(f"exact recall N_patts={n_patts} <= N_H={n_hidden}", fails == 0 and rank_ok,
                 f"failed recalls {fails}, H full rank {rank_ok}", "0, True")


def check_continuum(seeds, rcond=DEFAULT_RCOND, n_label=12, k=3, n_hidden=60, n_feature=220, grid=(90, 120, 180, 220)):
    worst, ident = 0.0, 0.0
    detail = []
    for n_patts in grid:
        vals = []
        for seed in seeds:
            sc = build_scaffold(ScaffoldConfig(n_label, k, n_hidden, seed))
            pats = gen_dense_binary(n_feature, n_patts, make_rng(seed, "continuum", n_patts))
            net = ms.mesh_store(sc, pats, rcond=rcond)
            res = ms.mesh_recall(net, pats.data)
            vals.append(float(np.mean(ms.presign_overlap(pats.data, res.presign))))
            h = net.hidden_targets
            proj = pats.data @ (np.linalg.pinv(h) @ h)
            ident = max(ident, float(np.max(np.abs(net.w_fh @ h - proj))))
        rel = abs(np.mean(vals) / (n_hidden / n_patts) - 1)
        worst = max(worst, rel)
        detail.append(f"{n_patts}:{np.mean(vals):.4f}")
    return Check("overlap continuum N_H/N_patts", worst <= 0.10 and ident < 1e-8,
                 f"{' '.join(detail)}; worst rel err {worst:.3f}; |W_FH H - F P_H| {ident:.1e}", "<= 0.10")


def check_continuous(seeds, n_label=15, k=3, n_hidden=60, n_feature=300, grid=(120, 240)):
    worst = 0.0
    detail = []
    for n_patts in grid:
        vals = []
        for seed in seeds:
            sc = build_scaffold(ScaffoldConfig(n_label, k, n_hidden, seed))
            pats = gen_continuous(n_feature, n_patts, make_rng(seed, "cont", n_patts))
            net = ms.mesh_store(sc, pats)
            res = ms.mesh_recall(net, pats.data)
            vals.append(float(np.mean(ms.normalized_overlap(pats.data, res.recovered))))
        target = math.sqrt(n_hidden / n_patts)
        worst = max(worst, abs(np.mean(vals) / target - 1))
        detail.append(f"{n_patts}:{np.mean(vals):.4f}/{target:.4f}")
    return Check("continuous overlap sqrt(N_H/N_patts)", worst <= 0.10, " ".join(detail), "rel err <= 0.10")


def check_hebbian_theory(seed=0, n_hidden=200, n_feature=1000, ratios=(1, 2, 4, 8)):
    worst = 0.0
    detail = []
    rng = make_rng(seed, "hebb-theory")
    for r in ratios:
        n_patts = r * n_hidden
        h = gen_dense_binary(n_hidden, n_patts, rng).data
        f = gen_dense_binary(n_feature, n_patts, rng).data
        rec = sgn((f @ h.T) @ h)
        sim = float(np.mean(mi_dense_binary(overlap_binary(f, rec))))
        th = mi_hebbian_theory(n_hidden, n_patts)
        worst = max(worst, abs(sim / th - 1))
        detail.append(f"{r}:{sim:.4f}/{th:.4f}")
    return Check("Hebbian one-step MI vs theory", worst <= 0.10, " ".join(detail), "rel err <= 0.10")


def check_pinv_projector(seed=0, n=100, n_patts=60):
    pats = gen_dense_binary(n, n_patts, make_rng(seed, "proj"))
    w = bl.train_pinv(pats).weights
    err = float(np.max(np.abs(w @ w - w)))
    return Check("pinv Hopfield W^2 = W", err < 1e-8, f"{err:.1e}", "< 1e-8")


def check_bounded(seed=0, n=100, n_patts=200, bound=0.2):
    pats = gen_dense_binary(n, n_patts, make_rng(seed, "bounded"))
    w = bl.train_bounded(pats, bound).weights
    mx = float(np.max(np.abs(w)))
    return Check("bounded synapses |W| <= A", mx <= bound + 1e-12, f"max |W| {mx:.4f}", f"<= {bound}")


def check_energy(seed=0, n=100, n_patts=30):
    rng = make_rng(seed, "energy")
    pats = gen_dense_binary(n, n_patts, rng)
    net = bl.train_hebbian(pats)
    s = sgn(rng.standard_normal(n))
    e_prev, bad = float(bl.energy(net, s)), 0
    for _ in range(5):
        for i in rng.permutation(n):
            s[i] = sgn(net.weights[i] @ s)
            e = float(bl.energy(net, s))
            bad += e > e_prev + 1e-12
            e_prev = e
    return Check("async energy non-increasing", bad == 0, f"{bad} increases", "0")


def run_verify(rcond=DEFAULT_RCOND, corrupt_w_lh=False, seeds=range(5)):
    seeds = list(seeds)
    return [
        check_fixed_points(seeds, corrupt_w_lh),
        check_one_step(seeds, corrupt_w_lh),
        check_basins(seeds, corrupt_w_lh),
        check_label_stability(),
        check_hidden_reconstruction(seeds, rcond),
        check_exact_recall(seeds, rcond),
        check_continuum(seeds, rcond),
        check_continuous(seeds),
        check_hebbian_theory(),
        check_pinv_projector(),
        check_bounded(),
        check_energy(),
    ]


def format_checks(checks):
    width = max(len(c.name) for c in checks)
    lines = [f"{'check':<{width}}  result  measured (expected)"]
    for c in checks:
        lines.append(f"{c.name:<{width}}  {'PASS' if c.passed else 'FAIL':<6}  {c.measured} ({c.expected})")
    return "\n".join(lines)
