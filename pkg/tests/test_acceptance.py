"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` for live lines, or
``python3 tests/test_acceptance.py`` for the table alone. The summary is also
printed at the end of any pytest run that includes this module.
"""

import math
import time

import numpy as np

from meshcam import baselines as bl
from meshcam import mesh as ms
from meshcam.harness import SweepSpec, default_specs, run_sweep, to_csv
from meshcam.metrics import correlation, mi_continuous, mi_dense_binary, mi_hebbian_theory, overlap_binary
from meshcam.numerics import make_rng, numerical_rank, sgn
from meshcam.patterns import DENSE_BINARY, corrupt_columns, gen_continuous, gen_dense_binary
from meshcam.scaffold import ScaffoldConfig, build_scaffold, scaffold_capacity, scaffold_step

SEEDS = range(5)
RESULTS = {}

# tolerances, pinned
EXACTNESS_RUNTIME_S = 60.0
CONTINUUM_REL_TOL = 0.10
CONTINUUM_RUNTIME_S = 120.0
BOUND_LOW, BOUND_HIGH = 0.5, 1.0
SYNAPSE_PLATEAU_RATIO = 2.0
CLIFF_HIGH, CLIFF_LOW = 0.95, 0.1
CLIFF_RUNTIME_S = 60.0
PINV_BASIN_FRACTION = 0.5
CAPACITY_HIGH, CAPACITY_LOW = 209, 20
HEBBIAN_REL_TOL = 0.10
CONTINUOUS_REL_TOL = 0.10
VORONOI_FRACTION = 0.99


def _report(num, title, passed, detail):
    line = f"[{'PASS' if passed else 'FAIL'}] {num:>2}. {title}: {detail}"
    RESULTS[num] = line
    print(line)
    return passed


def _mesh(n_label, n_hidden, n_feature, n_patts, seed, tag, continuous=False):
    sc = build_scaffold(ScaffoldConfig(n_label, 3, n_hidden, seed))
    gen = gen_continuous if continuous else gen_dense_binary
    return ms.mesh_store(sc, gen(n_feature, n_patts, make_rng(seed, tag, n_patts)))


def test_01_exactness_suite():
    t0 = time.perf_counter()
    fails = {"hidden reconstruction": 0, "exact recall": 0, "one-step": 0, "fixed points": 0}
    rank_ok = True
    for seed in SEEDS:
        sc = build_scaffold(ScaffoldConfig(12, 3, 150, seed))
        # every predefined state is a fixed point
        label, hidden = scaffold_step(sc, sc.hidden)
        fails["fixed points"] += int((~(np.all(label == sc.labels, 0) & np.all(hidden == sc.hidden, 0))).sum())
        # one step from random states lands on a fixed point
        h0 = sgn(make_rng(seed, "probe").standard_normal((150, 1000)))
        lab1, h1 = scaffold_step(sc, h0)
        _, h2 = scaffold_step(sc, h1)
        fails["one-step"] += int((lab1.sum(0) != 3).sum() + (~np.all(h2 == h1, 0)).sum())
        # W_HF F = H with N_patts = N_F = C
        pats = gen_dense_binary(220, 220, make_rng(seed, "reconstruct"))
        net = ms.mesh_store(sc, pats)
        drive = net.w_hf @ pats.data
        bad = ~np.all(np.abs(drive - net.hidden_targets) < 1e-8, 0)
        fails["hidden reconstruction"] += int(bad.sum())
        # clean-cue exact recall at N_patts = N_H
        rank_ok &= numerical_rank(sc.hidden[:, :150]) == 150
        pats = gen_dense_binary(220, 150, make_rng(seed, "exact-recall"))
        res = ms.mesh_recall(ms.mesh_store(sc, pats), pats.data)
        fails["exact recall"] += int((~np.all(res.recovered == pats.data, 0)).sum())
    elapsed = time.perf_counter() - t0
    passed = sum(fails.values()) == 0 and rank_ok and elapsed < EXACTNESS_RUNTIME_S
    detail = ", ".join(f"{k} {v}" for k, v in fails.items()) + f"; H full rank {rank_ok}; {elapsed:.1f}s"
    assert _report(1, "exactness suite (0 failures, 5 seeds, <60s)", passed, detail)


def test_02_continuum_law():
    t0 = time.perf_counter()
    worst, parts = 0.0, []
    for n_patts in (90, 120, 180, 220):
        vals = []
        for seed in SEEDS:
            net = _mesh(12, 60, 220, n_patts, seed, "continuum")
            vals.append(ms.presign_overlap(net.stored.data, ms.mesh_recall(net, net.stored.data).presign).mean())
        rel = abs(np.mean(vals) / (60 / n_patts) - 1)
        worst = max(worst, rel)
        parts.append(f"{n_patts}:{np.mean(vals):.4f}/{60 / n_patts:.4f}")
    elapsed = time.perf_counter() - t0
    passed = worst <= CONTINUUM_REL_TOL and elapsed < CONTINUUM_RUNTIME_S
    assert _report(2, "continuum law (+-10% of N_H/N_patts)", passed,
                   f"{' '.join(parts)}; worst rel err {worst:.3f}; {elapsed:.1f}s")


def test_03_bound_tracking():
    n_hidden = 60
    spec = SweepSpec("mesh_pinv", {"n_label": 12, "k": 3, "n_hidden": n_hidden, "n_feature": 220},
                     [90, 120, 180, 220], trials=5)
    rows = run_sweep(spec).rows
    ratios, per_syn = {}, {}
    for n_patts in spec.n_patts_grid:
        cell = [r for r in rows if r.n_patts == n_patts]
        mi = np.mean([r.mi_per_input_bit for r in cell])
        ratios[n_patts] = mi / min(1.0, 2 * n_hidden / n_patts)
        if n_patts >= 2 * n_hidden:
            per_syn[n_patts] = np.mean([r.mi_per_synapse for r in cell])
    tracking = all(BOUND_LOW <= v <= BOUND_HIGH for v in ratios.values())
    spread = max(per_syn.values()) / min(per_syn.values())
    plateau = spread < SYNAPSE_PLATEAU_RATIO
    detail = (f"MI/bound {' '.join(f'{k}:{v:.3f}' for k, v in ratios.items())} (need [0.5, 1.0]: {tracking}); "
              f"MI/synapse spread {spread:.2f}x (need <2x: {plateau})")
    assert _report(3, "bound tracking", tracking and plateau, detail)


def test_04_memory_cliff():
    t0 = time.perf_counter()
    mi = {}
    for n_patts in (20, 60):
        vals = []
        for seed in SEEDS:
            pats = gen_dense_binary(200, n_patts, make_rng(seed, "cliff", n_patts))
            cue = corrupt_columns(pats.data, 0.05, make_rng(seed, "cliff-noise", n_patts), DENSE_BINARY)
            out = bl.hopfield_recall(bl.train_hebbian(pats), cue, max_sweeps=50, seed=seed)
            vals.append(np.mean(mi_dense_binary(overlap_binary(pats.data, out.state))))
        mi[n_patts] = float(np.mean(vals))
    elapsed = time.perf_counter() - t0
    passed = mi[20] > CLIFF_HIGH and mi[60] < CLIFF_LOW and elapsed < CLIFF_RUNTIME_S
    assert _report(4, "memory cliff (Hebbian N=200, 5% noise)", passed,
                   f"MI@20 {mi[20]:.4f} (>0.95), MI@60 {mi[60]:.4f} (<0.1); {elapsed:.1f}s")


def test_05_pinv_hopfield():
    n = 200
    pats = gen_dense_binary(n, n, make_rng(0, "pinv-full"))
    clean = bl.hopfield_recall(bl.train_pinv(pats), pats.data)
    exact = bool(np.array_equal(clean.state, pats.data))
    fractions = {}
    for n_patts in (120, 150, 180, 200):
        pats = gen_dense_binary(n, n_patts, make_rng(0, "pinv", n_patts))
        cue = corrupt_columns(pats.data, 0.05, make_rng(1, "pinv", n_patts), DENSE_BINARY)
        out = bl.hopfield_recall(bl.train_pinv(pats), cue, max_sweeps=50)
        fractions[n_patts] = float(np.mean(np.all(out.state == pats.data, 0)))
    drops = any(v < PINV_BASIN_FRACTION for v in fractions.values())
    detail = (f"clean exact at N_patts=N: {exact}; noisy recall fraction "
              f"{' '.join(f'{k}:{v:.2f}' for k, v in fractions.items())}")
    assert _report(5, "pseudoinverse Hopfield", exact and drops, detail)


def test_06_scaffold_capacity():
    high, low = scaffold_capacity([ScaffoldConfig(12, 3, 200), ScaffoldConfig(12, 3, 20)],
                                  noise_frac=0.2, error_threshold=0.03, trials=5)
    passed = high.capacity >= CAPACITY_HIGH and low.capacity < CAPACITY_LOW
    assert _report(6, "scaffold capacity (20% noise, 3% error)", passed,
                   f"N_H=200: {high.capacity} (>=209); N_H=20: {low.capacity} (<20)")


def test_07_hebbian_theory():
    n_hidden, n_feature = 200, 1000
    worst, parts = 0.0, []
    for ratio in (1, 2, 4, 8):
        n_patts = ratio * n_hidden
        rng = make_rng(0, "hebbian-theory", n_patts)
        h = gen_dense_binary(n_hidden, n_patts, rng).data
        f = gen_dense_binary(n_feature, n_patts, rng).data
        sim = float(np.mean(mi_dense_binary(overlap_binary(f, sgn(f @ h.T @ h)))))
        theory = mi_hebbian_theory(n_hidden, n_patts)
        worst = max(worst, abs(sim / theory - 1))
        parts.append(f"{ratio}:{sim:.4f}/{theory:.4f}")
    assert _report(7, "Hebbian MI theory (+-10%)", worst <= HEBBIAN_REL_TOL,
                   f"{' '.join(parts)}; worst rel err {worst:.3f}")


def test_08_continuous_continuum():
    # N_L=15 because C(12,3)=220 < 240; N_F=300 keeps N_patts <= N_F
    worst, parts, mis = 0.0, [], []
    for n_patts in (120, 240):
        ov, rs = [], []
        for seed in SEEDS:
            net = _mesh(15, 60, 300, n_patts, seed, "continuous", continuous=True)
            rec = ms.mesh_recall(net, net.stored.data).recovered
            ov.append(ms.normalized_overlap(net.stored.data, rec).mean())
            rs.append(correlation(net.stored.data, rec, center=True).mean())
        target = math.sqrt(60 / n_patts)
        worst = max(worst, abs(np.mean(ov) / target - 1))
        mis.append(mi_continuous(float(np.mean(rs))))
        parts.append(f"{n_patts}:{np.mean(ov):.4f}/{target:.4f}")
    mi_ok = all(math.isfinite(m) for m in mis) and mis[0] > mis[1]
    passed = worst <= CONTINUOUS_REL_TOL and mi_ok
    assert _report(8, "continuous continuum (+-10% of sqrt(N_H/N_patts))", passed,
                   f"{' '.join(parts)}; worst rel err {worst:.3f}; MI nats {mis[0]:.4f} > {mis[1]:.4f}")


def test_09_voronoi_retention():
    ok = total = 0
    for seed in SEEDS:
        net = _mesh(12, 60, 220, 220, seed, "voronoi")
        rec = ms.mesh_recall(net, net.stored.data).recovered
        ok += sum(ms.mesh_voronoi_check(net, mu, rec[:, mu]) for mu in range(net.n_patts))
        total += net.n_patts
    frac = ok / total
    assert _report(9, "Voronoi retention at N_patts=C", frac >= VORONOI_FRACTION,
                   f"{ok}/{total} = {frac:.4f} (>=0.99)")


def test_10_determinism():
    a = to_csv(run_sweep(default_specs(master_seed=0)))
    b = to_csv(run_sweep(default_specs(master_seed=0)))
    assert _report(10, "determinism (default sweep twice)", a == b,
                   f"{len(a.splitlines()) - 1} rows, byte-identical {a == b}")


if __name__ == "__main__":
    import sys

    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_")]
    failed = 0
    for fn in tests:
        try:
            fn()
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
