import math

import numpy as np
import pytest

from meshcam.mesh import (
    HEBBIAN,
    PSEUDOINVERSE,
    mesh_overlap_curve,
    mesh_recall,
    mesh_store,
    mesh_voronoi_check,
    normalized_overlap,
    presign_overlap,
    voronoi_correct,
)
from meshcam.metrics import mi_dense_binary, overlap_binary
from meshcam.numerics import make_rng, numerical_rank, sgn
from meshcam.patterns import DENSE_BINARY, corrupt_columns, gen_continuous, gen_dense_binary
from meshcam.scaffold import ScaffoldConfig, build_scaffold


def _net(n_label, n_hidden, n_feature, n_patts, seed, rule=PSEUDOINVERSE, continuous=False):
    sc = build_scaffold(ScaffoldConfig(n_label, 3, n_hidden, seed))
    gen = gen_continuous if continuous else gen_dense_binary
    return mesh_store(sc, gen(n_feature, n_patts, make_rng(seed, "feat", n_patts)), rule)


@pytest.fixture(scope="module")
def sc150():
    return build_scaffold(ScaffoldConfig(12, 3, 150, seed=0))


def test_pinv_weights_match_definition(sc150):
    pats = gen_dense_binary(200, 100, make_rng(1))
    net = mesh_store(sc150, pats)
    h = sc150.hidden[:, :100]
    assert np.allclose(net.w_hf, h @ np.linalg.pinv(pats.data))
    assert np.allclose(net.w_fh, pats.data @ np.linalg.pinv(h))


def test_hebbian_weights_match_definition(sc150):
    pats = gen_dense_binary(200, 100, make_rng(1))
    net = mesh_store(sc150, pats, HEBBIAN)
    h = sc150.hidden[:, :100]
    assert np.array_equal(net.w_hf, h @ pats.data.T)
    assert np.array_equal(net.w_fh, pats.data @ h.T)


@pytest.mark.parametrize("seed", range(3))
def test_hidden_reconstruction_exact(sc150, seed):
    pats = gen_dense_binary(220, 220, make_rng(seed, "f"))
    net = mesh_store(sc150, pats)
    drive = net.w_hf @ pats.data
    assert np.max(np.abs(drive - net.hidden_targets)) < 1e-8
    assert np.array_equal(sgn(drive), net.hidden_targets)


@pytest.mark.parametrize("seed", range(3))
def test_exact_recall_up_to_hidden_size(seed):
    sc = build_scaffold(ScaffoldConfig(12, 3, 150, seed))
    assert numerical_rank(sc.hidden[:, :150]) == 150
    pats = gen_dense_binary(220, 150, make_rng(seed, "f"))
    net = mesh_store(sc, pats)
    assert np.max(np.abs(net.w_fh @ net.hidden_targets - pats.data)) < 1e-8
    res = mesh_recall(net, pats.data)
    assert np.array_equal(res.recovered, pats.data)
    assert np.array_equal(res.label, net.label_targets)
    for mu in (0, 75, 149):
        assert mesh_voronoi_check(net, mu)


def test_single_pattern(sc150):
    pats = gen_dense_binary(50, 1, make_rng(4))
    net = mesh_store(sc150, pats)
    res = mesh_recall(net, pats.data[:, 0])
    assert np.array_equal(res.recovered, pats.data[:, 0])
    assert res.label.sum() == 3 and res.steps_run == 1


def test_noisy_cues_below_hidden_size(sc150):
    pats = gen_dense_binary(220, 120, make_rng(0, "n"))
    net = mesh_store(sc150, pats)
    cue = corrupt_columns(pats.data, 0.05, make_rng(1), DENSE_BINARY)
    res = mesh_recall(net, cue)
    assert np.mean(np.all(res.label == net.label_targets, axis=0)) >= 0.95
    assert np.mean(np.all(res.hidden == net.hidden_targets, axis=0)) >= 0.95


def test_overlap_half_at_twice_hidden_matches_projection():
    vals = []
    for seed in range(5):
        net = _net(12, 100, 220, 200, seed)
        res = mesh_recall(net, net.stored.data)
        h, f = net.hidden_targets, net.stored.data
        # independent oracle: F times the projector onto the row space of H
        oracle = f @ (np.linalg.pinv(h) @ h)
        assert np.max(np.abs(net.w_fh @ h - oracle)) < 1e-8
        vals.append(presign_overlap(f, res.presign).mean())
    assert abs(np.mean(vals) - 0.5) <= 0.05


def test_overlap_curve_points():
    # N_L=12, N_H=150 keeps the first N_H hidden states full rank for every trial seed
    def boundary(n_patts, trial):
        net = _net(12, 150, 220, n_patts, trial)
        assert numerical_rank(net.hidden_targets) == 150
        return net

    (at_n,) = mesh_overlap_curve(boundary, [150], trials=5)
    assert abs(at_n.presign - 1) < 1e-8 and at_n.postsign == 1.0

    (at_4n,) = mesh_overlap_curve(lambda n, t: _net(18, 100, 500, n, t), [400], trials=10)
    assert abs(at_4n.presign - 0.25) <= 0.03
    assert at_4n.postsign >= at_4n.presign


def test_continuous_overlap_at_four_times_hidden():
    def make(n_patts, trial):
        return _net(18, 100, 500, n_patts, trial, continuous=True)

    (pt,) = mesh_overlap_curve(make, [400], trials=10)
    assert abs(pt.postsign - 0.5) <= 0.05


def test_continuous_recall_unit_norm():
    net = _net(15, 60, 300, 200, 0, continuous=True)
    res = mesh_recall(net, net.stored.data)
    assert np.allclose(np.linalg.norm(res.recovered, axis=0), 1.0)
    target = math.sqrt(60 / 200)
    assert abs(normalized_overlap(net.stored.data, res.recovered).mean() / target - 1) <= 0.10


def test_overlap_independent_of_label_count():
    means = []
    for n_label in (12, 15, 18):
        vals = []
        for seed in range(5):
            net = _net(n_label, 100, 250, 200, seed)
            vals.append(presign_overlap(net.stored.data, mesh_recall(net, net.stored.data).presign).mean())
        means.append(np.mean(vals))
    assert (max(means) - min(means)) / min(means) < 0.05


def test_hebbian_continuum_monotone():
    grid = (60, 90, 120, 180, 220)
    mi = []
    for n_patts in grid:
        vals = []
        for seed in range(3):
            net = _net(12, 60, 220, n_patts, seed, rule=HEBBIAN)
            res = mesh_recall(net, net.stored.data)
            vals.append(mi_dense_binary(overlap_binary(net.stored.data, res.recovered)).mean())
        mi.append(np.mean(vals))
    assert all(m > 0 for m in mi)
    assert all(a > b for a, b in zip(mi, mi[1:]))


def test_voronoi_false_for_swapped_pattern(sc150):
    pats = gen_dense_binary(100, 50, make_rng(3))
    net = mesh_store(sc150, pats)
    assert mesh_voronoi_check(net, 0)
    assert not mesh_voronoi_check(net, 0, recovered=pats.data[:, 1])


def test_voronoi_tie_is_false():
    stored = np.array([[1.0, 1.0], [1.0, -1.0]])
    recovered = np.array([[1.0], [0.0]])
    assert not voronoi_correct(stored, np.hstack([recovered, recovered]))[0]


def test_store_errors(sc150):
    with pytest.raises(ValueError):
        mesh_store(sc150, gen_dense_binary(50, 221, make_rng(0)))
    with pytest.raises(ValueError):
        mesh_store(sc150, gen_dense_binary(50, 10, make_rng(0)), rule="oja")
    with pytest.raises(TypeError):
        mesh_store(sc150, np.ones((5, 5)))


def test_recall_dimension_mismatch(sc150):
    net = mesh_store(sc150, gen_dense_binary(50, 10, make_rng(0)))
    with pytest.raises(ValueError):
        mesh_recall(net, np.ones(49))
    with pytest.raises(IndexError):
        mesh_voronoi_check(net, 10)
