"""Sweep orchestration and CSV/JSON serialization."""

from concurrent.futures import ThreadPoolExecutor
import csv
from dataclasses import asdict, dataclass, field, fields
import io
import itertools
import json
import logging
import math
import os
import time

import numpy as np
import yaml

from . import __version__
from . import baselines as bl
from . import mesh as ms
from .metrics import (
    count_synapses,
    correlation,
    mi_bound_perinbit,
    mi_continuous,
    mi_dense_binary,
    mi_report,
    mi_sparse_patterns,
    overlap_binary,
    recovery_errors,
)
from .numerics import DEFAULT_RCOND, derive_seed, make_rng
from .patterns import corrupt_columns, gen_continuous, gen_dense_binary, gen_sparse_binary
from .scaffold import ScaffoldConfig, build_scaffold, scaffold_capacity

log = logging.getLogger(__name__)

MESH_MODELS = ("mesh_pinv", "mesh_hebbian", "mesh_continuous")
HOPFIELD_MODELS = ("hopfield_hebbian", "hopfield_pinv", "hopfield_bounded", "hopfield_sparse_input",
                   "hopfield_sparse_conn")
MODELS = MESH_MODELS + HOPFIELD_MODELS

_SIZE_KEYS = {
    "mesh": ("n_label", "k", "n_hidden", "n_feature"),
    "hopfield_hebbian": ("n",),
    "hopfield_pinv": ("n",),
    "hopfield_bounded": ("n", "bound", "lr"),
    "hopfield_sparse_input": ("n", "p"),
    "hopfield_sparse_conn": ("n", "gamma", "mask_seed"),
}
_SIZE_DEFAULTS = {"bound": bl.DEFAULT_BOUND, "lr": bl.DEFAULT_LR, "mask_seed": 0}


class SpecError(ValueError):
    pass


@dataclass
class SweepSpec:
    model: str
    sizes: dict
    n_patts_grid: list
    noise_frac: float = 0.0
    trials: int = 1
    master_seed: int = 0
    max_steps: int = 5
    max_sweeps: int = 50
    rcond: float = DEFAULT_RCOND

    def __post_init__(self):
        if self.model not in MODELS:
            raise SpecError(f"unknown model {self.model!r}; choose from {', '.join(MODELS)}")
        if not self.n_patts_grid:
            raise SpecError("n_patts_grid must be non-empty")
        if self.trials < 1:
            raise SpecError("trials must be >= 1")
        if not 0 <= self.noise_frac <= 1:
            raise SpecError("noise_frac must be in [0, 1]")
        self.n_patts_grid = [int(n) for n in self.n_patts_grid]
        key = "mesh" if self.model in MESH_MODELS else self.model
        sizes = {k: v for k, v in _SIZE_DEFAULTS.items() if k in _SIZE_KEYS[key]}
        sizes.update(self.sizes)
        missing = [k for k in _SIZE_KEYS[key] if k not in sizes]
        if missing:
            raise SpecError(f"{self.model}: missing sizes {missing}")
        self.sizes = {k: sizes[k] for k in _SIZE_KEYS[key]}

    @classmethod
    def from_dict(cls, d):
        known = {f.name for f in fields(cls)}
        extra = set(d) - known
        if extra:
            raise SpecError(f"unknown spec keys: {sorted(extra)}")
        try:
            return cls(**d)
        except TypeError as exc:
            raise SpecError(str(exc)) from exc

    def dims_label(self):
        return ";".join(f"{k}={v}" for k, v in self.sizes.items())


def load_specs(path):
    """Read one spec or a ``sweeps:`` list from a YAML/JSON file."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = yaml.safe_load(fh)
    except (OSError, yaml.YAMLError) as exc:
        raise SpecError(f"cannot read spec {path}: {exc}") from exc
    if isinstance(doc, dict) and "sweeps" in doc:
        items = doc["sweeps"]
    elif isinstance(doc, dict):
        items = [doc]
    elif isinstance(doc, list):
        items = doc
    else:
        raise SpecError("spec file must hold a mapping or a list of mappings")
    return [SweepSpec.from_dict(dict(it)) for it in items]


def default_specs(master_seed=0, trials=3):
    """Desk-scale suite: the MESH continuum next to a Hebbian cliff and a pinv Hopfield."""
    mesh_sizes = {"n_label": 12, "k": 3, "n_hidden": 60, "n_feature": 220}
    mesh_grid = [20, 40, 60, 90, 120, 180, 220]
    return [
        SweepSpec("mesh_pinv", dict(mesh_sizes), mesh_grid, 0.0, trials, master_seed),
        SweepSpec("mesh_pinv", dict(mesh_sizes), mesh_grid, 0.05, trials, master_seed),
        SweepSpec("mesh_hebbian", dict(mesh_sizes), mesh_grid, 0.0, trials, master_seed),
        SweepSpec("mesh_continuous", {"n_label": 15, "k": 3, "n_hidden": 60, "n_feature": 300},
                  [30, 60, 120, 240], 0.0, trials, master_seed),
        SweepSpec("hopfield_hebbian", {"n": 200}, [10, 20, 28, 40, 60], 0.05, trials, master_seed),
        SweepSpec("hopfield_pinv", {"n": 200}, [50, 100, 150, 200], 0.05, trials, master_seed),
    ]


@dataclass
class SweepRow:
    model: str
    dims: str
    n_patts: int
    noise_frac: float
    trial: int
    presign_overlap: float | None = None
    postsign_overlap: float | None = None
    mi_per_input_bit: float | None = None
    mi_total: float | None = None
    mi_per_synapse: float | None = None
    bound_per_input_bit: float | None = None
    n_synapses: int | None = None
    feature_error: float | None = None
    label_error: float | None = None
    hidden_error: float | None = None
    voronoi_correct_fraction: float | None = None
    converged_fraction: float | None = None
    status: str = "ok"
    notes: str = ""
    wall_time: float | None = None


ROW_FIELDS = [f.name for f in fields(SweepRow)]
NUMERIC_FIELDS = [n for n in ROW_FIELDS
                  if n not in ("model", "dims", "n_patts", "noise_frac", "trial", "status", "notes", "wall_time")]


@dataclass
class SweepResult:
    specs: list
    rows: list = field(default_factory=list)


def _mesh_cell(spec, n_patts, rng, row):
    s = spec.sizes
    cfg = ScaffoldConfig(s["n_label"], s["k"], s["n_hidden"], seed=int(rng.integers(2**62)))
    sc = build_scaffold(cfg)
    nf = s["n_feature"]
    if spec.model == "mesh_continuous":
        pats = gen_continuous(nf, n_patts, rng)
    else:
        pats = gen_dense_binary(nf, n_patts, rng)
    rule = ms.HEBBIAN if spec.model == "mesh_hebbian" else ms.PSEUDOINVERSE
    net = ms.mesh_store(sc, pats, rule=rule, rcond=spec.rcond)
    f = pats.data
    cues = corrupt_columns(f, spec.noise_frac, rng)
    res = ms.mesh_recall(net, cues, spec.max_steps)

    row.presign_overlap = float(np.mean(ms.presign_overlap(f, res.presign)))
    if net.mode == ms.BINARY:
        m = overlap_binary(f, res.recovered)
        per_pattern = mi_dense_binary(m)
        units = "bits"
        row.feature_error = float(np.mean(recovery_errors(f, None, res.recovered, "feature").normalized))
    else:
        m = correlation(f, res.recovered)
        per_pattern = mi_continuous(m)
        units = "nats"
    row.postsign_overlap = float(np.mean(m))
    syn = count_synapses("mesh", n_label=s["n_label"], n_hidden=s["n_hidden"], n_feature=nf).learnable
    bound = mi_bound_perinbit(s["n_hidden"], nf, s["n_label"], n_patts)
    rep = mi_report(per_pattern, nf, syn, bound, units)
    row.mi_per_input_bit, row.mi_total, row.mi_per_synapse = rep.mi_per_input_bit, rep.mi_total, rep.mi_per_synapse
    row.bound_per_input_bit, row.n_synapses = bound, syn
    row.label_error = float(np.mean(recovery_errors(net.label_targets, None, res.label, "label", k=s["k"]).normalized))
    row.hidden_error = float(np.mean(recovery_errors(net.hidden_targets, None, res.hidden, "hidden").normalized))
    row.voronoi_correct_fraction = float(np.mean(ms.voronoi_correct(f, res.recovered)))
    row.notes = f"units={units};steps={res.steps_run}"


def _hopfield_cell(spec, n_patts, rng, row):
    s = spec.sizes
    n = s["n"]
    notes = []
    if spec.model == "hopfield_sparse_input":
        pats = gen_sparse_binary(n, n_patts, s["p"], rng)
    else:
        pats = gen_dense_binary(n, n_patts, rng)
    if spec.model == "hopfield_hebbian":
        net = bl.train_hebbian(pats)
    elif spec.model == "hopfield_pinv":
        net = bl.train_pinv(pats, spec.rcond)
    elif spec.model == "hopfield_bounded":
        net = bl.train_bounded(pats, s["bound"], s["lr"])
    elif spec.model == "hopfield_sparse_conn":
        net = bl.train_sparse_conn(pats, s["gamma"], s["mask_seed"])
    else:
        net = bl.train_sparse_input(pats, s["p"])
    cues = corrupt_columns(pats.data, spec.noise_frac, rng)
    order_seed = int(rng.integers(2**62))
    if spec.model == "hopfield_sparse_input":
        theta = bl.choose_threshold(net, pats, cues, max_sweeps=spec.max_sweeps, seed=order_seed)
        net = net.with_params(theta=theta)
        notes.append(f"theta={theta:.6g}")
    out = bl.hopfield_recall(net, cues, max_sweeps=spec.max_sweeps, seed=order_seed)
    x = pats.data
    if net.zero_one:
        per_pattern = mi_sparse_patterns(x, out.state)
        row.postsign_overlap = float(np.mean(correlation(x, out.state)))
    else:
        m = overlap_binary(x, out.state)
        per_pattern = mi_dense_binary(m)
        row.postsign_overlap = float(np.mean(m))
    syn = count_synapses("hopfield", n=n, gamma=s.get("gamma", 1.0)).learnable
    bound = min(1.0, syn / (n_patts * n))
    rep = mi_report(per_pattern, n, syn, bound)
    row.mi_per_input_bit, row.mi_total, row.mi_per_synapse = rep.mi_per_input_bit, rep.mi_total, rep.mi_per_synapse
    row.bound_per_input_bit, row.n_synapses = bound, syn
    row.feature_error = float(np.mean(recovery_errors(x, None, out.state, "feature").normalized))
    row.voronoi_correct_fraction = float(np.mean(ms.voronoi_correct(x, out.state)))
    row.converged_fraction = float(np.mean(out.converged))
    notes.append(f"sweeps={out.sweeps}")
    row.notes = ";".join(notes)


def cell_seed(spec, n_patts, trial):
    """Seed depends on (master seed, model, N_patts, trial) so grid order does not matter."""
    return derive_seed(spec.master_seed, spec.model, n_patts, trial, int(round(spec.noise_frac * 1e6)))


def run_cell(spec, n_patts, trial):
    row = SweepRow(spec.model, spec.dims_label(), n_patts, spec.noise_frac, trial)
    t0 = time.perf_counter()
    try:
        rng = make_rng(cell_seed(spec, n_patts, trial))
        if spec.model in MESH_MODELS:
            _mesh_cell(spec, n_patts, rng, row)
        else:
            _hopfield_cell(spec, n_patts, rng, row)
    except Exception as exc:  # failures are recorded as data
        log.warning("cell %s N_patts=%d trial=%d failed: %s", spec.model, n_patts, trial, exc)
        row.status = f"error: {type(exc).__name__}: {exc}"
    row.wall_time = time.perf_counter() - t0
    return row


def run_sweep(spec, threads=1):
    """All (grid point, trial) cells of one or more specs, rows ordered by spec, cell, trial."""
    specs = spec if isinstance(spec, (list, tuple)) else [spec]
    jobs = [(sp, n, t) for sp in specs for n in sp.n_patts_grid for t in range(sp.trials)]
    if threads == 0:
        threads = os.cpu_count() or 1
    if threads <= 1:
        rows = [run_cell(*job) for job in jobs]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(lambda job: run_cell(*job), jobs))  # map preserves job order
    return SweepResult(list(specs), rows)


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        if math.isnan(v):
            return ""
        if math.isinf(v):
            return "infinite" if v > 0 else "-infinite"
        return repr(v)
    return str(v)


def to_csv(result, timing=False):
    """CSV text; wall_time is blank unless ``timing`` so identical seeds give identical bytes."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(ROW_FIELDS)
    for row in result.rows:
        d = asdict(row)
        if not timing:
            d["wall_time"] = None
        w.writerow([_fmt(d[k]) for k in ROW_FIELDS])
    return buf.getvalue()


def _json_safe(v):
    if isinstance(v, float):
        if math.isnan(v):
            return None
        if math.isinf(v):
            return "infinite"
    return v


def summarize(result):
    cells = {}
    for row in result.rows:
        key = (row.model, row.dims, row.noise_frac, row.n_patts)
        cells.setdefault(key, []).append(row)
    out = []
    for (model, dims, noise, n_patts), rows in cells.items():
        agg = {"model": model, "dims": dims, "noise_frac": noise, "n_patts": n_patts, "trials": len(rows),
               "errors": sum(r.status != "ok" for r in rows)}
        for name in NUMERIC_FIELDS:
            vals = [getattr(r, name) for r in rows if r.status == "ok" and getattr(r, name) is not None]
            if not vals:
                continue
            arr = np.asarray(vals, dtype=float)
            if np.any(np.isinf(arr)):
                agg[name] = {"mean": "infinite", "std": None}
            else:
                agg[name] = {"mean": float(arr.mean()), "std": float(arr.std())}
        out.append(agg)
    return {
        "library_version": __version__,
        "master_seeds": sorted({sp.master_seed for sp in result.specs}),
        "specs": [{k: _json_safe(v) for k, v in asdict(sp).items()} for sp in result.specs],
        "cells": out,
        "total_wall_time": sum(r.wall_time or 0.0 for r in result.rows),
    }


def write_outputs(result, out_dir, timing=False, stem="sweep"):
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, f"{stem}.csv")
    json_path = os.path.join(out_dir, f"{stem}_summary.json")
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        fh.write(to_csv(result, timing))
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump(summarize(result), fh, indent=2, sort_keys=False)
    return csv_path, json_path


def run_scaffold_capacity(n_label_grid, k_grid, n_hidden_grid, noise_frac=0.2, error_threshold=0.03, trials=1,
                          seed=0, label_limit=None, density=None, hebbian_over="all"):
    """Capacity table over (N_L, k, N_H); ``density`` sets k = round(d * N_L) instead of ``k_grid``."""
    configs = []
    for nl in n_label_grid:
        ks = [max(1, int(round(density * nl)))] if density is not None else k_grid
        for k, nh in itertools.product(ks, n_hidden_grid):
            configs.append(ScaffoldConfig(nl, k, nh, seed, label_limit))
    return scaffold_capacity(configs, noise_frac, error_threshold, trials, hebbian_over=hebbian_over)


def capacity_csv(rows):
    buf = io.StringIO()
    names = ["n_label", "k", "n_hidden", "n_states", "capacity", "mean_error_all"]
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(names)
    for r in rows:
        w.writerow([_fmt(getattr(r, n)) for n in names])
    return buf.getvalue()
