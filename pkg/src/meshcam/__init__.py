"""MESH content-addressable memory with Hopfield-family baselines and recall metrics."""

__version__ = "0.1.0"

from .numerics import erf, make_rng, pseudoinverse, sgn, topk
from .patterns import PatternSet, corrupt, gen_continuous, gen_dense_binary, gen_khot_labels, gen_sparse_binary
from .scaffold import Scaffold, ScaffoldConfig, build_scaffold, scaffold_capacity, scaffold_step
from .mesh import MeshNetwork, RecallResult, mesh_recall, mesh_store, mesh_voronoi_check
