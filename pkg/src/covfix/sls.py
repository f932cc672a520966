"""
Random safety-landing-site (SLS) style set-covering instances.

Candidate sites are columns with a random covering radius; demand points in the unit square are
rows. Demand points are the nodes of a random network and, in ``edges`` mode, points spread along
the edges of the nodes' nearest-neighbour graph, which makes m much larger than the node count.
This is a geometric analogue of the SLS instances, not a replica of any published set.
"""
from __future__ import annotations

import enum
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Any, Mapping

import numpy as np
import scipy.sparse as sp
from scipy.spatial import cKDTree
from scipy.spatial.distance import cdist

from .errors import CovfixError
from .instance import ScpInstance, validate

logger = logging.getLogger(__name__)

__all__ = ["Degenerate", "DensityMode", "InvalidParams", "SlsParams", "generate", "generate_batch"]

_CHUNK = 4096


class Degenerate(CovfixError):
    """No demand point is covered by any site."""

    def __init__(self, params: SlsParams):
        super().__init__(f"every row was uncovered for {params}")
        self.params = params


class InvalidParams(CovfixError):
    """Generator parameters are out of range."""


class DensityMode(str, enum.Enum):
    NODES = "nodes"
    EDGES = "edges"


@dataclass(frozen=True)
class SlsParams:
    """Generator parameters; `nu` defaults to 0.3·n nodes."""

    n: int
    nu: int | None = None
    r_min: float = 0.11
    r_max: float = 0.19
    seed: int = 0
    density_mode: DensityMode = DensityMode.EDGES
    rows_per_node: float = 17.0
    neighbours: int = 3
    cost_low: int = 1
    cost_high: int = 100

    def __post_init__(self):
        if self.n < 1:
            raise InvalidParams(f"n must be at least 1, got {self.n}")
        if self.nu is not None and self.nu < 1:
            raise InvalidParams(f"nu must be at least 1, got {self.nu}")
        if not 0 < self.r_min <= self.r_max:
            raise InvalidParams(f"need 0 < r_min <= r_max, got [{self.r_min}, {self.r_max}]")
        if not 1 <= self.cost_low <= self.cost_high:
            raise InvalidParams(f"bad cost range [{self.cost_low}, {self.cost_high}]")
        if self.neighbours < 1 or self.rows_per_node < 1:
            raise InvalidParams("neighbours and rows_per_node must be at least 1")
        object.__setattr__(self, "density_mode", DensityMode(self.density_mode))

    @property
    def node_count(self) -> int:
        return self.nu if self.nu is not None else max(1, round(0.3 * self.n))

    def update(self, config: Mapping[str, Any]) -> SlsParams:
        return replace(self, **config)


def generate(params: SlsParams) -> ScpInstance:
    """Build one instance; the same parameters always give the same instance."""
    coverage, costs = _draw(params)
    covered = np.diff(coverage.indptr) > 0
    discarded = int((~covered).sum())
    if discarded:
        logger.info("Discarded %d uncovered demand points of %d", discarded, coverage.shape[0])
    if not covered.any():
        raise Degenerate(params)
    coverage = coverage[np.flatnonzero(covered)]
    rows = [coverage.indices[a:b].tolist() for a, b in zip(coverage.indptr, coverage.indptr[1:])]
    return validate(len(rows), params.n, costs.tolist(), rows)


def generate_batch(params: SlsParams, count: int, jobs: int = 1) -> list[ScpInstance]:
    """Build `count` instances from seeds derived from `params.seed`; the first uses it as is."""
    batch = [replace(params, seed=derive_seed(params.seed, k)) for k in range(count)]
    if jobs > 1 and count > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(generate, batch))
    return [generate(item) for item in batch]


def derive_seed(seed: int, index: int) -> int:
    if index == 0:
        return seed
    state = np.random.SeedSequence(seed, spawn_key=(index,)).generate_state(1, np.uint64)
    return int(state[0])


def coverage_matrix(params: SlsParams) -> sp.csr_matrix:
    """Boolean demand-point × site coverage before uncovered points are discarded."""
    return _draw(params)[0]


def _draw(params: SlsParams) -> tuple[sp.csr_matrix, np.ndarray]:
    # Draw order is fixed so that radii scale monotonically with r_max for a given seed.
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(params.seed)))
    sites = rng.random((params.n, 2))
    spread = rng.random(params.n)
    nodes = rng.random((params.node_count, 2))
    costs = rng.integers(params.cost_low, params.cost_high + 1, size=params.n)

    radii = params.r_min + spread * (params.r_max - params.r_min)
    points = _demand_points(nodes, params)
    blocks = [
        sp.csr_matrix(cdist(points[k : k + _CHUNK], sites) <= radii)
        for k in range(0, len(points), _CHUNK)
    ]
    coverage = sp.vstack(blocks, format="csr")
    coverage.sort_indices()
    return coverage, costs


def _demand_points(nodes: np.ndarray, params: SlsParams) -> np.ndarray:
    if params.density_mode is DensityMode.NODES or len(nodes) < 2:
        return nodes
    edges = _neighbour_edges(nodes, params.neighbours)
    if not len(edges):
        return nodes
    target = round(params.rows_per_node * len(nodes))
    per_edge = math.ceil(max(target - len(nodes), 0) / len(edges))
    if per_edge == 0:
        return nodes
    steps = np.arange(1, per_edge + 1) / (per_edge + 1)
    starts = nodes[edges[:, 0]]
    ends = nodes[edges[:, 1]]
    along = starts[:, None, :] + steps[None, :, None] * (ends - starts)[:, None, :]
    return np.vstack([nodes, along.reshape(-1, 2)])


def _neighbour_edges(nodes: np.ndarray, k: int) -> np.ndarray:
    """Undirected k-nearest-neighbour edges as sorted (a, b) pairs with a < b."""
    k = min(k, len(nodes) - 1)
    _, neighbours = cKDTree(nodes).query(nodes, k=k + 1)
    pairs = {
        (min(a, int(b)), max(a, int(b)))
        for a, row in enumerate(neighbours)
        for b in row[1:]
        if a != int(b)
    }
    return np.array(sorted(pairs), dtype=np.int64).reshape(-1, 2)
