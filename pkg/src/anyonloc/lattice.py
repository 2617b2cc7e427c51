"""Torus geometry, walker bases, and pair-distance functions.

Everything downstream (Hamiltonian assembly, envelope fits, displacement
profiles) works with the vertex and pair indexings defined here, so the
conventions are fixed once: row-major vertex order, lexicographic unordered
pairs, minimal-image Euclidean metric.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np


@dataclass
class TorusLattice:
    """L x L square lattice of vertices with periodic boundaries.

    Vertices are indexed row-major: v = x + L*y with x, y in [0, L).
    Each vertex owns a right link and a down link, so there are 2*L^2
    links in total.  L >= 2 is required for two distinct endpoints per
    link; L >= 3 keeps the four neighbors of a vertex distinct.
    """

    L: int
    _neighbor_table: np.ndarray = field(init=False, repr=False)
    _distance_matrix: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.L < 2:
            raise ValueError(f"lattice size must be >= 2, got {self.L}")
        L = self.L
        xs = np.arange(L * L) % L
        ys = np.arange(L * L) // L
        self._neighbor_table = np.column_stack([
            (xs + 1) % L + L * ys,
            (xs - 1) % L + L * ys,
            xs + L * ((ys + 1) % L),
            xs + L * ((ys - 1) % L),
        ])
        dx = np.abs(xs[:, None] - xs[None, :])
        dy = np.abs(ys[:, None] - ys[None, :])
        dx = np.minimum(dx, L - dx)
        dy = np.minimum(dy, L - dy)
        self._distance_matrix = np.sqrt(dx * dx + dy * dy)

    @property
    def n_vertices(self) -> int:
        return self.L * self.L

    @property
    def n_links(self) -> int:
        return 2 * self.L * self.L

    def vertex_index(self, x: int, y: int) -> int:
        if not (0 <= x < self.L and 0 <= y < self.L):
            raise ValueError(f"coordinates ({x}, {y}) outside [0, {self.L})^2")
        return x + self.L * y

    def vertex_xy(self, v: int) -> tuple[int, int]:
        if not (0 <= v < self.n_vertices):
            raise ValueError(f"vertex {v} outside [0, {self.n_vertices})")
        return v % self.L, v // self.L

    def neighbors(self, v: int) -> list[int]:
        """The four periodic nearest neighbors of v (right, left, up, down)."""
        if not (0 <= v < self.n_vertices):
            raise ValueError(f"vertex {v} outside [0, {self.n_vertices})")
        return list(self._neighbor_table[v])

    def neighbor_table(self) -> np.ndarray:
        """(n_vertices, 4) array of neighbor indices; read-only view."""
        return self._neighbor_table

    def torus_distance(self, v: int, u: int) -> float:
        """Minimal-image Euclidean distance between vertices, in spacings."""
        return float(self._distance_matrix[v, u])

    def distance_matrix(self) -> np.ndarray:
        return self._distance_matrix


@dataclass
class PairBasis:
    """Ordered enumeration of unordered vertex pairs {v, v'} with v != v'.

    Dimension is L^2 (L^2 - 1) / 2.  Double occupancy never appears in the
    enumeration, which is how the hardcore constraint enters: the two-walker
    Hamiltonian is built directly in this basis.  Pairs are stored with
    v < v' in lexicographic order.
    """

    lattice: TorusLattice
    pairs: np.ndarray = field(init=False, repr=False)
    _index: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        n = self.lattice.n_vertices
        iu = np.triu_indices(n, k=1)
        self.pairs = np.column_stack(iu)
        self._index = np.full((n, n), -1, dtype=np.int64)
        ids = np.arange(self.pairs.shape[0])
        self._index[iu] = ids
        self._index[iu[1], iu[0]] = ids

    @property
    def dimension(self) -> int:
        return self.pairs.shape[0]

    def index_of(self, v: int, vp: int) -> int:
        if v == vp:
            raise ValueError(f"pair ({v}, {vp}) is doubly occupied")
        i = int(self._index[v, vp])
        if i < 0:
            raise ValueError(f"invalid pair ({v}, {vp})")
        return i

    def pair_of(self, i: int) -> tuple[int, int]:
        v, vp = self.pairs[i]
        return int(v), int(vp)

    def index_lookup(self) -> np.ndarray:
        """(n, n) symmetric lookup of pair indices, -1 on the diagonal."""
        return self._index


def pair_distance(lattice: TorusLattice,
                  a: tuple[int, int],
                  b: tuple[int, int]) -> float:
    """Distance between two walker pairs: best matching of endpoints.

    min{ d(a0,b0) + d(a1,b1), d(a0,b1) + d(a1,b0) } with d the
    minimal-image Euclidean vertex distance.  Symmetric in a and b and
    zero exactly when a == b as unordered pairs.
    """
    dm = lattice.distance_matrix()
    a0, a1 = a
    b0, b1 = b
    return float(min(dm[a0, b0] + dm[a1, b1], dm[a0, b1] + dm[a1, b0]))


def pair_distances_from(basis: PairBasis, ref: tuple[int, int]) -> np.ndarray:
    """Vector of pair_distance(each basis pair, ref), in basis order."""
    dm = basis.lattice.distance_matrix()
    v, vp = basis.pairs[:, 0], basis.pairs[:, 1]
    r0, r1 = ref
    return np.minimum(dm[v, r0] + dm[vp, r1], dm[v, r1] + dm[vp, r0])


@lru_cache(maxsize=None)
def max_pair_distance(L: int) -> float:
    """Maximum of pair_distance over all pairs of basis states at size L.

    pair_distance is invariant under translating both pairs by the same
    vector, so one endpoint of the first pair can be pinned to vertex 0
    and the scan is O(L^2 * D) instead of O(D^2).
    """
    lattice = TorusLattice(L)
    basis = PairBasis(lattice)
    dm = lattice.distance_matrix()
    v, vp = basis.pairs[:, 0], basis.pairs[:, 1]
    best = 0.0
    for a2 in range(1, lattice.n_vertices):
        d = np.minimum(dm[v, 0] + dm[vp, a2], dm[v, a2] + dm[vp, 0])
        best = max(best, float(d.max()))
    return best
