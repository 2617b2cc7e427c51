"""Disorder sampling and walker Hamiltonian assembly.

The single-walker matrix has hopping h between neighboring vertices and
the vertex coupling J_v on the diagonal.  The two-walker matrix is the
same generator projected onto unordered pairs of distinct vertices: the
diagonal adds the two couplings, and a hop is present exactly when one
walker moves to a vacant neighboring vertex.  Hops onto the partner are
absent because doubly occupied states are not part of the basis.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .lattice import PairBasis, TorusLattice

# Disorder draws come from numpy's PCG64 stream seeded through SeedSequence,
# so a realization is reproducible from (L, J, gamma, h, seed) alone.
GENERATOR_NAME = "numpy.random.PCG64"


@dataclass
class DisorderRealization:
    """One sampled set of vertex couplings plus the uniform field strength."""

    L: int
    J: float
    gamma: float
    h: float
    seed: int
    J_v: np.ndarray

    def to_json(self) -> str:
        return json.dumps({
            "generator": GENERATOR_NAME,
            "L": self.L,
            "J": self.J,
            "gamma": self.gamma,
            "h": self.h,
            "seed": self.seed,
            "J_v": [float(x) for x in self.J_v],
        })

    @classmethod
    def from_json(cls, text: str) -> "DisorderRealization":
        obj = json.loads(text)
        return cls(L=obj["L"], J=obj["J"], gamma=obj["gamma"], h=obj["h"],
                   seed=obj["seed"], J_v=np.asarray(obj["J_v"], dtype=float))


@dataclass
class WalkerHamiltonian:
    """Real symmetric matrix in the single- or pair-walker basis."""

    basis: str  # "single" | "pair"
    matrix: np.ndarray
    lattice: TorusLattice
    realization: DisorderRealization
    pair_basis: Optional[PairBasis] = None

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]


def sample_disorder(L: int, J: float, gamma: float, h: float,
                    seed) -> DisorderRealization:
    """Draw L^2 couplings i.i.d. uniform on [J - gamma/2, J + gamma/2].

    gamma = 0 reproduces the clean system with every coupling exactly J.
    The seed may be an int or a tuple of ints (SeedSequence entropy).
    """
    if gamma < 0:
        raise ValueError(f"gamma must be >= 0, got {gamma}")
    if h <= 0:
        raise ValueError(f"h must be > 0, got {h}")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    J_v = J + gamma * (rng.random(L * L) - 0.5)
    return DisorderRealization(L=L, J=J, gamma=gamma, h=h, seed=seed, J_v=J_v)


def build_single(d: DisorderRealization) -> WalkerHamiltonian:
    """L^2 x L^2 matrix: hopping h on neighbor links, J_v on the diagonal."""
    lattice = TorusLattice(d.L)
    n = lattice.n_vertices
    nb = lattice.neighbor_table()
    H = np.zeros((n, n))
    rows = np.repeat(np.arange(n), 4)
    H[rows, nb.ravel()] = d.h
    H[np.arange(n), np.arange(n)] = d.J_v
    return WalkerHamiltonian(basis="single", matrix=H, lattice=lattice,
                             realization=d)


def build_two_walker(d: DisorderRealization) -> WalkerHamiltonian:
    """D x D matrix on unordered pairs, D = L^2 (L^2 - 1) / 2.

    Both walkers hop with the same amplitude h; the neighbor-hop relation
    is symmetric, so every entry is written from both sides and the matrix
    is exactly symmetric.  Requires L >= 3 (at L = 2 neighbor lists
    degenerate into double links).
    """
    if d.L < 3:
        raise ValueError(f"two-walker basis requires L >= 3, got {d.L}")
    lattice = TorusLattice(d.L)
    basis = PairBasis(lattice)
    nb = lattice.neighbor_table()
    idx = basis.index_lookup()
    D = basis.dimension
    v, w = basis.pairs[:, 0], basis.pairs[:, 1]
    H = np.zeros((D, D))
    rows = np.arange(D)
    for leg in range(4):
        for moved, fixed in ((v, w), (w, v)):
            target = nb[moved, leg]
            j = idx[target, fixed]  # -1 when the hop lands on the partner
            ok = j >= 0
            H[rows[ok], j[ok]] = d.h
    H[rows, rows] = d.J_v[v] + d.J_v[w]
    return WalkerHamiltonian(basis="pair", matrix=H, lattice=lattice,
                             realization=d, pair_basis=basis)
