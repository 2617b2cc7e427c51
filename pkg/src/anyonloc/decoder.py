"""Coarse-grained parity error correction and the critical-density solve.

The lattice is partitioned into squares of side lam, giving an m x m torus
of squares (m = L / lam).  Anyons crossing square boundaries flip parities;
the error model is i.i.d. flips of the 2 m^2 coarse edges at rate p.  A
minimum-weight matching of the odd-parity squares attempts to undo the
flips; decoding fails when the residual cycle winds around either handle.
Monte Carlo over p and m locates the threshold p_c, and the tail bound
(lam/2)^7 exp(-lam / 2l) = p_c is solved for the critical square size
lam_c, giving the critical anyon density rho_c = lam_c^(-2).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .util import ordered_map


class NoCrossingError(ValueError):
    """Failure-rate curves never cross inside the sampled grid."""


# ---------------------------------------------------------------------------
# geometry

@dataclass
class SquarePartition:
    """Partition of an L x L vertex lattice into side-lam squares.

    lam must divide L; the squares form an m x m torus with m = L / lam.
    Square ids are sx + m * sy, mirroring the vertex convention.
    """

    L: int
    lam: int

    def __post_init__(self) -> None:
        if self.lam < 1 or self.L % self.lam != 0:
            raise ValueError(f"square side {self.lam} must divide L={self.L}")

    @property
    def m(self) -> int:
        return self.L // self.lam

    def square_of_vertex(self, v: int) -> int:
        x, y = v % self.L, v // self.L
        return (x // self.lam) + self.m * (y // self.lam)

    def vertex_square_map(self) -> np.ndarray:
        return np.array([self.square_of_vertex(v) for v in range(self.L ** 2)])


@dataclass
class EdgeFlips:
    """Flip state of the 2 m^2 coarse edges on the m x m torus of squares.

    h[x, y] is the boundary between squares (x, y) and ((x+1) mod m, y);
    v[x, y] between (x, y) and (x, (y+1) mod m).
    """

    m: int
    h: np.ndarray
    v: np.ndarray

    def __xor__(self, other: "EdgeFlips") -> "EdgeFlips":
        if other.m != self.m:
            raise ValueError("size mismatch")
        return EdgeFlips(self.m, self.h ^ other.h, self.v ^ other.v)

    @property
    def count(self) -> int:
        return int(self.h.sum() + self.v.sum())


@dataclass
class CoarseSyndrome:
    """Parity bit per square; odd squares are the matching defects."""

    m: int
    parity: np.ndarray          # (m, m) bool, indexed [x, y]
    defects: list[int] = field(init=False)

    def __post_init__(self) -> None:
        # ravel order F makes flat index x + m * y
        self.defects = [int(s) for s in np.flatnonzero(self.parity.ravel(order="F"))]
        assert len(self.defects) % 2 == 0, "odd defect count is impossible"


def sample_edge_flips(m: int, p: float, seed) -> EdgeFlips:
    """Flip each coarse edge independently with probability p."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"flip probability must be in [0, 1], got {p}")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    h = rng.random((m, m)) < p
    v = rng.random((m, m)) < p
    return EdgeFlips(m=m, h=h, v=v)


def syndrome_from_flips(flips: EdgeFlips) -> CoarseSyndrome:
    """Square parities: each flipped edge toggles both endpoint squares."""
    h, v = flips.h, flips.v
    parity = h ^ np.roll(h, 1, axis=0) ^ v ^ np.roll(v, 1, axis=1)
    return CoarseSyndrome(m=flips.m, parity=parity)


def coarse_distance(m: int, a: int, b: int) -> int:
    """L1 torus distance between squares (shortest path in coarse edges)."""
    dx = abs(a % m - b % m)
    dy = abs(a // m - b // m)
    return min(dx, m - dx) + min(dy, m - dy)


# ---------------------------------------------------------------------------
# matching

EXACT_MATCH_CUTOFF = 24  # branch-and-bound below, greedy + 2-opt above


def _greedy_pairs(n: int, dm) -> list[tuple[int, int]]:
    alive = list(range(n))
    pairs = []
    while alive:
        best = None
        for ii in range(len(alive)):
            for jj in range(ii + 1, len(alive)):
                i, j = alive[ii], alive[jj]
                if best is None or dm[i][j] < best[0]:
                    best = (dm[i][j], i, j)
        _, i, j = best
        pairs.append((i, j))
        alive.remove(i)
        alive.remove(j)
    return pairs


def _two_opt(pairs: list[tuple[int, int]], dm) -> list[tuple[int, int]]:
    """Pair-swap descent: repair crossings the greedy pass left behind."""
    pairs = list(pairs)
    improved = True
    while improved:
        improved = False
        for ii in range(len(pairs)):
            for jj in range(ii + 1, len(pairs)):
                a, b = pairs[ii]
                c, d = pairs[jj]
                cur = dm[a][b] + dm[c][d]
                alt1 = dm[a][c] + dm[b][d]
                alt2 = dm[a][d] + dm[b][c]
                if alt1 < cur and alt1 <= alt2:
                    pairs[ii], pairs[jj] = (a, c), (b, d)
                    improved = True
                elif alt2 < cur:
                    pairs[ii], pairs[jj] = (a, d), (b, c)
                    improved = True
    return pairs


def _branch_and_bound(n: int, dm, init_pairs, init_cost):
    """Exact minimum-weight pairing; the heuristic result seeds the bound."""
    best_cost = init_cost
    best_pairs = init_pairs

    def lower_bound(rest):
        return sum(min(dm[i][j] for j in rest if j != i) for i in rest) / 2.0

    def rec(rest, cost, pairs):
        nonlocal best_cost, best_pairs
        if not rest:
            if cost < best_cost:
                best_cost = cost
                best_pairs = list(pairs)
            return
        if cost + lower_bound(rest) >= best_cost:
            return
        i = rest[0]
        for j in sorted(rest[1:], key=lambda j: dm[i][j]):
            c2 = cost + dm[i][j]
            if c2 >= best_cost:
                break  # candidates are sorted; nothing better follows
            pairs.append((i, j))
            rec([k for k in rest if k != i and k != j], c2, pairs)
            pairs.pop()

    rec(list(range(n)), 0.0, [])
    return best_pairs


def minimum_weight_pairs(defects: list[int], m: int,
                         exact_cutoff: int = EXACT_MATCH_CUTOFF):
    """Pair up defects minimizing total coarse path length.

    Exact (branch-and-bound) up to exact_cutoff defects, seeded by a
    greedy nearest-neighbor pairing improved with 2-opt swaps; the
    heuristic alone is used beyond the cutoff.
    """
    n = len(defects)
    if n % 2 != 0:
        raise ValueError(f"cannot pair an odd number of defects ({n})")
    if n == 0:
        return []
    dm = [[coarse_distance(m, a, b) for b in defects] for a in defects]
    pairs = _two_opt(_greedy_pairs(n, dm), dm)
    if n <= exact_cutoff:
        cost = sum(dm[i][j] for i, j in pairs)
        pairs = _branch_and_bound(n, dm, pairs, cost)
    return [(defects[i], defects[j]) for i, j in pairs]


def _paths_to_edges(pairs, m: int) -> EdgeFlips:
    """Connect each pair by a shortest coarse path: x leg then y leg.

    Wrap direction follows the shorter way around; ties go positive.
    """
    h = np.zeros((m, m), dtype=bool)
    v = np.zeros((m, m), dtype=bool)
    for a, b in pairs:
        ax, ay = a % m, a // m
        bx, by = b % m, b // m
        dx = (bx - ax) % m
        step, n = (1, dx) if dx <= m - dx else (-1, m - dx)
        x = ax
        for _ in range(n):
            if step == 1:
                h[x, ay] ^= True
                x = (x + 1) % m
            else:
                x = (x - 1) % m
                h[x, ay] ^= True
        dy = (by - ay) % m
        step, n = (1, dy) if dy <= m - dy else (-1, m - dy)
        y = ay
        for _ in range(n):
            if step == 1:
                v[bx, y] ^= True
                y = (y + 1) % m
            else:
                y = (y - 1) % m
                v[bx, y] ^= True
    return EdgeFlips(m=m, h=h, v=v)


def match_syndrome(syndrome: CoarseSyndrome,
                   exact_cutoff: int = EXACT_MATCH_CUTOFF) -> EdgeFlips:
    """Correction edges: shortest paths along a minimum-weight pairing."""
    pairs = minimum_weight_pairs(syndrome.defects, syndrome.m, exact_cutoff)
    return _paths_to_edges(pairs, syndrome.m)


def winding(flips: EdgeFlips, cut_x: int = 0, cut_y: int = 0) -> tuple[bool, bool]:
    """Crossing parities of a vertical cut (after column cut_x) and a
    horizontal cut (after row cut_y).  Well defined on syndrome-free
    configurations, where they are independent of the cut position."""
    wx = bool(flips.h[cut_x % flips.m, :].sum() % 2)
    wy = bool(flips.v[:, cut_y % flips.m].sum() % 2)
    return wx, wy


def logical_failure(flips: EdgeFlips, correction: EdgeFlips,
                    cut_x: int = 0, cut_y: int = 0) -> bool:
    """True when flips + correction wind around either torus handle."""
    residual = flips ^ correction
    if syndrome_from_flips(residual).defects:
        raise ValueError("correction leaves a nontrivial residual syndrome")
    wx, wy = winding(residual, cut_x, cut_y)
    return wx or wy


# ---------------------------------------------------------------------------
# Monte Carlo

def _trial_entropy(seed, extra: tuple) -> tuple:
    base = tuple(seed) if isinstance(seed, tuple) else (seed,)
    return base + extra


def _run_trials(m: int, p: float, n_trials: int, seed,
                exact_cutoff: int = EXACT_MATCH_CUTOFF) -> int:
    failures = 0
    for trial in range(n_trials):
        flips = sample_edge_flips(m, p, _trial_entropy(seed, (trial,)))
        correction = match_syndrome(syndrome_from_flips(flips), exact_cutoff)
        if logical_failure(flips, correction):
            failures += 1
    return failures


def estimate_logical_rate(m: int, p: float, n_trials: int, seed,
                          exact_cutoff: int = EXACT_MATCH_CUTOFF):
    """Monte Carlo logical failure rate and its binomial standard error.

    Trial k draws its flips from the seed (seed, k), so results do not
    depend on how trials are scheduled.
    """
    if n_trials < 100:
        raise ValueError(f"need at least 100 trials, got {n_trials}")
    failures = _run_trials(m, p, n_trials, seed, exact_cutoff)
    rate = failures / n_trials
    stderr = math.sqrt(rate * (1.0 - rate) / n_trials)
    return rate, stderr


def _point_task(args) -> int:
    m, p, n_trials, seed, i_m, i_p, exact_cutoff = args
    return _run_trials(m, p, n_trials, _trial_entropy(seed, (i_m, i_p)),
                       exact_cutoff)


def _pair_crossing(p_grid, rate_small, rate_large) -> float:
    """First p where the larger size's curve rises through the smaller's."""
    diff = [rl - rs for rs, rl in zip(rate_small, rate_large)]
    if diff[0] > 0:
        raise NoCrossingError(
            "larger size already fails more at the start of the grid")
    for i in range(len(diff) - 1):
        a, b = diff[i], diff[i + 1]
        if a < 0 < b:
            return p_grid[i] + (p_grid[i + 1] - p_grid[i]) * (-a) / (b - a)
        if a < 0 and b == 0:
            return p_grid[i + 1]
        if a == 0 and b > 0:
            return p_grid[i]
    raise NoCrossingError("failure-rate curves do not cross inside the grid")


def crossings_from_curves(m_list, p_grid, rates):
    """Per successive-size crossing points from failure-rate curves.

    rates is indexed [size][grid point].  Raises NoCrossingError naming
    the first size pair whose curves never cross.
    """
    crossings = []
    for i in range(len(m_list) - 1):
        try:
            p = _pair_crossing(p_grid, rates[i], rates[i + 1])
        except NoCrossingError as exc:
            raise NoCrossingError(
                f"no crossing for sizes ({m_list[i]}, {m_list[i + 1]}): {exc}"
            ) from exc
        crossings.append((m_list[i], m_list[i + 1], float(p)))
    return crossings


@dataclass
class ThresholdEstimate:
    """Failure-rate curves, their pairwise crossings, and the p_c estimate."""

    m_list: list[int]
    p_grid: list[float]
    n_trials: int
    seed: int
    failures: np.ndarray   # (sizes, grid)
    rates: np.ndarray
    stderrs: np.ndarray
    crossings: list        # (m_small, m_large, p_cross)
    estimate: float        # mean of the pairwise crossings
    spread: float          # max - min of the pairwise crossings


def estimate_threshold(m_list, p_grid, n_trials: int, seed,
                       workers: int = 1,
                       exact_cutoff: int = EXACT_MATCH_CUTOFF) -> ThresholdEstimate:
    """Threshold from crossings of failure-rate curves at successive sizes."""
    if len(m_list) < 2:
        raise ValueError("need at least two sizes to locate a crossing")
    if n_trials < 100:
        raise ValueError(f"need at least 100 trials, got {n_trials}")
    tasks = [(m, float(p), n_trials, seed, i_m, i_p, exact_cutoff)
             for i_m, m in enumerate(m_list)
             for i_p, p in enumerate(p_grid)]
    counts = ordered_map(_point_task, tasks, workers)
    failures = np.array(counts, dtype=np.int64).reshape(len(m_list), len(p_grid))
    rates = failures / n_trials
    stderrs = np.sqrt(rates * (1.0 - rates) / n_trials)
    crossings = crossings_from_curves(list(m_list), list(p_grid), rates)
    ps = [c[2] for c in crossings]
    return ThresholdEstimate(
        m_list=list(m_list), p_grid=[float(p) for p in p_grid],
        n_trials=n_trials, seed=seed, failures=failures, rates=rates,
        stderrs=stderrs, crossings=crossings,
        estimate=float(np.mean(ps)), spread=float(max(ps) - min(ps)))


# ---------------------------------------------------------------------------
# critical square size and density

@dataclass
class LambdaCResult:
    """Root of (lam/2)^7 exp(-lam / 2l) = p_c on the decreasing branch."""

    l: float
    p_c: float
    lambda_c: Optional[float]
    always_correctable: bool


def _log_escape_bound(lam: float, l: float) -> float:
    return 7.0 * math.log(lam / 2.0) - lam / (2.0 * l)


def solve_lambda_c(l: float, p_c: float) -> LambdaCResult:
    """Critical square side: bisection on the decreasing branch lam > 14 l.

    The bound (lam/2)^7 exp(-lam / 2l) peaks at lam = 14 l; only beyond the
    peak does a larger square leak less.  If even the peak value is below
    p_c there is no root and every square size is already correctable,
    reported through the always_correctable flag.
    """
    if l <= 0:
        raise ValueError(f"localization length must be positive, got {l}")
    if not 0.0 < p_c < 1.0:
        raise ValueError(f"threshold must be in (0, 1), got {p_c}")
    log_pc = math.log(p_c)
    lo = 14.0 * l
    if _log_escape_bound(lo, l) < log_pc:
        return LambdaCResult(l=l, p_c=p_c, lambda_c=None, always_correctable=True)
    hi = 2.0 * lo
    while _log_escape_bound(hi, l) >= log_pc:
        hi *= 2.0
    # f(lo) >= p_c > f(hi) and f is strictly decreasing on [14 l, inf)
    while (hi - lo) > 1e-12 * hi:
        mid = 0.5 * (lo + hi)
        if _log_escape_bound(mid, l) >= log_pc:
            lo = mid
        else:
            hi = mid
    return LambdaCResult(l=l, p_c=p_c, lambda_c=0.5 * (lo + hi),
                         always_correctable=False)


@dataclass
class CriticalDensityCurve:
    """(l, lambda_c, rho_c) triples at a fixed threshold p_c."""

    p_c: float
    entries: list  # (l, lambda_c, rho_c)

    def to_json(self) -> str:
        return json.dumps({"p_c": self.p_c,
                           "entries": [list(e) for e in self.entries]})


def critical_density_curve(l_list, p_c: float) -> CriticalDensityCurve:
    """Critical anyon density rho_c = lambda_c^(-2) per localization length."""
    entries = []
    for l in l_list:
        res = solve_lambda_c(float(l), p_c)
        if res.always_correctable:
            raise ValueError(
                f"l={l}: escape bound never reaches p_c={p_c} "
                "(always correctable); no finite lambda_c")
        lam = res.lambda_c
        entries.append((float(l), lam, lam ** -2))
    rhos = [e[2] for e in entries]
    ls = [e[0] for e in entries]
    if sorted(set(ls)) == ls and any(r2 >= r1 for r1, r2 in zip(rhos, rhos[1:])):
        raise AssertionError("rho_c must decrease strictly in l")
    return CriticalDensityCurve(p_c=p_c, entries=entries)
