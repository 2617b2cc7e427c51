"""Eigensystems and localization lengths of walker Hamiltonians.

A localized eigenstate decays as |amplitude| <= exp(-d / 2l) away from its
peak basis state.  The length l is extracted by binning amplitudes by pair
distance from the peak, taking the envelope (max per unit-width bin), and
fitting ln(envelope) against distance.  The per-Hamiltonian length is the
maximum over all non-delocalized eigenstates; disorder averages exclude
samples in which any state is flagged delocalized.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg

from .hamiltonian import WalkerHamiltonian, build_two_walker, sample_disorder
from .lattice import max_pair_distance, pair_distances_from
from .util import ordered_map

AMPLITUDE_FLOOR = 1e-12   # double-precision noise floor in eigensolves
SLOPE_THRESHOLD = -1e-3   # fits flatter than this are not localized


@dataclass
class EigenSystem:
    """Full spectrum of a WalkerHamiltonian: ascending values, column vectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    hamiltonian: Optional[WalkerHamiltonian] = None

    @property
    def dimension(self) -> int:
        return self.eigenvalues.shape[0]


@dataclass
class StateFit:
    """Envelope fit for one eigenstate."""

    state: int
    peak: tuple[int, int]
    l: Optional[float]
    slope: Optional[float]
    slope_stderr: Optional[float]
    intercept: Optional[float]  # envelope amplitude extrapolated to d = 0
    n_bins: int
    delocalized: bool
    reason: str = ""


@dataclass
class LocalizationReport:
    """Per-state fits plus the Hamiltonian-level summary."""

    fits: list[StateFit]
    l: Optional[float]            # max over non-delocalized states
    delocalized: bool             # any state delocalized
    fraction_delocalized: float
    dimension: int

    def to_json(self) -> str:
        return json.dumps({
            "dimension": self.dimension,
            "l": self.l,
            "delocalized": self.delocalized,
            "fraction_delocalized": self.fraction_delocalized,
            "states": [{
                "state": f.state,
                "peak": list(f.peak),
                "l": f.l,
                "slope": f.slope,
                "slope_stderr": f.slope_stderr,
                "n_bins": f.n_bins,
                "delocalized": f.delocalized,
                "reason": f.reason,
            } for f in self.fits],
        })


def diagonalize(H: WalkerHamiltonian) -> EigenSystem:
    """Full symmetric eigendecomposition with residual checks.

    Raises on non-symmetric input or solver failure; verifies
    orthonormality to 1e-9 and reconstruction to 1e-8 * max |eigenvalue|.
    """
    M = H.matrix
    if not np.array_equal(M, M.T):
        raise ValueError("Hamiltonian matrix is not symmetric")
    try:
        vals, vecs = scipy.linalg.eigh(M)
    except scipy.linalg.LinAlgError as exc:  # pragma: no cover
        raise RuntimeError(f"eigensolver failed to converge: {exc}") from exc
    eye_err = np.abs(vecs.T @ vecs - np.eye(M.shape[0])).max()
    if eye_err > 1e-9:
        raise RuntimeError(f"eigenvector orthonormality residual {eye_err:.3e}")
    scale = max(np.abs(vals).max(), 1.0)
    rec_err = np.abs(M @ vecs - vecs * vals).max()
    if rec_err > 1e-8 * scale:
        raise RuntimeError(f"eigendecomposition residual {rec_err:.3e}")
    return EigenSystem(eigenvalues=vals, eigenvectors=vecs, hamiltonian=H)


def locate_peak(vector: np.ndarray, basis) -> int:
    """Basis index of the maximum |amplitude|; ties go to the lowest index."""
    a = np.abs(vector)
    if not a.any():
        raise ValueError("cannot locate the peak of a zero vector")
    return int(np.argmax(a))


def _envelope(amplitudes: np.ndarray, distances: np.ndarray):
    """Max |amplitude| per unit-width floor bin of distance.

    Returns (bin ids, envelope values, distance of each envelope point).
    """
    bins = np.floor(distances).astype(np.int64)
    order = np.lexsort((-amplitudes, bins))
    ids, first = np.unique(bins[order], return_index=True)
    top = order[first]
    return ids, amplitudes[top], distances[top]


def fit_localization_length(vector: np.ndarray, peak: int, basis) -> StateFit:
    """Envelope fit of one eigenvector around its peak basis state.

    Procedure: pair distance of every basis state from the peak; unit-width
    floor bins; envelope = max |amplitude| per bin; drop envelopes below
    1e-12; least squares of ln(envelope) vs distance over bins with d >= 1
    (at least 3 of them); slope s gives l = -1 / (2 s).  The distance of a
    bin is the distance of its envelope point.  Flags delocalized when the
    slope is above -1e-3, bins are too few, or l exceeds half the maximum
    pair distance of the lattice.
    """
    peak_pair = basis.pair_of(peak)
    d = pair_distances_from(basis, peak_pair)
    a = np.abs(vector)
    ids, env, env_d = _envelope(a, d)
    keep = (ids >= 1) & (env >= AMPLITUDE_FLOOR)
    x = env_d[keep]
    y = np.log(env[keep])
    n_bins = int(keep.sum())
    if n_bins < 3:
        return StateFit(state=-1, peak=peak_pair, l=None, slope=None,
                        slope_stderr=None, intercept=None, n_bins=n_bins,
                        delocalized=True, reason="fewer than 3 usable bins")
    slope, icept = np.polyfit(x, y, 1)
    resid = y - (slope * x + icept)
    dof = n_bins - 2
    var = float(resid @ resid) / dof if dof > 0 else 0.0
    sxx = float(np.sum((x - x.mean()) ** 2))
    stderr = math.sqrt(var / sxx) if sxx > 0 else float("inf")
    if slope >= SLOPE_THRESHOLD:
        return StateFit(state=-1, peak=peak_pair, l=None, slope=float(slope),
                        slope_stderr=stderr, intercept=float(np.exp(icept)),
                        n_bins=n_bins, delocalized=True,
                        reason=f"slope {slope:.3e} above threshold")
    l = -1.0 / (2.0 * slope)
    d_max = max_pair_distance(basis.lattice.L)
    if l > d_max / 2:
        return StateFit(state=-1, peak=peak_pair, l=float(l),
                        slope=float(slope), slope_stderr=stderr,
                        intercept=float(np.exp(icept)), n_bins=n_bins,
                        delocalized=True,
                        reason=f"l {l:.2f} exceeds half the span {d_max / 2:.2f}")
    return StateFit(state=-1, peak=peak_pair, l=float(l), slope=float(slope),
                    slope_stderr=stderr, intercept=float(np.exp(icept)),
                    n_bins=n_bins, delocalized=False)


def localization_report(eig: EigenSystem) -> LocalizationReport:
    """Fit every eigenstate of a pair-basis eigensystem."""
    H = eig.hamiltonian
    if H is None or H.basis != "pair" or H.pair_basis is None:
        raise ValueError("localization report requires a pair-basis eigensystem")
    basis = H.pair_basis
    fits = []
    for k in range(eig.dimension):
        vec = eig.eigenvectors[:, k]
        fit = fit_localization_length(vec, locate_peak(vec, basis), basis)
        fit.state = k
        fits.append(fit)
    return _summarize(fits, eig.dimension)


def _summarize(fits: list[StateFit], dimension: int) -> LocalizationReport:
    localized = [f.l for f in fits if not f.delocalized]
    n_deloc = sum(f.delocalized for f in fits)
    return LocalizationReport(
        fits=fits,
        l=max(localized) if localized else None,
        delocalized=n_deloc > 0,
        fraction_delocalized=n_deloc / len(fits),
        dimension=dimension,
    )


def hamiltonian_localization_length(report: LocalizationReport) -> float:
    """Max fitted l over non-delocalized states; errors when none exist."""
    if not report.fits:
        raise ValueError("empty localization report")
    localized = [f.l for f in report.fits if not f.delocalized]
    if not localized:
        raise ValueError("all eigenstates are delocalized")
    return max(localized)


# ---------------------------------------------------------------------------
# disorder averaging

def _sample_task(args) -> tuple[Optional[float], bool]:
    """One disorder sample: (per-Hamiltonian l or None, any-state-delocalized).

    Module-level and tuple-argumented so process pools can pickle it.
    J = 0 and h = 1: only gamma / h matters, and a constant shift of every
    J_v changes neither eigenvectors nor fitted lengths.
    """
    L, gamma_over_h, master_seed, sample_index = args
    d = sample_disorder(L, J=0.0, gamma=float(gamma_over_h), h=1.0,
                        seed=(master_seed, sample_index))
    report = localization_report(diagonalize(build_two_walker(d)))
    return report.l, report.delocalized


def localization_samples(L: int, gamma_over_h: float, n_samples: int,
                         master_seed: int, workers: int = 1):
    """Per-sample (l, delocalized) results, ordered by sample index."""
    tasks = [(L, gamma_over_h, master_seed, k) for k in range(n_samples)]
    return ordered_map(_sample_task, tasks, workers)


def aggregate_localization(results):
    """(mean l, stderr, delocalized fraction) over per-sample results.

    Delocalized samples are excluded from the mean but counted in the
    fraction.  stderr is None with fewer than two retained samples.
    """
    ls = [l for l, deloc in results if not deloc]
    frac = sum(deloc for _, deloc in results) / len(results)
    if not ls:
        return None, None, frac
    mean = float(np.mean(ls))
    stderr = float(np.std(ls, ddof=1) / math.sqrt(len(ls))) if len(ls) > 1 else None
    return mean, stderr, frac


def disorder_averaged_length(L: int, gamma_over_h: float, n_samples: int,
                             master_seed: int, workers: int = 1):
    """Disorder-averaged localization length at fixed L and gamma / h.

    Per-sample seeds derive deterministically from (master_seed, index).
    Raises when every sample is delocalized.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    results = localization_samples(L, gamma_over_h, n_samples, master_seed,
                                   workers)
    mean, stderr, frac = aggregate_localization(results)
    if mean is None:
        raise ValueError(f"all {n_samples} samples delocalized at "
                         f"L={L}, gamma/h={gamma_over_h}")
    return mean, stderr, frac
