"""Coarse decoder failure rates and the threshold crossing.

Edge flips on an m x m torus of coarse squares are drawn i.i.d. at rate
p, matched by minimum-weight pairing, and the residual winding decides
success.  Below the threshold a larger torus fails less; above it the
ordering inverts.  The crossing of the failure-rate curves for
successive sizes estimates p_c, the error rate the matching can just
barely handle.
"""
import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from anyonloc import estimate_threshold

M_LIST = [4, 6]
P_GRID = [0.06, 0.08, 0.10, 0.12, 0.14, 0.16]
TRIALS = 1500
SEED = 2026

OUT = pathlib.Path(__file__).parent / "output"


def main():
    OUT.mkdir(exist_ok=True)
    print(f"sizes {M_LIST}, {TRIALS} trials per point")
    est = estimate_threshold(M_LIST, P_GRID, TRIALS, SEED)

    fig, ax = plt.subplots(figsize=(5, 3.5))
    for i, m in enumerate(est.m_list):
        ax.errorbar(est.p_grid, est.rates[i], yerr=est.stderrs[i],
                    marker="o", label=f"m = {m}")
    for m1, m2, p in est.crossings:
        ax.axvline(p, color="gray", linestyle=":")
        print(f"curves for m={m1} and m={m2} cross at p = {p:.4f}")
    ax.set_xlabel("flip rate p")
    ax.set_ylabel("logical failure rate")
    ax.legend()
    fig.tight_layout()
    path = OUT / "decoder_threshold.png"
    fig.savefig(path, dpi=150)
    print(f"threshold estimate p_c = {est.estimate:.4f} (spread {est.spread:.4f})")
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
