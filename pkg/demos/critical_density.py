"""Critical anyon density versus localization length.

A pair localized with length l leaks out of a square of side lam with
probability at most (lam/2)^7 exp(-lam/2l).  Squares are correctable as
long as that leakage stays below the decoder threshold p_c, so the
critical square side lam_c solves the equality on the decreasing branch
lam > 14 l, and one pair per square gives the critical anyon density
rho_c = lam_c^(-2).  The curve is steeper than the naive rho ~ l^(-2)
because the polynomial prefactor keeps pushing lam_c/l upward as l
grows; the doubling ratio lam_c(2l)/lam_c(l) drifts down toward 2 only
logarithmically.
"""
import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from anyonloc import critical_density_curve

L_LIST = [1.0, 2.0, 4.0, 8.0, 16.0, 32.0]
P_C = 0.11

OUT = pathlib.Path(__file__).parent / "output"


def main():
    OUT.mkdir(exist_ok=True)
    curve = critical_density_curve(L_LIST, P_C)
    print(f"threshold p_c = {P_C}")
    print(f"{'l':>6} {'lambda_c':>12} {'rho_c':>12}")
    for l, lam, rho in curve.entries:
        print(f"{l:6.1f} {lam:12.4f} {rho:12.4e}")

    ls = np.array([e[0] for e in curve.entries])
    rhos = np.array([e[2] for e in curve.entries])
    slope = np.polyfit(np.log(ls[ls >= 4]), np.log(rhos[ls >= 4]), 1)[0]
    print(f"\nlog-log slope over l >= 4: {slope:.3f} "
          "(approaches -2 from below as l -> infinity)")

    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.loglog(ls, rhos, marker="o")
    ax.set_xlabel(r"localization length $l$")
    ax.set_ylabel(r"critical density $\rho_c$")
    ax.set_title(f"memory stability boundary at $p_c$ = {P_C}")
    fig.tight_layout()
    path = OUT / "critical_density.png"
    fig.savefig(path, dpi=150)
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
