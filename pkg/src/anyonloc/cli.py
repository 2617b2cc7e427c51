"""Command-line front end: seeded, reproducible sweeps emitting CSV/JSON.

Subcommands: localization, evolve, threshold, critical-density.  Values
come from built-in defaults, overridden by a YAML config file, overridden
by the flags --seed / --workers / --out.  Every output embeds the resolved
configuration as a JSON comment on its first line; execution details that
cannot change the numbers (worker count, output path) are excluded so that
reruns at any parallelism are byte-identical.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from typing import Optional

import yaml

from . import __version__
from .decoder import critical_density_curve, estimate_threshold
from .dynamics import check_bound, displacement_profile, escape_probability
from .hamiltonian import build_two_walker, sample_disorder
from .spectra import (aggregate_localization, diagonalize,
                      localization_report, localization_samples)
from .util import write_csv

KINDS = ("localization", "evolve", "threshold", "critical-density")


class ConfigError(ValueError):
    pass


@dataclass
class SweepConfig:
    """Resolved parameters for one sweep run."""

    kind: str
    seed: int = 0
    workers: int = 1
    out: Optional[str] = None
    pair_dim_cap: int = 10000
    # localization / evolve
    L: list = field(default_factory=lambda: [8, 9, 10, 11])
    gamma_over_h: list = field(default_factory=lambda: [50, 100, 150, 200, 250, 300, 350])
    samples: int = 100
    # evolve
    times: list = field(default_factory=lambda: [10.0, 20.0, 40.0, 80.0, 160.0])
    initial: list = field(default_factory=lambda: [0, 1])
    lam: float = 8.0
    # threshold
    m: list = field(default_factory=lambda: [4, 6, 8])
    p_grid: list = field(default_factory=lambda: [round(0.06 + 0.01 * i, 2) for i in range(11)])
    trials: int = 4000
    exact_cutoff: int = 24
    # critical-density
    l: list = field(default_factory=lambda: [1.0, 2.0, 4.0, 8.0, 16.0, 32.0])
    p_c: float = 0.11

    def validate(self) -> None:
        if self.kind not in KINDS:
            raise ConfigError(f"unknown kind {self.kind!r}")
        if self.workers < 1:
            raise ConfigError("worker count must be >= 1")
        if not (0 <= int(self.seed) < 2 ** 64):
            raise ConfigError("seed must fit in 64 bits")
        for name in ("L", "gamma_over_h", "times", "m", "p_grid", "l"):
            if not getattr(self, name):
                raise ConfigError(f"config list {name!r} must be non-empty")
        if self.samples < 1 or self.trials < 1:
            raise ConfigError("samples and trials must be >= 1")

    def echo(self) -> dict:
        """Result-determining fields only; see module docstring."""
        skip = {"workers", "out"}
        obj = {k: v for k, v in self.__dict__.items() if k not in skip}
        obj["version"] = __version__
        return obj


def _default_out(kind: str) -> str:
    return {"localization": "localization.csv",
            "evolve": "evolution.csv",
            "threshold": "threshold.csv",
            "critical-density": "critical_density.csv"}[kind]


def load_config_file(path: str) -> dict:
    with open(path, "r") as f:
        obj = yaml.safe_load(f) or {}
    if not isinstance(obj, dict):
        raise ConfigError(f"config file {path} must be a mapping")
    return obj


def resolve_config(kind: str, file_obj: Optional[dict] = None,
                   seed: Optional[int] = None, workers: Optional[int] = None,
                   out: Optional[str] = None) -> SweepConfig:
    """defaults <- file top level <- file [kind] section <- CLI flags."""
    cfg = SweepConfig(kind=kind)
    layers = []
    if file_obj:
        layers.append({k: v for k, v in file_obj.items() if k not in KINDS})
        section = file_obj.get(kind)
        if section is not None:
            if not isinstance(section, dict):
                raise ConfigError(f"config section {kind!r} must be a mapping")
            layers.append(section)
    for layer in layers:
        for key, value in layer.items():
            if not hasattr(cfg, key) or key == "kind":
                raise ConfigError(f"unknown config key {key!r}")
            setattr(cfg, key, value)
    if seed is not None:
        cfg.seed = seed
    if workers is not None:
        cfg.workers = workers
    if out is not None:
        cfg.out = out
    if cfg.out is None:
        cfg.out = _default_out(kind)
    cfg.validate()
    return cfg


def _guard_dimension(L: int, cap: int) -> None:
    D = L * L * (L * L - 1) // 2
    if D > cap:
        need = 3 * D * D * 8  # matrix + eigenvectors + solver workspace
        raise ConfigError(
            f"pair basis dimension {D} at L={L} exceeds the cap {cap}; "
            f"a dense solve would need about {need / 1e9:.1f} GB")


def run_localization_sweep(cfg: SweepConfig) -> str:
    """Rows (L, gamma_over_h, mean_l, stderr, delocalized_fraction, n_samples)."""
    for L in cfg.L:
        _guard_dimension(int(L), cfg.pair_dim_cap)
    rows = []
    for L in cfg.L:
        for g in cfg.gamma_over_h:
            res = localization_samples(int(L), float(g), cfg.samples,
                                        cfg.seed, cfg.workers)
            mean, stderr, frac = aggregate_localization(res)
            rows.append((int(L), g, mean, stderr, frac, cfg.samples))
    write_csv(cfg.out, cfg.echo(),
              ["L", "gamma_over_h", "mean_l", "stderr",
               "delocalized_fraction", "n_samples"], rows)
    return cfg.out


def bound_report_path(out: str) -> str:
    return out[:-4] + ".bound.json" if out.endswith(".csv") else out + ".bound.json"


def run_evolution(cfg: SweepConfig) -> str:
    """Profiles for each gamma/h (same seed: paired runs) plus a bound report.

    CSV rows (gamma_over_h, t, d, probability); the companion JSON carries
    the localization length, the empirical bound constant, and escape
    probabilities per time.
    """
    if len(cfg.L) != 1:
        raise ConfigError("evolve expects exactly one lattice size")
    L = int(cfg.L[0])
    _guard_dimension(L, cfg.pair_dim_cap)
    rows = []
    runs = []
    for g in cfg.gamma_over_h:
        d = sample_disorder(L, J=0.0, gamma=float(g), h=1.0, seed=(cfg.seed, 0))
        eig = diagonalize(build_two_walker(d))
        basis = eig.hamiltonian.pair_basis
        init = basis.index_of(int(cfg.initial[0]), int(cfg.initial[1]))
        profiles = [displacement_profile(eig, init, float(t)) for t in cfg.times]
        for prof in profiles:
            for dist, mass in enumerate(prof.masses):
                rows.append((g, prof.t, dist, mass))
        report = localization_report(eig)
        bound = check_bound(profiles, report.l if not report.delocalized else None)
        runs.append({
            "gamma_over_h": g,
            "l": report.l,
            "delocalized": report.delocalized,
            "C": bound.C,
            "worst_d": bound.worst_d,
            "violated": bound.violated,
            "saturated": bound.saturated,
            "reason": bound.reason,
            "per_time": [[t, c] for t, c in bound.per_time],
            "escape": [[float(t), escape_probability(p, cfg.lam)]
                       for t, p in zip(cfg.times, profiles)],
        })
    write_csv(cfg.out, cfg.echo(),
              ["gamma_over_h", "t", "d", "probability"], rows)
    with open(bound_report_path(cfg.out), "w", newline="") as f:
        json.dump({"config": cfg.echo(), "runs": runs}, f, sort_keys=True)
        f.write("\n")
    return cfg.out


def run_threshold(cfg: SweepConfig) -> str:
    """Rows (m, p, trials, failures, rate, stderr); crossings in the header."""
    est = estimate_threshold(cfg.m, cfg.p_grid, cfg.trials, cfg.seed,
                             workers=cfg.workers, exact_cutoff=cfg.exact_cutoff)
    header = cfg.echo()
    header["crossings"] = [[m1, m2, p] for m1, m2, p in est.crossings]
    header["estimate"] = est.estimate
    header["spread"] = est.spread
    rows = []
    for i, m in enumerate(est.m_list):
        for j, p in enumerate(est.p_grid):
            rows.append((m, p, est.n_trials, int(est.failures[i, j]),
                         est.rates[i, j], est.stderrs[i, j]))
    write_csv(cfg.out, header,
              ["m", "p", "trials", "failures", "rate", "stderr"], rows)
    return cfg.out


def run_critical_density(cfg: SweepConfig) -> str:
    """Rows (l, lambda_c, rho_c) at the configured threshold p_c."""
    curve = critical_density_curve(cfg.l, cfg.p_c)
    rows = [(l, lam, rho) for l, lam, rho in curve.entries]
    write_csv(cfg.out, cfg.echo(), ["l", "lambda_c", "rho_c"], rows)
    return cfg.out


RUNNERS = {
    "localization": run_localization_sweep,
    "evolve": run_evolution,
    "threshold": run_threshold,
    "critical-density": run_critical_density,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="anyonloc",
        description="Localization and memory-stability sweeps on the torus lattice")
    sub = parser.add_subparsers(dest="kind", required=True)
    helps = {
        "localization": "disorder-averaged localization lengths over (L, gamma/h)",
        "evolve": "pair displacement profiles and the tail bound",
        "threshold": "decoder failure-rate curves and their crossing",
        "critical-density": "critical anyon density versus localization length",
    }
    for kind in KINDS:
        sp = sub.add_parser(kind, help=helps[kind])
        sp.add_argument("--config", metavar="PATH", default=None,
                        help="YAML config file")
        sp.add_argument("--seed", metavar="N", type=int, default=None,
                        help="master seed (64-bit)")
        sp.add_argument("--workers", metavar="N", type=int, default=None,
                        help="parallel worker count")
        sp.add_argument("--out", metavar="PATH", default=None,
                        help="output CSV path")
    args = parser.parse_args(argv)
    try:
        file_obj = load_config_file(args.config) if args.config else None
        cfg = resolve_config(args.kind, file_obj, seed=args.seed,
                             workers=args.workers, out=args.out)
        out = RUNNERS[args.kind](cfg)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {out}")
    if args.kind == "evolve":
        print(f"wrote {bound_report_path(out)}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
