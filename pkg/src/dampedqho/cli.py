"""Command-line front end.

Examples
--------
    dampedqho run fig2 --out fig2.csv
    dampedqho run fig4 --config run.ini --out fig4.csv
    dampedqho report --format json
"""
from __future__ import annotations

import argparse
import configparser
import json
import math
import sys
from dataclasses import dataclass, fields, replace

import numpy as np

from .bath import BathSpectrum, OscillatorParams
from .errors import ConfigError, ConvergenceError, DivergentIntegralError, GridError
from .measurement import survival_ratio, survival_ratio_weak
from .model import DampedOscillator
from .numerics import QuadratureSpec, TimeGrid
from .propagator import spectral_quadrature
from .scenarios import (GaussianState, PreparationSpec, QuenchSpec, evolve_correlated_prep,
                        evolve_factorized, evolve_quench, purity, short_time_purity)

FIGURES = ("fig1a", "fig1b", "fig2", "fig3a", "fig3b", "fig4")

COLUMNS = {
    "fig1a": ("t", "sx_corr", "sp_corr", "sx_uncorr", "sp_uncorr"),
    "fig1b": ("t", "x_corr", "p_corr", "x_uncorr", "p_uncorr"),
    "fig2": ("t", "purity_l10", "purity_l1", "purity_l01"),
    "fig3a": ("t", "sx_quench", "sp_quench", "sx_uncorr", "sp_uncorr"),
    "fig3b": ("t", "purity_quench", "purity_uncorr"),
    "fig4": ("tau", "R_exact_e05", "R_weak_e05", "R_exact_e01", "R_weak_e01"),
}

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


@dataclass(frozen=True)
class RunConfig:
    """Flat run configuration; every field has a documented default."""

    eta: float = 0.5
    cutoff_lambda: float = 10.0
    temperature: float = 0.0
    k: float = 1.0
    dt: float = 0.01
    t_max: float = 30.0
    quad_tolerance: float = 1e-10
    x0: float = 1.0
    squeeze: float = 10.0
    k_old: float = 0.01
    k_new: float = 1.0
    tau_min: float = 0.01
    tau_max: float = 5.0
    tau_step: float = 0.01

    def __post_init__(self):
        positive = ("cutoff_lambda", "k", "dt", "t_max", "quad_tolerance", "squeeze",
                    "k_old", "k_new", "tau_min", "tau_max", "tau_step")
        for f in fields(self):
            v = getattr(self, f.name)
            if not math.isfinite(v):
                raise ConfigError(f"{f.name} must be finite")
            if f.name in positive and not v > 0:
                raise ConfigError(f"{f.name} must be positive, got {v}")
        for name in ("eta", "temperature"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be non-negative")
        if self.tau_min > self.tau_max:
            raise ConfigError("tau_min exceeds tau_max")

    def bath(self, **over):
        kw = dict(eta=self.eta, cutoff_lambda=self.cutoff_lambda, temperature=self.temperature)
        kw.update(over)
        return BathSpectrum(**kw)

    def grid(self, t_max=None):
        return TimeGrid.from_tmax(self.dt, self.t_max if t_max is None else t_max)

    def quad_spec(self):
        return QuadratureSpec(abs_tolerance=self.quad_tolerance)


# section -> {ini key: RunConfig field}
SCHEMA = {
    "bath": {"eta": "eta", "lambda": "cutoff_lambda", "temperature": "temperature"},
    "oscillator": {"k": "k"},
    "grid": {"dt": "dt", "t_max": "t_max", "quad_tolerance": "quad_tolerance"},
    "scenario": {"x0": "x0", "squeeze": "squeeze", "k_old": "k_old", "k_new": "k_new",
                 "tau_min": "tau_min", "tau_max": "tau_max", "tau_step": "tau_step"},
}


def load_config(path=None, overrides=None):
    """Read an INI file and apply flag overrides; unknown keys are errors."""
    values = {}
    if path is not None:
        parser = configparser.ConfigParser()
        try:
            with open(path, encoding="utf-8") as fh:
                parser.read_file(fh)
        except (OSError, configparser.Error) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        for section in parser.sections():
            if section not in SCHEMA:
                raise ConfigError(f"unknown config section [{section}]")
            for key, raw in parser.items(section):
                if key not in SCHEMA[section]:
                    raise ConfigError(f"unknown key '{key}' in section [{section}]")
                try:
                    values[SCHEMA[section][key]] = float(raw)
                except ValueError as exc:
                    raise ConfigError(f"[{section}] {key} = {raw!r} is not a number") from exc
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return RunConfig(**values)


# ----------------------------------------------------------------- figures

def _model(cfg, **bath_over):
    osc = OscillatorParams(cfg.k)
    return DampedOscillator(cfg.bath(**bath_over), osc, cfg.grid(), cfg.quad_spec())


def _prep_pair(cfg, m, lam):
    prep = PreparationSpec(cfg.x0, lam)
    corr = evolve_correlated_prep(prep, m.propagator, m.correlation)
    init = GaussianState(cfg.x0, 0.0, prep.delta_x, 0.0, prep.delta_p)
    return corr, evolve_factorized(init, m.propagator, m.noise)


def _quench_pair(cfg):
    bath = cfg.bath()
    grid = cfg.grid()
    q = QuenchSpec(cfg.k_old, cfg.k_new)
    quench = evolve_quench(q, bath, grid, cfg.quad_spec())
    m_new = DampedOscillator(bath, OscillatorParams(cfg.k_new), grid, cfg.quad_spec())
    x2, p2 = quench.var_x[0], quench.var_p[0]
    uncorr = evolve_factorized(GaussianState(0.0, 0.0, x2, 0.0, p2), m_new.propagator,
                               m_new.noise)
    return quench, uncorr


def tau_values(cfg):
    n = int(round((cfg.tau_max - cfg.tau_min) / cfg.tau_step))
    return cfg.tau_min + cfg.tau_step * np.arange(n + 1)


def figure_table(fig, cfg):
    """Columns of ``fig`` as a 2-D array (rows are samples)."""
    if fig in ("fig1a", "fig1b"):
        m = _model(cfg)
        corr, unc = _prep_pair(cfg, m, cfg.squeeze)
        if fig == "fig1a":
            cols = (corr.var_x, corr.var_p, unc.var_x, unc.var_p)
        else:
            cols = (corr.mean_x, corr.mean_p, unc.mean_x, unc.mean_p)
        return np.column_stack((m.grid.times,) + cols)
    if fig == "fig2":
        m = _model(cfg)
        cols = [evolve_correlated_prep(PreparationSpec(cfg.x0, lam), m.propagator,
                                       m.correlation).purity() for lam in (10.0, 1.0, 0.1)]
        return np.column_stack([m.grid.times] + cols)
    if fig in ("fig3a", "fig3b"):
        quench, unc = _quench_pair(cfg)
        if fig == "fig3a":
            cols = (quench.var_x, quench.var_p, unc.var_x, unc.var_p)
        else:
            cols = (quench.purity(), unc.purity())
        return np.column_stack((quench.times,) + cols)
    if fig == "fig4":
        taus = tau_values(cfg)
        # τ must sit on the kernel grid; use the τ step as grid spacing
        dt = cfg.tau_step
        if abs(cfg.tau_min / dt - round(cfg.tau_min / dt)) > 1e-9:
            raise ConfigError("tau_min must be a multiple of tau_step")
        grid = TimeGrid.from_tmax(dt, 2 * taus[-1])
        out = [taus]
        for eta in (0.5, 0.1):
            bath = cfg.bath(eta=eta)
            m = DampedOscillator(bath, OscillatorParams(cfg.k), grid, cfg.quad_spec())
            quad = spectral_quadrature(bath, m.osc, grid.t_max, cfg.quad_spec())
            out.append([survival_ratio(t, m.covariance).ratio for t in taus])
            out.append([survival_ratio_weak(t, bath, m.osc, quad).ratio for t in taus])
        return np.column_stack(out)
    raise ConfigError(f"unknown figure {fig!r}")


def write_csv(path, header, table):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in table:
            fh.write(",".join(f"{v:.17e}" for v in row) + "\n")


def run_figure(fig, cfg, out_path):
    table = figure_table(fig, cfg)
    write_csv(out_path, COLUMNS[fig], table)
    return table


# ------------------------------------------------------------------ report

def report_scalars(cfg):
    """Scalar summary of a configuration as a plain dict."""
    m = _model(cfg)
    corr = m.correlation
    x2, p2 = corr.x2, corr.p2
    init = GaussianState(0.0, 0.0, 1.0 / (2 * cfg.squeeze), 0.0, cfg.squeeze / 2)
    fact = evolve_factorized(init, m.propagator, m.noise)
    out = dict(
        x2=x2,
        p2=p2,
        mu0=float(m.bath.memory_kernel(0.0)),
        equilibrium_purity=purity(GaussianState(0.0, 0.0, x2, 0.0, p2)),
        factorized_purity_tmax=float(fact.purity()[-1]),
        singular_intervals=[list(iv) for iv in m.local.singular_times],
    )
    if m.bath.eta > 0:
        q = evolve_quench(QuenchSpec(cfg.k_old, cfg.k_new), m.bath, cfg.grid(t_max=cfg.dt),
                          cfg.quad_spec())
        out["quench_initial_purity"] = float(q.purity()[0])
        c, r2, _, _ = short_time_purity(m.bath, m.osc, cfg.squeeze, spec=cfg.quad_spec())
        ref = cfg.cutoff_lambda ** 2 / (2 * math.pi * cfg.squeeze)
        out.update(short_time_coefficient=c, short_time_r2=r2, short_time_ratio=c / ref)
    else:
        old = OscillatorParams(cfg.k_old)
        w0 = old.omega0
        ct = 1.0 if cfg.temperature == 0 else 1.0 / math.tanh(w0 / (2 * cfg.temperature))
        out["quench_initial_purity"] = 1.0 / ct
    return out


def _format_text(rep):
    lines = []
    for k, v in rep.items():
        lines.append(f"{k:24s} {v:.10g}" if isinstance(v, float) else f"{k:24s} {v}")
    return "\n".join(lines)


# --------------------------------------------------------------------- main

def build_parser():
    p = argparse.ArgumentParser(prog="dampedqho",
                                description="Exact dynamics of a damped quantum oscillator.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI file with [bath], [oscillator], [grid], [scenario]")
    common.add_argument("--dt", type=float)
    common.add_argument("--tmax", type=float, dest="t_max")
    common.add_argument("--eta", type=float)
    common.add_argument("--k", type=float)
    common.add_argument("--lambda-cutoff", type=float, dest="cutoff_lambda")
    common.add_argument("--temperature", type=float)
    sub = p.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", parents=[common], help="write figure data as CSV")
    run.add_argument("figure", choices=FIGURES)
    run.add_argument("--out", required=True)
    rep = sub.add_parser("report", parents=[common], help="print scalar checks")
    rep.add_argument("--format", choices=("text", "json"), default="text")
    rep.add_argument("--out")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    over = {k: getattr(args, k) for k in ("dt", "t_max", "eta", "k", "cutoff_lambda",
                                           "temperature")}
    try:
        cfg = load_config(args.config, over)
        if args.command == "run":
            run_figure(args.figure, cfg, args.out)
        else:
            rep = report_scalars(cfg)
            text = json.dumps(rep, indent=2) if args.format == "json" else _format_text(rep)
            if args.out:
                with open(args.out, "w", encoding="utf-8") as fh:
                    fh.write(text + "\n")
            else:
                print(text)
    except (ConfigError, GridError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConvergenceError, DivergentIntegralError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
