"""Monte Carlo experiment driver: spatial-response and link evaluations.

Experiments are deterministic given their seed. Spatial-response runs sample
directions uniformly at random (trial count = resolution) or, with
``grid=True``, on a deterministic dense grid for bound checks. Link runs draw
one channel matrix per trial and push it through the noisy ping-pong sweep.
Reports carry the empirical CDF of the gains, scalar summaries, and the
configuration echo needed to reproduce them.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .arrays import ArrayGeometry, Codebook, steering_matrix
from .channel import (DEFAULT_PHI_RANGE, DEFAULT_THETA_RANGE, ChannelParams,
                      sample_channel_matrix)
from .metrics import rate_from_gain
from .sweep import SweepConfig, ping_pong_select


@dataclass(frozen=True, eq=False)
class ExperimentConfig:
    """Shared configuration for spatial-response and link experiments."""

    geometry: ArrayGeometry
    codebook: Codebook | None = None  # None selects the analytic omni reference
    trials: int = 100_000
    seed: int = 0
    theta_range: tuple = DEFAULT_THETA_RANGE
    phi_range: tuple = DEFAULT_PHI_RANGE
    gammas: tuple = ()
    grid: bool = False
    # link experiments only:
    tx_geometry: ArrayGeometry | None = None
    tx_codebook: Codebook | None = None
    channel: ChannelParams | None = None
    snr_db: tuple = ()

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError(f"trials: must be >= 1 (got {self.trials})")
        if self.codebook is not None and self.codebook.n != self.geometry.n:
            raise ValueError(
                f"codebook: length {self.codebook.n} does not match geometry size {self.geometry.n}")
        if any(g < 0 for g in self.gammas):
            raise ValueError(f"gammas: thresholds must be >= 0 (got {self.gammas})")


@dataclass(eq=False)
class EvalReport:
    """Monte Carlo summary: empirical CDF, scalar means, outage fractions."""

    cdf_values: np.ndarray
    cdf_probs: np.ndarray
    mean_gain: float
    outage: dict = field(default_factory=dict)
    mean_rate: float | None = None
    snr_db: float | None = None
    metadata: dict = field(default_factory=dict)


def empirical_cdf(values):
    """Right-continuous empirical CDF: (sorted unique values, probabilities)."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ValueError("cannot build an empirical CDF from no values")
    uniq, counts = np.unique(values, return_counts=True)
    probs = np.cumsum(counts) / values.size
    return uniq, probs


def _draw_directions(cfg: ExperimentConfig, rng: np.random.Generator):
    t_lo, t_hi = cfg.theta_range
    p_lo, p_hi = cfg.phi_range
    if not cfg.grid:
        thetas = rng.uniform(t_lo, t_hi, cfg.trials)
        phis = rng.uniform(p_lo, p_hi, cfg.trials)
        return thetas, phis
    if cfg.geometry.n_h == 1:
        thetas = np.linspace(t_lo, t_hi, cfg.trials)
        return thetas, np.zeros_like(thetas)
    side = int(math.ceil(math.sqrt(cfg.trials)))
    tt, pp = np.meshgrid(np.linspace(t_lo, t_hi, side), np.linspace(p_lo, p_hi, side))
    return tt.ravel(), pp.ravel()


def _report_from_gains(gains: np.ndarray, cfg_echo: dict, gammas,
                       snr: float | None = None, snr_db: float | None = None) -> EvalReport:
    values, probs = empirical_cdf(gains)
    outage = {float(g): float(np.mean(gains < g)) for g in gammas}
    mean_rate = float(np.mean(rate_from_gain(gains, snr))) if snr is not None else None
    return EvalReport(
        cdf_values=values,
        cdf_probs=probs,
        mean_gain=float(np.mean(gains)),
        outage=outage,
        mean_rate=mean_rate,
        snr_db=snr_db,
        metadata=cfg_echo,
    )


def _config_echo(cfg: ExperimentConfig, kind: str) -> dict:
    geom = cfg.geometry
    echo = {
        "kind": kind,
        "geometry": f"{geom.n_v}x{geom.n_h}",
        "spacing": [geom.d_v, geom.d_h],
        "codebook_size": None if cfg.codebook is None else cfg.codebook.k,
        "trials": cfg.trials,
        "seed": cfg.seed,
        "theta_range_deg": [math.degrees(a) for a in cfg.theta_range],
        "phi_range_deg": [math.degrees(a) for a in cfg.phi_range],
        "grid": cfg.grid,
        "version": __version__,
    }
    if cfg.channel is not None:
        echo["channel"] = {"kappa": cfg.channel.kappa, "n_nlos": cfg.channel.n_nlos}
    return echo


def run_spatial_response_experiment(cfg: ExperimentConfig) -> EvalReport:
    """Effective spatial response statistics over random or gridded directions."""
    rng = np.random.default_rng(cfg.seed)
    thetas, phis = _draw_directions(cfg, rng)
    if cfg.codebook is None:
        gains = np.ones(thetas.size)  # analytic omni reference
    else:
        v = steering_matrix(cfg.geometry, thetas, phis)
        gains = np.abs(v @ np.conj(cfg.codebook.matrix)) ** 2
        gains = gains.max(axis=1)
    return _report_from_gains(gains, _config_echo(cfg, "spatial"), cfg.gammas)


def run_link_experiment(cfg: ExperimentConfig) -> list:
    """Noisy beam-swept link simulation; one report per SNR point.

    The Tx side defaults to a single-element array with the trivial
    one-codeword codebook, which reduces the sweep to receive-side selection.
    """
    if cfg.codebook is None:
        raise ValueError("codebook: link experiments need an Rx codebook")
    if not cfg.snr_db:
        raise ValueError("snr_db: link experiments need at least one SNR point")
    channel = cfg.channel if cfg.channel is not None else ChannelParams.los()
    tx_geom = cfg.tx_geometry if cfg.tx_geometry is not None else ArrayGeometry(1, 1)
    tx_cb = cfg.tx_codebook if cfg.tx_codebook is not None else Codebook(np.zeros((1, 1)))
    if tx_cb.n != tx_geom.n:
        raise ValueError(
            f"tx_codebook: length {tx_cb.n} does not match tx geometry size {tx_geom.n}")
    reports = []
    for i, snr_db in enumerate(cfg.snr_db):
        sweep_cfg = SweepConfig.from_snr_db(snr_db)
        rng = np.random.default_rng(cfg.seed + i)
        gains = np.empty(cfg.trials)
        for t in range(cfg.trials):
            h = sample_channel_matrix(channel, cfg.geometry, tx_geom, rng)
            gains[t] = ping_pong_select(h, tx_cb, cfg.codebook, sweep_cfg, rng).bf_gain
        echo = _config_echo(cfg, "link")
        echo["tx_codebook_size"] = tx_cb.k
        reports.append(_report_from_gains(
            gains, echo, cfg.gammas,
            snr=sweep_cfg.p_tot / sweep_cfg.n0, snr_db=float(snr_db)))
    return reports


def write_report(report: EvalReport, out_dir) -> None:
    """Persist ``report.json`` and ``cdf.csv`` (12 significant digits) to a directory."""
    try:
        os.makedirs(out_dir, exist_ok=True)
        payload = {
            "config": report.metadata,
            "mean_gain": report.mean_gain,
        }
        if report.mean_rate is not None:
            payload["mean_rate"] = report.mean_rate
        if report.snr_db is not None:
            payload["snr_db"] = report.snr_db
        if report.outage:
            payload["outage"] = {format(g, ".12g"): p for g, p in report.outage.items()}
        with open(os.path.join(out_dir, "report.json"), "w", encoding="ascii") as fh:
            json.dump(payload, fh, sort_keys=True, indent=2)
            fh.write("\n")
        lines = ["value,prob"]
        for v, p in zip(report.cdf_values, report.cdf_probs):
            lines.append(f"{v:.12g},{p:.12g}")
        with open(os.path.join(out_dir, "cdf.csv"), "w", encoding="ascii") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise OSError(f"failed writing report under {out_dir}: {exc}") from exc


def load_cdf(path):
    """Parse a ``cdf.csv`` back into (values, probs) arrays."""
    values, probs = [], []
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline()
        if header.strip() != "value,prob":
            raise ValueError(f"cdf file {path}: unexpected header {header!r}")
        for line in fh:
            if not line.strip():
                continue
            v, p = line.split(",")
            values.append(float(v))
            probs.append(float(p))
    return np.asarray(values), np.asarray(probs)
