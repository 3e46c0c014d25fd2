"""Generalized-Lloyd codebook design with phase-only gradient updates.

Each iteration alternates a nearest-codeword partition of the training set
with a per-cell gradient ascent on the codeword phases, guarded so that every
accepted step improves its cell objective. The recorded objective history is
therefore non-decreasing by construction. The quantized variant projects each
updated codeword onto the B-bit phase grid and keeps the projection only when
it beats the incumbent feasible codeword.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .arrays import TWO_PI, Codebook, Codeword
from .metrics import Metric


@dataclass(frozen=True, eq=False)
class LloydConfig:
    """Designer knobs; defaults suit desk-scale experiments."""

    k: int
    step_size: float = 0.05
    grad_steps_per_iter: int = 20
    max_iters: int = 200
    rel_tol: float = 1e-4
    restarts: int = 5
    quant_bits: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"codebook size k must be >= 1 (got {self.k})")
        if self.step_size <= 0:
            raise ValueError(f"step_size must be positive (got {self.step_size})")
        if self.grad_steps_per_iter < 1:
            raise ValueError(f"grad_steps_per_iter must be >= 1 (got {self.grad_steps_per_iter})")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1 (got {self.max_iters})")
        if self.rel_tol <= 0:
            raise ValueError(f"rel_tol must be positive (got {self.rel_tol})")
        if self.restarts < 1:
            raise ValueError(f"restarts must be >= 1 (got {self.restarts})")
        if self.quant_bits is not None and self.quant_bits < 1:
            raise ValueError(f"quant_bits must be >= 1 (got {self.quant_bits})")


@dataclass(frozen=True, eq=False)
class Partition:
    """Per-sample cell assignment plus the per-cell sample index lists."""

    assignment: np.ndarray  # (L,) int, 0-based cell index
    cells: list  # K arrays of sample indices


@dataclass(frozen=True, eq=False)
class DesignResult:
    codebook: Codebook
    objective_history: list = field(default_factory=list)
    restart_objectives: list = field(default_factory=list)


# -- array-level core ---------------------------------------------------------

_MAX_HALVINGS = 10


def _cell_objective(theta: np.ndarray, samples: np.ndarray, metric: Metric) -> float:
    n = theta.size
    w = np.exp(1j * theta) / math.sqrt(n)
    x = np.abs(samples @ np.conj(w)) ** 2
    return float(np.mean(metric.value(x)))


def _cell_gradient(theta: np.ndarray, samples: np.ndarray, metric: Metric) -> np.ndarray:
    # d/d theta_n of the mean cell objective, with w_n = exp(j theta_n)/sqrt(N):
    #   g_n = (2 / (C sqrt(N))) sum_h f'(x_h) Re{ j e^{j theta_n} h_n^* (w^H h) }
    n = theta.size
    w = np.exp(1j * theta) / math.sqrt(n)
    c = samples @ np.conj(w)
    fp = metric.derivative(np.abs(c) ** 2)
    s = np.conj(samples).T @ (fp * c)
    return (2.0 / (samples.shape[0] * math.sqrt(n))) * np.real(1j * np.exp(1j * theta) * s)


def _ascend(theta: np.ndarray, samples: np.ndarray, metric: Metric,
            step0: float, n_steps: int):
    """Guarded gradient ascent: each accepted step strictly improves the cell."""
    obj = _cell_objective(theta, samples, metric)
    for _ in range(n_steps):
        grad = _cell_gradient(theta, samples, metric)
        step = step0
        improved = False
        for _ in range(_MAX_HALVINGS + 1):
            cand = np.mod(theta + step * grad, TWO_PI)
            cand_obj = _cell_objective(cand, samples, metric)
            if cand_obj > obj:
                theta, obj = cand, cand_obj
                improved = True
                break
            step *= 0.5
        if not improved:
            break
    return theta, obj


def _grid_project(phases: np.ndarray, bits: int) -> np.ndarray:
    # Nearest multiple of 2*pi/2^B per element; exact ties round to the
    # lower grid phase. Elementwise rounding is the Euclidean projection
    # onto the quantized constant-modulus set.
    step = TWO_PI / (1 << bits)
    k = np.ceil(phases / step - 0.5)
    return np.mod(k * step, TWO_PI)


def _gains(phases: np.ndarray, samples: np.ndarray) -> np.ndarray:
    n = phases.shape[1]
    w = np.exp(1j * phases) / math.sqrt(n)  # (K, N)
    return np.abs(samples @ np.conj(w).T) ** 2  # (L, K)


def _global_objective(phases: np.ndarray, samples: np.ndarray, metric: Metric) -> float:
    return float(np.mean(metric.value(_gains(phases, samples).max(axis=1))))


# -- public operations --------------------------------------------------------

def init_codebook(n: int, k: int, rng: np.random.Generator) -> Codebook:
    """Random starting codebook: i.i.d. uniform [0, 2*pi) phases."""
    if n < 1 or k < 1:
        raise ValueError(f"need n, k >= 1 (got n={n}, k={k})")
    return Codebook(rng.uniform(0.0, TWO_PI, (k, n)))


def partition(cb: Codebook, samples) -> Partition:
    """Assign every sample to its best-gain codeword (ties to lowest index)."""
    s = np.atleast_2d(np.asarray(samples, dtype=complex))
    if s.shape[1] != cb.n:
        raise ValueError(f"sample length {s.shape[1]} does not match codebook length {cb.n}")
    assignment = np.argmax(_gains(cb.phases, s), axis=1)
    cells = [np.flatnonzero(assignment == k) for k in range(cb.k)]
    return Partition(assignment=assignment, cells=cells)


def objective_gradient(w: Codeword, cell_samples, metric: Metric) -> np.ndarray:
    """Gradient of the mean cell objective with respect to the codeword phases."""
    s = np.atleast_2d(np.asarray(cell_samples, dtype=complex))
    if s.shape[0] == 0:
        raise ValueError("cannot take a gradient over an empty cell")
    if s.shape[1] != w.n:
        raise ValueError(f"sample length {s.shape[1]} does not match codeword length {w.n}")
    return _cell_gradient(w.phases, s, metric)


def update_codeword(w: Codeword, cell_samples, metric: Metric, cfg: LloydConfig) -> Codeword:
    """Gradient-ascend one codeword on its cell; never worse than the input."""
    s = np.atleast_2d(np.asarray(cell_samples, dtype=complex))
    if s.shape[0] == 0:
        raise ValueError("cannot update a codeword with an empty cell")
    theta, _ = _ascend(w.phases, s, metric, cfg.step_size, cfg.grad_steps_per_iter)
    return Codeword(theta)


def project_to_grid(w: Codeword, bits: int) -> Codeword:
    """Round each phase to the nearest B-bit grid value (ties toward zero)."""
    if bits < 1:
        raise ValueError(f"bits must be >= 1 (got {bits})")
    return Codeword(_grid_project(w.phases, bits))


def _repair_empty_cells(phases: np.ndarray, samples: np.ndarray, bits):
    """Reseed unused codewords toward the currently worst-served samples.

    Replacing a codeword that no sample selects can never reduce any sample's
    effective gain, so the repair preserves monotone ascent.
    """
    gains = _gains(phases, samples)
    assignment = np.argmax(gains, axis=1)
    counts = np.bincount(assignment, minlength=phases.shape[0])
    empty = np.flatnonzero(counts == 0)
    if empty.size == 0:
        return phases, assignment
    order = np.argsort(gains.max(axis=1), kind="stable")
    phases = phases.copy()
    for slot, k in enumerate(empty):
        target = samples[order[slot % samples.shape[0]]]
        seed_phases = np.mod(np.angle(target), TWO_PI)
        phases[k] = _grid_project(seed_phases, bits) if bits else seed_phases
    assignment = np.argmax(_gains(phases, samples), axis=1)
    return phases, assignment


def _design(samples, metric: Metric, cfg: LloydConfig, bits) -> DesignResult:
    s = np.atleast_2d(np.asarray(samples, dtype=complex))
    if s.shape[0] == 0:
        raise ValueError("cannot design a codebook from an empty training set")
    n = s.shape[1]
    best_phases = None
    best_history = None
    best_obj = -math.inf
    restart_objectives = []
    for r in range(cfg.restarts):
        rng = np.random.default_rng(cfg.seed + r)
        phases = rng.uniform(0.0, TWO_PI, (cfg.k, n))
        if bits:
            phases = _grid_project(phases, bits)
        obj = _global_objective(phases, s, metric)
        history = [obj]
        for _ in range(cfg.max_iters):
            phases_r, assignment = _repair_empty_cells(phases, s, bits)
            new_phases = phases_r.copy()
            for k in range(cfg.k):
                idx = np.flatnonzero(assignment == k)
                if idx.size == 0:
                    continue
                cell = s[idx]
                theta, _ = _ascend(phases_r[k], cell, metric,
                                   cfg.step_size, cfg.grad_steps_per_iter)
                if bits:
                    theta_q = _grid_project(theta, bits)
                    if (_cell_objective(theta_q, cell, metric)
                            > _cell_objective(phases_r[k], cell, metric)):
                        new_phases[k] = theta_q
                else:
                    new_phases[k] = theta
            new_obj = _global_objective(new_phases, s, metric)
            if new_obj < obj:
                # mathematically impossible beyond float noise; keep the
                # incumbent so the recorded history stays non-decreasing
                break
            phases = new_phases
            history.append(new_obj)
            converged = abs(new_obj - obj) <= cfg.rel_tol * max(abs(obj), 1e-12)
            obj = new_obj
            if converged:
                break
        restart_objectives.append(obj)
        if obj > best_obj:
            best_obj = obj
            best_phases = phases
            best_history = history
    return DesignResult(
        codebook=Codebook(best_phases),
        objective_history=best_history,
        restart_objectives=restart_objectives,
    )


def lloyd_design(samples, metric: Metric, cfg: LloydConfig) -> DesignResult:
    """Design a codebook with ideal phase shifters; best of cfg.restarts runs."""
    return _design(samples, metric, cfg, bits=None)


def quantized_lloyd_design(samples, metric: Metric, cfg: LloydConfig) -> DesignResult:
    """Design a codebook restricted to B-bit phases via guarded projection."""
    if cfg.quant_bits is None:
        raise ValueError("quantized design requires cfg.quant_bits")
    return _design(samples, metric, cfg, bits=cfg.quant_bits)
