"""Codebook performance metrics: value/derivative functions and estimators.

A metric is a scalar function f applied to the best-codeword gain
max_k |W[k]^H h|^2 and averaged over channel realizations:

* average gain:  f(x) = x
* data rate:     f(x) = log2(1 + x)
* coverage:      f(x) = sigmoid(alpha * (x - gamma)), a differentiable
  surrogate for the hard indicator 1{x >= gamma}

The sigmoid is used only inside optimization; outage reporting always uses
the hard indicator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .arrays import Codebook

AVG_GAIN = "avg"
RATE = "rate"
COVERAGE = "coverage"

_KINDS = (AVG_GAIN, RATE, COVERAGE)
_LN2 = math.log(2.0)


@dataclass(frozen=True, eq=False)
class Metric:
    """Metric selector with threshold/steepness knobs where applicable.

    ``snr`` is the linear P_tot/N_0 used only when reporting data rates; the
    rate metric itself is f(x) = log2(1 + x).
    """

    kind: str
    gamma: float = 0.0
    alpha: float = 8.0
    snr: float = 10.0 ** 0.5  # 5 dB

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown metric kind {self.kind!r}; expected one of {_KINDS}")
        if self.kind == COVERAGE:
            if self.gamma < 0:
                raise ValueError(f"coverage threshold gamma must be >= 0 (got {self.gamma})")
            if self.alpha <= 0:
                raise ValueError(f"sigmoid steepness alpha must be > 0 (got {self.alpha})")
        if self.snr <= 0:
            raise ValueError(f"snr must be positive (got {self.snr})")

    @classmethod
    def avg_gain(cls) -> "Metric":
        return cls(AVG_GAIN)

    @classmethod
    def rate(cls, snr_db: float = 5.0) -> "Metric":
        return cls(RATE, snr=10.0 ** (snr_db / 10.0))

    @classmethod
    def coverage(cls, gamma: float, alpha: float = 8.0) -> "Metric":
        return cls(COVERAGE, gamma=gamma, alpha=alpha)

    def value(self, x):
        """f(x); accepts scalars or arrays."""
        x = np.asarray(x, dtype=float)
        if self.kind == AVG_GAIN:
            out = x.copy()
        elif self.kind == RATE:
            out = np.log2(1.0 + x)
        else:
            out = expit(self.alpha * (x - self.gamma))
        return float(out) if out.ndim == 0 else out

    def derivative(self, x):
        """f'(x); accepts scalars or arrays."""
        x = np.asarray(x, dtype=float)
        if self.kind == AVG_GAIN:
            out = np.ones_like(x)
        elif self.kind == RATE:
            out = 1.0 / ((1.0 + x) * _LN2)
        else:
            z = self.alpha * (x - self.gamma)
            # expit(z) * expit(-z) = s * (1 - s) without tail cancellation
            out = self.alpha * expit(z) * expit(-z)
        return float(out) if out.ndim == 0 else out


def codebook_gains(cb: Codebook, samples) -> np.ndarray:
    """Per-sample, per-codeword gains |W[k]^H h|^2 as an (L, K) array."""
    s = np.atleast_2d(np.asarray(samples, dtype=complex))
    if s.shape[1] != cb.n:
        raise ValueError(f"sample length {s.shape[1]} does not match codebook length {cb.n}")
    return np.abs(s @ np.conj(cb.matrix)) ** 2


def effective_gain(cb: Codebook, h: np.ndarray):
    """Noiseless best-codeword gain for one channel vector: (gain, index)."""
    gains = codebook_gains(cb, h)[0]
    idx = int(np.argmax(gains))
    return float(gains[idx]), idx


def estimate_objective(cb: Codebook, samples, metric: Metric) -> float:
    """Sample mean of f(max_k |W[k]^H h|^2) over the given channel vectors."""
    s = np.atleast_2d(np.asarray(samples, dtype=complex))
    if s.shape[0] == 0:
        raise ValueError("cannot estimate an objective from an empty sample list")
    gains = codebook_gains(cb, s).max(axis=1)
    return float(np.mean(metric.value(gains)))


def outage_fraction(cb: Codebook, samples, gamma: float) -> float:
    """Empirical Pr{max_k |W[k]^H h|^2 < gamma} with the hard indicator."""
    s = np.atleast_2d(np.asarray(samples, dtype=complex))
    if s.shape[0] == 0:
        raise ValueError("cannot estimate outage from an empty sample list")
    gains = codebook_gains(cb, s).max(axis=1)
    return float(np.mean(gains < gamma))


def rate_from_gain(gain, snr: float):
    """Reported data rate log2(1 + snr * gain) for a linear snr = P_tot/N_0."""
    return np.log2(1.0 + snr * np.asarray(gain, dtype=float))
