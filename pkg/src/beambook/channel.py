"""Ricean LOS+NLOS channel sampling and training-set generation.

Channel vectors follow the single-side specialization of the LOS/NLOS mixture

    h = sqrt(kappa/(kappa+1)) * v(theta0, phi0)
        + sqrt(1/(I*(kappa+1))) * sum_i alpha_i * v(theta_i, phi_i)

with alpha_i ~ CN(0, 1) and all path angles drawn i.i.d. uniform over the
configured ranges, so E[||h||^2] = N. Channel matrices use per-path outer
products v_R v_T^H instead of vectors. ``n_nlos == 0`` degenerates to pure
single-ray draws h = v(theta0, phi0), which is also the default training
distribution (uniform angle of arrival, no fading).

All sampling takes an explicit ``numpy.random.Generator``; there is no hidden
global state. Parallel Monte Carlo should use one generator per worker seeded
as base_seed + worker_index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .arrays import ArrayGeometry, steering_matrix

DEFAULT_THETA_RANGE = (0.0, math.pi)
DEFAULT_PHI_RANGE = (-math.pi / 2, math.pi / 2)


@dataclass(frozen=True, eq=False)
class ChannelParams:
    """Ricean mixture parameters and angle ranges for the path draws."""

    kappa: float = 100.0
    n_nlos: int = 5
    theta_range: tuple = DEFAULT_THETA_RANGE
    phi_range: tuple = DEFAULT_PHI_RANGE

    def __post_init__(self):
        if not (self.kappa >= 0.0):
            raise ValueError(f"kappa must be >= 0 (got {self.kappa})")
        if self.n_nlos < 0:
            raise ValueError(f"n_nlos must be >= 0 (got {self.n_nlos})")
        if self.kappa == 0.0 and self.n_nlos == 0:
            raise ValueError("kappa=0 requires at least one NLOS path")
        for name, rng in (("theta_range", self.theta_range), ("phi_range", self.phi_range)):
            lo, hi = rng
            if hi < lo:
                raise ValueError(f"{name} must be (lo, hi) with hi >= lo (got {rng})")

    @classmethod
    def los(cls, **kw) -> "ChannelParams":
        """LOS scenario: Ricean factor 100 (20 dB), 5 NLOS paths."""
        return cls(kappa=100.0, n_nlos=5, **kw)

    @classmethod
    def nlos(cls, **kw) -> "ChannelParams":
        """NLOS scenario: Ricean factor 1 (0 dB), 5 NLOS paths."""
        return cls(kappa=1.0, n_nlos=5, **kw)

    @classmethod
    def single_ray(cls, **kw) -> "ChannelParams":
        """Pure steering-vector draws with uniform angle of arrival."""
        return cls(kappa=math.inf, n_nlos=0, **kw)

    def _weights(self):
        if math.isinf(self.kappa):
            return 1.0, 0.0
        los = math.sqrt(self.kappa / (self.kappa + 1.0))
        nlos = math.sqrt(1.0 / (self.n_nlos * (self.kappa + 1.0)))
        return los, nlos


def _crandn(rng: np.random.Generator, *shape) -> np.ndarray:
    """Circularly-symmetric complex Gaussian samples, unit variance."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0)


def _draw_angles(params: ChannelParams, rng: np.random.Generator, shape):
    thetas = rng.uniform(params.theta_range[0], params.theta_range[1], shape)
    phis = rng.uniform(params.phi_range[0], params.phi_range[1], shape)
    return thetas, phis


def sample_channel_vector(params: ChannelParams, geom: ArrayGeometry,
                          rng: np.random.Generator) -> np.ndarray:
    """One receive-side channel vector of length N."""
    n_paths = params.n_nlos + 1
    thetas, phis = _draw_angles(params, rng, n_paths)
    v = steering_matrix(geom, thetas, phis)  # (I+1, N), row 0 is LOS
    if params.n_nlos == 0:
        return v[0]
    w_los, w_nlos = params._weights()
    alpha = _crandn(rng, params.n_nlos)
    return w_los * v[0] + w_nlos * (alpha @ v[1:])


def sample_channel_matrix(params: ChannelParams, geom_rx: ArrayGeometry,
                          geom_tx: ArrayGeometry, rng: np.random.Generator) -> np.ndarray:
    """One N_R x N_T channel matrix built from per-path outer products."""
    n_paths = params.n_nlos + 1
    th_r, ph_r = _draw_angles(params, rng, n_paths)
    th_t, ph_t = _draw_angles(params, rng, n_paths)
    v_r = steering_matrix(geom_rx, th_r, ph_r)  # (I+1, N_R)
    v_t = steering_matrix(geom_tx, th_t, ph_t)  # (I+1, N_T)
    if params.n_nlos == 0:
        return np.outer(v_r[0], np.conj(v_t[0]))
    w_los, w_nlos = params._weights()
    alpha = _crandn(rng, params.n_nlos)
    h = w_los * np.outer(v_r[0], np.conj(v_t[0]))
    h += w_nlos * np.einsum("i,in,im->nm", alpha, v_r[1:], np.conj(v_t[1:]))
    return h


def generate_training_set(params: ChannelParams, geom: ArrayGeometry, count: int,
                          rng: np.random.Generator) -> np.ndarray:
    """L i.i.d. channel vectors as an (L, N) array; deterministic given seed."""
    if count < 1:
        raise ValueError(f"training count must be >= 1 (got {count})")
    n_paths = params.n_nlos + 1
    thetas, phis = _draw_angles(params, rng, (count, n_paths))
    v = steering_matrix(geom, thetas.ravel(), phis.ravel()).reshape(count, n_paths, geom.n)
    if params.n_nlos == 0:
        return v[:, 0, :]
    w_los, w_nlos = params._weights()
    alpha = _crandn(rng, count, params.n_nlos)
    return w_los * v[:, 0, :] + w_nlos * np.einsum("li,lin->ln", alpha, v[:, 1:, :])


def save_training_set(samples: np.ndarray, path) -> None:
    """Write the text training format: header ``N L``, then interleaved re/im rows."""
    samples = np.asarray(samples, dtype=complex)
    if samples.ndim != 2:
        raise ValueError("training set must be an (L, N) array")
    count, n = samples.shape
    lines = [f"{n} {count}"]
    for row in samples:
        parts = []
        for z in row:
            parts.append(format(z.real, ".17g"))
            parts.append(format(z.imag, ".17g"))
        lines.append(" ".join(parts))
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def load_training_set(path) -> np.ndarray:
    """Read the text training format written by :func:`save_training_set`."""
    with open(path, "r", encoding="ascii") as fh:
        tokens = fh.read().split()
    if len(tokens) < 2:
        raise ValueError(f"training file {path}: missing 'N L' header")
    n, count = int(tokens[0]), int(tokens[1])
    values = np.array([float(t) for t in tokens[2:]], dtype=float)
    if values.size != 2 * n * count:
        raise ValueError(f"training file {path}: expected {2 * n * count} reals, found {values.size}")
    values = values.reshape(count, n, 2)
    return values[:, :, 0] + 1j * values[:, :, 1]
