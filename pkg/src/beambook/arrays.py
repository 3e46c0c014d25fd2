"""Antenna array geometry, steering vectors, and codebook spatial response.

Conventions used throughout the package:

* Directions are (theta, phi) with theta the zenith angle in [0, pi] and phi
  the azimuth measured in the x-y plane; elements sit in the y-z plane on an
  (n_v x n_h) grid.
* All angles are radians at the API level (the CLI converts from degrees).
* Flattened element vectors run vertical-index fastest (column-major over the
  (n_v, n_h) grid); weights and phase-offset vectors share this ordering.
* Beamforming weights are constant modulus: entry magnitude 1/sqrt(N), so a
  codeword is fully described by its N phase shifts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True, eq=False)
class ArrayGeometry:
    """Uniform rectangular array: element counts and spacings in wavelengths.

    A uniform linear array (ULA) is the special case ``n_h == 1``; the
    azimuth then has no effect on the array response.
    """

    n_v: int
    n_h: int = 1
    d_v: float = 0.5
    d_h: float = 0.5

    def __post_init__(self):
        if self.n_v < 1 or self.n_h < 1:
            raise ValueError(f"element counts must be >= 1 (got {self.n_v}x{self.n_h})")
        if self.d_v <= 0 or self.d_h <= 0:
            raise ValueError(f"element spacings must be positive (got {self.d_v}, {self.d_h})")

    @property
    def n(self) -> int:
        """Total element count N = n_v * n_h."""
        return self.n_v * self.n_h

    @classmethod
    def ula(cls, n: int, d: float = 0.5) -> "ArrayGeometry":
        return cls(n_v=n, n_h=1, d_v=d, d_h=d)


@dataclass(frozen=True, eq=False)
class Direction:
    """Propagation direction: zenith angle theta, azimuth phi (radians)."""

    theta: float
    phi: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.theta <= math.pi:
            raise ValueError(f"theta must be in [0, pi] (got {self.theta})")
        if not -math.pi <= self.phi <= math.pi:
            raise ValueError(f"phi must be in [-pi, pi] (got {self.phi})")


def _as_readonly(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=float, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class Codeword:
    """Constant-modulus beamforming weight vector, stored as its N phases.

    The implied complex vector has entries exp(j*phases)/sqrt(N), so it has
    unit Euclidean norm and every entry has modulus exactly 1/sqrt(N).
    """

    phases: np.ndarray

    def __post_init__(self):
        phases = np.asarray(self.phases, dtype=float)
        if phases.ndim != 1 or phases.size < 1:
            raise ValueError("codeword phases must be a nonempty 1-D vector")
        object.__setattr__(self, "phases", _as_readonly(np.mod(phases, TWO_PI)))

    @property
    def n(self) -> int:
        return self.phases.size

    @property
    def vector(self) -> np.ndarray:
        """Complex weight vector in W(N)."""
        return np.exp(1j * self.phases) / math.sqrt(self.n)

    @classmethod
    def matched_to(cls, coeffs: np.ndarray) -> "Codeword":
        """Constant-modulus matched filter: phases copied from ``coeffs``."""
        return cls(np.angle(np.asarray(coeffs, dtype=complex)))


@dataclass(frozen=True, eq=False)
class Codebook:
    """Ordered set of K codewords of common length N (the N x K matrix)."""

    phases: np.ndarray  # shape (K, N), one codeword per row

    def __post_init__(self):
        phases = np.asarray(self.phases, dtype=float)
        if phases.ndim != 2 or phases.shape[0] < 1 or phases.shape[1] < 1:
            raise ValueError("codebook needs a (K, N) phase array with K, N >= 1")
        object.__setattr__(self, "phases", _as_readonly(np.mod(phases, TWO_PI)))

    @classmethod
    def from_codewords(cls, codewords) -> "Codebook":
        codewords = list(codewords)
        if not codewords:
            raise ValueError("codebook must contain at least one codeword")
        n = codewords[0].n
        if any(w.n != n for w in codewords):
            raise ValueError("all codewords must share the same length")
        return cls(np.stack([w.phases for w in codewords]))

    @property
    def k(self) -> int:
        return self.phases.shape[0]

    @property
    def n(self) -> int:
        return self.phases.shape[1]

    @property
    def matrix(self) -> np.ndarray:
        """Complex N x K matrix with codewords on the columns."""
        return (np.exp(1j * self.phases) / math.sqrt(self.n)).T

    def __len__(self) -> int:
        return self.k

    def __getitem__(self, k: int) -> Codeword:
        return Codeword(self.phases[k])


def steering_matrix(geom: ArrayGeometry, thetas, phis) -> np.ndarray:
    """Phase-offset vectors for a batch of directions, one per row.

    Row m is the length-N vector with entries
    exp(j*2*pi*((i_v)*d_v*cos(theta) + (i_h)*d_h*sin(theta)*sin(phi))),
    flattened vertical-index fastest.
    """
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    phis = np.atleast_1d(np.asarray(phis, dtype=float))
    if phis.size == 1 and thetas.size > 1:
        phis = np.broadcast_to(phis, thetas.shape)
    if thetas.shape != phis.shape:
        raise ValueError("thetas and phis must have matching shapes")
    iv = np.arange(geom.n_v)
    ih = np.arange(geom.n_h)
    ph_v = TWO_PI * geom.d_v * np.cos(thetas)[:, None] * iv  # (M, n_v)
    ph_h = TWO_PI * geom.d_h * (np.sin(thetas) * np.sin(phis))[:, None] * ih  # (M, n_h)
    phase = ph_h[:, :, None] + ph_v[:, None, :]  # (M, n_h, n_v)
    return np.exp(1j * phase.reshape(thetas.size, geom.n))


def steering_vector(geom: ArrayGeometry, direction: Direction) -> np.ndarray:
    """Phase-offset vector v(theta, phi) of length N (unit-modulus entries)."""
    return steering_matrix(geom, [direction.theta], [direction.phi])[0]


def phase_offset(geom: ArrayGeometry, direction: Direction, idx_v: int, idx_h: int) -> complex:
    """Per-element phase offset for the 1-based element index (idx_v, idx_h)."""
    if not 1 <= idx_v <= geom.n_v:
        raise ValueError(f"idx_v out of range 1..{geom.n_v} (got {idx_v})")
    if not 1 <= idx_h <= geom.n_h:
        raise ValueError(f"idx_h out of range 1..{geom.n_h} (got {idx_h})")
    arg = TWO_PI * (
        (idx_v - 1) * geom.d_v * math.cos(direction.theta)
        + (idx_h - 1) * geom.d_h * math.sin(direction.theta) * math.sin(direction.phi)
    )
    return complex(math.cos(arg), math.sin(arg))


def beam_pattern(w: Codeword, geom: ArrayGeometry, direction: Direction) -> float:
    """Spatial response |w^H v(theta, phi)|^2 of one codeword; bounded by N."""
    if w.n != geom.n:
        raise ValueError(f"codeword length {w.n} does not match array size {geom.n}")
    v = steering_vector(geom, direction)
    return float(np.abs(np.vdot(w.vector, v)) ** 2)


def effective_spatial_response(cb: Codebook, geom: ArrayGeometry, direction: Direction):
    """Best codeword response at a direction: (max gain, argmax index).

    Ties resolve to the lowest codeword index.
    """
    if cb.n != geom.n:
        raise ValueError(f"codebook length {cb.n} does not match array size {geom.n}")
    v = steering_vector(geom, direction)
    gains = np.abs(v @ np.conj(cb.matrix)) ** 2
    idx = int(np.argmax(gains))
    return float(gains[idx]), idx


def save_codebook(cb: Codebook, path) -> None:
    """Write the text codebook format: header ``N K``, then K phase rows."""
    lines = [f"{cb.n} {cb.k}"]
    for row in cb.phases:
        lines.append(" ".join(format(p, ".17g") for p in row))
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def load_codebook(path) -> Codebook:
    """Read the text codebook format written by :func:`save_codebook`."""
    with open(path, "r", encoding="ascii") as fh:
        tokens = fh.read().split()
    if len(tokens) < 2:
        raise ValueError(f"codebook file {path}: missing 'N K' header")
    n, k = int(tokens[0]), int(tokens[1])
    values = np.array([float(t) for t in tokens[2:]], dtype=float)
    if values.size != n * k:
        raise ValueError(f"codebook file {path}: expected {n * k} phases, found {values.size}")
    return Codebook(values.reshape(k, n))
