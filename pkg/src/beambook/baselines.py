"""Reference codebooks: beam steering, DFT, the 2x2-UPA steering tables, omni.

The omni-directional reference is modeled analytically as constant gain 1
rather than synthesized: a perfect constant-modulus omni codeword does not
exist for general geometries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .arrays import ArrayGeometry, Codebook, Codeword, Direction, steering_vector

# Published steering sets for a 2x2 UPA, in degrees, printed as (theta, phi).
TABLE1_3_DEG = ((90.0, 35.3), (120.0, 19.5), (60.0, 19.5))
TABLE1_4_DEG = ((90.0, 0.0), (41.4, 40.9), (90.0, 60.0), (138.6, 40.9))


@dataclass(frozen=True, eq=False)
class SteeringSpec:
    """Ordered steering directions, one per codeword."""

    directions: tuple

    def __post_init__(self):
        if len(self.directions) < 1:
            raise ValueError("steering spec needs at least one direction")


def beam_steering_codebook(geom: ArrayGeometry, spec: SteeringSpec) -> Codebook:
    """Matched-filter codewords w = (1/sqrt(N)) v(theta, phi) per direction."""
    rows = [Codeword.matched_to(steering_vector(geom, d)) for d in spec.directions]
    return Codebook.from_codewords(rows)


def equispaced_ula_directions(k: int) -> SteeringSpec:
    """k ULA steering directions with cos(theta) equispaced on (-1, 1).

    cos(theta_m) = -1 + (2m - 1)/k for m = 1..k; with k = N and half-wave
    spacing this reproduces the DFT codebook up to global phases.
    """
    if k < 1:
        raise ValueError(f"need k >= 1 directions (got {k})")
    cosines = -1.0 + (2.0 * np.arange(1, k + 1) - 1.0) / k
    return SteeringSpec(tuple(Direction(theta=math.acos(c)) for c in cosines))


def dft_codebook(geom: ArrayGeometry) -> Codebook:
    """N-beam DFT codebook for a half-wave ULA."""
    if geom.n_h != 1:
        raise ValueError("the DFT codebook construction applies to ULAs (n_h == 1)")
    return beam_steering_codebook(geom, equispaced_ula_directions(geom.n))


def table1_spec(k: int, order: str = "theta-phi") -> SteeringSpec:
    """Published 2x2-UPA steering sets with 3 or 4 codewords.

    ``order`` selects how the printed angle pairs are read: "theta-phi" as
    labeled, or "phi-theta" for the swapped interpretation.
    """
    if k == 3:
        pairs = TABLE1_3_DEG
    elif k == 4:
        pairs = TABLE1_4_DEG
    else:
        raise ValueError(f"published steering tables exist for k in (3, 4) (got {k})")
    if order == "theta-phi":
        dirs = tuple(Direction(math.radians(a), math.radians(b)) for a, b in pairs)
    elif order == "phi-theta":
        dirs = tuple(Direction(math.radians(b), math.radians(a)) for a, b in pairs)
    else:
        raise ValueError(f"order must be 'theta-phi' or 'phi-theta' (got {order!r})")
    return SteeringSpec(dirs)


def omni_reference() -> float:
    """Gain of the omni-directional reference: 1 toward every direction."""
    return 1.0
