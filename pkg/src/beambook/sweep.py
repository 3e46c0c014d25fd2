"""Noisy ping-pong beam sweeping: two-stage Tx/Rx codeword selection.

The transmitter sweeps its codebook while the receiver listens with a
single-element (omni) weight; the best observed index is fed back, then the
receiver sweeps its own codebook against the fixed Tx beam. Noise is redrawn
independently for every swept codeword. Selection is noisy; the reported
beamforming gain of the selected pair is evaluated noiselessly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .arrays import Codebook
from .channel import _crandn


@dataclass(frozen=True, eq=False)
class SweepConfig:
    """Link power budget: total transmit power and per-element noise power."""

    p_tot: float
    n0: float

    def __post_init__(self):
        if self.p_tot <= 0 or self.n0 <= 0:
            raise ValueError(f"p_tot and n0 must be positive (got {self.p_tot}, {self.n0})")

    @property
    def snr_db(self) -> float:
        return 10.0 * math.log10(self.p_tot / self.n0)

    @classmethod
    def from_snr_db(cls, snr_db: float) -> "SweepConfig":
        return cls(p_tot=10.0 ** (snr_db / 10.0), n0=1.0)


@dataclass(frozen=True, eq=False)
class SweepOutcome:
    tx_index: int
    rx_index: int
    bf_gain: float
    snr_eff: float
    rate: float


def omni_receive_codeword(n_r: int) -> np.ndarray:
    """Receive weight used during the Tx sweep: single-element reception.

    A true constant-modulus omni codeword generally does not exist, so the
    Tx sweep listens on the first element with unit weight (array gain 1).
    """
    if n_r < 1:
        raise ValueError(f"n_r must be >= 1 (got {n_r})")
    w = np.zeros(n_r, dtype=complex)
    w[0] = 1.0
    return w


def ping_pong_select(h_matrix: np.ndarray, cb_tx: Codebook, cb_rx: Codebook,
                     cfg: SweepConfig, rng: np.random.Generator) -> SweepOutcome:
    """Run one noisy two-stage selection trial over an N_R x N_T channel."""
    h = np.asarray(h_matrix, dtype=complex)
    if h.ndim != 2:
        raise ValueError("channel must be an N_R x N_T matrix")
    n_r, n_t = h.shape
    if cb_tx.n != n_t:
        raise ValueError(f"tx codebook length {cb_tx.n} does not match N_T={n_t}")
    if cb_rx.n != n_r:
        raise ValueError(f"rx codebook length {cb_rx.n} does not match N_R={n_r}")
    w_tx = cb_tx.matrix
    w_rx = cb_rx.matrix
    amp = math.sqrt(cfg.p_tot)
    sigma = math.sqrt(cfg.n0)

    w_omni = omni_receive_codeword(n_r)
    y_tx = amp * (np.conj(w_omni) @ h @ w_tx) + sigma * _crandn(rng, cb_tx.k)
    k_tx = int(np.argmax(np.abs(y_tx) ** 2))

    fixed = h @ w_tx[:, k_tx]
    y_rx = amp * (np.conj(w_rx).T @ fixed) + sigma * _crandn(rng, cb_rx.k)
    k_rx = int(np.argmax(np.abs(y_rx) ** 2))

    bf_gain = float(np.abs(np.conj(w_rx[:, k_rx]) @ fixed) ** 2)
    snr_eff = cfg.p_tot * bf_gain / cfg.n0
    return SweepOutcome(
        tx_index=k_tx,
        rx_index=k_rx,
        bf_gain=bf_gain,
        snr_eff=snr_eff,
        rate=math.log2(1.0 + snr_eff),
    )
