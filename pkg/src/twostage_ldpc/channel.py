"""BPSK over AWGN with channel LLR output.

Bit 0 maps to +1 and bit 1 to -1; the channel LLR is ``2 y / sigma^2`` so a
positive value favours bit 0.  SNR is Eb/N0 in dB, adjusted for code rate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np


@dataclass(frozen=True)
class ChannelConfig:
    snr_db: float
    rate: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.rate <= 1:
            raise ValueError("rate must lie in (0, 1]")
        if not math.isfinite(self.snr_db):
            raise ValueError("snr_db must be finite")

    @property
    def noise_var(self) -> float:
        return 1.0 / (2.0 * self.rate * 10.0 ** (self.snr_db / 10.0))

    @property
    def sigma(self) -> float:
        return math.sqrt(self.noise_var)


def trial_rng(seed: int, *key: int) -> np.random.Generator:
    """Private stream for one trial, derived only from the seed and the key."""
    return np.random.default_rng(np.random.SeedSequence([seed, *key]))


def bpsk(w) -> np.ndarray:
    return 1.0 - 2.0 * np.asarray(w, dtype=np.float64)


def receive(w, cfg: ChannelConfig, rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """Noisy BPSK samples ``y``."""
    rng = np.random.default_rng(cfg.seed) if rng is None else rng
    x = bpsk(w)
    return x + cfg.sigma * rng.standard_normal(x.shape)


def transmit(w, cfg: ChannelConfig, rng: Optional[np.random.Generator] = None) -> np.ndarray:
    y = receive(w, cfg, rng)
    return 2.0 * y / cfg.noise_var
