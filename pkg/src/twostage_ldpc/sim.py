"""Monte Carlo BER/BLER sweeps with all-zero codeword transmission.

Trial ``t`` at SNR index ``k`` draws its noise from a stream seeded by
``(seed, k, t)`` alone.  Results therefore do not depend on batch size or
execution order, and every decoder at a given point sees identical noise,
which makes paired comparisons between decoders possible.
"""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.stats import binomtest

from .bp import DecoderConfig
from .channel import ChannelConfig, transmit, trial_rng
from .code_model import TannerGraph
from .decoders import SHORT_NAMES, run_decoder

log = logging.getLogger(__name__)

CSV_COLUMNS = (
    "decoder", "snr_db", "trials", "bit_errors", "block_errors", "ber", "bler",
    "bler_ci_lo", "bler_ci_hi", "mean_iters", "stage2_invoked", "stage2_resolved", "seed",
)
FAILURE_COLUMNS = ("trial", "decoder", "snr_db", "unsatisfied", "stage")


@dataclass
class SimConfig:
    snr_points: Sequence[float]
    decoders: Sequence[str] = ("standard", "avg", "sel", "twostage")
    trials: int = 10_000
    min_block_errors: int = 100
    min_trials: int = 0
    seed: int = 0
    decoder: DecoderConfig = field(default_factory=DecoderConfig)
    batch_size: int = 500
    rate: Optional[float] = None   # None: design rate 1 - M/N

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not len(self.snr_points):
            raise ValueError("at least one SNR point is required")
        if not len(self.decoders):
            raise ValueError("at least one decoder is required")
        unknown = [d for d in self.decoders if d not in SHORT_NAMES]
        if unknown:
            raise ValueError(f"unknown decoder(s) {unknown}; choose from {sorted(SHORT_NAMES)}")
        if self.min_block_errors < 0 or self.min_trials < 0:
            raise ValueError("min_block_errors and min_trials must be non-negative")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")


@dataclass
class SimStats:
    decoder: str
    snr_db: float
    trials: int
    bit_errors: int
    block_errors: int
    n_vars: int
    iterations: int
    stage2_invoked: int
    stage2_resolved: int
    seed: int
    failures: list = field(default_factory=list, repr=False)
    # per-trial bit-error counts and stage-2 flags, filled when requested
    trial_bit_errors: Optional[np.ndarray] = field(default=None, repr=False)
    trial_stage2: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def ber(self) -> float:
        return self.bit_errors / (self.trials * self.n_vars)

    @property
    def bler(self) -> float:
        return self.block_errors / self.trials

    @property
    def bler_ci(self) -> tuple[float, float]:
        return wilson_interval(self.block_errors, self.trials)

    @property
    def mean_iters(self) -> float:
        return self.iterations / self.trials

    def csv_row(self) -> list[str]:
        lo, hi = self.bler_ci
        return [
            self.decoder, _g(self.snr_db), str(self.trials), str(self.bit_errors),
            str(self.block_errors), _g(self.ber), _g(self.bler), _g(lo), _g(hi),
            _g(self.mean_iters), str(self.stage2_invoked), str(self.stage2_resolved), str(self.seed),
        ]


def _g(x: float) -> str:
    return f"{x:.6g}"


def wilson_interval(k: int, n: int, confidence: float = 0.95) -> tuple[float, float]:
    ci = binomtest(k, n).proportion_ci(confidence_level=confidence, method="wilson")
    return float(ci.low), float(ci.high)


def code_rate(g: TannerGraph) -> float:
    return 1.0 - g.n_checks / g.n_vars


def channel_batch(n: int, snr_db: float, rate: float, seed: int, snr_index: int,
                  trials: range) -> np.ndarray:
    ch = ChannelConfig(snr_db, rate, seed)
    zero = np.zeros(n, dtype=np.uint8)
    return np.stack([transmit(zero, ch, trial_rng(seed, snr_index, t)) for t in trials])


def run_point(g: TannerGraph, decoder: str, snr_db: float, cfg: SimConfig,
              snr_index: int = 0, keep_trials: bool = False) -> SimStats:
    """Simulate one (decoder, SNR) point; ``decoder`` is a CLI short name.

    With ``min_block_errors > 0`` the point stops at the first trial where
    both that many block errors and ``min_trials`` trials have accumulated.
    """
    dcfg = cfg.decoder.with_variant(SHORT_NAMES[decoder])
    rate = code_rate(g) if cfg.rate is None else cfg.rate
    stats = SimStats(decoder, snr_db, 0, 0, 0, g.n_vars, 0, 0, 0, cfg.seed)

    bit_chunks, s2_chunks = [], []
    t0 = 0
    while t0 < cfg.trials:
        stop = min(t0 + cfg.batch_size, cfg.trials)
        llrs = channel_batch(g.n_vars, snr_db, rate, cfg.seed, snr_index, range(t0, stop))
        res = run_decoder(g, llrs, dcfg)
        block = res.words.any(axis=1)

        n_keep = stop - t0
        early = False
        if cfg.min_block_errors > 0:
            # first trial index at which both stopping conditions hold
            cum = stats.block_errors + np.cumsum(block)
            done_at = np.arange(t0 + 1, stop + 1)
            ok = np.flatnonzero((cum >= cfg.min_block_errors) & (done_at >= cfg.min_trials))
            if len(ok):
                n_keep = int(ok[0]) + 1
                early = True

        sl = slice(0, n_keep)
        stats.trials += n_keep
        stats.bit_errors += int(res.words[sl].sum())
        stats.block_errors += int(block[sl].sum())
        stats.iterations += int(res.iterations[sl].sum())
        stats.stage2_invoked += int(res.stage2_invoked[sl].sum())
        stats.stage2_resolved += int((res.stage2_invoked & res.converged)[sl].sum())
        if keep_trials:
            bit_chunks.append(res.words[sl].sum(axis=1))
            s2_chunks.append(res.stage2_invoked[sl].copy())
        for i in np.flatnonzero(block[sl]):
            stats.failures.append((t0 + int(i), decoder, snr_db, int(res.unsatisfied[i]),
                                   "stage2" if res.stage2_invoked[i] else "stage1"))
        t0 += n_keep
        if early:
            break
    if keep_trials:
        stats.trial_bit_errors = np.concatenate(bit_chunks)
        stats.trial_stage2 = np.concatenate(s2_chunks)
    log.info("%s @ %.3g dB: %d trials, %d block errors", decoder, snr_db, stats.trials,
             stats.block_errors)
    return stats


def run_sweep(g: TannerGraph, cfg: SimConfig, keep_trials: bool = False) -> list[SimStats]:
    """All decoders x SNR points, decoder-major then SNR in the given order."""
    return [
        run_point(g, dec, snr, cfg, k, keep_trials)
        for dec in cfg.decoders
        for k, snr in enumerate(cfg.snr_points)
    ]


def format_csv(rows: Sequence[SimStats]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    writer.writerows(r.csv_row() for r in rows)
    return buf.getvalue()


def format_failures(rows: Sequence[SimStats]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(FAILURE_COLUMNS)
    for r in rows:
        for trial, dec, snr, unsat, stage in r.failures:
            writer.writerow([trial, dec, _g(snr), unsat, stage])
    return buf.getvalue()


def format_summary(rows: Sequence[SimStats]) -> str:
    lines = [f"{'decoder':<10} {'Eb/N0 dB':>8} {'trials':>8} {'BER':>11} {'BLER':>11}   BLER 95% CI"]
    for r in rows:
        lo, hi = r.bler_ci
        lines.append(f"{r.decoder:<10} {r.snr_db:>8.3g} {r.trials:>8d} {r.ber:>11.4e} "
                     f"{r.bler:>11.4e}   [{lo:.3e}, {hi:.3e}]")
    return "\n".join(lines)

