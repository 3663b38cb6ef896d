"""Variant dispatch shared by the simulator and the CLI."""

from __future__ import annotations

from .averaging import full_averaging_decode_batch, selective_decode_batch
from .bp import BatchOutcome, DecoderConfig, decode_batch
from .code_model import TannerGraph
from .two_stage import two_stage_decode_batch

# CLI short names -> DecoderConfig.variant
SHORT_NAMES = {
    "standard": "standard",
    "avg": "full_averaging",
    "sel": "selective_averaging",
    "twostage": "two_stage",
}
LONG_TO_SHORT = {v: k for k, v in SHORT_NAMES.items()}


def run_decoder(g: TannerGraph, c, cfg: DecoderConfig) -> BatchOutcome:
    if cfg.variant == "standard":
        return decode_batch(g, c, cfg)
    if cfg.variant == "full_averaging":
        return full_averaging_decode_batch(g, c, cfg)
    if cfg.variant == "selective_averaging":
        return selective_decode_batch(g, c, cfg)
    return two_stage_decode_batch(g, c, cfg)
