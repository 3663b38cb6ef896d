"""Node selection on belief dynamics and the message-averaging transforms.

A variable node is *selected* for one iteration when the magnitude of its
posterior drops by more than ``beta`` or rises by more than ``nu`` between
consecutive iterations.  Selected nodes send the mean of their new and
previously sent message instead of the new one.  Flag value 2 marks nodes
whose channel LLR was modified by the second stage; those stay selected for
the whole re-decode.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bp import BatchOutcome, DecodeOutcome, DecoderConfig, decode, decode_batch
from .code_model import TannerGraph

UNSELECTED, SELECTED, PINNED = 0, 1, 2


@dataclass
class SelectionState:
    selected: np.ndarray      # int8 flags in {0, 1, 2}
    prev_belief: np.ndarray   # |L| from the previous iteration

    @classmethod
    def initial(cls, channel, pinned=None) -> "SelectionState":
        channel = np.asarray(channel, dtype=np.float64)
        selected = np.zeros(channel.shape, dtype=np.int8)
        if pinned is not None:
            selected[..., np.asarray(pinned, dtype=np.intp)] = PINNED
        return cls(selected, np.abs(channel))

    def copy(self) -> "SelectionState":
        return SelectionState(self.selected.copy(), self.prev_belief.copy())

    def take(self, idx) -> "SelectionState":
        return SelectionState(self.selected[idx], self.prev_belief[idx])


def select_nodes(sel: SelectionState, posterior, cfg: DecoderConfig) -> SelectionState:
    """One node-selection pass; updates ``sel`` in place and returns it."""
    belief = np.abs(posterior)
    prev = sel.prev_belief
    flags = np.where(sel.selected == PINNED, PINNED, UNSELECTED).astype(np.int8)
    drop = (belief < prev) & (prev - belief > cfg.beta)
    rise = (belief > prev) & (belief - prev > cfg.nu)
    flags[(drop | rise) & (flags != PINNED)] = SELECTED
    sel.selected = flags
    sel.prev_belief = belief
    return sel


def averaging_transform(v, raw, prev_sent, sel: SelectionState):
    """Average ``raw`` with the previously sent message when ``v`` is selected."""
    selected = sel.selected[..., v]
    return np.where(selected > 0, 0.5 * (raw + prev_sent), raw)


def full_averaging_transform(raw, prev_sent):
    return 0.5 * (raw + prev_sent)


def _full_hook(v, raw, prev_sent, sel):
    return full_averaging_transform(raw, prev_sent)


def selective_decode_batch(g: TannerGraph, c, cfg: DecoderConfig, pinned_mask=None,
                           record_trace: bool = False, max_iters=None) -> BatchOutcome:
    """Selective-averaging decode of a (B, N) batch.

    ``pinned_mask`` is an optional boolean (B, N) array of nodes carrying
    the permanent selection flag.
    """
    c = np.asarray(c, dtype=np.float64)
    sel = SelectionState.initial(c)
    if pinned_mask is not None:
        sel.selected[np.asarray(pinned_mask, dtype=bool)] = PINNED
    return decode_batch(g, c, cfg, averaging_transform, sel, record_trace, max_iters)


def full_averaging_decode_batch(g: TannerGraph, c, cfg: DecoderConfig,
                                record_trace: bool = False) -> BatchOutcome:
    return decode_batch(g, c, cfg, _full_hook, None, record_trace)


def selective_decode(g: TannerGraph, c, cfg: DecoderConfig, pinned=None,
                     record_trace: bool = False) -> DecodeOutcome:
    c = np.asarray(c, dtype=np.float64)
    return decode(g, c, cfg, averaging_transform, SelectionState.initial(c, pinned), record_trace)


def full_averaging_decode(g: TannerGraph, c, cfg: DecoderConfig,
                          record_trace: bool = False) -> DecodeOutcome:
    return decode(g, c, cfg, _full_hook, None, record_trace)
