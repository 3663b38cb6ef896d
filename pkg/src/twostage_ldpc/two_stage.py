"""Second decoding stage: channel-LLR flipping around unsatisfied checks.

When selective-averaging decoding fails with only a few unsatisfied checks,
the variables touching those checks are candidates for a trapping set.  A
subset whose members share no *satisfied* check is flipped in the channel
LLRs (scaled by ``eta``), pinned as always-averaged, and the frame is decoded
once more from fresh messages.  No backtracking is done.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .averaging import PINNED, SelectionState, selective_decode_batch
from .bp import BatchOutcome, DecodeOutcome, DecoderConfig
from .code_model import TannerGraph, syndrome


@dataclass(frozen=True)
class SecondStagePlan:
    unsatisfied_checks: frozenset
    candidate_vars: tuple     # sorted union of N(c) over unsatisfied c
    flip_set: tuple           # sorted, greedily admitted


def build_plan(g: TannerGraph, failed, cn_threshold: int) -> Optional[SecondStagePlan]:
    """Plan the flips for a failed first-stage outcome, or ``None``.

    ``failed`` is a :class:`DecodeOutcome` or a bare hard-decision word.
    Returns ``None`` when the word is a codeword or has ``cn_threshold`` or
    more unsatisfied checks.
    """
    word = failed.word if isinstance(failed, DecodeOutcome) else failed
    unsat = np.flatnonzero(syndrome(g, word))
    if len(unsat) == 0 or len(unsat) >= cn_threshold:
        return None
    unsat_set = frozenset(int(c) for c in unsat)
    candidates = sorted({v for c in unsat_set for v in g.check_adj[c]})

    claimed: set[int] = set()
    flips = []
    for v in candidates:
        satisfied = set(g.var_adj[v]) - unsat_set
        if claimed.isdisjoint(satisfied):
            flips.append(v)
            claimed |= satisfied
    return SecondStagePlan(unsat_set, tuple(candidates), tuple(flips))


def apply_plan(c, plan: SecondStagePlan, cfg: DecoderConfig,
               sel: Optional[SelectionState] = None) -> tuple[np.ndarray, SelectionState]:
    c = np.array(c, dtype=np.float64)
    sel = SelectionState.initial(c) if sel is None else sel.copy()
    idx = np.asarray(plan.flip_set, dtype=np.intp)
    c[idx] = -c[idx] * cfg.eta
    sel.selected[idx] = PINNED
    return c, sel


def two_stage_decode_batch(g: TannerGraph, c, cfg: DecoderConfig,
                           record_trace: bool = False) -> BatchOutcome:
    c = np.asarray(c, dtype=np.float64)
    first = selective_decode_batch(g, c, cfg, record_trace=record_trace)
    out = BatchOutcome(
        words=first.words.copy(),
        converged=first.converged.copy(),
        iterations=first.iterations.copy(),
        unsatisfied=first.unsatisfied.copy(),
        posterior_traces=first.posterior_traces,
        message_traces=first.message_traces,
    )

    frames, rows, pins = [], [], []
    for f in np.flatnonzero(~first.converged):
        plan = build_plan(g, first.words[f], cfg.cn_threshold)
        if plan is None:
            continue
        modified, sel = apply_plan(c[f], plan, cfg)
        frames.append(f)
        rows.append(modified)
        pins.append(sel.selected == PINNED)
    if not frames:
        return out

    frames = np.asarray(frames)
    second = selective_decode_batch(g, np.stack(rows), cfg, pinned_mask=np.stack(pins),
                                    max_iters=cfg.redecode_iters or cfg.max_iters)
    out.stage2_invoked[frames] = True
    out.iterations[frames] += second.iterations
    # keep the old word only when it strictly beats the new one
    use_new = second.converged | ~(first.unsatisfied[frames] < second.unsatisfied)
    take = frames[use_new]
    out.words[take] = second.words[use_new]
    out.converged[take] = second.converged[use_new]
    out.unsatisfied[take] = second.unsatisfied[use_new]
    return out


def two_stage_decode(g: TannerGraph, c, cfg: DecoderConfig, record_trace: bool = False) -> DecodeOutcome:
    c = np.asarray(c, dtype=np.float64)
    if c.ndim != 1:
        raise ValueError("two_stage_decode expects a single frame")
    return two_stage_decode_batch(g, c[np.newaxis], cfg, record_trace).outcome(0)
