"""Flooding-schedule LLR belief propagation.

All message arrays are indexed by edge id and may carry leading batch
dimensions, so one call decodes many frames at once.  The per-frame arithmetic
does not depend on the batch size: a frame decoded alone and the same frame
decoded inside a batch produce bit-identical messages.

Sign convention: a positive LLR favours bit 0.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from .code_model import TannerGraph

VARIANTS = ("standard", "full_averaging", "selective_averaging", "two_stage")


# (edge_var, raw, prev_sent, selection) -> sent
Transform = Callable[[np.ndarray, np.ndarray, np.ndarray, object], np.ndarray]


@dataclass(frozen=True)
class DecoderConfig:
    max_iters: int = 50
    llr_clip: float = 30.0
    # beta/nu from a pilot sweep on a (3,6) n=504 code at 2.5-3.0 dB
    beta: float = 4.0
    nu: float = 2.0
    eta: float = 1.0
    cn_threshold: int = 12
    variant: str = "standard"
    # second-stage budget; None reuses max_iters
    redecode_iters: Optional[int] = None

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not self.llr_clip > 0:
            raise ValueError("llr_clip must be positive")
        if self.beta < 0 or self.nu < 0:
            raise ValueError("beta and nu must be non-negative")
        if not self.eta > 0:
            raise ValueError("eta must be positive")
        if self.cn_threshold < 0:
            raise ValueError("cn_threshold must be non-negative")
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown decoder variant {self.variant!r}")
        if self.redecode_iters is not None and self.redecode_iters < 1:
            raise ValueError("redecode_iters must be >= 1")

    def with_variant(self, variant: str) -> "DecoderConfig":
        return replace(self, variant=variant)


@dataclass
class MessageState:
    var_to_check: np.ndarray
    check_to_var: np.ndarray
    prev_sent_var_to_check: np.ndarray
    channel: np.ndarray
    posterior: np.ndarray

    def take(self, idx) -> "MessageState":
        return MessageState(*(getattr(self, f)[idx] for f in
                              ("var_to_check", "check_to_var", "prev_sent_var_to_check",
                               "channel", "posterior")))


@dataclass
class DecodeOutcome:
    word: np.ndarray
    converged: bool
    iterations: int
    unsatisfied: int
    stage: str = "stage1"
    posterior_trace: Optional[list] = None
    message_trace: Optional[list] = None
    stage1_unsatisfied: Optional[int] = None
    stage2_invoked: bool = False


@dataclass
class BatchOutcome:
    """Per-frame results of :func:`decode_batch`, as parallel arrays."""

    words: np.ndarray
    converged: np.ndarray
    iterations: np.ndarray
    unsatisfied: np.ndarray
    stage2_invoked: np.ndarray = None
    stage1_unsatisfied: np.ndarray = None
    posterior_traces: Optional[list] = None
    message_traces: Optional[list] = None

    def __post_init__(self):
        if self.stage2_invoked is None:
            self.stage2_invoked = np.zeros(len(self.converged), dtype=bool)
        if self.stage1_unsatisfied is None:
            self.stage1_unsatisfied = self.unsatisfied.copy()

    def __len__(self):
        return len(self.converged)

    def outcome(self, i: int) -> DecodeOutcome:
        return DecodeOutcome(
            word=self.words[i].copy(),
            converged=bool(self.converged[i]),
            iterations=int(self.iterations[i]),
            unsatisfied=int(self.unsatisfied[i]),
            stage="stage2" if self.stage2_invoked[i] else "stage1",
            posterior_trace=None if self.posterior_traces is None else self.posterior_traces[i],
            message_trace=None if self.message_traces is None else self.message_traces[i],
            stage1_unsatisfied=int(self.stage1_unsatisfied[i]),
            stage2_invoked=bool(self.stage2_invoked[i]),
        )


def _check_channel(g: TannerGraph, c) -> np.ndarray:
    c = np.asarray(c, dtype=np.float64)
    if c.shape[-1] != g.n_vars:
        raise ValueError(f"channel LLR length {c.shape[-1]} does not match n_vars={g.n_vars}")
    return c


def _pad(x: np.ndarray, fill) -> np.ndarray:
    return np.concatenate([x, np.full(x.shape[:-1] + (1,), fill, x.dtype)], axis=-1)


def _gather(x: np.ndarray, slots: np.ndarray, width: int, fill) -> np.ndarray:
    """Per-edge array -> (..., width, rows) through a slot-major table."""
    src = _pad(x, fill) if slots.max(initial=-1) >= x.shape[-1] else x
    flat = np.take(src, slots, axis=-1)
    return flat.reshape(x.shape[:-1] + (width, -1))


def _scatter(x: np.ndarray, pos: np.ndarray) -> np.ndarray:
    """Inverse of :func:`_gather` for real (non-padding) slots."""
    return np.take(x.reshape(x.shape[:-2] + (-1,)), pos, axis=-1)


def _exclusive_sums(x: np.ndarray) -> np.ndarray:
    """``out[..., k, :] = sum_{j != k} x[..., j, :]`` from prefix and suffix sums.

    No subtraction, so a dominant term cannot swamp the others.
    """
    width = x.shape[-2]
    out = np.empty_like(x)
    acc = np.zeros_like(x[..., 0, :])
    for k in range(width):
        out[..., k, :] = acc
        acc = acc + x[..., k, :]
    acc = np.zeros_like(acc)
    for k in range(width - 1, -1, -1):
        out[..., k, :] += acc
        acc += x[..., k, :]
    return out


def _check_gather(g, x, fill):
    return _gather(x, g.check_slots, g.check_edges.shape[1], fill)


def _var_gather(g, x, fill):
    return _gather(x, g.var_slots, g.var_edges.shape[1], fill)


def init(g: TannerGraph, c, llr_clip: float = 30.0) -> MessageState:
    c = _check_channel(g, c)
    v2c = np.clip(c[..., g.edge_var], -llr_clip, llr_clip)
    return MessageState(
        var_to_check=v2c,
        check_to_var=np.zeros_like(v2c),
        prev_sent_var_to_check=v2c.copy(),
        channel=c.copy(),
        posterior=c.copy(),
    )


def phi(x):
    """``-log(tanh(x/2))`` for ``x >= 0``; an involution on ``[0, inf]``."""
    with np.errstate(divide="ignore", over="ignore"):
        return np.log1p(2.0 / np.expm1(x))


def check_update(state: MessageState, g: TannerGraph, llr_clip: float = 30.0) -> np.ndarray:
    """Tanh-rule check-to-variable update in sign/log-magnitude form."""
    m = state.var_to_check
    mag = _check_gather(g, phi(np.abs(m)), 0.0)                    # (..., dc, M)
    neg = _check_gather(g, (m < 0).view(np.uint8), 0)
    excl = _exclusive_sums(mag)
    parity = (neg.sum(axis=-2, keepdims=True, dtype=np.uint8) - neg) & 1

    out = np.minimum(phi(excl), llr_clip)
    out = np.where(parity == 1, -out, out)
    state.check_to_var = _scatter(out, g.check_pos)
    return state.check_to_var


def posterior_and_decide(state: MessageState, g: TannerGraph) -> tuple[np.ndarray, np.ndarray]:
    incoming = _var_gather(g, state.check_to_var, 0.0).sum(axis=-2)
    post = state.channel + incoming
    state.posterior = post
    # tie rule: L == 0 decides 0
    return post, (post < 0).astype(np.uint8)


def var_update(state: MessageState, g: TannerGraph, transform: Optional[Transform] = None,
               selection=None, llr_clip: float = 30.0) -> np.ndarray:
    into_var = _var_gather(g, state.check_to_var, 0.0)             # (..., dv, N)
    raw = state.channel[..., None, :] + _exclusive_sums(into_var)
    raw = np.clip(_scatter(raw, g.var_pos), -llr_clip, llr_clip)
    if transform is None:
        sent = raw
    else:
        sent = np.clip(transform(g.edge_var, raw, state.prev_sent_var_to_check, selection),
                       -llr_clip, llr_clip)
    state.var_to_check = sent
    state.prev_sent_var_to_check = sent.copy()
    return sent


def _syndrome_weight(g: TannerGraph, words: np.ndarray) -> np.ndarray:
    bits = _check_gather(g, np.take(words, g.edge_var, axis=-1), 0)
    return (bits.sum(axis=-2, dtype=np.int64) & 1).sum(axis=-1)


def decode_batch(g: TannerGraph, c, cfg: DecoderConfig, transform: Optional[Transform] = None,
                 selection=None, record_trace: bool = False,
                 max_iters: Optional[int] = None) -> BatchOutcome:
    """Decode a (B, N) array of channel LLRs.

    Frames leave the active set as soon as their hard decision satisfies
    every check.  When ``selection`` is given, node selection runs after each
    iteration and the state is passed to ``transform``.
    """
    from .averaging import select_nodes

    c = _check_channel(g, c)
    if c.ndim != 2:
        raise ValueError("decode_batch expects a (B, N) array")
    n_frames = c.shape[0]
    max_iters = cfg.max_iters if max_iters is None else max_iters
    clip = cfg.llr_clip

    state = init(g, c, clip)
    sel = None
    if selection is not None:
        sel = selection.copy()
        sel.prev_belief = np.abs(c)

    words = (c < 0).astype(np.uint8)
    converged = np.zeros(n_frames, dtype=bool)
    iterations = np.zeros(n_frames, dtype=np.int64)
    post_traces = [[] for _ in range(n_frames)] if record_trace else None
    msg_traces = [[] for _ in range(n_frames)] if record_trace else None

    active = np.arange(n_frames)
    done = _syndrome_weight(g, words) == 0
    converged[done] = True
    if done.any():
        keep = ~done
        active = active[keep]
        state = state.take(keep)
        if sel is not None:
            sel = sel.take(keep)

    for it in range(1, max_iters + 1):
        if not len(active):
            break
        var_update(state, g, transform, sel, clip)
        check_update(state, g, clip)
        post, hard = posterior_and_decide(state, g)
        words[active] = hard
        iterations[active] = it
        if record_trace:
            for j, f in enumerate(active):
                post_traces[f].append(post[j].copy())
                msg_traces[f].append(state.var_to_check[j].copy())
        done = _syndrome_weight(g, hard) == 0
        if sel is not None:
            select_nodes(sel, post, cfg)
        if done.any():
            converged[active[done]] = True
            keep = ~done
            active = active[keep]
            state = state.take(keep)
            if sel is not None:
                sel = sel.take(keep)

    return BatchOutcome(
        words=words,
        converged=converged,
        iterations=iterations,
        unsatisfied=_syndrome_weight(g, words),
        posterior_traces=post_traces,
        message_traces=msg_traces,
    )


def decode(g: TannerGraph, c, cfg: DecoderConfig, transform: Optional[Transform] = None,
           selection=None, record_trace: bool = False) -> DecodeOutcome:
    c = _check_channel(g, c)
    if c.ndim != 1:
        raise ValueError("decode expects a single frame; use decode_batch for batches")
    if selection is not None:
        selection = selection.take(np.newaxis) if selection.selected.ndim == 1 else selection
    res = decode_batch(g, c[np.newaxis], cfg, transform, selection, record_trace)
    return res.outcome(0)
