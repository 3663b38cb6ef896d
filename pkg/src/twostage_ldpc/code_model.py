"""Tanner-graph representation of binary LDPC codes.

A :class:`TannerGraph` holds both adjacency views of the parity-check matrix
plus a dense edge numbering (variable-major) that the decoders use to index
their message arrays.  Codes can be read from / written to the alist format
or generated as random regular codes free of 4-cycles.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np


class AlistError(ValueError):
    """Malformed alist input; carries the 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class CodeConstructionError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class TannerGraph:
    """Immutable bipartite graph between ``n_vars`` bits and ``n_checks`` checks.

    ``var_adj[v]`` lists the checks incident to variable ``v`` and
    ``check_adj[c]`` the variables incident to check ``c``.  Edge ``e`` is the
    ``e``-th incidence when walking ``var_adj`` in variable-major order.
    """

    n_vars: int
    n_checks: int
    var_adj: tuple[tuple[int, ...], ...]
    check_adj: tuple[tuple[int, ...], ...]
    # derived index arrays, filled in __post_init__
    edge_var: np.ndarray = field(init=False, repr=False)
    edge_check: np.ndarray = field(init=False, repr=False)
    var_edges: np.ndarray = field(init=False, repr=False)
    check_edges: np.ndarray = field(init=False, repr=False)
    var_slots: np.ndarray = field(init=False, repr=False)
    check_slots: np.ndarray = field(init=False, repr=False)
    var_pos: np.ndarray = field(init=False, repr=False)
    check_pos: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if len(self.var_adj) != self.n_vars or len(self.check_adj) != self.n_checks:
            raise ValueError("adjacency list count does not match graph size")
        for v, checks in enumerate(self.var_adj):
            if len(set(checks)) != len(checks):
                raise ValueError(f"duplicate check in neighbourhood of variable {v}")
            for c in checks:
                if not 0 <= c < self.n_checks:
                    raise ValueError(f"check index {c} out of range")
        for c, vars_ in enumerate(self.check_adj):
            if len(set(vars_)) != len(vars_):
                raise ValueError(f"duplicate variable in neighbourhood of check {c}")
            for v in vars_:
                if not 0 <= v < self.n_vars:
                    raise ValueError(f"variable index {v} out of range")
        from_vars = {(v, c) for v, cs in enumerate(self.var_adj) for c in cs}
        from_checks = {(v, c) for c, vs in enumerate(self.check_adj) for v in vs}
        if from_vars != from_checks:
            raise ValueError("variable and check adjacency views disagree")

        edge_var = np.array([v for v, cs in enumerate(self.var_adj) for _ in cs], dtype=np.intp)
        edge_check = np.array([c for cs in self.var_adj for c in cs], dtype=np.intp)
        n_edges = len(edge_var)
        edge_id = {(int(v), int(c)): e for e, (v, c) in enumerate(zip(edge_var, edge_check))}

        # Padded gather tables; slot value n_edges points at a scratch column.
        dv = max((len(cs) for cs in self.var_adj), default=0)
        dc = max((len(vs) for vs in self.check_adj), default=0)
        var_edges = np.full((self.n_vars, max(dv, 1)), n_edges, dtype=np.intp)
        for v, cs in enumerate(self.var_adj):
            var_edges[v, : len(cs)] = [edge_id[v, c] for c in cs]
        check_edges = np.full((self.n_checks, max(dc, 1)), n_edges, dtype=np.intp)
        for c, vs in enumerate(self.check_adj):
            check_edges[c, : len(vs)] = [edge_id[v, c] for v in vs]

        # Slot-major flattening of the padded tables: slot k of every row is
        # contiguous, so per-row sums become elementwise adds.  *_pos inverts it.
        var_slots = var_edges.T.ravel()
        check_slots = check_edges.T.ravel()
        var_pos = np.empty(n_edges, dtype=np.intp)
        var_pos[var_slots[var_slots < n_edges]] = np.flatnonzero(var_slots < n_edges)
        check_pos = np.empty(n_edges, dtype=np.intp)
        check_pos[check_slots[check_slots < n_edges]] = np.flatnonzero(check_slots < n_edges)

        for name, arr in [
            ("edge_var", edge_var),
            ("edge_check", edge_check),
            ("var_edges", var_edges),
            ("check_edges", check_edges),
            ("var_slots", var_slots),
            ("check_slots", check_slots),
            ("var_pos", var_pos),
            ("check_pos", check_pos),
        ]:
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def from_adjacency(cls, n_vars: int, n_checks: int, check_adj: Iterable[Iterable[int]]) -> "TannerGraph":
        check_adj = tuple(tuple(int(v) for v in vs) for vs in check_adj)
        var_adj: list[list[int]] = [[] for _ in range(n_vars)]
        for c, vs in enumerate(check_adj):
            for v in vs:
                if not 0 <= v < n_vars:
                    raise ValueError(f"variable index {v} out of range")
                var_adj[v].append(c)
        return cls(n_vars, n_checks, tuple(map(tuple, var_adj)), check_adj)

    @classmethod
    def from_matrix(cls, H) -> "TannerGraph":
        H = np.asarray(H)
        if H.ndim != 2:
            raise ValueError("parity-check matrix must be 2-D")
        if not np.isin(H, (0, 1)).all():
            raise ValueError("parity-check matrix must be 0/1")
        m, n = H.shape
        return cls.from_adjacency(n, m, (np.flatnonzero(row).tolist() for row in H))

    @property
    def n_edges(self) -> int:
        return len(self.edge_var)

    def to_matrix(self) -> np.ndarray:
        H = np.zeros((self.n_checks, self.n_vars), dtype=np.uint8)
        H[self.edge_check, self.edge_var] = 1
        return H

    def var_degrees(self) -> list[int]:
        return [len(cs) for cs in self.var_adj]

    def check_degrees(self) -> list[int]:
        return [len(vs) for vs in self.check_adj]

    def edge_index(self, v: int, c: int) -> int:
        hits = np.flatnonzero((self.edge_var == v) & (self.edge_check == c))
        if not len(hits):
            raise KeyError((v, c))
        return int(hits[0])

    def __eq__(self, other):
        if not isinstance(other, TannerGraph):
            return NotImplemented
        return (
            self.n_vars == other.n_vars
            and self.n_checks == other.n_checks
            and self.var_adj == other.var_adj
            and self.check_adj == other.check_adj
        )

    def __hash__(self):
        return hash((self.n_vars, self.n_checks, self.var_adj, self.check_adj))


def load_alist(text: str) -> TannerGraph:
    """Parse alist text into a :class:`TannerGraph`.

    Neighbour lists are 1-based and may be zero padded.  Every structural
    problem raises :class:`AlistError` naming the offending line.
    """
    lines = [(i + 1, ln.split()) for i, ln in enumerate(text.splitlines())]
    lines = [(no, toks) for no, toks in lines if toks]
    pos = 0

    def next_ints(expected: int | None, what: str) -> tuple[int, list[int]]:
        nonlocal pos
        if pos >= len(lines):
            raise AlistError(f"unexpected end of input while reading {what}", len(text.splitlines()) + 1)
        no, toks = lines[pos]
        pos += 1
        try:
            vals = [int(t) for t in toks]
        except ValueError:
            raise AlistError(f"non-integer token in {what}", no) from None
        if expected is not None and len(vals) != expected:
            raise AlistError(f"expected {expected} integers in {what}, got {len(vals)}", no)
        return no, vals

    no, (n, m) = next_ints(2, "header")
    if n <= 0 or m <= 0:
        raise AlistError("header sizes must be positive", no)
    no, (max_dv, max_dc) = next_ints(2, "maximum degrees")
    if max_dv < 0 or max_dc < 0:
        raise AlistError("maximum degrees must be non-negative", no)
    no_dv, var_deg = next_ints(n, "variable degrees")
    no_dc, check_deg = next_ints(m, "check degrees")
    for no_, degs, cap in ((no_dv, var_deg, max_dv), (no_dc, check_deg, max_dc)):
        bad = [d for d in degs if d < 0 or d > cap]
        if bad:
            raise AlistError(f"degree {bad[0]} outside [0, {cap}]", no_)
    if max(var_deg) != max_dv or max(check_deg) != max_dc:
        raise AlistError("declared maximum degree does not match degree list", no)

    def read_lists(count, degs, cap, limit, what):
        out = []
        for i in range(count):
            no_, vals = next_ints(None, f"{what} {i + 1} neighbours")
            if len(vals) not in (degs[i], cap):
                raise AlistError(f"{what} {i + 1}: expected {degs[i]} neighbours, got {len(vals)}", no_)
            nz = [x for x in vals if x != 0]
            if len(nz) != degs[i] or any(x == 0 for x in vals[: degs[i]]):
                raise AlistError(f"{what} {i + 1}: neighbour count does not match degree {degs[i]}", no_)
            for x in nz:
                if not 1 <= x <= limit:
                    raise AlistError(f"{what} {i + 1}: index {x} out of range 1..{limit}", no_)
            if len(set(nz)) != len(nz):
                raise AlistError(f"{what} {i + 1}: duplicate neighbour", no_)
            out.append((no_, tuple(x - 1 for x in nz)))
        return out

    var_lists = read_lists(n, var_deg, max_dv, m, "variable")
    check_lists = read_lists(m, check_deg, max_dc, n, "check")
    if pos != len(lines):
        raise AlistError("trailing data after check neighbour lists", lines[pos][0])

    var_adj = tuple(adj for _, adj in var_lists)
    check_adj = tuple(adj for _, adj in check_lists)
    for c, (no_, vs) in enumerate(check_lists):
        for v in vs:
            if c not in var_adj[v]:
                raise AlistError(f"check {c + 1} lists variable {v + 1} but not vice versa", no_)
    return TannerGraph(n, m, var_adj, check_adj)


def save_alist(g: TannerGraph) -> str:
    dv, dc = g.var_degrees(), g.check_degrees()
    max_dv, max_dc = max(dv, default=0), max(dc, default=0)

    def padded(idx, width):
        vals = [i + 1 for i in idx] + [0] * (width - len(idx))
        return " ".join(map(str, vals))

    out = [
        f"{g.n_vars} {g.n_checks}",
        f"{max_dv} {max_dc}",
        " ".join(map(str, dv)),
        " ".join(map(str, dc)),
    ]
    out += [padded(cs, max_dv) for cs in g.var_adj]
    out += [padded(vs, max_dc) for vs in g.check_adj]
    return "\n".join(out) + "\n"


def _as_word(g: TannerGraph, w) -> np.ndarray:
    w = np.asarray(w, dtype=np.uint8)
    if w.shape[-1] != g.n_vars:
        raise ValueError(f"word length {w.shape[-1]} does not match n_vars={g.n_vars}")
    return w


def syndrome(g: TannerGraph, w) -> np.ndarray:
    """Parity of ``w`` over each check; accepts a word or a (B, N) batch."""
    w = _as_word(g, w)
    # the scratch column makes padded slots contribute 0
    ext = np.concatenate([w[..., g.edge_var], np.zeros(w.shape[:-1] + (1,), np.uint8)], axis=-1)
    return np.bitwise_xor.reduce(ext[..., g.check_edges], axis=-1)


def is_codeword(g: TannerGraph, w) -> bool:
    return not syndrome(g, w).any()


def make_regular_code(n: int, d_v: int, d_c: int, seed: int = 0, girth_min: int = 6,
                      max_attempts: int = 200) -> TannerGraph:
    """Random ``(d_v, d_c)``-regular code by socket matching with rejection.

    Variables are visited in a random order; each socket is matched to a
    random check with free sockets, rejecting choices that would create a
    repeated edge or (for ``girth_min=6``) a 4-cycle.  A dead end restarts the
    whole construction with fresh randomness.
    """
    if n <= 0 or d_v <= 0 or d_c <= 0:
        raise CodeConstructionError("n, d_v and d_c must be positive")
    if (n * d_v) % d_c:
        raise CodeConstructionError(f"n*d_v = {n * d_v} is not divisible by d_c = {d_c}")
    if girth_min not in (4, 6):
        raise CodeConstructionError("girth_min must be 4 or 6")
    m = n * d_v // d_c
    if d_v > m:
        raise CodeConstructionError("d_v exceeds the number of checks")

    rng = np.random.default_rng(seed)
    for _ in range(max_attempts):
        check_adj = _try_socket_matching(n, m, d_v, d_c, girth_min, rng)
        if check_adj is not None:
            return TannerGraph.from_adjacency(n, m, (sorted(vs) for vs in check_adj))
    raise CodeConstructionError(f"no ({d_v},{d_c})-regular graph found in {max_attempts} attempts")


def _try_socket_matching(n, m, d_v, d_c, girth_min, rng) -> list[list[int]] | None:
    free = np.full(m, d_c, dtype=np.int64)
    check_adj: list[list[int]] = [[] for _ in range(m)]
    var_adj: list[list[int]] = [[] for _ in range(n)]
    for v in rng.permutation(n):
        for _ in range(d_v):
            banned = set(var_adj[v])
            if girth_min >= 6:
                for c in var_adj[v]:
                    for u in check_adj[c]:
                        banned.update(var_adj[u])
            weights = free.astype(float)
            if banned:
                weights[list(banned)] = 0.0
            total = weights.sum()
            if total == 0:
                return None
            c = int(rng.choice(m, p=weights / total))
            free[c] -= 1
            check_adj[c].append(int(v))
            var_adj[v].append(c)
    return check_adj


def max_check_overlap(g: TannerGraph) -> int:
    """Largest number of variables shared by any two distinct checks."""
    H = g.to_matrix().astype(np.int64)
    overlap = H @ H.T
    np.fill_diagonal(overlap, 0)
    return int(overlap.max(initial=0))


def parse_code_source(source: str) -> TannerGraph:
    """Resolve a CLI code source: ``gen:N,dv,dc[,seed]`` or an alist path."""
    if source.startswith("gen:"):
        try:
            parts = [int(x) for x in source[4:].split(",")]
        except ValueError:
            raise ValueError(f"bad generator spec {source!r}") from None
        if len(parts) not in (3, 4):
            raise ValueError(f"bad generator spec {source!r}; expected gen:N,dv,dc[,seed]")
        n, dv, dc, *rest = parts
        return make_regular_code(n, dv, dc, seed=rest[0] if rest else 0)
    with open(source) as fh:
        return load_alist(fh.read())

