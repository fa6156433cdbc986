"""Minimum s-t cuts and the simple parametric minimum-cut solver.

A :class:`ParametricSTGraph` holds ``num_nodes`` internal nodes plus an
implicit source and sink. Fixed arcs carry constant capacities; every
node may additionally have one source arc and one sink arc whose
capacities are declared functions of a parameter ``lam``:

* ``CONST(c)``      -- capacity ``c`` for every ``lam``
* ``POS_PART(d)``   -- ``max(lam * d, 0)`` (source arcs only)
* ``NEG_PART(d)``   -- ``max(-lam * d, 0)`` (sink arcs only)
* ``UNSATURABLE``   -- an arc that no finite flow can saturate
* ``ABSENT``        -- no arc

Restricting source arcs to non-decreasing and sink arcs to
non-increasing capacity families makes every instance a parametric flow
graph by construction, so the nested-cut property holds: for ascending
``lam`` the minimal minimum-cut source sets form a chain. The solver
relies on this to answer a whole ascending ``lam`` list with
divide-and-conquer contraction: once the source set at the ends of a
``lam`` interval is known, all nodes already in the lower set are folded
into the source and all nodes outside the upper set into the sink before
the midpoint is solved, so the total work stays close to a single
max-flow on the instance.

All solvers return the *minimal* source set (nodes reachable from the
source in the residual network of a maximum flow), which is unique even
when several minimum cuts exist. Capacities are doubles; value
comparisons elsewhere in the package use absolute tolerance 1e-9.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from ._maxflow import dinic_min_source
from .errors import ConfigError

CAP_ABSENT = 0
CAP_CONST = 1
CAP_POS_PART = 2
CAP_NEG_PART = 3
CAP_UNSAT = 4

_KIND_NAMES = {
    CAP_ABSENT: "absent",
    CAP_CONST: "const",
    CAP_POS_PART: "pos_part",
    CAP_NEG_PART: "neg_part",
    CAP_UNSAT: "unsaturable",
}


@dataclass(frozen=True)
class CapSpec:
    """Capacity family of a single source or sink arc."""

    kind: int
    value: float = 0.0

    @staticmethod
    def const(c: float) -> "CapSpec":
        return CapSpec(CAP_CONST, float(c))

    @staticmethod
    def pos_part(d: float) -> "CapSpec":
        return CapSpec(CAP_POS_PART, float(d))

    @staticmethod
    def neg_part(d: float) -> "CapSpec":
        return CapSpec(CAP_NEG_PART, float(d))


UNSATURABLE = CapSpec(CAP_UNSAT)
ABSENT = CapSpec(CAP_ABSENT)

_SOURCE_KINDS = (CAP_ABSENT, CAP_CONST, CAP_POS_PART, CAP_UNSAT)
_SINK_KINDS = (CAP_ABSENT, CAP_CONST, CAP_NEG_PART, CAP_UNSAT)


@dataclass(frozen=True, eq=False)
class ParametricSTGraph:
    """Directed s-t graph with lam-dependent source/sink arc capacities."""

    num_nodes: int
    arc_tail: np.ndarray
    arc_head: np.ndarray
    arc_cap: np.ndarray
    source_kind: np.ndarray
    source_val: np.ndarray
    sink_kind: np.ndarray
    sink_val: np.ndarray

    def __post_init__(self):
        n = self.num_nodes
        if n < 1:
            raise ConfigError("graph needs at least one internal node")
        for name, dtype in (
            ("arc_tail", np.int64), ("arc_head", np.int64), ("arc_cap", np.float64),
            ("source_kind", np.int8), ("source_val", np.float64),
            ("sink_kind", np.int8), ("sink_val", np.float64),
        ):
            arr = np.ascontiguousarray(getattr(self, name), dtype=dtype)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if not (len(self.arc_tail) == len(self.arc_head) == len(self.arc_cap)):
            raise ConfigError("fixed-arc arrays disagree in length")
        if len(self.arc_tail) and (
            self.arc_tail.min() < 0 or self.arc_tail.max() >= n
            or self.arc_head.min() < 0 or self.arc_head.max() >= n
        ):
            raise ConfigError("fixed-arc endpoint out of range")
        if len(self.arc_cap) and (
            not np.all(np.isfinite(self.arc_cap)) or self.arc_cap.min() < 0
        ):
            raise ConfigError("fixed-arc capacities must be finite and nonnegative")
        for kinds, vals, allowed, side in (
            (self.source_kind, self.source_val, _SOURCE_KINDS, "source"),
            (self.sink_kind, self.sink_val, _SINK_KINDS, "sink"),
        ):
            if len(kinds) != n or len(vals) != n:
                raise ConfigError("per-node capacity arrays must have length num_nodes")
            bad = ~np.isin(kinds, allowed)
            if bad.any():
                i = int(np.flatnonzero(bad)[0])
                raise ConfigError(
                    f"non-monotone capacity spec: {side} arc of node {i} has kind "
                    f"{_KIND_NAMES.get(int(kinds[i]), kinds[i])!r}"
                )
            scaled = np.isin(kinds, (CAP_CONST, CAP_POS_PART, CAP_NEG_PART))
            if np.any(scaled & ~(np.isfinite(vals) & (vals >= 0))):
                raise ConfigError(f"{side} capacity values must be finite and >= 0")

    @property
    def num_fixed_arcs(self) -> int:
        return len(self.arc_tail)

    def source_caps_at(self, lam: float) -> tuple[np.ndarray, np.ndarray]:
        """Evaluate source-arc capacities at ``lam`` -> (caps, unsat mask)."""
        caps = np.zeros(self.num_nodes)
        const = self.source_kind == CAP_CONST
        caps[const] = self.source_val[const]
        pos = self.source_kind == CAP_POS_PART
        caps[pos] = np.maximum(lam * self.source_val[pos], 0.0)
        return caps, self.source_kind == CAP_UNSAT

    def sink_caps_at(self, lam: float) -> tuple[np.ndarray, np.ndarray]:
        """Evaluate sink-arc capacities at ``lam`` -> (caps, unsat mask)."""
        caps = np.zeros(self.num_nodes)
        const = self.sink_kind == CAP_CONST
        caps[const] = self.sink_val[const]
        neg = self.sink_kind == CAP_NEG_PART
        caps[neg] = np.maximum(-lam * self.sink_val[neg], 0.0)
        return caps, self.sink_kind == CAP_UNSAT


def build_st_graph(
    num_nodes: int,
    fixed_arcs: Iterable[tuple[int, int, float]] = (),
    source: dict[int, CapSpec] | None = None,
    sink: dict[int, CapSpec] | None = None,
) -> ParametricSTGraph:
    """Convenience constructor from an arc list and per-node cap specs."""
    arcs = list(fixed_arcs)
    tail = np.array([a[0] for a in arcs], dtype=np.int64)
    head = np.array([a[1] for a in arcs], dtype=np.int64)
    cap = np.array([a[2] for a in arcs], dtype=np.float64)
    skind = np.zeros(num_nodes, dtype=np.int8)
    sval = np.zeros(num_nodes)
    tkind = np.zeros(num_nodes, dtype=np.int8)
    tval = np.zeros(num_nodes)
    for i, spec in (source or {}).items():
        skind[i] = spec.kind
        sval[i] = spec.value
    for i, spec in (sink or {}).items():
        tkind[i] = spec.kind
        tval[i] = spec.value
    return ParametricSTGraph(num_nodes, tail, head, cap, skind, sval, tkind, tval)


@dataclass(frozen=True, eq=False)
class CutResult:
    """A minimum cut at one ``lam``: minimal source set and its value."""

    lam: float
    source_mask: np.ndarray
    cut_value: float

    @property
    def source_set(self) -> frozenset[int]:
        return frozenset(np.flatnonzero(self.source_mask).tolist())

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.cut_value)


@dataclass(frozen=True, eq=False)
class NestedCuts:
    """Minimal source sets for an ascending ``lam`` list, as crossing indices.

    ``q_index[i] = max{k : node i in sink set at lam_k}`` (1-based grid
    positions), so node ``i`` is in the source set exactly for grid
    positions ``k > q_index[i]``. ``q_index[i] == 0`` means the node is
    in the source set from the first grid point on; ``q_index[i] ==
    len(lambdas)`` means it never enters. ``set_sizes[k-1]`` is the
    source-set size at ``lam_k``.
    """

    lambdas: np.ndarray
    q_index: np.ndarray
    set_sizes: np.ndarray

    def __post_init__(self):
        q = len(self.lambdas)
        if self.q_index.min(initial=0) < 0 or self.q_index.max(initial=0) > q:
            raise ConfigError("crossing index out of range")
        if np.any(np.diff(self.set_sizes) < 0):
            raise ConfigError("source-set sizes must be nondecreasing")
        for name in ("lambdas", "q_index", "set_sizes"):
            getattr(self, name).setflags(write=False)

    @property
    def num_grid_points(self) -> int:
        return len(self.lambdas)

    def source_mask(self, k: int) -> np.ndarray:
        """Membership mask of the source set at 1-based grid position k."""
        if not 1 <= k <= len(self.lambdas):
            raise ConfigError(f"grid position {k} out of range")
        return self.q_index < k


def _solve_reduced(
    g: ParametricSTGraph,
    caps_s: np.ndarray,
    caps_t: np.ndarray,
    forced_s: np.ndarray,
    forced_t: np.ndarray,
) -> np.ndarray:
    """Minimal min-cut source mask with some nodes pre-merged into s or t.

    ``caps_s``/``caps_t`` are the finite source/sink capacities already
    evaluated at the current ``lam``. Nodes in ``forced_s`` are folded
    into the source (their outgoing fixed arcs become source arcs of the
    heads), nodes in ``forced_t`` into the sink. A node forced both ways
    counts as source-side; the caller detects the implied infinite cut
    via :func:`evaluate_cut_value`.
    """
    n = g.num_nodes
    forced_t = forced_t & ~forced_s
    active = ~(forced_s | forced_t)
    na = int(active.sum())
    result = forced_s.copy()
    if na == 0:
        return result

    eff_s = np.where(active, caps_s, 0.0)
    eff_t = np.where(active, caps_t, 0.0)
    tails, heads, caps = g.arc_tail, g.arc_head, g.arc_cap
    if len(tails):
        boundary_s = forced_s[tails] & active[heads]
        np.add.at(eff_s, heads[boundary_s], caps[boundary_s])
        boundary_t = active[tails] & forced_t[heads]
        np.add.at(eff_t, tails[boundary_t], caps[boundary_t])
        keep = active[tails] & active[heads]
        int_tails, int_heads, int_caps = tails[keep], heads[keep], caps[keep]
    else:
        int_tails = int_heads = np.empty(0, dtype=np.int64)
        int_caps = np.empty(0)

    idx = np.cumsum(active) - 1  # active-node renumbering
    src_nodes = np.flatnonzero(active & (eff_s > 0))
    snk_nodes = np.flatnonzero(active & (eff_t > 0))
    s_id, t_id = na, na + 1

    m = len(int_tails) + len(src_nodes) + len(snk_nodes)
    arc_to = np.empty(2 * m, dtype=np.int64)
    arc_res = np.zeros(2 * m)
    fwd_head = np.concatenate([
        idx[int_heads],
        idx[src_nodes],
        np.full(len(snk_nodes), t_id, dtype=np.int64),
    ])
    fwd_tail = np.concatenate([
        idx[int_tails],
        np.full(len(src_nodes), s_id, dtype=np.int64),
        idx[snk_nodes],
    ])
    arc_to[0::2] = fwd_head
    arc_to[1::2] = fwd_tail
    arc_res[0::2] = np.concatenate([int_caps, eff_s[src_nodes], eff_t[snk_nodes]])

    owner = np.empty(2 * m, dtype=np.int64)
    owner[0::2] = fwd_tail
    owner[1::2] = fwd_head
    adj_arc = np.argsort(owner, kind="stable")
    counts = np.bincount(owner, minlength=na + 2)
    adj_start = np.zeros(na + 3, dtype=np.int64)
    np.cumsum(counts, out=adj_start[1:])

    mask = dinic_min_source(na + 2, arc_to, arc_res, adj_start, adj_arc, s_id, t_id)
    result[np.flatnonzero(active)[mask[:na].astype(bool)]] = True
    return result


def evaluate_cut_value(g: ParametricSTGraph, lam: float, source_mask: np.ndarray) -> float:
    """Capacity of the cut whose source set is ``source_mask``, at ``lam``.

    Returns ``math.inf`` when an unsaturable arc crosses the cut.
    """
    caps_s, unsat_s = g.source_caps_at(lam)
    caps_t, unsat_t = g.sink_caps_at(lam)
    in_s = np.asarray(source_mask, dtype=bool)
    if np.any(unsat_s & ~in_s) or np.any(unsat_t & in_s):
        return math.inf
    value = float(caps_s[~in_s].sum() + caps_t[in_s].sum())
    if len(g.arc_tail):
        crossing = in_s[g.arc_tail] & ~in_s[g.arc_head]
        value += float(g.arc_cap[crossing].sum())
    return value


def _forced_masks(g: ParametricSTGraph) -> tuple[np.ndarray, np.ndarray]:
    return g.source_kind == CAP_UNSAT, g.sink_kind == CAP_UNSAT


def min_cut(g: ParametricSTGraph, lam: float) -> CutResult:
    """Minimum s-t cut at ``lam``; the minimal source set is returned.

    Unsaturable arcs never saturate: nodes holding one are folded into
    the corresponding terminal before the flow computation, so the
    remaining arithmetic involves finite capacities only. The empty and
    the full source set are valid outcomes.
    """
    caps_s, unsat_s = g.source_caps_at(lam)
    caps_t, unsat_t = g.sink_caps_at(lam)
    mask = _solve_reduced(g, caps_s, caps_t, unsat_s, unsat_t)
    return CutResult(float(lam), mask, evaluate_cut_value(g, lam, mask))


def _ascending(lambdas: Sequence[float]) -> np.ndarray:
    lams = np.asarray(lambdas, dtype=np.float64)
    if lams.ndim != 1 or len(lams) == 0:
        raise ConfigError("lambda list must be a nonempty 1-d sequence")
    if np.any(np.diff(lams) <= 0):
        raise ConfigError("lambda list must be strictly ascending")
    return lams


def parametric_min_cut(
    g: ParametricSTGraph,
    lambdas: Sequence[float],
    naive: bool = False,
) -> NestedCuts:
    """Solve the simple parametric minimum-cut problem on a ``lam`` list.

    For every grid value the implied source set equals the minimal
    source set of an independent :func:`min_cut` solve. The default
    strategy recurses on the grid: the cuts at the interval endpoints
    are solved first and, when they differ, the midpoint is solved on a
    graph with the lower source set contracted into the source and the
    complement of the upper set contracted into the sink. ``naive=True``
    forces one independent solve per grid value instead (same results,
    used as an oracle in tests).
    """
    lams = _ascending(lambdas)
    unsat_s, unsat_t = _forced_masks(g)
    if np.any(unsat_s & unsat_t):
        raise ConfigError("a node has unsaturable arcs to both terminals; "
                          "every cut is infinite")
    q = len(lams)
    n = g.num_nodes
    entry = np.full(n, q + 1, dtype=np.int64)  # first grid position inside S

    def solve_at(k: int, forced_s: np.ndarray, forced_t: np.ndarray) -> np.ndarray:
        caps_s, _ = g.source_caps_at(lams[k - 1])
        caps_t, _ = g.sink_caps_at(lams[k - 1])
        return _solve_reduced(g, caps_s, caps_t, forced_s, forced_t)

    if naive:
        prev = None
        for k in range(1, q + 1):
            mask = solve_at(k, unsat_s, unsat_t)
            if prev is not None and np.any(prev & ~mask):
                raise RuntimeError("nested-cut property violated; "
                                   "capacity spec is not parametric")
            entry[mask & (entry > k)] = k
            prev = mask
    else:
        mask_lo = solve_at(1, unsat_s, unsat_t)
        entry[mask_lo] = 1
        if q > 1:
            mask_hi = solve_at(q, mask_lo | unsat_s, unsat_t)
            entry[mask_hi & ~mask_lo] = q
            stack = [(1, q, mask_lo, mask_hi)]
            while stack:
                lo, hi, m_lo, m_hi = stack.pop()
                if hi - lo <= 1 or int(m_lo.sum()) == int(m_hi.sum()):
                    continue
                mid = (lo + hi) // 2
                m_mid = solve_at(mid, m_lo, ~m_hi)
                entry[m_mid & (entry > mid)] = mid
                stack.append((lo, mid, m_lo, m_mid))
                stack.append((mid, hi, m_mid, m_hi))

    sizes = np.cumsum(np.bincount(entry, minlength=q + 2))[1:q + 1]
    return NestedCuts(lams.copy(), entry - 1, sizes)


def brute_force_min_cut(g: ParametricSTGraph, lam: float) -> CutResult:
    """Exhaustive minimum cut over all 2^n source sets (test oracle).

    Ties on the exact minimum value are resolved to the intersection of
    all minimizing source sets, which by the minimum-cut lattice
    property is itself a minimum cut: the unique minimal source set.
    """
    n = g.num_nodes
    if n > 20:
        raise ConfigError("brute force refused for more than 20 internal nodes")
    caps_s, unsat_s = g.source_caps_at(lam)
    caps_t, unsat_t = g.sink_caps_at(lam)

    count = 1 << n
    codes = np.arange(count, dtype=np.uint64)
    in_s = (codes[:, None] >> np.arange(n, dtype=np.uint64)) & 1
    in_s = in_s.astype(bool)

    values = (~in_s) @ caps_s + in_s @ caps_t
    for u, v, c in zip(g.arc_tail, g.arc_head, g.arc_cap):
        values += np.where(in_s[:, u] & ~in_s[:, v], c, 0.0)
    infinite = ((~in_s) & unsat_s).any(axis=1) | (in_s & unsat_t).any(axis=1)
    values[infinite] = np.inf
    best = values.min()
    minimal = in_s[values == best].all(axis=0)
    return CutResult(float(lam), minimal, float(best))


def write_dimacs(g: ParametricSTGraph, lam: float) -> str:
    """Serialize the graph at ``lam`` in a DIMACS-like max-flow format.

    Internal nodes are 1-based; the source is node ``n+1`` and the sink
    ``n+2``. Unsaturable capacities are written as ``inf``.
    """
    n = g.num_nodes
    caps_s, unsat_s = g.source_caps_at(lam)
    caps_t, unsat_t = g.sink_caps_at(lam)
    lines = []
    arcs = []
    for u, v, c in zip(g.arc_tail, g.arc_head, g.arc_cap):
        arcs.append(f"a {u + 1} {v + 1} {c:.17g}")
    for i in range(n):
        if unsat_s[i]:
            arcs.append(f"a {n + 1} {i + 1} inf")
        elif caps_s[i] > 0 or g.source_kind[i] != CAP_ABSENT:
            arcs.append(f"a {n + 1} {i + 1} {caps_s[i]:.17g}")
        if unsat_t[i]:
            arcs.append(f"a {i + 1} {n + 2} inf")
        elif caps_t[i] > 0 or g.sink_kind[i] != CAP_ABSENT:
            arcs.append(f"a {i + 1} {n + 2} {caps_t[i]:.17g}")
    lines.append(f"p max {n + 2} {len(arcs)}")
    lines.append(f"n {n + 1} s")
    lines.append(f"n {n + 2} t")
    lines.extend(arcs)
    return "\n".join(lines) + "\n"


def parse_dimacs(text: str) -> ParametricSTGraph:
    """Parse :func:`write_dimacs` output into a constant-capacity graph."""
    num_total = None
    s_id = t_id = None
    raw_arcs = []
    for ln, line in enumerate(text.splitlines(), start=1):
        parts = line.split()
        if not parts or parts[0] == "c":
            continue
        if parts[0] == "p":
            if len(parts) != 4 or parts[1] != "max":
                raise ConfigError(f"line {ln}: malformed problem line")
            num_total = int(parts[2])
        elif parts[0] == "n":
            if parts[2] == "s":
                s_id = int(parts[1])
            elif parts[2] == "t":
                t_id = int(parts[1])
        elif parts[0] == "a":
            cap = math.inf if parts[3] == "inf" else float(parts[3])
            raw_arcs.append((int(parts[1]), int(parts[2]), cap))
        else:
            raise ConfigError(f"line {ln}: unknown designator {parts[0]!r}")
    if num_total is None or s_id is None or t_id is None:
        raise ConfigError("missing problem or node-designator lines")
    n = num_total - 2
    source: dict[int, CapSpec] = {}
    sink: dict[int, CapSpec] = {}
    fixed = []
    for u, v, cap in raw_arcs:
        if u == s_id:
            source[v - 1] = UNSATURABLE if math.isinf(cap) else CapSpec.const(cap)
        elif v == t_id:
            sink[u - 1] = UNSATURABLE if math.isinf(cap) else CapSpec.const(cap)
        else:
            if math.isinf(cap):
                raise ConfigError("unsaturable capacity on a fixed arc")
            fixed.append((u - 1, v - 1, cap))
    return build_st_graph(n, fixed, source, sink)
