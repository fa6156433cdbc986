"""Construction of the four s-t graphs behind the classifier.

All four builders share the same skeleton: every undirected similarity
edge ``[i, j]`` becomes the two directed arcs ``(i, j)`` and ``(j, i)``,
both with capacity ``w_ij``; unlabeled-style nodes get the parametric
terminal arcs ``max(lam * d_i, 0)`` to the source and ``max(-lam * d_i,
0)`` to the sink. They differ in how seed nodes attach to the
terminals:

* hard-seeded graph: positive seeds get an unsaturable source arc,
  negative seeds an unsaturable sink arc, so any finite cut keeps them
  on their labeled side;
* confidence-weighted graph: the unsaturable arcs are replaced by
  constant capacities ``gamma_i`` (the confidence weights), so a seed
  may land on the wrong side at cost ``gamma_i`` -- with every weight
  unsaturable this degenerates to the hard-seeded graph;
* the two one-sided graphs used for confidence computation: one class
  keeps its unsaturable seed arcs while the opposite class is treated
  as unlabeled.

The minimal min-cut source set of the confidence-weighted graph
minimizes :func:`evaluate_chnc_objective`; the two differ by a
partition-independent constant per (graph, lam).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .paramcut import (
    CAP_CONST,
    CAP_NEG_PART,
    CAP_POS_PART,
    CAP_UNSAT,
    ParametricSTGraph,
)
from .simgraph import SimilarityGraph


@dataclass(frozen=True, eq=False)
class SeedSpec:
    """Positive and negative seed node sets; the remainder is unlabeled."""

    pos_seeds: np.ndarray
    neg_seeds: np.ndarray

    def __post_init__(self):
        pos = np.unique(np.asarray(self.pos_seeds, dtype=np.int64))
        neg = np.unique(np.asarray(self.neg_seeds, dtype=np.int64))
        if np.intersect1d(pos, neg).size:
            raise ConfigError("a node cannot be seeded on both sides")
        pos.setflags(write=False)
        neg.setflags(write=False)
        object.__setattr__(self, "pos_seeds", pos)
        object.__setattr__(self, "neg_seeds", neg)

    def unlabeled(self, n: int) -> np.ndarray:
        mask = np.ones(n, dtype=bool)
        mask[self.pos_seeds] = False
        mask[self.neg_seeds] = False
        return np.flatnonzero(mask)


@dataclass(frozen=True, eq=False)
class ConfidenceVector:
    """Per-labeled-node penalty weights; ``inf`` means unsaturable."""

    node_ids: np.ndarray
    gamma: np.ndarray

    def __post_init__(self):
        ids = np.asarray(self.node_ids, dtype=np.int64)
        gam = np.asarray(self.gamma, dtype=np.float64)
        if ids.shape != gam.shape or ids.ndim != 1:
            raise ConfigError("node_ids and gamma must be aligned 1-d arrays")
        if len(np.unique(ids)) != len(ids):
            raise ConfigError("duplicate node id in confidence vector")
        if np.any(np.isnan(gam)) or np.any(gam < 0):
            raise ConfigError("confidence weights must be >= 0")
        order = np.argsort(ids)
        ids, gam = ids[order], gam[order]
        ids.setflags(write=False)
        gam.setflags(write=False)
        object.__setattr__(self, "node_ids", ids)
        object.__setattr__(self, "gamma", gam)

    @classmethod
    def unsaturable(cls, node_ids) -> "ConfidenceVector":
        ids = np.asarray(node_ids, dtype=np.int64)
        return cls(ids, np.full(len(ids), math.inf))

    def lookup(self, ids) -> np.ndarray:
        ids = np.asarray(ids, dtype=np.int64)
        pos = np.searchsorted(self.node_ids, ids)
        found = pos < len(self.node_ids)
        found[found] = self.node_ids[pos[found]] == ids[found]
        if not found.all():
            raise ConfigError(
                f"no confidence weight for node(s) {ids[~found].tolist()}")
        return self.gamma[pos]


def lambda_from_alpha_beta(alpha: float, beta: float) -> float:
    """Tradeoff parameter implied by separate homogeneity weights.

    ``alpha`` weighs the homogeneity of the source set, ``beta`` that of
    the sink set; the result lies in (-1, 1) and is negative when the
    sink side is emphasized.
    """
    if alpha < 0 or beta < 0:
        raise ConfigError("alpha and beta must be nonnegative")
    return (alpha - beta) / (1.0 + alpha + beta)


def _fixed_arcs(graph: SimilarityGraph):
    tail = np.concatenate([graph.edge_i, graph.edge_j])
    head = np.concatenate([graph.edge_j, graph.edge_i])
    cap = np.concatenate([graph.edge_w, graph.edge_w])
    return tail, head, cap


def _lambda_arc_nodes(n, source_kind, source_val, sink_kind, sink_val,
                      nodes, degrees) -> None:
    source_kind[nodes] = CAP_POS_PART
    source_val[nodes] = degrees[nodes]
    sink_kind[nodes] = CAP_NEG_PART
    sink_val[nodes] = degrees[nodes]


def _empty_specs(n):
    return (np.zeros(n, dtype=np.int8), np.zeros(n),
            np.zeros(n, dtype=np.int8), np.zeros(n))


def build_hnc_graph(graph: SimilarityGraph, seeds: SeedSpec) -> ParametricSTGraph:
    """Hard-seeded parametric graph: seeds are unsaturably tied to their
    terminal, unlabeled nodes get the lam-dependent arcs."""
    if len(seeds.pos_seeds) == 0 or len(seeds.neg_seeds) == 0:
        raise ConfigError("both seed sets must be nonempty")
    n = graph.num_nodes
    skind, sval, tkind, tval = _empty_specs(n)
    _lambda_arc_nodes(n, skind, sval, tkind, tval, seeds.unlabeled(n),
                      graph.degrees)
    skind[seeds.pos_seeds] = CAP_UNSAT
    tkind[seeds.neg_seeds] = CAP_UNSAT
    tail, head, cap = _fixed_arcs(graph)
    return ParametricSTGraph(n, tail, head, cap, skind, sval, tkind, tval)


def build_chnc_graph(graph: SimilarityGraph, seeds: SeedSpec,
                     gamma: ConfidenceVector) -> ParametricSTGraph:
    """Confidence-weighted variant: seed arcs carry finite penalties.

    A weight of ``inf`` reproduces the hard-seeded arc for that node, so
    an all-``inf`` vector builds exactly :func:`build_hnc_graph`'s
    output.
    """
    if len(seeds.pos_seeds) == 0 or len(seeds.neg_seeds) == 0:
        raise ConfigError("both seed sets must be nonempty")
    n = graph.num_nodes
    skind, sval, tkind, tval = _empty_specs(n)
    _lambda_arc_nodes(n, skind, sval, tkind, tval, seeds.unlabeled(n),
                      graph.degrees)
    for ids, kinds, vals in ((seeds.pos_seeds, skind, sval),
                             (seeds.neg_seeds, tkind, tval)):
        g = gamma.lookup(ids)
        finite = np.isfinite(g)
        kinds[ids] = np.where(finite, CAP_CONST, CAP_UNSAT).astype(np.int8)
        vals[ids] = np.where(finite, g, 0.0)
    tail, head, cap = _fixed_arcs(graph)
    return ParametricSTGraph(n, tail, head, cap, skind, sval, tkind, tval)


def build_pos_conf_graph(graph: SimilarityGraph, neg_seeds) -> ParametricSTGraph:
    """One-sided graph scoring positive seeds: only the negative seeds
    stay pinned to the sink; everything else gets lam arcs."""
    neg = np.unique(np.asarray(neg_seeds, dtype=np.int64))
    if len(neg) == 0:
        raise ConfigError("negative seed set must be nonempty")
    n = graph.num_nodes
    skind, sval, tkind, tval = _empty_specs(n)
    free = np.ones(n, dtype=bool)
    free[neg] = False
    _lambda_arc_nodes(n, skind, sval, tkind, tval, np.flatnonzero(free),
                      graph.degrees)
    tkind[neg] = CAP_UNSAT
    tail, head, cap = _fixed_arcs(graph)
    return ParametricSTGraph(n, tail, head, cap, skind, sval, tkind, tval)


def build_neg_conf_graph(graph: SimilarityGraph, pos_seeds) -> ParametricSTGraph:
    """Mirror image of :func:`build_pos_conf_graph` for negative seeds."""
    pos = np.unique(np.asarray(pos_seeds, dtype=np.int64))
    if len(pos) == 0:
        raise ConfigError("positive seed set must be nonempty")
    n = graph.num_nodes
    skind, sval, tkind, tval = _empty_specs(n)
    free = np.ones(n, dtype=bool)
    free[pos] = False
    _lambda_arc_nodes(n, skind, sval, tkind, tval, np.flatnonzero(free),
                      graph.degrees)
    skind[pos] = CAP_UNSAT
    tail, head, cap = _fixed_arcs(graph)
    return ParametricSTGraph(n, tail, head, cap, skind, sval, tkind, tval)


def _source_mask(n, source_set) -> np.ndarray:
    mask = np.zeros(n, dtype=bool)
    ids = np.asarray(list(source_set) if isinstance(source_set, (set, frozenset))
                     else source_set)
    if ids.dtype == bool:
        return ids.copy()
    if len(ids):
        mask[ids.astype(np.int64)] = True
    return mask


def cut_between(graph: SimilarityGraph, source_mask: np.ndarray) -> float:
    """Total similarity weight crossing a partition."""
    crossing = source_mask[graph.edge_i] != source_mask[graph.edge_j]
    return float(graph.edge_w[crossing].sum())


def evaluate_chnc_objective(graph: SimilarityGraph, seeds: SeedSpec,
                            gamma: ConfidenceVector, lam: float,
                            source_set) -> float:
    """Penalized homogeneity objective for an arbitrary partition.

    Value: cut weight, minus ``lam`` times the volume of unlabeled nodes
    on the source side, plus the confidence penalties of seeds placed
    on their wrong side. The min-cut partition of
    :func:`build_chnc_graph` minimizes this over all node subsets.
    """
    n = graph.num_nodes
    in_s = _source_mask(n, source_set)
    value = cut_between(graph, in_s)
    unlabeled = seeds.unlabeled(n)
    value -= lam * float(graph.degrees[unlabeled][in_s[unlabeled]].sum())
    for ids, wrong_side in ((seeds.pos_seeds, ~in_s), (seeds.neg_seeds, in_s)):
        if len(ids):
            g = gamma.lookup(ids)
            violated = wrong_side[ids]
            if np.any(violated & np.isinf(g)):
                return math.inf
            value += float(g[violated & np.isfinite(g)].sum())
    return value


def evaluate_hnc_objective(graph: SimilarityGraph, lam: float, source_set) -> float:
    """Unpenalized objective: cut weight minus lam times the source-set
    volume (all nodes counted)."""
    in_s = _source_mask(graph.num_nodes, source_set)
    return cut_between(graph, in_s) - lam * float(graph.degrees[in_s].sum())
