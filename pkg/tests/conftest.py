"""Shared random-instance builders for the test suite."""

import numpy as np
import pytest

from chnc.paramcut import (
    CapSpec,
    UNSATURABLE,
    build_st_graph,
)
from chnc.simgraph import SimilarityGraph


def random_const_graph(rng, n, max_cap=20, p_edge=0.4, integer=True):
    """Random s-t graph with constant (lam-independent) capacities."""
    arcs = []
    for i in range(n):
        for j in range(n):
            if i != j and rng.random() < p_edge:
                cap = int(rng.integers(0, max_cap + 1)) if integer else float(
                    rng.uniform(0, max_cap))
                arcs.append((i, j, cap))
    draw = (lambda: int(rng.integers(0, max_cap + 1))) if integer else (
        lambda: float(rng.uniform(0, max_cap)))
    source = {i: CapSpec.const(draw()) for i in range(n) if rng.random() < 0.7}
    sink = {i: CapSpec.const(draw()) for i in range(n) if rng.random() < 0.7}
    return build_st_graph(n, arcs, source, sink)


def random_parametric_graph(rng, n, p_edge=0.4, with_unsat=True):
    """Random parametric flow graph mixing all capacity kinds."""
    arcs = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p_edge:
                w = float(rng.uniform(0.05, 1.0))
                arcs.append((i, j, w))
                arcs.append((j, i, w))
    source, sink = {}, {}
    for i in range(n):
        r = rng.random()
        if with_unsat and r < 0.1:
            source[i] = UNSATURABLE
        elif r < 0.45:
            source[i] = CapSpec.const(float(rng.uniform(0, 1)))
        elif r < 0.85:
            source[i] = CapSpec.pos_part(float(rng.uniform(0, 2)))
        r = rng.random()
        if with_unsat and r < 0.1 and source.get(i) is not UNSATURABLE:
            sink[i] = UNSATURABLE
        elif r < 0.45:
            sink[i] = CapSpec.const(float(rng.uniform(0, 1)))
        elif r < 0.85:
            sink[i] = CapSpec.neg_part(float(rng.uniform(0, 2)))
    return build_st_graph(n, arcs, source, sink)


def random_similarity_graph(rng, n, p_edge=0.5):
    """Random connected-ish undirected similarity graph."""
    ei, ej, w = [], [], []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p_edge or j == i + 1:
                ei.append(i)
                ej.append(j)
                w.append(float(rng.uniform(0.05, 1.0)))
    return SimilarityGraph.from_edges(n, np.array(ei), np.array(ej), np.array(w))


def random_seed_split(rng, n, n_pos=None, n_neg=None):
    """Disjoint random seed sets (both nonempty) and the leftover ids."""
    ids = rng.permutation(n)
    n_pos = n_pos or int(rng.integers(1, max(2, n // 3)))
    n_neg = n_neg or int(rng.integers(1, max(2, n // 3)))
    pos = np.sort(ids[:n_pos])
    neg = np.sort(ids[n_pos:n_pos + n_neg])
    rest = np.sort(ids[n_pos + n_neg:])
    return pos, neg, rest


@pytest.fixture
def rng():
    return np.random.default_rng(20240901)
