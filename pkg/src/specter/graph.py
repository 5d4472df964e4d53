"""Weighted-digraph view of an environment automaton.

Node order is the sorted state list, so identical models index identically
across runs and processes. Edges live in CSR arrays (the kernels' native
layout); a dense matrix is available for small graphs. Parallel events
between one ordered state pair collapse to the cheapest event, ties broken by
event id.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .automata import Epsilon0Nfa, EventId, State


@dataclass(frozen=True)
class WeightedGraph:
    states: tuple  # node i is states[i]
    node_index: Mapping  # {State: int}
    indptr: np.ndarray  # int64, n_nodes + 1
    indices: np.ndarray  # int64, n_edges
    weights: np.ndarray  # float64, n_edges
    chosen_event: Mapping  # {(int, int): EventId}

    @property
    def n_nodes(self) -> int:
        return len(self.states)

    @property
    def n_edges(self) -> int:
        return int(self.indices.shape[0])

    def weight(self, i: int, j: int) -> float:
        """Edge weight, 0.0 when no edge exists."""
        lo, hi = self.indptr[i], self.indptr[i + 1]
        k = np.searchsorted(self.indices[lo:hi], j)
        if k < hi - lo and self.indices[lo + k] == j:
            return float(self.weights[lo + k])
        return 0.0

    def event(self, i: int, j: int) -> EventId:
        return self.chosen_event.get((i, j))

    def to_dense(self, max_nodes: int = 2048) -> np.ndarray:
        """Dense adjacency matrix with 0 meaning no edge; small graphs only."""
        n = self.n_nodes
        if n > max_nodes:
            raise ValueError(f"{n} nodes is too large for a dense matrix (cap {max_nodes})")
        dense = np.zeros((n, n))
        for i in range(n):
            for k in range(self.indptr[i], self.indptr[i + 1]):
                dense[i, self.indices[k]] = self.weights[k]
        return dense


def to_graph(source) -> WeightedGraph:
    """Build the weighted digraph of an environment model or bare automaton."""
    a: Epsilon0Nfa = getattr(source, "automaton", source)
    states = tuple(sorted(a.states))
    index = {s: i for i, s in enumerate(states)}

    best: dict = {}
    for (x, e), y in a.transitions.items():
        key = (index[x], index[y])
        candidate = (a.costs[e], e)
        old = best.get(key)
        if old is None or candidate < old:
            best[key] = candidate

    n = len(states)
    m = len(best)
    indptr = np.zeros(n + 1, dtype=np.int64)
    indices = np.empty(m, dtype=np.int64)
    weights = np.empty(m, dtype=np.float64)
    chosen = {}
    for k, (i, j) in enumerate(sorted(best)):
        cost, e = best[(i, j)]
        indptr[i + 1] += 1
        indices[k] = j
        weights[k] = cost
        chosen[(i, j)] = e
    np.cumsum(indptr, out=indptr)
    return WeightedGraph(states, index, indptr, indices, weights, chosen)
