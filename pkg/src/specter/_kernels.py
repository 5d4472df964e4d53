"""Shortest-dipath kernels over CSR arrays.

Two interchangeable implementations: a numba-compiled binary-heap Dijkstra
(the default) and a pure-numpy quadratic scan. Both settle nodes in
(distance, node index) order and only ever overwrite a predecessor on a
strict improvement, so they return bit-identical distance and predecessor
arrays. Select with the ``SPECTER_BACKEND`` environment variable:
``auto`` (default), ``numba`` or ``numpy``.
"""
from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba installed
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        if args and callable(args[0]) and not kwargs:
            return args[0]
        return wrap


BACKEND_ENV = "SPECTER_BACKEND"
_BACKENDS = ("auto", "numba", "numpy")


def resolve_backend(name: str = None) -> str:
    """Pick the kernel implementation: explicit arg beats the env flag."""
    choice = (name or os.environ.get(BACKEND_ENV, "auto")).lower()
    if choice not in _BACKENDS:
        raise ValueError(f"unknown backend {choice!r}, expected one of {_BACKENDS}")
    if choice == "auto":
        return "numba" if HAS_NUMBA else "numpy"
    if choice == "numba" and not HAS_NUMBA:
        raise RuntimeError("numba backend requested but numba is not importable")
    return choice


@njit(cache=True, nogil=True)
def _dijkstra_csr_numba(indptr, indices, weights, source, target):  # pragma: no cover
    n = indptr.shape[0] - 1
    dist = np.full(n, np.inf)
    pred = np.full(n, -1, dtype=np.int64)
    done = np.zeros(n, dtype=np.bool_)
    # Lazy-deletion binary heap on (distance, node), lexicographic.
    cap = indices.shape[0] + 2
    heap_d = np.empty(cap, dtype=np.float64)
    heap_v = np.empty(cap, dtype=np.int64)
    heap_d[0] = 0.0
    heap_v[0] = source
    size = 1
    dist[source] = 0.0
    while size > 0:
        d0 = heap_d[0]
        v0 = heap_v[0]
        size -= 1
        heap_d[0] = heap_d[size]
        heap_v[0] = heap_v[size]
        i = 0
        while True:
            left = 2 * i + 1
            right = left + 1
            smallest = i
            if left < size and (
                heap_d[left] < heap_d[smallest]
                or (heap_d[left] == heap_d[smallest] and heap_v[left] < heap_v[smallest])
            ):
                smallest = left
            if right < size and (
                heap_d[right] < heap_d[smallest]
                or (heap_d[right] == heap_d[smallest] and heap_v[right] < heap_v[smallest])
            ):
                smallest = right
            if smallest == i:
                break
            heap_d[i], heap_d[smallest] = heap_d[smallest], heap_d[i]
            heap_v[i], heap_v[smallest] = heap_v[smallest], heap_v[i]
            i = smallest
        if done[v0]:
            continue
        done[v0] = True
        if v0 == target:
            break
        for k in range(indptr[v0], indptr[v0 + 1]):
            w = indices[k]
            if done[w]:
                continue
            nd = d0 + weights[k]
            if nd < dist[w]:
                dist[w] = nd
                pred[w] = v0
                j = size
                heap_d[j] = nd
                heap_v[j] = w
                size += 1
                while j > 0:
                    parent = (j - 1) // 2
                    if heap_d[parent] > heap_d[j] or (
                        heap_d[parent] == heap_d[j] and heap_v[parent] > heap_v[j]
                    ):
                        heap_d[j], heap_d[parent] = heap_d[parent], heap_d[j]
                        heap_v[j], heap_v[parent] = heap_v[parent], heap_v[j]
                        j = parent
                    else:
                        break
    return dist, pred


def _dijkstra_csr_numpy(indptr, indices, weights, source, target):
    n = indptr.shape[0] - 1
    dist = np.full(n, np.inf)
    pred = np.full(n, -1, dtype=np.int64)
    unsettled = np.ones(n, dtype=bool)
    dist[source] = 0.0
    for _ in range(n):
        frontier = np.where(unsettled, dist, np.inf)
        u = int(np.argmin(frontier))  # first index wins ties: smallest node
        if not np.isfinite(frontier[u]):
            break
        unsettled[u] = False
        if u == target:
            break
        lo, hi = indptr[u], indptr[u + 1]
        vs = indices[lo:hi]
        nd = dist[u] + weights[lo:hi]
        better = nd < dist[vs]
        dist[vs[better]] = nd[better]
        pred[vs[better]] = u
    return dist, pred


def dijkstra_arrays(indptr, indices, weights, source: int, target: int, backend: str = None):
    """Run one single-source search, early-exiting once ``target`` settles.

    ``target`` may be -1 to settle the whole reachable component. Returns
    ``(dist, pred)`` arrays; unreachable nodes keep ``inf`` / -1.
    """
    if resolve_backend(backend) == "numba":
        return _dijkstra_csr_numba(indptr, indices, weights, source, target)
    return _dijkstra_csr_numpy(indptr, indices, weights, source, target)
