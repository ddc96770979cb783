"""Partition of the balanced state space by auxiliary ceiling graphs.

For a balanced realization every vertex ``v`` of class ``i`` has, towards each
class ``j``, either the floor or the ceiling of the class average.  Recording
which classes ``v`` takes the ceiling towards gives one bipartite graph per
class (vertices of the class versus one super-node per degree value).  The
tuple of those graphs is the auxiliary vector; states sharing it form a cell.

Coordinates and super-nodes run over every degree value ``1..max_degree``,
including values with no vertices: such coordinates are empty graphs, and a
super-node of an empty class is joined to everything (the average there is 0).
"""

from __future__ import annotations

import hashlib
import math
from collections import Counter
from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

from .chain import ChainState, num_ordered_tuples
from .errors import DimensionOverflow, HalfRegularityViolation
from .jdm_core import Realization, degree_spectrum, jdm_of, theta_table
from .spectra import RationalMatrix, relaxation_time, second_eigenvalue, symmetric_eigenvalues

PRODUCT_CAP = 4096


@dataclass(frozen=True)
class AuxiliaryVector:
    """``graphs[d-1][r]`` is a bitmask over super-nodes for vertex ``r`` of degree ``d``.

    Bit ``j-1`` is set iff the vertex carries the ceiling towards degree ``j``.
    """

    max_degree: int
    graphs: tuple[tuple[int, ...], ...]

    @property
    def key(self):
        return self.graphs

    def digest(self) -> str:
        return hashlib.sha256(repr(self.graphs).encode()).hexdigest()[:16]

    def matrix(self, degree: int) -> np.ndarray:
        rows = self.graphs[degree - 1]
        return np.array([[(m >> j) & 1 for j in range(self.max_degree)] for m in rows], dtype=np.int8).reshape(
            len(rows), self.max_degree
        )


def auxiliary_vector(state: ChainState | Realization) -> AuxiliaryVector:
    G = state.realization if isinstance(state, ChainState) else state
    J = jdm_of(G)
    theta = theta_table(J)
    spectrum = state.spectrum if isinstance(state, ChainState) else degree_spectrum(G).counts
    delta = J.max_degree
    cls_of_degree = {d: i for i, d in enumerate(J.degrees)}
    ceil = [[-(-t.numerator // t.denominator) for t in row] for row in theta]
    members: dict[int, list[int]] = {}
    for v, c in enumerate(G.class_of):
        members.setdefault(c, []).append(v)
    graphs = []
    for d in range(1, delta + 1):
        i = cls_of_degree.get(d)
        if i is None:
            graphs.append(())
            continue
        rows = []
        for v in members.get(i, []):
            mask = 0
            for dj in range(1, delta + 1):
                j = cls_of_degree.get(dj)
                if j is None or spectrum[v][j] == ceil[i][j]:
                    mask |= 1 << (dj - 1)
            rows.append(mask)
        if len({m.bit_count() for m in rows}) > 1:
            raise HalfRegularityViolation(f"auxiliary graph of degree {d} is not half-regular: {rows}")
        graphs.append(tuple(rows))
    return AuxiliaryVector(delta, tuple(graphs))


def is_one_swap(x1: AuxiliaryVector, x2: AuxiliaryVector) -> bool:
    """True iff ``x2`` arises from ``x1`` by one swap inside one coordinate."""
    diff = [d for d, (a, b) in enumerate(zip(x1.graphs, x2.graphs)) if a != b]
    if len(diff) != 1:
        return False
    a, b = x1.graphs[diff[0]], x2.graphs[diff[0]]
    rows = [r for r in range(len(a)) if a[r] != b[r]]
    if len(rows) != 2:
        return False
    r1, r2 = rows
    lost1, gained1 = a[r1] & ~b[r1], b[r1] & ~a[r1]
    lost2, gained2 = a[r2] & ~b[r2], b[r2] & ~a[r2]
    single = all(x.bit_count() == 1 for x in (lost1, gained1, lost2, gained2))
    return single and lost1 == gained2 and gained1 == lost2


def swap_neighbors(x: AuxiliaryVector) -> list[AuxiliaryVector]:
    """Every auxiliary vector one swap away from ``x``."""
    out = {}
    for d, rows in enumerate(x.graphs):
        for r1 in range(len(rows)):
            for r2 in range(r1 + 1, len(rows)):
                only1 = rows[r1] & ~rows[r2]
                only2 = rows[r2] & ~rows[r1]
                for j in range(x.max_degree):
                    if not only1 >> j & 1:
                        continue
                    for k in range(x.max_degree):
                        if not only2 >> k & 1:
                            continue
                        new = list(rows)
                        new[r1] = rows[r1] ^ (1 << j) ^ (1 << k)
                        new[r2] = rows[r2] ^ (1 << j) ^ (1 << k)
                        g = list(x.graphs)
                        g[d] = tuple(new)
                        y = AuxiliaryVector(x.max_degree, tuple(g))
                        out[y.key] = y
    return [out[k] for k in sorted(out)]


@dataclass(frozen=True)
class Partition:
    keys: tuple
    vectors: tuple[AuxiliaryVector, ...]
    cells: tuple[tuple[int, ...], ...]
    cell_of: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.cells)

    def index(self, key) -> int | None:
        try:
            return self.keys.index(key)
        except ValueError:
            return None


def partition_states(states: Sequence[ChainState]) -> Partition:
    """Group states by auxiliary vector; cells are ordered by key."""
    vecs = [auxiliary_vector(s) for s in states]
    groups: dict = {}
    for i, x in enumerate(vecs):
        groups.setdefault(x.key, (x, []))[1].append(i)
    keys = sorted(groups)
    cells = tuple(tuple(groups[k][1]) for k in keys)
    cell_of = [0] * len(states)
    for c, members in enumerate(cells):
        for i in members:
            cell_of[i] = c
    covered = sorted(i for c in cells for i in c)
    assert covered == list(range(len(states))), "cells must cover the state list disjointly"
    return Partition(tuple(keys), tuple(groups[k][0] for k in keys), cells, tuple(cell_of))


def restricted_chain(cell: Sequence[int], T: RationalMatrix) -> RationalMatrix:
    """Moves inside ``cell`` kept; everything else folded into the self-loops."""
    idx = np.asarray(cell, dtype=int)
    W = T.numer[np.ix_(idx, idx)].copy()
    np.fill_diagonal(W, 0)
    np.fill_diagonal(W, T.denom - W.sum(axis=1))
    return RationalMatrix(W, T.denom)


def projection_chain(partition: Partition, n: int) -> RationalMatrix:
    """Lower-bounding chain on cells: each one-swap neighbour gets ``1/(n(n-1)(n-2)(n-3))``."""
    X = partition.size
    N = num_ordered_tuples(n)
    if N == 0:
        return RationalMatrix(np.eye(X, dtype=np.int64), 1)
    W = np.zeros((X, X), dtype=np.int64)
    for a in range(X):
        for b in range(a + 1, X):
            if is_one_swap(partition.vectors[a], partition.vectors[b]):
                W[a, b] = W[b, a] = 1
    np.fill_diagonal(W, N - W.sum(axis=1))
    if (np.diag(W) < 0).any():
        raise ValueError("projection chain degree exceeds the per-swap budget")
    return RationalMatrix(W, N)


def average_flow_projection(partition: Partition, T: RationalMatrix) -> RationalMatrix:
    """Projection by average flow between cells (uniform stationary distribution).

    Entry ``(a, b)`` is ``(1/|Y_a|) * sum_{y in Y_a, y' in Y_b} T(y'|y)``.
    Reported for comparison only.
    """
    from fractions import Fraction

    X = partition.size
    rows = []
    for a in range(X):
        row = []
        for b in range(X):
            s = int(T.numer[np.ix_(partition.cells[a], partition.cells[b])].sum())
            row.append(Fraction(s, T.denom * len(partition.cells[a])))
        rows.append(row)
    return RationalMatrix.from_fractions(rows)


def chain_relaxation(M: RationalMatrix) -> float:
    return relaxation_time(second_eigenvalue(symmetric_eigenvalues(M.to_float())))


def max_cell_relaxation(partition: Partition, T: RationalMatrix) -> float:
    return max(chain_relaxation(restricted_chain(c, T)) for c in partition.cells)


@dataclass(frozen=True)
class SwapTheoremReport:
    holds: bool
    pairs_checked: int
    neighbor_checks: int
    part_i_counterexamples: tuple[tuple[int, int], ...]
    part_ii_counterexamples: tuple[tuple, ...]


def verify_swap_theorem(states: Sequence[ChainState], partition: Partition, T: RationalMatrix) -> SwapTheoremReport:
    """Exhaustive check of how single swaps interact with the partition.

    (i) a swap between two states keeps the auxiliary vector or changes it by
    one swap in one coordinate; (ii) for every cell ``x1``, every auxiliary
    vector ``x2`` one swap away is realized, and every state of ``x1`` has a
    single swap into ``x2``.
    """
    m = len(states)
    bad_i = []
    pairs = 0
    for a in range(m):
        for b in np.flatnonzero(T.numer[a]):
            b = int(b)
            if b == a:
                continue
            pairs += 1
            xa, xb = partition.cell_of[a], partition.cell_of[b]
            if xa != xb and not is_one_swap(partition.vectors[xa], partition.vectors[xb]):
                bad_i.append((a, b))
    bad_ii = []
    checks = 0
    for c1, x1 in enumerate(partition.vectors):
        for x2 in swap_neighbors(x1):
            c2 = partition.index(x2.key)
            if c2 is None:
                bad_ii.append(("unrealized", c1, x2.digest()))
                continue
            targets = set(partition.cells[c2])
            for y1 in partition.cells[c1]:
                checks += 1
                if not any(int(b) in targets for b in np.flatnonzero(T.numer[y1])):
                    bad_ii.append(("unreachable", c1, c2, y1))
    return SwapTheoremReport(not bad_i and not bad_ii, pairs, checks, tuple(bad_i), tuple(bad_ii))


def num_coordinates(k: int) -> int:
    """Internal plus bipartite blocks of a ``k``-class instance."""
    return k * (k + 1) // 2


def product_chain(components: Sequence, cap: int = PRODUCT_CAP) -> np.ndarray:
    """``(1/K) * sum_i I x ... x M_i x ... x I`` as a dense matrix."""
    mats = [c.to_float() if isinstance(c, RationalMatrix) else np.asarray(c, dtype=float) for c in components]
    K = len(mats)
    if K == 0:
        raise ValueError("at least one component is required")
    dims = [m.shape[0] for m in mats]
    total = math.prod(dims)
    if total > cap:
        raise DimensionOverflow(f"product space has {total} states, cap is {cap}")
    out = np.zeros((total, total))
    for i, M in enumerate(mats):
        term = reduce(np.kron, [M if j == i else np.eye(dims[j]) for j in range(K)])
        out += term
    return out / K


def product_second_eigenvalue(lambdas: Sequence[float], K: int | None = None) -> float:
    """Second eigenvalue of the product chain from the components' ones."""
    if K is None:
        K = len(lambdas)
    return (K - 1 + max(lambdas)) / K


def partition_summary(partition: Partition, T_proj: RationalMatrix) -> dict:
    degrees = Counter(int((T_proj.numer[a] > 0).sum()) - 1 for a in range(T_proj.size))
    return {
        "cells": partition.size,
        "cell_sizes": [len(c) for c in partition.cells],
        "projection_degree_histogram": {str(k): v for k, v in sorted(degrees.items())},
    }
