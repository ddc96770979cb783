"""Deterministic construction of one balanced realization of a graphical JDM.

Every vertex of class ``i`` is told in advance how many neighbours it gets in
each class ``j`` (the floor of the class average, plus one for the vertices
that carry a ceiling token).  The per-block prescriptions are near-regular,
so each block is realized greedily and the blocks are glued together.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import Infeasible, NotGraphical
from .jdm_core import (
    JointDegreeMatrix,
    Realization,
    class_ranges,
    class_sizes,
    is_graphical,
    vertex_partition,
)


@dataclass(frozen=True)
class CeilingAssignment:
    """``ceil[i][r][j]`` is True when vertex ``r`` of class ``i`` takes the ceiling towards ``j``."""

    floors: tuple[tuple[int, ...], ...]
    ceil: tuple[tuple[tuple[bool, ...], ...], ...]

    def prescribed(self, i: int, r: int, j: int) -> int:
        return self.floors[i][j] + int(self.ceil[i][r][j])


@dataclass(frozen=True)
class FactorGraph:
    """Edges of one block of the labelled union.

    ``kind`` is ``"internal"`` (``classes == (i, i)``) or ``"bipartite"``.
    Edge endpoints are local indices: for internal factors both index ``V_i``;
    for bipartite factors ``(r, c)`` has ``r`` in the row class and ``c`` in
    the column class.
    """

    kind: str
    classes: tuple[int, int]
    edges: tuple[tuple[int, int], ...]

    def degrees(self, n_rows: int, n_cols: int | None = None) -> tuple[list[int], list[int]]:
        rows = [0] * n_rows
        cols = [0] * (n_rows if n_cols is None else n_cols)
        for a, b in self.edges:
            if self.kind == "internal":
                rows[a] += 1
                rows[b] += 1
            else:
                rows[a] += 1
                cols[b] += 1
        return rows, cols


def ceiling_assignment(J: JointDegreeMatrix) -> CeilingAssignment:
    """Distribute ceiling tokens round-robin over each class.

    Tokens for class ``i`` are dealt to its vertices cyclically, visiting the
    target classes ``j`` in ascending order and keeping the vertex cursor
    running across ``j``.  Each vertex then ends up with the same number of
    ceilings, which is what makes its total degree come out right.
    """
    sizes = class_sizes(J).sizes
    floors, ceils = [], []
    for i, n_i in enumerate(sizes):
        if n_i == 0:
            floors.append(tuple(0 for _ in range(J.k)))
            ceils.append(())
            continue
        row_floor = []
        marks = [[False] * J.k for _ in range(n_i)]
        cursor = 0
        excess_total = 0
        for j in range(J.k):
            f, e = divmod(J.endpoint_total(i, j), n_i)
            row_floor.append(f)
            excess_total += e
            for _ in range(e):
                marks[cursor % n_i][j] = True
                cursor += 1
        if excess_total % n_i:
            raise NotGraphical([f"class {i}: ceiling excess {excess_total} not divisible by {n_i}"])
        floors.append(tuple(row_floor))
        ceils.append(tuple(tuple(m) for m in marks))
    return CeilingAssignment(tuple(floors), tuple(ceils))


def build_bipartite_factor(row_degrees: Sequence[int], col_degrees: Sequence[int]) -> FactorGraph:
    """Greedy bipartite realization with prescribed degrees on both sides.

    Rows are processed by descending degree (ties: lower index first); each
    row is joined to the columns with the most residual capacity, ties broken
    by ascending column index.
    """
    if sum(row_degrees) != sum(col_degrees):
        raise Infeasible(f"degree sums differ: {sum(row_degrees)} vs {sum(col_degrees)}")
    residual = list(col_degrees)
    edges = []
    for r in sorted(range(len(row_degrees)), key=lambda r: (-row_degrees[r], r)):
        want = row_degrees[r]
        if want == 0:
            continue
        targets = sorted(range(len(residual)), key=lambda c: (-residual[c], c))[:want]
        if len(targets) < want or residual[targets[-1]] <= 0:
            raise Infeasible(f"row {r} cannot place {want} edges; residual columns {residual}")
        for c in targets:
            residual[c] -= 1
            edges.append((r, c))
    return FactorGraph("bipartite", (0, 1), tuple(sorted(edges)))


def build_internal_factor(degree_seq: Sequence[int]) -> FactorGraph:
    """Havel-Hakimi: repeatedly saturate the vertex of largest residual degree.

    The chosen vertex connects to the vertices with the next-largest residual
    degrees.  All ties go to the lower vertex index.
    """
    n = len(degree_seq)
    if sum(degree_seq) % 2:
        raise Infeasible(f"odd degree sum {sum(degree_seq)}")
    residual = list(degree_seq)
    edges = []
    while True:
        order = sorted(range(n), key=lambda v: (-residual[v], v))
        v = order[0]
        want = residual[v]
        if want == 0:
            break
        targets = order[1 : 1 + want]
        if len(targets) < want or residual[targets[-1]] <= 0:
            raise Infeasible(f"vertex {v} cannot place {want} edges; residuals {residual}")
        residual[v] = 0
        for u in targets:
            residual[u] -= 1
            edges.append((min(u, v), max(u, v)))
    return FactorGraph("internal", (0, 0), tuple(sorted(edges)))


def _check_spread(values: Sequence[int], what: str) -> None:
    if values and max(values) - min(values) > 1:
        raise Infeasible(f"{what} degree spread exceeds 1: {list(values)}")


def build_factors(J: JointDegreeMatrix, assignment: CeilingAssignment | None = None) -> dict[tuple[int, int], FactorGraph]:
    """All ``k(k+1)/2`` factors, keyed by ``(i, j)`` with ``i <= j``."""
    sizes = class_sizes(J).sizes
    if assignment is None:
        assignment = ceiling_assignment(J)
    factors = {}
    for i in range(J.k):
        seq = [assignment.prescribed(i, r, i) for r in range(sizes[i])]
        _check_spread(seq, f"internal factor {i}")
        try:
            f = build_internal_factor(seq)
        except Infeasible as exc:
            raise Infeasible(f"internal factor ({i},{i}): {exc}") from None
        factors[(i, i)] = FactorGraph("internal", (i, i), f.edges)
        for j in range(i + 1, J.k):
            rows = [assignment.prescribed(i, r, j) for r in range(sizes[i])]
            cols = [assignment.prescribed(j, c, i) for c in range(sizes[j])]
            _check_spread(rows, f"bipartite factor ({i},{j}) rows")
            _check_spread(cols, f"bipartite factor ({i},{j}) cols")
            try:
                f = build_bipartite_factor(rows, cols)
            except Infeasible as exc:
                raise Infeasible(f"bipartite factor ({i},{j}): {exc}") from None
            factors[(i, j)] = FactorGraph("bipartite", (i, j), f.edges)
    return factors


def labeled_union(J: JointDegreeMatrix, factors: dict[tuple[int, int], FactorGraph]) -> Realization:
    sizes = class_sizes(J).sizes
    ranges = class_ranges(sizes)
    edges = set()
    for (i, j), f in factors.items():
        for a, b in f.edges:
            u, v = ranges[i][a], ranges[j][b]
            edges.add((min(u, v), max(u, v)))
    return Realization(J.degrees, vertex_partition(J), frozenset(edges))


def split_factors(G: Realization) -> dict[tuple[int, int], FactorGraph]:
    """Inverse of :func:`labeled_union`: cut a realization into its blocks."""
    k = len(G.degrees)
    sizes = [0] * k
    for c in G.class_of:
        sizes[c] += 1
    offset = [r.start for r in class_ranges(sizes)]
    buckets: dict[tuple[int, int], list] = {(i, j): [] for i in range(k) for j in range(i, k)}
    for u, v in G.edges:
        cu, cv = G.class_of[u], G.class_of[v]
        if cu > cv:
            u, v, cu, cv = v, u, cv, cu
        a, b = u - offset[cu], v - offset[cv]
        if cu == cv:
            a, b = min(a, b), max(a, b)
        buckets[(cu, cv)].append((a, b))
    return {
        key: FactorGraph("internal" if key[0] == key[1] else "bipartite", key, tuple(sorted(e)))
        for key, e in buckets.items()
    }


def construct_balanced(J: JointDegreeMatrix) -> Realization:
    """A balanced realization of ``J``; a pure function of ``J``."""
    report = is_graphical(J)
    if not report:
        raise NotGraphical(report.violations)
    return labeled_union(J, build_factors(J))
