"""State-space enumeration: BFS over swaps, and a brute-force oracle."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import combinations

from .chain import ChainState, successors
from .errors import CapExceeded, NotGraphical, TooLarge
from .jdm_core import (
    JointDegreeMatrix,
    NonIntegralClassSize,
    Realization,
    class_sizes,
    is_balanced,
    is_graphical,
    vertex_partition,
)

DEFAULT_BFS_CAP = 200_000
BRUTE_FORCE_MAX_N = 10


def canonical_key(G: Realization) -> bytes:
    return ";".join(f"{u}-{v}" for u, v in G.key).encode()


def enumerate_balanced(J: JointDegreeMatrix, cap: int = DEFAULT_BFS_CAP) -> list[ChainState]:
    """All balanced realizations reachable by swaps from the constructed one.

    Returned in canonical (sorted edge list) order.
    """
    report = is_graphical(J)
    if not report:
        raise NotGraphical(report.violations)
    start = ChainState.initial(J)
    seen = {start.key: start}
    frontier = deque([start])
    while frontier:
        s = frontier.popleft()
        for k, (nxt, _) in successors(s).items():
            if k not in seen:
                seen[k] = nxt
                if len(seen) > cap:
                    raise CapExceeded(f"more than {cap} balanced states")
                frontier.append(nxt)
    return [seen[k] for k in sorted(seen)]


def brute_force_realizations(
    J: JointDegreeMatrix, balanced_only: bool = False, max_n: int = BRUTE_FORCE_MAX_N
) -> list[Realization]:
    """Every labelled realization of ``J`` on the standard vertex partition.

    Backtracks vertex by vertex, choosing the neighbours of ``u`` among the
    higher-numbered vertices and pruning on residual degrees and residual
    block edge counts.  Exponential; refuses instances above ``max_n``.
    """
    try:
        sizes = class_sizes(J).sizes
    except NonIntegralClassSize:
        return []
    n = sum(sizes)
    if n > max_n:
        raise TooLarge(f"brute force limited to n <= {max_n}, instance has n = {n}")
    cls = vertex_partition(J)
    residual = [J.degrees[c] for c in cls]
    block = [list(row) for row in J.matrix]
    edges: list[tuple[int, int]] = []
    found: list[Realization] = []

    def feasible_tail(u: int) -> bool:
        # every later vertex must still fit its residual degree into the later vertices
        later = n - u - 1
        return all(residual[v] <= later for v in range(u + 1, n))

    def rec(u: int) -> None:
        if u == n:
            found.append(Realization(J.degrees, cls, frozenset(edges)))
            return
        need = residual[u]
        cand = [v for v in range(u + 1, n) if residual[v] > 0]
        if need > len(cand):
            return
        cu = cls[u]
        for nbrs in combinations(cand, need):
            use = {}
            for v in nbrs:
                use[cls[v]] = use.get(cls[v], 0) + 1
            if any(block[cu][c] < m for c, m in use.items()):
                continue
            for c, m in use.items():
                block[cu][c] -= m
                if c != cu:
                    block[c][cu] -= m
            for v in nbrs:
                residual[v] -= 1
                edges.append((u, v))
            residual[u] = 0
            if feasible_tail(u):
                rec(u + 1)
            residual[u] = need
            for v in nbrs:
                residual[v] += 1
                edges.pop()
            for c, m in use.items():
                block[cu][c] += m
                if c != cu:
                    block[c][cu] += m

    if any(x < 0 for x in residual):
        return []
    rec(0)
    if balanced_only:
        found = [G for G in found if is_balanced(G, J)]
    return sorted(found)


@dataclass(frozen=True)
class ConnectivityReport:
    equal: bool
    bfs_count: int
    oracle_count: int
    missing_from_bfs: tuple[tuple, ...]
    extra_in_bfs: tuple[tuple, ...]

    def __bool__(self):
        return self.equal


def check_connectivity(bfs_states, oracle_states) -> ConnectivityReport:
    """Compare BFS output against the oracle by canonical key."""

    def keys(xs):
        return {x.key for x in xs}

    a, b = keys(bfs_states), keys(oracle_states)
    return ConnectivityReport(
        a == b,
        len(a),
        len(b),
        tuple(sorted(b - a)),
        tuple(sorted(a - b)),
    )
