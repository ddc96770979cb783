"""Lazy restricted-swap Markov chain on balanced realizations.

A step keeps the state with probability 1/2.  Otherwise it draws an ordered
4-tuple ``(v1, v2, v3, v4)`` of distinct vertices uniformly and, if ``v1`` and
``v2`` share a class, edges ``v1-v3`` and ``v2-v4`` exist and ``v1-v4``,
``v2-v3`` do not, replaces the former pair by the latter provided the result
is balanced.

When ``v3`` and ``v4`` also share a class the same swap is reachable from the
pivot pair ``{v3, v4}`` as well, which would give it four ordered tuples
instead of two.  Such tuples are only accepted in the orientation whose pivot
pair holds the smallest of the four vertex ids, so every distinct swap has
exactly two accepting tuples and probability ``1 / (n(n-1)(n-2)(n-3))``.
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from typing import Iterator

import numpy as np

from .construct import construct_balanced
from .errors import JdmMismatch, NotGraphical
from .jdm_core import (
    JointDegreeMatrix,
    Realization,
    balance_bounds,
    degree_spectrum,
    is_balanced,
    is_graphical,
    jdm_of,
    validate_realization,
)

BLOCK = 4096


class Rejection(enum.Enum):
    NOT_DISTINCT = "not_distinct"
    CLASS_MISMATCH = "class_mismatch"
    NOT_FEASIBLE = "not_feasible"
    DUPLICATE_ORIENTATION = "duplicate_orientation"
    NOT_BALANCED = "not_balanced"


@dataclass(frozen=True)
class RsoMove:
    v1: int
    v2: int
    v3: int
    v4: int

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.v1, self.v2, self.v3, self.v4)


@dataclass(frozen=True, eq=False)
class ChainState:
    """A balanced realization with its degree spectrum kept up to date."""

    realization: Realization
    spectrum: tuple[tuple[int, ...], ...]
    bounds: tuple = field(repr=False)

    @classmethod
    def from_realization(cls, G: Realization, J: JointDegreeMatrix | None = None) -> "ChainState":
        if J is None:
            J = jdm_of(G)
        else:
            validate_realization(G, J)
        if not is_balanced(G, J):
            raise JdmMismatch("initial realization is not balanced")
        return cls(G, degree_spectrum(G).counts, balance_bounds(J))

    @classmethod
    def initial(cls, J: JointDegreeMatrix) -> "ChainState":
        return cls.from_realization(construct_balanced(J), J)

    @property
    def key(self):
        return self.realization.key

    @property
    def num_vertices(self) -> int:
        return self.realization.num_vertices

    def __eq__(self, other):
        return isinstance(other, ChainState) and self.realization.edges == other.realization.edges

    def __hash__(self):
        return hash(self.realization.edges)


def num_ordered_tuples(n: int) -> int:
    return n * (n - 1) * (n - 2) * (n - 3) if n >= 4 else 0


def rso_apply(state: ChainState, m: RsoMove | tuple[int, int, int, int]) -> ChainState | Rejection:
    """Apply one restricted swap, or return why it is rejected."""
    v1, v2, v3, v4 = m.as_tuple() if isinstance(m, RsoMove) else m
    G = state.realization
    if len({v1, v2, v3, v4}) != 4:
        return Rejection.NOT_DISTINCT
    cls = G.class_of
    if cls[v1] != cls[v2]:
        return Rejection.CLASS_MISMATCH
    adj = G.neighbors
    if v3 not in adj[v1] or v4 not in adj[v2] or v4 in adj[v1] or v3 in adj[v2]:
        return Rejection.NOT_FEASIBLE
    c3, c4 = cls[v3], cls[v4]
    if c3 == c4 and min(v3, v4) < min(v1, v2):
        return Rejection.DUPLICATE_ORIENTATION
    spectrum = state.spectrum
    if c3 != c4:
        b = state.bounds[cls[v1]]
        row1 = list(spectrum[v1])
        row2 = list(spectrum[v2])
        row1[c3] -= 1
        row1[c4] += 1
        row2[c4] -= 1
        row2[c3] += 1
        for c in (c3, c4):
            lo, hi = b[c]
            if not (lo <= row1[c] <= hi and lo <= row2[c] <= hi):
                return Rejection.NOT_BALANCED
        spectrum = list(spectrum)
        spectrum[v1] = tuple(row1)
        spectrum[v2] = tuple(row2)
        spectrum = tuple(spectrum)
    e = set(G.edges)
    e.difference_update({(min(v1, v3), max(v1, v3)), (min(v2, v4), max(v2, v4))})
    e.update({(min(v1, v4), max(v1, v4)), (min(v2, v3), max(v2, v3))})
    return ChainState(G.with_edges(e), spectrum, state.bounds)


def decode_tuple(r: int, n: int) -> tuple[int, int, int, int]:
    """Map ``r`` in ``[0, n(n-1)(n-2)(n-3))`` to an ordered tuple of distinct vertices."""
    r0 = r % n
    r //= n
    r1 = r % (n - 1)
    r //= n - 1
    r2 = r % (n - 2)
    r3 = r // (n - 2)
    v1 = r0
    v2 = r1 + (r1 >= v1)
    lo, hi = sorted((v1, v2))
    v3 = r2 + (r2 >= lo)
    v3 += v3 >= hi
    v4 = r3
    for t in sorted((v1, v2, v3)):
        v4 += v4 >= t
    return v1, v2, v3, v4


def decode_tuples(r: np.ndarray, n: int) -> tuple[np.ndarray, ...]:
    """Vectorised :func:`decode_tuple`."""
    r0 = r % n
    r = r // n
    r1 = r % (n - 1)
    r = r // (n - 1)
    r2 = r % (n - 2)
    r3 = r // (n - 2)
    v1 = r0
    v2 = r1 + (r1 >= v1)
    lo = np.minimum(v1, v2)
    hi = np.maximum(v1, v2)
    v3 = r2 + (r2 >= lo)
    v3 = v3 + (v3 >= hi)
    taken = np.sort(np.stack([v1, v2, v3]), axis=0)
    v4 = r3
    for t in taken:
        v4 = v4 + (v4 >= t)
    return v1, v2, v3, v4


def step(state: ChainState, rng: np.random.Generator) -> ChainState:
    """One lazy step.  For fewer than four vertices the chain never moves."""
    n = state.num_vertices
    N = num_ordered_tuples(n)
    if N == 0:
        return state
    u = int(rng.integers(0, 2 * N))
    if u >= N:
        return state
    out = rso_apply(state, decode_tuple(u, n))
    return state if isinstance(out, Rejection) else out


def successors(state: ChainState) -> dict[tuple, tuple[ChainState, int]]:
    """Distinct states reachable in one accepted swap, with their tuple counts."""
    G = state.realization
    adj = G.neighbors
    cls = G.class_of
    out: dict[tuple, tuple[ChainState, int]] = {}
    by_class: dict[int, list[int]] = {}
    for v, c in enumerate(cls):
        by_class.setdefault(c, []).append(v)
    for members in by_class.values():
        for v1 in members:
            for v2 in members:
                if v1 == v2:
                    continue
                a = adj[v1] - adj[v2] - {v2}
                b = adj[v2] - adj[v1] - {v1}
                for v3 in a:
                    for v4 in b:
                        if v3 == v4:
                            continue
                        nxt = rso_apply(state, (v1, v2, v3, v4))
                        if isinstance(nxt, Rejection):
                            continue
                        k = nxt.key
                        if k in out:
                            out[k] = (out[k][0], out[k][1] + 1)
                        else:
                            out[k] = (nxt, 1)
    return out


def transition_prob(a: ChainState, b: ChainState, n: int | None = None) -> Fraction:
    """Exact one-step probability of moving from ``a`` to ``b``."""
    if n is None:
        n = a.num_vertices
    N = num_ordered_tuples(n)
    if N == 0:
        return Fraction(int(a == b))
    if a == b:
        out = sum(c for _, c in successors(a).values())
        return 1 - Fraction(out, 2 * N)
    removed = a.realization.edges - b.realization.edges
    added = b.realization.edges - a.realization.edges
    if len(removed) != 2 or len(added) != 2:
        return Fraction(0)
    touched = {v for e in removed for v in e}
    if len(touched) != 4 or touched != {v for e in added for v in e}:
        return Fraction(0)
    hits = 0
    for t in permutations(sorted(touched)):
        nxt = rso_apply(a, t)
        if not isinstance(nxt, Rejection) and nxt == b:
            hits += 1
    return Fraction(hits, 2 * N)


class Sampler:
    """Single walker over balanced realizations of ``J``.

    Counters record lazy steps, accepted moves and each rejection reason.
    """

    def __init__(self, J: JointDegreeMatrix, seed: int, init: Realization | None = None):
        report = is_graphical(J)
        if not report:
            raise NotGraphical(report.violations)
        self.J = J
        self.seed = seed
        self.rng = np.random.Generator(np.random.PCG64(seed))
        self.state = ChainState.from_realization(init, J) if init is not None else ChainState.initial(J)
        self.counters: Counter = Counter()
        self.steps_done = 0

    @property
    def acceptance_rate(self) -> float:
        proposals = self.steps_done - self.counters["lazy"]
        return self.counters["accepted"] / proposals if proposals else 0.0

    def _attempt(self, move) -> None:
        out = rso_apply(self.state, move)
        if isinstance(out, Rejection):
            self.counters[out.value] += 1
        else:
            self.counters["accepted"] += 1
            self.state = out

    def run(self, steps: int, burnin: int = 0, thin: int = 1) -> Iterator[Realization]:
        """Advance ``burnin + steps`` steps, yielding every ``thin``-th state after burn-in."""
        if thin < 1:
            raise ValueError("thin must be >= 1")
        n = self.state.num_vertices
        N = num_ordered_tuples(n)
        total = burnin + steps
        if N == 0:
            self.counters["lazy"] += total
            self.steps_done += total
            for _ in range(steps // thin):
                yield self.state.realization
            return
        cls = np.asarray(self.state.realization.class_of)
        done = 0
        while done < total:
            size = min(BLOCK, total - done)
            u = self.rng.integers(0, 2 * N, size=size)
            lazy = u >= N
            v1, v2, v3, v4 = decode_tuples(np.where(lazy, 0, u), n)
            same = cls[v1] == cls[v2]
            active = np.flatnonzero(~lazy & same)
            self.counters["lazy"] += int(lazy.sum())
            self.counters[Rejection.CLASS_MISMATCH.value] += int((~lazy & ~same).sum())
            # step index s (1-based, global) emits when s > burnin and (s - burnin) % thin == 0
            first = done + 1
            s0 = max(first, burnin + 1)
            k = -((s0 - burnin) // -thin)
            emits = np.arange(burnin + k * thin, done + size + 1, thin) - done - 1
            ai = 0
            moves = np.stack([v1, v2, v3, v4], axis=1)
            for e in emits:
                while ai < len(active) and active[ai] <= e:
                    self._attempt(tuple(int(x) for x in moves[active[ai]]))
                    ai += 1
                yield self.state.realization
            while ai < len(active):
                self._attempt(tuple(int(x) for x in moves[active[ai]]))
                ai += 1
            done += size
            self.steps_done += size


def sample(
    J: JointDegreeMatrix,
    steps: int,
    burnin: int = 0,
    thin: int = 1,
    seed: int = 0,
    init: Realization | None = None,
) -> Iterator[Realization]:
    """Stream of realizations; identical arguments give an identical stream."""
    return Sampler(J, seed, init).run(steps, burnin, thin)
