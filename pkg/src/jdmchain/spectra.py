"""Exact spectral and conductance analysis of small enumerated chains.

Transition matrices are kept as integer numerators over a single common
denominator so that stochasticity, symmetry, flows and conductance are all
decided exactly.  Only the eigenvalues are floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from itertools import combinations
from typing import Callable, Sequence

import numpy as np

from .chain import ChainState, num_ordered_tuples, successors
from .errors import EmptyOrFull, NotClosed, NotSymmetric, TooLarge

EXACT_CAP = 24
DENSE_CAP = 5000
JACOBI_MAX = 200
CHECK_SLACK = 1e-9
JACOBI_TOL = 1e-12
BOUND_CONSTANT = 256 / (1 - 1 / math.sqrt(2)) ** 4


@dataclass(frozen=True, eq=False)
class RationalMatrix:
    """``numer / denom`` with an integer ndarray numerator."""

    numer: np.ndarray
    denom: int

    @classmethod
    def from_fractions(cls, rows: Sequence[Sequence]) -> "RationalMatrix":
        rows = [[Fraction(x) for x in r] for r in rows]
        denom = reduce(math.lcm, (x.denominator for r in rows for x in r), 1)
        numer = [[x.numerator * (denom // x.denominator) for x in r] for r in rows]
        return cls(_int_array(numer), denom)

    @property
    def size(self) -> int:
        return self.numer.shape[0]

    def __getitem__(self, ij) -> Fraction:
        return Fraction(int(self.numer[ij]), self.denom)

    def to_fractions(self) -> list[list[Fraction]]:
        return [[Fraction(int(x), self.denom) for x in row] for row in self.numer]

    def to_float(self) -> np.ndarray:
        return self.numer.astype(float) / self.denom

    def is_symmetric(self) -> bool:
        return bool(np.array_equal(self.numer, self.numer.T))

    def is_row_stochastic(self) -> bool:
        return bool((self.numer >= 0).all() and (self.numer.sum(axis=1) == self.denom).all())


def _int_array(rows) -> np.ndarray:
    big = max((abs(x) for r in rows for x in r), default=0)
    if big < 2**62:
        return np.array(rows, dtype=np.int64).reshape(len(rows), -1)
    return np.array(rows, dtype=object).reshape(len(rows), -1)


def uniform(m: int) -> tuple[Fraction, ...]:
    return tuple(Fraction(1, m) for _ in range(m))


# --------------------------------------------------------------------------- #
# matrices


def transition_matrix(
    states: Sequence[ChainState],
    kernel: Callable[[ChainState, ChainState], Fraction] | None = None,
) -> RationalMatrix:
    """Exact transition matrix of the swap chain over ``states``.

    By default successors are generated move by move; a pairwise ``kernel``
    (e.g. :func:`jdmchain.chain.transition_prob`) can be supplied instead.
    """
    m = len(states)
    if m == 0:
        raise EmptyOrFull("no states")
    index = {s.key: i for i, s in enumerate(states)}
    if len(index) != m:
        raise ValueError("states are not pairwise distinct")
    if kernel is not None:
        T = RationalMatrix.from_fractions([[kernel(a, b) for b in states] for a in states])
    else:
        D = 2 * num_ordered_tuples(states[0].num_vertices)
        if D == 0:
            T = RationalMatrix(np.eye(m, dtype=np.int64), 1)
        else:
            W = np.zeros((m, m), dtype=np.int64)
            for i, s in enumerate(states):
                for k, (_, count) in successors(s).items():
                    j = index.get(k)
                    if j is None:
                        raise NotClosed(f"state {i} moves to a state outside the list")
                    W[i, j] += count
                W[i, i] = D - W[i].sum()
            T = RationalMatrix(W, D)
    if not T.is_row_stochastic():
        raise NotClosed("transition matrix is not row-stochastic")
    if not T.is_symmetric():
        raise NotSymmetric("transition matrix is not symmetric")
    return T


def stationarity_defect(T: RationalMatrix, pi: Sequence[Fraction] | None = None) -> Fraction:
    """``max_j |(pi T)_j - pi_j|`` evaluated exactly."""
    m = T.size
    pi = uniform(m) if pi is None else tuple(pi)
    worst = Fraction(0)
    for j in range(m):
        col = sum(pi[i] * Fraction(int(T.numer[i, j]), T.denom) for i in range(m) if T.numer[i, j])
        worst = max(worst, abs(col - pi[j]))
    return worst


# --------------------------------------------------------------------------- #
# eigenvalues


def _round_robin(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    m = n + n % 2
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        pairs = [(players[i], players[m - 1 - i]) for i in range(m // 2)]
        pairs = [(p, q) for p, q in pairs if p < n and q < n]
        if pairs:
            P, Q = zip(*pairs)
            rounds.append((np.array(P), np.array(Q)))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def _off_norm(A: np.ndarray) -> float:
    off = A.copy()
    np.fill_diagonal(off, 0.0)
    return float(np.linalg.norm(off))


def eigen_symmetric(matrix, tol: float = JACOBI_TOL, max_sweeps: int = 100) -> np.ndarray:
    """Eigenvalues of a real symmetric matrix in descending order.

    Cyclic Jacobi with a round-robin ordering: each round rotates ``n/2``
    disjoint index pairs at once, and ``n-1`` rounds make up a sweep.  Stops
    when the Frobenius norm of the off-diagonal part drops below ``tol``
    times the Frobenius norm of the matrix (at least ``tol``).
    """
    A = np.array(matrix, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise NotSymmetric("matrix must be square")
    n = A.shape[0]
    scale = max(1.0, float(np.abs(A).max(initial=0.0)))
    if np.abs(A - A.T).max(initial=0.0) > 1e-12 * scale:
        raise NotSymmetric("matrix is not symmetric")
    A = (A + A.T) / 2
    if n < 2:
        return np.diag(A).copy()
    rounds = _round_robin(n)
    # the off-diagonal target is relative to the matrix scale
    target = tol * max(1.0, float(np.linalg.norm(A)))
    for _ in range(max_sweeps):
        if _off_norm(A) < target:
            break
        for P, Q in rounds:
            apq = A[P, Q]
            live = np.abs(apq) > 1e-300
            if not live.any():
                continue
            p, q, apq = P[live], Q[live], apq[live]
            tau = (A[q, q] - A[p, p]) / (2 * apq)
            t = np.where(tau >= 0, 1.0, -1.0) / (np.abs(tau) + np.hypot(1.0, tau))
            c = 1 / np.sqrt(1 + t * t)
            s = t * c
            cp, cq = A[:, p].copy(), A[:, q].copy()
            A[:, p] = cp * c - cq * s
            A[:, q] = cp * s + cq * c
            rp, rq = A[p, :].copy(), A[q, :].copy()
            A[p, :] = c[:, None] * rp - s[:, None] * rq
            A[q, :] = s[:, None] * rp + c[:, None] * rq
            A[p, q] = 0.0
            A[q, p] = 0.0
    else:
        if _off_norm(A) >= target:
            raise RuntimeError(f"Jacobi did not converge in {max_sweeps} sweeps")
    return np.sort(np.diag(A))[::-1].copy()


def symmetric_eigenvalues(matrix, jacobi_max: int = JACOBI_MAX) -> np.ndarray:
    """Descending eigenvalues: Jacobi up to ``jacobi_max`` rows, LAPACK beyond."""
    A = np.asarray(matrix, dtype=float)
    if A.shape[0] <= jacobi_max:
        return eigen_symmetric(A)
    if np.abs(A - A.T).max() > 1e-12 * max(1.0, float(np.abs(A).max())):
        raise NotSymmetric("matrix is not symmetric")
    return np.linalg.eigvalsh((A + A.T) / 2)[::-1].copy()


def chain_eigenvalues(T: RationalMatrix, pi: Sequence[Fraction] | None = None) -> np.ndarray:
    """Eigenvalues of a reversible chain via its symmetrisation ``D^1/2 T D^-1/2``."""
    F = T.to_float()
    if pi is None:
        return symmetric_eigenvalues(F)
    r = np.sqrt(np.array([float(x) for x in pi]))
    return symmetric_eigenvalues(r[:, None] * F / r[None, :])


def second_eigenvalue(eigs: np.ndarray) -> float | None:
    return float(eigs[1]) if len(eigs) > 1 else None


def relaxation_time(lambda2: float | None) -> float:
    """``1 / (1 - lambda2)``; 1 for a single state, infinite for a reducible chain."""
    if lambda2 is None:
        return 1.0
    gap = 1 - lambda2
    return math.inf if gap <= 1e-12 else 1 / gap


# --------------------------------------------------------------------------- #
# flows and conductance


def _flow_weights(T: RationalMatrix, pi: Sequence[Fraction]):
    """Integer flow matrix ``F`` and ``pi`` numerators over common denominators.

    ``pi(a) T(b|a) = F[a, b] / (pd * T.denom)`` and ``pi(a) = pn[a] / pd``.
    """
    pd = reduce(math.lcm, (x.denominator for x in pi), 1)
    pn = [x.numerator * (pd // x.denominator) for x in pi]
    rows = [[pn[a] * int(x) for x in T.numer[a]] for a in range(T.size)]
    return _int_array(rows), _int_array([pn])[0], pd


@dataclass(frozen=True)
class FlowReport:
    subset: tuple[int, ...]
    pi_S: Fraction
    psi: Fraction
    flow_out: Fraction
    flow_in: Fraction


@dataclass
class ChainAnalysis:
    states: list
    T: RationalMatrix
    pi: tuple[Fraction, ...]
    eigenvalues: np.ndarray
    phi: Fraction | None = None
    witness: tuple[int, ...] | None = None
    _flows: tuple | None = field(default=None, repr=False)

    @property
    def lambda2(self) -> float | None:
        return second_eigenvalue(self.eigenvalues)

    @property
    def relaxation(self) -> float:
        return relaxation_time(self.lambda2)

    @property
    def size(self) -> int:
        return self.T.size

    def flows(self):
        if self._flows is None:
            self._flows = _flow_weights(self.T, self.pi)
        return self._flows


def analyze(
    states: Sequence,
    T: RationalMatrix | None = None,
    pi: Sequence[Fraction] | None = None,
    exact_cap: int = EXACT_CAP,
) -> ChainAnalysis:
    """Matrix, spectrum and (within ``exact_cap``) exact conductance."""
    if T is None:
        T = transition_matrix(states)
    m = T.size
    if pi is None:
        pi = uniform(m)
        eigs = chain_eigenvalues(T)
    else:
        pi = tuple(Fraction(x) for x in pi)
        eigs = chain_eigenvalues(T, pi)
    a = ChainAnalysis(list(states), T, tuple(pi), eigs)
    if m <= exact_cap and m > 1:
        a.phi, a.witness = conductance_exact(a, exact_cap)
    return a


def conditional_flow(analysis: ChainAnalysis, S) -> FlowReport:
    """Probability flow out of ``S`` per step, normalised by ``pi(S)``."""
    S = tuple(sorted(set(S)))
    m = analysis.size
    if not S or len(S) == m:
        raise EmptyOrFull("S must be a non-empty proper subset")
    inside = set(S)
    outside = [b for b in range(m) if b not in inside]
    T, pi = analysis.T, analysis.pi
    out = sum((pi[a] * T[a, b] for a in S for b in outside), Fraction(0))
    back = sum((pi[b] * T[b, a] for a in S for b in outside), Fraction(0))
    piS = sum((pi[a] for a in S), Fraction(0))
    return FlowReport(S, piS, out / piS, out, back)


def subset_tables(analysis: ChainAnalysis) -> tuple[np.ndarray, np.ndarray]:
    """Cut weight and ``pi`` mass of every subset, indexed by bitmask.

    Built by doubling on the highest bit: adding state ``i`` to a subset of
    ``{0..i-1}`` changes the cut by ``F[i, outside] - F[inside, i]``.
    Entries are integers scaled as in :func:`_flow_weights`.
    """
    F, pn, _ = analysis.flows()
    m = analysis.size
    dtype = F.dtype
    rows = F.sum(axis=1)
    cut = np.zeros(1, dtype=dtype)
    mass = np.zeros(1, dtype=dtype)
    for i in range(m):
        w = F[i, :i] + F[:i, i]
        h = np.zeros(1, dtype=dtype)
        for a in range(i):
            h = np.concatenate([h, h + w[a]])
        cut = np.concatenate([cut, cut + (rows[i] - F[i, i]) - h])
        mass = np.concatenate([mass, mass + pn[i]])
    return cut, mass


def _mask_members(mask: int) -> tuple[int, ...]:
    return tuple(i for i in range(mask.bit_length()) if mask >> i & 1)


def conductance_exact(analysis: ChainAnalysis, exact_cap: int = EXACT_CAP) -> tuple[Fraction, tuple[int, ...]]:
    """Minimum conditional flow over subsets with ``0 < pi(S) <= 1/2``.

    Ties are resolved towards the lexicographically least sorted index tuple.
    """
    m = analysis.size
    if m > exact_cap:
        raise TooLarge(f"{m} states exceed the exact conductance cap {exact_cap}")
    if m < 2:
        raise EmptyOrFull("conductance needs at least two states")
    _, _, pd = analysis.flows()
    cut, mass = subset_tables(analysis)
    ok = (mass > 0) & (2 * mass <= pd)
    idx = np.flatnonzero(ok)
    ratio = cut[idx].astype(float) / mass[idx].astype(float)
    best = ratio.min()
    near = idx[ratio <= best * (1 + 1e-9) + 1e-300]
    D = analysis.T.denom
    cands = [(Fraction(int(cut[k]), D * int(mass[k])), _mask_members(int(k))) for k in near]
    phi = min(c[0] for c in cands)
    witness = min(c[1] for c in cands if c[0] == phi)
    return phi, witness


def conductance_naive(analysis: ChainAnalysis) -> tuple[Fraction, tuple[int, ...]]:
    """Independent re-summation over every admissible subset (small chains only)."""
    m = analysis.size
    best = None
    for r in range(1, m):
        for S in combinations(range(m), r):
            piS = sum((analysis.pi[a] for a in S), Fraction(0))
            if piS > Fraction(1, 2):
                continue
            f = conditional_flow(analysis, S)
            if best is None or (f.psi, S) < best:
                best = (f.psi, S)
    return best


@dataclass(frozen=True)
class ConductanceBounds:
    lower: float
    upper: Fraction
    heuristic: bool = True


def conductance_bounds(analysis: ChainAnalysis, samples: int = 2000, seed: int = 0) -> ConductanceBounds:
    """Bounds on the conductance for chains above the exact cap (heuristic).

    The lower bound ``(1 - lambda2) / 2`` is the left Cheeger inequality; the
    upper bound is the smallest conditional flow among singletons, breadth-
    first balls and random subsets.
    """
    m = analysis.size
    rng = np.random.Generator(np.random.PCG64(seed))
    adj = analysis.T.numer > 0
    cands = [np.eye(m, dtype=bool)]
    for a in range(min(m, 50)):
        ball = np.zeros(m, dtype=bool)
        ball[a] = True
        while True:
            grown = ball | adj[ball].any(axis=0)
            if grown.sum() == ball.sum() or 2 * grown.sum() > m:
                break
            ball = grown
            cands.append(ball[None, :].copy())
    sizes = rng.integers(1, max(2, m // 2 + 1), size=samples)
    ranks = rng.random((samples, m)).argsort(axis=1).argsort(axis=1)
    cands.append(ranks < sizes[:, None])
    C = np.concatenate(cands)
    F, pn, pd = analysis.flows()
    mass = C.astype(float) @ pn.astype(float)
    C = C[2 * mass <= pd]
    X = C.astype(float)
    ratio = ((X @ F.astype(float)) * ~C).sum(axis=1) / (X @ pn.astype(float))
    # exact re-evaluation of the float candidates near the minimum
    near = np.flatnonzero(ratio <= ratio.min() * (1 + 1e-9) + 1e-300)
    best = min(conditional_flow(analysis, tuple(int(i) for i in np.flatnonzero(C[k]))).psi for k in near)
    lam = analysis.lambda2
    return ConductanceBounds(0.0 if lam is None else (1 - lam) / 2, best)


# --------------------------------------------------------------------------- #
# theorem checks


@dataclass(frozen=True)
class CheegerReport:
    holds: bool
    lambda2: float | None
    phi: Fraction | None
    lower: float | None
    upper: float | None
    note: str = ""


def check_cheeger(analysis: ChainAnalysis, slack: float = CHECK_SLACK) -> CheegerReport:
    """``1 - 2 phi <= lambda2 <= 1 - phi^2 / 2``."""
    lam = analysis.lambda2
    if lam is None:
        return CheegerReport(True, None, None, None, None, "single state: lambda2 undefined")
    if analysis.phi is None:
        raise TooLarge("exact conductance is required")
    phi = analysis.phi
    lower = float(1 - 2 * phi)
    upper = float(1 - phi * phi / 2)
    holds = lower <= lam + slack and lam <= upper + slack
    return CheegerReport(holds, lam, phi, lower, upper)


@dataclass(frozen=True)
class ModifiedCheegerReport:
    holds: bool
    subsets_checked: int
    min_slack: float
    violations: tuple[tuple[int, ...], ...]


def check_modified_cheeger(analysis: ChainAnalysis, slack: float = CHECK_SLACK, exact_cap: int = EXACT_CAP) -> ModifiedCheegerReport:
    """``(1 - lambda2)/2 * min(pi(S), pi(S^c)) <= flow(S -> S^c)`` for every proper ``S``."""
    m = analysis.size
    if m > exact_cap:
        raise TooLarge(f"{m} states exceed the cap {exact_cap}")
    lam = analysis.lambda2
    if lam is None:
        return ModifiedCheegerReport(True, 0, math.inf, ())
    _, _, pd = analysis.flows()
    cut, mass = subset_tables(analysis)
    proper = slice(1, len(cut) - 1)
    c = cut[proper].astype(float) / (pd * analysis.T.denom)
    small = np.minimum(mass[proper], pd - mass[proper]).astype(float) / pd
    margin = c - (1 - lam) / 2 * small
    bad = np.flatnonzero(margin < -slack)
    return ModifiedCheegerReport(
        bad.size == 0,
        int(margin.size),
        float(margin.min()),
        tuple(_mask_members(int(k) + 1) for k in bad[:20]),
    )


@dataclass(frozen=True)
class DecompositionBound:
    value: float
    r1: float
    r2: float
    clamped: bool

    def __float__(self):
        return self.value


def decomposition_bound(r1: float, r2: float, eps: float = 1e-12) -> DecompositionBound:
    """``256 r1^2 r2^2 / (1 - 1/sqrt 2)^4`` with ``r2`` clamped to at least ``1 + eps``."""
    if r1 < 1 or r2 < 1:
        raise ValueError("relaxation times are at least 1")
    clamped = r2 <= 1
    r2c = max(r2, 1 + eps)
    return DecompositionBound(BOUND_CONSTANT * r1 * r1 * r2c * r2c, r1, r2c, clamped)


@dataclass(frozen=True)
class FlowDominanceReport:
    holds: bool
    triples_checked: int
    min_surplus: Fraction | None
    violations: tuple[tuple[int, int, int], ...]


def check_flow_dominance(T: RationalMatrix, cell_of: Sequence[int], T_proj: RationalMatrix) -> FlowDominanceReport:
    """Every state's mass into another cell dominates the projected chain's entry.

    Checks ``sum_{y2 in cell x2} T(y2 | y1) >= T'(x2 | x1)`` for every state
    ``y1`` (in cell ``x1``) and every cell ``x2 != x1``, exactly.
    """
    m = T.size
    X = T_proj.size
    lcm = math.lcm(T.denom, T_proj.denom)
    a, b = lcm // T.denom, lcm // T_proj.denom
    into = np.zeros((m, X), dtype=object)
    for y1 in range(m):
        for y2 in np.flatnonzero(T.numer[y1]):
            into[y1, cell_of[y2]] += int(T.numer[y1, y2]) * a
    viol = []
    surplus = None
    checked = 0
    for y1 in range(m):
        x1 = cell_of[y1]
        for x2 in range(X):
            if x2 == x1:
                continue
            checked += 1
            s = Fraction(int(into[y1, x2]) - int(T_proj.numer[x1, x2]) * b, lcm)
            surplus = s if surplus is None else min(surplus, s)
            if s < 0:
                viol.append((x1, y1, x2))
    return FlowDominanceReport(not viol, checked, surplus, tuple(viol))


# --------------------------------------------------------------------------- #
# total variation decay


def tv_decay(analysis: ChainAnalysis, start: int, horizon: int, dense_cap: int = DENSE_CAP) -> list[tuple[int, float]]:
    """Exact total-variation distance to ``pi`` after ``t = 0..horizon`` steps."""
    m = analysis.size
    if m > dense_cap:
        raise TooLarge(f"{m} states exceed the dense cap {dense_cap}")
    T = analysis.T.to_float()
    pi = np.array([float(x) for x in analysis.pi])
    p = np.zeros(m)
    p[start] = 1.0
    out = []
    for t in range(horizon + 1):
        out.append((t, 0.5 * float(np.abs(p - pi).sum())))
        p = p @ T
    for (_, a), (_, b) in zip(out, out[1:]):
        if b > a + 1e-12:
            raise AssertionError("total variation increased along the chain")
    return out


def tv_decay_empirical(
    states: Sequence[ChainState],
    start: int,
    horizon: int,
    walkers: int = 1000,
    seed: int = 0,
) -> list[tuple[int, float]]:
    """Multi-walker estimate of the same curve (heuristic, for large spaces)."""
    from .chain import Sampler
    from .jdm_core import jdm_of

    index = {s.key: i for i, s in enumerate(states)}
    m = len(states)
    counts = np.zeros((horizon + 1, m))
    counts[0, start] = walkers
    G0 = states[start].realization
    J = jdm_of(G0)
    for w, child in enumerate(np.random.SeedSequence(seed).spawn(walkers)):
        sampler = Sampler(J, int(child.generate_state(1)[0]), init=G0)
        for t, G in enumerate(sampler.run(horizon), start=1):
            counts[t, index[G.key]] += 1
    return [(t, 0.5 * float(np.abs(counts[t] / walkers - 1 / m).sum())) for t in range(horizon + 1)]
