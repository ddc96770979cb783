"""Joint degree matrices, realizations, degree spectra and balancedness.

Classes are indexed ``0..k-1`` in ascending degree order.  Vertices of a
realization are numbered so that each class occupies a contiguous id range,
again in ascending degree order (see :func:`class_ranges`).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .errors import InconsistentDegrees, JDMError, JdmMismatch, NonIntegralClassSize, NotSymmetric

Edge = tuple[int, int]


@dataclass(frozen=True)
class JointDegreeMatrix:
    """Symmetric non-negative integer matrix over labelled degree classes.

    ``matrix[i][j]`` is the number of edges between the class of degree
    ``degrees[i]`` and the class of degree ``degrees[j]``; the diagonal counts
    edges inside a class once.
    """

    degrees: tuple[int, ...]
    matrix: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        degrees = tuple(int(d) for d in self.degrees)
        matrix = tuple(tuple(int(x) for x in row) for row in self.matrix)
        object.__setattr__(self, "degrees", degrees)
        object.__setattr__(self, "matrix", matrix)
        k = len(degrees)
        if k == 0:
            raise JDMError("at least one degree class is required")
        if any(d <= 0 for d in degrees):
            raise JDMError(f"degrees must be positive, got {degrees}")
        if any(a >= b for a, b in zip(degrees, degrees[1:])):
            raise JDMError(f"degrees must be strictly increasing, got {degrees}")
        if len(matrix) != k or any(len(row) != k for row in matrix):
            raise JDMError(f"matrix must be {k}x{k}")
        for i in range(k):
            for j in range(k):
                if matrix[i][j] < 0:
                    raise JDMError(f"negative entry at ({i}, {j})")
                if matrix[i][j] != matrix[j][i]:
                    raise NotSymmetric(f"matrix is not symmetric at ({i}, {j})")

    @property
    def k(self) -> int:
        return len(self.degrees)

    @property
    def max_degree(self) -> int:
        return self.degrees[-1]

    def endpoint_total(self, i: int, j: int) -> int:
        """Edge endpoints in class ``i`` pointing to class ``j``."""
        return 2 * self.matrix[i][i] if i == j else self.matrix[i][j]

    @classmethod
    def from_lists(cls, degrees: Sequence[int], matrix: Sequence[Sequence[int]]) -> "JointDegreeMatrix":
        return cls(tuple(degrees), tuple(tuple(r) for r in matrix))


@dataclass(frozen=True)
class ClassSizes:
    sizes: tuple[int, ...]
    total: int


@dataclass(frozen=True)
class GraphicalityReport:
    graphical: bool
    violations: tuple[str, ...]
    sizes: tuple[int, ...] | None = None

    def __bool__(self):
        return self.graphical


def _size_numerators(J: JointDegreeMatrix) -> list[int]:
    return [J.matrix[i][i] + sum(J.matrix[i]) for i in range(J.k)]


def class_sizes(J: JointDegreeMatrix) -> ClassSizes:
    """Number of vertices per class, ``n_i = (J_ii + sum_j J_ij) / degree_i``.

    Raises :class:`NonIntegralClassSize` for the first class whose size is not
    an integer.
    """
    sizes = []
    for i, num in enumerate(_size_numerators(J)):
        q, r = divmod(num, J.degrees[i])
        if r:
            raise NonIntegralClassSize(i, J.degrees[i], num)
        sizes.append(q)
    return ClassSizes(tuple(sizes), sum(sizes))


def is_graphical(J: JointDegreeMatrix) -> GraphicalityReport:
    """Integrality of class sizes plus the per-block capacity conditions."""
    violations = []
    sizes = []
    for i, num in enumerate(_size_numerators(J)):
        if num % J.degrees[i]:
            violations.append(
                f"class {i} (degree {J.degrees[i]}): size {num}/{J.degrees[i]} is not an integer"
            )
            sizes.append(None)
        else:
            sizes.append(num // J.degrees[i])
    if violations:
        return GraphicalityReport(False, tuple(violations))
    for i in range(J.k):
        cap = sizes[i] * (sizes[i] - 1) // 2
        if J.matrix[i][i] > cap:
            violations.append(f"class {i}: {J.matrix[i][i]} internal edges exceed C({sizes[i]},2) = {cap}")
        for j in range(i + 1, J.k):
            cap = sizes[i] * sizes[j]
            if J.matrix[i][j] > cap:
                violations.append(f"classes ({i},{j}): {J.matrix[i][j]} edges exceed {sizes[i]}*{sizes[j]} = {cap}")
    return GraphicalityReport(not violations, tuple(violations), tuple(sizes))


def theta_table(J: JointDegreeMatrix, literal: bool = False) -> tuple[tuple[Fraction, ...], ...]:
    """Average number of class-``j`` neighbours of a class-``i`` vertex.

    By default the diagonal is ``2 J_ii / n_i`` (each internal edge has two
    endpoints in the class).  ``literal=True`` uses ``J_ii / n_i`` instead; that
    variant leaves e.g. the 4-cycle instance without any balanced realization.
    """
    sizes = class_sizes(J).sizes
    rows = []
    for i in range(J.k):
        if sizes[i] == 0:
            rows.append(tuple(Fraction(0) for _ in range(J.k)))
            continue
        row = []
        for j in range(J.k):
            num = J.matrix[i][j] if literal else J.endpoint_total(i, j)
            row.append(Fraction(num, sizes[i]))
        rows.append(tuple(row))
    return tuple(rows)


def balance_bounds(J: JointDegreeMatrix, literal: bool = False) -> tuple[tuple[tuple[int, int], ...], ...]:
    """Inclusive integer range of ``d_j(v)`` allowed for ``v`` in class ``i``.

    ``|d - theta| < 1`` admits exactly ``theta`` when theta is integral and
    ``floor(theta)..ceil(theta)`` otherwise.
    """
    out = []
    for row in theta_table(J, literal):
        bounds = []
        for t in row:
            lo = t.numerator // t.denominator
            hi = lo if t.denominator == 1 else lo + 1
            bounds.append((lo, hi))
        out.append(tuple(bounds))
    return tuple(out)


def class_ranges(sizes: Sequence[int]) -> list[range]:
    ranges, start = [], 0
    for s in sizes:
        ranges.append(range(start, start + s))
        start += s
    return ranges


@dataclass(frozen=True)
class Realization:
    """A labelled simple graph together with its degree-class partition."""

    degrees: tuple[int, ...]
    class_of: tuple[int, ...]
    edges: frozenset[Edge] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "degrees", tuple(self.degrees))
        object.__setattr__(self, "class_of", tuple(self.class_of))
        n = len(self.class_of)
        norm = set()
        for u, v in self.edges:
            if u == v:
                raise JDMError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise JDMError(f"edge ({u}, {v}) out of range for {n} vertices")
            norm.add((u, v) if u < v else (v, u))
        object.__setattr__(self, "edges", frozenset(norm))
        if any(not 0 <= c < len(self.degrees) for c in self.class_of):
            raise JDMError("class index out of range")

    @property
    def num_vertices(self) -> int:
        return len(self.class_of)

    @cached_property
    def neighbors(self) -> tuple[frozenset[int], ...]:
        adj: list[set[int]] = [set() for _ in range(self.num_vertices)]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return tuple(frozenset(a) for a in adj)

    @cached_property
    def key(self) -> tuple[Edge, ...]:
        """Sorted edge list; equal keys iff equal edge sets."""
        return tuple(sorted(self.edges))

    def with_edges(self, edges: Iterable[Edge]) -> "Realization":
        return Realization(self.degrees, self.class_of, frozenset(edges))

    def __lt__(self, other: "Realization") -> bool:
        return self.key < other.key


@dataclass(frozen=True)
class DegreeSpectrum:
    counts: tuple[tuple[int, ...], ...]

    def __getitem__(self, v: int) -> tuple[int, ...]:
        return self.counts[v]


def _raw_spectrum(G: Realization) -> list[list[int]]:
    k = len(G.degrees)
    counts = [[0] * k for _ in range(G.num_vertices)]
    for u, v in G.edges:
        counts[u][G.class_of[v]] += 1
        counts[v][G.class_of[u]] += 1
    return counts


def degree_spectrum(G: Realization) -> DegreeSpectrum:
    """Per-vertex neighbour counts by class."""
    counts = _raw_spectrum(G)
    for v, row in enumerate(counts):
        if sum(row) != G.degrees[G.class_of[v]]:
            raise InconsistentDegrees(
                f"vertex {v} has degree {sum(row)} but class {G.class_of[v]} "
                f"has degree {G.degrees[G.class_of[v]]}"
            )
    return DegreeSpectrum(tuple(tuple(r) for r in counts))


def jdm_of(G: Realization) -> JointDegreeMatrix:
    k = len(G.degrees)
    m = [[0] * k for _ in range(k)]
    for u, v in G.edges:
        a, b = G.class_of[u], G.class_of[v]
        m[a][b] += 1
        if a != b:
            m[b][a] += 1
    return JointDegreeMatrix.from_lists(G.degrees, m)


def validate_realization(G: Realization, J: JointDegreeMatrix) -> None:
    """Raise unless ``G`` is a realization of ``J`` with the standard labelling."""
    if G.degrees != J.degrees:
        raise JdmMismatch(f"degree labels differ: {G.degrees} vs {J.degrees}")
    sizes = class_sizes(J).sizes
    expected = tuple(c for c, s in enumerate(sizes) for _ in range(s))
    if G.class_of != expected:
        raise JdmMismatch("vertex partition does not match the class sizes of the JDM")
    degree_spectrum(G)
    if jdm_of(G) != J:
        raise JdmMismatch("realization has a different joint degree matrix")


def is_balanced(G: Realization, J: JointDegreeMatrix, literal: bool = False) -> bool:
    if jdm_of(G) != J:
        raise JdmMismatch("realization does not realize the given JDM")
    theta = theta_table(J, literal)
    for v, row in enumerate(_raw_spectrum(G)):
        t = theta[G.class_of[v]]
        if any(abs(d - t[j]) >= 1 for j, d in enumerate(row)):
            return False
    return True


def vertex_partition(J: JointDegreeMatrix) -> tuple[int, ...]:
    sizes = class_sizes(J).sizes
    return tuple(c for c, s in enumerate(sizes) for _ in range(s))
