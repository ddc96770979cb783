from fractions import Fraction
from itertools import permutations

import pytest

from _corpus import JDM_A, JDM_B, JDM_C, K4
from jdmchain.errors import InconsistentDegrees, JdmMismatch, NonIntegralClassSize, NotSymmetric
from jdmchain.jdm_core import (
    JointDegreeMatrix,
    Realization,
    balance_bounds,
    class_sizes,
    degree_spectrum,
    is_balanced,
    is_graphical,
    jdm_of,
    theta_table,
    vertex_partition,
)

# JDM-A: vertices 0,1 have degree 1 (a1, a2); 2,3 have degree 2 (b1, b2)
A_STATE = Realization((1, 2), (0, 0, 1, 1), frozenset({(0, 2), (1, 3), (2, 3)}))
# JDM-C: four leaves 0..3, hub 4 joined to 0 and 1, edge 2-3
C_STATE = Realization((1, 2), (0, 0, 0, 0, 1), frozenset({(0, 4), (1, 4), (2, 3)}))
CYCLE = Realization((2,), (0, 0, 0, 0), frozenset({(0, 1), (1, 2), (2, 3), (0, 3)}))
K4_GRAPH = Realization((3,), (0,) * 4, frozenset((u, v) for u in range(4) for v in range(u + 1, 4)))


class TestClassSizes:
    def test_jdm_a(self):
        cs = class_sizes(JDM_A)
        assert cs.sizes == (2, 2) and cs.total == 4

    def test_bipartite_six_edges(self):
        cs = class_sizes(JointDegreeMatrix.from_lists([2, 3], [[0, 6], [6, 0]]))
        assert cs.sizes == (3, 2) and cs.total == 5

    def test_empty_instance(self):
        cs = class_sizes(JointDegreeMatrix.from_lists([1], [[0]]))
        assert cs.sizes == (0,) and cs.total == 0

    def test_non_integral(self):
        with pytest.raises(NonIntegralClassSize):
            class_sizes(JointDegreeMatrix.from_lists([1, 2], [[0, 3], [3, 0]]))


class TestMatrixValidation:
    def test_asymmetric_rejected(self):
        with pytest.raises(NotSymmetric):
            JointDegreeMatrix.from_lists([1, 2], [[0, 1], [2, 0]])

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            JointDegreeMatrix.from_lists([1], [[-1]])

    def test_degrees_must_increase(self):
        with pytest.raises(ValueError):
            JointDegreeMatrix.from_lists([2, 1], [[0, 0], [0, 0]])


class TestGraphical:
    def test_jdm_a(self):
        assert is_graphical(JDM_A).graphical

    def test_four_cycle(self):
        rep = is_graphical(JDM_B)
        assert rep and rep.sizes == (4,)

    def test_non_integral_reports_violation(self):
        rep = is_graphical(JointDegreeMatrix.from_lists([1, 2], [[0, 3], [3, 0]]))
        assert not rep.graphical
        assert rep.violations and "class" in rep.violations[0]

    def test_too_many_internal_edges(self):
        # n = 2 for degree 2 with one internal edge needs another degree-2 partner
        J = JointDegreeMatrix.from_lists([3], [[3]])
        rep = is_graphical(J)
        assert not rep.graphical

    def test_block_exceeds_product(self):
        # degrees 1 and 3: n_1 = 3, n_3 = 1, J_13 = 3 ok; push to 4 with extra vertex budget
        J = JointDegreeMatrix.from_lists([2, 4], [[0, 8], [8, 0]])
        # n_2 = 4, n_4 = 2, 8 <= 8 is fine
        assert is_graphical(J)
        J = JointDegreeMatrix.from_lists([1, 2], [[0, 4], [4, 0]])
        # n_1 = 4, n_2 = 2, 4 <= 8 fine
        assert is_graphical(J)


class TestTheta:
    def test_diagonal_convention(self):
        t = theta_table(JDM_A)
        assert t == ((0, 1), (1, 1))
        assert theta_table(JDM_B) == ((2,),)

    def test_literal_mode(self):
        assert theta_table(JDM_B, literal=True) == ((1,),)

    def test_fractional_entries(self):
        t = theta_table(JDM_C)
        assert t[0] == (Fraction(1, 2), Fraction(1, 2))
        assert t[1] == (2, 0)

    def test_bounds_match_strict_inequality(self):
        b = balance_bounds(JDM_C)
        assert b[0][0] == (0, 1)
        assert b[1][0] == (2, 2)


class TestSpectrum:
    def test_jdm_a(self):
        d = degree_spectrum(A_STATE)
        assert d[0] == (0, 1)
        assert d[2] == (1, 1)

    def test_empty(self):
        assert degree_spectrum(Realization((1,), ())).counts == ()

    def test_cycle(self):
        assert all(row == (2,) for row in degree_spectrum(CYCLE).counts)

    def test_inconsistent_degree(self):
        G = Realization((1, 2), (0, 0, 1, 1), frozenset({(0, 2), (1, 3)}))
        with pytest.raises(InconsistentDegrees):
            degree_spectrum(G)


class TestBalanced:
    def test_jdm_a(self):
        assert is_balanced(A_STATE, JDM_A)

    def test_jdm_c(self):
        assert is_balanced(C_STATE, JDM_C)

    def test_k4(self):
        assert is_balanced(K4_GRAPH, K4)

    def test_literal_mode_rejects_four_cycle(self):
        assert is_balanced(CYCLE, JDM_B)
        assert not is_balanced(CYCLE, JDM_B, literal=True)

    def test_wrong_jdm_raises(self):
        with pytest.raises(JdmMismatch):
            is_balanced(A_STATE, JDM_C)

    def test_relabel_within_class(self):
        for leaves in permutations(range(4)):
            perm = leaves + (4,)
            edges = frozenset((perm[u], perm[v]) for u, v in C_STATE.edges)
            G = Realization((1, 2), C_STATE.class_of, edges)
            assert is_balanced(G, JDM_C)

    def test_boundary_unbalanced(self):
        # six leaves hang in pairs off three degree-2 vertices, plus a triangle:
        # Theta_{2,1} = 1 and the pair holders sit exactly at distance 1
        degrees = (1, 2)
        cls = (0,) * 6 + (1,) * 6
        edges = {(0, 6), (1, 6), (2, 7), (3, 7), (4, 8), (5, 8), (9, 10), (10, 11), (9, 11)}
        G = Realization(degrees, cls, frozenset(edges))
        J = jdm_of(G)
        assert theta_table(J)[1][0] == 1
        assert not is_balanced(G, J)


class TestJdmOf:
    def test_jdm_a(self):
        assert jdm_of(A_STATE) == JDM_A

    def test_edgeless(self):
        G = Realization((1, 2), (0, 1))
        assert jdm_of(G).matrix == ((0, 0), (0, 0))

    def test_k4(self):
        assert jdm_of(K4_GRAPH).matrix == ((6,),)

    def test_round_trip_sizes(self):
        assert vertex_partition(jdm_of(C_STATE)) == C_STATE.class_of
