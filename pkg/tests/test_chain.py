import math
from collections import Counter
from fractions import Fraction
from itertools import permutations

import numpy as np
import pytest

from _corpus import JDM_A, JDM_B, JDM_C, K4
from jdmchain.chain import (
    ChainState,
    Rejection,
    RsoMove,
    Sampler,
    decode_tuple,
    decode_tuples,
    num_ordered_tuples,
    rso_apply,
    sample,
    step,
    successors,
    transition_prob,
)
from jdmchain.enumeration import enumerate_balanced
from jdmchain.errors import JdmMismatch, NotGraphical
from jdmchain.jdm_core import JointDegreeMatrix, Realization, degree_spectrum

A_STATE = Realization((1, 2), (0, 0, 1, 1), frozenset({(0, 2), (1, 3), (2, 3)}))
A_OTHER = Realization((1, 2), (0, 0, 1, 1), frozenset({(0, 3), (1, 2), (2, 3)}))
C_STATE = Realization((1, 2), (0, 0, 0, 0, 1), frozenset({(0, 4), (1, 4), (2, 3)}))
THREE_CLASS = JointDegreeMatrix.from_lists([1, 2, 3], [[0, 1, 0], [1, 2, 3], [0, 3, 0]])
# 6 labelled realizations, 4 of them balanced
MIXED = JointDegreeMatrix.from_lists([1, 2, 3], [[0, 0, 2], [0, 1, 2], [2, 2, 1]])


def state(G, J):
    return ChainState.from_realization(G, J)


class TestRsoApply:
    def test_jdm_a_swap(self):
        out = rso_apply(state(A_STATE, JDM_A), RsoMove(0, 1, 2, 3))
        assert out.realization.edges == A_OTHER.edges

    def test_class_mismatch(self):
        s = state(A_STATE, JDM_A)
        assert rso_apply(s, (0, 2, 1, 3)) is Rejection.CLASS_MISMATCH

    def test_not_distinct(self):
        assert rso_apply(state(A_STATE, JDM_A), (0, 0, 2, 3)) is Rejection.NOT_DISTINCT

    def test_not_feasible(self):
        # 0-3 is not an edge
        assert rso_apply(state(A_STATE, JDM_A), (0, 1, 3, 2)) is Rejection.NOT_FEASIBLE

    def test_duplicate_orientation(self):
        # the same swap read from the other class pair is counted once
        assert rso_apply(state(A_STATE, JDM_A), (2, 3, 0, 1)) is Rejection.DUPLICATE_ORIENTATION
        s = state(A_STATE, JDM_A)
        got = [rso_apply(s, t) for t in permutations(range(4))]
        assert sum(not isinstance(g, Rejection) for g in got) == 2

    def test_jdm_c_hub_move(self):
        out = rso_apply(state(C_STATE, JDM_C), (0, 2, 4, 3))
        G = out.realization
        assert {u for u, v in G.edges if v == 4} == {1, 2}
        assert (0, 3) in G.edges

    def test_unbalancing_move_rejected(self):
        from jdmchain.enumeration import brute_force_realizations

        balanced = {G.key for G in brute_force_realizations(MIXED, True)}
        seen = Counter()
        for s in enumerate_balanced(MIXED):
            for t in permutations(range(s.num_vertices), 4):
                r = rso_apply(s, t)
                seen[r if isinstance(r, Rejection) else "ok"] += 1
                if not isinstance(r, Rejection):
                    assert r.key in balanced
        assert seen[Rejection.NOT_BALANCED] > 0

    def test_incremental_spectrum(self):
        for J in (JDM_A, JDM_C, THREE_CLASS, MIXED):
            for s in enumerate_balanced(J):
                for nxt, _ in successors(s).values():
                    assert nxt.spectrum == degree_spectrum(nxt.realization).counts


class TestDecode:
    def test_bijection(self):
        for n in (4, 5, 6):
            seen = {decode_tuple(r, n) for r in range(num_ordered_tuples(n))}
            assert len(seen) == num_ordered_tuples(n)
            assert all(len(set(t)) == 4 for t in seen)

    def test_vectorised_matches(self):
        n = 7
        r = np.arange(num_ordered_tuples(n))
        cols = decode_tuples(r, n)
        for i in range(0, len(r), 37):
            assert tuple(int(c[i]) for c in cols) == decode_tuple(int(r[i]), n)


class TestTransitionProb:
    def test_jdm_a(self):
        a, b = state(A_STATE, JDM_A), state(A_OTHER, JDM_A)
        assert transition_prob(a, b) == Fraction(1, 24)
        assert transition_prob(a, a) == Fraction(23, 24)

    def test_two_swaps_apart(self):
        J = JDM_B
        states = enumerate_balanced(J)
        a = states[0]
        # every pair of distinct 4-cycles on 4 labelled vertices differs in 2 edges; build a 6-cycle pair instead
        J6 = JointDegreeMatrix.from_lists([2], [[6]])
        s6 = enumerate_balanced(J6)
        far = [(x, y) for x in s6[:5] for y in s6 if len(x.realization.edges ^ y.realization.edges) >= 6]
        assert far
        x, y = far[0]
        assert transition_prob(x, y) == 0
        assert transition_prob(a, a) + sum(transition_prob(a, b) for b in states if b != a) == 1

    def test_jdm_c_off_diagonal(self):
        states = enumerate_balanced(JDM_C)
        vals = {transition_prob(a, b) for a in states for b in states if a != b}
        assert vals <= {Fraction(0), Fraction(1, 120)}

    def test_symmetric(self):
        states = enumerate_balanced(THREE_CLASS)
        for a in states:
            for b in states:
                assert transition_prob(a, b) == transition_prob(b, a)


class TestStep:
    def test_k4_never_moves(self):
        s = ChainState.initial(K4)
        rng = np.random.default_rng(0)
        for _ in range(200):
            assert step(s, rng) is s

    def test_lazy_branch_returns_same_object(self):
        class Forced:
            def integers(self, lo, hi):
                return hi - 1

        s = ChainState.initial(JDM_C)
        assert step(s, Forced()) is s

    def test_kernel_matches_oracle(self):
        # empirical one-step frequencies from a fixed state vs exact probabilities, 3 sigma
        trials = 10**6
        s = state(C_STATE, JDM_C)
        rng = np.random.Generator(np.random.PCG64(2024))
        counts = Counter(step(s, rng).key for _ in range(trials))
        states = enumerate_balanced(JDM_C)
        for b in states:
            p = float(transition_prob(s, b))
            sigma = math.sqrt(trials * p * (1 - p))
            assert abs(counts.get(b.key, 0) - trials * p) <= 3 * sigma + 1e-9


class TestSampler:
    def test_emission_schedule(self):
        out = list(sample(JDM_A, steps=100, burnin=10, thin=7, seed=1))
        assert len(out) == 100 // 7

    def test_counters_add_up(self):
        sm = Sampler(JDM_C, seed=3)
        list(sm.run(5000))
        assert sum(sm.counters.values()) == 5000
        assert 0 < sm.acceptance_rate < 1

    def test_jdm_a_frequencies(self):
        out = list(sample(JDM_A, steps=10**5, burnin=10**3, thin=10, seed=12))
        c = Counter(G.key for G in out)
        assert len(out) == 10**4
        assert all(abs(v / len(out) - 0.5) <= 0.02 for v in c.values())

    def test_k4_constant(self):
        assert {G.key for G in sample(K4, steps=500, seed=0)} == {ChainState.initial(K4).key}

    def test_jdm_c_all_states(self):
        out = list(sample(JDM_C, steps=10**6, seed=4))
        c = Counter(G.key for G in out)
        assert len(c) == 6
        assert all(abs(v / len(out) - 1 / 6) <= 0.01 for v in c.values())

    def test_deterministic(self):
        a = [G.key for G in sample(JDM_C, steps=3000, thin=3, seed=99)]
        b = [G.key for G in sample(JDM_C, steps=3000, thin=3, seed=99)]
        assert a == b

    def test_block_boundaries_do_not_matter(self):
        # emission schedule is global: the same seed gives the same trajectory across run() splits
        whole = [G.key for G in Sampler(JDM_C, 5).run(9000)]
        sm = Sampler(JDM_C, 5)
        first = [G.key for G in sm.run(4096)]
        assert first == whole[:4096]

    def test_matches_step_by_step(self):
        # the block sampler consumes the same draws as repeated scalar steps
        seed = 17
        blk = [G.key for G in Sampler(JDM_C, seed).run(300)]
        rng = np.random.Generator(np.random.PCG64(seed))
        draws = rng.integers(0, 2 * num_ordered_tuples(5), size=300)

        class Replay:
            def __init__(self):
                self.i = 0

            def integers(self, lo, hi):
                self.i += 1
                return draws[self.i - 1]

        s, rp, keys = ChainState.initial(JDM_C), Replay(), []
        for _ in range(300):
            s = step(s, rp)
            keys.append(s.key)
        assert keys == blk

    def test_init_must_be_balanced(self):
        from jdmchain.enumeration import brute_force_realizations

        balanced = set(brute_force_realizations(MIXED, True))
        unbalanced = [G for G in brute_force_realizations(MIXED) if G not in balanced]
        assert len(unbalanced) == 2
        with pytest.raises(JdmMismatch):
            Sampler(MIXED, 0, init=unbalanced[0])

    def test_not_graphical(self):
        with pytest.raises(NotGraphical):
            Sampler(JointDegreeMatrix.from_lists([1, 2], [[0, 3], [3, 0]]), 0)
