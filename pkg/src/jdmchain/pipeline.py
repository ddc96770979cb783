"""End-to-end analysis of one instance: enumerate, partition, check."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .chain import num_ordered_tuples
from .decompose import (
    average_flow_projection,
    chain_relaxation,
    max_cell_relaxation,
    partition_states,
    partition_summary,
    projection_chain,
    verify_swap_theorem,
)
from .enumeration import (
    BRUTE_FORCE_MAX_N,
    DEFAULT_BFS_CAP,
    brute_force_realizations,
    check_connectivity,
    enumerate_balanced,
)
from .jdm_core import JointDegreeMatrix, class_sizes, is_balanced, jdm_of
from .spectra import (
    EXACT_CAP,
    analyze,
    check_cheeger,
    check_flow_dominance,
    check_modified_cheeger,
    conductance_bounds,
    decomposition_bound,
    stationarity_defect,
)


def _num(x):
    if x is None:
        return None
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    return float(x)


def _frac(x):
    return None if x is None else f"{x.numerator}/{x.denominator}"


@dataclass
class InstanceResult:
    J: JointDegreeMatrix
    states: list
    analysis: object
    partition: object
    projection: object
    report: dict


def run_instance(
    J: JointDegreeMatrix,
    exact_cap: int = EXACT_CAP,
    bfs_cap: int = DEFAULT_BFS_CAP,
    full: bool = False,
) -> InstanceResult:
    """Analysis report; ``full`` adds the oracle, stationarity and swap checks."""
    n = class_sizes(J).total
    states = enumerate_balanced(J, cap=bfs_cap)
    a = analyze(states, exact_cap=exact_cap)
    part = partition_states(states)
    proj = projection_chain(part, n)
    r1 = max_cell_relaxation(part, a.T)
    r2 = chain_relaxation(proj)
    bound = decomposition_bound(r1, r2)
    relax = a.relaxation
    dominance = check_flow_dominance(a.T, part.cell_of, proj)
    report = {
        "state_count": len(states),
        "n": n,
        "lambda2": _num(a.lambda2),
        "relaxation": _num(relax),
        "phi": _frac(a.phi),
        "witness": list(a.witness) if a.witness is not None else None,
        "cheeger_ok": None,
        "modified_cheeger_ok": None,
        "flow_dominance_ok": dominance.holds,
        "decomposition_bound": _num(bound.value),
        "bound_ok": bool(relax <= bound.value),
        "r1": _num(r1),
        "r2": _num(r2),
        "r2_clamped": bound.clamped,
        "partition": partition_summary(part, proj),
    }
    if a.phi is not None or len(states) == 1:
        report["cheeger_ok"] = check_cheeger(a).holds
    else:
        cb = conductance_bounds(a)
        report["phi_bounds_heuristic"] = {"lower": cb.lower, "upper": _frac(cb.upper)}
    if len(states) <= exact_cap:
        report["modified_cheeger_ok"] = check_modified_cheeger(a, exact_cap=exact_cap).holds
    if full:
        swap = verify_swap_theorem(states, part, a.T)
        report["stationary_exact"] = bool(
            a.T.is_symmetric() and a.T.is_row_stochastic() and stationarity_defect(a.T) == 0
        )
        report["all_balanced"] = all(is_balanced(s.realization, J) and jdm_of(s.realization) == J for s in states)
        report["swap_theorem_ok"] = swap.holds
        report["swap_theorem"] = {
            "pairs_checked": swap.pairs_checked,
            "neighbor_checks": swap.neighbor_checks,
            "counterexamples": [list(map(str, c)) for c in swap.part_i_counterexamples + swap.part_ii_counterexamples],
        }
        report["flow_dominance"] = {"triples_checked": dominance.triples_checked, "min_surplus": _frac(dominance.min_surplus)}
        mr = average_flow_projection(part, a.T)
        report["average_flow_projection_relaxation"] = _num(chain_relaxation(mr))
        if n <= BRUTE_FORCE_MAX_N:
            conn = check_connectivity(states, brute_force_realizations(J, balanced_only=True))
            report["connectivity_ok"] = conn.equal
            report["oracle_count"] = conn.oracle_count
        else:
            report["connectivity_ok"] = None
        report["tuple_denominator"] = 2 * num_ordered_tuples(n)
    return InstanceResult(J, states, a, part, proj, report)


VERIFY_KEYS = (
    "cheeger_ok",
    "modified_cheeger_ok",
    "flow_dominance_ok",
    "bound_ok",
    "stationary_exact",
    "all_balanced",
    "swap_theorem_ok",
    "connectivity_ok",
)


def verification_passed(report: dict) -> bool:
    """Every check that ran came out true (skipped checks are ``None``)."""
    return all(report.get(k) is not False for k in VERIFY_KEYS)
