"""Satisfiability checking: a deterministic DPLL and brute-force enumeration.

The solver exists to certify unsatisfiability of constructed formulas, not
to compete on speed. Decisions follow a fixed order (most occurrences in
unsatisfied clauses, then ascending variable id, True first) so runs are
reproducible; a decision budget turns pathological inputs into TIMEOUT
instead of a hang.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

from .formula import Assignment, Formula, occurrence_census

SAT = "SAT"
UNSAT = "UNSAT"
TIMEOUT = "TIMEOUT"

DEFAULT_BUDGET = 10_000_000
ENUMERATION_CAP = 20

Model = FrozenSet[Tuple[int, bool]]


@dataclass
class SolveResult:
    status: str
    witness: Optional[Assignment]
    decisions: int
    propagations: int


def solve(f: Formula, budget: int = DEFAULT_BUDGET) -> SolveResult:
    """Conflict-driven clause learning with a deterministic branch order.

    Decisions pick the unassigned variable with the highest conflict
    activity, then the most unsatisfied clauses, then the smaller id,
    always trying True first. Occurrence counts alone are not enough on
    composed instances: every compose drags the finished parts of its
    dead copies along as satisfiable side clauses, and a plain DPLL
    wanders them for exponential stretches. First-UIP learning with
    backjumping makes each conflict prune that wandering for good. The
    witness for SAT is a total assignment over f.vars, with any
    unconstrained variable set True. budget caps the number of decisions;
    exceeding it yields TIMEOUT, never a wrong SAT/UNSAT answer.
    """
    if not f.clauses:
        return SolveResult(SAT, {}, 0, 0)
    if frozenset() in f.clauses:
        return SolveResult(UNSAT, None, 0, 0)

    variables = sorted(f.vars)
    clauses: List[List[int]] = [list(c) for c in f.clauses]
    occ_pos: Dict[int, List[int]] = {v: [] for v in variables}
    occ_neg: Dict[int, List[int]] = {v: [] for v in variables}
    for ci, lits in enumerate(clauses):
        for lit in lits:
            (occ_pos if lit > 0 else occ_neg)[abs(lit)].append(ci)

    unassigned = [len(lits) for lits in clauses]
    true_count = [0] * len(clauses)
    assign: Dict[int, bool] = {}
    level: Dict[int, int] = {}
    reason: Dict[int, Optional[int]] = {}
    trail: List[int] = []
    trail_lim: List[int] = []   # trail length at each decision
    activity: Dict[int, float] = {v: 0.0 for v in variables}
    act_inc = 1.0
    n_decisions = 0
    n_propagations = 0

    def set_var(v: int, val: bool, why: Optional[int]) -> Optional[int]:
        """Assign and update counters; return a conflicting clause or None."""
        assign[v] = val
        level[v] = len(trail_lim)
        reason[v] = why
        trail.append(v)
        conflict = None
        for ci in occ_pos[v]:
            unassigned[ci] -= 1
            if val:
                true_count[ci] += 1
            elif true_count[ci] == 0 and unassigned[ci] == 0:
                conflict = ci
        for ci in occ_neg[v]:
            unassigned[ci] -= 1
            if not val:
                true_count[ci] += 1
            elif true_count[ci] == 0 and unassigned[ci] == 0:
                conflict = ci
        return conflict

    def backjump(to_level: int) -> None:
        mark = trail_lim[to_level]
        del trail_lim[to_level:]
        while len(trail) > mark:
            v = trail.pop()
            val = assign.pop(v)
            del level[v], reason[v]
            for ci in occ_pos[v]:
                unassigned[ci] += 1
                if val:
                    true_count[ci] -= 1
            for ci in occ_neg[v]:
                unassigned[ci] += 1
                if not val:
                    true_count[ci] -= 1

    def propagate(v: int, val: bool, why: Optional[int]) -> Optional[int]:
        """Assign v=val, run unit propagation; return a conflict clause id."""
        nonlocal n_propagations
        queue = [(v, val, why)]
        while queue:
            var, value, why_ci = queue.pop()
            # a queued unit is stale once its clause picked up a true literal
            if why_ci is not None and true_count[why_ci] > 0:
                continue
            if var in assign:
                if assign[var] != value:
                    return why_ci   # why_ci is now falsified in full
                continue
            if why_ci is not None:
                n_propagations += 1
            conflict = set_var(var, value, why_ci)
            if conflict is not None:
                return conflict
            # scan clauses touched by the falsified literal for new units
            for ci in (occ_neg[var] if value else occ_pos[var]):
                if true_count[ci] == 0 and unassigned[ci] == 1:
                    for lit in clauses[ci]:
                        if abs(lit) not in assign:
                            queue.append((abs(lit), lit > 0, ci))
                            break
        return None

    def bump(v: int) -> None:
        nonlocal act_inc
        activity[v] += act_inc
        if activity[v] > 1e100:
            for u in variables:
                activity[u] *= 1e-100
            act_inc *= 1e-100

    def analyze(conflict_ci: int) -> Tuple[List[int], int, int, bool]:
        """First-UIP cut: learned clause, backjump level, asserted var/value."""
        cur = len(trail_lim)
        seen: Set[int] = set()
        lower: List[int] = []   # learned literals from levels below cur
        pending = 0             # current-level vars still to resolve away
        lits = clauses[conflict_ci]
        skip = 0                # var resolved on, excluded from its reason
        idx = len(trail) - 1
        while True:
            for lit in lits:
                v = abs(lit)
                if v == skip or v in seen or level[v] == 0:
                    continue
                seen.add(v)
                bump(v)
                if level[v] == cur:
                    pending += 1
                else:
                    lower.append(lit)
            while trail[idx] not in seen:
                idx -= 1
            uip = trail[idx]
            idx -= 1
            pending -= 1
            if pending == 0:
                break
            lits = clauses[reason[uip]]
            skip = uip
        val = assign[uip]
        learned = [-uip if val else uip] + lower
        back = max((level[abs(lit)] for lit in lower), default=0)
        return learned, back, uip, not val

    def add_clause(lits: List[int]) -> int:
        ci = len(clauses)
        clauses.append(lits)
        n_true = 0
        n_open = 0
        for lit in lits:
            v = abs(lit)
            (occ_pos if lit > 0 else occ_neg)[v].append(ci)
            if v not in assign:
                n_open += 1
            elif assign[v] == (lit > 0):
                n_true += 1
        unassigned.append(n_open)
        true_count.append(n_true)
        return ci

    def next_decision() -> Optional[int]:
        best = None
        best_key = (-1.0, 0)
        for v in variables:
            if v in assign:
                continue
            count = sum(1 for ci in occ_pos[v] if true_count[ci] == 0)
            count += sum(1 for ci in occ_neg[v] if true_count[ci] == 0)
            if count == 0:
                continue   # all its clauses satisfied; branching repeats work
            key = (activity[v], count)
            if best is None or key > best_key:
                best, best_key = v, key
        return best

    def resolve_conflict(conflict: Optional[int]) -> bool:
        """Learn and backjump until propagation settles; False means UNSAT."""
        nonlocal act_inc
        while conflict is not None:
            if not trail_lim:
                return False
            learned, back, var, val = analyze(conflict)
            backjump(back)
            act_inc /= 0.95
            conflict = propagate(var, val, add_clause(learned))
        return True

    # top-level units before any decision
    for ci, lits in enumerate(clauses):
        if len(lits) == 1 and abs(lits[0]) not in assign:
            if propagate(abs(lits[0]), lits[0] > 0, ci) is not None:
                return SolveResult(UNSAT, None, 0, n_propagations)

    while True:
        v = next_decision()
        if v is None:
            # every clause satisfied; conflicts fire during propagation, so
            # no unsatisfied clause can be fully assigned here
            witness = {u: assign.get(u, True) for u in variables}
            return SolveResult(SAT, witness, n_decisions, n_propagations)
        if n_decisions >= budget:
            return SolveResult(TIMEOUT, None, n_decisions, n_propagations)
        n_decisions += 1
        trail_lim.append(len(trail))
        if not resolve_conflict(propagate(v, True, None)):
            return SolveResult(UNSAT, None, n_decisions, n_propagations)


def satisfies(f: Formula, assignment: Assignment) -> bool:
    """Does a total assignment satisfy every clause?"""
    for clause in f.clauses:
        ok = False
        for lit in clause:
            v = abs(lit)
            if v not in assignment:
                raise ValueError(f"assignment missing variable {v}")
            if assignment[v] == (lit > 0):
                ok = True
                break
        if not ok:
            return False
    return True


def enumerate_models(f: Formula, variables: Optional[Iterable[int]] = None) -> Set[Model]:
    """All models of f over the given variable set (default: f.vars).

    Intended for small checks only; refuses more than 20 variables.
    Passing a superset of f.vars lifts the models to that set, which is
    how the product law is checked on a joint variable set.
    """
    vs = sorted(set(variables)) if variables is not None else sorted(f.vars)
    if not set(f.vars) <= set(vs):
        raise ValueError("variable set must cover the formula")
    if len(vs) > ENUMERATION_CAP:
        raise ValueError(f"enumeration over {len(vs)} > {ENUMERATION_CAP} variables")
    models: Set[Model] = set()
    for bits in itertools.product((False, True), repeat=len(vs)):
        assignment = dict(zip(vs, bits))
        if satisfies(f, assignment):
            models.add(frozenset(assignment.items()))
    return models


@dataclass
class VerifyReport:
    """What verify_instance found; ok summarizes the checked properties."""

    n: int
    m: int
    k: int
    width_uniform: bool
    widths: Tuple[int, ...]
    max_occurrence: int
    occ_cap: Optional[int] = None
    occ_ok: Optional[bool] = None
    status: Optional[str] = None
    witness: Optional[Assignment] = None
    decisions: int = 0
    propagations: int = 0

    @property
    def ok(self) -> bool:
        if not self.width_uniform:
            return False
        if self.occ_ok is False:
            return False
        if self.status is not None and self.status != UNSAT:
            return False
        return True

    def lines(self) -> List[str]:
        out = [
            f"n = {self.n}",
            f"m = {self.m}",
            f"width_uniform_k{self.k} = {'yes' if self.width_uniform else 'no'}",
        ]
        if not self.width_uniform:
            out.append(f"widths = {','.join(map(str, self.widths))}")
        out.append(f"max_occurrence = {self.max_occurrence}")
        if self.occ_cap is not None:
            out.append(f"occurrence_cap = {self.occ_cap} "
                       f"({'ok' if self.occ_ok else 'exceeded'})")
        if self.status is not None:
            out.append(f"solver = {self.status}")
            if self.status == SAT and self.witness is not None:
                lits = [v if val else -v for v, val in sorted(self.witness.items())]
                out.append("model = " + " ".join(map(str, lits)))
        return out


def verify_instance(f: Formula, k: int, s: Optional[int] = None,
                    run_solver: bool = False,
                    budget: int = DEFAULT_BUDGET) -> VerifyReport:
    """Check width uniformity, occurrence cap and (optionally) run the solver."""
    widths = tuple(sorted(f.widths()))
    census = occurrence_census(f, max(widths, default=k))
    report = VerifyReport(
        n=len(f.vars),
        m=len(f),
        k=k,
        width_uniform=f.is_width_uniform(k),
        widths=widths,
        max_occurrence=census.max_occurrence,
    )
    if s is not None:
        report.occ_cap = s
        report.occ_ok = census.max_occurrence <= s
    if run_solver:
        res = solve(f, budget=budget)
        report.status = res.status
        report.witness = res.witness
        report.decisions = res.decisions
        report.propagations = res.propagations
    return report
