"""Core CNF machinery: clauses, formulas, products and occurrence counts.

Literals are nonzero ints (negative = negated variable), clauses are
frozensets of literals, and a Formula is an immutable set of clauses.
Everything downstream (constructions, the composition calculus, DIMACS I/O)
goes through this module, so the invariants are enforced here once:
no literal 0, no tautological clause, set semantics everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Tuple

Literal = int
Clause = FrozenSet[int]
Assignment = Dict[int, bool]


def make_clause(literals: Iterable[int]) -> Clause:
    """Build a clause, rejecting literal 0 and tautologies.

    Duplicate literals collapse silently (set semantics); a variable
    appearing in both polarities is an error, not a valid clause.
    """
    clause = frozenset(literals)
    if 0 in clause:
        raise ValueError("literal 0 is not allowed in a clause")
    for lit in clause:
        if -lit in clause and lit > 0:
            raise ValueError(f"tautological clause: contains both {lit} and {-lit}")
    return clause


def clause_sort_key(clause: Clause) -> Tuple[Tuple[int, int], ...]:
    """Canonical key: literals ordered by variable, positive before negative."""
    return tuple(sorted((abs(lit), 0 if lit > 0 else 1) for lit in clause))


class Formula:
    """An immutable CNF formula (a frozenset of clauses).

    Clause order is never significant; use canonical_clauses() when a
    deterministic order is needed for output.
    """

    __slots__ = ("clauses", "_vars")

    def __init__(self, clauses: Iterable[Iterable[int]]):
        self.clauses: FrozenSet[Clause] = frozenset(make_clause(c) for c in clauses)
        self._vars: Optional[FrozenSet[int]] = None

    @property
    def vars(self) -> FrozenSet[int]:
        if self._vars is None:
            seen = set()
            for clause in self.clauses:
                for lit in clause:
                    seen.add(abs(lit))
            self._vars = frozenset(seen)
        return self._vars

    def __len__(self) -> int:
        return len(self.clauses)

    def __iter__(self) -> Iterator[Clause]:
        return iter(self.clauses)

    def __contains__(self, clause) -> bool:
        return frozenset(clause) in self.clauses

    def __eq__(self, other) -> bool:
        return isinstance(other, Formula) and self.clauses == other.clauses

    def __hash__(self) -> int:
        return hash(self.clauses)

    def __repr__(self) -> str:
        return f"Formula({len(self.clauses)} clauses, {len(self.vars)} vars)"

    def canonical_clauses(self) -> List[Clause]:
        """Clauses in the canonical (lexicographic) order."""
        return sorted(self.clauses, key=clause_sort_key)

    def union(self, other: "Formula") -> "Formula":
        return Formula(self.clauses | other.clauses)

    def widths(self) -> FrozenSet[int]:
        return frozenset(len(c) for c in self.clauses)

    def is_width_uniform(self, k: int) -> bool:
        return all(len(c) == k for c in self.clauses)


EMPTY_FORMULA = Formula([])


def complete_formula(variables: Iterable[int]) -> Formula:
    """K(x1..xn): all 2^n clauses over the given variables.

    K() on no variables is {{}}, the formula holding just the empty clause.
    Unsatisfiable for every n, and every variable occurs 2^n times.
    """
    vs = sorted(set(variables))
    if any(v < 1 for v in vs):
        raise ValueError("variables must be positive ints")
    clauses: List[List[int]] = [[]]
    for v in vs:
        clauses = [c + [v] for c in clauses] + [c + [-v] for c in clauses]
    return Formula(clauses)


def almost_complete_formula(variables: Iterable[int]) -> Formula:
    """K^-(x1..xn): K minus the all-positive clause; unique model all-False."""
    vs = sorted(set(variables))
    if not vs:
        raise ValueError("K^- needs at least one variable")
    full = complete_formula(vs)
    return Formula(full.clauses - {frozenset(vs)})


def product(f1: Formula, f2: Formula) -> Formula:
    """All unions c1 | c2 of clauses from var-disjoint operands.

    Satisfied exactly by assignments satisfying f1 or f2, and
    |product| = |f1| * |f2| (disjointness keeps the unions distinct).
    """
    overlap = f1.vars & f2.vars
    if overlap:
        raise ValueError(f"product operands share variables: {sorted(overlap)}")
    result = Formula(c1 | c2 for c1 in f1.clauses for c2 in f2.clauses)
    # Disjointness makes collisions impossible; guard against regressions.
    assert len(result) == len(f1) * len(f2)
    return result


@dataclass(frozen=True)
class WidthPartition:
    """Split of a formula at width k: incomplete (< k) and complete (== k)."""

    k: int
    incomplete: Formula
    complete: Formula


def width_partition(f: Formula, k: int) -> WidthPartition:
    """Partition clauses into width < k and width == k; wider is an error."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    narrow, full = [], []
    for clause in f.clauses:
        if len(clause) < k:
            narrow.append(clause)
        elif len(clause) == k:
            full.append(clause)
        else:
            raise ValueError(f"clause of width {len(clause)} exceeds k={k}")
    return WidthPartition(k=k, incomplete=Formula(narrow), complete=Formula(full))


@dataclass(frozen=True)
class OccurrenceCensus:
    """Per-variable occurrence counts, split by the width-k partition."""

    total: Dict[int, int]
    incomplete: Dict[int, int]
    complete: Dict[int, int]
    max_occurrence: int


def occurrence_census(f: Formula, k: int) -> OccurrenceCensus:
    """Count clause memberships per variable (each clause counts once)."""
    part = width_partition(f, k)
    total: Dict[int, int] = {}
    incomplete: Dict[int, int] = {}
    complete: Dict[int, int] = {}
    for clause in part.incomplete.clauses:
        for lit in clause:
            v = abs(lit)
            incomplete[v] = incomplete.get(v, 0) + 1
            total[v] = total.get(v, 0) + 1
    for clause in part.complete.clauses:
        for lit in clause:
            v = abs(lit)
            complete[v] = complete.get(v, 0) + 1
            total[v] = total.get(v, 0) + 1
    return OccurrenceCensus(
        total=total,
        incomplete=incomplete,
        complete=complete,
        max_occurrence=max(total.values(), default=0),
    )


class VarAllocator:
    """Monotone source of fresh variable ids, scoped to one construction."""

    def __init__(self, start: int = 1):
        if start < 1:
            raise ValueError("variable ids start at 1")
        self._next = start

    @property
    def next_id(self) -> int:
        return self._next

    def fresh(self) -> int:
        v = self._next
        self._next += 1
        return v

    def fresh_block(self, n: int) -> List[int]:
        return [self.fresh() for _ in range(n)]

    def ensure_above(self, variables: Iterable[int]) -> None:
        """Bump the counter past the given ids (collision defence)."""
        top = max(variables, default=0)
        if top >= self._next:
            self._next = top + 1


def fresh_copy(f: Formula, alloc: VarAllocator) -> Formula:
    """Rename f onto fresh variables, sorted old id -> next allocator id."""
    alloc.ensure_above(f.vars)  # never map onto ids already used by f
    mapping = {v: alloc.fresh() for v in sorted(f.vars)}
    return rename(f, mapping)


def rename(f: Formula, mapping: Dict[int, int]) -> Formula:
    """Apply an injective variable renaming."""
    if len(set(mapping.values())) != len(mapping):
        raise ValueError("renaming is not injective")
    out = Formula(
        frozenset((1 if lit > 0 else -1) * mapping[abs(lit)] for lit in clause)
        for clause in f.clauses
    )
    if len(out) != len(f):
        raise ValueError("renaming collapsed clauses")
    return out
