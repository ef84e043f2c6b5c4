"""Explicit unsatisfiable (k,s)-CNF families and the bounds table.

Two constructions are provided. The block construction (lemma1_build) glues
u = floor(k/l) almost-complete blocks to a complete remainder; it is simple
and width-uniform at k but its occurrence bound is far from optimal. The
staged construction (lemma2_build) iterates a substitution step l times,
ending in a (k, 2^(k-l+1))-CNF; it needs the parameter condition
l * 2^l <= log2(e) * (k - 2l).

Occurrence bounds here are exact integers (arbitrary precision); the only
floating point is in the parameter pickers, where the conservative tie rule
below keeps a borderline condition from silently flipping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import List, Optional, Tuple

from .formula import (
    Formula,
    VarAllocator,
    almost_complete_formula,
    complete_formula,
    occurrence_census,
    product,
    rename,
    width_partition,
)

LOG2E = math.log2(math.e)

# Exponent in the best known upper bound O(2^k / k^alpha), alpha = log_3(4) - 1.
# Kept symbolic (a constant to report); nothing here evaluates the bound.
SAVICKY_EXPONENT_NUM_LOG = (math.log(4), math.log(3))
SAVICKY_EXPONENT = math.log(4) / math.log(3) - 1

DEFAULT_CLAUSE_CAP = 2 ** 22

REL_TIE = 1e-9


class ConstructionSizeError(ValueError):
    """Materializing would exceed the clause cap."""


def _holds(lhs: float, rhs: float) -> bool:
    """Conservative 'lhs <= rhs': near-ties (rel 1e-9) count as failing."""
    if math.isclose(lhs, rhs, rel_tol=REL_TIE):
        return False
    return lhs <= rhs


@dataclass(frozen=True)
class ConstructionStats:
    """Exact counts for one constructed formula (or one stage of one)."""

    k: int
    l: int
    n: int
    m: int
    max_occurrence: int
    incomplete_size: int


# ---------------------------------------------------------------------------
# block construction


def lemma1_params(k: int, l: int) -> Tuple[int, int]:
    """(u, v) with u = floor(k/l) blocks and v = k - l*u leftover variables."""
    if not 1 <= l <= k:
        raise ValueError(f"need 1 <= l <= k, got l={l}, k={k}")
    u = k // l
    return u, k - l * u


def lemma1_stats(k: int, l: int) -> ConstructionStats:
    """Closed-form counts; no formula is materialized."""
    u, v = lemma1_params(k, l)
    core = 2 ** v * (2 ** l - 1) ** u      # clauses gluing all blocks
    per_block = 2 ** (k - l)               # clauses per block trigger
    return ConstructionStats(
        k=k,
        l=l,
        n=k + u * (k - l),
        m=core + u * per_block,
        max_occurrence=core + per_block,
        incomplete_size=0,
    )


def lemma1_build(k: int, l: int,
                 cap: int = DEFAULT_CLAUSE_CAP) -> Tuple[Formula, ConstructionStats]:
    """Materialize the block construction.

    Variable layout (ids ascending): the v leftover variables, then the u
    x-blocks of size l, then the u y-blocks of size k-l. The result is a
    width-uniform unsatisfiable k-CNF whose census matches lemma1_stats
    exactly (asserted here).
    """
    stats = lemma1_stats(k, l)
    if stats.m > cap:
        raise ConstructionSizeError(
            f"k={k}, l={l} needs {stats.m} clauses (cap {cap})")
    u, v = lemma1_params(k, l)
    alloc = VarAllocator()
    z_block = alloc.fresh_block(v)
    x_blocks = [alloc.fresh_block(l) for _ in range(u)]
    y_blocks = [alloc.fresh_block(k - l) for _ in range(u)]

    core = complete_formula(z_block)
    for xb in x_blocks:
        core = product(core, almost_complete_formula(xb))
    parts = [core]
    for xb, yb in zip(x_blocks, y_blocks):
        trigger = Formula([list(xb)])  # the all-positive clause on the block
        parts.append(product(complete_formula(yb), trigger))
    formula = Formula(c for part in parts for c in part.clauses)

    census = occurrence_census(formula, k)
    assert len(formula) == stats.m, "clause collision in block construction"
    assert len(formula.vars) == stats.n
    assert census.max_occurrence == stats.max_occurrence
    assert formula.is_width_uniform(k)
    return formula, stats


# ---------------------------------------------------------------------------
# staged construction


def lemma2_condition(k: int, l: int) -> bool:
    """Parameter condition l * 2^l <= log2(e) * (k - 2l), conservatively."""
    if l < 0 or k < 1:
        return False
    if l == 0:
        return True
    return _holds(l * 2 ** l, LOG2E * (k - 2 * l))


def lemma2_occurrence_bound(k: int, l: int) -> int:
    """The cap s = 2^(k-l+1) every stage must respect."""
    return 2 ** (k - l + 1)


def lemma2_stage_stats(k: int, l: int) -> List[ConstructionStats]:
    """Closed-form per-stage counts for stages j = 0..l."""
    if not lemma2_condition(k, l):
        raise ValueError(f"parameter condition fails for k={k}, l={l}")
    base_width = k - l
    stats = [ConstructionStats(
        k=k, l=l,
        n=base_width,
        m=2 ** base_width,
        max_occurrence=2 ** base_width if base_width > 0 else 1,
        incomplete_size=2 ** base_width if l > 0 else 0,
    )]
    for j in range(1, l + 1):
        prev = stats[-1]
        kj = k - l + j
        dj = l - j + 1
        uj = kj // dj
        vj = kj - uj * dj
        core = 2 ** vj * (2 ** dj - 1) ** uj
        stats.append(ConstructionStats(
            k=k, l=l,
            n=kj + uj * prev.n,
            m=core + uj * prev.m,
            max_occurrence=max(prev.max_occurrence, core + prev.incomplete_size),
            incomplete_size=core if j < l else 0,
        ))
    return stats


def lemma2_build(k: int, l: int,
                 cap: int = DEFAULT_CLAUSE_CAP) -> List[Tuple[Formula, ConstructionStats]]:
    """Materialize all stages of the staged construction.

    Stage 0 is the complete formula on k-l variables; stage j substitutes
    u_j guarded copies of stage j-1 (fresh x-block per copy) into a core
    K(z) x prod K^-(x-blocks). Each stage is checked against the closed
    form and against the occurrence cap 2^(k-l+1).

    Per-stage variable layout: z-block, then the u_j x-blocks, then the
    u_j renamed copies of the previous stage's variables (sorted old id ->
    new id within each copy). Unsatisfiability of every stage is a solver
    fact, not re-proved here; see the tests and `kcnf verify --solve`.
    """
    expected = lemma2_stage_stats(k, l)
    if any(st.m > cap for st in expected):
        worst = max(st.m for st in expected)
        raise ConstructionSizeError(
            f"k={k}, l={l} needs {worst} clauses in one stage (cap {cap})")
    s_bound = lemma2_occurrence_bound(k, l)

    stages: List[Tuple[Formula, ConstructionStats]] = []
    current = complete_formula(range(1, k - l + 1))
    stages.append((current, expected[0]))
    for j in range(1, l + 1):
        kj = k - l + j
        dj = l - j + 1
        uj = kj // dj
        vj = kj - uj * dj
        prev = stages[-1][0]
        prev_split = width_partition(prev, k)

        alloc = VarAllocator()
        z_block = alloc.fresh_block(vj)
        x_blocks = [alloc.fresh_block(dj) for _ in range(uj)]
        core = complete_formula(z_block)
        for xb in x_blocks:
            core = product(core, almost_complete_formula(xb))
        parts = [core]
        for xb in x_blocks:
            mapping = {v: alloc.fresh() for v in sorted(prev.vars)}
            inc = rename(prev_split.incomplete, mapping)
            comp = rename(prev_split.complete, mapping)
            guarded = product(inc, Formula([list(xb)]))
            parts.append(guarded.union(comp))
        formula = Formula(c for part in parts for c in part.clauses)

        st = expected[j]
        census = occurrence_census(formula, k)
        assert len(formula) == st.m, "clause collision in staged construction"
        assert len(formula.vars) == st.n
        assert census.max_occurrence == st.max_occurrence
        assert census.max_occurrence <= s_bound
        inc_part = width_partition(formula, k).incomplete
        assert len(inc_part) == st.incomplete_size
        assert inc_part.is_width_uniform(kj) or not inc_part.clauses
        stages.append((formula, st))
    return stages


# ---------------------------------------------------------------------------
# parameter pickers


def recommended_l(k: int, scheme: str) -> int:
    """Largest l whose picker inequality holds (ties fail, see module doc).

    scheme 'lemma1': 2^l <= k * log2(e) / log2(k)^2, defined for k >= 4.
    scheme 'lemma2': 2^l <= log2(e) * k / (2 * log2(k)), defined for k >= 2.
    The reported l may be 0 even where a builder needs l >= 1; callers
    decide how to handle that (the CLI falls back to l=1 with a note).
    """
    if scheme == "lemma1":
        if k < 4:
            raise ValueError("the block-construction picker needs k >= 4")
        bound = k * LOG2E / math.log2(k) ** 2
    elif scheme == "lemma2":
        if k < 2:
            raise ValueError("the staged-construction picker needs k >= 2")
        bound = LOG2E * k / (2 * math.log2(k))
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    l = 0
    while _holds(float(2 ** (l + 1)), bound):
        l += 1
    if not _holds(float(2 ** l), bound):  # even l=0 can fail only by ties
        return 0
    return l


# ---------------------------------------------------------------------------
# lower bound and the bounds table


@lru_cache(maxsize=None)
def _e_bracket(terms: int) -> Tuple[Fraction, Fraction]:
    fact = math.factorial(terms)
    num = sum(fact // math.factorial(i) for i in range(terms + 1))
    lo = Fraction(num, fact)
    hi = lo + Fraction(2, fact * (terms + 1))
    return lo, hi


def lll_lower_bound(k: int) -> int:
    """floor(2^k / (e k)), exact (e is bracketed until the floor is certain)."""
    if k < 1:
        raise ValueError("k must be positive")
    n = Fraction(2 ** k)
    terms = 32
    while True:
        e_lo, e_hi = _e_bracket(terms)
        lo = math.floor(n / (e_hi * k))
        hi = math.floor(n / (e_lo * k))
        if lo == hi:
            return lo
        terms *= 2


def norm_at_least_inv_e(value: int, k: int) -> bool:
    """Exact check of value * k / 2^k >= 1/e (no floating point)."""
    lhs = value * k
    rhs = 2 ** k
    terms = 32
    while True:
        e_lo, e_hi = _e_bracket(terms)
        if lhs * e_lo >= rhs:
            return True
        if lhs * e_hi < rhs:
            return False
        terms *= 2


@dataclass(frozen=True)
class BoundsRow:
    k: int
    lll_lower: int
    lemma1_s: int
    lemma1_l: int
    lemma2_s: int
    lemma2_l: int
    line_a: float      # 1/e
    line_b: float      # 8 ln k
    line_d: float      # 0.5 log2 k + 0.23


def bounds_row(k: int) -> BoundsRow:
    """Best occurrence bounds both constructions give at this k, plus guides."""
    if k < 1:
        raise ValueError("k must be positive")
    best_s: Optional[int] = None
    best_l = 1
    for l in range(1, k + 1):
        s = lemma1_stats(k, l).max_occurrence
        if best_s is None or s < best_s:
            best_s, best_l = s, l
    l2 = max(l for l in range(0, k + 1) if lemma2_condition(k, l))
    return BoundsRow(
        k=k,
        lll_lower=lll_lower_bound(k),
        lemma1_s=best_s,
        lemma1_l=best_l,
        lemma2_s=lemma2_occurrence_bound(k, l2),
        lemma2_l=l2,
        line_a=1.0 / math.e,
        line_b=8.0 * math.log(k),
        line_d=0.5 * math.log2(k) + 0.23,
    )


def sig6(x: float) -> str:
    """Six significant digits, the one float format used in CSV output."""
    return f"{x:.6g}"


BOUNDS_CSV_HEADER = "k,lll_lower,lemma1_s,lemma1_l,lemma2_s,lemma2_l,line_a,line_b,line_d"


def bounds_csv_row(row: BoundsRow) -> str:
    return ",".join([
        str(row.k),
        str(row.lll_lower),
        str(row.lemma1_s),
        str(row.lemma1_l),
        str(row.lemma2_s),
        str(row.lemma2_l),
        sig6(row.line_a),
        sig6(row.line_b),
        sig6(row.line_d),
    ])
