"""A two-rule calculus deriving unsatisfiable k-CNF under an occurrence cap.

A derivation state is an unsatisfiable formula F = F' u F'' where F'' is the
part already at width k and F' (never empty before the end) is width-uniform
at some w < k. The state is summarized by (w, |F'|); both rules below track
exactly how many clauses each fresh variable lands in, which is what makes
the occurrence cap s checkable per step:

  split    F -> F' x {{x},{!x}} u F''        needs s >= 2|F'|
  compose  F1 (at w1), F2 (at w2), w1 <= w2 < k:
           glue 2^d - 1 fresh copies of F1 (d = k - w2), one per clause of
           K^-(X) over a fresh d-block X, plus F2' x {{X}} u F2''.
                                             needs s >= (2^d - 1)|F1'| + |F2'|

Splitting is only sound under the cap when the split variables of F' do not
already occur elsewhere; the restricted mode enforces the structural
condition (every F'-variable in every F'-clause and in no F''-clause), which
holds exactly for the axiom and chains of splits. The literal mode performs
the textual operation regardless, which lets one exhibit the occurrence
overflow that motivates the restriction.

Derivations are recorded as traces, a line-oriented format small enough to
diff: numbered nodes AXIOM / SPLIT <child> / COMPOSE <left> <right> and a
FINAL line naming the result.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Set, Tuple

from .formula import (
    Formula,
    VarAllocator,
    almost_complete_formula,
    fresh_copy,
    occurrence_census,
    product,
    width_partition,
)

SPLIT_MODES = ("restricted", "literal")


class CalculusError(ValueError):
    """A rule application whose side conditions do not hold."""


@dataclass(frozen=True)
class DerivedFormula:
    """A formula together with its derivation-state summary at width k."""

    formula: Formula
    k: int
    width: int              # width of F', or k once F' is empty
    incomplete: Formula     # F'
    complete: Formula       # F''
    splittable: bool

    @property
    def size(self) -> int:
        """|F'|, the quantity the occurrence requirements are charged on."""
        return len(self.incomplete)

    @property
    def is_final(self) -> bool:
        return not self.incomplete.clauses


def as_derived(formula: Formula, k: int) -> DerivedFormula:
    """Classify a formula as a derivation state, recomputing everything.

    Raises if the sub-width part is not width-uniform; mixed widths never
    arise from the rules and have no (w, |F'|) summary.
    """
    if k < 1:
        raise CalculusError("k must be positive")
    part = width_partition(formula, k)
    widths = {len(c) for c in part.incomplete.clauses}
    if len(widths) > 1:
        raise CalculusError(
            f"sub-width part has mixed widths {sorted(widths)}")
    width = widths.pop() if widths else k
    splittable = _splittable(part.incomplete, part.complete)
    return DerivedFormula(
        formula=formula,
        k=k,
        width=width,
        incomplete=part.incomplete,
        complete=part.complete,
        splittable=splittable,
    )


def _splittable(incomplete: Formula, complete: Formula) -> bool:
    if not incomplete.clauses:
        return True
    for v in incomplete.vars:
        if any(v not in {abs(l) for l in c} for c in incomplete.clauses):
            return False
    return not (incomplete.vars & complete.vars)


def axiom(k: int) -> DerivedFormula:
    """The starting state: just the empty clause."""
    return as_derived(Formula([[]]), k)


def _ensure_alloc(alloc: Optional[VarAllocator], *formulas: Formula) -> VarAllocator:
    if alloc is None:
        alloc = VarAllocator()
    for f in formulas:
        alloc.ensure_above(f.vars)
    return alloc


def split_requirement(df: DerivedFormula) -> int:
    return 2 * df.size


def split(df: DerivedFormula, s: int, mode: str = "restricted",
          alloc: Optional[VarAllocator] = None) -> DerivedFormula:
    """Apply the split rule with a fresh variable; see the module doc."""
    if mode not in SPLIT_MODES:
        raise CalculusError(f"unknown split mode {mode!r}")
    if df.is_final:
        raise CalculusError("cannot split a finished derivation")
    need = split_requirement(df)
    if need > s:
        raise CalculusError(f"split needs s >= {need}, have s = {s}")
    if mode == "restricted" and not df.splittable:
        raise CalculusError(
            "restricted split: F' variables must fill F' and avoid F''")
    alloc = _ensure_alloc(alloc, df.formula)
    x = alloc.fresh()
    halves = [c | {x} for c in df.incomplete.clauses]
    halves += [c | {-x} for c in df.incomplete.clauses]
    return as_derived(Formula(halves).union(df.complete), df.k)


def compose_requirement(k: int, k1: int, k2: int, m1: int, m2: int) -> int:
    """Occurrence load the compose rule puts on each fresh block variable."""
    if not 0 <= k1 <= k2 < k:
        raise CalculusError(f"need 0 <= k1 <= k2 < k, got {k1}, {k2}, {k}")
    return (2 ** (k - k2) - 1) * m1 + m2


def compose(df1: DerivedFormula, df2: DerivedFormula, s: int,
            alloc: Optional[VarAllocator] = None) -> DerivedFormula:
    """Apply the compose rule; operands must be variable-disjoint.

    One copy of df1 per clause of K^- over the fresh block (the first reuses
    df1's own variables). Every fresh block variable ends up in exactly
    (2^d - 1)|F1'| + |F2'| clauses, which must be within s.
    """
    df1, df2 = _check_compose_operands(df1, df2)
    k = df1.k
    need = compose_requirement(k, df1.width, df2.width, df1.size, df2.size)
    if need > s:
        raise CalculusError(f"compose needs s >= {need}, have s = {s}")
    alloc = _ensure_alloc(alloc, df1.formula, df2.formula)
    d = k - df2.width
    block = alloc.fresh_block(d)

    parts: List[Formula] = []
    first = True
    for guard in almost_complete_formula(block).canonical_clauses():
        if first:
            copy = df1
            first = False
        else:
            copy = as_derived(fresh_copy(df1.formula, alloc), k)
        parts.append(product(copy.incomplete, Formula([guard])))
        parts.append(copy.complete)
    parts.append(product(df2.incomplete, Formula([list(block)])))
    parts.append(df2.complete)
    result = Formula(c for part in parts for c in part.clauses)
    return as_derived(result, k)


def compose_compact(df1: DerivedFormula, df2: DerivedFormula, s: int,
                    alloc: Optional[VarAllocator] = None) -> DerivedFormula:
    """Compose without duplicating df1: F1' x K^-(X) u F1'' u F2' x {{X}} u F2''.

    Same clause counts and fresh-block occurrences as compose, far fewer
    variables, but df1's own variables multiply: a variable occurring a
    times in F1' and b in F1'' ends up with (2^d - 1)a + b occurrences.
    That is checked after the fact by a census; exceeding s raises.
    """
    df1, df2 = _check_compose_operands(df1, df2)
    k = df1.k
    need = compose_requirement(k, df1.width, df2.width, df1.size, df2.size)
    if need > s:
        raise CalculusError(f"compose needs s >= {need}, have s = {s}")
    alloc = _ensure_alloc(alloc, df1.formula, df2.formula)
    block = alloc.fresh_block(k - df2.width)
    parts = [
        product(df1.incomplete, almost_complete_formula(block)),
        df1.complete,
        product(df2.incomplete, Formula([list(block)])),
        df2.complete,
    ]
    result = Formula(c for part in parts for c in part.clauses)
    census = occurrence_census(result, k)
    if census.max_occurrence > s:
        raise CalculusError(
            f"compact compose drives an operand variable to "
            f"{census.max_occurrence} occurrences, cap is {s}")
    return as_derived(result, k)


def _check_compose_operands(df1: DerivedFormula,
                            df2: DerivedFormula) -> Tuple[DerivedFormula, DerivedFormula]:
    if df1.k != df2.k:
        raise CalculusError(f"mixed k: {df1.k} vs {df2.k}")
    if df1.is_final or df2.is_final:
        raise CalculusError("cannot compose a finished derivation")
    if df1.width > df2.width:
        raise CalculusError(
            f"compose needs width(left) <= width(right), "
            f"got {df1.width} > {df2.width}")
    if df1.formula.vars & df2.formula.vars:
        raise CalculusError("compose operands share variables")
    return df1, df2


# ---------------------------------------------------------------------------
# traces

OP_AXIOM = "AXIOM"
OP_SPLIT = "SPLIT"
OP_COMPOSE = "COMPOSE"
_ARITY = {OP_AXIOM: 0, OP_SPLIT: 1, OP_COMPOSE: 2}


@dataclass(frozen=True)
class TraceNode:
    op: str
    args: Tuple[int, ...]


@dataclass(frozen=True)
class DerivTrace:
    nodes: Tuple[TraceNode, ...]
    final: int


def serialize_trace(trace: DerivTrace) -> str:
    lines = []
    for i, node in enumerate(trace.nodes):
        lines.append(" ".join([str(i), node.op, *map(str, node.args)]))
    lines.append(f"FINAL {trace.final}")
    return "\n".join(lines) + "\n"


def parse_trace(text: str) -> DerivTrace:
    """Inverse of serialize_trace; blank lines are ignored."""
    nodes: List[TraceNode] = []
    final: Optional[int] = None
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        tokens = line.split()
        if final is not None:
            raise CalculusError(f"line {ln}: content after FINAL")
        if tokens[0] == "FINAL":
            if len(tokens) != 2:
                raise CalculusError(f"line {ln}: FINAL takes one id")
            final = _parse_ref(tokens[1], len(nodes), ln)
            continue
        if len(tokens) < 2:
            raise CalculusError(f"line {ln}: expected '<id> <op> ...'")
        try:
            node_id = int(tokens[0])
        except ValueError:
            raise CalculusError(f"line {ln}: bad node id {tokens[0]!r}") from None
        if node_id != len(nodes):
            raise CalculusError(
                f"line {ln}: ids must be consecutive from 0, "
                f"expected {len(nodes)} got {node_id}")
        op = tokens[1]
        if op not in _ARITY:
            raise CalculusError(f"line {ln}: unknown operation {op!r}")
        args = tokens[2:]
        if len(args) != _ARITY[op]:
            raise CalculusError(
                f"line {ln}: {op} takes {_ARITY[op]} argument(s), got {len(args)}")
        refs = tuple(_parse_ref(a, node_id, ln) for a in args)
        nodes.append(TraceNode(op, refs))
    if final is None:
        raise CalculusError("missing FINAL line")
    if not nodes:
        raise CalculusError("empty trace")
    return DerivTrace(tuple(nodes), final)


def _parse_ref(token: str, bound: int, ln: int) -> int:
    try:
        ref = int(token)
    except ValueError:
        raise CalculusError(f"line {ln}: bad reference {token!r}") from None
    if not 0 <= ref < bound:
        raise CalculusError(
            f"line {ln}: reference {ref} must name an earlier node (< {bound})")
    return ref


@dataclass(frozen=True)
class NodeInfo:
    width: int
    size: int          # |F'| after the step; 0 once width reaches k
    requirement: int   # occurrence load this step puts on its fresh variables


@dataclass(frozen=True)
class TraceAnnotation:
    nodes: Tuple[NodeInfo, ...]
    required_s: int    # max requirement over nodes reachable from FINAL


def annotate_trace(trace: DerivTrace, k: int,
                   mode: str = "restricted") -> TraceAnnotation:
    """Recompute (width, |F'|) bottom-up and validate every side condition.

    This is pure arithmetic on the summaries; nothing is materialized, so
    annotating is cheap even when the sizes are astronomical. The final
    node must reach width k and every node must feed into it.
    """
    if mode not in SPLIT_MODES:
        raise CalculusError(f"unknown split mode {mode!r}")
    if k < 1:
        raise CalculusError("k must be positive")
    infos: List[NodeInfo] = []
    for i, node in enumerate(trace.nodes):
        if node.op == OP_AXIOM:
            infos.append(NodeInfo(width=0, size=1, requirement=0))
        elif node.op == OP_SPLIT:
            child = trace.nodes[node.args[0]]
            cw, cm = infos[node.args[0]].width, infos[node.args[0]].size
            if cw >= k:
                raise CalculusError(f"node {i}: splitting a finished node")
            if mode == "restricted" and child.op == OP_COMPOSE:
                raise CalculusError(
                    f"node {i}: restricted split of a composed node")
            w = cw + 1
            infos.append(NodeInfo(
                width=w,
                size=0 if w == k else 2 * cm,
                requirement=2 * cm,
            ))
        else:
            a1, a2 = node.args
            w1, m1 = infos[a1].width, infos[a1].size
            w2, m2 = infos[a2].width, infos[a2].size
            if w1 >= k or w2 >= k:
                raise CalculusError(f"node {i}: composing a finished node")
            if w1 > w2:
                raise CalculusError(
                    f"node {i}: compose needs width(left) <= width(right), "
                    f"got {w1} > {w2}")
            d = k - w2
            w = w1 + d
            infos.append(NodeInfo(
                width=w,
                size=0 if w == k else (2 ** d - 1) * m1,
                requirement=(2 ** d - 1) * m1 + m2,
            ))
    if infos[trace.final].width != k:
        raise CalculusError(
            f"final node has width {infos[trace.final].width}, expected {k}")

    reachable: Set[int] = set()
    stack = [trace.final]
    while stack:
        i = stack.pop()
        if i in reachable:
            continue
        reachable.add(i)
        stack.extend(trace.nodes[i].args)
    orphans = sorted(set(range(len(trace.nodes))) - reachable)
    if orphans:
        raise CalculusError(f"unreachable node(s): {orphans}")
    required = max(infos[i].requirement for i in reachable)
    return TraceAnnotation(tuple(infos), required)
