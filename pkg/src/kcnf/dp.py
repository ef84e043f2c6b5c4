"""Exact feasibility frontier of the calculus, witness traces, and tables.

For each clause width k there is a least cap T(k) at which the calculus can
derive an unsatisfiable formula whose variables all stay within T(k)
occurrences; below it nothing unsatisfiable is derivable. f2(k) = T(k) - 1
is the largest cap that is still out of reach.

Instead of re-running a reachability closure for every candidate cap s, the
search computes T(k) in a single fixpoint. A derivable intermediate is
summarized as a piece (w, m, r): sub-width w, |F'| = m, and r the largest
per-step occurrence requirement anywhere in its derivation. Rules act on
summaries:

  chain      (w, 2^w, 2^w) for every w < k (axiom has r = 0)
  compose    left (w1, m1, r1), right (w2, m2, r2), w1 <= w2 < k, d = k - w2:
             (w1 + d, (2^d - 1) m1, max(r1, r2, (2^d - 1) m1 + m2))
  finish     equal widths w1 = w2: requirement max(r1, r2, (2^d - 1) m1 + m2)

T(k) is the least finish requirement. Per width only Pareto-optimal (m, r)
pairs matter, and across widths a piece dominates any piece that is
narrower with no smaller size and requirement: a wider right partner means
a smaller multiplier, a wider left partner reaches further at equal cost,
and for a finish the wider piece needs one extra d=1 hop whose cost
(2^(k-w) - 2) m is below the narrow finish's (2^(k-w) - 1) m + m2. The
fixpoint therefore maintains one global dominance frontier. This is the
threshold dual of the fixed-cap closure (the piece set at cap s is exactly
the pieces with r <= s), which is how the small-k oracle cross-checks it.

The fixed-cap closure itself survives as oracle_f2: an exhaustive BFS over
(width, size, chain-flag) states for one s at a time, feasible only for
small k, sharing no code with the frontier fixpoint.
"""

from __future__ import annotations

import bisect
import heapq
import math
from dataclasses import dataclass
from decimal import Context, Decimal
from typing import Iterable, Iterator, List, Optional, Set, Tuple

from .calculus import (
    CalculusError,
    DerivTrace,
    OP_AXIOM,
    OP_COMPOSE,
    OP_SPLIT,
    TraceAnnotation,
    TraceNode,
    annotate_trace,
    as_derived,
    axiom,
    compose,
    split,
)
from .constructions import sig6
from .formula import Formula, VarAllocator, occurrence_census

DEFAULT_CLAUSE_CAP = 2 ** 22


class MaterializeError(ValueError):
    """A trace whose expansion would be wrong or too large to build."""


class _Piece:
    """Frontier entry; identity-hashed so provenance links stay cheap."""

    __slots__ = ("width", "size", "req", "how")

    def __init__(self, width: int, size: int, req: int, how: Tuple):
        self.width = width
        self.size = size
        self.req = req
        self.how = how          # ("axiom",) | ("chain",) | ("compose", a, b)
                                # | ("split", a) in literal mode

    def __repr__(self):
        return f"_Piece(w={self.width}, m={self.size}, r={self.req})"


@dataclass
class _Threshold:
    value: int                      # T(k)
    finish: Tuple                   # ("chain",) | ("pair", a, b) | ("split", a)


def _frontier_threshold(k: int, literal: bool = False) -> _Threshold:
    """Uniform-cost expansion of the piece space; returns T(k) exactly.

    A composite's requirement is at least either operand's, so expanding
    pieces in increasing requirement order is monotone: once every queued
    piece needs at least as much as the best finish found, that finish is
    optimal. Only pieces with requirement below T(k) are ever expanded.

    Heap entries are single ints, (key << 28) | seq, where key keeps the
    bit length and top 53 bits of the requirement. Key order refines to
    requirement order except within a key tie, where push order decides.
    A tie inversion is harmless: a pair of pieces is generated whenever
    the later of the two settles, so order inside a tie class only shifts
    when a candidate appears, never whether it appears. The loop ends only
    once the top key is past the key of best - 1, so a tie class is always
    drained before the answer is declared.

    Entry payloads live in a list indexed by seq, which doubles as the
    liveness test: a staircase displacement blanks the slot, and the stale
    heap int is skipped on pop or swept out wholesale when dead entries
    outnumber live ones. Provenance rides on the staircase.

    Candidates are also suppressed when a pending piece at the counterpart
    operand's width promises a strictly smaller requirement: that promise
    settles first and its expansion regenerates a candidate at least as
    good, so pushing now is pure churn. Bit lengths decide most of these
    checks before any big-integer multiply.
    """
    if k < 1:
        raise ValueError("k must be positive")
    pow2 = [1 << i for i in range(k + 1)]
    factor = [p - 1 for p in pow2]
    best = pow2[k]                      # the pure split chain
    best_how: Tuple = ("chain",)
    best_bits = k + 1

    def keyf(x: int) -> int:
        bl = x.bit_length()
        return (bl << 53) | (x >> (bl - 53) if bl > 53 else x << (53 - bl))

    best_key = keyf(best - 1)
    heap: List[int] = []
    live: List[Optional[Tuple[int, int, int]]] = []  # seq -> (width, size, req)
    live_n = 0
    # per width, the smallest settled size so far; pieces settle in req
    # order, so an earlier settle never loses on requirement and the
    # running minimum is the only piece a later pairing needs
    min_size: List[Optional[int]] = [None] * k
    min_bits: List[int] = [k + 2] * k   # bit_length of min_size, or sentinel
    min_piece: List[Optional[_Piece]] = [None] * k
    # settled (size, size bit length, width) sorted by size, so the
    # right-operand scan can stop as soon as the step cost clears the bound
    by_size: List[Tuple[int, int, int]] = []
    # per width, the pending-candidate Pareto staircase: sizes ascending,
    # requirements strictly descending; a candidate no better than a
    # pending or settled one never enters the heap. tail_bits mirrors the
    # bit length of the staircase tail req, the smallest pending req.
    pend_t: List[List[int]] = [[] for _ in range(k)]
    pend_r: List[List[int]] = [[] for _ in range(k)]
    pend_h: List[List[Tuple]] = [[] for _ in range(k)]
    pend_q: List[List[int]] = [[] for _ in range(k)]
    tail_bits: List[int] = [1 << 30] * k

    def push(width: int, size: int, req: int, how: Tuple) -> None:
        nonlocal live_n
        ts = pend_t[width]
        rs = pend_r[width]
        if rs and ts[-1] <= size and rs[-1] <= req:
            return
        i = bisect.bisect_left(ts, size)
        if i > 0 and rs[i - 1] <= req:
            return
        n = len(ts)
        if i < n and ts[i] == size and rs[i] <= req:
            return
        j = i
        while j < n and rs[j] >= req:
            j += 1
        qs = pend_q[width]
        for q in qs[i:j]:
            live[q] = None
        live_n -= j - i
        seq = len(live)
        if seq > 0x0FFFFFFF:
            raise RuntimeError("push sequence exceeded packing capacity")
        ts[i:j] = [size]
        rs[i:j] = [req]
        pend_h[width][i:j] = [how]
        qs[i:j] = [seq]
        if j == n:
            tail_bits[width] = req.bit_length()
        live.append((width, size, req))
        live_n += 1
        bl = req.bit_length()
        key = (bl << 53) | (req >> (bl - 53) if bl > 53 else req << (53 - bl))
        heapq.heappush(heap, (key << 28) | seq)

    push(0, 1, 0, ("axiom",))
    for w in range(1, k):
        push(w, pow2[w], pow2[w], ("chain",))

    while heap:
        if len(heap) > 2 * live_n + 4096:
            heap = [e for e in heap if live[e & 0x0FFFFFFF] is not None]
            heapq.heapify(heap)
            if not heap:
                break
        e = heap[0]
        if (e >> 28) > best_key:
            break
        heapq.heappop(heap)
        rec = live[e & 0x0FFFFFFF]
        if rec is None:
            continue                    # superseded while queued
        width, size, req = rec
        if req >= best or size + 1 >= best:
            # the staircase entry stays: as an improvement promise it only
            # ever suppressed candidates that are now past best anyway
            continue
        # a surviving pop is exactly the live staircase entry at its size
        ts = pend_t[width]
        i = bisect.bisect_left(ts, size)
        piece = _Piece(width, size, req, pend_h[width][i])
        ms = min_size[width]
        if ms is not None:
            by_size.pop(bisect.bisect_left(by_size, (ms, min_bits[width], width)))
        min_size[width] = size
        sbits = size.bit_length()
        min_bits[width] = sbits
        min_piece[width] = piece
        bisect.insort(by_size, (size, sbits, width))
        # pending entries at this width that lost to the settled size
        qs = pend_q[width]
        for q in qs[i:]:
            live[q] = None
        live_n -= len(qs) - i
        del ts[i:]
        del pend_r[width][i:]
        del pend_h[width][i:]
        del qs[i:]
        rs = pend_r[width]
        own_req = rs[-1] if rs else None
        opb = rs[-1].bit_length() if rs else 1 << 30
        tail_bits[width] = opb
        # as left operand: partner at width k - d (d = dfin pairs with the
        # piece's own width and finishes). factor[d] * size has d + sbits
        # or one less bits, so bit arithmetic rules out most d without
        # touching the big integers; the step cost grows with d, hence
        # the breaks. The partner staircase is the improvement promise.
        mp = min_piece
        mb = min_bits
        tb = tail_bits
        dfin = k - width
        lo = sbits - 1
        for d in range(1, dfin + 1):
            lo += 1
            if lo > best_bits:
                break
            partner = mp[k - d]
            if partner is None:
                continue
            if d != dfin:
                if lo > mb[width + d] or tb[k - d] < lo:
                    continue
            t = factor[d] * size
            if t + 1 >= best:
                break
            r = t + partner.size
            if r < req:
                r = req
            if d == dfin:
                if r < best:
                    best, best_how = r, ("pair", piece, partner)
                    best_bits = best.bit_length()
                    best_key = keyf(best - 1)
            elif r < best:
                tgt = width + d
                mt = min_size[tgt]
                if mt is None or t < mt:
                    pr = pend_r[k - d]
                    if not pr or pr[-1] >= r:
                        rs2 = pend_r[tgt]
                        if not rs2 or pend_t[tgt][-1] > t or rs2[-1] > r:
                            push(tgt, t, r, ("compose", piece, partner))
        # as right operand: settled sources at narrower widths, cheapest
        # size first so the scan can stop early; d is fixed here. The
        # settling piece is the partner side, the source's staircase the
        # other promise; tail reqs only shrink, so the hoisted bit length
        # stays a sound prefilter.
        fd = factor[dfin]
        for ss, sb1, w1 in by_size:
            lo = dfin + sb1 - 1
            if lo > best_bits:
                break
            if w1 >= width or lo > mb[w1 + dfin] or opb < lo:
                continue
            t = fd * ss
            if t + 1 >= best:
                break
            tgt = w1 + dfin
            mt = min_size[tgt]
            if mt is not None and mt <= t:
                continue
            r = t + size
            if r < req:
                r = req
            if r < best and (own_req is None or own_req >= r):
                rs2 = pend_r[tgt]
                if not rs2 or pend_t[tgt][-1] > t or rs2[-1] > r:
                    push(tgt, t, r, ("compose", mp[w1], piece))
        if literal:
            r = max(req, 2 * size)
            if width == k - 1:
                if r < best:
                    best, best_how = r, ("split", piece)
                    best_bits = best.bit_length()
                    best_key = keyf(best - 1)
            elif r < best and (own_req is None or own_req >= r):
                mt = min_size[width + 1]
                if mt is None or 2 * size < mt:
                    push(width + 1, 2 * size, r, ("split", piece))
    return _Threshold(best, best_how)


def f2_value(k: int, literal: bool = False) -> int:
    """Largest cap s at which the calculus cannot finish at width k."""
    return _frontier_threshold(k, literal).value - 1


# ---------------------------------------------------------------------------
# witness traces


def feasible(k: int, s: int, literal: bool = False) -> Optional[DerivTrace]:
    """A finishing trace whose every step fits within s, or None.

    The returned trace is the threshold witness, so it is the same for
    every s at or above the threshold (and annotates to required_s =
    f2(k) + 1), except that a generous s >= 2^k short-circuits to the
    plain split chain.
    """
    if k < 1:
        raise ValueError("k must be positive")
    if s < 1:
        raise ValueError("s must be positive")
    if s >= 2 ** k:
        return _chain_trace(k)
    th = _frontier_threshold(k, literal)
    if s < th.value:
        return None
    return _trace_from_threshold(th, k)


def _chain_trace(k: int) -> DerivTrace:
    nodes = [TraceNode(OP_AXIOM, ())]
    for i in range(k):
        nodes.append(TraceNode(OP_SPLIT, (i,)))
    return DerivTrace(tuple(nodes), k)


def _trace_from_threshold(th: _Threshold, k: int) -> DerivTrace:
    if th.finish == ("chain",):
        return _chain_trace(k)
    nodes: List[TraceNode] = []
    ids = {}

    def emit(root: _Piece) -> int:
        # iterative post-order; piece DAGs can be deeper than the default
        # recursion limit at large k
        stack: List[Tuple[_Piece, bool]] = [(root, False)]
        while stack:
            piece, ready = stack.pop()
            if id(piece) in ids:
                continue
            deps = [p for p in piece.how[1:]]
            if not ready:
                stack.append((piece, True))
                stack.extend((p, False) for p in reversed(deps))
                continue
            if piece.how[0] == "axiom":
                nodes.append(TraceNode(OP_AXIOM, ()))
            elif piece.how[0] == "chain":
                nodes.append(TraceNode(OP_AXIOM, ()))
                for _ in range(piece.width):
                    nodes.append(TraceNode(OP_SPLIT, (len(nodes) - 1,)))
            elif piece.how[0] == "split":
                nodes.append(TraceNode(OP_SPLIT, (ids[id(deps[0])],)))
            else:
                nodes.append(TraceNode(
                    OP_COMPOSE, (ids[id(deps[0])], ids[id(deps[1])])))
            ids[id(piece)] = len(nodes) - 1
        return ids[id(root)]

    if th.finish[0] == "pair":
        left = emit(th.finish[1])
        right = emit(th.finish[2])
        nodes.append(TraceNode(OP_COMPOSE, (left, right)))
    else:
        child = emit(th.finish[1])
        nodes.append(TraceNode(OP_SPLIT, (child,)))
    return DerivTrace(tuple(nodes), len(nodes) - 1)


# ---------------------------------------------------------------------------
# materialization


def trace_clause_counts(trace: DerivTrace, k: int,
                        ann: Optional[TraceAnnotation] = None) -> List[int]:
    """Total clause count each node expands to (per-reference copies)."""
    if ann is None:
        ann = annotate_trace(trace, k, mode="literal")
    totals: List[int] = []
    for i, node in enumerate(trace.nodes):
        if node.op == OP_AXIOM:
            totals.append(1)
        elif node.op == OP_SPLIT:
            child = node.args[0]
            totals.append(totals[child] + ann.nodes[child].size)
        else:
            a, b = node.args
            d = k - ann.nodes[b].width
            totals.append((2 ** d - 1) * totals[a] + totals[b])
    return totals


def materialize(trace: DerivTrace, k: int, s: int, mode: str = "restricted",
                cap: int = DEFAULT_CLAUSE_CAP) -> Formula:
    """Execute a trace into an actual formula, checking it against the plan.

    Every reference expands to its own fresh-variable copy, which is what
    the compose rule's occurrence accounting assumes. After each step the
    realized |F'| must equal the annotated size; at the end the formula
    must be width-uniform at k with no variable above s occurrences.
    """
    ann = annotate_trace(trace, k, mode=mode)
    if ann.required_s > s:
        raise MaterializeError(
            f"trace needs s >= {ann.required_s}, asked to build at s = {s}")
    totals = trace_clause_counts(trace, k, ann)
    final_total = totals[trace.final]
    if final_total > cap:
        raise MaterializeError(
            f"expansion would produce {final_total} clauses (cap {cap})")
    alloc = VarAllocator()

    def expand(i: int):
        node = trace.nodes[i]
        if node.op == OP_AXIOM:
            df = axiom(k)
        elif node.op == OP_SPLIT:
            df = split(expand(node.args[0]), s, mode=mode, alloc=alloc)
        else:
            left = expand(node.args[0])
            right = expand(node.args[1])
            df = compose(left, right, s, alloc=alloc)
        if df.size != ann.nodes[i].size:
            raise MaterializeError(
                f"node {i} realized |F'| = {df.size}, annotation says "
                f"{ann.nodes[i].size}")
        return df

    result = expand(trace.final)
    if not result.is_final:
        raise MaterializeError("trace did not finish at width k")
    if len(result.formula) != final_total:
        raise MaterializeError(
            f"expansion produced {len(result.formula)} clauses, expected "
            f"{final_total}")
    census = occurrence_census(result.formula, k)
    if census.max_occurrence > s:
        raise MaterializeError(
            f"materialized formula has a variable in {census.max_occurrence} "
            f"clauses, cap is {s}")
    return result.formula


# ---------------------------------------------------------------------------
# fixed-cap oracle (independent of the frontier fixpoint)


def _oracle_feasible(k: int, s: int, literal: bool) -> bool:
    """Exhaustive closure over (width, |F'|, chain-flag) states at cap s."""
    states: Set[Tuple[int, int, bool]] = {(0, 1, True)}
    while True:
        pool = sorted(states)
        added = False
        for (w1, m1, sp1) in pool:
            if (sp1 or literal) and 2 * m1 <= s:
                if w1 == k - 1:
                    return True
                st = (w1 + 1, 2 * m1, sp1)
                if st not in states:
                    states.add(st)
                    added = True
            for (w2, m2, _sp2) in pool:
                if w1 > w2 or w2 > k - 1:
                    continue
                d = k - w2
                t = (2 ** d - 1) * m1
                if t + m2 > s:
                    continue
                if w1 == w2:
                    return True
                st = (w1 + d, t, False)
                if st not in states:
                    states.add(st)
                    added = True
        if not added:
            return False


def oracle_f2(k: int, literal: bool = False) -> int:
    """f2 recomputed the slow way: raise s until the closure succeeds."""
    if k < 1:
        raise ValueError("k must be positive")
    s = 1
    while not _oracle_feasible(k, s, literal):
        s += 1
    return s - 1


# ---------------------------------------------------------------------------
# tables


@dataclass(frozen=True)
class F2Row:
    k: int
    f2: int
    f2_norm: str       # f2 * k / 2^k to six significant digits
    line_a: float      # 1/e
    line_b: float      # 8 ln k
    line_d: float      # 0.5 log2 k + 0.23


F2_CSV_HEADER = "k,f2,f2_norm,line_a,line_b,line_d"


def f2_norm_string(f2: int, k: int) -> str:
    """Six significant digits of f2 * k / 2^k without float overflow."""
    q = Context(prec=6).divide(Decimal(f2 * k), Decimal(2 ** k))
    return str(q)


def f2_row(k: int, literal: bool = False) -> F2Row:
    f2 = f2_value(k, literal)
    return F2Row(
        k=k,
        f2=f2,
        f2_norm=f2_norm_string(f2, k),
        line_a=1.0 / math.e,
        line_b=8.0 * math.log(k),
        line_d=0.5 * math.log2(k) + 0.23,
    )


def f2_csv_row(row: F2Row) -> str:
    return ",".join([
        str(row.k),
        str(row.f2),
        row.f2_norm,
        sig6(row.line_a),
        sig6(row.line_b),
        sig6(row.line_d),
    ])


def _f2_row_task(args: Tuple[int, bool]) -> F2Row:
    return f2_row(*args)


def f2_table(k_from: int, k_to: int, literal: bool = False,
             jobs: int = 1) -> Iterator[F2Row]:
    """Stream rows for k_from..k_to; jobs > 1 fans out across processes."""
    if k_from < 1 or k_to < k_from:
        raise ValueError("need 1 <= k_from <= k_to")
    ks = range(k_from, k_to + 1)
    if jobs <= 1:
        for k in ks:
            yield f2_row(k, literal)
        return
    import multiprocessing

    with multiprocessing.Pool(jobs) as pool:
        for row in pool.imap(_f2_row_task, [(k, literal) for k in ks]):
            yield row
