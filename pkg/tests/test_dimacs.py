"""DIMACS golden strings, round trips and error handling."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kcnf.dimacs import DimacsError, read_dimacs, write_dimacs
from kcnf.formula import Formula, almost_complete_formula, complete_formula

GOLDEN_UNIT_PAIR = "p cnf 1 2\n1 0\n-1 0\n"
GOLDEN_EMPTY_CLAUSE = "p cnf 0 1\n0\n"


def test_write_golden_unit_pair():
    assert write_dimacs(Formula([[1], [-1]])) == GOLDEN_UNIT_PAIR


def test_write_golden_empty_clause():
    assert write_dimacs(Formula([[]])) == GOLDEN_EMPTY_CLAUSE


def test_write_empty_formula():
    assert write_dimacs(Formula([])) == "p cnf 0 0\n"


def test_positive_sorts_before_negative():
    # canonical clause order compares (var, polarity) with positive first
    text = write_dimacs(Formula([[-1, 2], [1, -2]]))
    assert text == "p cnf 2 2\n1 -2 0\n-1 2 0\n"


def test_renumber_map_in_comments():
    text = write_dimacs(Formula([[5, -9], [9]]))
    assert text.startswith("c map 5 -> 1\nc map 9 -> 2\n")
    assert read_dimacs(text) == Formula([[1, -2], [2]])


def test_round_trip_canonical_formulas():
    for f in (
        complete_formula([1, 2, 3]),
        almost_complete_formula([1, 2, 3, 4]),
        Formula([[]]),
        Formula([]),
        Formula([[1], [-1]]),
    ):
        assert read_dimacs(write_dimacs(f)) == f


def test_comments_before_and_after_header():
    text = "c leading\np cnf 2 1\nc inner\n1 -2 0\nc trailing\n"
    assert read_dimacs(text) == Formula([[1, -2]])


def test_clause_spanning_lines():
    assert read_dimacs("p cnf 3 1\n1 2\n3 0\n") == Formula([[1, 2, 3]])


def test_duplicate_literals_collapse():
    assert read_dimacs("p cnf 1 1\n1 1 0\n") == Formula([[1]])


def test_duplicate_clauses_collapse():
    assert len(read_dimacs("p cnf 1 2\n1 0\n1 0\n")) == 1


def test_read_errors():
    with pytest.raises(DimacsError):
        read_dimacs("1 0\n")  # clause before header
    with pytest.raises(DimacsError):
        read_dimacs("p cnf x 1\n1 0\n")
    with pytest.raises(DimacsError):
        read_dimacs("p dnf 1 1\n1 0\n")
    with pytest.raises(DimacsError):
        read_dimacs("p cnf 1 1\n2 0\n")  # index above declared count
    with pytest.raises(DimacsError):
        read_dimacs("p cnf 1 1\n1\n")  # unterminated clause
    with pytest.raises(DimacsError):
        read_dimacs("p cnf 1 1\n1 -1 0\n")  # tautology
    with pytest.raises(DimacsError):
        read_dimacs("p cnf 1 1\np cnf 1 1\n1 0\n")
    with pytest.raises(DimacsError):
        read_dimacs("")


clause_st = st.lists(
    st.integers(min_value=1, max_value=4), min_size=1, max_size=4, unique=True
).flatmap(
    lambda vs: st.tuples(*[st.sampled_from([v, -v]) for v in vs])
)
formula_st = st.lists(clause_st, min_size=0, max_size=6)


@settings(max_examples=200, deadline=None)
@given(formula_st)
def test_round_trip_idempotent(clauses):
    f = Formula(clauses)
    canonical = read_dimacs(write_dimacs(f))
    assert read_dimacs(write_dimacs(canonical)) == canonical
    assert len(canonical) == len(f)
