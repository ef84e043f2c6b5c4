import subprocess
import sys

import pytest

from kcnf.cli import run
from kcnf.constructions import bounds_csv_row, bounds_row
from kcnf.dimacs import read_dimacs, write_dimacs
from kcnf.formula import almost_complete_formula, complete_formula


def invoke(capsys, *argv):
    code = run(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestConstruct:
    def test_block_example(self, capsys, tmp_path):
        out = tmp_path / "l1.cnf"
        code, text, _ = invoke(capsys, "construct", "--method", "lemma1",
                               "--k", "3", "--l", "1", "--out", str(out))
        assert code == 0
        assert text.splitlines() == [
            "method=lemma1", "k=3", "l=1", "n=9", "m=13", "s=5", str(out)]
        formula = read_dimacs(out.read_text())
        assert len(formula) == 13 and len(formula.vars) == 9

    def test_block_verifies(self, capsys, tmp_path):
        out = tmp_path / "l1.cnf"
        invoke(capsys, "construct", "--method", "lemma1", "--k", "3",
               "--l", "1", "--out", str(out))
        code, text, _ = invoke(capsys, "verify", str(out), "--k", "3",
                               "--max-occ", "5", "--solve")
        assert code == 0
        assert "solver = UNSAT" in text

    def test_staged_build(self, capsys, tmp_path):
        out = tmp_path / "l2.cnf"
        code, text, _ = invoke(capsys, "construct", "--method", "lemma2",
                               "--k", "4", "--l", "1", "--out", str(out))
        assert code == 0
        assert "n=16" in text and "m=33" in text and "s=9" in text

    def test_default_l_clamps_with_note(self, capsys, tmp_path):
        out = tmp_path / "c.cnf"
        code, text, err = invoke(capsys, "construct", "--method", "lemma1",
                                 "--k", "8", "--out", str(out))
        assert code == 0
        assert "l=1" in text.splitlines()
        assert "note:" in err and "l = 1" in err

    def test_compact_suppresses_stats(self, capsys, tmp_path):
        plain = tmp_path / "a.cnf"
        compact = tmp_path / "b.cnf"
        invoke(capsys, "construct", "--method", "lemma1", "--k", "3",
               "--l", "1", "--out", str(plain))
        code, text, _ = invoke(capsys, "construct", "--method", "lemma1",
                               "--k", "3", "--l", "1", "--compact",
                               "--out", str(compact))
        assert code == 0
        assert text == str(compact) + "\n"
        assert compact.read_bytes() == plain.read_bytes()

    def test_stdout_target_is_one_dimacs_document(self, capsys):
        code, text, _ = invoke(capsys, "construct", "--method", "lemma1",
                               "--k", "3", "--l", "1", "--out", "-")
        assert code == 0
        assert text.startswith("c method=lemma1\n")
        formula = read_dimacs(text)
        assert len(formula) == 13

    def test_oversized_request_is_usage_error(self, capsys, tmp_path):
        code, _, err = invoke(capsys, "construct", "--method", "lemma1",
                              "--k", "48", "--l", "1",
                              "--out", str(tmp_path / "x.cnf"))
        assert code == 2
        assert "error:" in err


class TestVerify:
    def test_satisfiable_file_reports_witness(self, capsys, tmp_path):
        path = tmp_path / "sat.cnf"
        path.write_text(write_dimacs(almost_complete_formula([1, 2, 3])))
        code, text, _ = invoke(capsys, "verify", str(path), "--k", "3",
                               "--solve")
        assert code == 1
        assert "solver = SAT" in text
        assert "model = -1 -2 -3" in text

    def test_timeout_is_a_violation(self, capsys, tmp_path):
        path = tmp_path / "k6.cnf"
        path.write_text(write_dimacs(complete_formula(range(1, 7))))
        code, text, _ = invoke(capsys, "verify", str(path), "--k", "6",
                               "--solve", "--budget", "0")
        assert code == 1
        assert "solver = TIMEOUT" in text

    def test_occurrence_cap_violation(self, capsys, tmp_path):
        path = tmp_path / "k2.cnf"
        path.write_text(write_dimacs(complete_formula([1, 2])))
        code, text, _ = invoke(capsys, "verify", str(path), "--k", "2",
                               "--max-occ", "3")
        assert code == 1
        assert "occurrence_cap = 3 (exceeded)" in text

    def test_missing_file_is_usage_error(self, capsys, tmp_path):
        code, _, err = invoke(capsys, "verify", str(tmp_path / "no.cnf"),
                              "--k", "3")
        assert code == 2
        assert "error:" in err

    def test_malformed_dimacs_is_usage_error(self, capsys, tmp_path):
        path = tmp_path / "bad.cnf"
        path.write_text("p cnf not-a-number\n")
        code, _, err = invoke(capsys, "verify", str(path), "--k", "3")
        assert code == 2
        assert "error:" in err


class TestF2:
    def test_prints_bare_number(self, capsys):
        code, text, _ = invoke(capsys, "f2", "--k", "3")
        assert (code, text) == (0, "4\n")

    def test_emit_trace_round_trips(self, capsys, tmp_path):
        trace_path = tmp_path / "t.txt"
        code, text, _ = invoke(capsys, "f2", "--k", "4",
                               "--emit-trace", str(trace_path))
        assert (code, text) == (0, "8\n")
        out = tmp_path / "w.cnf"
        code, text, _ = invoke(capsys, "materialize", "--k", "4", "--s", "9",
                               "--trace", str(trace_path), "--out", str(out))
        assert code == 0
        code, _, _ = invoke(capsys, "verify", str(out), "--k", "4",
                            "--max-occ", "9", "--solve")
        assert code == 0

    def test_literal_mode_notes_on_stderr(self, capsys):
        code, text, err = invoke(capsys, "f2", "--k", "4", "--paper-literal")
        assert (code, text) == (0, "6\n")
        assert "comparison only" in err

    def test_bad_k_is_usage_error(self, capsys):
        code, _, err = invoke(capsys, "f2", "--k", "0")
        assert code == 2
        assert "error:" in err


class TestMaterialize:
    def test_witness_within_cap(self, capsys, tmp_path):
        out = tmp_path / "w3.cnf"
        code, text, _ = invoke(capsys, "materialize", "--k", "3", "--s", "5",
                               "--out", str(out))
        assert code == 0
        assert text.splitlines() == ["k=3", "s=5", "n=14", "m=20", str(out)]

    def test_infeasible_cap_is_violation(self, capsys, tmp_path):
        code, _, err = invoke(capsys, "materialize", "--k", "4", "--s", "8",
                              "--out", str(tmp_path / "x.cnf"))
        assert code == 1
        assert "f2 = 8" in err

    def test_hand_written_chain_trace(self, capsys, tmp_path):
        trace_path = tmp_path / "chain.txt"
        trace_path.write_text("0 AXIOM\n1 SPLIT 0\n2 SPLIT 1\nFINAL 2\n")
        out = tmp_path / "k2.cnf"
        code, _, _ = invoke(capsys, "materialize", "--k", "2", "--s", "4",
                            "--trace", str(trace_path), "--out", str(out))
        assert code == 0
        code, _, _ = invoke(capsys, "verify", str(out), "--k", "2",
                            "--max-occ", "4", "--solve")
        assert code == 0

    def test_literal_trace_overflowing_cap_is_violation(self, capsys, tmp_path):
        trace_path = tmp_path / "lit.txt"
        invoke(capsys, "f2", "--k", "4", "--paper-literal",
               "--emit-trace", str(trace_path))
        code, _, err = invoke(capsys, "materialize", "--k", "4", "--s", "7",
                              "--trace", str(trace_path), "--out",
                              str(tmp_path / "x.cnf"))
        assert code == 1
        assert "error:" in err

    def test_malformed_trace_is_usage_error(self, capsys, tmp_path):
        trace_path = tmp_path / "bad.txt"
        trace_path.write_text("0 FROB\nFINAL 0\n")
        code, _, err = invoke(capsys, "materialize", "--k", "2", "--s", "4",
                              "--trace", str(trace_path), "--out", "-")
        assert code == 2
        assert "error:" in err


class TestTables:
    def test_f2_table_contents(self, capsys, tmp_path):
        out = tmp_path / "f2.csv"
        code, text, _ = invoke(capsys, "f2-table", "--k-from", "1",
                               "--k-to", "6", "--out", str(out))
        assert code == 0
        assert text == str(out) + "\n"
        lines = out.read_text().splitlines()
        assert lines[0] == "k,f2,f2_norm,line_a,line_b,line_d"
        assert lines[3] == "3,4,1.5,0.367879,8.7889,1.02248"
        assert len(lines) == 7

    def test_f2_table_jobs_do_not_change_bytes(self, capsys, tmp_path):
        serial = tmp_path / "a.csv"
        parallel = tmp_path / "b.csv"
        invoke(capsys, "f2-table", "--k-from", "1", "--k-to", "10",
               "--out", str(serial))
        invoke(capsys, "f2-table", "--k-from", "1", "--k-to", "10",
               "--out", str(parallel), "--jobs", "2")
        assert serial.read_bytes() == parallel.read_bytes()

    def test_bounds_table_contents(self, capsys, tmp_path):
        out = tmp_path / "bounds.csv"
        code, _, _ = invoke(capsys, "bounds", "--k-from", "3", "--k-to", "6",
                            "--out", str(out))
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == ("k,lll_lower,lemma1_s,lemma1_l,"
                            "lemma2_s,lemma2_l,line_a,line_b,line_d")
        assert lines[1] == bounds_csv_row(bounds_row(3))

    def test_bad_range_is_usage_error(self, capsys, tmp_path):
        code, _, err = invoke(capsys, "f2-table", "--k-from", "5",
                              "--k-to", "4", "--out", str(tmp_path / "x.csv"))
        assert code == 2
        code, _, err = invoke(capsys, "bounds", "--k-from", "0",
                              "--k-to", "4", "--out", str(tmp_path / "y.csv"))
        assert code == 2


class TestPlumbing:
    def test_unknown_subcommand(self, capsys):
        assert invoke(capsys, "frobnicate")[0] == 2

    def test_missing_required_flag(self, capsys):
        assert invoke(capsys, "f2")[0] == 2

    def test_help_exits_zero(self, capsys):
        assert invoke(capsys, "--help")[0] == 0

    def test_repeated_runs_are_byte_identical(self, capsys, tmp_path):
        pairs = []
        for name in ("a", "b"):
            cnf = tmp_path / f"{name}.cnf"
            trace = tmp_path / f"{name}.txt"
            csv = tmp_path / f"{name}.csv"
            invoke(capsys, "construct", "--method", "lemma2", "--k", "4",
                   "--l", "1", "--out", str(cnf))
            invoke(capsys, "f2", "--k", "5", "--emit-trace", str(trace))
            invoke(capsys, "f2-table", "--k-from", "1", "--k-to", "8",
                   "--out", str(csv))
            pairs.append((cnf.read_bytes(), trace.read_bytes(),
                          csv.read_bytes()))
        assert pairs[0] == pairs[1]

    def test_console_script_entry(self):
        proc = subprocess.run([sys.executable, "-m", "kcnf.cli"],
                              capture_output=True)
        assert proc.returncode == 2
        proc = subprocess.run(["kcnf", "f2", "--k", "3"],
                              capture_output=True)
        assert proc.returncode == 0 and proc.stdout == b"4\n"
