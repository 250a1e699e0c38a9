import csv
import io
import json
import math
from pathlib import Path

import pytest

from qseq.cli import EXIT_DOMAIN, EXIT_FAILED, EXIT_NO_CONVERGENCE, EXIT_OK, format_number, main, parse_floats
from qseq.errors import DomainError

PROBLEMS = Path(__file__).resolve().parent.parent / "problems"


def run_json(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def run_csv(capsys, *argv):
    code = main(list(argv) + ["--format", "csv"])
    return code, list(csv.DictReader(io.StringIO(capsys.readouterr().out)))


class TestCheb:
    @pytest.mark.parametrize(
        "kind,order,x,expected",
        [("T", "1", "0.3", 0.3), ("U", "-1", "0.7", 0.0), ("T", "2", "2", 7.0), ("U", "2", "0.5", 0.0)],
    )
    def test_values(self, capsys, kind, order, x, expected):
        code, payload = run_json(capsys, "cheb", "--kind", kind, f"--order={order}", "--x", x)
        assert code == EXIT_OK
        assert payload["kind"] == kind and payload["order"] == int(order)
        assert payload["value"] == pytest.approx(expected, abs=1e-15)

    def test_bad_kind(self, capsys):
        code, _ = run_json(capsys, "cheb", "--kind", "V", "--order", "1", "--x", "0")
        assert code == EXIT_DOMAIN

    def test_missing_argument_is_usage_error(self, capsys):
        assert main(["cheb", "--x", "0.5"]) == 2
        assert main([]) == 2

    @pytest.mark.parametrize(
        "kind,order,x,expected",
        [("T", "64", "1e10", "inf"), ("U", "300", "30", "inf"), ("U", "1000", "2", "inf"), ("T", "1001", "-2", "-inf")],
    )
    def test_overflow_prints_infinity(self, capsys, kind, order, x, expected):
        code, payload = run_json(capsys, "cheb", "--kind", kind, "--order", order, "--x", x)
        assert code == EXIT_OK
        assert payload["value"] == expected
        code, rows = run_csv(capsys, "cheb", "--kind", kind, "--order", order, "--x", x)
        assert code == EXIT_OK
        assert {r["field"]: r["value"] for r in rows}["value"] == expected

    def test_overflowing_sequence_is_a_domain_error(self, capsys):
        # a U - b T at q = 30 turns into inf - inf long before order 300
        code = main(["affine", "--q", "30", "--a", "1", "--b", "-1", "--end", "300"])
        captured = capsys.readouterr()
        assert code == EXIT_DOMAIN
        assert captured.out == ""
        assert "error:" in captured.err


class TestSequenceCommands:
    def test_classify_constant(self, capsys):
        code, payload = run_json(capsys, "classify", "--seq", "2,2,2,2", "--q", "1")
        assert code == EXIT_OK
        assert payload["verdict"] == "QAffine"
        assert payload["ratios"] == [1.0, 1.0]

    def test_classify_hat(self, capsys):
        code, payload = run_json(capsys, "classify", "--seq", "0,1,2,1,0", "--q", "1")
        assert code == EXIT_OK
        assert payload["verdict"] == "QConcave"
        assert payload["ratios"] == [1.0, 0.5, 1.0]

    def test_classify_reads_file_and_stdin(self, capsys, tmp_path, monkeypatch):
        path = tmp_path / "hat.json"
        path.write_text(json.dumps({"start": 3, "values": [0, 1, 2, 1, 0]}), encoding="utf-8")
        code, payload = run_json(capsys, "classify", "--file", str(path), "--q", "1")
        assert (code, payload["verdict"]) == (EXIT_OK, "QConcave")

        monkeypatch.setattr("sys.stdin", io.StringIO("[1, 1, 1]"))
        code, payload = run_json(capsys, "classify", "--file", "-", "--q", "0.5")
        assert (code, payload["verdict"]) == (EXIT_OK, "QConvex")

    def test_classify_errors(self, capsys, tmp_path):
        assert run_json(capsys, "classify", "--q", "1")[0] == EXIT_DOMAIN
        assert run_json(capsys, "classify", "--seq", "1,x,2", "--q", "1")[0] == EXIT_DOMAIN
        assert run_json(capsys, "classify", "--seq", "1,2,1", "--q", "-1")[0] == EXIT_DOMAIN
        assert run_json(capsys, "classify", "--file", str(tmp_path / "missing.json"), "--q", "1")[0] == EXIT_DOMAIN
        bad = tmp_path / "bad.json"
        bad.write_text("{not json", encoding="utf-8")
        assert run_json(capsys, "classify", "--file", str(bad), "--q", "1")[0] == EXIT_DOMAIN

    def test_affine_output_classifies_as_affine(self, capsys, tmp_path):
        code, built = run_json(capsys, "affine", "--q", "0.5", "--a", "1", "--b", "2", "--end", "6", "--start", "-2")
        assert code == EXIT_OK and built["start"] == -2 and len(built["values"]) == 9
        path = tmp_path / "affine.json"
        path.write_text(json.dumps(built), encoding="utf-8")

        code, verdict = run_json(capsys, "classify", "--file", str(path), "--q", "0.5")
        assert (code, verdict["verdict"]) == (EXIT_OK, "QAffine")

        code, rep = run_json(capsys, "affine", "--file", str(path), "--q", "0.5")
        assert code == EXIT_OK
        assert rep["a"] == pytest.approx(1.0, abs=1e-9) and rep["b"] == pytest.approx(2.0, abs=1e-9)

    def test_affine_needs_coefficients(self, capsys):
        assert run_json(capsys, "affine", "--q", "0.5", "--a", "1")[0] == EXIT_DOMAIN

    def test_support_chord(self, capsys):
        code, payload = run_json(capsys, "support", "--seq", "0,1,2,3,4", "--q", "1", "--j", "1", "--k", "3")
        assert code == EXIT_OK
        assert payload["values"] == pytest.approx([0, 1, 2, 3, 4], abs=1e-12)
        assert (payload["j"], payload["k"]) == (1, 3)

    def test_support_chord_precondition(self, capsys):
        # q = 0.5 is not above cos(pi/4)
        code, _ = run_json(capsys, "support", "--seq", "0,1,2,1,0", "--q", "0.5", "--j", "0", "--k", "4")
        assert code == EXIT_DOMAIN

    def test_envelope(self, capsys):
        code, payload = run_json(capsys, "envelope", "--seq", "0,1,2,1,0")
        assert code == EXIT_OK
        assert payload["q"] == 1.0
        assert len(payload["members"]) == 4
        assert payload["reconstruction_error"] <= 1e-9

    def test_envelope_with_problem_file(self, capsys):
        code, payload = run_json(capsys, "envelope", "--file", str(PROBLEMS / "hat-sequence.json"), "--q", "1.2")
        assert code == EXIT_OK and payload["reconstruction_error"] <= 1e-9


class TestBounds:
    def test_arithmetic(self, capsys):
        code, payload = run_json(capsys, "bounds", "--r", "1", "--n", "0", "--m", "5")
        assert code == EXIT_OK
        assert (payload["value"], payload["exact"], payload["source"]) == (0.75, True, "ArithmeticExact")
        assert payload["mean"] == "arithmetic"

    def test_max_with_witness(self, capsys):
        code, payload = run_json(capsys, "bounds", "--r", "inf", "--m", "4", "--witness", "0.001")
        assert code == EXIT_OK
        assert payload["r"] == "inf"
        assert payload["value"] == pytest.approx(math.cos(math.pi / 4))
        assert payload["achieved"] == pytest.approx(payload["value"], abs=1e-12)
        assert payload["sharp"] is True

    def test_geometric_odd_witness(self, capsys):
        code, payload = run_json(capsys, "bounds", "--r", "G", "--n", "0", "--m", "5", "--witness", "0.001")
        assert code == EXIT_OK
        assert payload["value"] == 0.5
        assert payload["achieved"] == pytest.approx(0.5005, abs=1e-12)

    def test_power_lower_bound_is_not_sharp(self, capsys):
        code, payload = run_json(capsys, "bounds", "--r", "2", "--m", "6", "--witness", "0.001")
        assert code == EXIT_OK
        assert payload["source"] == "PowerLower" and payload["sharp"] is False
        assert payload["achieved"] >= payload["value"]

    def test_domain_errors(self, capsys):
        assert run_json(capsys, "bounds", "--r", "1", "--m", "1")[0] == EXIT_DOMAIN
        assert run_json(capsys, "bounds", "--r", "-1", "--m", "5")[0] == EXIT_DOMAIN
        assert run_json(capsys, "bounds", "--r", "nope", "--m", "5")[0] == EXIT_DOMAIN

    def test_csv_matches_json(self, capsys):
        _, payload = run_json(capsys, "bounds", "--r", "0.5", "--m", "7")
        code, rows = run_csv(capsys, "bounds", "--r", "0.5", "--m", "7")
        assert code == EXIT_OK
        fields = {row["field"]: row["value"] for row in rows}
        assert float(fields["value"]) == payload["value"]
        assert fields["exact"] == "false"
        assert fields["source"] == payload["source"]


class TestFixpoint:
    def test_single_component(self, capsys):
        code, payload = run_json(capsys, "fixpoint", "--gamma", "5")
        assert code == EXIT_OK
        assert payload["point"] == [5.0]
        assert payload["q"] == 0.0 and payload["q_star"] == 0.0

    def test_two_components(self, capsys):
        code, payload = run_json(capsys, "fixpoint", "--n", "2", "--gamma", "1", "--tol", "1e-12")
        assert code == EXIT_OK
        assert payload["point"] == pytest.approx([2.0, 2.0], abs=1e-11)

    def test_oracle_agrees(self, capsys):
        code, payload = run_json(capsys, "fixpoint", "--gamma", "0,-1", "--oracle")
        assert code == EXIT_OK
        assert len(payload["point"]) == 3
        assert payload["oracle_gap"] <= 1e-8

    def test_presets_and_files(self, capsys):
        for problem in ("triple", "arch-7", str(PROBLEMS / "wide-9.json"), '{"n": 2, "gamma": [1]}'):
            code, payload = run_json(capsys, "fixpoint", "--problem", problem)
            assert code == EXIT_OK, problem
            assert payload["residual"] <= 1e-8

    def test_constant_weights_are_rejected(self, capsys):
        code, payload = run_json(capsys, "fixpoint", "--n", "3", "--gamma", "0,-1", "--weights", "1,1,1")
        assert code == EXIT_DOMAIN
        assert payload["certificate"]["q"] == 1.0
        assert payload["certificate"]["is_contraction"] is False

    def test_iteration_cap(self, capsys):
        code, payload = run_json(capsys, "fixpoint", "--problem", str(PROBLEMS / "wide-9.json"), "--max-iter", "1")
        assert code == EXIT_NO_CONVERGENCE
        assert "error" in payload and len(payload["best"]["point"]) == 9

    def test_bad_problem(self, capsys):
        assert run_json(capsys, "fixpoint", "--problem", "{not json")[0] == EXIT_DOMAIN
        assert run_json(capsys, "fixpoint", "--n", "5", "--gamma", "1")[0] == EXIT_DOMAIN
        assert run_json(capsys, "fixpoint", "--problem", '{"n": 1, "gamma": [1], "colour": 3}')[0] == EXIT_DOMAIN
        assert main(["fixpoint", "--gamma", "1", "--method", "newton"]) == 2

    def test_policy_method_matches_iteration(self, capsys):
        wide = str(PROBLEMS / "wide-9.json")
        code, plain = run_json(capsys, "fixpoint", "--problem", wide, "--tol", "1e-10")
        assert code == EXIT_OK and plain["method"] == "iterate"
        code, policy = run_json(capsys, "fixpoint", "--problem", wide, "--tol", "1e-10", "--method", "policy")
        assert code == EXIT_OK and policy["method"] == "policy"
        assert policy["iterations"] < plain["iterations"]
        assert policy["point"] == pytest.approx(plain["point"], abs=1e-8)

    def test_csv_point(self, capsys):
        _, payload = run_json(capsys, "fixpoint", "--n", "2", "--gamma", "1")
        code, rows = run_csv(capsys, "fixpoint", "--n", "2", "--gamma", "1")
        assert code == EXIT_OK
        fields = {row["field"]: row["value"] for row in rows}
        assert [float(fields["point.0"]), float(fields["point.1"])] == payload["point"]


class TestVerify:
    def test_list(self, capsys):
        code, payload = run_json(capsys, "verify", "--list")
        assert code == EXIT_OK
        names = [row["name"] for row in payload["rows"]]
        assert "ChebyshevIdentities" in names and "FixedPointUniqueness" in names

    def test_selected_checks_pass(self, capsys):
        code, payload = run_json(capsys, "verify", "--only", "cosine-bound,arithmetic_witness", "--seed", "7")
        assert code == EXIT_OK
        assert payload["summary"]["all_passed"] and payload["summary"]["total"] == 2

    def test_csv_table(self, capsys):
        code, rows = run_csv(capsys, "verify", "--only", "CosineBound")
        assert code == EXIT_OK
        assert rows[0]["name"] == "CosineBound" and rows[0]["passed"] == "true"

    def test_unknown_check(self, capsys):
        assert run_json(capsys, "verify", "--only", "NoSuchCheck")[0] == EXIT_DOMAIN

    def test_failing_check_sets_exit_code(self, capsys, monkeypatch):
        from qseq.checks.mean_checks import CosineBound

        monkeypatch.setattr(CosineBound, "threshold", -1.0)
        code, payload = run_json(capsys, "verify", "--only", "CosineBound")
        assert code == EXIT_FAILED
        assert payload["summary"]["failed"] == 1


def test_format_number():
    assert format_number(0.1) == "0.10000000000000001"
    assert format_number(math.inf) == "inf" and format_number(-math.inf) == "-inf"
    assert format_number(True) == "true" and format_number(None) == ""
    assert format_number(3) == "3"


def test_parse_floats():
    assert parse_floats(" 0, 1,2.5 ,") == [0.0, 1.0, 2.5]
    with pytest.raises(DomainError):
        parse_floats(" , ")
