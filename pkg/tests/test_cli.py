"""Command-line front end: exit codes, report stability, formats."""

import json

import pytest

from mvdl.cli import main
from mvdl.jsonio import algebra_to_json, dumps, model_to_json
from mvdl.algebra import build_builtin
from mvdl.presets import make_preset
from mvdl.semantics import Model


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestExitCodes:
    def test_validate_builtin_passes(self, capsys):
        code, out, _ = run(capsys, "validate-algebra", "--builtin", "L3")
        assert code == 0
        assert "residuation" in out

    def test_validate_broken_algebra_fails(self, capsys, tmp_path):
        data = algebra_to_json(build_builtin("boolean"))
        data["tensor"] = [[0, 0], [0, 0]]
        path = tmp_path / "broken.json"
        path.write_text(dumps(data))
        # validate-algebra reports laws instead of raising
        code, out, err = run(capsys, "validate-algebra", "--algebra", str(path))
        assert code == 2  # inline load validates and rejects

    def test_entail_countermodel_exits_one(self, capsys):
        code, out, _ = run(
            capsys,
            "entail", "--preset", "pdl-crisp", "--algebra", "B2",
            "--phi", "p -> [a]p", "--max-n", "2", "--format", "json",
        )
        assert code == 1
        payload = json.loads(out)
        assert payload["status"] == "fails"
        assert payload["counterexample"]["model"]["n"] == 2

    def test_usage_error(self, capsys):
        code, _, _ = run(capsys, "entail", "--no-such-flag")
        assert code == 2

    def test_iteration_is_usage_error(self, capsys):
        code, _, err = run(
            capsys, "reduce", "--preset", "pdl-crisp", "--phi", "<a*> p"
        )
        assert code == 2
        assert "iteration" in err

    def test_budget_exit_three(self, capsys):
        code, _, err = run(
            capsys,
            "entail", "--preset", "pdl-labelled", "--algebra", "L2",
            "--phi", "<a;b;c> p -> <a;b;c> p", "--max-n", "2", "--budget", "50",
        )
        assert code == 3
        assert "budget" in err

    def test_semiprimal_false_exits_one(self, capsys):
        code, out, _ = run(capsys, "semiprimal", "--algebra", "G3")
        assert code == 1
        assert "False" in out


class TestCommands:
    def test_reduce_game(self, capsys):
        code, out, _ = run(
            capsys, "reduce", "--preset", "game", "--algebra", "L2",
            "--phi", "<(a;b)+c> p",
        )
        assert code == 0
        assert out.strip() == "<a> <b> p \\/ <c> p"

    def test_eval_model(self, capsys, tmp_path):
        config = make_preset("pdl-labelled", build_builtin("lukasiewicz", 2))
        model = Model(
            2, config, atoms={"a": ((0, 1), (0, 0))}, valuation={"p": (0, 2)}
        )
        path = tmp_path / "model.json"
        path.write_text(dumps(model_to_json(model)))
        code, out, _ = run(
            capsys, "eval", "--model", str(path), "--phi", "<a> p", "--format", "json"
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["values"] == [1, 0]
        assert payload["labels"] == ["1/2", "0"]

    def test_verify_rules_small(self, capsys):
        code, out, _ = run(
            capsys,
            "verify-rules", "--preset", "pdl-crisp", "--algebra", "B2", "--n", "1",
        )
        assert code == 0
        assert "holds" in out

    def test_check_safety(self, capsys):
        code, out, _ = run(
            capsys,
            "check-safety", "--preset", "pdl-crisp", "--algebra", "B2",
            "--op", ";", "--max-n", "2",
        )
        assert code == 0
        assert "holds-up-to-bound" in out

    def test_check_safety_test_target(self, capsys):
        code, out, _ = run(
            capsys,
            "check-safety", "--preset", "game", "--algebra", "B2",
            "--test", "t", "--max-n", "2",
        )
        assert code == 0
        assert "holds-up-to-bound" in out

    def test_eval_instantial_model(self, capsys, tmp_path):
        config = make_preset("instantial", max_k=1)
        model = Model(
            2,
            config,
            atoms={"a": (frozenset({0b10}), frozenset())},
            valuation={"p": (0, 1), "q": (1, 1)},
        )
        path = tmp_path / "inst.json"
        path.write_text(dumps(model_to_json(model)))
        code, out, _ = run(
            capsys,
            "eval", "--model", str(path),
            "--phi", "<a:inst2>(q, p)", "--format", "json",
        )
        assert code == 0
        assert json.loads(out)["values"] == [1, 0]

    def test_check_separation(self, capsys):
        code, out, _ = run(
            capsys,
            "check-separation", "--preset", "pdl-threshold", "--algebra", "L2",
            "--n", "2",
        )
        assert code == 0

    def test_one_step_trials(self, capsys):
        code, out, _ = run(
            capsys,
            "one-step", "--kind", "labelled-diamond", "--algebra", "L2",
            "--n", "2", "--trials", "25",
        )
        assert code == 0
        assert "25 roundtrips" in out

    def test_one_step_h_file(self, capsys, tmp_path):
        L2 = build_builtin("lukasiewicz", 2)
        entries = []
        for r in (1, 2):
            for s in range(4):
                acc = L2.bigjoin(v for x, v in enumerate((1, 2)) if s >> x & 1)
                entries.append([[r, s], 1 if L2.leq(r, acc) else 0])
        path = tmp_path / "h.json"
        path.write_text(json.dumps({"entries": entries}))
        code, out, _ = run(
            capsys,
            "one-step", "--kind", "threshold", "--algebra", "L2", "--n", "2",
            "--h", str(path), "--format", "json",
        )
        assert code == 0
        assert json.loads(out)["alpha"] == [1, 2]

    def test_one_step_corrupted_h_names_axiom(self, capsys, tmp_path):
        entries = [
            [[r, s], 1 if (r == 2 and s & 1) else 0]
            for r in (1, 2)
            for s in range(4)
        ]
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"entries": entries}))
        code, out, _ = run(
            capsys,
            "one-step", "--kind", "threshold", "--algebra", "L2", "--n", "2",
            "--h", str(path), "--format", "json",
        )
        assert code == 1
        assert json.loads(out)["violation"] == "threshold-monotonicity"

    def test_reports_are_byte_identical(self, capsys):
        argv = [
            "entail", "--preset", "pdl-crisp", "--algebra", "B2",
            "--phi", "p -> [a]p", "--max-n", "2", "--format", "json",
        ]
        _, out1, _ = run(capsys, *argv)
        _, out2, _ = run(capsys, *argv)
        # seconds vary; mask the timing field before comparing bytes
        p1, p2 = json.loads(out1), json.loads(out2)
        p1["seconds"] = p2["seconds"] = 0
        assert dumps(p1) == dumps(p2)

    def test_help(self, capsys):
        code, out, _ = run(capsys, "--help")
        assert code == 0
