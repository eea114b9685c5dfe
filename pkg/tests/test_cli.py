import io

import pytest

from gqod.cli import main

INITIAL = "(0, (w', (1', 0) # (1, x)))"
SCRIPT = "R2 /0/0 i-=0\nR1 /0/0/0/0 k=2\n# limit label replaced by 5\nR3 /0/0 i=5\n"


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def test_compare_strict():
    code, text = run("--order", "@play", "compare", "x # x", "(rho, rho) # x")
    assert code == 0 and "lll true" in text


def test_compare_reflexive():
    code, text = run("--order", "@play", "compare", "(1, x)", "(1, x)")
    assert code == 0 and "lll false" in text and "lll= true" in text


def test_compare_fails_with_exit_one():
    code, text = run("--order", "@play", "compare", "(1, 0)", "x")
    assert code == 1 and "lll= false" in text


def test_compare_at_single_index():
    code, text = run("--order", "@play", "compare", "--index", "inf", "(1, 0)", "(2, 0)")
    assert code == 0 and text.startswith("index ∞: leq true")


def test_compare_counterexample_descent():
    code, _ = run("--order", "@counterexample", "--format", "text", "compare",
                  "(a1, (a2, (b1, 0)))", "(a1, (b2, 0))")
    assert code == 0
    code, _ = run("--order", "@counterexample", "compare", "--full",
                  "(a1, (a2, (b1, 0)))", "(a1, (b2, 0))")
    assert code == 0


def test_sections_listing():
    beta = "(5, 0'' # (w', 1'' # (3, 0'' # (2, (1, 0'') # 2'')) # 0''))"
    code, text = run("--order", "@example22", "sections", beta, "2")
    assert code == 0 and "(1, 0'') # 2''" in text.splitlines()
    code, text = run("--order", "@example22", "sections", "0''", "2")
    assert code == 0 and text == ""


def test_indices_listing():
    code, text = run("--order", "@play", "indices", "(2, (1, 0))")
    assert code == 0 and text.split() == ["1", "2"]


def test_embed_example():
    code, text = run("--order", "@nat", "embed", "(3, 1'' # (7, 11'' # 2''))",
                     "(5, (4, (9, (7, 6'' # (11, 0''))) # (2, 0'' # (1, 3'') # 0''))"
                     " # (0, (0, 0'' # 0'')))")
    assert code == 0 and len(text.splitlines()) == 5


def test_embed_none_and_identity():
    code, text = run("--order", "@chain2", "embed", "(1, (1, ρ))", "(1, ρ)")
    assert code == 1 and text.strip() == "none"
    code, text = run("--order", "@chain2", "embed", "(1, ρ)", "(1, ρ)")
    assert code == 0 and text.splitlines() == ["/ -> /", "/0 -> /0"]


def test_forest_embed():
    code, text = run("--order", "@chain2", "forest-embed", "(1, ρ)", "(0, ρ) # (1, ρ # ρ)")
    assert code == 0 and text.startswith("/ -> /1")


def test_embed_rejects_forests():
    code, _ = run("--order", "@chain2", "embed", "ρ # ρ", "ρ")
    assert code == 3


def test_check_rule():
    code, text = run("--order", "@play", "check-rule", "(w', 0)", "(5, 0) # 0")
    assert code == 0 and text.endswith("decreasing true\n")
    code, _ = run("--order", "@play", "check-rule", "(5, 0) # 0", "(w', 0)")
    assert code == 1


def test_check_generic():
    code, text = run("--order", "@play", "check-generic", "(1, x # x)", "(1, x)", "--trials", "30")
    assert code == 0 and "violations 0" in text
    code, text = run("--order", "@play", "check-generic", "(1, x)", "(1, x # x)")
    assert code == 1 and "inapplicable" in text


def test_hydra_script_and_replay(tmp_path):
    script = tmp_path / "play.moves"
    script.write_text(SCRIPT)
    code, trace = run("--order", "@play", "--format", "trace", "hydra", "run", INITIAL,
                      "--script", str(script))
    assert code == 0 and trace.startswith("# gqod-trace 1")
    path = tmp_path / "play.trace"
    path.write_text(trace)
    code, text = run("--order", "@play", "hydra", "replay", str(path))
    assert code == 0 and text.startswith("verified, 3 steps")
    path.write_text(trace.replace("i=5", "i=4"))
    code, text = run("--order", "@play", "hydra", "replay", str(path))
    assert code == 1 and "rejected" in text


def test_hydra_run_is_deterministic():
    a = run("--order", "@play", "--seed", "4", "hydra", "run", "(0, (2, 0 # 0) # (1', 0))")
    b = run("hydra", "run", "(0, (2, 0 # 0) # (1', 0))", "--order", "@play", "--seed", "4")
    assert a == b and a[0] == 0 and "terminated, descent verified" in a[1]


def test_hydra_step_limit_zero():
    code, text = run("--order", "@play", "--limit-steps", "0", "hydra", "run", "(0, (w', 0))")
    assert code == 1 and text.splitlines()[0] == "0. (0, (w', 0))"


def test_hydra_initial_form_enforced():
    code, _ = run("--order", "@play", "hydra", "run", "(1, (w', 0))")
    assert code == 3
    code, _ = run("--order", "@play", "hydra", "run", "(1, (w', 0))", "--any-initial",
                  "--heracles", "greedy-small")
    assert code == 0


def test_hydra_interactive(monkeypatch):
    monkeypatch.setattr("sys.stdin", io.StringIO("1\n4\nq\n"))
    code, text = run("--order", "@play", "hydra", "interactive", "(0, (0, 0))")
    assert code == 0
    assert "hydra: (0, (0, 0))" in text and "Hydra, choose the parameters:" in text
    assert "1. R1' at / [k=3] -> (0, 0) # (0, 0) # (0, 0) # (0, 0) # 0" in text


def test_validate_order(tmp_path):
    spec = tmp_path / "order.txt"
    spec.write_text("[I]\n0 < a < b\n[A]\nz\n")
    code, text = run("--order", str(spec), "validate-order")
    assert code == 0 and "3 labels" in text
    spec.write_text("[I]\na < b\nb < a\n")
    assert run("--order", str(spec), "validate-order")[0] == 3


@pytest.mark.parametrize("argv, code", [
    ([], 2),
    (["--order", "@play", "frobnicate"], 2),
    (["--order", "@play", "--k-max", "-1", "hydra", "run", "(0, 0)"], 2),
    (["compare", "0", "0"], 3),
    (["--order", "@nope", "compare", "0", "0"], 3),
    (["--order", "/does/not/exist", "compare", "0", "0"], 3),
    (["--order", "@play", "compare", "(1, 0", "0"], 3),
    (["--order", "@play", "sections", "(1, 0)", "q"], 3),
])
def test_exit_codes(argv, code):
    assert run(*argv)[0] == code
