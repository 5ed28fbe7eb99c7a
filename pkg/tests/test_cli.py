import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ebcheck.cli import BUILTIN_CASES, Overrides, format_problem, main, parse, run
from ebcheck.cli.report import fmt
from ebcheck.exceptions import ProblemParseError

MINIMAL = """\
# f(x) = x
func objective = affine([1], 0)
analyze modulus with xbar=[0] samples=256
"""


class TestParse:
    def test_minimal(self):
        pf = parse(MINIMAL)
        assert len(pf.analyses) == 1 and pf.analyses[0].command == "modulus"
        assert [d.name for d in pf.declarations] == ["objective"]

    def test_missing_radius(self):
        with pytest.raises(ProblemParseError) as exc:
            parse("set B = ball([0, 0])\n")
        assert exc.value.line == 1 and exc.value.column == 9

    def test_builtin_alias(self):
        pf = parse("analyze builtin remark31\n")
        names = [d.name for d in pf.declarations]
        assert names == ["remark31_A1", "remark31_A2", "remark31_f"]
        assert pf.analyses[0].command == "ratios"

    @pytest.mark.parametrize("text, line", [
        ("func f = dist(A)\nanalyze modulus with objective=f\n", 1),
        ("func objective = affine([1], 0)\nanalyze frobnicate\n", 2),
        ("set A = ball([0, 0], 1)\nset B = halfspaces([[1, 0, 0]], [0])\nset C = union(A, B)\n", 3),
        ("func objective = affine([1], 0)\nanalyze modulus with xbar=[0\n", 2),
        ("func f = affine([1], 0)\nanalyze modulus\n", 2),
        ("func g = affine([1], 0)\nanalyze certify34 with g=g map=P\n", 2),
        ("set A = ball([0], 1)\nfunc objective = max(A)\nanalyze modulus\n", 2),
        ("func f = affine([1], 0)\nfunc f = affine([2], 0)\n", 2),
    ])
    def test_errors_carry_line(self, text, line):
        with pytest.raises(ProblemParseError) as exc:
            parse(text)
        assert exc.value.line == line and exc.value.column >= 1

    def test_round_trip_builtins(self):
        for name, make in BUILTIN_CASES.items():
            pf = parse(make())
            again = parse(format_problem(pf))
            assert again == pf, name

    def test_options(self):
        pf = parse("option seed = 7\n" + MINIMAL)
        assert pf.metadata["seed"].value == 7


coef = st.floats(-5, 5, allow_nan=False).map(lambda v: round(v, 6))


@settings(max_examples=40, deadline=None)
@given(a=st.lists(coef, min_size=2, max_size=2), b=coef, r=st.floats(0.1, 3), tau=st.floats(0.1, 10))
def test_round_trip_property(a, b, r, tau):
    text = (
        f"set S = union(ball([0, 0], {r!r}), halfspaces([[{a[0]!r}, {a[1]!r}]], [{b!r}]))\n"
        f"func objective = max(dist(S), affine([{a[0]!r}, {a[1]!r}], {b!r}))\n"
        f"analyze certify33 with xbar=[0, 0] tau={tau!r}\n"
    )
    pf = parse(text)
    assert parse(format_problem(pf)) == pf


class TestRun:
    def test_modulus_row(self):
        report = run(parse(MINIMAL))
        sec = report.sections[0]
        assert report.exit_code == 0
        verdict_row = sec.rows[-1]
        assert verdict_row[1] == "HOLDS" and abs(verdict_row[3] - 1.0) <= 1e-3

    def test_remark_ratio_table(self):
        report = run(parse(BUILTIN_CASES["remark31"]()), Overrides(budget=0.25))
        table = report.sections[0]
        assert table.header == ["label", "distance", "f_value", "ratio", "expected"]
        for label, _, _, ratio, expected in table.rows:
            assert abs(ratio - np.sqrt(2 * label)) <= 1e-6 and ratio == pytest.approx(expected)
        assert report.sections[1].rows[-1][1] == "FAILS"

    def test_lemma_witness(self):
        report = run(parse(BUILTIN_CASES["lemma25"]()))
        rows = {r[0]: r for r in report.sections[0].rows}
        assert rows["witness"][2] == "0 -1"
        assert rows["limiting_inclusion"][1] is False

    def test_runtime_error_is_reported_with_index(self):
        text = "func objective = affine([1], 0)\nanalyze modulus with xbar=[5]\n"
        report = run(parse(text))
        assert report.exit_code == 3 and "analysis 0" in report.sections[0].error

    def test_seed_override_and_echo(self):
        report = run(parse("option seed = 4\n" + MINIMAL))
        assert report.seed == 4
        assert run(parse("option seed = 4\n" + MINIMAL), Overrides(seed=9)).seed == 9


class TestMain:
    def test_list_cases(self, capsys):
        assert main(["--list-cases"]) == 0
        assert capsys.readouterr().out.split() == sorted(BUILTIN_CASES)

    def test_usage_errors(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == 1
        with pytest.raises(SystemExit) as exc:
            main(["--bogus"])
        assert exc.value.code == 1
        with pytest.raises(SystemExit) as exc:
            main(["--case", "nope"])
        assert exc.value.code == 1
        capsys.readouterr()

    def test_parse_error_exit(self, tmp_path, capsys):
        p = tmp_path / "bad.ebp"
        p.write_text("set B = ball([0, 0])\n")
        assert main(["--problem", str(p)]) == 2
        assert "line 1" in capsys.readouterr().err

    def test_runtime_error_exit(self, tmp_path, capsys):
        p = tmp_path / "bad.ebp"
        p.write_text("func objective = affine([1], 0)\nanalyze modulus with xbar=[5]\n")
        assert main(["--problem", str(p)]) == 3
        capsys.readouterr()

    def test_csv_output(self, tmp_path, capsys):
        p = tmp_path / "f.ebp"
        p.write_text(MINIMAL + "analyze certify33 with xbar=[0] tau=0.5\n")
        out = tmp_path / "out"
        assert main(["--problem", str(p), "--out", str(out), "--budget", "0.5"]) == 0
        text = capsys.readouterr().out
        assert "modulus: HOLDS" in text and "THM33: FAILS" in text
        files = sorted(f.name for f in out.iterdir())
        assert files == ["00_modulus.csv", "01_certify33.csv"]
        assert (out / "00_modulus.csv").read_text().splitlines()[0] == "level,delta,sup_ratio,argmax_1"

    def test_tol_override(self, tmp_path, capsys):
        p = tmp_path / "f.ebp"
        p.write_text("func objective = affine([1], 0)\nanalyze certify33 with xbar=[0] tau=0.999\n")
        assert main(["--problem", str(p)]) == 0
        assert "FAILS" in capsys.readouterr().out
        assert main(["--problem", str(p), "--tol", "0.01"]) == 0
        assert "HOLDS" in capsys.readouterr().out


def test_fmt():
    assert fmt(True) == "true" and fmt(np.float64(1 / 3)) == "0.333333333333" and fmt(np.inf) == "inf"
    assert fmt(np.int64(3)) == "3" and fmt(float("nan")) == "nan"
