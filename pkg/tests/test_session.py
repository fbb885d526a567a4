import io
from pathlib import Path

import pytest

from hum.errors import HumError, ParseError
from hum.session import (FactCmd, InstanceCmd, MarginalCmd, QueryCmd,
                         Session, VariableCmd, command_to_text,
                         format_probability, parse_command, parse_commands,
                         repl, run_script)

SCRIPTS = Path(__file__).resolve().parent.parent / "examples"

URN_EXPECTED = ["0.33", "0.5", "0.67", "0.8"]
CHERNOBYL_EXPECTED = [
    "0.7",
    "** Assuming (independent evidence-for (radio 1) (news 1)) ***",
    "** Monitoring (same evidence-for (radio 1) (news 1)) ***",
    "0.91",
    "** Retracting (independent evidence-for (radio 1) (news 1)) ***",
    "0.7",
]


def test_parse_variable_forms():
    cmd = parse_command("(Variable (Draw ?n) white black)")
    assert cmd == VariableCmd(pattern=("draw", "?n"), values=("white", "black"))


def test_parse_defactq_spellings_and_wrapped_marginal():
    assert parse_command("(Defactq ((draw 1) white))") == FactCmd(
        term=(("draw", 1), "white"))
    cmd = parse_command("(Deffactq (Marginal (news 1) (.7 .3)))")
    assert cmd == MarginalCmd(target=("news", 1), positional=(0.7, 0.3), pairs=None)


def test_parse_marginal_pair_form():
    cmd = parse_command("(Marginal Urn (Urn H1) .33 (Urn H2) .33 (Urn H3) .33)")
    assert cmd.pairs == ((("urn", "h1"), 0.33), (("urn", "h2"), 0.33),
                         (("urn", "h3"), 0.33))


def test_parse_probability_heads():
    assert parse_command("(Probability-of (Urn H2))") == QueryCmd(term=("urn", "h2"))
    assert parse_command("(Probability (Urn H2))") == QueryCmd(term=("urn", "h2"))


def test_parse_errors_carry_position():
    with pytest.raises(ParseError) as err:
        parse_command("(Probability-of)")
    assert "1:1" in str(err.value)
    with pytest.raises(ParseError, match="unknown command"):
        parse_command("(Launch missiles)")
    with pytest.raises(ParseError):
        parse_commands("(Variable a b\n(Instance c)")


def test_commands_round_trip_through_printer():
    texts = [
        "(Variable (Draw ?n) white black)",
        "(Relation Urn (Draw ?n) (-> (Urn H1) (((Draw ?n) white) 0.5)))",
        "(Marginal Urn (Urn H1) 0.33 (Urn H2) 0.33 (Urn H3) 0.34)",
        "(Marginal (radio 1) 0.7 0.3)",
        "(Instance (draw 1))",
        "(Defactq ((draw 1) white))",
        "(Probability-of (Urn H2))",
        "(Retract a_1)",
        "(Show-label (Urn H2))",
        "(Show-nogoods)",
        "(Reset)",
    ]
    for text in texts:
        cmd = parse_command(text)
        assert parse_command(command_to_text(cmd)) == cmd


def test_format_probability():
    assert format_probability(1 / 3) == "0.33"
    assert format_probability(0.5) == "0.5"
    assert format_probability(2 / 3) == "0.67"
    assert format_probability(0.8) == "0.8"
    assert format_probability(1.0) == "1.0"
    assert format_probability(0.0) == "0.0"
    assert format_probability(5 / 6, precision=4) == "0.8333"


def test_hum_precision_env(monkeypatch):
    monkeypatch.setenv("HUM_PRECISION", "4")
    session = Session()
    session.execute_text("(Variable Urn H1 H2 H3)"
                         "(Marginal Urn (Urn H1) .33 (Urn H2) .33 (Urn H3) .33)")
    result = session.execute_text("(Probability-of (Urn H2))")
    assert result.display == "0.3333"


def test_urn_script_golden():
    status, lines = run_script(str(SCRIPTS / "urns.hum"))
    assert status == 0
    assert lines == URN_EXPECTED


def test_chernobyl_script_golden():
    status, lines = run_script(str(SCRIPTS / "chernobyl.hum"))
    assert status == 0
    assert lines == CHERNOBYL_EXPECTED


def test_scripts_replay_identically():
    first = run_script(str(SCRIPTS / "chernobyl.hum"))
    second = run_script(str(SCRIPTS / "chernobyl.hum"))
    assert first == second


def test_run_script_verify_mode():
    status, lines = run_script(str(SCRIPTS / "urns.hum"), verify=True)
    assert status == 0
    assert lines == URN_EXPECTED


def test_run_script_missing_file():
    status, lines = run_script("no/such/file.hum")
    assert status == 1
    assert lines and lines[0].startswith("error:")


def test_failing_command_is_atomic(tmp_path):
    script = tmp_path / "bad.hum"
    script.write_text("(Variable Urn H1 H2)\n"
                      "(Marginal Urn (Urn H1) .5 (Urn H2) .5)\n"
                      "(Instance (draw 1))\n"
                      "(Probability-of (Urn H1))\n")
    status, lines = run_script(str(script), keep_going=True)
    assert status == 1
    assert lines[0].startswith("error:")
    assert lines[1] == "0.5"


def test_atomicity_restores_state_on_error():
    session = Session()
    session.execute_text("(Variable Urn H1 H2)"
                         "(Variable (Draw ?n) white black)"
                         "(Instance (draw 1))")
    before = session.engine.network.dump()
    with pytest.raises(HumError):
        # the second rule names an unknown value: the command must fully roll
        # back, including the first rule's already-applied justifications
        session.execute_text(
            "(Relation Urn (Draw ?n)"
            " (-> (Urn H1) (((Draw ?n) white) 1.0))"
            " (-> (Urn H2) (((Draw ?n) green) 1.0)))")
    assert session.engine.network.dump() == before
    assert session.engine.relations == []
    assert session.engine.query_probability((("draw", 1), "white")) == 0.0


def test_show_commands():
    session = Session()
    session.execute_text("(Variable Urn H1 H2)"
                         "(Marginal Urn (Urn H1) .5 (Urn H2) .5)")
    result = session.execute_text("(Show-label (Urn H1))")
    assert result.lines == ["(urn h1) [{a_h1}]"]
    result = session.execute_text("(Show-nogoods)")
    assert result.lines == ["{a_h1, a_h2}"]


def test_retract_by_statement_term():
    session = Session()
    for command in parse_commands((SCRIPTS / "chernobyl.hum").read_text())[:-2]:
        session.execute(command)  # stop before the Same fact
    assert session.execute_text("(Probability-of (1000s-dead true))").value == \
        pytest.approx(0.91)
    result = session.execute_text(
        "(Retract (Independent evidence-for (radio 1) (news 1)))")
    assert result.lines == [
        "** Retracting (independent evidence-for (radio 1) (news 1)) ***"]
    assert session.execute_text("(Probability-of (1000s-dead true))").value == \
        pytest.approx(0.7)


def test_reset_clears_engine():
    session = Session()
    session.execute_text("(Variable Urn H1 H2)")
    session.execute_text("(Reset)")
    with pytest.raises(HumError, match="unknown proposition"):
        session.execute_text("(Probability-of (Urn H1))")


def test_repl_streams_lines():
    stdin = io.StringIO("(Variable Urn H1 H2 H3)\n"
                        "(Marginal Urn\n (Urn H1) .33 (Urn H2) .33 (Urn H3) .33)\n"
                        "(Probability-of (Urn H2))\n"
                        "(Probability-of)\n")
    stdout = io.StringIO()
    assert repl(stdin=stdin, stdout=stdout) == 0
    lines = stdout.getvalue().splitlines()
    assert lines[0] == "0.33"
    assert lines[1].startswith("error:")
