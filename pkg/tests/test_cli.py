import json

import pytest

from cli import EXIT_CONFLICTS, EXIT_IO, EXIT_OK, EXIT_STRUCTURAL, main, validate_file
from conftest import DUCKPAY, FIXTURES, HISTORY_URI, fixture_text, happyshop_kb
from policy.extract import extract_data_policies
from rdf.turtle import parse_turtle
from reasoner.conformance import check_conformance
from reasoner.models import unbound_output_uri
from reasoner.report import conformance_response

HAPPYSHOP_ARGS = [
    "--app", str(FIXTURES / "happyshop-app.ttl"),
    "--data", str(FIXTURES / "payment-info.ttl"), str(FIXTURES / "address.ttl"),
]


def _check(*extra: str):
    return main(["check", *HAPPYSHOP_ARGS, *extra])


def test_check_fixtures_is_permitted(capsys):
    assert _check("--context", str(FIXTURES / "alice-context.ttl")) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    kb = happyshop_kb()
    assert report == conformance_response(kb, check_conformance(kb)).model_dump()
    assert report["permitted"] is True


def test_check_data_directory(capsys):
    code = main(["check", "--app", str(FIXTURES / "happyshop-app.ttl"), "--data", str(FIXTURES),
                 "--context", str(FIXTURES / "alice-context.ttl")])
    assert code == EXIT_OK
    assert json.loads(capsys.readouterr().out)["conflicts"] == []


def test_conflicts_exit_code(tmp_path, capsys):
    app = tmp_path / "duckpay-app.ttl"
    app.write_text(fixture_text("happyshop-app.ttl").replace("<http://goodpay.com/>", f"<{DUCKPAY}>"),
                   encoding="utf-8")
    code = main(["check", "--app", str(app), "--data", str(FIXTURES / "payment-info.ttl"),
                 str(FIXTURES / "address.ttl"), "--context", str(FIXTURES / "alice-context.ttl")])
    assert code == EXIT_CONFLICTS
    (conflict,) = json.loads(capsys.readouterr().out)["conflicts"]
    assert conflict["kind"] == "ProhibitedUse"


def test_strict_uncovered_input(capsys):
    code = main(["check", "--app", str(FIXTURES / "happyshop-app.ttl"), "--data", str(FIXTURES / "payment-info.ttl"),
                 "--context", str(FIXTURES / "alice-context.ttl"), "--strict"])
    assert code == EXIT_CONFLICTS
    assert json.loads(capsys.readouterr().out)["uncovered_inputs"] == ["address-in"]


def test_obligations_task(capsys):
    code = main(["check", "--app", str(FIXTURES / "research-app.ttl"), "--data", str(FIXTURES / "shoe-size.ttl"),
                 "--context", str(FIXTURES / "research-context.ttl"), "--task", "obligations"])
    assert code == EXIT_OK
    (entry,) = json.loads(capsys.readouterr().out)["obligations"]
    assert entry["kind"] == "user"


def test_derive_writes_a_valid_policy(tmp_path, capsys):
    assert _check("--task", "derive") == EXIT_OK
    output = capsys.readouterr().out
    assert "payment-details" not in output

    derived = tmp_path / "derived.ttl"
    derived.write_text(output, encoding="utf-8")
    assert main(["validate", str(derived)]) == EXIT_OK
    (policy_set,) = extract_data_policies(parse_turtle(output))
    assert policy_set.uri == unbound_output_uri("out1-port")
    assert len(policy_set.policy.attributes) == 5


def test_derive_json_with_target(capsys):
    assert _check("--task", "derive", "--format", "json", "--target-uri", HISTORY_URI,
                  "--output-port", "out1-port") == EXIT_OK
    (response,) = json.loads(capsys.readouterr().out)
    assert response["stored_uri"] == HISTORY_URI
    assert response["attributes"] == 5


def test_derive_unknown_port():
    assert _check("--task", "derive", "--output-port", "nowhere") == EXIT_STRUCTURAL


def test_context_required_for_reports():
    assert _check() == EXIT_STRUCTURAL


def test_validate_fixtures(capsys):
    assert main(["validate", *(str(path) for path in sorted(FIXTURES.glob("*.ttl")))]) == EXIT_OK
    out = capsys.readouterr().out
    assert "app policy http://happy.shop" in out
    assert "usage context of http://a.b/alice#card" in out


def test_validate_empty_file(tmp_path):
    empty = tmp_path / "empty.ttl"
    empty.write_text("", encoding="utf-8")
    assert validate_file(empty).endswith("empty")
    assert main(["validate", str(empty)]) == EXIT_OK


@pytest.mark.parametrize("document", [":d a :Data;\n    :uri <http://x> <http://y> .", ":app a :AppPolicy", ':a :p "unterminated'])
def test_validate_bad_syntax(tmp_path, capsys, document):
    broken = tmp_path / "broken.ttl"
    broken.write_text(document, encoding="utf-8")
    assert main(["validate", str(broken)]) == EXIT_STRUCTURAL
    assert "broken.ttl" in capsys.readouterr().err


def test_missing_file(tmp_path):
    assert main(["validate", str(tmp_path / "missing.ttl")]) == EXIT_IO
    assert main(["check", "--app", str(tmp_path / "missing.ttl"),
                 "--context", str(FIXTURES / "alice-context.ttl")]) == EXIT_IO


def test_bench_writes_records(tmp_path):
    out = tmp_path / "bench.csv"
    excel = tmp_path / "bench.xlsx"
    code = main(["bench", "--variable", "app:output:numOutput", "--values", "1", "--repeats", "1",
                 "--out", str(out), "--excel", str(excel)])
    assert code == EXIT_OK
    assert len(out.read_text(encoding="utf-8").splitlines()) == 1 + 4
    assert excel.exists()


@pytest.mark.parametrize("variable, values", [("data:numNothing", "10"), ("data:tag:numSecurity", "10,-5")])
def test_bench_rejects_bad_parameters(tmp_path, variable, values):
    code = main(["bench", "--variable", variable, "--values", values, "--out", str(tmp_path / "x.csv")])
    assert code == EXIT_STRUCTURAL
