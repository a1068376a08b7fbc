from __future__ import annotations

import json
import subprocess
import sys

import pytest

from qmodular.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, SCHEMA, main


def run(capsys, *argv) -> tuple[int, dict | str]:
    code = main(list(argv))
    out = capsys.readouterr().out
    try:
        return code, json.loads(out)
    except json.JSONDecodeError:
        return code, out


def test_coeffs(capsys):
    code, doc = run(capsys, "coeffs", "3")
    assert code == EXIT_OK
    assert doc["schema"] == SCHEMA and doc["ok"] is True
    assert doc["results"] == [1, 4, 20]


def test_coeffs_check(capsys):
    code, doc = run(capsys, "coeffs", "12", "--check")
    assert code == EXIT_OK and doc["results"][:5] == [1, 4, 20, 120, 820]


def test_verify_selected_keys(capsys):
    code, doc = run(capsys, "verify", "jacobi-quartic", "psi3-diagonal", "--order", "40")
    assert code == EXIT_OK
    assert all(r["status"] == "pass" for r in doc["results"])


def test_verify_literal_entry_is_not_a_failure(capsys):
    code, doc = run(capsys, "verify", "Z-eta-literal", "--order", "30")
    assert code == EXIT_OK
    assert doc["results"][0]["status"] == "paper-discrepancy"


def test_verify_list(capsys):
    assert main(["verify", "--list"]) == EXIT_OK
    keys = capsys.readouterr().out.split()
    assert "psi3" in keys and "Z-ode" in keys


def test_pi_single_row(capsys):
    code, doc = run(capsys, "pi", "--row", "8")
    assert code == EXIT_OK
    assert doc["results"][0]["status"] == "pass"


def test_pi_slow_row_fails_at_default_terms(capsys):
    code, doc = run(capsys, "pi", "--row", "1")
    assert code == EXIT_FAIL
    assert doc["ok"] is False


def test_singular_form(capsys):
    code, doc = run(capsys, "singular", "--form", "20,-40,23", "--prec", "128")
    assert code == EXIT_OK
    assert doc["results"][0]["status"] == "pass"


def test_modeq(capsys):
    code, doc = run(capsys, "modeq", "--n", "3", "--bidegree", "4", "--order", "120")
    assert code == EXIT_OK


def test_table2_reports_discrepancies(capsys):
    code, doc = run(capsys, "table2")
    statuses = {r["status"] for r in doc["results"]}
    assert statuses == {"pass", "paper-discrepancy"}
    assert code == EXIT_OK


def test_relations(capsys):
    code, doc = run(capsys, "relations", "--order", "60")
    assert code == EXIT_OK


@pytest.mark.parametrize("argv", [
    ["verify", "no-such-key"],
    ["coeffs", "0"],
    ["verify", "psi3", "--order", "5"],
    ["pi", "--prec", "10", "--row", "0"],
    ["bogus"],
    [],
])
def test_usage_errors(argv, capsys):
    assert main(argv) == EXIT_USAGE


def test_json_is_deterministic_apart_from_timestamp(capsys):
    _, a = run(capsys, "coeffs", "10", "--check")
    _, b = run(capsys, "coeffs", "10", "--check")
    a.pop("generated"), b.pop("generated")
    assert a == b


def test_text_format_and_out_file(tmp_path, capsys):
    out = tmp_path / "r.txt"
    assert main(["coeffs", "4", "--format", "text", "--out", str(out)]) == EXIT_OK
    assert out.read_text().strip().endswith("OK")


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "qmodular.cli", "coeffs", "3"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["results"] == [1, 4, 20]
