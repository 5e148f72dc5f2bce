from __future__ import annotations

import subprocess
import sys

import pytest

from conftest import PK_PARAMS, corpus_source
from vspec import cli


@pytest.fixture
def car(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    (tmp_path / "car.vcl").write_text(corpus_source("car"), encoding="utf-8")
    (tmp_path / "c.net").write_text("affine 1 0 ; 0\n", encoding="utf-8")
    (tmp_path / "ok.tsv").write_text("safe\tverified\n", encoding="utf-8")
    return tmp_path


def verify(table: str = "ok.tsv") -> int:
    return cli.run(["verify", "-s", "car.vcl", "-n", "controller:c.net", "-v", f"mock:{table}", "-c", "cache"])


def test_check_ok(car, capsys):
    assert cli.run(["check", "-s", "car.vcl"]) == 0
    assert "ok (9 declarations)" in capsys.readouterr().out


def test_check_type_error(car, capsys):
    (car / "bad.vcl").write_text("f : Bool\nf = 1.5\n", encoding="utf-8")
    assert cli.run(["check", "-s", "bad.vcl"]) == 1
    assert capsys.readouterr().err.startswith("bad.vcl:2:5: error: UnificationFailure")


def test_check_parse_error(car):
    (car / "bad.vcl").write_text("f = (\n", encoding="utf-8")
    assert cli.run(["check", "-s", "bad.vcl"]) == 1


def test_missing_spec_file_is_an_io_error(car):
    assert cli.run(["check", "-s", "nowhere.vcl"]) == 66


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["check"],
        ["frobnicate", "-s", "car.vcl"],
        ["export", "-s", "car.vcl", "-t", "Lean"],
        ["export", "-s", "car.vcl", "-t", "Agda", "-r"],
        ["export", "-s", "car.vcl", "-t", "Rocq", "-p", "novalue"],
        ["export", "-s", "car.vcl", "-t", "Rocq", "-p", "x:abc"],
    ],
)
def test_usage_errors(car, argv):
    assert cli.run(argv) == 64


def test_agda_export_of_a_property_needs_a_cache(car):
    assert cli.run(["export", "-s", "car.vcl", "-t", "Agda"]) == 64


def test_missing_network_binding(car):
    assert cli.run(["verify", "-s", "car.vcl", "-v", "mock:ok.tsv", "-c", "cache"]) == 64


def test_missing_parameter(tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    (tmp_path / "pk.vcl").write_text(corpus_source("pk"), encoding="utf-8")
    assert cli.run(["export", "-s", "pk.vcl", "-t", "Rocq", "-p", "Ka:1"]) == 64
    assert "parameter 'Ke'" in capsys.readouterr().err


def test_unknown_parameter_name(car):
    assert cli.run(["export", "-s", "car.vcl", "-t", "Rocq", "-p", "zeta:1"]) == 64


def test_verify_then_export(car, capsys):
    assert verify() == 0
    assert capsys.readouterr().out == "safe\tverified\n"
    assert cli.run(["export", "-s", "car.vcl", "-t", "Agda", "-c", "cache", "-o", "Car.agda"]) == 0
    text = (car / "Car.agda").read_text(encoding="utf-8")
    assert "module Car where" in text
    assert 'controller = callNetwork "c.net"' in text
    assert 'checkVehicleProperty "cache/manifest"' in text


def test_export_to_stdout(car, capsys):
    assert cli.run(["export", "-s", "car.vcl", "-t", "Isabelle", "--locale", "WindCtrl"]) == 0
    assert "locale WindCtrl =" in capsys.readouterr().out


def test_unusual_extension_is_a_warning(car, capsys):
    assert cli.run(["export", "-s", "car.vcl", "-t", "Imandra", "-o", "out.txt"]) == 0
    assert "warning" in capsys.readouterr().err


def test_unverified_property_exit_code(car):
    (car / "bad.tsv").write_text("safe\tfalsified:4,0\n", encoding="utf-8")
    assert verify("bad.tsv") == 3
    # a cache without a verified result cannot back an export
    assert cli.run(["export", "-s", "car.vcl", "-t", "Agda", "-c", "cache"]) == 2


def test_malformed_solver_output(car):
    (car / "bad.tsv").write_text("safe\tperhaps\n", encoding="utf-8")
    assert verify("bad.tsv") == 65


def test_external_solver_failure(car):
    (car / "fail.py").write_text("import sys\nsys.exit(2)\n", encoding="utf-8")
    argv = ["verify", "-s", "car.vcl", "-n", "controller:c.net", "-v", f"external:{sys.executable} fail.py", "-c", "cache"]
    assert cli.run(argv) == 69


def test_tampered_network(car, capsys):
    assert verify() == 0
    (car / "c.net").write_text("affine 2 0 ; 0\n", encoding="utf-8")
    assert cli.run(["export", "-s", "car.vcl", "-t", "Agda", "-c", "cache"]) == 2
    assert "NetworkChanged(controller)" in capsys.readouterr().err


def test_changed_parameter_is_reported(tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    (tmp_path / "pk.vcl").write_text(corpus_source("pk"), encoding="utf-8")
    (tmp_path / "pk.net").write_text("affine 1 0 0 0 0 ; 0\n", encoding="utf-8")
    props = ["Ka_pos", "Ke_pos", "Ke_n_Ka", "Vd_pos", "C_safe_pos", "ttd_pos", "safe", "nonNeg"]
    (tmp_path / "m.tsv").write_text("".join(f"{p}\tverified\n" for p in props), encoding="utf-8")
    flags = [x for n, v in PK_PARAMS.items() for x in ("-p", f"{n}:{v}")]
    assert cli.run(["verify", "-s", "pk.vcl", "-n", "pk:pk.net", *flags, "-v", "mock:m.tsv", "-c", "cache"]) == 0
    assert cli.run(["export", "-s", "pk.vcl", "-t", "Rocq", "-c", "cache", "-p", "Ka:1"]) == 2
    assert "ParameterChanged(Ka)" in capsys.readouterr().err


def test_module_entry_point(car):
    proc = subprocess.run([sys.executable, "-m", "vspec.cli", "check", "-s", "car.vcl"], capture_output=True, text=True)
    assert proc.returncode == 0
