from __future__ import annotations

import sys
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import compile_corpus
from vspec.cache import Unknown as CachedUnknown
from vspec.cache import Verified as CachedVerified
from vspec.interp import Environment, TableNetwork, TensorV, parse_network
from vspec.solver_adapter import (
    CounterexampleShapeError,
    ExternalCommandFailed,
    Falsified,
    MissingPropertyResult,
    MockFileMissingProperty,
    StatusFormatError,
    Unknown,
    UnknownSolver,
    Verified,
    counterexample_holds,
    parse_status,
    parse_table,
    quantified_shapes,
    run_solver,
    split_counterexample,
    status_text,
    to_cache_status,
)

statuses = st.one_of(
    st.just(Verified()),
    st.just(Unknown()),
    st.lists(st.fractions(max_denominator=100), max_size=4).map(lambda xs: Falsified(tuple(xs))),
)


@given(statuses)
def test_status_text_round_trip(s):
    assert parse_status(status_text(s)) == s


@pytest.mark.parametrize("text", ["", "proven", "falsifiedx", "falsified:1,abc"])
def test_bad_status_text(text):
    with pytest.raises(StatusFormatError):
        parse_status(text)


def test_table_skips_comments_and_blank_lines():
    table = parse_table("# results\n\nsafe\tverified\nother\tfalsified:1,2\n")
    assert table == {"safe": Verified(), "other": Falsified((Fraction(1), Fraction(2)))}


def test_table_line_without_tab():
    with pytest.raises(StatusFormatError):
        parse_table("safe verified\n")


@pytest.fixture
def car():
    return compile_corpus("car").typed


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


def test_mock_results_pass_through(tmp_path, car):
    mock = write(tmp_path, "m.tsv", "safe\tfalsified:4,0\n")
    result = run_solver(f"mock:{mock}", car)
    assert result.statuses == {"safe": Falsified((Fraction(4), Fraction(0)))}
    assert not result.all_verified


def test_mock_must_cover_every_property(tmp_path):
    pk = compile_corpus("pk").typed
    props = ["Ka_pos", "Ke_pos", "Ke_n_Ka", "Vd_pos", "C_safe_pos", "ttd_pos", "safe"]
    mock = write(tmp_path, "m.tsv", "".join(f"{p}\tverified\n" for p in props))
    with pytest.raises(MockFileMissingProperty) as info:
        run_solver(f"mock:{mock}", pk)
    assert "nonNeg" in str(info.value)


def test_counterexample_must_match_the_quantified_shape(tmp_path, car):
    mock = write(tmp_path, "m.tsv", "safe\tfalsified:1,2,3\n")
    with pytest.raises(CounterexampleShapeError):
        run_solver(f"mock:{mock}", car)


def test_quantified_shapes(car):
    assert quantified_shapes(car.lookup("safe")) == [(2,)]
    assert split_counterexample(car.lookup("safe"), (Fraction(1), Fraction(2))) == [TensorV((2,), (Fraction(1), Fraction(2)))]


def test_counterexample_checked_against_a_table_network(car):
    table = TableNetwork({(Fraction(0), Fraction(0)): TensorV((1,), (Fraction(5),)), (Fraction(1), Fraction(1)): TensorV((1,), (Fraction(0),))})
    env = Environment(car, {"controller": table})
    # output 5 at the origin violates the bound, output 0 at (1, 1) gives 0 + 2 - 1 = 1 < 1.25
    assert counterexample_holds(car, "safe", (Fraction(0), Fraction(0)), env) is False
    assert counterexample_holds(car, "safe", (Fraction(1), Fraction(1)), env) is True


def test_counterexample_outside_the_precondition_does_not_falsify(car):
    env = Environment(car, {"controller": parse_network("affine 0 0 ; 100")})
    assert counterexample_holds(car, "safe", (Fraction(4), Fraction(0)), env) is True


def test_external_solver_receives_the_bindings(tmp_path, car):
    script = write(tmp_path, "solver.py", "import sys\nassert '-n' in sys.argv\nprint('safe\\tunknown')\n")
    result = run_solver(f"external:{sys.executable} {script}", car, {"controller": "c.net"}, {}, "car.vcl")
    assert result.statuses == {"safe": Unknown()}


def test_external_solver_failure(tmp_path, car):
    script = write(tmp_path, "solver.py", "import sys\nsys.exit(3)\n")
    with pytest.raises(ExternalCommandFailed):
        run_solver(f"external:{sys.executable} {script}", car)


def test_external_solver_missing_result(tmp_path, car):
    script = write(tmp_path, "solver.py", "print('other\\tverified')\n")
    with pytest.raises(MissingPropertyResult):
        run_solver(f"external:{sys.executable} {script}", car)


@pytest.mark.parametrize("kind", ["marabou", "mock:", "magic:thing"])
def test_unknown_solver_kinds(kind, car):
    with pytest.raises(UnknownSolver):
        run_solver(kind, car)


def test_cache_statuses():
    assert to_cache_status(Verified(), "mock", "t") == CachedVerified("mock", "t")
    assert to_cache_status(Unknown(), "mock", "t") == CachedUnknown()
