from __future__ import annotations

import pytest

from conftest import compile_corpus, corpus_source
from vspec.core.builtins import NLit, StdOp
from vspec.core.ops import has_unknowns, subterms
from vspec.core.pretty import pretty, pretty_spec
from vspec.core.syntax import App, Builtin, Function, decl_type
from vspec.driver import compile_source
from vspec.errors import (
    DuplicateDeclaration,
    IndexOutOfBounds,
    NetworkTypeInvalid,
    NotAFunction,
    ShapeMismatch,
    TypeMismatch,
    UnboundVariable,
    UnificationFailure,
    UnresolvableConstraint,
)
from vspec.surface.desugar import desugar
from vspec.surface.parser import parse_spec
from vspec.typecheck.pipeline import type_spec


def test_corpus_types_are_fully_known(corpus_name):
    typed = compile_corpus(corpus_name).typed
    for d in typed.decls:
        t = decl_type(d)
        assert t is None or not has_unknowns(t), d.name
        assert not has_unknowns(getattr(d, "body", Builtin(StdOp.REAL))), d.name


def test_type_checking_is_deterministic(corpus_name):
    core = desugar(parse_spec(corpus_source(corpus_name)))
    assert pretty_spec(type_spec(core)) == pretty_spec(type_spec(core))
    assert type_spec(core) == type_spec(core)


def test_index_literals_are_resolved_by_later_use():
    typed = compile_corpus("car").typed
    assert pretty(decl_type(typed.lookup("sensor1"))) == "Index 2"
    assert pretty(decl_type(typed.lookup("velocity"))) == "Index 1"
    literals = [n.b for n, _ in subterms(typed.lookup("sensor2").body) if isinstance(n, Builtin) and isinstance(n.b, NLit)]
    assert literals == [NLit(1, index_bound=2)]


def test_unconstrained_literal_defaults_to_nat():
    typed = compile_source("k = 3\n").typed
    assert pretty(decl_type(typed.lookup("k"))) == "Nat"


def test_literal_takes_the_type_of_its_use():
    typed = compile_source("k = 3\nf : Real\nf = k\n").typed
    assert pretty(decl_type(typed.lookup("k"))) == "Real"


def test_signatures_are_inferred_from_bodies():
    typed = compile_source("f x = x <= 1.5\n").typed
    assert pretty(decl_type(typed.lookup("f"))) == "Real -> Bool"


def test_parameters_have_their_declared_types():
    typed = compile_corpus("pk").typed
    assert pretty(decl_type(typed.lookup("Ka"))) == "Real"
    assert pretty(decl_type(typed.lookup("pk"))) == "Tensor Real [5] -> Tensor Real [1]"


def test_standard_checking_leaves_no_polymorphic_copies():
    typed = compile_corpus("decidability").typed
    assert [d.name for d in typed.decls] == ["f", "neg", "calc", "safe"]
    assert typed.origins == {}


def test_multi_argument_application_resolves_shapes():
    typed = compile_source("f : Tensor Real [3] -> Tensor Real [3] -> Bool\nf x y = x + y <= [1, 2, 3]\n").typed
    body = typed.lookup("f").body
    assert not has_unknowns(body)


@pytest.mark.parametrize(
    "source, error",
    [
        ("f : Bool\nf = 1.5\n", UnificationFailure),
        ("f : Real -> Real\nf x = x x\n", NotAFunction),
        ("f x = x\n", UnresolvableConstraint),
        ("f : Bool -> Bool\nf x = x <= 1\n", UnificationFailure),
        ("@property\np = 1\n", TypeMismatch),
        ("f : Index 2\nf = 2\n", IndexOutOfBounds),
        ("f = g\n", UnboundVariable),
        ("f = True\nf = False\n", DuplicateDeclaration),
        ("@network\nn : Real -> Bool\n", NetworkTypeInvalid),
        ("f : Tensor Real [2]\nf = [1, 2, 3]\n", ShapeMismatch),
        ("f = 5 ! 0\n", ShapeMismatch),
    ],
)
def test_ill_typed_specs_are_rejected(source, error):
    with pytest.raises(error):
        compile_source(source)


def test_shape_mismatch_is_a_type_mismatch():
    assert issubclass(ShapeMismatch, TypeMismatch)


def test_diagnostics_name_local_variables():
    with pytest.raises(NotAFunction) as info:
        compile_source("f : Real -> Real\nf x = x x\n")
    assert str(info.value).startswith("x has type Real")


def test_diagnostic_rendering_points_at_the_declaration():
    src = "f : Bool\nf = True\n\ng : Bool\ng = 2.5\n"
    with pytest.raises(UnificationFailure) as info:
        compile_source(src)
    assert info.value.render("s.vcl", src).startswith("s.vcl:5:")


def test_typed_functions_are_lambdas_over_annotated_binders():
    f = compile_corpus("car").typed.lookup("safeInput")
    assert isinstance(f, Function)
    assert pretty(f.body.ann) == "Tensor Real [2]"
    assert isinstance(f.body.body, App)
