from __future__ import annotations

import pytest

from conftest import compile_corpus
from vspec.core.builtins import StdOp
from vspec.core.ops import subterms
from vspec.core.pretty import pretty, pretty_spec
from vspec.core.syntax import Builtin, InstanceMeta, Meta, Property, decl_type
from vspec.driver import compile_source
from vspec.errors import UnificationFailure
from vspec.itp_ir import DECIDABILITY, ClassOp, Coercion, Standard, TypeOp, erase, recheck, to_itp_ir, twin
from vspec.surface.desugar import desugar
from vspec.surface.parser import parse_spec

LIFTED = "g x = if x then x else x\n@property\np = g True\n"


def nodes(spec):
    for d in spec.decls:
        for part in (decl_type(d), getattr(d, "body", None)):
            if part is not None:
                yield from (n for n, _ in subterms(part))


def test_ir_has_no_unknowns_or_class_operations(corpus_name):
    ir = to_itp_ir(compile_corpus(corpus_name).core)
    for n in nodes(ir):
        assert not isinstance(n, (Meta, InstanceMeta))
        assert not (isinstance(n, Builtin) and isinstance(n.b, ClassOp))


def test_ir_rechecks(corpus_name):
    assert recheck(to_itp_ir(compile_corpus(corpus_name).core)) == []


def test_erasure_recovers_the_standard_spec(corpus_name):
    compiled = compile_corpus(corpus_name)
    assert erase(to_itp_ir(compiled.core)) == compiled.typed


def test_quantifiers_and_conditions_have_fixed_sorts():
    show = lambda op: pretty(DECIDABILITY.type_of(Standard(op)), DECIDABILITY.describe)  # noqa: E731
    assert show(StdOp.FORALL) == "{ds : List Nat} -> (Tensor Real ds -> Type) -> Type"
    assert show(StdOp.IF) == "{t : Type} -> Bool -> t -> t -> t"


def test_worked_example_splits_neg():
    ir = to_itp_ir(compile_corpus("decidability").core)
    text = pretty_spec(ir, DECIDABILITY.describe)
    assert "negBool : Bool -> Bool" in text
    assert "negType : Type -> Type" in text
    assert "calc x = if negBool (x <= 0) then 0 else 1" in text
    assert "safe = negType (forall x . leqType (calc x) (f x))" in text


def test_car_becomes_propositional_throughout():
    ir = to_itp_ir(compile_corpus("car").core)
    assert {o.origin: o.tags for o in ir.origins.values()} == {"safeInput": ("TI",), "safeOutput": ("TI",)}


def test_unused_polymorphic_function_is_kept_decidable():
    ir = to_itp_ir(compile_source("neg b = not b\n").core)
    assert [d.name for d in ir.decls] == ["negBool"]


def test_one_copy_per_instance_tuple():
    src = "both a b = a and b\nu : Bool\nu = both True False\n@property\np = both (forall x . x <= 0) (forall y . y <= 1)\n"
    ir = to_itp_ir(compile_source(src).core)
    assert sorted(n for n, o in ir.origins.items() if o.origin == "both") == ["bothBool", "bothType"]


def test_boolean_result_in_proposition_is_lifted():
    compiled = compile_source(LIFTED)
    ir = to_itp_ir(compiled.core)
    p = ir.lookup("p")
    assert any(isinstance(n, Builtin) and n.b is Coercion.LIFT for n, _ in subterms(p.body))
    assert recheck(ir) == []
    assert erase(ir) == compiled.typed


def test_lift_is_not_used_when_sorts_agree():
    for name in ("car", "decidability", "pk"):
        ir = to_itp_ir(compile_corpus(name).core)
        assert not any(isinstance(n, Builtin) and n.b is Coercion.LIFT for n in nodes(ir))


@pytest.mark.parametrize("op", list(TypeOp) + [c for c in ClassOp if c is not ClassOp.BOOL])
def test_every_ir_operation_has_a_standard_twin(op):
    assert twin(op) is not None


def test_ill_typed_spec_is_rejected_by_the_translation():
    with pytest.raises(UnificationFailure):
        to_itp_ir(desugar(parse_spec("f : Bool\nf = 1.5\n")))
