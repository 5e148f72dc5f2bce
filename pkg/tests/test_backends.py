"""Backend output checks. Set VSPEC_UPDATE_GOLDEN=1 to rewrite tests/golden."""

from __future__ import annotations

import os
import re

import pytest

from conftest import CORPUS_NAMES, GOLDEN, PK_PARAMS, compile_corpus
from vspec.backends import EXTENSIONS, TARGETS, EmissionError, EmitOptions, MissingCache, emit
from vspec.backends.common import header_text, to_snake
from vspec.core.syntax import Function, Network, Parameter, Property
from vspec.driver import compile_source, substitute_parameters
from vspec.itp_ir import to_itp_ir
from vspec.rationals import parse_rational

OPTS = EmitOptions(module="Spec", cache_ref="cache/manifest")
VARIANTS = [(t, False) for t in TARGETS] + [("Rocq", True)]


def corpus_ir(name: str):
    core = compile_corpus(name).core
    if name == "pk":
        core = substitute_parameters(core, {k: parse_rational(v) for k, v in PK_PARAMS.items()})
    return to_itp_ir(core)


def render(name: str, target: str, constructive: bool = False) -> str:
    opts = EmitOptions(module="Spec", cache_ref="cache/manifest", constructive_reals=constructive)
    return emit(target, corpus_ir(name), opts)


def golden_path(name: str, target: str, constructive: bool):
    suffix = ".constructive" if constructive else ""
    return GOLDEN / f"{name}{suffix}{EXTENSIONS[target]}"


@pytest.mark.parametrize("name", CORPUS_NAMES)
@pytest.mark.parametrize("target, constructive", VARIANTS)
def test_golden_output(name, target, constructive):
    text = render(name, target, constructive)
    path = golden_path(name, target, constructive)
    if os.environ.get("VSPEC_UPDATE_GOLDEN"):
        path.parent.mkdir(exist_ok=True)
        path.write_text(text, encoding="utf-8")
    assert text == path.read_text(encoding="utf-8")


@pytest.mark.parametrize("name", CORPUS_NAMES)
@pytest.mark.parametrize("target", TARGETS)
def test_every_declaration_is_emitted(name, target):
    ir = corpus_ir(name)
    text = emit(target, ir, OPTS)
    for d in ir.decls:
        origin = ir.origins[d.name].origin if d.name in ir.origins else d.name
        shown = to_snake(origin) if target == "Imandra" else origin
        assert re.search(rf"\b{re.escape(shown)}", text, re.IGNORECASE), (d.name, target)


@pytest.mark.parametrize("name", CORPUS_NAMES)
@pytest.mark.parametrize("target", TARGETS)
def test_no_internal_names_leak(name, target):
    text = emit(target, corpus_ir(name), OPTS)
    for word in ("boolTC", "notTC", "Booleans", "InstanceMeta", "Standard("):
        assert word not in text, word
    # unsolved metas would print as ?N
    assert not re.search(r"\?\d|\b(BI|TI)\b", text)


def test_header_carries_the_spec_hash():
    text = render("car", "Isabelle")
    assert text.splitlines()[0].startswith("(* Generated by vspec")
    assert re.search(r"sha256:[0-9a-f]{64}", text.splitlines()[0])


def test_header_is_a_comment_in_every_target():
    assert header_text("0" * 64).startswith("Generated by vspec")


def test_shapes_are_rendered_faithfully():
    assert "Tensor ℝ (2 ∷ []) → Tensor ℝ (1 ∷ [])" in render("car", "Agda")
    assert "tensor R [:: 5]" in render("pk", "Rocq")
    isabelle = render("car", "Isabelle")
    assert 'typedef InputVector = "{ a :: real tensor. (dims a) = [2] }"' in isabelle
    assert 'typedef OutputVector = "{ a :: real tensor. (dims a) = [1] }"' in isabelle
    assert "Fin 2" in render("car", "Agda")


def test_specialisations_are_both_emitted():
    for target in TARGETS:
        text = render("decidability", target)
        names = ("neg_bool", "neg_type") if target == "Imandra" else ("negBool", "negType")
        assert all(n in text for n in names), target


@pytest.mark.parametrize("target", TARGETS)
def test_empty_spec(target):
    text = emit(target, to_itp_ir(compile_source("").core), OPTS)
    assert "Generated by vspec" in text.splitlines()[0]
    assert "locale" not in text


def test_no_locale_without_networks_or_properties():
    ir = to_itp_ir(compile_source("f : Real\nf = 1.0\n").core)
    assert "locale" not in emit("Isabelle", ir, OPTS)


def test_locale_name_defaults_to_module_and_can_be_overridden():
    ir = corpus_ir("car")
    assert "locale Spec =" in emit("Isabelle", ir, OPTS)
    assert "locale WindCtrl =" in emit("Isabelle", ir, EmitOptions(module="Spec", locale="WindCtrl"))


def test_imandra_snake_case_collision_is_an_error():
    ir = to_itp_ir(compile_source("fooBar : Real\nfooBar = 1.0\nfoo_bar : Real\nfoo_bar = 2.0\n").core)
    with pytest.raises(EmissionError):
        emit("Imandra", ir, OPTS)


def test_agda_property_needs_a_cache():
    with pytest.raises(MissingCache):
        emit("Agda", corpus_ir("car"), EmitOptions(module="Spec"))


def test_agda_network_path_comes_from_the_bindings():
    text = emit("Agda", corpus_ir("car"), EmitOptions(module="Spec", cache_ref="c/manifest", network_paths={"controller": "models/c.onnx"}))
    assert 'controller = callNetwork "models/c.onnx"' in text


def test_lifted_booleans():
    ir = to_itp_ir(compile_source("g x = if x then x else x\n@property\np = g True\n").core)
    assert "p : T (g true)" in emit("Agda", ir, OPTS)
    assert "Axiom p : is_true (g true)." in emit("Rocq", ir, OPTS)
    assert 'assumes p: "(g True)"' in emit("Isabelle", ir, OPTS)
    assert "axiom p = g true" in emit("Imandra", ir, OPTS)


def test_kept_parameters_stay_abstract():
    ir = to_itp_ir(compile_corpus("pk").core)
    assert "Parameter Ka : R." in emit("Rocq", ir, OPTS)
    assert "postulate" in emit("Agda", ir, OPTS)


def test_rocq_literal_encodings():
    ir = to_itp_ir(compile_source("f : Real\nf = 3.25\n").core)
    assert "(13%:R / 4%:R)" in emit("Rocq", ir, OPTS)
    assert "(Q2R (13 # 4))" in emit("Rocq", ir, EmitOptions(module="Spec", constructive_reals=True))


def test_substituted_pk_has_no_parameters_left():
    kinds = {type(d) for d in corpus_ir("pk").decls}
    assert kinds == {Function, Network, Property}
    assert Parameter not in kinds


@pytest.mark.parametrize("name, snake", [("safeInput", "safe_input"), ("C_safe", "c_safe"), ("Ka_pos", "ka_pos"), ("x", "x"), ("normpk", "normpk")])
def test_snake_case(name, snake):
    assert to_snake(name) == snake


def test_substituted_parameters_become_literals():
    assert "axiom ka_pos = 0.0 <. 3.5" in render("pk", "Imandra")
    assert "ka_pos = 0.0 <. ka" in emit("Imandra", to_itp_ir(compile_corpus("pk").core), OPTS)
