"""Prover backends over the elaborated ITP IR."""

from __future__ import annotations

from dataclasses import replace

from vspec.backends.agda import emit_agda
from vspec.backends.common import EXTENSIONS, TARGETS, EmissionError, EmitOptions, EmitTarget, MissingCache
from vspec.backends.imandra import emit_imandra
from vspec.backends.isabelle import emit_isabelle
from vspec.backends.rocq import emit_rocq

_EMITTERS = {"Agda": emit_agda, "Rocq": emit_rocq, "Isabelle": emit_isabelle, "Imandra": emit_imandra}


def emit(target: EmitTarget | str, ir, opts: EmitOptions | None = None) -> str:
    if isinstance(target, str):
        target = EmitTarget(target)
    opts = opts or EmitOptions()
    if target.constructive_reals:
        opts = replace(opts, constructive_reals=True)
    return _EMITTERS[target.name](ir, opts)


__all__ = [
    "emit",
    "emit_agda",
    "emit_rocq",
    "emit_isabelle",
    "emit_imandra",
    "EmitOptions",
    "EmitTarget",
    "EmissionError",
    "MissingCache",
    "TARGETS",
    "EXTENSIONS",
]
