"""Front-end driver shared by the CLI and tests: source text to typed specs."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from vspec.core.builtins import NLit, StdOp, TLit
from vspec.core.ops import transform
from vspec.core.syntax import Builtin, Function, Network, Parameter, Property, Ref, Spec
from vspec.errors import VspecError
from vspec.itp_ir import to_itp_ir
from vspec.surface.ast import SurfaceSpec
from vspec.surface.desugar import desugar
from vspec.surface.parser import parse_spec
from vspec.typecheck.alphabet import STANDARD
from vspec.typecheck.pipeline import tensor_shape, type_spec


class ParameterTypeError(VspecError):
    pass


@dataclass(frozen=True)
class Compiled:
    surface: SurfaceSpec
    core: Spec
    typed: Spec


def compile_source(source: str) -> Compiled:
    surface = parse_spec(source)
    core = desugar(surface)
    return Compiled(surface, core, type_spec(core))


def parameter_names(s: Spec) -> list[str]:
    return [d.name for d in s.decls if isinstance(d, Parameter)]


def _literal_for(p: Parameter, q: Fraction) -> Builtin:
    if tensor_shape(p.type, STANDARD) == ():
        return Builtin(TLit.scalar(q))
    if isinstance(p.type, Builtin) and p.type.b is StdOp.NAT:
        if q.denominator != 1 or q < 0:
            raise ParameterTypeError(f"parameter '{p.name}' is a natural number, not {q}")
        return Builtin(NLit(int(q)))
    raise ParameterTypeError(f"parameter '{p.name}' must be Real or Nat to take a numeric value")


def substitute_parameters(s: Spec, values: dict[str, Fraction]) -> Spec:
    """Replace each parameter that has a value by its literal and drop its declaration."""
    lits = {}
    for d in s.decls:
        if isinstance(d, Parameter) and d.name in values:
            lits[d.name] = _literal_for(d, Fraction(values[d.name]))

    def f(node, depth):
        if isinstance(node, Ref) and node.name in lits:
            return lits[node.name]
        return None

    out = []
    for d in s.decls:
        match d:
            case Parameter() if d.name in lits:
                continue
            case Function():
                out.append(Function(d.name, transform(d.type, f), transform(d.body, f), d.alias, d.span))
            case Property():
                out.append(Property(d.name, transform(d.body, f), d.span))
            case Network() | Parameter():
                out.append(type(d)(d.name, transform(d.type, f), d.span))
    return Spec(tuple(out), dict(s.origins))


def compile_ir(core: Spec) -> Spec:
    return to_itp_ir(core)
