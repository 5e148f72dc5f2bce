"""Boundary to external neural-network verifiers.

Two kinds of solver are supported: ``mock:<file>`` reads a status table, and
``external:<command>`` runs a program that prints ``property<TAB>status`` lines.
"""

from __future__ import annotations

import shlex
import subprocess
from dataclasses import dataclass, field
from fractions import Fraction
from math import prod
from pathlib import Path
from typing import Union

from vspec import cache
from vspec.core.builtins import StdOp
from vspec.core.syntax import Builtin, Expr, Lam, Property, Spec, Vis, spine
from vspec.errors import VspecError
from vspec.interp import Environment, Evaluator, TensorV, BoolV
from vspec.rationals import format_ratio, parse_rational
from vspec.typecheck.alphabet import STANDARD
from vspec.typecheck.pipeline import tensor_shape


class SolverError(VspecError):
    pass


class UnknownSolver(SolverError):
    pass


class MissingPropertyResult(SolverError):
    def __init__(self, name: str, source: str = "solver output"):
        super().__init__(f"{source} has no entry for property '{name}'")
        self.name = name


class MockFileMissingProperty(MissingPropertyResult):
    def __init__(self, name: str):
        super().__init__(name, "mock table")


class ExternalCommandFailed(SolverError):
    def __init__(self, code: int, stderr: str):
        excerpt = stderr.strip()[:200]
        super().__init__(f"solver command exited with status {code}" + (f": {excerpt}" if excerpt else ""))
        self.code = code
        self.stderr = excerpt


class CounterexampleShapeError(SolverError):
    pass


class StatusFormatError(SolverError):
    pass


@dataclass(frozen=True)
class Verified:
    pass


@dataclass(frozen=True)
class Falsified:
    # one flat element list covering the quantified variables in order
    counterexample: tuple[Fraction, ...] = ()


@dataclass(frozen=True)
class Unknown:
    pass


SolverStatus = Union[Verified, Falsified, Unknown]


@dataclass(frozen=True)
class SolverResult:
    solver: str
    statuses: dict[str, SolverStatus] = field(default_factory=dict)

    @property
    def all_verified(self) -> bool:
        return all(isinstance(s, Verified) for s in self.statuses.values())


def parse_status(text: str) -> SolverStatus:
    t = text.strip()
    if t == "verified":
        return Verified()
    if t == "unknown":
        return Unknown()
    if t.startswith("falsified"):
        rest = t[len("falsified") :]
        if rest and not rest.startswith(":"):
            raise StatusFormatError(f"bad status {text!r}")
        elems = rest[1:]
        try:
            return Falsified(tuple(parse_rational(x) for x in elems.split(",") if x.strip()))
        except ValueError as e:
            raise StatusFormatError(f"bad counterexample in {text!r}: {e}") from None
    raise StatusFormatError(f"bad status {text!r}; expected verified, falsified:<values> or unknown")


def status_text(s: SolverStatus) -> str:
    match s:
        case Verified():
            return "verified"
        case Unknown():
            return "unknown"
        case Falsified(cex):
            return "falsified:" + ",".join(format_ratio(q) for q in cex)
    raise TypeError(s)


def parse_table(text: str) -> dict[str, SolverStatus]:
    out: dict[str, SolverStatus] = {}
    for i, line in enumerate(text.splitlines()):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        if "\t" not in line:
            raise StatusFormatError(f"line {i + 1}: expected 'property<TAB>status'")
        name, status = line.split("\t", 1)
        out[name.strip()] = parse_status(status)
    return out


def quantified_shapes(p: Property) -> list[tuple[int, ...]]:
    """Shapes of the leading quantified variables of a typed standard property."""
    shapes = []
    body: Expr = p.body
    while True:
        head, args = spine(body)
        explicit = [a for a, v in args if v is Vis.EXPLICIT]
        if isinstance(head, Builtin) and head.b is StdOp.FORALL and len(explicit) == 1 and isinstance(explicit[0], Lam):
            lam = explicit[0]
            shape = tensor_shape(lam.ann, STANDARD)
            if shape is None:
                raise CounterexampleShapeError(f"quantified variable of '{p.name}' is not a tensor")
            shapes.append(shape)
            body = lam.body
            continue
        return shapes


def split_counterexample(p: Property, cex: tuple[Fraction, ...]) -> list[TensorV]:
    shapes = quantified_shapes(p)
    need = sum(prod(s) for s in shapes)
    if len(cex) != need:
        shown = ", ".join(str(list(s)) for s in shapes) or "none"
        raise CounterexampleShapeError(f"counterexample for '{p.name}' has {len(cex)} values; quantified shapes are {shown}")
    out, i = [], 0
    for s in shapes:
        n = prod(s)
        out.append(TensorV(s, tuple(cex[i : i + n])))
        i += n
    return out


def validate(spec: Spec, statuses: dict[str, SolverStatus]) -> None:
    for p in spec.decls:
        if isinstance(p, Property) and isinstance(statuses.get(p.name), Falsified):
            split_counterexample(p, statuses[p.name].counterexample)


def counterexample_holds(spec: Spec, prop: str, cex: tuple[Fraction, ...], env: Environment) -> bool:
    """Truth value of the property's matrix at the counterexample; False means it really falsifies."""
    p = spec.lookup(prop)
    assert isinstance(p, Property)
    values = tuple(split_counterexample(p, cex))
    body: Expr = p.body
    for _ in values:
        body = [a for a, v in spine(body)[1] if v is Vis.EXPLICIT][0].body
    v = Evaluator(env).eval(body, values)
    assert isinstance(v, BoolV)
    return v.b


def _select(spec: Spec, table: dict[str, SolverStatus], missing) -> dict[str, SolverStatus]:
    out = {}
    for d in spec.decls:
        if isinstance(d, Property):
            if d.name not in table:
                raise missing(d.name)
            out[d.name] = table[d.name]
    return out


def run_solver(
    kind: str,
    spec: Spec,
    bindings: dict[str, str] | None = None,
    params: dict[str, Fraction] | None = None,
    spec_path: str = "",
) -> SolverResult:
    bindings, params = bindings or {}, params or {}
    scheme, sep, arg = kind.partition(":")
    if not sep or not arg:
        raise UnknownSolver(f"solver must be 'mock:<file>' or 'external:<command>', not {kind!r}")
    if scheme == "mock":
        try:
            text = Path(arg).read_text(encoding="utf-8")
        except OSError as e:
            raise cache.CacheIOError(arg, e.strerror or str(e)) from None
        statuses = _select(spec, parse_table(text), MockFileMissingProperty)
    elif scheme == "external":
        argv = shlex.split(arg) + [spec_path]
        argv += [x for n, p in bindings.items() for x in ("-n", f"{n}:{p}")]
        argv += [x for n, q in params.items() for x in ("-p", f"{n}:{format_ratio(Fraction(q))}")]
        try:
            proc = subprocess.run(argv, capture_output=True, text=True)
        except OSError as e:
            raise ExternalCommandFailed(127, str(e)) from None
        if proc.returncode != 0:
            raise ExternalCommandFailed(proc.returncode, proc.stderr)
        statuses = _select(spec, parse_table(proc.stdout), MissingPropertyResult)
    else:
        raise UnknownSolver(f"unknown solver kind {scheme!r}")
    validate(spec, statuses)
    return SolverResult(kind, statuses)


def to_cache_status(s: SolverStatus, solver: str, timestamp: str) -> cache.Status:
    match s:
        case Verified():
            return cache.Verified(solver, timestamp)
        case Falsified():
            return cache.Failed()
    return cache.Unknown()
