"""Reference evaluator for ground, quantifier-free core and IR terms.

Implicit and instance arguments carry no runtime content and are skipped.
Type-level Boolean builtins evaluate exactly like their Boolean twins, which
is the convention the translation-soundness tests rely on.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import prod
from typing import Callable, Union

from vspec.core.builtins import BLit, NLit, Stack, StdOp, TLit
from vspec.core.syntax import App, Builtin, Expr, Function, Lam, Network, Parameter, Property, Ref, Spec, Universe, Var, Vis, spine
from vspec.errors import VspecError
from vspec.rationals import parse_rational


class EvalError(VspecError):
    pass


class UnboundNetwork(EvalError):
    pass


class ForallNotEvaluable(EvalError):
    pass


class ShapeFault(EvalError):
    pass


@dataclass(frozen=True)
class BoolV:
    b: bool


@dataclass(frozen=True)
class NatV:
    n: int


@dataclass(frozen=True)
class IndexV:
    i: int
    bound: int

    def __post_init__(self):
        if not 0 <= self.i < self.bound:
            raise ShapeFault(f"index {self.i} out of range {self.bound}")


@dataclass(frozen=True)
class TensorV:
    shape: tuple[int, ...]
    elems: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.elems) != prod(self.shape):
            raise ShapeFault(f"{len(self.elems)} elements cannot have shape {list(self.shape)}")

    @staticmethod
    def scalar(q) -> TensorV:
        return TensorV((), (Fraction(q),))

    @staticmethod
    def vector(qs) -> TensorV:
        qs = tuple(Fraction(q) for q in qs)
        return TensorV((len(qs),), qs)


@dataclass(frozen=True)
class ClosureV:
    env: tuple
    lam: Lam


@dataclass(frozen=True)
class PrimV:
    """Partially applied builtin."""

    op: object
    arity: int
    args: tuple = ()


@dataclass(frozen=True)
class NetworkV:
    name: str


Value = Union[BoolV, NatV, IndexV, TensorV, ClosureV, PrimV, NetworkV]


# ---------------------------------------------------------------------------
# Networks


@dataclass(frozen=True)
class AffineNetwork:
    """``y = W x + b`` over the flattened input; output reshaped to ``out_shape`` when given."""

    weights: tuple[tuple[Fraction, ...], ...]
    bias: tuple[Fraction, ...]
    out_shape: tuple[int, ...] | None = None

    def __post_init__(self):
        if any(len(r) != len(self.weights[0]) for r in self.weights) or len(self.weights) != len(self.bias):
            raise ShapeFault("affine network needs one weight row per bias entry, all of equal length")

    @property
    def in_size(self) -> int:
        return len(self.weights[0])

    def __call__(self, x: TensorV) -> TensorV:
        if len(x.elems) != self.in_size:
            raise ShapeFault(f"network expects {self.in_size} inputs, got {len(x.elems)}")
        ys = tuple(sum((w * v for w, v in zip(row, x.elems)), Fraction(0)) + b for row, b in zip(self.weights, self.bias))
        return TensorV(self.out_shape if self.out_shape is not None else (len(ys),), ys)


@dataclass(frozen=True)
class TableNetwork:
    """Finite function from input element tuples to output tensors."""

    table: dict = field(hash=False)

    def __call__(self, x: TensorV) -> TensorV:
        try:
            return self.table[x.elems]
        except KeyError:
            raise ShapeFault(f"no table entry for input {[str(e) for e in x.elems]}") from None


NetworkBinding = Callable[[TensorV], TensorV]


def _row(text: str) -> tuple[Fraction, ...]:
    return tuple(parse_rational(t) for t in text.replace(",", " ").split())


def parse_network(text: str) -> NetworkBinding:
    """Read ``affine <rows separated by |> ; <bias>`` or a ``table`` of ``in -> out`` lines."""
    body = "\n".join(line.split("#", 1)[0] for line in text.splitlines()).strip()
    if body.startswith("affine"):
        rest = body[len("affine") :]
        if ";" not in rest:
            raise ValueError("affine network needs '; <bias>'")
        w, b = rest.split(";", 1)
        rows = tuple(_row(r) for r in w.split("|") if r.strip())
        return AffineNetwork(rows, _row(b))
    if body.startswith("table"):
        table = {}
        for line in body.splitlines()[1:]:
            if not line.strip():
                continue
            lhs, rhs = line.split("->")
            out = _row(rhs)
            table[_row(lhs)] = TensorV((len(out),), out)
        return TableNetwork(table)
    raise ValueError("network file must start with 'affine' or 'table'")


# ---------------------------------------------------------------------------
# Evaluation


def _op_of(b):
    """Standard builtin denoted by a payload of either alphabet."""
    from vspec.itp_ir import Coercion, Standard, TypeOp, twin

    if b is Coercion.LIFT:
        return _LIFT
    if isinstance(b, Standard):
        return b.b
    if isinstance(b, TypeOp):
        return twin(b)
    return b


# classically a lifted Boolean is the Boolean itself
_LIFT = "lift"

_ARITY = {
    StdOp.NOT: 1,
    StdOp.NEG: 1,
    StdOp.FORALL: 1,
    StdOp.IF: 3,
    StdOp.LOOKUP: 2,
}


def _arity(op) -> int:
    if isinstance(op, Stack):
        return op.arity
    return _ARITY.get(op, 2)


@dataclass
class Environment:
    spec: Spec = field(default_factory=Spec)
    networks: dict[str, NetworkBinding] = field(default_factory=dict)
    parameters: dict[str, Value] = field(default_factory=dict)
    _cache: dict[str, Value] = field(default_factory=dict)


def _tensor(v: Value) -> TensorV:
    if not isinstance(v, TensorV):
        raise ShapeFault(f"expected a tensor, got {v!r}")
    return v


def _same_shape(a: TensorV, b: TensorV) -> None:
    if a.shape != b.shape:
        raise ShapeFault(f"shapes {list(a.shape)} and {list(b.shape)} differ")


def _bool(v: Value) -> bool:
    if not isinstance(v, BoolV):
        raise ShapeFault(f"expected a Boolean, got {v!r}")
    return v.b


_CMP = {
    StdOp.LEQ: lambda x, y: x <= y,
    StdOp.LT: lambda x, y: x < y,
    StdOp.EQ: lambda x, y: x == y,
    StdOp.NEQ: lambda x, y: x != y,
}
_ARITH = {
    StdOp.ADD: lambda x, y: x + y,
    StdOp.SUB: lambda x, y: x - y,
    StdOp.MUL: lambda x, y: x * y,
    StdOp.DIV: lambda x, y: x / y,
}


class Evaluator:
    def __init__(self, env: Environment):
        self.env = env

    def literal(self, op) -> Value:
        match op:
            case NLit(value=v, index_bound=None):
                return NatV(v)
            case NLit(value=v, index_bound=n):
                return IndexV(v, n)
            case BLit(value=v):
                return BoolV(v)
            case TLit(shape=s, elems=es):
                return TensorV(s, es)
        return PrimV(op, _arity(op))

    def apply_prim(self, op, args: tuple[Value, ...]) -> Value:
        match op:
            case StdOp.NOT:
                return BoolV(not _bool(args[0]))
            case StdOp.AND:
                return BoolV(_bool(args[0]) and _bool(args[1]))
            case StdOp.OR:
                return BoolV(_bool(args[0]) or _bool(args[1]))
            case StdOp.IMPLIES:
                return BoolV((not _bool(args[0])) or _bool(args[1]))
            case StdOp.NEG:
                t = _tensor(args[0])
                return TensorV(t.shape, tuple(-x for x in t.elems))
            case StdOp.LOOKUP:
                t, i = _tensor(args[0]), args[1]
                k = i.i if isinstance(i, IndexV) else i.n if isinstance(i, NatV) else None
                if k is None or not t.shape or not 0 <= k < t.shape[0]:
                    raise ShapeFault(f"cannot index tensor of shape {list(t.shape)} with {i!r}")
                n = len(t.elems) // t.shape[0]
                return TensorV(t.shape[1:], t.elems[k * n : (k + 1) * n])
            case StdOp.IF:
                return args[1] if _bool(args[0]) else args[2]
            case StdOp.FORALL:
                raise ForallNotEvaluable("quantified expressions cannot be evaluated")
            case Stack():
                ts = [_tensor(a) for a in args]
                for t in ts[1:]:
                    _same_shape(ts[0], t)
                return TensorV((len(ts),) + ts[0].shape, tuple(x for t in ts for x in t.elems))
        if op in _CMP:
            a, b = _tensor(args[0]), _tensor(args[1])
            _same_shape(a, b)
            f = _CMP[op]
            return BoolV(all(f(x, y) for x, y in zip(a.elems, b.elems)))
        if op in _ARITH:
            a, b = _tensor(args[0]), _tensor(args[1])
            _same_shape(a, b)
            try:
                return TensorV(a.shape, tuple(_ARITH[op](x, y) for x, y in zip(a.elems, b.elems)))
            except ZeroDivisionError:
                raise EvalError("division by zero") from None
        raise EvalError(f"cannot evaluate builtin {op!r}")

    def apply(self, f: Value, arg: Value) -> Value:
        match f:
            case ClosureV(env, lam):
                return self.eval(lam.body, env + (arg,))
            case PrimV(op, arity, args):
                args = args + (arg,)
                return self.apply_prim(op, args) if len(args) == arity else PrimV(op, arity, args)
            case NetworkV(name):
                if name not in self.env.networks:
                    raise UnboundNetwork(f"no binding for network '{name}'")
                x = _tensor(arg)
                return self._check_network_shapes(name, x, self.env.networks[name](x))
        raise EvalError(f"cannot apply {f!r}")

    def _check_network_shapes(self, name: str, x: TensorV, y: TensorV) -> TensorV:
        from vspec.typecheck.pipeline import network_signature
        from vspec.itp_ir import DECIDABILITY
        from vspec.typecheck.alphabet import STANDARD

        d = self.env.spec.lookup(name)
        sig = None if d is None else network_signature(d.type, STANDARD) or network_signature(d.type, DECIDABILITY)
        if sig is None:
            return y
        ins, outs = sig
        if x.shape != ins:
            raise ShapeFault(f"network '{name}' expects shape {list(ins)}, got {list(x.shape)}")
        if len(y.elems) != prod(outs):
            raise ShapeFault(f"network '{name}' must return shape {list(outs)}, got {list(y.shape)}")
        return TensorV(outs, y.elems)

    def ref(self, name: str) -> Value:
        if name in self.env._cache:
            return self.env._cache[name]
        d = self.env.spec.lookup(name)
        match d:
            case Function(body=b) | Property(body=b):
                v = self.eval(b, ())
            case Network():
                v = NetworkV(name)
            case Parameter():
                if name not in self.env.parameters:
                    raise EvalError(f"no value for parameter '{name}'")
                v = self.env.parameters[name]
            case _:
                if name in self.env.networks:
                    return NetworkV(name)
                raise EvalError(f"unknown declaration '{name}'")
        self.env._cache[name] = v
        return v

    def eval(self, e: Expr, local: tuple = ()) -> Value:
        match e:
            case Var(ix):
                return local[-1 - ix]
            case Ref(name):
                return self.ref(name)
            case Lam():
                if e.vis is not Vis.EXPLICIT:
                    return self.eval(e.body, local + (None,))
                return ClosureV(local, e)
            case Builtin(b):
                return self.literal(_op_of(b))
            case App():
                head, args = spine(e)
                args = [a for a, v in args if v is Vis.EXPLICIT]
                if isinstance(head, Builtin) and _op_of(head.b) == _LIFT and len(args) == 1:
                    return self.eval(args[0], local)
                if isinstance(head, Builtin) and _op_of(head.b) is StdOp.IF and len(args) == 3:
                    c = _bool(self.eval(args[0], local))
                    return self.eval(args[1] if c else args[2], local)
                f = self.eval(head, local)
                for a in args:
                    f = self.apply(f, self.eval(a, local))
                return f
            case Universe():
                raise EvalError("types have no runtime value")
        raise EvalError(f"cannot evaluate {e!r}")


def eval_expr(env: Environment, e: Expr, local: tuple = ()) -> Value:
    return Evaluator(env).eval(e, local)


def eval_decl(env: Environment, name: str, *args: Value) -> Value:
    ev = Evaluator(env)
    v = ev.ref(name)
    for a in args:
        v = ev.apply(v, a)
    return v
