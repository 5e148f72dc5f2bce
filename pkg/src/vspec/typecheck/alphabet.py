"""The interface an alphabet of builtins implements to be type-checked."""

from __future__ import annotations

from typing import Callable

from vspec.core.builtins import StdOp, std_type
from vspec.core.syntax import Builtin, Expr
from vspec.core.ops import map_builtins

Force = Callable[[Expr], Expr]


class TypableAlphabet:
    """Default implementation: the standard alphabet embedded as itself."""

    name = "standard"

    def convert(self, b) -> Expr:
        return Builtin(b)

    def type_of(self, b) -> Expr:
        return std_type(b)

    def property_sort(self) -> Expr:
        return Builtin(StdOp.BOOL)

    # -- hooks used by the checker and solver -----------------------------

    def std(self, b) -> Expr:
        """The alphabet's term for a standard builtin that is never overloaded."""
        return Builtin(b)

    def as_std(self, payload):
        """Standard builtin a payload denotes, if any."""
        return payload

    def reduce(self, b, args, force: Force) -> Expr | None:
        return None

    def describe(self, b):
        return b

    def is_sort_projection(self, b) -> bool:
        """True for ``boolTC``: the class projection whose value is a sort."""
        return False

    def instance_for_sort(self, sort: Expr) -> Expr | None:
        """Instance forced when ``boolTC ?i`` must equal ``sort``."""
        return None

    def instance_class(self) -> Expr | None:
        return None

    def instance_tag(self, e: Expr) -> str | None:
        """``"BI"``/``"TI"`` for a concrete instance term, else None."""
        return None

    def instance_term(self, tag: str) -> Expr:
        raise NotImplementedError

    def is_class_op(self, b) -> bool:
        return False

    def lift(self) -> Expr | None:
        """Coercion from the Boolean sort to the propositional sort, if the alphabet has one."""
        return None

    def sort_of(self, t: Expr) -> str:
        """Classify a weak-head-normal type: ``BI``, ``TI``, ``open`` (undecided) or ``other``."""
        return "other"

    def convert_expr(self, e: Expr) -> Expr:
        """Apply ``convert`` to every builtin (the first step of ``type_decl``)."""
        return map_builtins(e, self.convert)


class StandardAlphabet(TypableAlphabet):
    pass


STANDARD = StandardAlphabet()
