"""Tree-walking execution of a resolved program on top of :class:`Machine`."""

from __future__ import annotations

import math
import sys
import threading
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional

from . import nodes as n
from .analyzer import MEMORY_HANDLE, ProgramModel
from .errors import (
    ArityOrTypeError,
    AssertionFailed,
    AssignToSegmentField,
    CoplError,
    DivisionByZero,
    NoChildSegment,
    NoOutgoingMethod,
    ParentMismatch,
    RuntimeFault,
    UndefinedVariable,
    UnknownField,
)
from .formatting import format_value
from .runtime import (
    DEFAULT_MAX_DEPTH,
    UNBOUND,
    VOID,
    CharArray,
    ConceptValue,
    Frame,
    Machine,
    ObjectStore,
    Reference,
    TraceEvent,
    coerce,
    type_name,
    wrap_int,
)


class Return(NamedTuple):
    value: object


@dataclass
class RunFlags:
    trace: bool = False
    max_depth: int = DEFAULT_MAX_DEPTH


@dataclass
class ExecutionOutcome:
    stdout: str = ""
    trace: list[TraceEvent] = field(default_factory=list)
    error: Optional[CoplError] = None

    @property
    def ok(self) -> bool:
        return self.error is None

    @property
    def exit_code(self) -> int:
        return 0 if self.error is None else self.error.exit_code


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _text(v):
    return v.trimmed if isinstance(v, CharArray) else v


def values_equal(a, b) -> bool:
    if _is_number(a) and _is_number(b):
        return a == b
    if isinstance(a, (str, CharArray)) and isinstance(b, (str, CharArray)):
        if type(a) is type(b):
            return a == b
        return _text(a) == _text(b)
    return type(a) is type(b) and a == b


def _float_div(a: float, b: float) -> float:
    if b == 0.0:
        if a == 0.0 or math.isnan(a):
            return math.nan
        return math.copysign(math.inf, a) * math.copysign(1.0, b)
    return a / b


def _arith(op, a, b):
    if not (_is_number(a) and _is_number(b)):
        raise ArityOrTypeError(f"operator {op} needs numbers, got {type_name(a)} and {type_name(b)}")
    if isinstance(a, int) and isinstance(b, int):
        if op == "+":
            return wrap_int(a + b)
        if op == "-":
            return wrap_int(a - b)
        if op == "*":
            return wrap_int(a * b)
        if b == 0:
            raise DivisionByZero(f"integer {'division' if op == '/' else 'remainder'} by zero")
        # truncating division, remainder takes the dividend's sign
        q = abs(a) // abs(b)
        if (a < 0) != (b < 0):
            q = -q
        return wrap_int(q) if op == "/" else wrap_int(a - q * b)
    a, b = float(a), float(b)
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == "/":
        return _float_div(a, b)
    return math.nan if b == 0.0 else math.fmod(a, b)


class Interpreter(Machine):
    """Evaluates statements and expressions; one instance per program run.

    ``out`` receives each chunk of program output.
    """

    def __init__(self, model: ProgramModel, store: Optional[ObjectStore] = None,
                 max_depth: int = DEFAULT_MAX_DEPTH,
                 trace: Optional[Callable[[TraceEvent], None]] = None,
                 out: Optional[Callable[[str], None]] = None):
        super().__init__(model, store, max_depth, trace)
        self.out = out if out is not None else sys.stdout.write
        self.script = Frame(None, (), 0, "script")
        self._exprs = {
            n.IntLit: self._literal, n.FloatLit: self._literal,
            n.StringLit: self._literal, n.BoolLit: self._literal,
            n.Identifier: self._identifier, n.FieldAccess: self._field_access,
            n.MethodCall: self._method_call, n.Call: self._call,
            n.SuperCall: self._super_call, n.SubCall: self._sub_call,
            n.ThisExpr: self._this, n.ValueKeyword: self._value_keyword,
            n.NewExpr: self._new, n.ValueLiteral: self._value_literal,
            n.Binary: self._binary, n.Unary: self._unary,
        }
        self._stmts = {
            n.VarDecl: self._var_decl, n.Assign: self._assign, n.If: self._if,
            n.While: self._while, n.Return: self._return,
            n.ExprStmt: self._expr_stmt, n.Block: self._block,
        }

    # -- entry points -------------------------------------------------------

    def run_statements(self, statements) -> None:
        """Run top-level statements in the persistent script scope."""
        for s in statements:
            if isinstance(self.exec_stmt(s, self.script), Return):
                break

    def execute_body(self, frame: Frame, body: n.Block):
        signal = self.exec_stmt(body, frame)
        return signal.value if signal is not None else VOID

    def eval_expr(self, e, frame: Frame):
        try:
            return self._exprs[type(e)](e, frame)
        except RuntimeFault as err:
            if err.pos is None:
                err.pos = e.pos
            raise

    def exec_stmt(self, s, frame: Frame) -> Optional[Return]:
        """Execute one statement; a :class:`Return` signal means leave the body."""
        try:
            return self._stmts[type(s)](s, frame)
        except RuntimeFault as err:
            if err.pos is None:
                err.pos = s.pos
            raise

    def _args(self, args, frame):
        return [self.eval_expr(a, frame) for a in args]

    # -- statements ---------------------------------------------------------

    def _block(self, s: n.Block, frame):
        frame.scopes.append({})
        try:
            for stmt in s.body:
                signal = self.exec_stmt(stmt, frame)
                if signal is not None:
                    return signal
        finally:
            frame.scopes.pop()
        return None

    def _var_decl(self, s: n.VarDecl, frame):
        value = coerce(self.eval_expr(s.init, frame), s.type, self.model, f"variable {s.name!r}")
        frame.scopes[-1][s.name] = [s.type, value]

    def _assign(self, s: n.Assign, frame):
        value = self.eval_expr(s.value, frame)
        target = s.target
        if isinstance(target, n.Identifier):
            slot = frame.lookup(target.name)
            if slot is not None:
                slot[1] = coerce(value, slot[0], self.model, f"variable {target.name!r}")
                return None
            if frame.receiver is None or not self._set_member(
                    frame.receiver, target.name, value, frame, frame.level):
                raise UndefinedVariable(f"undefined variable {target.name!r}")
            return None
        if isinstance(target.target, n.ThisExpr):
            self._require_receiver(frame, "this")
            receiver, upto = frame.receiver, frame.level
        else:
            receiver, upto = self.eval_expr(target.target, frame), None
            if not isinstance(receiver, (Reference, ConceptValue)):
                raise ArityOrTypeError(f"cannot assign field {target.name!r} of a {type_name(receiver)}")
        if not self._set_member(receiver, target.name, value, frame, upto):
            raise UnknownField(f"no field or property {target.name!r} on {self._concept_at(receiver, upto)}")
        return None

    def _set_member(self, receiver, name, value, frame, upto=None) -> bool:
        found = self.find_member(receiver, name, upto)
        if found is None:
            return False
        kind, level, decl = found
        if kind == "field":
            owner = self.segments_of(receiver)[level].concept
            raise AssignToSegmentField(f"{owner}.{name} is part of the reference and cannot be assigned")
        self.run_property(receiver, level, decl, "set", value, frame.depth)
        return True

    def _if(self, s: n.If, frame):
        if self._condition(s.cond, frame):
            return self.exec_stmt(s.then, frame)
        if s.orelse is not None:
            return self.exec_stmt(s.orelse, frame)
        return None

    def _while(self, s: n.While, frame):
        while self._condition(s.cond, frame):
            signal = self.exec_stmt(s.body, frame)
            if signal is not None:
                return signal
        return None

    def _condition(self, e, frame) -> bool:
        v = self.eval_expr(e, frame)
        if not isinstance(v, bool):
            raise ArityOrTypeError(f"condition must be bool, got {type_name(v)}")
        return v

    def _return(self, s: n.Return, frame):
        return Return(VOID if s.value is None else self.eval_expr(s.value, frame))

    def _expr_stmt(self, s: n.ExprStmt, frame):
        self.eval_expr(s.expr, frame)
        return None

    # -- expressions --------------------------------------------------------

    def _literal(self, e, frame):
        return e.value

    def _require_receiver(self, frame, word):
        if frame.receiver is None:
            raise UndefinedVariable(f"'{word}' is only available inside a method")

    def _identifier(self, e: n.Identifier, frame):
        slot = frame.lookup(e.name)
        if slot is not None:
            return slot[1]
        if frame.receiver is not None:
            found = self.find_member(frame.receiver, e.name, frame.level)
            if found is not None:
                kind, level, what = found
                if kind == "field":
                    return what
                return self.run_property(frame.receiver, level, what, "get", depth=frame.depth)
        raise UndefinedVariable(f"undefined variable {e.name!r}")

    def _get_member(self, receiver, name, frame, upto=None):
        found = self.find_member(receiver, name, upto)
        if found is None:
            raise UnknownField(f"no field or property {name!r} on {self._concept_at(receiver, upto)}")
        kind, level, what = found
        if kind == "field":
            return what
        return self.run_property(receiver, level, what, "get", depth=frame.depth)

    def _concept_at(self, receiver, level=None) -> str:
        return self.segments_of(receiver)[-1 if level is None else level].concept

    def _field_access(self, e: n.FieldAccess, frame):
        if isinstance(e.target, n.ThisExpr):
            self._require_receiver(frame, "this")
            return self._get_member(frame.receiver, e.name, frame, frame.level)
        obj = self.eval_expr(e.target, frame)
        if not isinstance(obj, (Reference, ConceptValue)):
            raise ArityOrTypeError(f"a {type_name(obj)} has no field {e.name!r}")
        return self._get_member(obj, e.name, frame)

    def _method_call(self, e: n.MethodCall, frame):
        if isinstance(e.target, n.ThisExpr):
            self._require_receiver(frame, "this")
            return self.dispatch_internal(frame, e.name, self._args(e.args, frame))
        obj = self.eval_expr(e.target, frame)
        if not isinstance(obj, (Reference, ConceptValue)):
            raise ArityOrTypeError(f"cannot call method {e.name!r} on a {type_name(obj)}")
        return self.dispatch_external(obj, e.name, self._args(e.args, frame), frame.depth)

    def _call(self, e: n.Call, frame):
        args = self._args(e.args, frame)
        if e.name == "print":
            if len(args) != 1:
                raise ArityOrTypeError(f"print takes 1 argument, got {len(args)}")
            self.out(format_value(args[0]) + "\n")
            return VOID
        if e.name == "assert":
            if len(args) != 1 or not isinstance(args[0], bool):
                raise ArityOrTypeError("assert takes one bool argument")
            if not args[0]:
                raise AssertionFailed("assertion failed")
            return VOID
        if frame.receiver is None:
            raise UndefinedVariable(f"undefined function {e.name!r}")
        return self.dispatch_internal(frame, e.name, args)

    def _super_call(self, e: n.SuperCall, frame):
        if frame.receiver is None:
            raise NoOutgoingMethod(f"super.{e.name}: 'super' is only available inside a method")
        return self.dispatch_super(frame, e.name, self._args(e.args, frame))

    def _sub_call(self, e: n.SubCall, frame):
        if frame.receiver is None:
            raise NoChildSegment(f"sub.{e.name}: 'sub' is only available inside a method")
        return self.dispatch_sub(frame, e.name, self._args(e.args, frame))

    def _this(self, e, frame):
        self._require_receiver(frame, "this")
        return self.prefix(frame.receiver, frame.level)

    def _value_keyword(self, e, frame):
        if frame.setter_value is UNBOUND:
            raise UndefinedVariable("'value' is only bound inside a setter")
        return frame.setter_value

    def _new(self, e: n.NewExpr, frame):
        concept = self.model.concepts[e.concept]
        args = self._args(e.args, frame)
        if e.parent is not None:
            parent = self.eval_expr(e.parent, frame)
            if not isinstance(parent, Reference):
                raise ParentMismatch(f"parent of new {e.concept} must be a reference, got {type_name(parent)}")
        elif concept.parent is MEMORY_HANDLE or not concept.instantiable:
            parent = None
        elif frame.receiver is not None:
            parent = self.prefix(frame.receiver, frame.level)
            if not isinstance(parent, Reference):
                raise ParentMismatch(f"new {e.concept} needs an object as parent, not a plain value")
        else:
            raise ParentMismatch(f"new {e.concept} needs an 'in' clause naming its {concept.parent.name}")
        return self.instantiate(concept, parent, args)

    def _value_literal(self, e: n.ValueLiteral, frame):
        return self.make_value(self.model.concepts[e.concept], self._args(e.args, frame))

    def _binary(self, e: n.Binary, frame):
        op = e.op
        if op in ("&&", "||"):
            left = self._condition(e.left, frame)
            if left == (op == "||"):
                return left
            return self._condition(e.right, frame)
        a = self.eval_expr(e.left, frame)
        b = self.eval_expr(e.right, frame)
        if op == "==":
            return values_equal(a, b)
        if op == "!=":
            return not values_equal(a, b)
        if op in ("<", "<=", ">", ">="):
            if _is_number(a) and _is_number(b):
                pass
            elif isinstance(a, (str, CharArray)) and isinstance(b, (str, CharArray)):
                a, b = _text(a), _text(b)
            else:
                raise ArityOrTypeError(f"cannot compare {type_name(a)} with {type_name(b)}")
            if op == "<":
                return a < b
            if op == "<=":
                return a <= b
            if op == ">":
                return a > b
            return a >= b
        if op == "+" and (isinstance(a, str) or isinstance(b, str)):
            return format_value(a) + format_value(b)
        return _arith(op, a, b)

    def _unary(self, e: n.Unary, frame):
        v = self.eval_expr(e.operand, frame)
        if e.op == "!":
            if not isinstance(v, bool):
                raise ArityOrTypeError(f"operator ! needs a bool, got {type_name(v)}")
            return not v
        if isinstance(v, int) and not isinstance(v, bool):
            return wrap_int(-v)
        if isinstance(v, float):
            return -v
        raise ArityOrTypeError(f"unary - needs a number, got {type_name(v)}")


# Each interpreted call nests a bounded number of Python frames; the deep
# stack thread gives the default 10000-frame cap room to fail cleanly.
PY_FRAMES_PER_CALL = 40
_STACK_BYTES_PER_PY_FRAME = 500


def call_with_deep_stack(fn, *args, max_depth: int = DEFAULT_MAX_DEPTH):
    """Run ``fn(*args)`` in a thread whose stack fits ``max_depth`` nested calls."""
    needed = PY_FRAMES_PER_CALL * max_depth + 2000
    if sys.getrecursionlimit() < needed:
        sys.setrecursionlimit(needed)
    stack = min(max(needed * _STACK_BYTES_PER_PY_FRAME, 64 << 20), 2 << 30)
    box = {}

    def target():
        try:
            box["value"] = fn(*args)
        except BaseException as exc:  # re-raised in the caller's thread
            box["error"] = exc

    old = threading.stack_size()
    threading.stack_size(stack)
    try:
        worker = threading.Thread(target=target, name="copl")
        worker.start()
    finally:
        threading.stack_size(old)
    worker.join()
    if "error" in box:
        raise box["error"]
    return box.get("value")


def run_program(model: ProgramModel, flags: Optional[RunFlags] = None,
                out: Optional[Callable[[str], None]] = None,
                on_trace: Optional[Callable[[TraceEvent], None]] = None) -> ExecutionOutcome:
    """Execute the top-level statements with a fresh store.

    Never raises for program faults: they end up in ``outcome.error``.
    ``out`` and ``on_trace`` additionally receive output as it happens.
    """
    flags = flags or RunFlags()
    outcome = ExecutionOutcome()
    chunks: list[str] = []

    def write(text):
        chunks.append(text)
        if out is not None:
            out(text)

    tracer = None
    if flags.trace:
        def tracer(event):
            outcome.trace.append(event)
            if on_trace is not None:
                on_trace(event)

    interp = Interpreter(model, max_depth=flags.max_depth, trace=tracer, out=write)

    def body():
        try:
            interp.run_statements(model.statements)
        except RuntimeFault as err:
            outcome.error = err
        except RecursionError:
            outcome.error = RuntimeFault("Python recursion limit reached before the depth cap")

    call_with_deep_stack(body, max_depth=flags.max_depth)
    outcome.stdout = "".join(chunks)
    return outcome
