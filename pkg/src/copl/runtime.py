"""Values, segmented references, the object store and method dispatch.

Language values map onto Python values as follows:

=============  ==========================================
``int``        :class:`int` (wrapped to 64-bit signed)
``double``     :class:`float`
``bool``       :class:`bool`
``string``     :class:`str`
``char[n]``    :class:`CharArray`
concept value  :class:`ConceptValue`
reference      :class:`Reference`
``void``       :data:`VOID`
=============  ==========================================

A :class:`Machine` owns one store and implements the four dispatch
procedures. Executing a body is left to :meth:`Machine.execute_body`,
which the evaluator provides.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Union

from . import nodes as n
from .analyzer import MEMORY_HANDLE, ConceptInfo, ProgramModel, inclusion_chain, value_fields
from .errors import (
    ArityOrTypeError,
    CharArrayOverflow,
    DepthExceeded,
    MissingAccessor,
    NoChildSegment,
    NoIncomingMethod,
    NoOutgoingMethod,
    NotAnObject,
    NotInstantiable,
    ParentMismatch,
    UnknownField,
)

DEFAULT_MAX_DEPTH = 10000
INT_MIN, INT_MAX = -(2**63), 2**63 - 1


class _Void:
    def __repr__(self):
        return "VOID"


VOID = _Void()


def wrap_int(v: int) -> int:
    if INT_MIN <= v <= INT_MAX:
        return v
    return (v - INT_MIN) % 2**64 + INT_MIN


@dataclass(frozen=True)
class CharArray:
    """Fixed-length text, right-padded with spaces; the length is ``len(text)``."""
    text: str

    @classmethod
    def of(cls, text: str, size: int) -> "CharArray":
        if len(text) > size:
            raise CharArrayOverflow(f"text of length {len(text)} does not fit char[{size}]")
        return cls(text.ljust(size))

    @property
    def size(self) -> int:
        return len(self.text)

    @property
    def trimmed(self) -> str:
        return self.text.rstrip(" ")


@dataclass(frozen=True)
class Segment:
    concept: str
    values: tuple = ()


@dataclass(frozen=True)
class Reference:
    handle: int
    segments: tuple[Segment, ...]

    @property
    def concept(self) -> str:
        return self.segments[-1].concept

    def prefix(self, level: int) -> "Reference":
        if level == len(self.segments) - 1:
            return self
        return Reference(self.handle, self.segments[:level + 1])

    def extend(self, segment: Segment) -> "Reference":
        return Reference(self.handle, self.segments + (segment,))


@dataclass(frozen=True)
class ConceptValue:
    """A plain concept instance: passed by copy, no location, no storage."""
    concept: str
    values: tuple = ()


Value = Union[int, float, bool, str, CharArray, ConceptValue, Reference, _Void]
Receiver = Union[Reference, ConceptValue]


def ref_equals(a: Reference, b: Reference) -> bool:
    return a == b


def type_name(v) -> str:
    if v is VOID:
        return "void"
    if isinstance(v, bool):
        return "bool"
    if isinstance(v, int):
        return "int"
    if isinstance(v, float):
        return "double"
    if isinstance(v, str):
        return "string"
    if isinstance(v, CharArray):
        return f"char[{v.size}]"
    if isinstance(v, ConceptValue):
        return f"{v.concept} value"
    if isinstance(v, Reference):
        return f"{v.concept} reference"
    return type(v).__name__


def default_value(t: n.TypeRef, model: ProgramModel):
    """Initial content of a never-written slot of type ``t``."""
    name = t.name
    if name == "int":
        return 0
    if name == "double":
        return 0.0
    if name == "bool":
        return False
    if name == "string":
        return ""
    if name == "char":
        return CharArray(" " * t.size)
    if name == "void":
        return VOID
    concept = model.concepts[name]
    if concept.instantiable:
        # there is no null reference; an unset reference slot reads as void
        return VOID
    return ConceptValue(name, tuple(default_value(ft, model) for _, ft in value_fields(concept)))


def _concept_chain_names(model: ProgramModel, v) -> list[str]:
    if isinstance(v, Reference):
        return [s.concept for s in v.segments]
    return [c.name for c in inclusion_chain(model.concepts[v.concept])]


def coerce(v, t: n.TypeRef, model: ProgramModel, what: str = "value"):
    """Check ``v`` against declared type ``t``, applying the allowed conversions.

    ``int`` widens to ``double`` and text shorter than ``n`` pads to
    ``char[n]``; nothing else converts implicitly.
    """
    name = t.name
    if name == "int":
        if isinstance(v, int) and not isinstance(v, bool):
            return v
    elif name == "double":
        if isinstance(v, float):
            return v
        if isinstance(v, int) and not isinstance(v, bool):
            return float(v)
    elif name == "bool":
        if isinstance(v, bool):
            return v
    elif name == "string":
        if isinstance(v, str):
            return v
    elif name == "char":
        if isinstance(v, str):
            return CharArray.of(v, t.size)
        if isinstance(v, CharArray):
            return v if v.size == t.size else CharArray.of(v.trimmed, t.size)
    elif name == "void":
        if v is VOID:
            return v
    elif isinstance(v, (Reference, ConceptValue)):
        if name in _concept_chain_names(model, v):
            return v
    elif v is VOID and model.concepts[name].instantiable:
        return v
    raise ArityOrTypeError(f"{what} of type {type_name(v)} is not assignable to {t}")


class ObjectStore:
    """Storage behind auto properties, keyed by (reference prefix, field name)."""

    def __init__(self):
        self._data: dict[tuple[Reference, str], object] = {}
        self._next_handle = 1

    def new_handle(self) -> int:
        h = self._next_handle
        self._next_handle += 1
        return h

    def get(self, prefix: Reference, name: str, default):
        return self._data.get((prefix, name), default)

    def put(self, prefix: Reference, name: str, value) -> None:
        self._data[(prefix, name)] = value

    def clone(self) -> "ObjectStore":
        other = ObjectStore()
        other._data = dict(self._data)
        other._next_handle = self._next_handle
        return other

    def __len__(self):
        return len(self._data)


@dataclass(frozen=True)
class TraceEvent:
    phase: str      # enter | exit
    direction: str  # in | out | get | set
    concept: str
    member: str


UNBOUND = object()


@dataclass
class Frame:
    """Execution context of one method, getter or setter body.

    The script body runs in a frame with ``receiver`` set to None.
    """
    receiver: Optional[Receiver]
    segments: tuple[Segment, ...]
    level: int
    kind: str  # incoming | outgoing | getter | setter | script
    member: str = ""
    depth: int = 0
    scopes: list[dict] = field(default_factory=lambda: [{}])
    setter_value: object = UNBOUND

    @property
    def concept_name(self) -> str:
        return self.segments[self.level].concept

    def lookup(self, name: str):
        for scope in reversed(self.scopes):
            slot = scope.get(name)
            if slot is not None:
                return slot
        return None


_DIRECTION = {"incoming": "in", "outgoing": "out", "getter": "get", "setter": "set"}


class Machine:
    def __init__(self, model: ProgramModel, store: Optional[ObjectStore] = None,
                 max_depth: int = DEFAULT_MAX_DEPTH,
                 trace: Optional[Callable[[TraceEvent], None]] = None):
        if max_depth < 1:
            raise ValueError("max_depth must be at least 1")
        self.model = model
        self.store = store if store is not None else ObjectStore()
        self.max_depth = max_depth
        self.trace = trace

    # -- receivers ----------------------------------------------------------

    def segments_of(self, receiver: Receiver) -> tuple[Segment, ...]:
        """Per-level view of a receiver; plain values are split along their chain."""
        if isinstance(receiver, Reference):
            return receiver.segments
        concept = self.model.concepts[receiver.concept]
        if concept.instantiable:
            return (Segment(receiver.concept, receiver.values),)
        segs, i = [], 0
        for c in inclusion_chain(concept):
            k = len(c.fields)
            segs.append(Segment(c.name, receiver.values[i:i + k]))
            i += k
        return tuple(segs)

    def prefix(self, receiver: Receiver, level: int) -> Receiver:
        """The receiver as seen from ``level`` (what ``this`` denotes there)."""
        if isinstance(receiver, Reference):
            return receiver.prefix(level)
        segs = self.segments_of(receiver)
        if level == len(segs) - 1:
            return receiver
        values = tuple(v for s in segs[:level + 1] for v in s.values)
        return ConceptValue(segs[level].concept, values)

    # -- instantiation ------------------------------------------------------

    def instantiate(self, concept: ConceptInfo, parent_ref: Optional[Reference], args) -> Reference:
        if not concept.instantiable:
            raise NotInstantiable(f"{concept.name} is a value-only concept and cannot be instantiated")
        if concept.parent is MEMORY_HANDLE:
            if parent_ref is not None:
                raise ParentMismatch(f"{concept.name} lives directly in MemoryHandle and takes no parent")
        else:
            if not isinstance(parent_ref, Reference):
                raise ParentMismatch(f"{concept.name} needs a {concept.parent.name} reference as parent")
            if parent_ref.concept != concept.parent.name:
                raise ParentMismatch(
                    f"{concept.name} must be created in a {concept.parent.name}, not in a {parent_ref.concept}")
        if len(args) != len(concept.fields):
            raise ArityOrTypeError(f"{concept.name} takes {len(concept.fields)} argument(s), got {len(args)}")
        values = tuple(coerce(a, t, self.model, f"field {concept.name}.{fname}")
                       for a, (fname, t) in zip(args, concept.fields))
        segment = Segment(concept.name, values)
        if parent_ref is None:
            return Reference(self.store.new_handle(), (segment,))
        return parent_ref.extend(segment)

    def make_value(self, concept: ConceptInfo, args) -> ConceptValue:
        fields = value_fields(concept)
        if len(args) != len(fields):
            raise ArityOrTypeError(f"{concept.name} value takes {len(fields)} argument(s), got {len(args)}")
        return ConceptValue(concept.name, tuple(
            coerce(a, t, self.model, f"field {concept.name}.{fname}") for a, (fname, t) in zip(args, fields)))

    # -- method dispatch ----------------------------------------------------

    def _find(self, segments, levels, table: str, name: str):
        for level in levels:
            concept = self.model.concepts[segments[level].concept]
            decl = getattr(concept, table).get(name)
            if decl is not None:
                return level, decl
        return None

    def dispatch_external(self, receiver: Receiver, name: str, args, depth: int = 0):
        """Call ``name`` from outside: the outermost incoming implementation runs first."""
        segments = self.segments_of(receiver)
        found = self._find(segments, range(len(segments)), "in_methods", name)
        if found is None:
            raise NoIncomingMethod(f"no incoming method {name!r} on {segments[-1].concept}")
        return self.invoke(receiver, segments, found[0], found[1], "incoming", args, depth)

    def dispatch_sub(self, frame: Frame, name: str, args):
        segments = frame.segments
        if frame.level >= len(segments) - 1:
            raise NoChildSegment(f"sub.{name}: {frame.concept_name} has no child segment in this reference")
        found = self._find(segments, range(frame.level + 1, len(segments)), "in_methods", name)
        if found is None:
            raise NoIncomingMethod(f"sub.{name}: no incoming method {name!r} below {frame.concept_name}")
        return self.invoke(frame.receiver, segments, found[0], found[1], "incoming", args, frame.depth)

    def dispatch_super(self, frame: Frame, name: str, args):
        found = self._find(frame.segments, range(frame.level - 1, -1, -1), "out_methods", name)
        if found is None:
            raise NoOutgoingMethod(f"super.{name}: no outgoing method {name!r} above {frame.concept_name}")
        return self.invoke(frame.receiver, frame.segments, found[0], found[1], "outgoing", args, frame.depth)

    def dispatch_internal(self, frame: Frame, name: str, args):
        found = self._find(frame.segments, range(frame.level, -1, -1), "out_methods", name)
        if found is None:
            raise NoOutgoingMethod(f"no outgoing method {name!r} visible from {frame.concept_name}")
        return self.invoke(frame.receiver, frame.segments, found[0], found[1], "outgoing", args, frame.depth)

    def invoke(self, receiver, segments, level, decl: n.MethodDecl, kind, args, depth):
        if len(args) != len(decl.params):
            raise ArityOrTypeError(
                f"{segments[level].concept}.{decl.name} takes {len(decl.params)} argument(s), got {len(args)}")
        bound = {p.name: [p.type, coerce(a, p.type, self.model, f"argument {p.name!r}")]
                 for p, a in zip(decl.params, args)}
        frame = self._enter(receiver, segments, level, kind, decl.name, depth, bound)
        result = self.execute_body(frame, decl.body)
        if decl.return_type.name == "void":
            if result is not VOID:
                raise ArityOrTypeError(f"void method {decl.name} returned a value")
        else:
            if result is VOID:
                raise ArityOrTypeError(f"method {decl.name} must return a {decl.return_type}")
            result = coerce(result, decl.return_type, self.model, f"result of {decl.name}")
        self._exit(frame)
        return result

    def _enter(self, receiver, segments, level, kind, member, depth, bound, setter_value=UNBOUND):
        if depth + 1 > self.max_depth:
            raise DepthExceeded(f"maximum call depth {self.max_depth} exceeded")
        frame = Frame(receiver, segments, level, kind, member, depth + 1, [bound], setter_value)
        if self.trace is not None:
            self.trace(TraceEvent("enter", _DIRECTION[kind], frame.concept_name, member))
        return frame

    def _exit(self, frame: Frame):
        if self.trace is not None:
            self.trace(TraceEvent("exit", _DIRECTION[frame.kind], frame.concept_name, frame.member))

    def execute_body(self, frame: Frame, body: n.Block):
        """Run ``body`` in ``frame`` and return its result (VOID if none)."""
        raise NotImplementedError

    # -- fields and properties ----------------------------------------------

    def find_member(self, receiver: Receiver, name: str, upto: Optional[int] = None):
        """Innermost field or property ``name`` at or above level ``upto``.

        Returns ``("field", level, value)`` or ``("property", level, decl)``,
        or None.
        """
        segments = self.segments_of(receiver)
        top = len(segments) - 1 if upto is None else upto
        for level in range(top, -1, -1):
            seg = segments[level]
            concept = self.model.concepts[seg.concept]
            idx = concept.field_index.get(name)
            if idx is not None:
                return "field", level, seg.values[idx]
            decl = concept.properties.get(name)
            if decl is not None:
                return "property", level, decl
        return None

    def _auto_property(self, ref, name):
        found = self.find_member(ref, name)
        if found is None or found[0] != "property" or not found[2].auto:
            raise UnknownField(f"{name!r} is not an auto property of {ref.concept}")
        return found[1], found[2]

    def read_field(self, ref: Reference, name: str):
        """Read an auto property straight from the store."""
        level, decl = self._auto_property(ref, name)
        return self.store.get(ref.prefix(level), name, default_value(decl.type, self.model))

    def write_field(self, ref: Reference, name: str, value) -> None:
        level, decl = self._auto_property(ref, name)
        self.store.put(ref.prefix(level), name, coerce(value, decl.type, self.model, f"property {name!r}"))

    def access_property(self, receiver: Receiver, name: str, mode: str, value=None,
                        depth: int = 0, upto: Optional[int] = None):
        """Get or set property ``name``; does not pass through incoming methods."""
        found = self.find_member(receiver, name, upto)
        if found is None or found[0] != "property":
            if found is not None:
                owner = self.segments_of(receiver)[found[1]].concept
                raise UnknownField(f"{name!r} is a segment field of {owner}, not a property")
            raise UnknownField(f"no field or property {name!r} on {self.segments_of(receiver)[-1].concept}")
        _, level, decl = found
        return self.run_property(receiver, level, decl, mode, value, depth)

    def run_property(self, receiver, level, decl: n.PropertyDecl, mode, value=None, depth=0):
        owner = self.segments_of(receiver)[level].concept
        if decl.auto:
            if not isinstance(receiver, Reference):
                raise NotAnObject(f"{owner}.{decl.name} needs object storage but the receiver is a plain value")
            prefix = receiver.prefix(level)
            if mode == "get":
                return self.store.get(prefix, decl.name, default_value(decl.type, self.model))
            self.store.put(prefix, decl.name, coerce(value, decl.type, self.model, f"property {decl.name!r}"))
            return VOID

        segments = self.segments_of(receiver)
        if mode == "get":
            if decl.get_body is None:
                raise MissingAccessor(f"{owner}.{decl.name} has no getter")
            frame = self._enter(receiver, segments, level, "getter", decl.name, depth, {})
            result = self.execute_body(frame, decl.get_body)
            if result is VOID:
                raise ArityOrTypeError(f"getter of {decl.name} must return a {decl.type}")
            result = coerce(result, decl.type, self.model, f"getter of {decl.name}")
            self._exit(frame)
            return result
        if decl.set_body is None:
            raise MissingAccessor(f"{owner}.{decl.name} has no setter")
        value = coerce(value, decl.type, self.model, f"property {decl.name!r}")
        frame = self._enter(receiver, segments, level, "setter", decl.name, depth, {}, setter_value=value)
        self.execute_body(frame, decl.set_body)
        self._exit(frame)
        return VOID

