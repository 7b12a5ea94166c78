"""Resolution of a parsed program into a validated :class:`ProgramModel`."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Optional, Union

from . import nodes as n
from .errors import ResolveError

BUILTINS = ("print", "assert")


class _MemoryHandle:
    """The built-in primitive space at the root of every object chain."""

    name = "MemoryHandle"

    def __repr__(self):
        return "MemoryHandle"


MEMORY_HANDLE = _MemoryHandle()


@dataclass
class ConceptInfo:
    name: str
    parent: Union["ConceptInfo", _MemoryHandle, None]
    fields: list[tuple[str, n.TypeRef]]
    in_methods: dict[str, n.MethodDecl] = field(default_factory=dict)
    out_methods: dict[str, n.MethodDecl] = field(default_factory=dict)
    properties: dict[str, n.PropertyDecl] = field(default_factory=dict)
    pos: tuple[int, int] = field(default=(0, 0), compare=False, repr=False)

    def __post_init__(self):
        self.field_index = {name: i for i, (name, _) in enumerate(self.fields)}

    def __repr__(self):
        return f"ConceptInfo({self.name!r})"

    @property
    def root(self) -> Union["ConceptInfo", _MemoryHandle, None]:
        """What the inclusion chain finally hangs from: MemoryHandle or None."""
        c = self
        while isinstance(c.parent, ConceptInfo):
            c = c.parent
        return c.parent

    @property
    def instantiable(self) -> bool:
        return self.root is MEMORY_HANDLE


@dataclass
class ProgramModel:
    concepts: dict[str, ConceptInfo]
    statements: list
    root: _MemoryHandle = MEMORY_HANDLE

    def concept(self, name: str) -> ConceptInfo:
        return self.concepts[name]


def inclusion_chain(concept: ConceptInfo) -> list[ConceptInfo]:
    chain = []
    c = concept
    while isinstance(c, ConceptInfo):
        chain.append(c)
        c = c.parent
    chain.reverse()
    return chain


def chained_fields(concept: ConceptInfo) -> list[tuple[str, n.TypeRef]]:
    return [f for c in inclusion_chain(concept) for f in c.fields]


def value_fields(concept: ConceptInfo) -> list[tuple[str, n.TypeRef]]:
    """Fields carried by a plain value of ``concept``.

    Value-only chains extend values by concatenation; a concept living in a
    space contributes only its own segment.
    """
    return list(concept.fields) if concept.instantiable else chained_fields(concept)


def resolve(program: n.Program, base: Optional[ProgramModel] = None) -> ProgramModel:
    """Validate ``program`` and build its model.

    With ``base`` the new declarations extend an existing model (used by the
    REPL); ``base`` itself is not modified.
    """
    return _Resolver(base).run(program)


class _Resolver:
    def __init__(self, base: Optional[ProgramModel]):
        self.concepts: dict[str, ConceptInfo] = dict(base.concepts) if base else {}

    def run(self, program: n.Program) -> ProgramModel:
        decls: dict[str, n.ConceptDecl] = {}
        for d in program.concepts:
            if d.name in decls or d.name in self.concepts or d.name == MEMORY_HANDLE.name:
                raise ResolveError("duplicate concept", f"concept {d.name!r} is already declared", d.pos)
            decls[d.name] = d

        for d in decls.values():
            if d.parent is None or d.parent == MEMORY_HANDLE.name:
                continue
            if d.parent not in decls and d.parent not in self.concepts:
                raise ResolveError("unknown parent", f"concept {d.name!r} is included in unknown concept {d.parent!r}", d.pos)
        self._check_cycles(decls)

        # parents before children so ConceptInfo.parent links are complete
        for d in self._topological(decls):
            self.concepts[d.name] = self._build(d)

        for d in decls.values():
            self._check_bodies(self.concepts[d.name])

        statements = [self._stmt(s) for s in program.statements]
        return ProgramModel(self.concepts, statements)

    def _check_cycles(self, decls):
        for start in decls.values():
            seen = [start.name]
            cur = start.parent
            while cur in decls:
                if cur in seen:
                    cycle = " in ".join(seen[seen.index(cur):] + [cur])
                    raise ResolveError("inclusion cycle", cycle, start.pos)
                seen.append(cur)
                cur = decls[cur].parent

    def _topological(self, decls):
        ordered, done = [], set(self.concepts)

        def visit(d):
            if d.name in done:
                return
            if d.parent in decls:
                visit(decls[d.parent])
            done.add(d.name)
            ordered.append(d)

        for d in decls.values():
            visit(d)
        return ordered

    def _type(self, t: n.TypeRef, allow_void=False) -> n.TypeRef:
        if t.name == "char":
            if t.size is None or t.size < 1:
                raise ResolveError("invalid char array", f"char[{t.size}] needs a length of at least 1", t.pos)
        elif t.name == "void":
            if not allow_void:
                raise ResolveError("unknown type", "void is only valid as a return type", t.pos)
        elif t.name not in n.PRIMITIVE_TYPES and t.name not in self.concepts:
            raise ResolveError("unknown type", f"unknown type name {t.name!r}", t.pos)
        return t

    def _build(self, d: n.ConceptDecl) -> ConceptInfo:
        if d.parent is None:
            parent = None
        elif d.parent == MEMORY_HANDLE.name:
            parent = MEMORY_HANDLE
        else:
            parent = self.concepts[d.parent]
        fields: list[tuple[str, n.TypeRef]] = []
        in_methods: dict[str, n.MethodDecl] = {}
        out_methods: dict[str, n.MethodDecl] = {}
        properties: dict[str, n.PropertyDecl] = {}
        taken: dict[str, str] = {}

        def claim(name, what, pos):
            prev = taken.get(name)
            if prev is not None and {prev, what} != {"in", "out"}:
                raise ResolveError("duplicate member", f"{d.name}.{name} is declared twice", pos)
            taken[name] = what

        # member types may name concepts declared later in the same program,
        # so they are checked in _check_bodies once the table is complete
        for m in d.members:
            if isinstance(m, n.FieldDecl):
                claim(m.name, "field", m.pos)
                fields.append((m.name, m.type))
            elif isinstance(m, n.PropertyDecl):
                claim(m.name, "property", m.pos)
                properties[m.name] = m
            else:
                claim(m.name, m.direction, m.pos)
                (in_methods if m.direction == "in" else out_methods)[m.name] = m

        for name in in_methods:
            if name not in out_methods:
                continue
            a, b = in_methods[name], out_methods[name]
            if (a.return_type, [p.type for p in a.params]) != (b.return_type, [p.type for p in b.params]):
                raise ResolveError("dual signature mismatch",
                                   f"incoming and outgoing {d.name}.{name} differ in signature", b.pos)
        return ConceptInfo(d.name, parent, fields, in_methods, out_methods, properties, pos=d.pos)

    def _check_bodies(self, info: ConceptInfo):
        for _, t in info.fields:
            self._type(t)
        for prop in list(info.properties.values()):
            self._type(prop.type)
            info.properties[prop.name] = dataclasses.replace(
                prop,
                get_body=self._stmt(prop.get_body) if prop.get_body else None,
                set_body=self._stmt(prop.set_body) if prop.set_body else None,
            )
        for table in (info.in_methods, info.out_methods):
            for name, m in list(table.items()):
                self._type(m.return_type, allow_void=True)
                for p in m.params:
                    self._type(p.type)
                if len({p.name for p in m.params}) != len(m.params):
                    raise ResolveError("duplicate member", f"{info.name}.{name} repeats a parameter name", m.pos)
                table[name] = dataclasses.replace(m, body=self._stmt(m.body))

    # Statement and expression trees are rebuilt, never mutated: calls naming a
    # concept become ValueLiteral nodes and declared types are checked.

    def _stmt(self, s):
        if isinstance(s, n.VarDecl):
            self._type(s.type)
        if isinstance(s, n.NewExpr) and s.concept not in self.concepts:
            raise ResolveError("unknown concept", f"cannot instantiate unknown concept {s.concept!r}", s.pos)
        if isinstance(s, n.Call) and s.name in self.concepts:
            return n.ValueLiteral(s.name, [self._stmt(a) for a in s.args], pos=s.pos)
        if isinstance(s, n.TypeRef) or not dataclasses.is_dataclass(s):
            return s
        changes = {}
        for f in dataclasses.fields(s):
            if f.name == "pos":
                continue
            v = getattr(s, f.name)
            if isinstance(v, list):
                changes[f.name] = [self._stmt(x) for x in v]
            elif isinstance(v, n.Node):
                changes[f.name] = self._stmt(v)
        return dataclasses.replace(s, **changes)
