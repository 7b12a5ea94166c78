"""Syntax tree for ``copl`` programs.

Every node records the (line, column) of its first token in ``pos``.
Positions are excluded from equality so trees compare structurally.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

PRIMITIVE_TYPES = ("int", "double", "bool", "string", "void")


def _pos():
    return field(default=(0, 0), compare=False, repr=False, kw_only=True)


class Node:
    pos: tuple[int, int]


@dataclass(frozen=True)
class TypeRef(Node):
    """``int``/``double``/... , ``char[size]``, or a concept name."""
    name: str
    size: Optional[int] = None
    pos: tuple[int, int] = _pos()

    @property
    def is_primitive(self) -> bool:
        return self.name in PRIMITIVE_TYPES or self.name == "char"

    def __str__(self) -> str:
        return f"char[{self.size}]" if self.name == "char" else self.name


# --- expressions -----------------------------------------------------------

@dataclass
class IntLit(Node):
    value: int
    pos: tuple[int, int] = _pos()


@dataclass
class FloatLit(Node):
    value: float
    pos: tuple[int, int] = _pos()


@dataclass
class StringLit(Node):
    value: str
    pos: tuple[int, int] = _pos()


@dataclass
class BoolLit(Node):
    value: bool
    pos: tuple[int, int] = _pos()


@dataclass
class Identifier(Node):
    name: str
    pos: tuple[int, int] = _pos()


@dataclass
class FieldAccess(Node):
    target: "Expr"
    name: str
    pos: tuple[int, int] = _pos()


@dataclass
class MethodCall(Node):
    target: "Expr"
    name: str
    args: list["Expr"]
    pos: tuple[int, int] = _pos()


@dataclass
class Call(Node):
    """Bare ``name(args)``: a builtin or an internal (outgoing) call."""
    name: str
    args: list["Expr"]
    pos: tuple[int, int] = _pos()


@dataclass
class SuperCall(Node):
    name: str
    args: list["Expr"]
    pos: tuple[int, int] = _pos()


@dataclass
class SubCall(Node):
    name: str
    args: list["Expr"]
    pos: tuple[int, int] = _pos()


@dataclass
class ThisExpr(Node):
    pos: tuple[int, int] = _pos()


@dataclass
class ValueKeyword(Node):
    pos: tuple[int, int] = _pos()


@dataclass
class NewExpr(Node):
    concept: str
    args: list["Expr"]
    parent: Optional["Expr"] = None
    pos: tuple[int, int] = _pos()


@dataclass
class ValueLiteral(Node):
    """``Concept(args)``; produced by the analyzer from a :class:`Call`."""
    concept: str
    args: list["Expr"]
    pos: tuple[int, int] = _pos()


@dataclass
class Binary(Node):
    op: str
    left: "Expr"
    right: "Expr"
    pos: tuple[int, int] = _pos()


@dataclass
class Unary(Node):
    op: str
    operand: "Expr"
    pos: tuple[int, int] = _pos()


Expr = Union[IntLit, FloatLit, StringLit, BoolLit, Identifier, FieldAccess,
             MethodCall, Call, SuperCall, SubCall, ThisExpr, ValueKeyword,
             NewExpr, ValueLiteral, Binary, Unary]


# --- statements ------------------------------------------------------------

@dataclass
class VarDecl(Node):
    type: TypeRef
    name: str
    init: Expr
    pos: tuple[int, int] = _pos()


@dataclass
class Assign(Node):
    target: Union[Identifier, FieldAccess]
    value: Expr
    pos: tuple[int, int] = _pos()


@dataclass
class If(Node):
    cond: Expr
    then: "Stmt"
    orelse: Optional["Stmt"] = None
    pos: tuple[int, int] = _pos()


@dataclass
class While(Node):
    cond: Expr
    body: "Stmt"
    pos: tuple[int, int] = _pos()


@dataclass
class Return(Node):
    value: Optional[Expr] = None
    pos: tuple[int, int] = _pos()


@dataclass
class ExprStmt(Node):
    expr: Expr
    pos: tuple[int, int] = _pos()


@dataclass
class Block(Node):
    body: list["Stmt"]
    pos: tuple[int, int] = _pos()


Stmt = Union[VarDecl, Assign, If, While, Return, ExprStmt, Block]


# --- declarations ----------------------------------------------------------

@dataclass
class Param(Node):
    type: TypeRef
    name: str
    pos: tuple[int, int] = _pos()


@dataclass
class FieldDecl(Node):
    type: TypeRef
    name: str
    pos: tuple[int, int] = _pos()


@dataclass
class MethodDecl(Node):
    direction: str  # "in" | "out"
    return_type: TypeRef
    name: str
    params: list[Param]
    body: Block
    pos: tuple[int, int] = _pos()


@dataclass
class PropertyDecl(Node):
    name: str
    type: TypeRef
    get_body: Optional[Block] = None
    set_body: Optional[Block] = None
    pos: tuple[int, int] = _pos()

    @property
    def auto(self) -> bool:
        return self.get_body is None and self.set_body is None


Member = Union[FieldDecl, MethodDecl, PropertyDecl]


@dataclass
class ConceptDecl(Node):
    name: str
    parent: Optional[str]
    members: list[Member]
    pos: tuple[int, int] = _pos()


@dataclass
class Program(Node):
    concepts: list[ConceptDecl]
    statements: list[Stmt]
    pos: tuple[int, int] = _pos()
