"""Canonical source printer: ``parse(tokenize(pretty_print(tree))) == tree``."""

from __future__ import annotations

from . import nodes as n

_PRECEDENCE = {"||": 1, "&&": 2, "==": 3, "!=": 3, "<": 4, "<=": 4, ">": 4, ">=": 4,
               "+": 5, "-": 5, "*": 6, "/": 6, "%": 6}
_UNARY = 7
_POSTFIX = 8


def _quote(text: str) -> str:
    out = text.replace("\\", "\\\\").replace('"', '\\"')
    return '"' + out.replace("\n", "\\n").replace("\t", "\\t").replace("\0", "\\0") + '"'


def _args(args) -> str:
    return "(" + ", ".join(expr(a) for a in args) + ")"


def _prec(e) -> int:
    if isinstance(e, n.Binary):
        return _PRECEDENCE[e.op]
    if isinstance(e, n.Unary):
        return _UNARY
    if isinstance(e, n.NewExpr) and e.parent is not None:
        return 0  # trailing "in expr" swallows everything to its right
    return _POSTFIX


def _wrap(e, min_prec: int) -> str:
    text = expr(e)
    return f"({text})" if _prec(e) < min_prec else text


def expr(e) -> str:
    if isinstance(e, n.IntLit):
        return str(e.value)
    if isinstance(e, n.FloatLit):
        return repr(e.value)
    if isinstance(e, n.StringLit):
        return _quote(e.value)
    if isinstance(e, n.BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, n.Identifier):
        return e.name
    if isinstance(e, n.ThisExpr):
        return "this"
    if isinstance(e, n.ValueKeyword):
        return "value"
    if isinstance(e, n.FieldAccess):
        return f"{_wrap(e.target, _POSTFIX)}.{e.name}"
    if isinstance(e, n.MethodCall):
        return f"{_wrap(e.target, _POSTFIX)}.{e.name}{_args(e.args)}"
    if isinstance(e, n.Call):
        return e.name + _args(e.args)
    if isinstance(e, n.ValueLiteral):
        return e.concept + _args(e.args)
    if isinstance(e, n.SuperCall):
        return f"super.{e.name}{_args(e.args)}"
    if isinstance(e, n.SubCall):
        return f"sub.{e.name}{_args(e.args)}"
    if isinstance(e, n.NewExpr):
        text = f"new {e.concept}{_args(e.args)}"
        return text if e.parent is None else f"{text} in {expr(e.parent)}"
    if isinstance(e, n.Unary):
        return e.op + _wrap(e.operand, _UNARY)
    if isinstance(e, n.Binary):
        p = _PRECEDENCE[e.op]
        # left-associative: the right operand needs strictly higher precedence
        return f"{_wrap(e.left, p)} {e.op} {_wrap(e.right, p + 1)}"
    raise TypeError(f"not an expression: {e!r}")


def stmt(s, indent: int = 0) -> str:
    pad = "    " * indent
    if isinstance(s, n.Block):
        return pad + block(s, indent)
    if isinstance(s, n.VarDecl):
        return f"{pad}{s.type} {s.name} = {expr(s.init)};"
    if isinstance(s, n.Assign):
        return f"{pad}{expr(s.target)} = {expr(s.value)};"
    if isinstance(s, n.ExprStmt):
        return f"{pad}{expr(s.expr)};"
    if isinstance(s, n.Return):
        return f"{pad}return;" if s.value is None else f"{pad}return {expr(s.value)};"
    if isinstance(s, n.While):
        return f"{pad}while ({expr(s.cond)})\n{stmt(s.body, indent + 1)}"
    if isinstance(s, n.If):
        text = f"{pad}if ({expr(s.cond)})\n{stmt(s.then, indent + 1)}"
        if s.orelse is not None:
            text += f"\n{pad}else\n{stmt(s.orelse, indent + 1)}"
        return text
    raise TypeError(f"not a statement: {s!r}")


def block(b: n.Block, indent: int = 0) -> str:
    if not b.body:
        return "{ }"
    inner = "\n".join(stmt(s, indent + 1) for s in b.body)
    return "{\n" + inner + "\n" + "    " * indent + "}"


def member(m, indent: int = 1) -> str:
    pad = "    " * indent
    if isinstance(m, n.FieldDecl):
        return f"{pad}{m.type} {m.name};"
    if isinstance(m, n.MethodDecl):
        params = ", ".join(f"{p.type} {p.name}" for p in m.params)
        return f"{pad}{m.direction} {m.return_type} {m.name}({params}) {block(m.body, indent)}"
    if isinstance(m, n.PropertyDecl):
        if m.auto:
            return f"{pad}out {m.type} {m.name};"
        parts = []
        if m.get_body is not None:
            parts.append(f"{pad}    get {block(m.get_body, indent + 1)}")
        if m.set_body is not None:
            parts.append(f"{pad}    set {block(m.set_body, indent + 1)}")
        return f"{pad}out {m.type} {m.name} {{\n" + "\n".join(parts) + f"\n{pad}}}"
    raise TypeError(f"not a member: {m!r}")


def pretty_print(program: n.Program) -> str:
    chunks = []
    for c in program.concepts:
        head = f"concept {c.name}" + (f" in {c.parent}" if c.parent else "")
        body = "\n".join(member(m) for m in c.members)
        chunks.append(f"{head} {{\n{body}\n}}" if body else f"{head} {{ }}")
    chunks.extend(stmt(s) for s in program.statements)
    return "\n".join(chunks) + "\n"
