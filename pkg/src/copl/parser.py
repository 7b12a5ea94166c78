"""Recursive descent parser producing :mod:`copl.nodes` trees.

The first grammar violation aborts parsing; there is no recovery.
"""

from __future__ import annotations

from . import nodes as n
from .errors import ParseError
from .lexer import EOI, FLOAT, IDENT, INT, KEYWORD, PUNCT, STRING, Token, string_value, tokenize

TYPE_KEYWORDS = ("int", "double", "bool", "string", "void", "char")

_BINARY_LEVELS = (
    ("||",),
    ("&&",),
    ("==", "!="),
    ("<", "<=", ">", ">="),
    ("+", "-"),
    ("*", "/", "%"),
)


def parse(tokens: list[Token]) -> n.Program:
    return Parser(tokens).program()


def parse_source(source: str) -> n.Program:
    return parse(tokenize(source))


def _describe(tok: Token) -> str:
    return "end of input" if tok.kind == EOI else repr(tok.lexeme)


class Parser:
    def __init__(self, tokens: list[Token]):
        if not tokens or tokens[-1].kind != EOI:
            raise ValueError("token stream must end with end-of-input")
        self.tokens = tokens
        self.i = 0

    # -- token helpers ------------------------------------------------------

    def peek(self, offset: int = 0) -> Token:
        return self.tokens[min(self.i + offset, len(self.tokens) - 1)]

    def check(self, lexeme: str, offset: int = 0) -> bool:
        tok = self.peek(offset)
        return tok.kind in (PUNCT, KEYWORD) and tok.lexeme == lexeme

    def advance(self) -> Token:
        tok = self.peek()
        if tok.kind != EOI:
            self.i += 1
        return tok

    def accept(self, lexeme: str) -> Token | None:
        if self.check(lexeme):
            return self.advance()
        return None

    def error(self, expected: str) -> ParseError:
        tok = self.peek()
        return ParseError(f"expected {expected}, found {_describe(tok)}",
                          tok.pos, expected=expected, found=tok.lexeme)

    def expect(self, lexeme: str) -> Token:
        if not self.check(lexeme):
            raise self.error(repr(lexeme))
        return self.advance()

    def ident(self) -> Token:
        if self.peek().kind != IDENT:
            raise self.error("identifier")
        return self.advance()

    # -- declarations -------------------------------------------------------

    def program(self) -> n.Program:
        start = self.peek().pos
        concepts = []
        while self.check("concept"):
            concepts.append(self.concept_decl())
        statements = []
        while self.peek().kind != EOI:
            if self.check("concept"):
                raise self.error("statement (concept declarations must precede statements)")
            statements.append(self.statement())
        return n.Program(concepts, statements, pos=start)

    def concept_decl(self) -> n.ConceptDecl:
        start = self.expect("concept").pos
        name = self.ident().lexeme
        parent = self.ident().lexeme if self.accept("in") else None
        self.expect("{")
        members = []
        while not self.accept("}"):
            if self.peek().kind == EOI:
                raise self.error("'}'")
            members.append(self.member())
        return n.ConceptDecl(name, parent, members, pos=start)

    def member(self):
        start = self.peek().pos
        if self.accept("in"):
            rtype = self.type_ref()
            name = self.ident().lexeme
            return self.method_rest("in", rtype, name, start)
        if self.accept("out"):
            rtype = self.type_ref()
            name = self.ident().lexeme
            if self.check("("):
                return self.method_rest("out", rtype, name, start)
            if self.accept(";"):
                return n.PropertyDecl(name, rtype, pos=start)
            if self.accept("{"):
                get_body = set_body = None
                if self.accept("get"):
                    get_body = self.block()
                if self.accept("set"):
                    set_body = self.block()
                self.expect("}")
                return n.PropertyDecl(name, rtype, get_body, set_body, pos=start)
            raise self.error("'(', ';' or '{'")
        ftype = self.type_ref()
        name = self.ident().lexeme
        self.expect(";")
        return n.FieldDecl(ftype, name, pos=start)

    def method_rest(self, direction, rtype, name, start) -> n.MethodDecl:
        self.expect("(")
        params = []
        if not self.check(")"):
            while True:
                ppos = self.peek().pos
                ptype = self.type_ref()
                params.append(n.Param(ptype, self.ident().lexeme, pos=ppos))
                if not self.accept(","):
                    break
        self.expect(")")
        return n.MethodDecl(direction, rtype, name, params, self.block(), pos=start)

    def at_type(self) -> bool:
        tok = self.peek()
        if tok.kind == KEYWORD:
            return tok.lexeme in TYPE_KEYWORDS
        return tok.kind == IDENT and self.peek(1).kind == IDENT

    def type_ref(self) -> n.TypeRef:
        tok = self.peek()
        if tok.kind == KEYWORD and tok.lexeme == "char":
            self.advance()
            self.expect("[")
            size_tok = self.peek()
            if size_tok.kind != INT:
                raise self.error("array length")
            self.advance()
            self.expect("]")
            return n.TypeRef("char", int(size_tok.lexeme), pos=tok.pos)
        if tok.kind == KEYWORD and tok.lexeme in TYPE_KEYWORDS:
            self.advance()
            return n.TypeRef(tok.lexeme, pos=tok.pos)
        if tok.kind == IDENT:
            self.advance()
            return n.TypeRef(tok.lexeme, pos=tok.pos)
        raise self.error("type")

    # -- statements ---------------------------------------------------------

    def block(self) -> n.Block:
        start = self.expect("{").pos
        body = []
        while not self.accept("}"):
            if self.peek().kind == EOI:
                raise self.error("'}'")
            body.append(self.statement())
        return n.Block(body, pos=start)

    def statement(self):
        tok = self.peek()
        start = tok.pos
        if self.check("{"):
            return self.block()
        if self.accept("if"):
            self.expect("(")
            cond = self.expression()
            self.expect(")")
            then = self.statement()
            orelse = self.statement() if self.accept("else") else None
            return n.If(cond, then, orelse, pos=start)
        if self.accept("while"):
            self.expect("(")
            cond = self.expression()
            self.expect(")")
            return n.While(cond, self.statement(), pos=start)
        if self.accept("return"):
            value = None if self.check(";") else self.expression()
            self.expect(";")
            return n.Return(value, pos=start)
        if self.at_type():
            vtype = self.type_ref()
            name = self.ident().lexeme
            self.expect("=")
            init = self.expression()
            self.expect(";")
            return n.VarDecl(vtype, name, init, pos=start)
        expr = self.expression()
        if self.accept("="):
            if not isinstance(expr, (n.Identifier, n.FieldAccess)):
                raise ParseError("invalid assignment target", expr.pos,
                                 expected="variable or field", found="expression")
            value = self.expression()
            self.expect(";")
            return n.Assign(expr, value, pos=start)
        self.expect(";")
        return n.ExprStmt(expr, pos=start)

    # -- expressions --------------------------------------------------------

    def expression(self):
        return self.binary(0)

    def binary(self, level: int):
        if level == len(_BINARY_LEVELS):
            return self.unary()
        left = self.binary(level + 1)
        ops = _BINARY_LEVELS[level]
        while self.peek().kind == PUNCT and self.peek().lexeme in ops:
            op = self.advance().lexeme
            right = self.binary(level + 1)
            left = n.Binary(op, left, right, pos=left.pos)
        return left

    def unary(self):
        tok = self.peek()
        if tok.kind == PUNCT and tok.lexeme in ("!", "-"):
            self.advance()
            return n.Unary(tok.lexeme, self.unary(), pos=tok.pos)
        return self.postfix()

    def args(self) -> list:
        self.expect("(")
        result = []
        if not self.check(")"):
            while True:
                result.append(self.expression())
                if not self.accept(","):
                    break
        self.expect(")")
        return result

    def postfix(self):
        expr = self.primary()
        while self.accept("."):
            name = self.ident().lexeme
            if self.check("("):
                expr = n.MethodCall(expr, name, self.args(), pos=expr.pos)
            else:
                expr = n.FieldAccess(expr, name, pos=expr.pos)
        return expr

    def primary(self):
        tok = self.peek()
        pos = tok.pos
        if tok.kind == INT:
            self.advance()
            return n.IntLit(int(tok.lexeme), pos=pos)
        if tok.kind == FLOAT:
            self.advance()
            return n.FloatLit(float(tok.lexeme), pos=pos)
        if tok.kind == STRING:
            self.advance()
            return n.StringLit(string_value(tok.lexeme), pos=pos)
        if tok.kind == IDENT:
            self.advance()
            if self.check("("):
                return n.Call(tok.lexeme, self.args(), pos=pos)
            return n.Identifier(tok.lexeme, pos=pos)
        if tok.kind == KEYWORD:
            word = tok.lexeme
            if word in ("true", "false"):
                self.advance()
                return n.BoolLit(word == "true", pos=pos)
            if word == "this":
                self.advance()
                return n.ThisExpr(pos=pos)
            if word == "value":
                self.advance()
                return n.ValueKeyword(pos=pos)
            if word in ("super", "sub"):
                self.advance()
                self.expect(".")
                name = self.ident().lexeme
                node = n.SuperCall if word == "super" else n.SubCall
                return node(name, self.args(), pos=pos)
            if word == "new":
                self.advance()
                concept = self.ident().lexeme
                args = self.args()
                parent = self.expression() if self.accept("in") else None
                return n.NewExpr(concept, args, parent, pos=pos)
        if self.accept("("):
            expr = self.expression()
            self.expect(")")
            return expr
        raise self.error("expression")
