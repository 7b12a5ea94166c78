import pytest
from hypothesis import given, settings, strategies as st

from copl import nodes as n
from copl.errors import LexError, ParseError
from copl.lexer import tokenize
from copl.parser import parse, parse_source
from copl.printer import pretty_print

from helpers import corpus_programs, negative_programs


def only_concept(src):
    program = parse_source(src)
    assert len(program.concepts) == 1
    return program.concepts[0]


def test_concept_with_parent():
    c = only_concept("concept Account in Bank { char[10] accNo; }")
    assert c.name == "Account" and c.parent == "Bank"
    assert c.members == [n.FieldDecl(n.TypeRef("char", 10), "accNo")]


def test_explicit_property():
    c = only_concept("concept Account { out double balance { get { return 0.0; } } }")
    prop = c.members[0]
    assert isinstance(prop, n.PropertyDecl)
    assert prop.name == "balance" and prop.type == n.TypeRef("double")
    assert prop.get_body is not None and prop.set_body is None
    assert not prop.auto


def test_auto_property():
    prop = only_concept("concept A in MemoryHandle { out int count; }").members[0]
    assert isinstance(prop, n.PropertyDecl) and prop.auto


def test_self_parent_parses():
    assert only_concept("concept A in A { }").parent == "A"


def test_methods_need_direction():
    with pytest.raises(ParseError):
        parse_source("concept A { int f() { return 1; } }")
    m = only_concept("concept A { in int f(int x, double y) { return x; } }").members[0]
    assert m.direction == "in" and [p.name for p in m.params] == ["x", "y"]


def test_node_positions():
    program = parse_source("concept A { }\nint x = 1 + 2;")
    assert program.concepts[0].pos == (1, 1)
    decl = program.statements[0]
    assert decl.pos == (2, 1)
    assert decl.init.pos == (2, 9)
    assert decl.init.right.pos == (2, 13)


def test_precedence():
    e = parse_source("x = 1 + 2 * 3 == 7 && !false;").statements[0].value
    assert e.op == "&&"
    assert e.left.op == "==" and e.left.left.op == "+" and e.left.left.right.op == "*"


def test_new_with_parent_and_value_literal():
    s = parse_source('Account a = new Account("1") in bank; Point p = Point(1, 2);').statements
    assert isinstance(s[0].init, n.NewExpr) and s[0].init.parent == n.Identifier("bank")
    assert isinstance(s[1].init, n.Call) and s[1].init.name == "Point"


def test_concept_after_statement_rejected():
    with pytest.raises(ParseError):
        parse_source("int x = 1; concept A { }")


def test_missing_semicolon_position():
    with pytest.raises(ParseError) as info:
        parse_source("int x = 1\nint y = 2;")
    assert info.value.pos == (2, 1)


def test_invalid_assignment_target():
    with pytest.raises(ParseError):
        parse_source("1 + 2 = 3;")


@pytest.mark.parametrize("path", corpus_programs(), ids=lambda p: p.stem)
def test_pretty_print_round_trip(path):
    ast = parse(tokenize(path.read_text(encoding="utf-8")))
    printed = pretty_print(ast)
    assert parse(tokenize(printed)) == ast
    # the canonical form is a fixed point
    assert pretty_print(parse_source(printed)) == printed


def _valid_sources():
    paths = corpus_programs() + [p for p in negative_programs()
                                 if p.stem not in ("unterminated_string", "missing_semicolon")]
    return [p.read_text(encoding="utf-8") for p in paths]


SOURCES = _valid_sources()


@settings(max_examples=300, deadline=None)
@given(st.sampled_from(SOURCES), st.integers(0, 10**6), st.integers(0, 10**6),
       st.sampled_from(["delete", "duplicate", "insert"]), st.sampled_from(list(";{}()=.,in") + ["concept"]))
def test_mutated_program_error_positions(src, i, j, op, extra):
    toks = tokenize(src)[:-1]
    k = i % len(toks)
    lexemes = [t.lexeme for t in toks]
    if op == "delete":
        del lexemes[k]
    elif op == "duplicate":
        lexemes.insert(k, lexemes[j % len(lexemes)])
    else:
        lexemes.insert(k, extra)
    mutated = "\n".join(" ".join(lexemes[x:x + 7]) for x in range(0, len(lexemes), 7))
    lines = mutated.split("\n")
    try:
        parse_source(mutated)
    except (ParseError, LexError) as err:
        line, col = err.pos
        assert 1 <= line <= len(lines)
        assert 1 <= col <= len(lines[line - 1]) + 1
