import pytest
from hypothesis import given, strategies as st

from copl import nodes as n
from copl.analyzer import MEMORY_HANDLE, chained_fields, inclusion_chain, resolve, value_fields
from copl.errors import ResolveError
from copl.parser import parse_source

from helpers import corpus_programs


def model(src):
    return resolve(parse_source(src))


def reason(src):
    with pytest.raises(ResolveError) as info:
        model(src)
    return info.value.reason


BANKING = """
concept Bank in MemoryHandle { char[12] bankCode; }
concept Account in Bank { char[10] accNo; }
concept BonusAccount in Account { }
concept Point { double x; double y; }
concept Point3D in Point { double z; }
"""


def names(chain):
    return [c.name for c in chain]


def test_chains():
    c = model(BANKING).concepts
    assert names(inclusion_chain(c["Account"])) == ["Bank", "Account"]
    assert names(inclusion_chain(c["Bank"])) == ["Bank"]
    assert names(inclusion_chain(c["BonusAccount"])) == ["Bank", "Account", "BonusAccount"]
    assert names(inclusion_chain(c["Point3D"])) == ["Point", "Point3D"]


def test_point3d_fields():
    c = model(BANKING).concepts
    assert [f for f, _ in c["Point"].fields] == ["x", "y"]
    assert [f for f, _ in c["Point3D"].fields] == ["z"]
    assert [f for f, _ in chained_fields(c["Point3D"])] == ["x", "y", "z"]
    assert [f for f, _ in value_fields(c["Point3D"])] == ["x", "y", "z"]
    # an instantiable concept's value literal carries only its own segment
    assert [f for f, _ in value_fields(c["Account"])] == ["accNo"]


def test_instantiable_flag():
    c = model(BANKING).concepts
    assert c["Bank"].parent is MEMORY_HANDLE
    assert c["BonusAccount"].instantiable
    assert not c["Point"].instantiable and not c["Point3D"].instantiable


def test_cycle():
    assert reason("concept A in B {} concept B in A {}") == "inclusion cycle"
    assert reason("concept A in A {}") == "inclusion cycle"


def test_dual_signature_mismatch():
    src = """concept Acc in MemoryHandle {
        in double getBalance() { return 1.0; }
        out int getBalance() { return 1; }
    }"""
    assert reason(src) == "dual signature mismatch"
    # equal signatures are fine
    model(src.replace("out int", "out double").replace("return 1;", "return 1.0;"))


def test_other_errors():
    assert reason("concept A in B {}") == "unknown parent"
    assert reason("concept A {} concept A {}") == "duplicate concept"
    assert reason("concept A { int x; out int x; }") == "duplicate member"
    assert reason("concept A { Nope x; }") == "unknown type"
    assert reason("int x = 1; Foo y = x;") == "unknown type"
    assert reason("concept A { char[0] c; }") == "invalid char array"
    assert reason("int f = 1; print(new Foo());") == "unknown concept"
    assert reason("concept A in MemoryHandle { in int f(int a, int a) { return a; } }") == "duplicate member"


def test_error_position():
    with pytest.raises(ResolveError) as info:
        model("concept A in MemoryHandle {}\nconcept B in Missing {}")
    assert info.value.pos == (2, 1)


def test_call_to_concept_becomes_value_literal():
    m = model(BANKING + "Point p = Point(1.0, 2.0);")
    assert isinstance(m.statements[0].init, n.ValueLiteral)


def test_base_model_not_mutated():
    base = model(BANKING)
    before = dict(base.concepts)
    extended = resolve(parse_source("concept Extra in Bank { int k; }"), base)
    assert base.concepts == before
    assert names(inclusion_chain(extended.concepts["Extra"])) == ["Bank", "Extra"]


@pytest.mark.parametrize("path", corpus_programs(), ids=lambda p: p.stem)
def test_corpus_resolves_deterministically(path):
    src = path.read_text(encoding="utf-8")
    assert model(src) == model(src)


@st.composite
def forests(draw):
    """Acyclic concept declarations: each parent is an earlier concept, MemoryHandle or nothing."""
    count = draw(st.integers(1, 8))
    decls = []
    for i in range(count):
        parent = draw(st.sampled_from([None, "MemoryHandle"] + [f"K{j}" for j in range(i)]))
        fields = draw(st.integers(0, 2))
        body = " ".join(f"int f{i}_{k};" for k in range(fields))
        head = f"concept K{i}" + (f" in {parent}" if parent else "")
        decls.append(f"{head} {{ {body} }}")
    order = draw(st.permutations(decls))
    return "\n".join(order)


@given(forests())
def test_chain_extends_parent_chain(src):
    concepts = model(src).concepts
    for c in concepts.values():
        if isinstance(c.parent, type(c)):
            assert inclusion_chain(c) == inclusion_chain(c.parent) + [c]
            assert chained_fields(c) == chained_fields(c.parent) + c.fields
        else:
            assert inclusion_chain(c) == [c]
