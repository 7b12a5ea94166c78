import io
import subprocess
import sys

import pytest

from copl.cli import CliConfig, ReplSession, main, repl, run_file
from copl.formatting import format_double, format_trace_event, format_value
from copl.runtime import VOID, CharArray, ConceptValue, Reference, Segment, TraceEvent

from helpers import CORPUS, NEGATIVE


def run_cli(path, **kw):
    out, err = io.StringIO(), io.StringIO()
    code = run_file(CliConfig(str(path), **kw), out, err)
    return code, out.getvalue(), err.getvalue()


def test_valid_file_exit_zero():
    code, out, err = run_cli(CORPUS / "01_account_value.cop")
    assert code == 0 and err == ""


def test_unknown_parent_exit_two(tmp_path):
    src = tmp_path / "bad.cop"
    src.write_text("concept A in B {}\n")
    code, out, err = run_cli(src)
    assert code == 2 and out == ""
    assert err.startswith(f"{src}:1:1: ResolveError:") and "'B'" in err


def test_no_child_segment_exit_one():
    code, out, err = run_cli(NEGATIVE / "sub_at_leaf.cop")
    assert code == 1 and "NoChildSegment" in err


def test_missing_file_exit_three(tmp_path):
    code, _, err = run_cli(tmp_path / "absent.cop")
    assert code == 3 and "cannot read" in err


def test_usage_errors_exit_three(capsys):
    for argv in ([], ["frobnicate"], ["run"], ["run", "x.cop", "--max-depth", "0"]):
        with pytest.raises(SystemExit) as info:
            main(argv)
        assert info.value.code == 3


def test_trace_goes_to_stderr_only():
    path = CORPUS / "08_panel_button.cop"
    plain = run_cli(path)
    traced = run_cli(path, trace=True)
    assert plain[1] == traced[1] == "fillBackground\ndrawButtonText: MyButton\n"
    assert plain[2] == ""
    assert traced[2] == (CORPUS / "08_panel_button.trace").read_text()


def test_process_streams():
    proc = subprocess.run([sys.executable, "-m", "copl", "run", str(CORPUS / "08_panel_button.cop"),
                           "--trace", "--max-depth", "50"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout == "fillBackground\ndrawButtonText: MyButton\n"
    assert proc.stderr.splitlines()[0] == "enter in Panel.draw"


def test_format_trace_event():
    assert format_trace_event(TraceEvent("enter", "in", "Panel", "draw")) == "enter in Panel.draw"
    assert format_trace_event(TraceEvent("exit", "out", "Bank", "getInterest")) == "exit out Bank.getInterest"


def test_format_value():
    assert format_value(0.02 + 0.01) == "0.03"
    assert format_value(7) == "7"
    assert format_value(CharArray.of("A123", 10)) == "A123"
    assert format_value(True) == "true"
    assert format_value(VOID) == "void"
    assert format_value(ConceptValue("Point3D", (1, 2, 3))) == "Point3D(1,2,3)"
    ref = Reference(1, (Segment("Bank", (CharArray.of("BC0000000001", 12),)),
                        Segment("Account", (CharArray.of("1234567890", 10),))))
    assert format_value(ref) == "<Bank(BC0000000001):Account(1234567890)>"


@pytest.mark.parametrize("x, text", [
    (2.0, "2.0"), (1e20, "100000000000000000000.0"), (1 / 3, "0.333333333333"),
    (-0.5, "-0.5"), (0.1 + 0.2, "0.3"), (1e-5, "0.00001"), (123456.789, "123456.789"),
])
def test_format_double(x, text):
    assert format_double(x) == text


def test_format_double_oracle():
    # oracle: round to 12 significant digits by hand via the decimal repr
    from decimal import Decimal, ROUND_HALF_EVEN
    for x in (0.03, 2.675, 1234.5678901234, 9.87654321e-3):
        d = Decimal(x)
        exp = d.adjusted()
        q = d.quantize(Decimal(1).scaleb(exp - 11), rounding=ROUND_HALF_EVEN)
        assert Decimal(format_double(x)) == q


def session():
    out, err = io.StringIO(), io.StringIO()
    return ReplSession(out=out.write, err=err.write), out, err


def test_repl_expression():
    s, out, err = session()
    s.feed("1+1")
    assert out.getvalue() == "2\n" and err.getvalue() == ""


def test_repl_keeps_state():
    s, out, err = session()
    s.feed('concept Bank in MemoryHandle { char[2] code; out int n; }')
    s.feed('Bank b = new Bank("B1");')
    s.feed('new Bank("B2")')
    s.feed("b.n = 4;")
    s.feed("b.n + 1;")
    assert out.getvalue() == "<Bank(B2)>\n5\n"
    s.feed("concept Bank in MemoryHandle { }")
    assert "duplicate concept" in err.getvalue() or "already declared" in err.getvalue()


def test_repl_reports_errors_and_continues():
    s, out, err = session()
    s.feed("print(1/0);")
    s.feed("print(3);")
    assert "DivisionByZero" in err.getvalue() and out.getvalue() == "3\n"


def test_repl_stream():
    stdin = io.StringIO('concept Bank in MemoryHandle {\n char[2] code;\n}\nnew Bank("B1")\n:quit\nprint(9);\n')
    out, err = io.StringIO(), io.StringIO()
    assert repl(stdin, out, err) == 0
    assert out.getvalue() == "<Bank(B1)>\n"


def test_repl_trace_toggle():
    stdin = io.StringIO(
        "concept A in MemoryHandle { in int f() { return 1; } }\n"
        "A a = new A();\n:trace on\na.f()\n:trace off\na.f()\n")
    out, err = io.StringIO(), io.StringIO()
    repl(stdin, out, err)
    assert out.getvalue() == "1\n1\n"
    assert err.getvalue() == "enter in A.f\nexit in A.f\n"
