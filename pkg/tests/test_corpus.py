import pytest

from copl.errors import ResolveError

from helpers import corpus_programs, expectation, negative_programs, run


@pytest.mark.parametrize("path", corpus_programs(), ids=lambda p: p.stem)
def test_golden_stdout(path):
    out = run(path.read_text(encoding="utf-8"))
    assert out.ok, out.error
    assert out.stdout == path.with_suffix(".out").read_text(encoding="utf-8")


@pytest.mark.parametrize("path", corpus_programs(), ids=lambda p: p.stem)
def test_trace_does_not_change_stdout(path):
    src = path.read_text(encoding="utf-8")
    assert run(src, trace=True).stdout == run(src).stdout


@pytest.mark.parametrize("path", negative_programs(), ids=lambda p: p.stem)
def test_negative_program(path):
    kind, reason, exit_code = expectation(path)
    src = path.read_text(encoding="utf-8")
    out = run(src)
    assert out.error is not None
    assert (out.error.kind, out.exit_code) == (kind, exit_code)
    if reason is not None:
        assert isinstance(out.error, ResolveError) and out.error.reason == reason
    line, col = out.error.pos
    lines = src.splitlines()
    assert 1 <= line <= len(lines) and 1 <= col <= len(lines[line - 1]) + 1
