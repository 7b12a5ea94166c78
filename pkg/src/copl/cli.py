"""``copl`` command line: ``copl run FILE`` and ``copl repl``.

Exit codes: 0 success, 1 runtime error, 2 lex/parse/resolve error,
3 I/O or usage error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from typing import Callable, Optional, TextIO

from . import nodes as n
from .analyzer import ProgramModel, resolve
from .errors import CoplError, ParseError, RuntimeFault
from .evaluator import Interpreter, RunFlags, call_with_deep_stack, run_program
from .formatting import format_trace_event, format_value
from .lexer import PUNCT, Token, tokenize
from .parser import parse
from .runtime import DEFAULT_MAX_DEPTH, VOID, TraceEvent

EXIT_OK, EXIT_RUNTIME, EXIT_STATIC, EXIT_USAGE = 0, 1, 2, 3


@dataclass
class CliConfig:
    source_path: str
    trace: bool = False
    max_depth: int = DEFAULT_MAX_DEPTH

    def __post_init__(self):
        if self.max_depth < 1:
            raise ValueError("max_depth must be at least 1")


def compile_source(source: str, base: Optional[ProgramModel] = None) -> ProgramModel:
    return resolve(parse(tokenize(source)), base)


def diagnostic(path: str, err: CoplError) -> str:
    line, col = err.pos if err.pos is not None else (0, 0)
    return f"{path}:{line}:{col}: {err.kind}: {err.message}"


def run_file(config: CliConfig, stdout: TextIO = None, stderr: TextIO = None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        with open(config.source_path, encoding="utf-8") as f:
            source = f.read()
    except (OSError, UnicodeDecodeError) as exc:
        stderr.write(f"copl: cannot read {config.source_path}: {exc}\n")
        return EXIT_USAGE
    try:
        model = compile_source(source)
    except CoplError as err:
        stderr.write(diagnostic(config.source_path, err) + "\n")
        return err.exit_code

    def emit(event: TraceEvent):
        stderr.write(format_trace_event(event) + "\n")

    outcome = run_program(model, RunFlags(config.trace, config.max_depth),
                          out=stdout.write, on_trace=emit)
    stdout.flush()
    if outcome.error is not None:
        stderr.write(diagnostic(config.source_path, outcome.error) + "\n")
        return outcome.error.exit_code
    return EXIT_OK


class ReplSession:
    """State kept across REPL inputs: declared concepts, variables and the store."""

    def __init__(self, trace: bool = False, max_depth: int = DEFAULT_MAX_DEPTH,
                 out: Callable[[str], None] = None, err: Callable[[str], None] = None):
        self.model = ProgramModel({}, [])
        self.trace = trace
        self.out = out or sys.stdout.write
        self.err = err or sys.stderr.write
        self.interp = Interpreter(self.model, max_depth=max_depth, trace=self._trace, out=self.out)

    def _trace(self, event):
        if self.trace:
            self.err(format_trace_event(event) + "\n")

    def needs_more(self, text: str) -> bool:
        """True when ``text`` is an unfinished prefix of a valid input."""
        try:
            tokens = tokenize(text)
        except CoplError as err:
            return "unterminated block comment" in err.message
        depth = 0
        for tok in tokens:
            if tok.lexeme in ("{", "("):
                depth += 1
            elif tok.lexeme in ("}", ")"):
                depth -= 1
        return depth > 0

    def feed(self, text: str) -> None:
        """Evaluate one complete input; diagnostics go to ``err``."""
        command = text.strip()
        if command.startswith(":trace"):
            arg = command.split()[1:] or [""]
            if arg[0] in ("on", "off"):
                self.trace = arg[0] == "on"
            else:
                self.err("usage: :trace on|off\n")
            return
        try:
            program = self._parse(text)
            model = resolve(program, self.model)
        except CoplError as err:
            self.err(diagnostic("<repl>", err) + "\n")
            return
        self.model.concepts.update(model.concepts)
        try:
            for stmt in model.statements:
                if isinstance(stmt, n.ExprStmt):
                    value = self.interp.eval_expr(stmt.expr, self.interp.script)
                    if value is not VOID:
                        self.out(format_value(value) + "\n")
                else:
                    self.interp.run_statements([stmt])
        except RuntimeFault as err:
            self.err(diagnostic("<repl>", err) + "\n")

    def _parse(self, text: str) -> n.Program:
        try:
            return parse(tokenize(text))
        except ParseError as first:
            # a bare expression without the trailing semicolon
            tokens = tokenize(text)
            end = tokens[-1]
            patched = tokens[:-1] + [Token(PUNCT, ";", end.line, end.column), end]
            try:
                program = parse(patched)
            except ParseError:
                raise first
            if len(program.statements) == 1 and isinstance(program.statements[0], n.ExprStmt):
                return program
            raise first


def repl(stdin: TextIO = None, stdout: TextIO = None, stderr: TextIO = None,
         trace: bool = False, max_depth: int = DEFAULT_MAX_DEPTH) -> int:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    interactive = stdin.isatty()

    def write_out(text):
        stdout.write(text)
        stdout.flush()

    def write_err(text):
        stdout.flush()
        stderr.write(text)
        stderr.flush()

    session = ReplSession(trace, max_depth, out=write_out, err=write_err)
    buffer = ""
    while True:
        if interactive:
            write_out("... " if buffer else "copl> ")
        line = stdin.readline()
        if not line:
            if buffer.strip():
                session.feed(buffer)
            break
        if not buffer and line.strip() == ":quit":
            break
        buffer += line
        if not buffer.strip() or session.needs_more(buffer):
            if not buffer.strip():
                buffer = ""
            continue
        session.feed(buffer)
        buffer = ""
    return EXIT_OK


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="copl", description="Concept-oriented scripting language interpreter.")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)
    run = commands.add_parser("run", help="run a .cop file")
    run.add_argument("file")
    run.add_argument("--trace", action="store_true", help="log border crossings to stderr")
    run.add_argument("--max-depth", type=_positive, default=DEFAULT_MAX_DEPTH, metavar="N")
    rep = commands.add_parser("repl", help="interactive session")
    rep.add_argument("--trace", action="store_true")
    rep.add_argument("--max-depth", type=_positive, default=DEFAULT_MAX_DEPTH, metavar="N")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        return run_file(CliConfig(args.file, args.trace, args.max_depth))
    return call_with_deep_stack(repl, None, None, None, args.trace, args.max_depth,
                                max_depth=args.max_depth)


if __name__ == "__main__":
    sys.exit(main())
