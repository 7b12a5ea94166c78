"""copl: an interpreter for a small concept-oriented scripting language."""

from .analyzer import ConceptInfo, ProgramModel, inclusion_chain, resolve
from .cli import compile_source
from .errors import CoplError, LexError, ParseError, ResolveError, RuntimeFault
from .evaluator import ExecutionOutcome, Interpreter, RunFlags, run_program
from .formatting import format_trace_event, format_value
from .lexer import Token, tokenize
from .parser import parse
from .runtime import CharArray, ConceptValue, Reference, Segment, ref_equals

__version__ = "0.1.0"


def run_source(source: str, trace: bool = False, max_depth: int = 10000) -> ExecutionOutcome:
    """Compile and run ``source``; static errors are reported in the outcome too."""
    try:
        model = compile_source(source)
    except CoplError as err:
        return ExecutionOutcome(error=err)
    return run_program(model, RunFlags(trace, max_depth))
