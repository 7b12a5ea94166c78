"""Shared test utilities: corpus discovery and random hierarchy programs."""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from pathlib import Path

import copl

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"
NEGATIVE = CORPUS / "negative"

EXPECT = re.compile(r"^// expect: (\w+)(?: \(([^)]*)\))? exit (\d)$", re.M)


def corpus_programs() -> list[Path]:
    return sorted(CORPUS.glob("*.cop"))


def negative_programs() -> list[Path]:
    return sorted(NEGATIVE.glob("*.cop"))


def expectation(path: Path) -> tuple[str, str | None, int]:
    m = EXPECT.search(path.read_text(encoding="utf-8"))
    assert m, f"{path.name} lacks an expect header"
    return m.group(1), m.group(2), int(m.group(3))


def run(source: str, **kw) -> copl.ExecutionOutcome:
    return copl.run_source(source, **kw)


# -- random concept hierarchies ----------------------------------------------
#
# A chain C0 in MemoryHandle, C1 in C0, ... where every level may declare an
# incoming and/or outgoing version of methods m0..m2. Slot kinds:
#   None       absent (transparent during chain scans)
#   "fwd"      prints, then delegates (sub for in, super for out)
#   "leaf"     prints and returns without delegating
#   "explicit" silent pass-through forwarder, the default made explicit


@dataclass
class Hierarchy:
    depth: int
    methods: int
    incoming: dict = field(default_factory=dict)   # (level, k) -> kind
    outgoing: dict = field(default_factory=dict)
    calls_out: dict = field(default_factory=dict)  # (level, k) -> bool

    def with_slot(self, table: str, level: int, k: int, kind):
        copy = Hierarchy(self.depth, self.methods, dict(self.incoming), dict(self.outgoing), dict(self.calls_out))
        getattr(copy, table)[(level, k)] = kind
        return copy


def random_hierarchy(rng: random.Random) -> Hierarchy:
    h = Hierarchy(rng.randint(1, 4), rng.randint(1, 3))
    for level in range(h.depth):
        for k in range(h.methods):
            # the innermost incoming and the outermost outgoing slot have
            # nowhere to delegate to, so they lean towards terminal bodies
            innermost = level == h.depth - 1
            h.incoming[(level, k)] = rng.choice([None, "leaf", "leaf"] if innermost else [None, None, "fwd", "leaf"])
            h.outgoing[(level, k)] = rng.choice([None, "leaf", "leaf"] if level == 0 else [None, None, "fwd", "leaf"])
            h.calls_out[(level, k)] = rng.random() < 0.5
    return h


def _in_body(level, k, kind, calls_out):
    if kind == "explicit":
        return f"return sub.m{k}(a);"
    lines = [f'print("C{level}.in.m{k} " + a);']
    if calls_out:
        lines.append(f"int o = m{k}(a + 1);")
        lines.append('print("  out gave " + o);')
    if kind == "fwd":
        lines.append(f"return sub.m{k}(a + {level + 1}) + 1;")
    else:
        lines.append(f"return a * {level + 2} + tag;")
    return " ".join(lines)


def _out_body(level, k, kind):
    if kind == "explicit":
        return f"return super.m{k}(a);"
    if kind == "fwd":
        return f'print("C{level}.out.m{k} " + a); return super.m{k}(a) + {level};'
    return f'print("C{level}.out.m{k} leaf"); return a - {level} + tag;'


def render(h: Hierarchy, ref_level: int, k: int) -> str:
    """Program calling ``m{k}`` externally on the reference down to ``ref_level``."""
    lines = []
    for level in range(h.depth):
        parent = "MemoryHandle" if level == 0 else f"C{level - 1}"
        lines.append(f"concept C{level} in {parent} {{")
        lines.append(f"    int tag{level};" if level else "    int tag;")
        for j in range(h.methods):
            kind = h.incoming.get((level, j))
            if kind:
                lines.append(f"    in int m{j}(int a) {{ {_in_body(level, j, kind, h.calls_out.get((level, j)))} }}")
            kind = h.outgoing.get((level, j))
            if kind:
                lines.append(f"    out int m{j}(int a) {{ {_out_body(level, j, kind)} }}")
        lines.append("}")
    lines.append("C0 r0 = new C0(100);")
    for level in range(1, h.depth):
        lines.append(f"C{level} r{level} = new C{level}({level}) in r{level - 1};")
    lines.append(f"print(r{ref_level}.m{k}({k + 1}));")
    return "\n".join(lines) + "\n"


def observe(source: str) -> tuple[str, int]:
    out = run(source)
    return out.stdout, out.exit_code
