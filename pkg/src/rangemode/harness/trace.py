"""Operation traces: text format, validation and random generation.

Format::

    # N=<capacity> seed=<seed>
    I <pos> <value>
    D <pos>
    Q <l> <r>

Positions are 1-based and values are unsigned 32-bit integers.
"""

import itertools
import random
import re
from dataclasses import dataclass, field

U32 = 2 ** 32
_HEADER = re.compile(r"#\s*N=(\d+)\s+seed=(-?\d+)\s*$")


class TraceError(ValueError):
    def __init__(self, line, message):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass
class Trace:
    N: int
    seed: int = 0
    ops: list = field(default_factory=list)

    def counts(self):
        out = {"I": 0, "D": 0, "Q": 0}
        for op in self.ops:
            out[op[0]] += 1
        return out


def format_trace(trace):
    lines = [f"# N={trace.N} seed={trace.seed}"]
    lines.extend(" ".join(str(x) for x in op) for op in trace.ops)
    return "\n".join(lines) + "\n"


def parse_trace(text):
    """Parse and validate a trace; errors carry the offending line number."""
    lines = text.splitlines()
    if not lines:
        raise TraceError(1, "missing header")
    m = _HEADER.match(lines[0].strip())
    if not m:
        raise TraceError(1, "header must read '# N=<int> seed=<int>'")
    trace = Trace(int(m.group(1)), int(m.group(2)))
    arity = {"I": 2, "D": 1, "Q": 2}
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split()
        if not parts:
            continue
        kind = parts[0]
        if kind not in arity:
            raise TraceError(lineno, f"unknown operation {kind!r}")
        if len(parts) != arity[kind] + 1:
            raise TraceError(lineno, f"{kind} takes {arity[kind]} arguments")
        try:
            args = tuple(int(p) for p in parts[1:])
        except ValueError:
            raise TraceError(lineno, "arguments must be integers") from None
        trace.ops.append((kind,) + args)
    validate_trace(trace, first_line=2)
    return trace


def validate_trace(trace, first_line=1):
    """Check every operation against the running length and capacity."""
    length = 0
    for lineno, op in enumerate(trace.ops, start=first_line):
        kind = op[0]
        if kind == "I":
            pos, value = op[1], op[2]
            if length >= trace.N:
                raise TraceError(lineno, f"insert beyond capacity N={trace.N}")
            if not 1 <= pos <= length + 1:
                raise TraceError(lineno, f"insert position {pos} outside 1..{length + 1}")
            if not 0 <= value < U32:
                raise TraceError(lineno, f"value {value} is not an unsigned 32-bit integer")
            length += 1
        elif kind == "D":
            if not 1 <= op[1] <= length:
                raise TraceError(lineno, f"delete position {op[1]} outside 1..{length}")
            length -= 1
        elif kind == "Q":
            l, r = op[1], op[2]
            if not 1 <= l <= r <= length:
                raise TraceError(lineno, f"query [{l}, {r}] outside 1..{length}")
        else:
            raise TraceError(lineno, f"unknown operation {kind!r}")
    return length


def parse_distribution(text):
    """``uniform[:V]`` or ``zipf:theta[:V]`` into ``(name, V, theta)``."""
    parts = text.split(":")
    name = parts[0]
    try:
        if name == "uniform" and len(parts) <= 2:
            V = int(parts[1]) if len(parts) == 2 else 256
            theta = 0.0
        elif name == "zipf" and 2 <= len(parts) <= 3:
            theta = float(parts[1])
            V = int(parts[2]) if len(parts) == 3 else 256
        else:
            raise ValueError
    except ValueError:
        raise ValueError(f"bad distribution {text!r}; use uniform[:V] or zipf:THETA[:V]") from None
    if V < 1 or theta < 0:
        raise ValueError(f"bad distribution {text!r}")
    return name, V, theta


def generate_trace(n_ops, N, dist="zipf:1.1", mix=(0.5, 0.2, 0.3), seed=0):
    """Random valid trace with ``mix = (insert, delete, query)`` proportions."""
    if len(mix) != 3 or any(p < 0 for p in mix) or abs(sum(mix) - 1) > 1e-9:
        raise ValueError("op mix must be three non-negative proportions summing to 1")
    if N < 1:
        raise ValueError("capacity N must be positive")
    name, V, theta = parse_distribution(dist)
    rng = random.Random(seed)
    weights = [1.0 / (k ** theta) for k in range(1, V + 1)]
    cum = list(itertools.accumulate(weights))
    values = list(range(1, V + 1))
    kinds = "IDQ"
    trace = Trace(N, seed)
    length = 0
    for _ in range(n_ops):
        allowed = [
            length < N and mix[0] > 0,
            length > 0 and mix[1] > 0,
            length > 0 and mix[2] > 0,
        ]
        if not any(allowed):
            raise ValueError(f"op mix {mix} has no valid operation at length {length}")
        while True:
            kind = rng.choices(kinds, weights=mix)[0]
            if allowed[kinds.index(kind)]:
                break
        if kind == "I":
            value = rng.choices(values, cum_weights=cum)[0]
            trace.ops.append(("I", rng.randint(1, length + 1), value))
            length += 1
        elif kind == "D":
            trace.ops.append(("D", rng.randint(1, length)))
            length -= 1
        else:
            l = rng.randint(1, length)
            trace.ops.append(("Q", l, rng.randint(l, length)))
    return trace
