"""Step sets, alignment matrices and the step-set mini-language.

A step set is the set of allowed alignment columns, a subset of the
non-negative integer lattice of dimension N with the zero vector removed.
Finite sets are stored explicitly; the infinite ones (and a few common
finite ones) are described intensionally and only ever materialized
inside a bounding box::

    >>> s = parse_step_set("{(1,1),(1,2),(2,1)}")
    >>> materialize(s, (1, 1))
    [(1, 1)]
    >>> len(materialize(unit_cube(3), (5, 5, 5)))
    7
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

__all__ = [
    "AlignmentError", "ZeroStepError", "DimensionMismatch", "DSLError",
    "Progression", "NAT", "NATPOS", "ODD",
    "StepSet", "explicit", "unit_cube", "box", "all_positive_weak",
    "half_open", "product",
    "validate_step_set", "materialize", "is_alignment", "columns",
    "permute_coordinates", "permute_tuple", "base_members", "base_contains",
    "parse_step_set", "parse_base_set", "format_step_set",
]


class AlignmentError(Exception):
    """Base class for all errors raised by this package."""


class ZeroStepError(AlignmentError, ValueError):
    pass


class DimensionMismatch(AlignmentError, ValueError):
    pass


class DSLError(AlignmentError, ValueError):
    """A step-set expression could not be parsed; ``token`` is the culprit."""

    def __init__(self, message, token=""):
        super().__init__(message)
        self.token = token


@dataclass(frozen=True, order=True)
class Progression:
    """The infinite arithmetic progression ``start, start+step, ...``."""
    start: int
    step: int = 1

    def __post_init__(self):
        if self.start < 0 or self.step < 1:
            raise ValueError(f"bad progression {self.start}, {self.step}")


NAT = Progression(0)
NATPOS = Progression(1)
ODD = Progression(1, 2)


def _as_base(base) -> frozenset | Progression:
    # base sets are finite frozensets of non-negative ints or Progressions
    if isinstance(base, Progression):
        return base
    values = frozenset(int(v) for v in base)
    if any(v < 0 for v in values):
        raise ValueError(f"base set has negative members: {sorted(values)}")
    return values


def base_members(base, upto: int) -> list[int]:
    """Sorted members of ``base`` that are at most ``upto``."""
    if isinstance(base, Progression):
        return list(range(base.start, upto + 1, base.step))
    return sorted(v for v in base if v <= upto)


def base_contains(base, value: int) -> bool:
    if isinstance(base, Progression):
        return value >= base.start and (value - base.start) % base.step == 0
    return value in base


@dataclass(frozen=True)
class StepSet:
    """An allowed-column set of dimension ``dim``.

    ``kind`` is one of ``explicit``, ``unit``, ``box``, ``natpos`` and
    ``product``.  Use the constructor functions below rather than building
    instances by hand.
    """
    dim: int
    kind: str
    steps: tuple = ()
    lo: int = 0
    hi: int = 0
    bases: tuple = ()

    @property
    def is_finite(self) -> bool:
        if self.kind == "natpos":
            return False
        if self.kind == "product":
            return not any(isinstance(b, Progression) for b in self.bases)
        return True

    def __contains__(self, step) -> bool:
        step = tuple(step)
        if len(step) != self.dim or any(x < 0 for x in step) or not any(step):
            return False
        if self.kind == "explicit":
            return step in self.steps
        if self.kind == "unit":
            return all(x <= 1 for x in step)
        if self.kind == "box":
            return all(self.lo <= x <= self.hi for x in step)
        if self.kind == "natpos":
            return True
        return all(base_contains(b, x) for b, x in zip(self.bases, step))

    def __len__(self) -> int:
        if not self.is_finite:
            raise TypeError("infinite step set has no length")
        return len(materialize(self, self.bound()))

    def bound(self) -> tuple[int, ...]:
        """Componentwise maximum over a finite step set (zeros if empty)."""
        if self.kind == "explicit":
            if not self.steps:
                return (0,) * self.dim
            return tuple(max(col) for col in zip(*self.steps))
        if self.kind == "unit":
            return (1,) * self.dim
        if self.kind == "box":
            return (self.hi,) * self.dim
        if self.is_finite:
            return tuple(max(b, default=0) for b in self.bases)
        raise TypeError("infinite step set is unbounded")


def explicit(steps: Iterable[Sequence[int]], dim: int | None = None) -> StepSet:
    steps = [tuple(int(x) for x in s) for s in steps]
    dims = {len(s) for s in steps}
    if dim is None:
        if len(dims) != 1:
            raise DimensionMismatch(
                "cannot infer dimension" if not dims else f"steps disagree on dimension: {sorted(dims)}")
        dim = dims.pop()
    elif dims - {dim}:
        raise DimensionMismatch(f"steps of dimension {sorted(dims - {dim})} in a set of dimension {dim}")
    return StepSet(dim, "explicit", tuple(sorted(set(steps))))


def unit_cube(n: int) -> StepSet:
    """{0,1}^n without the zero vector: the classical alignment steps."""
    return StepSet(n, "unit")


def box(lo: int, hi: int, n: int) -> StepSet:
    """{lo..hi}^n for 1 <= lo <= hi."""
    if not 1 <= lo <= hi:
        raise ValueError(f"box needs 1 <= lo <= hi, got {lo}..{hi}")
    return StepSet(n, "box", lo=lo, hi=hi)


def all_positive_weak(n: int) -> StepSet:
    """Every non-zero vector of N^n."""
    return StepSet(n, "natpos")


def half_open() -> StepSet:
    """{(x, y) | x >= 1, y >= 0}."""
    return product(NATPOS, NAT)


def product(*bases) -> StepSet:
    """Cartesian product of base sets (minus the zero vector if present)."""
    return StepSet(len(bases), "product", bases=tuple(_as_base(b) for b in bases))


@lru_cache(maxsize=256)
def validate_step_set(s: StepSet) -> StepSet:
    """Check a step set and return its canonical form.

    Finite sets come back as sorted, deduplicated explicit lists.  A set
    containing the zero vector would make every count infinite and raises
    ZeroStepError.
    """
    if s.dim < 1:
        raise DimensionMismatch(f"dimension must be >= 1, got {s.dim}")
    if s.kind == "explicit":
        for step in s.steps:
            if len(step) != s.dim:
                raise DimensionMismatch(f"step {step} has dimension {len(step)}, expected {s.dim}")
            if any(x < 0 for x in step):
                raise ValueError(f"step {step} has a negative entry")
            if not any(step):
                raise ZeroStepError(f"zero vector {step} is not a valid step")
        return explicit(s.steps, s.dim)
    if s.kind == "product":
        if len(s.bases) != s.dim:
            raise DimensionMismatch(f"{len(s.bases)} base sets for dimension {s.dim}")
        if all(base_contains(b, 0) for b in s.bases):
            raise ZeroStepError("every base set contains 0, so the zero vector is a step")
    elif s.kind == "box" and not 1 <= s.lo <= s.hi:
        raise ValueError(f"box needs 1 <= lo <= hi, got {s.lo}..{s.hi}")
    elif s.kind not in ("unit", "box", "natpos"):
        raise ValueError(f"unknown step-set kind {s.kind!r}")
    if s.is_finite:
        return explicit(materialize(s, s.bound()), s.dim)
    return s


def materialize(s: StepSet, bound: Sequence[int]) -> list[tuple[int, ...]]:
    """All members of ``s`` lying componentwise below ``bound``, sorted."""
    bound = tuple(bound)
    if len(bound) != s.dim:
        raise DimensionMismatch(f"box {bound} does not match dimension {s.dim}")
    if s.kind == "explicit":
        return [st for st in s.steps if all(x <= b for x, b in zip(st, bound))]
    if s.kind == "unit":
        axes = [range(min(1, b) + 1) for b in bound]
    elif s.kind == "box":
        axes = [range(s.lo, min(s.hi, b) + 1) for b in bound]
    elif s.kind == "natpos":
        axes = [range(b + 1) for b in bound]
    else:
        axes = [base_members(base, b) for base, b in zip(s.bases, bound)]
    return [st for st in itertools.product(*axes) if any(st)]


def columns(matrix) -> list[tuple[int, ...]]:
    """Columns of a matrix given as a sequence of rows."""
    return list(zip(*matrix))


def is_alignment(matrix, s: StepSet, lengths: Sequence[int]) -> bool:
    """True iff every row sums to its length and every column lies in ``s``.

    The empty matrix (N rows, no columns) is the single alignment of the
    all-zero length tuple.
    """
    rows = [tuple(r) for r in matrix]
    if len(rows) != s.dim or len(lengths) != s.dim:
        raise DimensionMismatch(
            f"matrix has {len(rows)} rows, step set dimension {s.dim}, {len(lengths)} lengths")
    if len({len(r) for r in rows}) > 1:
        raise ValueError("ragged matrix")
    if any(x < 0 for r in rows for x in r):
        return False
    if any(sum(r) != l for r, l in zip(rows, lengths)):
        return False
    return all(col in s for col in columns(rows))


def permute_tuple(values: Sequence, perm: Sequence[int]) -> tuple:
    """Move entry ``i`` to position ``perm[i]`` (0-based)."""
    if sorted(perm) != list(range(len(values))):
        raise ValueError(f"{perm} is not a permutation of 0..{len(values) - 1}")
    out = [None] * len(values)
    for i, v in enumerate(values):
        out[perm[i]] = v
    return tuple(out)


def permute_coordinates(s: StepSet, perm: Sequence[int]) -> StepSet:
    if len(perm) != s.dim:
        raise DimensionMismatch(f"permutation of length {len(perm)} for dimension {s.dim}")
    if s.kind in ("unit", "box", "natpos"):
        permute_tuple(range(s.dim), perm)
        return s
    if s.kind == "product":
        return StepSet(s.dim, "product", bases=permute_tuple(s.bases, perm))
    return explicit((permute_tuple(st, perm) for st in s.steps), s.dim)


# ---------------------------------------------------------------------------
# Step-set mini-language
#
#   stepset  := "unit(" N ")" | "box(" a ".." b "," N ")" | "natpos(" N ")"
#             | "halfopen2" | "prod(" base ("," base)* ")" | explicit
#   explicit := "{" [ tuple ("," tuple)* ] "}"   (dimension taken from tuples)
#   tuple    := "(" int ("," int)* ")"
#   base     := "nat" | "natpos" | "odd" | a ".." | a ".." b
#             | "[" [ int ("," int)* ] "]"
#
# Whitespace is ignored everywhere.  "a.." is the infinite set {a, a+1, ...}.
# ---------------------------------------------------------------------------

_INT = r"(\d+)"


def parse_base_set(text: str):
    t = re.sub(r"\s+", "", text)
    if t == "nat":
        return NAT
    if t == "natpos":
        return NATPOS
    if t == "odd":
        return ODD
    m = re.fullmatch(_INT + r"\.\.", t)
    if m:
        return Progression(int(m.group(1)))
    m = re.fullmatch(_INT + r"\.\." + _INT, t)
    if m:
        a, b = int(m.group(1)), int(m.group(2))
        if a > b:
            raise DSLError(f"empty range {t!r}", t)
        return frozenset(range(a, b + 1))
    m = re.fullmatch(r"\[(.*)\]", t)
    if m:
        body = m.group(1)
        if not body:
            return frozenset()
        items = body.split(",")
        for it in items:
            if not re.fullmatch(r"\d+", it):
                raise DSLError(f"bad base-set member {it!r}", it)
        return frozenset(int(it) for it in items)
    raise DSLError(f"bad base set {t!r}", t)


def _split_top(text: str) -> list[str]:
    """Split on commas that are not nested inside brackets."""
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch in "([{":
            depth += 1
        elif ch in ")]}":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return parts


def parse_step_set(text: str) -> StepSet:
    t = re.sub(r"\s+", "", text)
    if not t:
        raise DSLError("empty step-set expression", "")
    m = re.fullmatch(r"unit\(" + _INT + r"\)", t)
    if m:
        return unit_cube(_positive(m.group(1), t))
    m = re.fullmatch(r"natpos\(" + _INT + r"\)", t)
    if m:
        return all_positive_weak(_positive(m.group(1), t))
    m = re.fullmatch(r"box\(" + _INT + r"\.\." + _INT + "," + _INT + r"\)", t)
    if m:
        a, b, n = (int(g) for g in m.groups())
        if not 1 <= a <= b:
            raise DSLError(f"box range must satisfy 1 <= a <= b in {t!r}", f"{a}..{b}")
        return box(a, b, _positive(m.group(3), t))
    if t == "halfopen2":
        return half_open()
    m = re.fullmatch(r"prod\((.*)\)", t)
    if m:
        return product(*(parse_base_set(p) for p in _split_top(m.group(1))))
    m = re.fullmatch(r"\{(.*)\}", t)
    if m:
        body = m.group(1)
        if not body:
            raise DSLError("cannot infer the dimension of an empty explicit set; "
                           "use prod([],...) instead", t)
        steps = []
        for tok in _split_top(body):
            tm = re.fullmatch(r"\((\d+(?:,\d+)*)\)", tok)
            if not tm:
                raise DSLError(f"bad step {tok!r}", tok)
            steps.append(tuple(int(x) for x in tm.group(1).split(",")))
        try:
            return explicit(steps)
        except DimensionMismatch as exc:
            raise DSLError(str(exc), body) from exc
    raise DSLError(f"unrecognised step set {t!r}", t)


def _positive(tok: str, text: str) -> int:
    n = int(tok)
    if n < 1:
        raise DSLError(f"dimension must be >= 1 in {text!r}", tok)
    return n


def _format_base(base) -> str:
    if base == NAT:
        return "nat"
    if base == NATPOS:
        return "natpos"
    if base == ODD:
        return "odd"
    if isinstance(base, Progression):
        if base.step != 1:
            raise ValueError(f"progression {base} has no DSL form")
        return f"{base.start}.."
    return "[" + ",".join(str(v) for v in sorted(base)) + "]"


def format_step_set(s: StepSet) -> str:
    """Render ``s`` in the mini-language (inverse of parse_step_set)."""
    if s.kind == "unit":
        return f"unit({s.dim})"
    if s.kind == "box":
        return f"box({s.lo}..{s.hi},{s.dim})"
    if s.kind == "natpos":
        return f"natpos({s.dim})"
    if s.kind == "product":
        if s.bases == (NATPOS, NAT):
            return "halfopen2"
        return "prod(" + ",".join(_format_base(b) for b in s.bases) + ")"
    if not s.steps:
        return "prod(" + ",".join(["[]"] * s.dim) + ")"
    return "{" + ",".join("(" + ",".join(map(str, st)) + ")" for st in s.steps) + "}"
