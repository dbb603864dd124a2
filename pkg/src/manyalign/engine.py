"""Exact counting, enumeration and sampling of S-alignments.

The ground truth is the last-column recurrence

    a(l) = sum over s in S of a(l - s),    a(0) = 1,

tabulated over the whole box ``0 <= m <= l``.  Tables are cached per step
set, and a cached table for a larger box answers any smaller query, so
diagonal sweeps cost one table.

Everything else in this module is either built on that table (enumeration,
sampling, per-part counts) or deliberately avoids it (the multiplicity
sum in :func:`count_multinomial`, the composition products in
:func:`count_independent`) so that the two can be checked against each
other.
"""
from __future__ import annotations

import itertools
import math
import random
import threading
from collections import OrderedDict
from fractions import Fraction
from typing import Iterator, Sequence

from .core import (
    NAT, NATPOS, AlignmentError, DimensionMismatch, StepSet, _as_base,
    all_positive_weak, base_contains, base_members, materialize,
    validate_step_set,
)

__all__ = [
    "EnumerationCapExceeded", "NoAlignmentExists", "InfiniteStepSet",
    "UnboundedParts", "CountTable", "count_table", "count", "count_by_parts",
    "count_with_parts", "iter_alignments", "enumerate_alignments",
    "multiplicity_vectors", "multinomial", "count_multinomial",
    "sample_uniform", "compositions_with_parts", "count_independent",
    "matrix_compositions", "prob_sum", "clear_caches", "DEFAULT_CAP",
]

DEFAULT_CAP = 10**6


class EnumerationCapExceeded(AlignmentError):
    def __init__(self, count, cap):
        super().__init__(f"{count} alignments exceed the enumeration cap of {cap}")
        self.count = count
        self.cap = cap


class NoAlignmentExists(AlignmentError):
    pass


class InfiniteStepSet(AlignmentError, ValueError):
    pass


class UnboundedParts(AlignmentError, ValueError):
    pass


def _check_lengths(s: StepSet, lengths) -> tuple[int, ...]:
    lengths = tuple(int(x) for x in lengths)
    if len(lengths) != s.dim:
        raise DimensionMismatch(f"{len(lengths)} lengths for a step set of dimension {s.dim}")
    if any(x < 0 for x in lengths):
        raise ValueError(f"lengths must be non-negative: {lengths}")
    return lengths


def _strides(box) -> list[int]:
    strides, acc = [], 1
    for b in reversed(box):
        strides.append(acc)
        acc *= b + 1
    return strides[::-1]


class CountTable:
    """Counts a_S(m) for every multi-index m in the box ``0 <= m <= box``."""

    def __init__(self, box: tuple[int, ...], values: list):
        self.box = box
        self._values = values
        self._strides = _strides(box)

    def covers(self, box) -> bool:
        return all(b <= c for b, c in zip(box, self.box))

    def __getitem__(self, idx) -> int:
        flat = 0
        for i, b, st in zip(idx, self.box, self._strides):
            if i < 0 or i > b:
                return 0
            flat += i * st
        return self._values[flat]

    def items(self) -> Iterator[tuple[tuple[int, ...], int]]:
        return zip(itertools.product(*(range(b + 1) for b in self.box)), self._values)


def _fill(steps: list, box: tuple[int, ...]) -> list[int]:
    strides = _strides(box)
    offsets = [(st, sum(x * d for x, d in zip(st, strides))) for st in steps]
    values = []
    for flat, m in enumerate(itertools.product(*(range(b + 1) for b in box))):
        if flat == 0:
            values.append(1)
            continue
        total = 0
        for st, off in offsets:
            if all(x <= y for x, y in zip(st, m)):
                total += values[flat - off]
        values.append(total)
    return values


class _TableCache:
    """Lookup-or-compute cache keyed by step set; a table for a larger box
    serves every smaller query."""

    def __init__(self, builder, maxsize=64):
        self._builder = builder
        self._maxsize = maxsize
        self._lock = threading.Lock()
        self._data: OrderedDict = OrderedDict()

    def get(self, s: StepSet, box: tuple[int, ...]):
        with self._lock:
            for key in reversed(self._data):
                if key[0] == s and self._data[key].covers(box):
                    self._data.move_to_end(key)
                    return self._data[key]
            # grow to the union with what is already cached, so queries
            # sweeping upward rebuild a few times rather than once per cell
            for key in self._data:
                if key[0] == s:
                    box = tuple(max(a, b) for a, b in zip(box, key[1]))
        table = self._builder(s, box)
        with self._lock:
            for key in [k for k in self._data if k[0] == s and table.covers(k[1])]:
                del self._data[key]
            self._data[(s, box)] = table
            while len(self._data) > self._maxsize:
                self._data.popitem(last=False)
        return table

    def clear(self):
        with self._lock:
            self._data.clear()


_tables = _TableCache(lambda s, box: CountTable(box, _fill(materialize(s, box), box)))


def clear_caches():
    _tables.clear()
    _multinomial_tables.clear()


def count_table(s: StepSet, box: Sequence[int]) -> CountTable:
    s = validate_step_set(s)
    return _tables.get(s, _check_lengths(s, box))


def count(s: StepSet, lengths: Sequence[int]) -> int:
    """Number of S-alignments of sequences with the given lengths.

    >>> from manyalign.core import unit_cube
    >>> count(unit_cube(3), (1, 2, 3))
    239
    """
    return count_table(s, lengths)[tuple(lengths)]


def _layers(steps, box) -> Iterator[list[int]]:
    """Successive flat tables of a_S(.; k) over the box, k = 0, 1, ..."""
    strides = _strides(box)
    cells = list(itertools.product(*(range(b + 1) for b in box)))
    offsets = [(st, sum(x * d for x, d in zip(st, strides))) for st in steps]
    layer = [0] * len(cells)
    layer[0] = 1
    while any(layer):
        yield layer
        nxt = [0] * len(cells)
        for flat, m in enumerate(cells):
            total = 0
            for st, off in offsets:
                if all(x <= y for x, y in zip(st, m)):
                    total += layer[flat - off]
            nxt[flat] = total
        layer = nxt


def count_by_parts(s: StepSet, lengths: Sequence[int]) -> list[int]:
    """``[a_S(l; 0), a_S(l; 1), ...]`` up to the largest feasible k."""
    s = validate_step_set(s)
    lengths = _check_lengths(s, lengths)
    flat = sum(x * d for x, d in zip(lengths, _strides(lengths)))
    out = [layer[flat] for layer in _layers(materialize(s, lengths), lengths)]
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out


def count_with_parts(s: StepSet, lengths: Sequence[int], k: int) -> int:
    """Number of S-alignments with exactly ``k`` columns."""
    if k < 0:
        return 0
    by_k = count_by_parts(s, lengths)
    return by_k[k] if k < len(by_k) else 0


def _matrix(cols, n) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(c[i] for c in cols) for i in range(n))


def iter_alignments(s: StepSet, lengths: Sequence[int]) -> Iterator[tuple]:
    """Yield every S-alignment as a tuple of rows, in lexicographic order of
    the column sequence."""
    s = validate_step_set(s)
    lengths = _check_lengths(s, lengths)
    n = s.dim
    if not any(lengths):
        yield ((),) * n
        return
    table = count_table(s, lengths)
    if table[lengths] == 0:
        return
    steps = materialize(s, lengths)
    path: list = []
    residual = lengths
    stack = [iter(steps)]
    while stack:
        for st in stack[-1]:
            rest = tuple(a - b for a, b in zip(residual, st))
            if min(rest) < 0 or table[rest] == 0:
                continue
            if not any(rest):
                yield _matrix(path + [st], n)
                continue
            path.append(st)
            residual = rest
            stack.append(iter(steps))
            break
        else:
            stack.pop()
            if path:
                st = path.pop()
                residual = tuple(a + b for a, b in zip(residual, st))


def enumerate_alignments(s: StepSet, lengths: Sequence[int], cap: int = DEFAULT_CAP) -> list:
    """All S-alignments as a list; refuses when there are more than ``cap``."""
    total = count(s, lengths)
    if total > cap:
        raise EnumerationCapExceeded(total, cap)
    return list(iter_alignments(s, lengths))


def multinomial(counts: Sequence[int]) -> int:
    """(r1+...+rt)! / (r1!...rt!) as a product of binomials."""
    out, k = 1, 0
    for r in counts:
        k += r
        out *= math.comb(k, r)
    return out


def multiplicity_vectors(s: StepSet, lengths: Sequence[int], k: int | None = None):
    """Yield ``(steps, r)`` for every multiplicity vector r with
    ``sum(r_i * steps_i) == lengths`` (and ``sum(r) == k`` if k is given).

    ``steps`` is the materialization of S inside the length box; steps that
    do not fit get multiplicity 0 and are left out.  Depth-first with
    pruning on the residual.
    """
    s = validate_step_set(s)
    lengths = _check_lengths(s, lengths)
    steps = materialize(s, lengths)
    t = len(steps)
    # coords[i]: coordinates still reachable by steps[i:]
    coords = [set() for _ in range(t + 1)]
    for i in range(t - 1, -1, -1):
        coords[i] = coords[i + 1] | {c for c, x in enumerate(steps[i]) if x}
    r = [0] * t

    def rec(i, residual, used):
        if not any(residual):
            if k is None or used == k:
                yield tuple(r)
            return
        if i == t or any(x and c not in coords[i] for c, x in enumerate(residual)):
            return
        if k is not None and used >= k:
            return
        st = steps[i]
        most = min(x // y for x, y in zip(residual, st) if y)
        if k is not None:
            most = min(most, k - used)
        for m in range(most, -1, -1):
            r[i] = m
            yield from rec(i + 1, tuple(x - m * y for x, y in zip(residual, st)), used + m)
        r[i] = 0

    for vec in rec(0, lengths, 0):
        yield steps, vec


class _MultinomialTable:
    """For every residual m in the box, the map k -> sum of multinomial
    coefficients over multiplicity vectors of m with k parts.

    Built one step type at a time: a multinomial (r_1,...,r_t) factors as
    prod_i C(r_i + ... + r_t, r_i), so adding step type i with multiplicity
    r on top of a suffix with R parts contributes C(R + r, r).
    """

    def __init__(self, steps, box):
        self.box = box
        strides = _strides(box)
        cells = list(itertools.product(*(range(b + 1) for b in box)))
        layer = [dict() for _ in cells]
        layer[0] = {0: 1}
        for st in reversed(steps):
            off = sum(x * d for x, d in zip(st, strides))
            nxt = []
            for flat, m in enumerate(cells):
                acc = dict(layer[flat])
                most = min(x // y for x, y in zip(m, st) if y)
                for r in range(1, most + 1):
                    for big_r, w in layer[flat - r * off].items():
                        key = big_r + r
                        acc[key] = acc.get(key, 0) + math.comb(key, r) * w
                nxt.append(acc)
            layer = nxt
        self._values = layer
        self._strides = strides

    def covers(self, box) -> bool:
        return all(b <= c for b, c in zip(box, self.box))

    def by_parts(self, idx) -> dict:
        return self._values[sum(i * d for i, d in zip(idx, self._strides))]


_multinomial_tables = _TableCache(lambda s, box: _MultinomialTable(materialize(s, box), box), maxsize=16)


def count_multinomial(s: StepSet, lengths: Sequence[int], by_parts: bool = False):
    """a_S(l) as a sum of multinomial coefficients over multiplicity vectors.

    Independent of the recurrence table.  With ``by_parts=True`` return the
    dict ``{k: a_S(l; k)}`` of non-zero terms instead.
    """
    s = validate_step_set(s)
    lengths = _check_lengths(s, lengths)
    terms = _multinomial_tables.get(s, lengths).by_parts(lengths)
    if by_parts:
        return {k: v for k, v in sorted(terms.items()) if v}
    return sum(terms.values())


def sample_uniform(s: StepSet, lengths: Sequence[int], seed=None):
    """Draw one S-alignment uniformly at random.

    Columns are drawn from last to first: at residual m the column s is
    picked with probability a(m - s) / a(m).  ``seed`` is an int or a
    ``random.Random`` instance.
    """
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    s = validate_step_set(s)
    lengths = _check_lengths(s, lengths)
    table = count_table(s, lengths)
    if table[lengths] == 0:
        raise NoAlignmentExists(f"no alignment of lengths {lengths}")
    steps = materialize(s, lengths)
    cols = []
    residual = lengths
    while any(residual):
        x = rng.randrange(table[residual])
        for st in steps:
            rest = tuple(a - b for a, b in zip(residual, st))
            c = table[rest]
            if x < c:
                break
            x -= c
        cols.append(st)
        residual = rest
    return _matrix(cols[::-1], s.dim)


def compositions_with_parts(base, n: int, k: int) -> int:
    """Number of compositions of ``n`` into exactly ``k`` parts from ``base``.

    ``base`` is a finite collection of non-negative integers or a
    Progression such as NAT or NATPOS.
    """
    base = _as_base(base)
    if n < 0 or k < 0:
        return 0
    if k == 0:
        return int(n == 0)
    if base == NATPOS:
        return math.comb(n - 1, k - 1) if n >= 1 else 0
    if base == NAT:
        return math.comb(n + k - 1, k - 1)
    parts = base_members(base, n)
    ways = [1] + [0] * n
    for _ in range(k):
        ways = [sum(ways[j - p] for p in parts if p <= j) for j in range(n + 1)]
    return ways[n]


def _max_parts(base, n: int) -> int:
    members = base_members(base, n)
    return n // members[0] if members else 0


def count_independent(bases: Sequence, lengths: Sequence[int]) -> int:
    """a_S(l) for S a product of base sets: sum_k prod_i c_i(l_i; k)."""
    bases = [_as_base(b) for b in bases]
    lengths = tuple(lengths)
    if len(bases) != len(lengths):
        raise DimensionMismatch(f"{len(bases)} base sets for {len(lengths)} lengths")
    if all(base_contains(b, 0) for b in bases):
        raise UnboundedParts("every base set contains 0; the number of parts is unbounded")
    kmax = min(_max_parts(b, l) for b, l in zip(bases, lengths) if not base_contains(b, 0))
    return sum(
        math.prod(compositions_with_parts(b, l, k) for b, l in zip(bases, lengths))
        for k in range(kmax + 1)
    )


def matrix_compositions(n_rows: int, n: int) -> int:
    """Number of matrices with ``n_rows`` rows, non-negative entries summing
    to ``n`` and no zero column."""
    if n_rows < 1 or n < 0:
        raise ValueError("need n_rows >= 1 and n >= 0")
    table = count_table(all_positive_weak(n_rows), (n,) * n_rows)
    return sum(v for idx, v in table.items() if sum(idx) == n)


def prob_sum(s: StepSet, k: int, lengths: Sequence[int]) -> Fraction:
    """P[X_1 + ... + X_k = l] for i.i.d. X_j uniform on the finite set S."""
    s = validate_step_set(s)
    if not s.is_finite:
        raise InfiniteStepSet("uniform distribution needs a finite step set")
    size = len(s.steps)
    if size == 0:
        return Fraction(int(k == 0 and not any(lengths)))
    return Fraction(count_with_parts(s, lengths, k), size**k)
