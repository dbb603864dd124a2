"""Truncated expansion of the alignment generating function.

With P(z) = sum over s in S of z^s, the generating function of a_S is
1 / (1 - P(z)) = sum_k P(z)^k.  Every step has positive degree, so P^k
has no monomial of total degree below k and the geometric series is finite
inside any box.  Polynomials here are plain dicts from exponent tuples to
ints, truncated to the box after every product.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .core import DimensionMismatch, StepSet, materialize, validate_step_set

__all__ = ["SeriesBox", "step_polynomial", "truncated_product",
           "series_coefficients", "fixed_k_coefficients"]


@dataclass(frozen=True)
class SeriesBox:
    """Coefficients of a power series for exponents inside ``box``."""
    box: tuple[int, ...]
    coeffs: dict = field(default_factory=dict)

    def __getitem__(self, idx) -> int:
        return self.coeffs.get(tuple(idx), 0)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SeriesBox):
            return NotImplemented
        nz = lambda d: {k: v for k, v in d.items() if v}
        return self.box == other.box and nz(self.coeffs) == nz(other.coeffs)


def _box_of(s: StepSet, box) -> tuple[int, ...]:
    box = tuple(int(b) for b in box)
    if len(box) != s.dim:
        raise DimensionMismatch(f"box {box} does not match dimension {s.dim}")
    if any(b < 0 for b in box):
        raise ValueError(f"box must be non-negative: {box}")
    return box


def step_polynomial(s: StepSet, box: Sequence[int]) -> dict:
    s = validate_step_set(s)
    return {st: 1 for st in materialize(s, _box_of(s, box))}


def truncated_product(p: dict, q: dict, box: Sequence[int]) -> dict:
    """p * q with every monomial outside the box dropped."""
    out: dict = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            if all(x <= b for x, b in zip(e, box)):
                out[e] = out.get(e, 0) + c1 * c2
    return out


def series_coefficients(s: StepSet, box: Sequence[int]) -> SeriesBox:
    """Coefficients of 1 / (1 - P(z)) inside the box, as exact integers."""
    s = validate_step_set(s)
    box = _box_of(s, box)
    poly = step_polynomial(s, box)
    total = {(0,) * s.dim: 1}
    power = dict(total)
    for _ in range(sum(box)):
        power = truncated_product(power, poly, box)
        if not power:
            break
        for e, c in power.items():
            total[e] = total.get(e, 0) + c
    return SeriesBox(box, total)


def fixed_k_coefficients(s: StepSet, box: Sequence[int], k: int) -> SeriesBox:
    """Coefficients of P(z)^k inside the box."""
    if k < 0:
        raise ValueError("k must be non-negative")
    s = validate_step_set(s)
    box = _box_of(s, box)
    poly = step_polynomial(s, box)
    result = {(0,) * s.dim: 1}
    base = poly
    # binary powering; truncation commutes with multiplication here
    while k:
        if k & 1:
            result = truncated_product(result, base, box)
        k >>= 1
        if k:
            base = truncated_product(base, base, box)
    return SeriesBox(box, result)
