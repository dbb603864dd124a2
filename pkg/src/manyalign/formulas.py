"""Closed forms and asymptotic approximations for special step sets.

Every evaluator here works from binomial sums or elementary functions only;
none of them touch the recurrence tables in :mod:`manyalign.engine`, which
is what makes the two useful as checks on each other.

Binomials follow one convention throughout: ``binom(n, k) == 0`` unless
``0 <= k <= n``.  Where a sum needs the empty composition (zero parts
summing to zero) it is handled explicitly rather than through a negative
binomial argument.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

from .core import (
    ODD, AlignmentError, Progression, StepSet, all_positive_weak, box,
    explicit, half_open, product, unit_cube,
)

__all__ = [
    "UnknownFormula", "DomainError", "ApproxValue", "AsymptoticConstants",
    "binom", "fibonacci",
    "comp_closed", "comp_bounded_root", "comp_bounded_asym",
    "delannoy_exact", "delannoy_asym", "star", "starstar",
    "whitney_exact", "whitney_asym", "halfopen_exact", "halfopen_asym",
    "box13_exact", "slowinski", "dyadic_partial", "dyadic_sum",
    "griggs_asym", "andrews", "duchi_partial", "duchi_diag",
    "box12_exact", "box12_asym", "unitcube3_growth",
    "FormulaInfo", "FORMULAS", "get_formula",
]


class UnknownFormula(AlignmentError, KeyError):
    pass


class DomainError(AlignmentError, ValueError):
    pass


def binom(n: int, k: int) -> int:
    if n < 0 or k < 0 or k > n:
        return 0
    return math.comb(n, k)


def fibonacci(n: int) -> int:
    """F_n with F_0 = 0, F_1 = F_2 = 1."""
    if n < 0:
        raise ValueError("negative Fibonacci index")
    a, b = 0, 1
    for _ in range(n):
        a, b = b, a + b
    return a


_LOG_LIMIT = 700.0


@dataclass(frozen=True)
class ApproxValue:
    """A floating approximation tagged with the formula and its inputs.

    ``log_value`` is the natural log of the approximation and is always
    finite; ``value`` is ``inf`` when the number does not fit in a double.
    """
    formula: str
    inputs: dict
    value: float
    log_value: float
    details: dict = field(default_factory=dict)

    @property
    def exponent10(self) -> int:
        return math.floor(self.log_value / math.log(10))

    @property
    def mantissa10(self) -> float:
        return 10 ** (self.log_value / math.log(10) - self.exponent10)

    def __float__(self) -> float:
        return self.value

    def relative_error(self, exact: int, against: str = "exact") -> float:
        """|exact - approx| divided by the exact value, or by the
        approximation when ``against == "approx"``."""
        if math.isinf(self.value):
            raise OverflowError("relative error of an overflowing approximation")
        diff = abs(exact - self.value)
        return diff / (self.value if against == "approx" else exact)


def _approx(formula, inputs, factor, powers, details=None) -> ApproxValue:
    """factor * prod(base ** exponent), computed directly when it fits in a
    double and through logarithms otherwise."""
    log_value = math.log(factor) + sum(e * math.log(b) for b, e in powers)
    if log_value < _LOG_LIMIT and all(e * math.log(b) < _LOG_LIMIT for b, e in powers):
        value = factor * math.prod(b ** e for b, e in powers)
    else:
        value = math.inf
    return ApproxValue(formula, dict(inputs), value, log_value, dict(details or {}))


# -- compositions ------------------------------------------------------------

_COMP = {
    "comp_all": lambda n: 2 ** (n - 1),
    "comp_12": lambda n: fibonacci(n + 1),
    "comp_ge2": lambda n: fibonacci(n - 1),
    "comp_odd": lambda n: fibonacci(n),
}


def comp_closed(formula_id: str, n: int) -> int:
    """Restricted composition counts from their Fibonacci-type closed forms.

    At n = 0 every variant returns 1 (the empty composition), which is
    outside the range where the closed forms are stated.
    """
    if formula_id not in _COMP:
        raise UnknownFormula(formula_id)
    if n < 0:
        raise DomainError("n must be non-negative")
    if n == 0:
        return 1
    return _COMP[formula_id](n)


def comp_bounded_root(m: int, tol: float = 1e-12) -> float:
    """Unique X >= 1 with 1/X + ... + 1/X^m = 1, by bisection on [1, 2]."""
    if m < 1:
        raise DomainError("M must be >= 1")
    g = lambda x: sum(x ** -j for j in range(1, m + 1)) - 1.0
    lo, hi = 1.0, 2.0
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if g(mid) > 0:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def comp_bounded_asym(n: int, m: int) -> ApproxValue:
    """Asymptotic for compositions of n with parts in {1..m}."""
    if n < 1:
        raise DomainError("n must be >= 1")
    root = comp_bounded_root(m)
    sigma = 1 / root
    g_prime = sum(j * sigma ** (j - 1) for j in range(1, m + 1))
    return _approx("comp_boundedM_asym", {"l": n, "M": m}, 1 / g_prime,
                   [(root, n + 1)], {"root": root, "G'(sigma)": g_prime})


# -- two sequences -----------------------------------------------------------

def delannoy_exact(l1: int, l2: int, variant: str = "powers") -> int:
    """Delannoy number D(l1, l2) by one of two binomial sums."""
    if l1 < 0 or l2 < 0:
        return 0
    top = min(l1, l2)
    if variant == "powers":
        return sum(2**d * binom(l1, d) * binom(l2, d) for d in range(top + 1))
    if variant == "trinomial":
        f = math.factorial
        return sum(f(l1 + l2 - d) // (f(d) * f(l1 - d) * f(l2 - d)) for d in range(top + 1))
    raise ValueError(f"unknown variant {variant!r}")


def delannoy_asym(l1: int, l2: int) -> ApproxValue:
    # no sqrt correction, so the ratio to the exact value grows like sqrt(l)
    if l1 < 1 or l2 < 1:
        raise DomainError("both lengths must be >= 1")
    r = math.hypot(l1, l2)
    return _approx("delannoy_asym", {"l1": l1, "l2": l2}, 1.0,
                   [((r + l2) / l1, l1), ((r + l1) / l2, l2)])


def star(l1: int, l2: int) -> int:
    """Count for S = {(1,1),(1,2),(2,1)} as a single binomial sum."""
    return sum(binom(k, 2 * k - l1) * binom(2 * k - l1, l2 - k) for k in range(l1 + 1))


def starstar(l1: int, l2: int) -> int:
    """Same count by inclusion-exclusion over columns equal to (2,2)."""
    lo = -(-max(l1, l2) // 2)
    total = 0
    for k in range(lo, min(l1, l2) + 1):
        for j in range(k + 1):
            total += (-1) ** j * binom(k, j) * binom(k - j, l1 - k - j) * binom(k - j, l2 - k - j)
    return total


def _parts12(n: int, k: int) -> int:
    # compositions of n into k parts from {1, 2}: choose which n-k parts are 2
    return binom(k, n - k)


def whitney_exact(l1: int, l2: int) -> int:
    """Count for S = {1,2} x {1,2}.

    Written as sum_k C(k, l1-k) C(k, l2-k).  The index-swapped form
    sum_k C(l1-k, k) C(l2-k, k) gives the same numbers on the diagonal
    l1 == l2 only.
    """
    return sum(_parts12(l1, k) * _parts12(l2, k) for k in range(max(l1, l2) + 1))


def whitney_asym(n: int) -> ApproxValue:
    if n < 1:
        raise DomainError("l must be >= 1")
    golden = (1 + math.sqrt(5)) / 2
    factor = math.sqrt(3 + 7 / math.sqrt(5)) / math.sqrt(8 * math.pi * n)
    return _approx("whitney_asym", {"l": n}, factor, [(golden, 2 * n)])


def _weak(n: int, parts: int) -> int:
    """Weak compositions of n into ``parts`` parts (1 way for 0 into 0)."""
    if parts == 0:
        return int(n == 0)
    return binom(n + parts - 1, parts - 1)


def _strong(n: int, parts: int) -> int:
    if parts == 0:
        return int(n == 0)
    return binom(n - 1, parts - 1)


def halfopen_exact(l1: int, l2: int) -> int:
    """Count for S = {(x, y) | x >= 1, y >= 0}."""
    return sum(_strong(l1, k) * _weak(l2, k) for k in range(l1 + 1))


def halfopen_asym(n: int) -> ApproxValue:
    if n < 1:
        raise DomainError("l must be >= 1")
    factor = 2 ** 0.25 / (4 * math.sqrt(math.pi * n))
    return _approx("halfopen_asym", {"l": n}, factor, [(3 + 2 * math.sqrt(2), n)])


def _parts123(n: int, k: int) -> int:
    # i parts equal to 3, n-k-2i parts equal to 2, the rest 1
    return sum(binom(k, i) * binom(k - i, n - k - 2 * i) for i in range(k + 1))


def box13_exact(l1: int, l2: int) -> int:
    """Count for S = {1,2,3} x {1,2,3}."""
    return sum(_parts123(l1, k) * _parts123(l2, k) for k in range(max(l1, l2) + 1))


# -- classical steps {0,1}^N - 0 ----------------------------------------------

def slowinski(lengths: Sequence[int]) -> int:
    """Inclusion-exclusion count for the classical step set {0,1}^N - 0.

    For k columns, place each sequence's symbols into C(k, l_i) column
    subsets and subtract placements leaving some column empty.
    """
    lengths = tuple(lengths)
    total = 0
    for k in range(max(lengths, default=0), sum(lengths) + 1):
        for j in range(k + 1):
            total += (-1) ** j * binom(k, j) * math.prod(binom(k - j, l) for l in lengths)
    return total


def _binomial_series(lengths, scale: Fraction, eps: Fraction):
    """Partial sum of scale * sum_mu prod_i C(mu, l_i) / 2^(mu+1) and a
    rigorous bound on the omitted tail.

    For mu >= max(l) the term ratio q(mu) = prod (mu+1)/(mu+1-l_i) / 2 is
    non-increasing, so once q < 1 the tail after mu is at most
    t_mu * q / (1 - q).
    """
    mu = max(lengths, default=0)
    term = scale * Fraction(math.prod(binom(mu, l) for l in lengths), 2 ** (mu + 1))
    partial = Fraction(0)
    while True:
        partial += term
        q = Fraction(math.prod(Fraction(mu + 1, mu + 1 - l) for l in lengths), 2)
        if q < 1:
            tail = term * q / (1 - q)
            if tail < eps:
                return partial, tail
        term *= q
        mu += 1


_EPS = Fraction(1, 10**12)


def dyadic_partial(lengths: Sequence[int]) -> tuple[Fraction, Fraction]:
    """(partial sum, tail bound) of sum_mu prod C(mu, l_i) / 2^(mu+1)."""
    lengths = tuple(lengths)
    if not lengths or any(l < 0 for l in lengths):
        raise DomainError("need N >= 1 non-negative lengths")
    return _binomial_series(lengths, Fraction(1), _EPS)


def dyadic_sum(lengths: Sequence[int]) -> int:
    """Classical-step count as the infinite series
    sum_mu C(mu, l_1)...C(mu, l_N) / 2^(mu+1), rounded."""
    partial, _ = dyadic_partial(lengths)
    return round(partial)


def griggs_asym(n: int, dim: int) -> ApproxValue:
    """Diagonal asymptotic for the classical step set in dimension ``dim``."""
    if n < 1 or dim < 1:
        raise DomainError("need l >= 1 and N >= 1")
    c = 2 ** (1 / dim) - 1
    factor = 1 / (c * 2 ** ((dim * dim - 1) / (2 * dim)) * math.sqrt(dim * (math.pi * n) ** (dim - 1)))
    return _approx("griggs_asym", {"l": n, "N": dim}, factor, [(1 / c, dim * n)])


# -- all non-zero steps N^N - 0 ------------------------------------------------

def andrews(lengths: Sequence[int]) -> int:
    """Vector compositions: count for S = N^N - 0 by inclusion-exclusion
    over empty columns of weak compositions."""
    lengths = tuple(lengths)
    total = 0
    for k in range(sum(lengths) + 1):
        for i in range(k + 1):
            total += (-1) ** i * binom(k, i) * math.prod(_weak(l, k - i) for l in lengths)
    return total


def duchi_partial(n: int, dim: int) -> tuple[Fraction, Fraction]:
    if n < 1 or dim < 1:
        raise DomainError("need l >= 1 and N >= 1")
    # C(mu, l)^N 2^(l-mu-2) = 2^(l-1) * C(mu, l)^N / 2^(mu+1)
    return _binomial_series((n,) * dim, Fraction(2 ** (n - 1)), _EPS)


def duchi_diag(n: int, dim: int) -> int:
    """Diagonal count for S = N^N - 0 as sum_mu C(mu, l)^N 2^(l-mu-2)."""
    partial, _ = duchi_partial(n, dim)
    return round(partial)


# -- S = {1,2}^N ----------------------------------------------------------------

def box12_exact(lengths: Sequence[int]) -> int:
    """Count for S = {1,2}^N: sum_k prod_i C(k, l_i - k).

    As with :func:`whitney_exact`, the form prod_i C(l_i - k, k) agrees
    only when all lengths are equal.
    """
    lengths = tuple(lengths)
    return sum(math.prod(_parts12(l, k) for l in lengths) for k in range(max(lengths, default=0) + 1))


@dataclass(frozen=True)
class AsymptoticConstants:
    """Constants of the diagonal asymptotic for S = {1,2}^N."""
    dim: int
    phi: float
    A: float
    h: float
    b0: float

    @classmethod
    @lru_cache(maxsize=None)
    def for_dim(cls, dim: int) -> "AsymptoticConstants":
        if dim < 1:
            raise DomainError("N must be >= 1")
        phi = (math.sqrt(5) - 1) / 2
        a = -(phi ** (dim - 1)) * (1 + phi) ** (dim - 1) * (1 + 2 * phi)
        h = dim * (phi / (1 + 3 * phi + 2 * phi * phi)) ** (dim - 1)
        b0 = 1 / (-phi * a * math.sqrt((2 * math.pi) ** (dim - 1) * h))
        return cls(dim, phi, a, h, b0)


def box12_asym(n: int, dim: int) -> ApproxValue:
    if n < 1:
        raise DomainError("l must be >= 1")
    c = AsymptoticConstants.for_dim(dim)
    return _approx("box12_asym", {"l": n, "N": dim}, c.b0 * n ** ((1 - dim) / 2),
                   [(1 / c.phi, n * dim)], {"phi": c.phi, "A": c.A, "h": c.h, "b0": c.b0})


def unitcube3_growth() -> float:
    """Growth rate of the diagonal for the classical steps in dimension 3."""
    return 12 * 2 ** (2 / 3) + 15 * 2 ** (1 / 3) + 19


# -- catalog ---------------------------------------------------------------------

@dataclass(frozen=True)
class FormulaInfo:
    """Catalog entry.

    ``evaluate(lengths, param)`` returns an int for exact formulas and an
    ApproxValue otherwise.  ``dims`` lists the dimensions the formula is
    meant for (``None``: any).  Diagonal formulas only accept equal lengths.
    """
    id: str
    exact: bool
    diagonal: bool
    dims: tuple | None
    label: str
    evaluate: Callable
    step_set: Callable | None = None
    param: str | None = None


def _diag(lengths) -> int:
    lengths = tuple(lengths)
    if not lengths or len(set(lengths)) != 1:
        raise DomainError(f"diagonal formula needs equal lengths, got {lengths}")
    return lengths[0]


_S_STAR = explicit([(1, 1), (1, 2), (2, 1)])


def _entries():
    one = lambda f: (lambda l, p=None: f(*l))
    yield from [
        FormulaInfo("comp_all", True, False, (1,), "compositions, parts in {1,2,3,...}",
                    lambda l, p=None: comp_closed("comp_all", l[0]), lambda n, p=None: all_positive_weak(1)),
        FormulaInfo("comp_12", True, False, (1,), "compositions, parts in {1,2}",
                    lambda l, p=None: comp_closed("comp_12", l[0]), lambda n, p=None: box(1, 2, 1)),
        FormulaInfo("comp_ge2", True, False, (1,), "compositions, parts in {2,3,4,...}",
                    lambda l, p=None: comp_closed("comp_ge2", l[0]), lambda n, p=None: product(Progression(2))),
        FormulaInfo("comp_odd", True, False, (1,), "compositions, odd parts",
                    lambda l, p=None: comp_closed("comp_odd", l[0]), lambda n, p=None: product(ODD)),
        FormulaInfo("comp_boundedM_asym", False, False, (1,), "compositions, parts in {1..M}",
                    lambda l, p: comp_bounded_asym(l[0], p), lambda n, p: box(1, p, 1), "M"),
        FormulaInfo("delannoy_powers", True, False, (2,), "Delannoy, S = {(1,0),(0,1),(1,1)}",
                    lambda l, p=None: delannoy_exact(*l, variant="powers"), lambda n, p=None: unit_cube(2)),
        FormulaInfo("delannoy_trinomial", True, False, (2,), "Delannoy, S = {(1,0),(0,1),(1,1)}",
                    lambda l, p=None: delannoy_exact(*l, variant="trinomial"), lambda n, p=None: unit_cube(2)),
        FormulaInfo("delannoy_asym", False, False, (2,), "Delannoy, S = {(1,0),(0,1),(1,1)}",
                    one(delannoy_asym), lambda n, p=None: unit_cube(2)),
        FormulaInfo("star", True, False, (2,), "S = {(1,1),(1,2),(2,1)}",
                    one(star), lambda n, p=None: _S_STAR),
        FormulaInfo("starstar", True, False, (2,), "S = {(1,1),(1,2),(2,1)}",
                    one(starstar), lambda n, p=None: _S_STAR),
        FormulaInfo("whitney_exact", True, False, (2,), "S = {1,2} x {1,2}",
                    one(whitney_exact), lambda n, p=None: box(1, 2, 2)),
        FormulaInfo("whitney_asym", False, True, (2,), "S = {1,2} x {1,2}, diagonal",
                    lambda l, p=None: whitney_asym(_diag(l)), lambda n, p=None: box(1, 2, 2)),
        FormulaInfo("halfopen_exact", True, False, (2,), "S = {(x,y) | x >= 1, y >= 0}",
                    one(halfopen_exact), lambda n, p=None: half_open()),
        FormulaInfo("halfopen_asym", False, True, (2,), "S = {(x,y) | x >= 1, y >= 0}, diagonal",
                    lambda l, p=None: halfopen_asym(_diag(l)), lambda n, p=None: half_open()),
        FormulaInfo("box13_exact", True, False, (2,), "S = {1,2,3} x {1,2,3}",
                    one(box13_exact), lambda n, p=None: box(1, 3, 2)),
        FormulaInfo("slowinski", True, False, (1, 2, 3), "classical, S = {0,1}^N - 0",
                    lambda l, p=None: slowinski(l), lambda n, p=None: unit_cube(n)),
        FormulaInfo("dyadic_sum", True, False, (1, 2, 3), "classical, S = {0,1}^N - 0",
                    lambda l, p=None: dyadic_sum(l), lambda n, p=None: unit_cube(n)),
        FormulaInfo("griggs_asym", False, True, None, "classical, S = {0,1}^N - 0, diagonal",
                    lambda l, p=None: griggs_asym(_diag(l), len(l)), lambda n, p=None: unit_cube(n)),
        FormulaInfo("andrews", True, False, (1, 2, 3), "vector compositions, S = N^N - 0",
                    lambda l, p=None: andrews(l), lambda n, p=None: all_positive_weak(n)),
        FormulaInfo("duchi_diag", True, True, (1, 2, 3), "vector compositions, S = N^N - 0, diagonal",
                    lambda l, p=None: duchi_diag(_diag(l), len(l)), lambda n, p=None: all_positive_weak(n)),
        FormulaInfo("box12_exact", True, False, (1, 2, 3), "S = {1,2}^N",
                    lambda l, p=None: box12_exact(l), lambda n, p=None: box(1, 2, n)),
        FormulaInfo("box12_asym", False, True, None, "S = {1,2}^N, diagonal",
                    lambda l, p=None: box12_asym(_diag(l), len(l)), lambda n, p=None: box(1, 2, n)),
        FormulaInfo("unitcube3_growth", False, False, (), "classical, N = 3, diagonal growth rate",
                    lambda l=(), p=None: _approx("unitcube3_growth", {}, unitcube3_growth(), [])),
    ]


FORMULAS: dict[str, FormulaInfo] = {f.id: f for f in _entries()}


def get_formula(formula_id: str) -> FormulaInfo:
    try:
        return FORMULAS[formula_id]
    except KeyError:
        raise UnknownFormula(formula_id) from None
