"""Counting, enumeration and asymptotics of multiple many-to-many alignments.

An S-alignment of N sequences with lengths l_1..l_N is an N x k matrix of
non-negative integers whose rows sum to the lengths and whose columns all
belong to a step set S.  See :mod:`manyalign.core` for step sets,
:mod:`manyalign.engine` for exact counting, :mod:`manyalign.genfunc` for
the generating function and :mod:`manyalign.formulas` for closed forms.
"""
from .core import (
    NAT, NATPOS, ODD, AlignmentError, DimensionMismatch, DSLError, Progression,
    StepSet, ZeroStepError, all_positive_weak, box, explicit, format_step_set,
    half_open, is_alignment, materialize, parse_step_set, permute_coordinates,
    permute_tuple, product, unit_cube, validate_step_set,
)
from .engine import (
    EnumerationCapExceeded, InfiniteStepSet, NoAlignmentExists, UnboundedParts,
    clear_caches, count_table,
    compositions_with_parts, count, count_by_parts, count_independent,
    count_multinomial, count_with_parts, enumerate_alignments, iter_alignments,
    matrix_compositions, prob_sum, sample_uniform,
)
from .genfunc import fixed_k_coefficients, series_coefficients

__version__ = "0.1.0"
