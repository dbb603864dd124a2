import itertools
import random
import threading
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, assume, given, settings, strategies as st

from manyalign.core import (
    NAT, NATPOS, DimensionMismatch, all_positive_weak, box, explicit,
    half_open, is_alignment, permute_coordinates, permute_tuple, product,
    unit_cube,
)
from manyalign.engine import (
    EnumerationCapExceeded, InfiniteStepSet, NoAlignmentExists, UnboundedParts,
    compositions_with_parts, count, count_by_parts, count_independent,
    count_multinomial, count_table, count_with_parts, enumerate_alignments,
    matrix_compositions, multinomial, multiplicity_vectors, prob_sum,
    sample_uniform,
)
from oracles import brute_alignments

STAR = explicit([(1, 1), (1, 2), (2, 1)])

# the seven alignments of lengths (4, 5) over STAR
SEVEN = {
    ((2, 1, 1), (1, 2, 2)), ((1, 2, 1), (2, 1, 2)), ((1, 1, 2), (2, 2, 1)),
    ((1, 1, 1, 1), (1, 1, 1, 2)), ((1, 1, 1, 1), (1, 1, 2, 1)),
    ((1, 1, 1, 1), (1, 2, 1, 1)), ((1, 1, 1, 1), (2, 1, 1, 1)),
}


def small_step_sets(max_dim=3, max_entry=2):
    def build(dim):
        vec = st.tuples(*[st.integers(0, max_entry)] * dim).filter(any)
        return st.lists(vec, min_size=0, max_size=8).map(lambda steps: explicit(steps, dim))
    return st.integers(1, max_dim).flatmap(build)


class TestCount:
    def test_star_4_5(self):
        assert count(STAR, (4, 5)) == 7

    def test_classical_three(self):
        assert count(unit_cube(3), (1, 2, 3)) == 239

    def test_table_corner_values(self):
        assert count(box(1, 2, 3), (10, 10, 10)) == 68933
        assert count(unit_cube(3), (10, 10, 10)) == 9850349744182729

    @pytest.mark.parametrize("s", [STAR, unit_cube(3), all_positive_weak(2), half_open(), explicit([], 2)])
    def test_origin(self, s):
        assert count(s, (0,) * s.dim) == 1

    def test_empty_step_set(self):
        assert count(explicit([], 2), (1, 0)) == 0

    def test_unreachable(self):
        assert count(STAR, (1, 0)) == 0
        # no step moves in the second coordinate
        assert count(explicit([(1, 0), (2, 0)]), (3, 1)) == 0

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            count(STAR, (1, 2, 3))

    def test_table_reuse(self):
        big = count_table(unit_cube(2), (6, 6))
        assert count_table(unit_cube(2), (3, 4)) is big

    def test_concurrent_lookups(self):
        from manyalign.engine import clear_caches
        clear_caches()
        results = []

        def work():
            results.append(count(box(1, 2, 3), (12, 12, 12)))

        threads = [threading.Thread(target=work) for _ in range(8)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert results == [1037423] * 8


class TestParts:
    def test_star_4_5(self):
        assert count_with_parts(STAR, (4, 5), 3) == 3
        assert count_with_parts(STAR, (4, 5), 4) == 4
        assert count_by_parts(STAR, (4, 5)) == [0, 0, 0, 3, 4]

    def test_origin(self):
        assert count_with_parts(STAR, (0, 0), 0) == 1

    def test_classical_pair(self):
        # brute force: (1,1) alone, or (1,0),(0,1) in either order
        assert count_with_parts(unit_cube(2), (1, 1), 1) == 1
        assert count_with_parts(unit_cube(2), (1, 1), 2) == 2

    def test_out_of_range_k(self):
        assert count_with_parts(STAR, (4, 5), 9) == 0
        assert count_with_parts(STAR, (4, 5), -1) == 0


class TestEnumerate:
    def test_star_4_5(self):
        mats = enumerate_alignments(STAR, (4, 5))
        assert set(mats) == SEVEN
        assert len(mats) == 7

    def test_origin(self):
        assert enumerate_alignments(STAR, (0, 0)) == [((), ())]

    def test_classical_three(self):
        from test_core import CLUBS
        mats = enumerate_alignments(unit_cube(3), (1, 2, 3))
        assert len(mats) == 239 == len(set(mats))
        for m in CLUBS:
            assert m in mats

    def test_lexicographic_order(self):
        mats = enumerate_alignments(unit_cube(2), (2, 2))
        keys = [tuple(zip(*m)) for m in mats]
        assert keys == sorted(keys)

    def test_cap(self):
        with pytest.raises(EnumerationCapExceeded) as info:
            enumerate_alignments(unit_cube(3), (3, 3, 3), cap=1000)
        assert info.value.count == 16081

    def test_deep(self):
        # one alignment of depth 3000 must not hit the recursion limit
        assert enumerate_alignments(explicit([(1,)]), (3000,)) == [((1,) * 3000,)]


class TestMultinomial:
    def test_star_4_5(self):
        assert count_multinomial(STAR, (4, 5)) == 7
        assert count_multinomial(STAR, (4, 5), by_parts=True) == {3: 3, 4: 4}

    def test_origin(self):
        assert count_multinomial(unit_cube(3), (0, 0, 0)) == 1

    def test_central_delannoy(self):
        assert count_multinomial(unit_cube(2), (2, 2)) == 13

    def test_multinomial_coefficient(self):
        assert multinomial([2, 1, 1]) == 12
        assert multinomial([]) == 1

    def test_multiplicity_vectors_star_4_5(self):
        vecs = [r for _, r in multiplicity_vectors(STAR, (4, 5))]
        # steps sorted as (1,1),(1,2),(2,1)
        assert sorted(vecs) == [(0, 2, 1), (3, 1, 0)]
        assert sum(multinomial(r) for r in vecs) == 7

    def test_multiplicity_vectors_fixed_k(self):
        vecs = [r for _, r in multiplicity_vectors(STAR, (4, 5), k=3)]
        assert vecs == [(0, 2, 1)]

    @settings(max_examples=60, deadline=None)
    @given(small_step_sets(), st.data())
    def test_explicit_b_set_sum(self, s, data):
        lengths = data.draw(st.tuples(*[st.integers(0, 5)] * s.dim))
        total = 0
        for steps, r in multiplicity_vectors(s, lengths):
            reached = tuple(sum(st[c] * m for st, m in zip(steps, r)) for c in range(s.dim))
            assert reached == lengths
            total += multinomial(r)
        assert total == count_multinomial(s, lengths)


class TestOracleEquivalence:
    @settings(max_examples=120, deadline=None, suppress_health_check=[HealthCheck.too_slow])
    @given(small_step_sets(), st.data())
    def test_all_routes_agree(self, s, data):
        lengths = data.draw(st.tuples(*[st.integers(0, 6)] * s.dim))
        a = count(s, lengths)
        assert a == count_multinomial(s, lengths)
        assert sum(count_by_parts(s, lengths)) == a
        assume(a <= 5000)
        brute = brute_alignments(s.steps, lengths)
        mats = enumerate_alignments(s, lengths)
        assert sorted(mats) == sorted(brute)
        for m in mats[:50]:
            assert is_alignment(m, s, lengths)

    @settings(max_examples=60, deadline=None)
    @given(small_step_sets(), st.data())
    def test_symmetry(self, s, data):
        lengths = data.draw(st.tuples(*[st.integers(0, 5)] * s.dim))
        perm = data.draw(st.permutations(range(s.dim)))
        assert count(s, lengths) == count(permute_coordinates(s, perm), permute_tuple(lengths, perm))

    @given(st.tuples(st.integers(0, 5), st.integers(1, 5)))
    def test_degenerate_coordinate(self, lengths):
        s = explicit([(1, 0), (2, 0), (3, 0)])
        assert count(s, lengths) == 0

    @given(st.tuples(st.integers(0, 4), st.integers(0, 4)).filter(any))
    def test_empty_set_counts(self, lengths):
        assert count(explicit([], 2), lengths) == 0


class TestSample:
    def test_single_alignment(self):
        for seed in range(5):
            assert sample_uniform(explicit([(1, 1)]), (3, 3), seed) == ((1, 1, 1), (1, 1, 1))

    def test_deterministic(self):
        assert sample_uniform(STAR, (4, 5), 42) == sample_uniform(STAR, (4, 5), 42)

    def test_accepts_rng(self):
        rng = random.Random(3)
        assert sample_uniform(STAR, (4, 5), rng) in SEVEN

    def test_no_alignment(self):
        with pytest.raises(NoAlignmentExists):
            sample_uniform(STAR, (1, 0), 0)

    def test_classical_pair_frequencies(self):
        counts = {}
        for seed in range(1000):
            m = sample_uniform(unit_cube(2), (1, 1), seed)
            counts[m] = counts.get(m, 0) + 1
        assert len(counts) == 3
        # each outcome has probability 1/3; 5 sigma is about 75
        assert all(abs(c - 1000 / 3) < 75 for c in counts.values())

    def test_samples_are_alignments(self):
        rng = random.Random(0)
        for _ in range(200):
            assert is_alignment(sample_uniform(all_positive_weak(3), (2, 3, 1), rng),
                                all_positive_weak(3), (2, 3, 1))


class TestCompositions:
    def test_natpos(self):
        assert compositions_with_parts(NATPOS, 4, 2) == 3

    def test_one_two(self):
        # 1+2+2, 2+1+2, 2+2+1
        assert compositions_with_parts({1, 2}, 5, 3) == 3

    @pytest.mark.parametrize("base", [NAT, NATPOS, {1, 2}, {0, 3}])
    def test_empty(self, base):
        assert compositions_with_parts(base, 0, 0) == 1

    @given(st.integers(0, 8), st.integers(0, 8))
    def test_closed_forms_match_general_dp(self, n, k):
        # the finite base {0..n} / {1..n} behaves like NAT / NATPOS for sums up to n
        assert compositions_with_parts(NAT, n, k) == compositions_with_parts(range(n + 1), n, k)
        assert compositions_with_parts(NATPOS, n, k) == compositions_with_parts(range(1, n + 1), n, k)

    @given(st.lists(st.integers(0, 4), min_size=1, max_size=3, unique=True), st.integers(0, 7), st.integers(0, 4))
    def test_against_product_enumeration(self, parts, n, k):
        expected = sum(1 for c in itertools.product(parts, repeat=k) if sum(c) == n)
        assert compositions_with_parts(parts, n, k) == expected


class TestIndependent:
    def test_whitney_shape(self):
        assert count_independent([{1, 2}, {1, 2}], (4, 5)) == count(box(1, 2, 2), (4, 5)) == 13

    def test_half_open(self):
        assert count_independent([NATPOS, NAT], (2, 2)) == count(half_open(), (2, 2)) == 4

    def test_origin(self):
        assert count_independent([{1, 2}, NAT, {3}], (0, 0, 0)) == 1

    def test_unbounded(self):
        with pytest.raises(UnboundedParts):
            count_independent([NAT, {0, 1}], (2, 2))

    @settings(deadline=None)
    @given(st.lists(st.sampled_from([NAT, NATPOS, frozenset({1, 2}), frozenset({0, 2}), frozenset({1, 3}),
                                     frozenset({2, 3, 4})]), min_size=1, max_size=3)
           .filter(lambda bs: any(0 not in b if isinstance(b, frozenset) else b == NATPOS for b in bs)),
           st.data())
    def test_matches_product_count(self, bases, data):
        lengths = data.draw(st.tuples(*[st.integers(0, 5)] * len(bases)))
        assert count_independent(bases, lengths) == count(product(*bases), lengths)


class TestMatrixCompositions:
    def test_one_row(self):
        assert [matrix_compositions(1, n) for n in range(1, 8)] == [2 ** (n - 1) for n in range(1, 8)]

    def test_empty(self):
        assert matrix_compositions(3, 0) == 1

    def test_brute_values(self):
        # frozen from tests/oracles.brute_matrix_compositions
        assert [matrix_compositions(2, n) for n in range(6)] == [1, 2, 7, 24, 82, 280]
        assert [matrix_compositions(3, n) for n in range(5)] == [1, 3, 15, 73, 354]


class TestProbability:
    def test_single_step(self):
        assert prob_sum(STAR, 1, (1, 2)) == Fraction(1, 3)

    def test_star_4_5(self):
        assert prob_sum(STAR, 3, (4, 5)) == Fraction(3, 27)

    def test_classical_pair(self):
        assert prob_sum(unit_cube(2), 2, (1, 1)) == Fraction(2, 9)

    def test_infinite(self):
        with pytest.raises(InfiniteStepSet):
            prob_sum(all_positive_weak(2), 1, (1, 1))

    @settings(max_examples=40, deadline=None)
    @given(small_step_sets(max_dim=2).filter(lambda s: 1 <= len(s.steps) <= 7), st.integers(0, 4))
    def test_normalization(self, s, k):
        top = tuple(2 * k for _ in range(s.dim))
        total = sum(prob_sum(s, k, l) for l in itertools.product(*(range(t + 1) for t in top)))
        assert total == 1

    @settings(max_examples=30, deadline=None)
    @given(small_step_sets(max_dim=2).filter(lambda s: 1 <= len(s.steps) <= 5), st.integers(0, 3), st.data())
    def test_against_outcome_enumeration(self, s, k, data):
        from oracles import brute_prob
        lengths = data.draw(st.tuples(*[st.integers(0, 4)] * s.dim))
        assert prob_sum(s, k, lengths) == brute_prob(list(s.steps), k, lengths)
