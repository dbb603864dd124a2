"""
Uniform samples and random columns
==================================

Backward sampling over the count table draws every alignment with equal
probability.  Separately, if columns are drawn uniformly from S, the
chance that k of them sum to a given vector is a(l; k) / |S|^k.
"""
import random
from collections import Counter

from manyalign import explicit, prob_sum, sample_uniform

steps = explicit([(1, 1), (1, 2), (2, 1)])
rng = random.Random(1)

freq = Counter(sample_uniform(steps, (4, 5), rng) for _ in range(7000))
for m, c in sorted(freq.items()):
    print(m[0], m[1], c)

###############################################################################
# Summed over every reachable endpoint the probabilities add to one.
for k in range(5):
    total = sum(prob_sum(steps, k, (a, b)) for a in range(2 * k + 1) for b in range(2 * k + 1))
    print(f"k={k}: P(4,5)={prob_sum(steps, k, (4, 5))}  total={total}")
