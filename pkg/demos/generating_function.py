"""
Three ways to the same number
=============================

The recurrence table, the truncated expansion of 1 / (1 - P) and the sum
of multinomial coefficients over step multiplicities are computed
independently.  They should never disagree.
"""
import itertools

from manyalign import count_multinomial, count_table, parse_step_set
from manyalign.genfunc import fixed_k_coefficients, series_coefficients

steps = parse_step_set("box(1..2,3)")
corner = (6, 6, 6)

table = count_table(steps, corner)
series = series_coefficients(steps, corner)

mismatches = 0
for idx in itertools.product(*(range(c + 1) for c in corner)):
    if not table[idx] == series[idx] == count_multinomial(steps, idx):
        mismatches += 1
print("cells checked:", 7 ** 3, "mismatches:", mismatches)

###############################################################################
# Fixing the power of P picks out alignments with exactly k columns.
for k in range(3, 7):
    print(f"k={k}: {fixed_k_coefficients(steps, corner, k)[corner]}")
print("total:", series[corner])
