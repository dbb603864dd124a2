"""
Closed forms against the recurrence
===================================

Each catalogued step set has a binomial-sum formula and, for some, an
asymptotic estimate along the diagonal.
"""
from manyalign import formulas
from manyalign.core import box, unit_cube
from manyalign.engine import count

###############################################################################
# Exact formulas agree with the table to the last digit.
print(formulas.box12_exact((10, 10, 10)), count(box(1, 2, 3), (10, 10, 10)))
print(formulas.slowinski((4, 5, 6)), formulas.dyadic_sum((4, 5, 6)), count(unit_cube(3), (4, 5, 6)))

###############################################################################
# The estimate for S = {1,2}^3 overshoots by a few percent and slowly closes
# in.  The error here is taken relative to the estimate.
for l in (5, 10, 15, 20):
    exact = count(box(1, 2, 3), (l, l, l))
    approx = formulas.box12_asym(l, 3)
    print(f"l={l:2d}  exact={exact:>14d}  approx={approx.value:18.2f}  "
          f"error={approx.relative_error(exact, against='approx'):.3f}")

###############################################################################
# Far out the estimate no longer fits in a double; the log is still there.
big = formulas.box12_asym(600, 3)
print("l=600:", big.value, f"= {big.mantissa10:.6f}e{big.exponent10}")

###############################################################################
# Successive diagonal ratios for classical steps creep up towards d.
d = formulas.unitcube3_growth()
prev = count(unit_cube(3), (4, 4, 4))
for l in range(5, 13):
    cur = count(unit_cube(3), (l, l, l))
    print(f"l={l:2d}  ratio={cur / prev:.4f}  d={d:.4f}")
    prev = cur
