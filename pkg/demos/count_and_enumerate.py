"""
Counting and listing alignments
===============================

Two sequences of lengths 4 and 5, where every column consumes one or two
symbols from each sequence but never two from both.
"""
from manyalign import count, count_by_parts, enumerate_alignments, explicit, unit_cube

steps = explicit([(1, 1), (1, 2), (2, 1)])

###############################################################################
# The recurrence gives the total directly.
print("alignments of (4, 5):", count(steps, (4, 5)))

###############################################################################
# Listing them shows where the total comes from: three alignments use
# three columns and four use four.
for m in enumerate_alignments(steps, (4, 5)):
    print(" ", m[0], "/", m[1])
print("by number of columns:", count_by_parts(steps, (4, 5)))

###############################################################################
# With classical steps (each column takes at most one symbol per sequence)
# the numbers grow much faster.  Three short sequences already give 239.
print("classical, (1, 2, 3):", count(unit_cube(3), (1, 2, 3)))
print("classical, (10, 10, 10):", count(unit_cube(3), (10, 10, 10)))
