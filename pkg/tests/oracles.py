"""Independent reference computations used by the tests.

Nothing here imports the package: each oracle recomputes its answer from
first principles with plain Python and Fractions.
"""

from fractions import Fraction
from itertools import product
from math import gcd


def brute_hausdorff(a, b):
    """Hausdorff distance between finite lists of 1-d points by double loop."""
    ab = max(min(abs(x - y) for y in b) for x in a)
    ba = max(min(abs(x - y) for x in a) for y in b)
    return max(ab, ba)


def cantor_endpoints(depth):
    """Endpoints of the 2**depth middle-thirds intervals at the given depth."""
    pts = set()
    width = Fraction(1, 3**depth)
    for digits in product((0, 2), repeat=depth):
        left = sum(Fraction(d, 3 ** (i + 1)) for i, d in enumerate(digits))
        pts.add(left)
        pts.add(left + width)
    return sorted(pts)


def farey_prefix(k):
    out = []
    q = 2
    while len(out) < k:
        out += [Fraction(p, q) for p in range(1, q) if gcd(p, q) == 1]
        q += 1
    return out[:k]


def logistic_tops(n):
    t = [Fraction(1, 2)]
    while len(t) < n:
        t.append(t[-1] - t[-1] ** 2)
    return t
