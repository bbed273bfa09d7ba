"""
Closed-form deposits across random games
========================================

For random Prisoner's Dilemma payoffs, compare each fragment shape's
closed-form deposit with the smallest deposit that deters deviation, and
check both against the exhaustive deviation game.
"""

import random
from fractions import Fraction

from pd_deposit import Agreement, Fragment, PayoffMatrix, exhaustive_oracle, fragment_deposit, minimal_deposits

rng = random.Random(1)


def random_pd():
    def chain():
        low = Fraction(rng.randint(-5, 5))
        steps = [Fraction(rng.randint(1, 8)) for _ in range(3)]
        return [low, low + steps[0], low + steps[0] + steps[1], low + sum(steps)]

    c, g, a, e = chain()
    f, h, b, d = chain()
    return PayoffMatrix(a=a, b=b, c=c, d=d, e=e, f=f, g=g, h=h)


shapes = [(2, 0, 0), (0, 2, 1), (0, 1, 3), (2, 2, 0), (1, 0, 2)]
for _ in range(3):
    m = random_pd()
    print("matrix", {k: str(v) for k, v in m.to_dict().items()})
    for counts in shapes:
        frag = Fragment.of(*counts)
        ag = Agreement(frag.order)
        closed = fragment_deposit(frag, m)
        low = minimal_deposits(ag, m)
        print(f"  {str(frag):<16} closed-form={tuple(map(str, closed))!s:<12} minimal={tuple(map(str, low))!s:<12}"
              f" oracle ok={exhaustive_oracle(ag, closed, m) and exhaustive_oracle(ag, low, m)}")
