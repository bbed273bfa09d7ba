"""
Deposits, refunds and the deviation check
=========================================

Split the composition (16 B-C, 12 A-D, 1 A-C) into fragments, compute the
deposit each player lodges, watch it shrink as fragments complete, and
compare it with the smallest deposit that still deters every deviation.
"""

from pd_deposit import (
    REFERENCE_MATRIX,
    Policy,
    composite_deposit,
    decompose,
    exhaustive_oracle,
    fragment_deposit,
    minimal_deposits,
    refund_schedule,
    verify,
)

m = REFERENCE_MATRIX
d = decompose((16, 12, 1), m)

for frag in d.fragments:
    dep = fragment_deposit(frag, m)
    print(f"{','.join(s.value for s in frag.order):<10} {frag.kind.value:<20} tom={dep.tom} jack={dep.jack}")

deposit = composite_deposit(d, m)
print("\nagreement:", d.agreement)
print("deposit lodged:", tuple(map(str, deposit)))

print("\nheld after k completed stages")
for stage, level in refund_schedule(d, m).levels:
    print(f"  k={stage:>2}: tom={level.tom} jack={level.jack}")

###############################################################################
# The closed-form deposit is sufficient but not the smallest possible one.

report = verify(d.agreement, deposit, m)
print("\nsufficient:", report.sufficient)
print("smallest sufficient deposit:", tuple(map(str, minimal_deposits(d.agreement, m))))
print("binding deviations:", [(g.stage, g.player.value) for g in report.binding])

###############################################################################
# For short agreements the search over all fragmentations can do better
# than the balanced split.

small = (5, 3, 1)
for policy in Policy:
    dd = decompose(small, m, policy)
    dep = composite_deposit(dd, m)
    print(f"{policy.value:<13} {[str(f) for f in dd.fragments]} -> {tuple(map(str, dep))}",
          "oracle:", exhaustive_oracle(dd.agreement, dep, m))
