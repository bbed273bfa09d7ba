"""
Running the escrow protocol
===========================

Play a few matches through the simulated third party: two compliant
players, a player who defects early, best responders facing too small a
deposit, and seeded random players with refund tranches.
"""

from pd_deposit import REFERENCE_MATRIX, Agreement, DepositPair, decompose, refund_schedule
from pd_deposit.escrow import BestResponse, Compliant, DefectAt, RandomSeeded, run_match

m = REFERENCE_MATRIX


def show(title, result):
    led = result.ledger.to_dict()
    print(f"{title}\n  payoffs={tuple(map(str, result.payoffs))} net={tuple(map(str, result.net_payoffs))}")
    print(f"  refunds={led['refunds_out']} forfeits={led['forfeits']} reverted at={result.state.reverted_since}\n")


d = decompose((16, 12, 1), m)
show("compliant pair, deposits (6, 20)",
     run_match(d.agreement, DepositPair(6, 20), (Compliant(), Compliant()), m))

coop = Agreement.parse("AC,AC,AC")
show("Tom defects at stage 1 of AC,AC,AC",
     run_match(coop, DepositPair(6, 20), (DefectAt(1), Compliant()), m))

###############################################################################
# With no deposit, best responders unravel at the last stage.

show("best responders, no deposit",
     run_match(coop, DepositPair(0, 0), (BestResponse(coop, m), BestResponse(coop, m)), m))
show("best responders, deposits (2, 16)",
     run_match(coop, DepositPair(2, 16), (BestResponse(coop, m), BestResponse(coop, m)), m))

###############################################################################
# Refund tranches: a late deviator only loses what is still held.

sched = refund_schedule(d, m)
for seed in range(3):
    res = run_match(d.agreement, DepositPair(6, 20), (RandomSeeded(seed, 0.05), RandomSeeded(seed + 100, 0.05)),
                    m, sched)
    show(f"random players, seed {seed}", res)
