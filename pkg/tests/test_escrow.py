import json
import random
from fractions import Fraction

import pytest

from pd_deposit import Agreement, DepositPair, Player, agreement_payoff, decompose, refund_schedule, verify
from pd_deposit.escrow import (
    BestResponse,
    Compliant,
    DefectAt,
    EscrowState,
    IllegalMoveError,
    Ledger,
    MoveEvent,
    Phase,
    RandomSeeded,
    SettlementError,
    run_match,
    settle,
)

from .conftest import random_matrix
from .oracles import naive_totals

TOM, JACK = Player.TOM, Player.JACK


class Bad:
    def reset(self):
        pass

    def move(self, ctx):
        return "X"


def test_compliant_16_12_1(ref_matrix):
    ag = decompose((16, 12, 1), ref_matrix).agreement
    res = run_match(ag, DepositPair(6, 20), (Compliant(), Compliant()), ref_matrix)
    assert res.payoffs == naive_totals(ag.stages, ref_matrix) == (216, 360)
    assert res.state.phase is Phase.SETTLED
    assert res.ledger.refunds_out == {TOM: 6, JACK: 20}
    assert res.ledger.sink == 0


def test_early_defection_is_deterred(ref_matrix):
    ag = Agreement.parse("AC,AC,AC")
    res = run_match(ag, DepositPair(6, 20), (DefectAt(1), Compliant()), ref_matrix)
    assert res.payoffs[0] == 10 + 6 + 6
    assert res.net_payoffs[0] == 16 < agreement_payoff(ag, ref_matrix).tom_total
    assert res.ledger.refunds_out[JACK] == 20
    assert res.ledger.forfeits[TOM] == 6
    assert [(e.tom_move, e.jack_move) for e in res.transcript] == [("B", "C"), ("B", "D"), ("B", "D")]


def test_zero_money(ref_matrix):
    res = run_match(Agreement.parse("AD,BC"), DepositPair(0, 0), (Compliant(), Compliant()), ref_matrix)
    assert res.ledger.conserved()
    assert res.ledger.sink == 0 and all(v == 0 for v in res.ledger.refunds_out.values())


def test_both_deviate_both_forfeit(ref_matrix):
    res = run_match(Agreement.parse("AC,AC"), DepositPair(6, 20), (DefectAt(2), DefectAt(2)), ref_matrix)
    assert res.ledger.forfeits == {TOM: 6, JACK: 20}
    assert res.ledger.sink == 26
    assert res.state.reverted_since == 2


def test_deviation_after_tranche_forfeits_remainder(ref_matrix):
    d = decompose((16, 12, 1), ref_matrix)
    sched = refund_schedule(d, ref_matrix)
    res = run_match(d.agreement, DepositPair(6, 20), (DefectAt(5), Compliant()), ref_matrix, sched)
    # after stage 1 Tom's held deposit drops from 6 to 2
    assert res.ledger.refunds_out[TOM] == 4
    assert res.ledger.forfeits[TOM] == 2
    assert res.ledger.refunds_out[JACK] == 20
    assert res.ledger.conserved()


def test_schedule_tranches_without_deviation(ref_matrix):
    d = decompose((16, 12, 1), ref_matrix)
    res = run_match(d.agreement, DepositPair(6, 20), (Compliant(), Compliant()), ref_matrix, refund_schedule(d, ref_matrix))
    assert res.ledger.refunds_out == {TOM: 6, JACK: 20}


def test_deposit_must_cover_schedule(ref_matrix):
    d = decompose((16, 12, 1), ref_matrix)
    with pytest.raises(ValueError):
        run_match(d.agreement, DepositPair(2, 2), (Compliant(), Compliant()), ref_matrix, refund_schedule(d, ref_matrix))


def test_illegal_move(ref_matrix):
    with pytest.raises(IllegalMoveError):
        run_match(Agreement.parse("AC"), DepositPair(0, 0), (Bad(), Compliant()), ref_matrix)


def test_double_settlement(ref_matrix):
    res = run_match(Agreement.parse("AC"), DepositPair(1, 1), (Compliant(), Compliant()), ref_matrix)
    with pytest.raises(SettlementError):
        settle(res.state)


def test_settle_before_end(ref_matrix):
    state = EscrowState(Agreement.parse("AC,AC"))
    state.collect(DepositPair(1, 1))
    state.record(1, "A", "C")
    with pytest.raises(SettlementError):
        state.settle()


def test_random_strategy_deterministic(ref_matrix):
    ag = Agreement.parse(",".join(["AD", "BC"] * 10))
    runs = [
        run_match(ag, DepositPair(2, 2), (RandomSeeded(5, 0.2), RandomSeeded(6, 0.1)), ref_matrix).to_jsonl()
        for _ in range(2)
    ]
    assert runs[0] == runs[1]


def test_conservation_random(rng):
    for i in range(200):
        m = random_matrix(rng)
        comp = (rng.randint(1, 8), rng.randint(1, 8), rng.randint(0, 2))
        try:
            d = decompose(comp, m)
        except Exception:
            continue
        sched = refund_schedule(d, m) if rng.random() < 0.5 else None
        dep = DepositPair(rng.randint(0, 30), rng.randint(0, 30))
        if sched is not None:
            dep = dep + sched.initial
        res = run_match(d.agreement, dep, (RandomSeeded(i, 0.1), RandomSeeded(i + 10**6, 0.1)), m, sched)
        assert res.ledger.conserved()
        reverted = False
        for e in res.transcript:
            if reverted:
                assert (e.tom_move, e.jack_move) == ("B", "D")
            reverted = reverted or not (e.tom_compliant and e.jack_compliant)


def test_best_response_complies_when_sufficient(rng):
    seen = 0
    for _ in range(200):
        m = random_matrix(rng)
        ag = Agreement(tuple(rng.choice("AC AD BC".split()) for _ in range(rng.randint(1, 10))))
        dep = DepositPair(rng.randint(0, 25), rng.randint(0, 25))
        res = run_match(ag, dep, (BestResponse(ag, m), BestResponse(ag, m)), m)
        if verify(ag, dep, m).sufficient:
            seen += 1
            assert res.state.reverted_since is None
        else:
            assert res.state.reverted_since is not None
    assert seen > 20


def test_transcript_jsonl(ref_matrix):
    res = run_match(Agreement.parse("AC,AD"), DepositPair(6, 20), (Compliant(), DefectAt(2)), ref_matrix)
    lines = res.to_jsonl().splitlines()
    assert len(lines) == 3
    events = [MoveEvent.from_dict(json.loads(line)) for line in lines[:2]]
    assert events == res.transcript
    assert Ledger.from_dict(json.loads(lines[2])["ledger"]) == res.ledger
