"""Incentive check for an agreement backed by deposits.

A player who leaves the agreed path forfeits the deposit and both players
play B-D for the rest of the game. The agreement is self-enforcing when no
player can gain strictly more than the deposit by such a one-stage
departure at any stage. :func:`exhaustive_oracle` solves the same question
by evaluating the full deviation game and is kept separate as a cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional

from .deposit import RefundSchedule
from .fragment import DepositPair
from .game import Agreement, PayoffMatrix, Player, StagePair, _jsonable, to_fraction

ORACLE_LIMIT = 12


@dataclass(frozen=True)
class DeviationGain:
    stage: int  # 1-based
    player: Player
    gain: Fraction

    def to_dict(self) -> dict:
        return {"stage": self.stage, "player": self.player.value, "gain": _jsonable(self.gain)}

    @classmethod
    def from_dict(cls, data: Mapping) -> "DeviationGain":
        return cls(int(data["stage"]), Player(data["player"]), to_fraction(data["gain"]))


@dataclass(frozen=True)
class VerificationReport:
    sufficient: bool
    minimal: DepositPair
    binding: tuple[DeviationGain, ...] = field(default=())
    violations: tuple[DeviationGain, ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "sufficient": self.sufficient,
            "minimal": self.minimal.to_dict(),
            "binding": [g.to_dict() for g in self.binding],
            "violations": [g.to_dict() for g in self.violations],
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "VerificationReport":
        return cls(
            bool(data["sufficient"]),
            DepositPair.from_dict(data["minimal"]),
            tuple(DeviationGain.from_dict(g) for g in data["binding"]),
            tuple(DeviationGain.from_dict(g) for g in data["violations"]),
        )


def one_shot_gains(ag: Agreement, m: PayoffMatrix) -> list[DeviationGain]:
    """Gain from leaving the agreement at each stage, before any forfeit.

    For stage ``k`` the deviator takes the other move against the opponent's
    agreed move, then receives the Nash payoff for the ``N - k`` remaining
    stages; this is compared with the agreed payoffs from ``k`` to ``N``.
    Results are ordered by stage, Tom before Jack.
    """
    n = len(ag)
    gains: list[DeviationGain] = []
    tails = {p: Fraction(0) for p in Player}
    per_stage: list[list[DeviationGain]] = []
    for k in range(n, 0, -1):
        pair = ag.stages[k - 1]
        row = []
        for p in Player:
            tails[p] += m.payoff(pair, p)
            deviate = m.payoff(pair.deviation(p), p) + (n - k) * m.nash(p)
            row.append(DeviationGain(k, p, deviate - tails[p]))
        per_stage.append(row)
    for row in reversed(per_stage):
        gains.extend(row)
    return gains


def minimal_deposits(ag: Agreement, m: PayoffMatrix) -> DepositPair:
    best = {p: Fraction(0) for p in Player}
    for g in one_shot_gains(ag, m):
        best[g.player] = max(best[g.player], g.gain)
    return DepositPair(best[Player.TOM], best[Player.JACK])


def verify(
    ag: Agreement,
    dep: DepositPair,
    m: PayoffMatrix,
    schedule: Optional[RefundSchedule] = None,
) -> VerificationReport:
    """Check every one-stage deviation against the deposit at stake.

    With a ``schedule`` the stake at stage ``k`` is the level held after
    ``k - 1`` completed stages, capped by ``dep``. A gain equal to the stake
    is reported as binding and counts as compliant.
    """
    binding, violations = [], []
    for g in one_shot_gains(ag, m):
        stake = dep[g.player]
        if schedule is not None:
            stake = min(stake, schedule.remaining_after(g.stage - 1)[g.player])
        if g.gain > stake:
            violations.append(g)
        elif g.gain == stake:
            binding.append(g)
    return VerificationReport(
        sufficient=not violations,
        minimal=minimal_deposits(ag, m),
        binding=tuple(binding),
        violations=tuple(violations),
    )


# -- independent reference solver ------------------------------------------

_TOM_MOVES = ("A", "B")
_JACK_MOVES = ("C", "D")


def _reverted_value(m: PayoffMatrix, start: int, n: int) -> tuple[Fraction, Fraction]:
    """Play forced B-D from ``start`` to ``n`` stage by stage."""
    tom = jack = Fraction(0)
    for _ in range(start, n + 1):
        t, j = m.cell(StagePair.BD)
        tom += t
        jack += j
    return tom, jack


def exhaustive_oracle(ag: Agreement, dep: DepositPair, m: PayoffMatrix) -> bool:
    """Solve the deviation game backwards and report whether the agreed path is
    sequentially rational for both players.

    At every on-path node both players pick a move simultaneously out of the
    full 2x2 stage game. Any move other than the agreed one makes that player
    forfeit the deposit and sends play to the forced B-D continuation. The
    agreed profile must be a Nash equilibrium of every such node's game,
    with continuation values taken from the solved subgames.
    """
    n = len(ag)
    if n > ORACLE_LIMIT:
        raise ValueError(f"oracle horizon limited to {ORACLE_LIMIT} stages")
    # value of the on-path subgame starting at stage k+1 (index n -> empty)
    cont = (Fraction(0), Fraction(0))
    for k in range(n, 0, -1):
        agreed = ag.stages[k - 1]
        outcomes: dict[tuple[str, str], tuple[Fraction, Fraction]] = {}
        for tm in _TOM_MOVES:
            for jm in _JACK_MOVES:
                t, j = m.cell(StagePair(tm + jm))
                tom_dev = tm != agreed.tom_move
                jack_dev = jm != agreed.jack_move
                if tom_dev or jack_dev:
                    rt, rj = _reverted_value(m, k + 1, n)
                    t, j = t + rt, j + rj
                else:
                    t, j = t + cont[0], j + cont[1]
                if tom_dev:
                    t -= dep.tom
                if jack_dev:
                    j -= dep.jack
                outcomes[(tm, jm)] = (t, j)
        on_path = outcomes[(agreed.tom_move, agreed.jack_move)]
        tom_best = max(outcomes[(tm, agreed.jack_move)][0] for tm in _TOM_MOVES)
        jack_best = max(outcomes[(agreed.tom_move, jm)][1] for jm in _JACK_MOVES)
        if on_path[0] < tom_best or on_path[1] < jack_best:
            return False
        cont = on_path
    return True
