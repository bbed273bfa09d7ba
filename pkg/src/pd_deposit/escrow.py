"""Deterministic simulation of a deposit-holding third party.

Both players lodge their deposits before play. Each stage the escrow
observes the two simultaneous moves. The first stage where someone leaves
the agreed move switches the match to forced B-D play; every player who
left forfeits what is currently held for them. Compliant players get their
held deposit back at settlement, and refund tranches are released at
fragment boundaries while nobody has deviated.
"""

from __future__ import annotations

import enum
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Protocol, Sequence

from .deposit import RefundSchedule
from .fragment import DepositPair
from .game import Agreement, PayoffMatrix, Player, StagePair, _jsonable, to_fraction
from .verifier import one_shot_gains

_LEGAL = {Player.TOM: ("A", "B"), Player.JACK: ("C", "D")}


class IllegalMoveError(ValueError):
    pass


class SettlementError(RuntimeError):
    pass


class Phase(str, enum.Enum):
    COLLECTING = "collecting"
    PLAYING = "playing"
    REVERTED = "reverted"
    SETTLED = "settled"


@dataclass(frozen=True)
class StageContext:
    """What a strategy sees before choosing its move."""

    stage: int
    player: Player
    agreed_move: str
    remaining_deposit: Fraction
    history: tuple["MoveEvent", ...]


class Strategy(Protocol):
    def reset(self) -> None: ...

    def move(self, ctx: StageContext) -> str: ...


def _other(player: Player, move: str) -> str:
    a, b = _LEGAL[player]
    return b if move == a else a


class Compliant:
    def reset(self) -> None:
        pass

    def move(self, ctx: StageContext) -> str:
        return ctx.agreed_move

    def __repr__(self) -> str:
        return "Compliant()"


class DefectAt:
    """Leave the agreement at stage ``k`` (1-based)."""

    def __init__(self, k: int):
        self.k = k

    def reset(self) -> None:
        pass

    def move(self, ctx: StageContext) -> str:
        return _other(ctx.player, ctx.agreed_move) if ctx.stage == self.k else ctx.agreed_move

    def __repr__(self) -> str:
        return f"DefectAt({self.k})"


class BestResponse:
    """Deviate exactly when the one-stage gain beats the deposit still held."""

    def __init__(self, agreement: Agreement, matrix: PayoffMatrix):
        self._gains = {(g.stage, g.player): g.gain for g in one_shot_gains(agreement, matrix)}

    def reset(self) -> None:
        pass

    def move(self, ctx: StageContext) -> str:
        if self._gains[(ctx.stage, ctx.player)] > ctx.remaining_deposit:
            return _other(ctx.player, ctx.agreed_move)
        return ctx.agreed_move

    def __repr__(self) -> str:
        return "BestResponse()"


class RandomSeeded:
    """Deviate with probability ``p_defect`` per stage, from a private seeded RNG."""

    def __init__(self, seed: int, p_defect: float):
        self.seed = seed
        self.p_defect = p_defect
        self.reset()

    def reset(self) -> None:
        self._rng = random.Random(self.seed)

    def move(self, ctx: StageContext) -> str:
        if self._rng.random() < self.p_defect:
            return _other(ctx.player, ctx.agreed_move)
        return ctx.agreed_move

    def __repr__(self) -> str:
        return f"RandomSeeded({self.seed}, {self.p_defect})"


@dataclass(frozen=True)
class MoveEvent:
    stage: int
    tom_move: str
    jack_move: str
    tom_compliant: bool
    jack_compliant: bool
    running_payoffs: tuple[Fraction, Fraction]

    def to_dict(self) -> dict:
        return {
            "stage": self.stage,
            "tom_move": self.tom_move,
            "jack_move": self.jack_move,
            "compliant": {"tom": self.tom_compliant, "jack": self.jack_compliant},
            "running_payoffs": [_jsonable(v) for v in self.running_payoffs],
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "MoveEvent":
        return cls(
            int(data["stage"]),
            data["tom_move"],
            data["jack_move"],
            bool(data["compliant"]["tom"]),
            bool(data["compliant"]["jack"]),
            tuple(to_fraction(v) for v in data["running_payoffs"]),
        )


@dataclass
class Ledger:
    deposits_in: dict[Player, Fraction] = field(default_factory=lambda: _zeros())
    refunds_out: dict[Player, Fraction] = field(default_factory=lambda: _zeros())
    forfeits: dict[Player, Fraction] = field(default_factory=lambda: _zeros())

    @property
    def sink(self) -> Fraction:
        return sum(self.forfeits.values(), Fraction(0))

    def conserved(self) -> bool:
        return all(
            self.deposits_in[p] == self.refunds_out[p] + self.forfeits[p] for p in Player
        )

    def to_dict(self) -> dict:
        def side(d):
            return {p.value: _jsonable(d[p]) for p in Player}

        return {
            "deposits_in": side(self.deposits_in),
            "refunds_out": side(self.refunds_out),
            "forfeits": side(self.forfeits),
            "sink": _jsonable(self.sink),
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "Ledger":
        def side(key):
            return {p: to_fraction(data[key][p.value]) for p in Player}

        return cls(side("deposits_in"), side("refunds_out"), side("forfeits"))


def _zeros() -> dict[Player, Fraction]:
    return {p: Fraction(0) for p in Player}


@dataclass
class EscrowState:
    agreement: Agreement
    schedule: Optional[RefundSchedule] = None
    phase: Phase = Phase.COLLECTING
    stage: int = 0  # completed stages
    reverted_since: Optional[int] = None
    held: dict[Player, Fraction] = field(default_factory=_zeros)
    deviators: set[Player] = field(default_factory=set)
    ledger: Ledger = field(default_factory=Ledger)

    @property
    def forfeited_to_sink(self) -> Fraction:
        return self.ledger.sink

    def collect(self, dep: DepositPair) -> None:
        if self.phase is not Phase.COLLECTING:
            raise SettlementError("deposits already collected")
        if self.schedule is not None and not dep.covers(self.schedule.initial):
            raise ValueError(
                f"deposit {dep.as_tuple()} does not cover schedule {self.schedule.initial.as_tuple()}"
            )
        for p in Player:
            self.held[p] = dep[p]
            self.ledger.deposits_in[p] += dep[p]
        self.phase = Phase.PLAYING

    def prescribed(self, stage: int) -> StagePair:
        if self.phase is Phase.REVERTED:
            return StagePair.BD
        return self.agreement.stages[stage - 1]

    def record(self, stage: int, tom_move: str, jack_move: str) -> tuple[bool, bool]:
        """Register the stage's moves; returns per-player compliance."""
        agreed = self.prescribed(stage)
        compliant = (tom_move == agreed.tom_move, jack_move == agreed.jack_move)
        self.stage = stage
        if self.phase is Phase.PLAYING and not all(compliant):
            self.phase = Phase.REVERTED
            self.reverted_since = stage
            for p, ok in zip(Player, compliant):
                if not ok:
                    self.deviators.add(p)
                    self.ledger.forfeits[p] += self.held[p]
                    self.held[p] = Fraction(0)
        elif self.phase is Phase.PLAYING and self.schedule is not None:
            level = self.schedule.remaining_after(stage)
            for p in Player:
                if level[p] < self.held[p]:
                    self.ledger.refunds_out[p] += self.held[p] - level[p]
                    self.held[p] = level[p]
        return compliant

    def settle(self) -> Ledger:
        if self.phase is Phase.SETTLED:
            raise SettlementError("match already settled")
        if self.phase is Phase.COLLECTING:
            raise SettlementError("nothing to settle before play")
        if self.phase is Phase.PLAYING and self.stage < len(self.agreement):
            raise SettlementError(f"match still running at stage {self.stage}")
        for p in Player:
            self.ledger.refunds_out[p] += self.held[p]
            self.held[p] = Fraction(0)
        self.phase = Phase.SETTLED
        return self.ledger


def settle(state: EscrowState) -> Ledger:
    return state.settle()


@dataclass
class MatchResult:
    transcript: list[MoveEvent]
    ledger: Ledger
    state: EscrowState

    @property
    def payoffs(self) -> tuple[Fraction, Fraction]:
        """Stage payoffs summed over the match, before forfeits."""
        return self.transcript[-1].running_payoffs if self.transcript else (Fraction(0), Fraction(0))

    @property
    def net_payoffs(self) -> tuple[Fraction, Fraction]:
        tom, jack = self.payoffs
        return tom - self.ledger.forfeits[Player.TOM], jack - self.ledger.forfeits[Player.JACK]

    def to_jsonl(self) -> str:
        lines = [json.dumps(e.to_dict()) for e in self.transcript]
        lines.append(json.dumps({"ledger": self.ledger.to_dict()}))
        return "\n".join(lines) + "\n"


def run_match(
    ag: Agreement,
    dep: DepositPair,
    strategies: Sequence[Strategy],
    m: PayoffMatrix,
    refunds: Optional[RefundSchedule] = None,
) -> MatchResult:
    if len(ag) == 0:
        raise ValueError("empty agreement")
    if refunds is not None and refunds.horizon != len(ag):
        raise ValueError("refund schedule horizon differs from the agreement length")
    state = EscrowState(ag, refunds)
    state.collect(dep)
    tom_s, jack_s = strategies
    tom_s.reset()
    jack_s.reset()
    transcript: list[MoveEvent] = []
    totals = [Fraction(0), Fraction(0)]
    for k in range(1, len(ag) + 1):
        agreed = state.prescribed(k)
        if state.phase is Phase.REVERTED:
            tom_move, jack_move = agreed.tom_move, agreed.jack_move
        else:
            history = tuple(transcript)
            tom_move = tom_s.move(
                StageContext(k, Player.TOM, agreed.tom_move, state.held[Player.TOM], history)
            )
            jack_move = jack_s.move(
                StageContext(k, Player.JACK, agreed.jack_move, state.held[Player.JACK], history)
            )
            for p, mv in ((Player.TOM, tom_move), (Player.JACK, jack_move)):
                if mv not in _LEGAL[p]:
                    raise IllegalMoveError(f"{p.value} played {mv!r} at stage {k}")
        tom_ok, jack_ok = state.record(k, tom_move, jack_move)
        t, j = m.cell(StagePair.from_moves(tom_move, jack_move))
        totals[0] += t
        totals[1] += j
        transcript.append(MoveEvent(k, tom_move, jack_move, tom_ok, jack_ok, (totals[0], totals[1])))
    ledger = state.settle()
    return MatchResult(transcript, ledger, state)
