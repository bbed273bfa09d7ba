"""Fragment taxonomy, fragment dominance over Nash, and per-shape deposits."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .game import PayoffMatrix, Player, StagePair, _jsonable, agreement_payoff, to_fraction


class FragmentType(str, enum.Enum):
    FULL_COOPERATION = "FullCooperation"
    MUTUALLY_BENEFICIAL = "MutuallyBeneficial"
    COMPENSATION = "Compensation"
    STRONG_COMPENSATION = "StrongCompensation"
    MIXED = "Mixed"


class DominanceMode(str, enum.Enum):
    STRICT = "strict"
    WEAK = "weak"


class UnsupportedFragmentError(ValueError):
    """The fragment has no closed-form deposit (mixed or out-of-order shape)."""


@dataclass(frozen=True)
class FragmentCounts:
    x_ac: int = 0
    y_bc: int = 0
    z_ad: int = 0

    def __post_init__(self):
        if min(self.x_ac, self.y_bc, self.z_ad) < 0:
            raise ValueError("fragment counts must be non-negative")

    @property
    def total(self) -> int:
        return self.x_ac + self.y_bc + self.z_ad

    def __add__(self, other: "FragmentCounts") -> "FragmentCounts":
        return FragmentCounts(self.x_ac + other.x_ac, self.y_bc + other.y_bc, self.z_ad + other.z_ad)

    def __str__(self) -> str:
        return f"{self.x_ac}*AC+{self.y_bc}*BC+{self.z_ad}*AD"

    @classmethod
    def parse(cls, text: str) -> "FragmentCounts":
        """Parse ``"1*AD+2*BC"``; missing kinds count as zero, repeats add up."""
        counts = {"AC": 0, "BC": 0, "AD": 0}
        for term in filter(None, (t.strip() for t in text.split("+"))):
            match = re.fullmatch(r"(\d+)\s*\*\s*(AC|BC|AD)", term.upper())
            if not match:
                raise ValueError(f"bad fragment term {term!r}")
            counts[match.group(2)] += int(match.group(1))
        return cls(counts["AC"], counts["BC"], counts["AD"])


def classify(c: FragmentCounts) -> FragmentType:
    x, y, z = c.x_ac, c.y_bc, c.z_ad
    if c.total == 0:
        raise ValueError("empty fragment")
    if y == 0 and z == 0:
        return FragmentType.FULL_COOPERATION
    if x == 0:
        if y > 0 and z > 0:
            return FragmentType.MUTUALLY_BENEFICIAL
        return FragmentType.STRONG_COMPENSATION
    if y == 0 or z == 0:
        return FragmentType.COMPENSATION
    return FragmentType.MIXED


def canonical_order(c: FragmentCounts) -> tuple[StagePair, ...]:
    """A-C pairs first, then A-D, then B-C."""
    return (StagePair.AC,) * c.x_ac + (StagePair.AD,) * c.z_ad + (StagePair.BC,) * c.y_bc


@dataclass(frozen=True)
class Fragment:
    """A contiguous block of stage pairs; ``order`` defaults to canonical."""

    counts: FragmentCounts
    order: tuple[StagePair, ...] = ()

    def __post_init__(self):
        order = tuple(StagePair(s) for s in self.order) or canonical_order(self.counts)
        if StagePair.BD in order:
            raise ValueError("fragments cannot contain B-D stages")
        if _count(order) != self.counts:
            raise ValueError(f"order {order} does not match counts {self.counts}")
        object.__setattr__(self, "order", order)

    @classmethod
    def of(cls, x_ac: int = 0, y_bc: int = 0, z_ad: int = 0) -> "Fragment":
        return cls(FragmentCounts(x_ac, y_bc, z_ad))

    @classmethod
    def from_stages(cls, stages: Sequence[StagePair]) -> "Fragment":
        stages = tuple(StagePair(s) for s in stages)
        return cls(_count(stages), stages)

    @classmethod
    def parse(cls, text: str) -> "Fragment":
        return cls(FragmentCounts.parse(text))

    def __len__(self) -> int:
        return len(self.order)

    def __str__(self) -> str:
        return str(self.counts)

    @property
    def kind(self) -> FragmentType:
        return classify(self.counts)

    @property
    def is_canonical(self) -> bool:
        return self.order == canonical_order(self.counts)

    def to_dict(self) -> dict:
        return {"text": str(self), "order": ",".join(s.value for s in self.order)}

    @classmethod
    def from_dict(cls, data: Mapping) -> "Fragment":
        counts = FragmentCounts.parse(data["text"])
        order = tuple(StagePair(t) for t in data["order"].split(",")) if data.get("order") else ()
        return cls(counts, order)


def _count(order: Sequence[StagePair]) -> FragmentCounts:
    return FragmentCounts(
        order.count(StagePair.AC), order.count(StagePair.BC), order.count(StagePair.AD)
    )


@dataclass(frozen=True)
class DominanceResult:
    dominant: bool
    tom_delta: Fraction
    jack_delta: Fraction


def fragment_payoff_vs_nash(
    f: Fragment, m: PayoffMatrix, mode: DominanceMode = DominanceMode.WEAK
) -> DominanceResult:
    summary = agreement_payoff(f.order, m)
    tom_delta = summary.tom_total - len(f) * m.g
    jack_delta = summary.jack_total - len(f) * m.h
    if DominanceMode(mode) is DominanceMode.STRICT:
        dominant = tom_delta > 0 and jack_delta > 0
    else:
        dominant = tom_delta >= 0 and jack_delta >= 0
    return DominanceResult(dominant, tom_delta, jack_delta)


@dataclass(frozen=True)
class DepositPair:
    tom: Fraction = Fraction(0)
    jack: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "tom", to_fraction(self.tom))
        object.__setattr__(self, "jack", to_fraction(self.jack))
        if self.tom < 0 or self.jack < 0:
            raise ValueError(f"deposits must be non-negative, got ({self.tom}, {self.jack})")

    def __getitem__(self, player: Player) -> Fraction:
        return self.tom if Player(player) is Player.TOM else self.jack

    def __add__(self, other: "DepositPair") -> "DepositPair":
        return DepositPair(self.tom + other.tom, self.jack + other.jack)

    def __iter__(self):
        return iter((self.tom, self.jack))

    def as_tuple(self) -> tuple[Fraction, Fraction]:
        return self.tom, self.jack

    def maximum(self, other: "DepositPair") -> "DepositPair":
        return DepositPair(max(self.tom, other.tom), max(self.jack, other.jack))

    def covers(self, other: "DepositPair") -> bool:
        return self.tom >= other.tom and self.jack >= other.jack

    def to_dict(self) -> dict:
        return {"tom": _jsonable(self.tom), "jack": _jsonable(self.jack)}

    @classmethod
    def from_dict(cls, data: Mapping) -> "DepositPair":
        return cls(to_fraction(data["tom"]), to_fraction(data["jack"]))

    @classmethod
    def parse(cls, text: str) -> "DepositPair":
        tom, jack = (t.strip() for t in text.split(","))
        return cls(to_fraction(tom), to_fraction(jack))


def fragment_deposit(f: Fragment, m: PayoffMatrix) -> DepositPair:
    """Deposit pair for the four closed-form fragment shapes.

    Accepted shapes (counts x A-C, y B-C, z A-D, in canonical order):
    full cooperation ``x>0``; mutually beneficial ``z>0, y>0`` with all A-D
    stages before the B-C stages; ``x>0, y>0``; and ``x>0, z>0``.
    """
    x, y, z = f.counts.x_ac, f.counts.y_bc, f.counts.z_ad
    if not f.is_canonical:
        raise UnsupportedFragmentError(f"fragment {f} is not in canonical order")
    coop_tom, coop_jack = m.e - m.c, m.d - m.f
    if x > 0 and y == 0 and z == 0:
        return DepositPair(coop_tom, coop_jack)
    if x == 0 and y > 0 and z > 0:
        return DepositPair(z * (m.g - m.c), y * (m.h - m.f))
    if x > 0 and y > 0 and z == 0:
        return DepositPair(coop_tom, coop_jack + y * (m.h - m.f))
    if x > 0 and z > 0 and y == 0:
        return DepositPair(coop_tom + z * (m.g - m.c), coop_jack)
    raise UnsupportedFragmentError(f"no closed-form deposit for {f.kind.value} fragment {f}")
