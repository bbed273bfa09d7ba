"""Stage game, agreements and payoff evaluation against the Nash-reversion baseline.

Every payoff is an exact :class:`fractions.Fraction`; floats never enter the
core computation. Decimal strings are produced only by :func:`render`.
"""

from __future__ import annotations

import enum
import json
import re
from collections import Counter
from dataclasses import dataclass, fields
from fractions import Fraction
from typing import Iterable, Mapping, Union

RationalLike = Union[int, str, Fraction]

__all__ = [
    "InvalidMatrixError",
    "PayoffMatrix",
    "StagePair",
    "Agreement",
    "PayoffSummary",
    "Player",
    "to_fraction",
    "render",
    "validate_matrix",
    "stage_payoff",
    "agreement_payoff",
    "nash_baseline",
    "is_effective",
    "REFERENCE_MATRIX",
]


class InvalidMatrixError(ValueError):
    """Raised when payoffs do not form a Prisoner's Dilemma."""

    def __init__(self, violations: list[str]):
        self.violations = violations
        super().__init__("not a Prisoner's Dilemma: " + ", ".join(violations))


def to_fraction(value: RationalLike) -> Fraction:
    """Parse an int, a Fraction or a ``"num/den"`` string exactly."""
    if isinstance(value, bool):
        raise TypeError("booleans are not payoffs")
    if isinstance(value, float):
        raise TypeError("floats are not accepted; use an int or a 'num/den' string")
    return Fraction(value)


def render(value: Fraction, places: int = 3) -> str:
    """Render ``value`` with ``places`` decimals, rounding half away from zero."""
    scale = 10**places
    num = abs(value) * scale
    q, r = divmod(num.numerator, num.denominator)
    if 2 * r >= num.denominator:
        q += 1
    sign = "-" if value < 0 and q else ""
    if places == 0:
        return f"{sign}{q}"
    whole, frac = divmod(q, scale)
    return f"{sign}{whole}.{frac:0{places}d}"


class Player(str, enum.Enum):
    TOM = "tom"
    JACK = "jack"

    @property
    def other(self) -> "Player":
        return Player.JACK if self is Player.TOM else Player.TOM


class StagePair(str, enum.Enum):
    """A joint move: Tom plays A or B, Jack plays C or D."""

    AC = "AC"
    AD = "AD"
    BC = "BC"
    BD = "BD"

    @property
    def tom_move(self) -> str:
        return self.value[0]

    @property
    def jack_move(self) -> str:
        return self.value[1]

    @classmethod
    def from_moves(cls, tom_move: str, jack_move: str) -> "StagePair":
        return cls(tom_move + jack_move)

    def deviation(self, player: Player) -> "StagePair":
        """The pair reached when ``player`` alone switches move."""
        if player is Player.TOM:
            return StagePair.from_moves("B" if self.tom_move == "A" else "A", self.jack_move)
        return StagePair.from_moves(self.tom_move, "D" if self.jack_move == "C" else "C")


@dataclass(frozen=True)
class PayoffMatrix:
    """Stage payoffs; ``(a, b)`` under A-C, ``(c, d)`` under A-D,
    ``(e, f)`` under B-C and ``(g, h)`` under B-D (Tom first)."""

    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction
    e: Fraction
    f: Fraction
    g: Fraction
    h: Fraction

    def __post_init__(self):
        for fld in fields(self):
            object.__setattr__(self, fld.name, to_fraction(getattr(self, fld.name)))

    @classmethod
    def from_mapping(cls, data: Mapping[str, RationalLike]) -> "PayoffMatrix":
        keys = set("abcdefgh")
        missing = keys - set(data)
        extra = set(data) - keys
        if missing or extra:
            raise ValueError(
                f"matrix needs exactly keys a..h (missing {sorted(missing)}, extra {sorted(extra)})"
            )
        return cls(**{k: to_fraction(data[k]) for k in "abcdefgh"})

    @classmethod
    def from_json(cls, text: str) -> "PayoffMatrix":
        return cls.from_mapping(json.loads(text))

    def to_dict(self) -> dict[str, int | str]:
        return {k: _jsonable(getattr(self, k)) for k in "abcdefgh"}

    def cell(self, pair: StagePair) -> tuple[Fraction, Fraction]:
        return {
            StagePair.AC: (self.a, self.b),
            StagePair.AD: (self.c, self.d),
            StagePair.BC: (self.e, self.f),
            StagePair.BD: (self.g, self.h),
        }[pair]

    def payoff(self, pair: StagePair, player: Player) -> Fraction:
        tom, jack = self.cell(pair)
        return tom if player is Player.TOM else jack

    def nash(self, player: Player) -> Fraction:
        return self.g if player is Player.TOM else self.h

    def scaled(self, scale: Fraction, shift: Fraction) -> "PayoffMatrix":
        """Apply the same positive affine map to all eight entries."""
        if scale <= 0:
            raise ValueError("scale must be positive")
        return PayoffMatrix(**{k: getattr(self, k) * scale + shift for k in "abcdefgh"})


def _jsonable(q: Fraction) -> int | str:
    return q.numerator if q.denominator == 1 else str(q)


# Tom's chain e > a > g > c, then Jack's chain d > b > h > f.
_AXIOMS = (("e", "a"), ("a", "g"), ("g", "c"), ("d", "b"), ("b", "h"), ("h", "f"))


def validate_matrix(m: PayoffMatrix) -> list[str]:
    """Return the violated ordering inequalities; an empty list means ``m`` is valid."""
    return [f"{hi} > {lo}" for hi, lo in _AXIOMS if not getattr(m, hi) > getattr(m, lo)]


def check_matrix(m: PayoffMatrix) -> PayoffMatrix:
    violations = validate_matrix(m)
    if violations:
        raise InvalidMatrixError(violations)
    return m


_TOKEN_SPLIT = re.compile(r"[\s,]+")


@dataclass(frozen=True)
class Agreement:
    """An ordered sequence of stage pairs, one per repetition."""

    stages: tuple[StagePair, ...]

    def __post_init__(self):
        object.__setattr__(self, "stages", tuple(StagePair(s) for s in self.stages))

    @classmethod
    def parse(cls, text: str) -> "Agreement":
        tokens = [t for t in _TOKEN_SPLIT.split(text.strip().upper()) if t]
        try:
            return cls(tuple(StagePair(t) for t in tokens))
        except ValueError:
            bad = [t for t in tokens if t not in StagePair.__members__]
            raise ValueError(f"unknown stage tokens: {bad}") from None

    @classmethod
    def from_counts(cls, n_bc: int = 0, n_ad: int = 0, n_ac: int = 0) -> "Agreement":
        return cls((StagePair.AC,) * n_ac + (StagePair.AD,) * n_ad + (StagePair.BC,) * n_bc)

    def __len__(self) -> int:
        return len(self.stages)

    def __iter__(self):
        return iter(self.stages)

    def __add__(self, other: "Agreement") -> "Agreement":
        return Agreement(self.stages + other.stages)

    def __str__(self) -> str:
        return ",".join(s.value for s in self.stages)

    @property
    def composition(self) -> tuple[int, int, int]:
        """``(n_bc, n_ad, n_ac)``; BD stages are not counted."""
        cnt = Counter(self.stages)
        return cnt[StagePair.BC], cnt[StagePair.AD], cnt[StagePair.AC]

    @property
    def is_bd_free(self) -> bool:
        return StagePair.BD not in self.stages

    def moves(self, player: Player) -> str:
        """Project onto one player's move string."""
        idx = 0 if player is Player.TOM else 1
        return "".join(s.value[idx] for s in self.stages)


@dataclass(frozen=True)
class PayoffSummary:
    tom_total: Fraction
    jack_total: Fraction
    n: int

    @property
    def tom_expectation(self) -> Fraction:
        return self.tom_total / self.n

    @property
    def jack_expectation(self) -> Fraction:
        return self.jack_total / self.n

    def total(self, player: Player) -> Fraction:
        return self.tom_total if player is Player.TOM else self.jack_total

    def expectation(self, player: Player) -> Fraction:
        return self.total(player) / self.n

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "tom_total": _jsonable(self.tom_total),
            "jack_total": _jsonable(self.jack_total),
            "tom_expectation": _jsonable(self.tom_expectation),
            "jack_expectation": _jsonable(self.jack_expectation),
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "PayoffSummary":
        return cls(to_fraction(data["tom_total"]), to_fraction(data["jack_total"]), int(data["n"]))


def stage_payoff(p: StagePair, m: PayoffMatrix) -> tuple[Fraction, Fraction]:
    return m.cell(StagePair(p))


def agreement_payoff(ag: Agreement | Iterable[StagePair], m: PayoffMatrix) -> PayoffSummary:
    stages = ag.stages if isinstance(ag, Agreement) else tuple(ag)
    if not stages:
        raise ValueError("empty agreement")
    tom = sum((m.cell(s)[0] for s in stages), Fraction(0))
    jack = sum((m.cell(s)[1] for s in stages), Fraction(0))
    return PayoffSummary(tom, jack, len(stages))


def nash_baseline(n: int, m: PayoffMatrix) -> tuple[Fraction, Fraction]:
    if n < 0:
        raise ValueError("horizon must be non-negative")
    return n * m.g, n * m.h


def is_effective(ag: Agreement, m: PayoffMatrix) -> bool:
    """True when both players strictly beat ``len(ag)`` rounds of B-D."""
    summary = agreement_payoff(ag, m)
    tom_base, jack_base = nash_baseline(len(ag), m)
    return summary.tom_total > tom_base and summary.jack_total > jack_base


REFERENCE_MATRIX = PayoffMatrix(a=8, b=8, c=4, d=24, e=10, f=4, g=6, h=6)
