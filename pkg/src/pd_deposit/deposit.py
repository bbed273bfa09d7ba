"""Composite deposits for whole agreements and their stagewise refund.

An agreement is split into contiguous fragments. If every fragment is at
least as good as Nash play for both players, the per-player maximum of the
fragment deposits secures the whole agreement. A single trailing fragment
that is worse than Nash for someone adds its own deposit on top. As
fragments complete, the held deposit drops to what the unfinished
fragments still need.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping, Optional, Sequence

from .fragment import (
    DepositPair,
    DominanceMode,
    Fragment,
    FragmentCounts,
    FragmentType,
    fragment_payoff_vs_nash,
    fragment_deposit,
)
from .game import Agreement, PayoffMatrix, Player

ZERO = DepositPair(0, 0)
EXHAUSTIVE_LIMIT = 12


class DecompositionError(ValueError):
    """A composition or decomposition cannot be secured by fragment deposits."""

    def __init__(self, message: str, player: Optional[Player] = None):
        self.player = player
        super().__init__(message)


class Policy(str, enum.Enum):
    BALANCED = "balanced"
    MINIMIZE_MAX = "minimize-max"
    EXHAUSTIVE_BEST = "exhaustive"


@dataclass(frozen=True)
class Decomposition:
    fragments: tuple[Fragment, ...]
    trailing_non_dominant: Optional[Fragment] = None

    def __post_init__(self):
        object.__setattr__(self, "fragments", tuple(self.fragments))
        if not self.fragments and self.trailing_non_dominant is None:
            raise ValueError("empty decomposition")

    @property
    def all_fragments(self) -> tuple[Fragment, ...]:
        tail = (self.trailing_non_dominant,) if self.trailing_non_dominant is not None else ()
        return self.fragments + tail

    @property
    def agreement(self) -> Agreement:
        return Agreement(tuple(itertools.chain.from_iterable(f.order for f in self.all_fragments)))

    def boundaries(self) -> list[int]:
        """Number of completed stages at the end of each fragment."""
        return list(itertools.accumulate(len(f) for f in self.all_fragments))

    def check(self, m: PayoffMatrix, mode: DominanceMode = DominanceMode.WEAK) -> None:
        for i, frag in enumerate(self.fragments):
            if not fragment_payoff_vs_nash(frag, m, mode).dominant:
                raise DecompositionError(f"fragment {i + 1} ({frag}) is not dominant over Nash")

    def to_dict(self) -> dict:
        return {
            "fragments": [f.to_dict() for f in self.fragments],
            "trailing_non_dominant": (
                self.trailing_non_dominant.to_dict() if self.trailing_non_dominant else None
            ),
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "Decomposition":
        tail = data.get("trailing_non_dominant")
        return cls(
            tuple(Fragment.from_dict(f) for f in data["fragments"]),
            Fragment.from_dict(tail) if tail else None,
        )


@dataclass(frozen=True)
class RefundSchedule:
    """Held deposit after a given number of completed stages.

    ``levels`` starts at stage 0 and has one entry per fragment boundary;
    between boundaries the level is constant.
    """

    levels: tuple[tuple[int, DepositPair], ...]

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple((int(k), d) for k, d in self.levels))

    @property
    def initial(self) -> DepositPair:
        return self.levels[0][1]

    @property
    def horizon(self) -> int:
        return self.levels[-1][0]

    def remaining_after(self, completed: int) -> DepositPair:
        level = self.levels[0][1]
        for stage, dep in self.levels:
            if stage > completed:
                break
            level = dep
        return level

    def to_dict(self) -> dict:
        return {"levels": [{"stage": k, **d.to_dict()} for k, d in self.levels]}

    @classmethod
    def from_dict(cls, data: Mapping) -> "RefundSchedule":
        return cls(tuple((row["stage"], DepositPair.from_dict(row)) for row in data["levels"]))


def _max_deposit(fragments: Sequence[Fragment], m: PayoffMatrix) -> DepositPair:
    out = ZERO
    for frag in fragments:
        out = out.maximum(fragment_deposit(frag, m))
    return out


def max_fragment_deposit(d: Decomposition, m: PayoffMatrix) -> DepositPair:
    """Per-player maximum of the fragment deposits."""
    if d.trailing_non_dominant is not None:
        raise DecompositionError("decomposition has a trailing non-dominant fragment")
    return _max_deposit(d.fragments, m)


def deposit_with_trailing(d: Decomposition, m: PayoffMatrix) -> DepositPair:
    """Maximum over the dominant fragments plus the trailing fragment's deposit.

    The dominant part must be an optional leading full-cooperation fragment
    followed only by mutually beneficial fragments.
    """
    problem = _trailing_shape_problem(d)
    if problem:
        raise DecompositionError(problem)
    tail = d.trailing_non_dominant
    return _max_deposit(d.fragments, m) + (fragment_deposit(tail, m) if tail else ZERO)


def _trailing_shape_problem(d: Decomposition) -> Optional[str]:
    for i, frag in enumerate(d.fragments):
        allowed = {FragmentType.MUTUALLY_BENEFICIAL}
        if i == 0:
            allowed.add(FragmentType.FULL_COOPERATION)
        if frag.kind not in allowed:
            return (
                f"fragment {i + 1} is {frag.kind.value}; expected "
                + " or ".join(sorted(t.value for t in allowed))
            )
    return None


def composite_deposit(d: Decomposition, m: PayoffMatrix) -> DepositPair:
    """Dispatch to the single-max or max-plus-trailing rule."""
    return max_fragment_deposit(d, m) if d.trailing_non_dominant is None else deposit_with_trailing(d, m)


def refund_schedule(d: Decomposition, m: PayoffMatrix) -> RefundSchedule:
    tail = fragment_deposit(d.trailing_non_dominant, m) if d.trailing_non_dominant else ZERO
    levels = [(0, _max_deposit(d.fragments, m) + tail)]
    done = 0
    for j, frag in enumerate(d.fragments):
        done += len(frag)
        levels.append((done, _max_deposit(d.fragments[j + 1 :], m) + tail))
    if d.trailing_non_dominant is not None:
        levels.append((done + len(d.trailing_non_dominant), ZERO))
    return RefundSchedule(tuple(levels))


# -- decomposition policies -------------------------------------------------


def _shares(total: int, parts: int) -> list[int]:
    """Floor/ceil split of ``total`` into ``parts``, largest first."""
    q, r = divmod(total, parts)
    return [q + 1] * r + [q] * (parts - r)


def _one_sided_check(n_bc: int, n_ad: int, n_ac: int) -> None:
    if n_bc + n_ad + n_ac == 0:
        raise DecompositionError("empty composition")
    if n_ac == 0 and (n_ad == 0) != (n_bc == 0):
        player = Player.JACK if n_ad == 0 else Player.TOM
        raise DecompositionError(
            f"{player.value} cannot be protected: only "
            f"{'B-C' if n_ad == 0 else 'A-D'} stages and no A-C",
            player,
        )


def _finish(
    fragments: list[Fragment], m: PayoffMatrix, mode: DominanceMode
) -> Decomposition:
    flags = [fragment_payoff_vs_nash(f, m, mode) for f in fragments]
    bad = [i for i, r in enumerate(flags) if not r.dominant]
    if not bad:
        return Decomposition(tuple(fragments))
    if bad == [len(fragments) - 1] and len(fragments) > 1:
        return Decomposition(tuple(fragments[:-1]), fragments[-1])
    r = flags[bad[0]]
    player = Player.TOM if r.tom_delta < 0 else Player.JACK
    raise DecompositionError(
        f"fragment {fragments[bad[0]]} leaves {player.value} below Nash", player
    )


def _balanced(n_bc: int, n_ad: int, n_ac: int, parts: int, aligned: bool) -> list[Fragment]:
    frags: list[Fragment] = []
    if n_ad and n_bc:
        if n_ac:
            frags.append(Fragment.of(x_ac=n_ac))
        z = _shares(n_ad, parts)
        y = _shares(n_bc, parts)
        if not aligned:
            y = y[::-1]
        mb = [Fragment.of(y_bc=yy, z_ad=zz) for zz, yy in zip(z, y)]
        mb.sort(key=len, reverse=True)
        frags.extend(mb)
    else:
        frags.append(Fragment.of(x_ac=n_ac, y_bc=n_bc, z_ad=n_ad))
    return frags


def decompose(
    composition: Sequence[int],
    m: PayoffMatrix,
    policy: Policy = Policy.BALANCED,
    mode: DominanceMode = DominanceMode.WEAK,
) -> Decomposition:
    """Split a composition ``(n_bc, n_ad, n_ac)`` into deposit-bearing fragments.

    ``balanced`` puts every A-C stage in one leading fragment, then uses one
    mutually beneficial fragment per unit of the scarcer of A-D/B-C, sharing
    the plentiful kind as evenly as possible, longest fragments first.
    ``minimize-max`` tries every balanced fragment count and both share
    pairings and keeps the lexicographically smallest (Tom, Jack) deposit.
    ``exhaustive`` searches all multisets of closed-form fragments (total
    length up to 12).
    """
    n_bc, n_ad, n_ac = (int(v) for v in composition)
    if min(n_bc, n_ad, n_ac) < 0:
        raise DecompositionError("counts must be non-negative")
    _one_sided_check(n_bc, n_ad, n_ac)
    policy = Policy(policy)

    if policy is Policy.BALANCED:
        parts = min(n_ad, n_bc) or 1
        return _finish(_balanced(n_bc, n_ad, n_ac, parts, True), m, mode)

    if policy is Policy.MINIMIZE_MAX:
        best: Optional[tuple[tuple[Fraction, Fraction], Decomposition]] = None
        last_error: Optional[DecompositionError] = None
        for parts in range(1, (min(n_ad, n_bc) or 1) + 1):
            for aligned in (True, False):
                try:
                    d = _finish(_balanced(n_bc, n_ad, n_ac, parts, aligned), m, mode)
                except DecompositionError as exc:
                    last_error = exc
                    continue
                key = composite_deposit(d, m).as_tuple()
                if best is None or key < best[0]:
                    best = (key, d)
        if best is None:
            raise last_error or DecompositionError("no balanced decomposition")
        return best[1]

    return _exhaustive(n_bc, n_ad, n_ac, m, mode)


def _closed_form_shapes(n_bc: int, n_ad: int, n_ac: int) -> Iterator[FragmentCounts]:
    for x in range(n_ac + 1):
        for y in range(n_bc + 1):
            for z in range(n_ad + 1):
                if x == y == z == 0:
                    continue
                if x == 0 and (y == 0 or z == 0):
                    continue
                if x > 0 and y > 0 and z > 0:
                    continue
                yield FragmentCounts(x, y, z)


def _exhaustive(
    n_bc: int, n_ad: int, n_ac: int, m: PayoffMatrix, mode: DominanceMode
) -> Decomposition:
    if n_bc + n_ad + n_ac > EXHAUSTIVE_LIMIT:
        raise DecompositionError(f"exhaustive search is limited to {EXHAUSTIVE_LIMIT} stages")
    shapes = [
        c
        for c in _closed_form_shapes(n_bc, n_ad, n_ac)
        if fragment_payoff_vs_nash(Fragment(c), m, mode).dominant
    ]
    deposits = {c: fragment_deposit(Fragment(c), m) for c in shapes}
    best: dict[str, object] = {"key": None, "parts": None}

    # Multisets are enumerated with non-decreasing shape index.
    def search(rem: tuple[int, int, int], start: int, parts: list[FragmentCounts], cur: DepositPair):
        if best["key"] is not None and cur.as_tuple() >= best["key"]:
            # Lexicographic max can only grow; prune.
            return
        if rem == (0, 0, 0):
            best["key"], best["parts"] = cur.as_tuple(), list(parts)
            return
        for i in range(start, len(shapes)):
            c = shapes[i]
            if c.x_ac <= rem[2] and c.y_bc <= rem[0] and c.z_ad <= rem[1]:
                parts.append(c)
                search(
                    (rem[0] - c.y_bc, rem[1] - c.z_ad, rem[2] - c.x_ac),
                    i,
                    parts,
                    cur.maximum(deposits[c]),
                )
                parts.pop()

    search((n_bc, n_ad, n_ac), 0, [], ZERO)
    if best["parts"] is None:
        raise DecompositionError("no partition into dominant closed-form fragments")
    frags = [Fragment(c) for c in best["parts"]]
    frags.sort(key=lambda f: (f.counts.x_ac == 0, -len(f)))
    return Decomposition(tuple(frags))


def decomposition_report(d: Decomposition, m: PayoffMatrix) -> dict:
    """JSON-ready summary: fragments, their deposits, totals and refund levels."""
    rows = []
    for f in d.all_fragments:
        rows.append({**f.to_dict(), "kind": f.kind.value, "deposit": fragment_deposit(f, m).to_dict()})
    report = {
        "decomposition": d.to_dict(),
        "fragments": rows,
        "max_rule": max_fragment_deposit(d, m).to_dict() if d.trailing_non_dominant is None else None,
        "trailing_rule": deposit_with_trailing(d, m).to_dict() if _trailing_shape_problem(d) is None else None,
        "deposit": composite_deposit(d, m).to_dict(),
        "schedule": refund_schedule(d, m).to_dict(),
    }
    return report


def parse_composition(text: str) -> tuple[int, int, int]:
    parts = [int(p) for p in text.replace(" ", "").split(",")]
    if len(parts) != 3:
        raise ValueError("composition is 'n_bc,n_ad,n_ac'")
    return parts[0], parts[1], parts[2]


__all__ = [
    "DepositPair",
    "Decomposition",
    "DecompositionError",
    "Policy",
    "RefundSchedule",
    "composite_deposit",
    "decompose",
    "decomposition_report",
    "max_fragment_deposit",
    "deposit_with_trailing",
    "refund_schedule",
    "parse_composition",
]
