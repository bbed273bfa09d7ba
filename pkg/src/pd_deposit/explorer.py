"""Census over agreement compositions for a fixed horizon.

Payoff totals depend only on how many stages of each kind an agreement
has, so agreements are enumerated as compositions ``(n_bc, n_ad, n_ac)``.
Each composition is realized in the canonical order produced by the
balanced decomposition when deposits are needed.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Optional, Sequence

from .deposit import Decomposition, DecompositionError, Policy, composite_deposit, decompose
from .fragment import DepositPair
from .game import (
    Agreement,
    PayoffMatrix,
    PayoffSummary,
    agreement_payoff,
    is_effective,
    render,
    to_fraction,
)

DEFAULT_MAX_AC = 2


@dataclass(frozen=True, order=True)
class Composition:
    n_bc: int
    n_ad: int
    n_ac: int

    def __post_init__(self):
        if min(self.n_bc, self.n_ad, self.n_ac) < 0:
            raise ValueError("composition counts must be non-negative")

    @property
    def n(self) -> int:
        return self.n_bc + self.n_ad + self.n_ac

    def as_tuple(self) -> tuple[int, int, int]:
        return self.n_bc, self.n_ad, self.n_ac

    def __str__(self) -> str:
        return f"{self.n_bc},{self.n_ad},{self.n_ac}"


@dataclass(frozen=True)
class Threshold:
    """Both players' per-stage expectation compared against ``value``."""

    value: Fraction
    strict: bool = False

    @property
    def label(self) -> str:
        return f"{'>' if self.strict else '>='}{self.value}"

    def passes(self, s: PayoffSummary) -> bool:
        if self.strict:
            return s.tom_expectation > self.value and s.jack_expectation > self.value
        return s.tom_expectation >= self.value and s.jack_expectation >= self.value

    @classmethod
    def parse(cls, text: str) -> "Threshold":
        text = text.strip()
        if text.startswith(">="):
            return cls(to_fraction(text[2:]), False)
        if text.startswith(">"):
            return cls(to_fraction(text[1:]), True)
        return cls(to_fraction(text), False)


DEFAULT_THRESHOLDS = (
    Threshold(Fraction(15, 2)),
    Threshold(Fraction(8)),
    Threshold(Fraction(17, 2), strict=True),
)


@dataclass(frozen=True)
class CensusRow:
    composition: Composition
    summary: PayoffSummary
    deposit: Optional[DepositPair]
    decomposition: Optional[Decomposition]

    def to_dict(self) -> dict:
        return {
            "composition": list(self.composition.as_tuple()),
            "summary": self.summary.to_dict(),
            "deposit": self.deposit.to_dict() if self.deposit else None,
            "decomposition": self.decomposition.to_dict() if self.decomposition else None,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "CensusRow":
        return cls(
            Composition(*data["composition"]),
            PayoffSummary.from_dict(data["summary"]),
            DepositPair.from_dict(data["deposit"]) if data["deposit"] else None,
            Decomposition.from_dict(data["decomposition"]) if data["decomposition"] else None,
        )


@dataclass(frozen=True)
class CensusReport:
    n: int
    max_ac: Optional[int]
    total_enumerated: int
    effective: int
    threshold_counts: dict[str, int]
    frontier: tuple[Composition, ...]
    rows: tuple[CensusRow, ...] = field(repr=False)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "max_ac": self.max_ac,
            "total_enumerated": self.total_enumerated,
            "effective": self.effective,
            "threshold_counts": dict(self.threshold_counts),
            "frontier": [list(c.as_tuple()) for c in self.frontier],
            "rows": [r.to_dict() for r in self.rows],
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "CensusReport":
        return cls(
            n=int(data["n"]),
            max_ac=data["max_ac"],
            total_enumerated=int(data["total_enumerated"]),
            effective=int(data["effective"]),
            threshold_counts=dict(data["threshold_counts"]),
            frontier=tuple(Composition(*c) for c in data["frontier"]),
            rows=tuple(CensusRow.from_dict(r) for r in data["rows"]),
        )


def compositions(n: int, max_ac: Optional[int] = DEFAULT_MAX_AC) -> Iterator[Composition]:
    """All ``(n_bc, n_ad, n_ac)`` summing to ``n`` with ``n_ac <= max_ac``."""
    top = n if max_ac is None else min(max_ac, n)
    for n_ac in range(top + 1):
        for n_bc in range(n - n_ac + 1):
            yield Composition(n_bc, n - n_ac - n_bc, n_ac)


def realize(c: Composition | Sequence[int], m: PayoffMatrix) -> Agreement:
    """Order a composition as its balanced decomposition lays it out.

    Compositions that have no balanced decomposition fall back to
    A-C, then A-D, then B-C blocks.
    """
    if not isinstance(c, Composition):
        c = Composition(*c)
    try:
        return decompose(c.as_tuple(), m, Policy.BALANCED).agreement
    except DecompositionError:
        return Agreement.from_counts(c.n_bc, c.n_ad, c.n_ac)


def _deposit_for(c: Composition, m: PayoffMatrix, policy: Policy):
    try:
        d = decompose(c.as_tuple(), m, policy)
    except DecompositionError:
        return None, None
    return composite_deposit(d, m), d


def pareto_frontier(points: Sequence[tuple[Composition, PayoffSummary]]) -> list[Composition]:
    """Compositions whose totals no other point weakly beats with one strict gain."""
    out = []
    for c, s in points:
        dominated = any(
            o.tom_total >= s.tom_total
            and o.jack_total >= s.jack_total
            and (o.tom_total > s.tom_total or o.jack_total > s.jack_total)
            for _, o in points
        )
        if not dominated:
            out.append(c)
    return out


def enumerate_census(
    n: int,
    m: PayoffMatrix,
    max_ac: Optional[int] = DEFAULT_MAX_AC,
    thresholds: Iterable[Threshold] = DEFAULT_THRESHOLDS,
    policy: Policy = Policy.BALANCED,
) -> CensusReport:
    if n < 1:
        raise ValueError("horizon must be at least 1")
    thresholds = tuple(thresholds)
    total = 0
    effective: list[tuple[Composition, PayoffSummary]] = []
    for c in compositions(n, max_ac):
        total += 1
        ag = Agreement.from_counts(c.n_bc, c.n_ad, c.n_ac)
        if is_effective(ag, m):
            effective.append((c, agreement_payoff(ag, m)))
    counts = {t.label: sum(t.passes(s) for _, s in effective) for t in thresholds}
    rows = []
    for c, s in effective:
        dep, d = _deposit_for(c, m, policy)
        rows.append(CensusRow(c, s, dep, d))
    return CensusReport(
        n=n,
        max_ac=max_ac,
        total_enumerated=total,
        effective=len(effective),
        threshold_counts=counts,
        frontier=tuple(pareto_frontier(effective)),
        rows=tuple(rows),
    )


@dataclass(frozen=True)
class SummaryRow:
    composition: Composition
    tom_e: str
    tom_total: Fraction
    tom_sd: Optional[Fraction]
    jack_e: str
    jack_total: Fraction
    jack_sd: Optional[Fraction]

    def as_csv(self) -> list[str]:
        def sd(v):
            return "" if v is None else str(v)

        return [
            *map(str, self.composition.as_tuple()),
            self.tom_e,
            str(self.tom_total),
            sd(self.tom_sd),
            self.jack_e,
            str(self.jack_total),
            sd(self.jack_sd),
        ]


CSV_COLUMNS = ["n_bc", "n_ad", "n_ac", "tom_E", "tom_total", "tom_sd", "jack_E", "jack_total", "jack_sd"]


def summary_rows(
    comps: Iterable[Composition | Sequence[int]],
    m: PayoffMatrix,
    policy: Policy = Policy.BALANCED,
) -> list[SummaryRow]:
    rows = []
    for c in comps:
        if not isinstance(c, Composition):
            c = Composition(*c)
        s = agreement_payoff(Agreement.from_counts(c.n_bc, c.n_ad, c.n_ac), m)
        dep, _ = _deposit_for(c, m, policy)
        rows.append(
            SummaryRow(
                c,
                render(s.tom_expectation),
                s.tom_total,
                dep.tom if dep else None,
                render(s.jack_expectation),
                s.jack_total,
                dep.jack if dep else None,
            )
        )
    return rows


def rows_to_csv(rows: Sequence[SummaryRow], summary: Optional[Mapping[str, object]] = None) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in rows:
        writer.writerow(r.as_csv())
    for key, value in (summary or {}).items():
        buf.write(f"# {key}: {value}\n")
    return buf.getvalue()


# Figures printed alongside the original worked example (horizon 29, the
# reference matrix). Row keys are the printed (n_bc, n_ad, n_ac).
REFERENCE_COUNTS = {"total": 84, "effective": 49, ">=15/2": 30, ">=8": 12, ">17/2": 1}
REFERENCE_TABLE = (
    # (counts, tom E, tom total, tom SD, jack E, jack total, jack SD)
    ((10, 19, 0), "6.069", 176, 4, "17.103", 496, 4),
    ((11, 17, 2), "6.414", 178, 6, "15.862", 452, 20),
    ((12, 15, 2), "6.759", 180, 6, "14.621", 408, 20),
    ((15, 14, 0), "7.103", 206, 2, "13.655", 396, 4),
    ((16, 12, 1), "7.448", 208, 6, "12.414", 352, 20),
    ((17, 10, 2), "7.793", 210, 6, "11.172", 308, 20),
    ((20, 9, 0), "8.138", 236, 2, "10.207", 296, 6),
    ((22, 7, 0), "8.552", 248, 2, "8.828", 256, 8),
    ((23, 4, 2), "9.034", 246, 6, "7.034", 188, 20),
    ((26, 3, 0), "9.379", 272, 2, "6.069", 176, 18),
)


def discrepancies(m: PayoffMatrix, n: int = 29, max_ac: Optional[int] = DEFAULT_MAX_AC) -> list[dict]:
    """Side-by-side list of reference figures that the computation does not reproduce."""
    census = enumerate_census(n, m, max_ac)
    out: list[dict] = []

    def add(item, reference, computed, note):
        if reference != computed:
            out.append({"item": item, "reference": reference, "computed": computed, "note": note})

    add("total agreements", REFERENCE_COUNTS["total"], census.total_enumerated,
        f"all compositions with n_ac <= {max_ac}")
    add("effective agreements", REFERENCE_COUNTS["effective"], census.effective,
        "strict improvement over Nash for both players")
    for label in (">=15/2", ">=8", ">17/2"):
        add(f"both expectations {label}", REFERENCE_COUNTS[label],
            census.threshold_counts.get(label), "among effective agreements")

    for counts, tom_e, tom_total, tom_sd, jack_e, jack_total, jack_sd in REFERENCE_TABLE:
        if sum(counts) != n:
            fixed = _match_expectations(tom_e, jack_e, m, n, max_ac)
            out.append({
                "item": f"row {Composition(*counts)} counts",
                "reference": list(counts),
                "computed": [list(c.as_tuple()) for c in fixed],
                "note": f"counts sum to {sum(counts)}, not {n}; listed compositions reproduce the expectations",
            })
            comp = fixed[0] if len(fixed) == 1 else None
        else:
            comp = Composition(*counts)
        if comp is None:
            continue
        (row,) = summary_rows([comp], m)
        ac_tom, ac_jack = comp.n_ac * m.a, comp.n_ac * m.b
        for who, printed, actual, ac in (("tom", tom_total, row.tom_total, ac_tom),
                                         ("jack", jack_total, row.jack_total, ac_jack)):
            if printed != actual:
                note = "printed total omits the A-C stages" if printed == actual - ac else "unexplained"
                add(f"row {comp} {who} total", printed, _num(actual), note)
        for who, printed, actual in (("tom", tom_sd, row.tom_sd), ("jack", jack_sd, row.jack_sd)):
            add(f"row {comp} {who} deposit", printed, _num(actual) if actual is not None else None,
                "balanced decomposition deposit")
    return out


def _num(q: Fraction):
    return q.numerator if q.denominator == 1 else str(q)


def _match_expectations(tom_e: str, jack_e: str, m: PayoffMatrix, n: int, max_ac) -> list[Composition]:
    hits = []
    for c in compositions(n, max_ac):
        s = agreement_payoff(Agreement.from_counts(c.n_bc, c.n_ad, c.n_ac), m)
        if render(s.tom_expectation) == tom_e and render(s.jack_expectation) == jack_e:
            hits.append(c)
    return hits
