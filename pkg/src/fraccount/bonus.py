"""The full counting bonus: how far the full-counting world average exceeds the ideal one.

Two routes are provided.  :func:`fcb_direct` evaluates the closed form

    FCB = sum(m_i c_i) / sum(m_i) - sum(c_i) / n

over publications with m_i >= 1 co-authoring units, while
:func:`fcb_via_unit_averages` computes per-unit averages under full counting
and under a reference method whose weights sum to one per publication, and
subtracts their publication-weighted world averages.  The two must agree.
"""

from __future__ import annotations

import csv
import logging
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import IO

from .corpus import Level, ResolvedPublication, unit_count
from .counting import Method
from .indicators import Indicator, unit_indicators, world_average
from .normalization import NormalizedScores, Number, slice_scores
from .reports import number

logger = logging.getLogger(__name__)


class UndefinedBonusError(ArithmeticError):
    """Every publication was excluded, so the bonus is undefined."""


@dataclass(frozen=True)
class BonusEntry:
    id: str
    m: int
    c: Number
    mass: Fraction = Fraction(1)


@dataclass(frozen=True)
class BonusInput:
    publications: tuple[BonusEntry, ...]
    excluded_count: Number = 0

    def __post_init__(self):
        for e in self.publications:
            if e.m < 1:
                raise ValueError(f"publication {e.id} has m = {e.m}; exclude it instead")


def bonus_input(
    corpus: Iterable[ResolvedPublication],
    scores: Mapping[str, NormalizedScores],
    level: Level,
    indicator: Indicator,
) -> BonusInput:
    """Collect (m_i, c_i) pairs; publications with no unit at ``level`` are excluded."""
    indicator = Indicator(indicator)
    entries = []
    excluded: Number = 0
    for pub in corpus:
        s = scores.get(pub.id)
        if s is None:
            continue
        m = unit_count(pub, level)
        if m == 0:
            excluded += s.mass
            continue
        c = s.ncs if indicator is Indicator.MNCS else s.top10_score
        entries.append(BonusEntry(pub.id, m, c, s.mass))
    return BonusInput(tuple(entries), excluded)


def _terms(inp: BonusInput) -> tuple[Number, Number]:
    pubs = inp.publications
    if not pubs:
        raise UndefinedBonusError("no publication can be assigned to any unit")
    if isinstance(pubs[0].c, float):
        mass = [float(e.mass) for e in pubs]
    else:
        mass = [e.mass for e in pubs]
    full = sum(w * e.m * e.c for w, e in zip(mass, pubs)) / sum(w * e.m for w, e in zip(mass, pubs))
    frac = sum(w * e.c for w, e in zip(mass, pubs)) / sum(mass)
    return full, frac


def fcb_direct(inp: BonusInput) -> Number:
    """Closed-form bonus over the included publications."""
    full, frac = _terms(inp)
    return full - frac


def reference_average(inp: BonusInput) -> Number:
    """The second term of the closed form: the plain average score."""
    return _terms(inp)[1]


def unit_average_bonuses(
    corpus: Sequence[ResolvedPublication],
    scores: Mapping[str, NormalizedScores],
    level: Level,
    indicators: Sequence[Indicator],
    references: Sequence[Method],
    exact: bool = True,
) -> dict[tuple[Indicator, Method], Number]:
    """Bonus via unit averages for several indicators and reference methods.

    Per-unit rows are built once per method and shared across indicators.
    """
    references = [Method(m) for m in references]
    for ref in references:
        if not ref.sums_to_one:
            raise ValueError("the reference method must assign each publication a total weight of one")
    full_rows = unit_indicators(corpus, scores, level, Method.FULL, exact)
    if not full_rows:
        raise UndefinedBonusError("no publication can be assigned to any unit")
    full_avg = {Indicator(i): world_average(full_rows, i).value for i in indicators}
    out = {}
    for ref in references:
        ref_rows = unit_indicators(corpus, scores, level, ref, exact)
        if not ref_rows:
            raise UndefinedBonusError("no publication can be assigned to any unit")
        for ind, full in full_avg.items():
            out[(ind, ref)] = full - world_average(ref_rows, ind).value
    return out


def fcb_via_unit_averages(
    corpus: Sequence[ResolvedPublication],
    scores: Mapping[str, NormalizedScores],
    level: Level,
    indicator: Indicator,
    reference: Method = Method.FRAC_AUTHOR,
    exact: bool = True,
) -> Number:
    """Bonus as the gap between full-counting and ``reference`` world averages."""
    indicator, reference = Indicator(indicator), Method(reference)
    return unit_average_bonuses(corpus, scores, level, [indicator], [reference], exact)[(indicator, reference)]


class Grouping(str, Enum):
    ALL = "all"
    FIELD = "field"
    YEAR = "year"
    BROAD_FIELD = "broad-field"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class BonusReport:
    scope: str
    level: Level
    indicator: Indicator
    fcb: Number
    fcb_percent: Number | None
    n_included: Number
    n_excluded: Number


def _groups(scores, grouping, broad_field_map):
    cells = sorted({(c.field, c.year) for s in scores.values() for c in s.components})
    if grouping is Grouping.ALL:
        return [("all", lambda f, y: True)]
    if grouping is Grouping.FIELD:
        names = sorted({f for f, _ in cells})
        return [(g, lambda f, y, g=g: f == g) for g in names]
    if grouping is Grouping.YEAR:
        years = sorted({y for _, y in cells})
        return [(str(g), lambda f, y, g=g: y == g) for g in years]
    if broad_field_map is None:
        raise ValueError("broad-field grouping needs a field -> broad field mapping")
    missing = sorted({f for f, _ in cells} - set(broad_field_map))
    if missing:
        raise ValueError(f"fields missing from the broad-field mapping: {', '.join(missing)}")
    names = sorted({broad_field_map[f] for f, _ in cells})
    return [(g, lambda f, y, g=g: broad_field_map[f] == g) for g in names]


def fcb_breakdown(
    corpus: Sequence[ResolvedPublication],
    scores: Mapping[str, NormalizedScores],
    grouping: Grouping,
    levels: Sequence[Level],
    indicators: Sequence[Indicator],
    broad_field_map: Mapping[str, str] | None = None,
) -> list[BonusReport]:
    """One report per (group, level, indicator).

    A group's publications carry the share of their field fractions that
    falls inside the group.  ``fcb_percent`` divides the bonus by the
    group's average score (the second term of the closed form).
    """
    reports = []
    for name, keep in _groups(scores, Grouping(grouping), broad_field_map):
        group_scores = slice_scores(scores, keep)
        if not group_scores:
            logger.info("group %s has no publications; skipped", name)
            continue
        for level in levels:
            for ind in indicators:
                inp = bonus_input(corpus, group_scores, Level(level), Indicator(ind))
                if not inp.publications:
                    logger.info("group %s has no assignable publication at %s level; skipped", name, level)
                    continue
                fcb = fcb_direct(inp)
                avg = reference_average(inp)
                n_inc = sum(e.mass for e in inp.publications)
                reports.append(
                    BonusReport(
                        scope=name,
                        level=Level(level),
                        indicator=Indicator(ind),
                        fcb=fcb,
                        fcb_percent=fcb / avg if avg else None,
                        n_included=n_inc,
                        n_excluded=inp.excluded_count,
                    )
                )
    return reports


BONUS_COLUMNS = ("scope", "level", "indicator", "fcb", "fcb_percent", "n_included", "n_excluded")


def write_bonus_csv(reports: Iterable[BonusReport], fh: IO[str], fmt=number) -> None:
    """``fcb_percent`` is written as a percentage (30.4, not 0.304)."""
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(BONUS_COLUMNS)
    for r in reports:
        writer.writerow(
            [
                r.scope,
                r.level.value,
                r.indicator.value,
                fmt(r.fcb),
                "" if r.fcb_percent is None else fmt(r.fcb_percent * 100),
                fmt(r.n_included),
                fmt(r.n_excluded),
            ]
        )
