"""Field-normalized citation scores and top-10% membership scores.

Normalization always happens within (field, year) cells.  A publication in
k fields belongs to each of them with fraction 1/k.  In multiplicative mode
each publication additionally counts m times in the reference values, m
being its number of co-authoring units at a chosen level.
"""

from __future__ import annotations

import csv
from collections import defaultdict
from collections.abc import Callable, Iterable, Mapping
from dataclasses import dataclass, replace
from enum import Enum
from functools import cached_property
from fractions import Fraction
from typing import IO, Union

from .corpus import Level, ResolvedPublication, unit_count
from .reports import number

Number = Union[Fraction, float]
FieldYear = tuple[str, int]

TOP_SHARE = Fraction(1, 10)


class Mode(str, Enum):
    STANDARD = "standard"
    MULTIPLICATIVE = "multiplicative"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class FieldYearStats:
    """Reference values of one (field, year) cell.

    ``top10_threshold`` is the citation count at the top-10% boundary;
    publications cited exactly that often score ``top10_tie_fraction``.
    """

    field: str
    year: int
    pub_count: Fraction
    citation_mass: Fraction
    top10_threshold: int | None
    top10_tie_fraction: Fraction

    @cached_property
    def mean_citations(self) -> Fraction | None:
        if not self.pub_count:
            return None
        return self.citation_mass / self.pub_count

    @cached_property
    def _float_view(self) -> tuple[float | None, float]:
        mean = self.mean_citations
        return (float(mean) if mean else None), float(self.top10_tie_fraction)


@dataclass(frozen=True)
class ScoreComponent:
    field: str
    year: int
    fraction: Fraction
    ncs: Number
    top10: Number


@dataclass(frozen=True)
class NormalizedScores:
    """Scores of one publication.

    ``mass`` is the publication's share of the scope the scores refer to:
    1 for whole-corpus scores, the summed field fractions for a field slice.
    """

    publication_id: str
    ncs: Number
    top10_score: Number
    components: tuple[ScoreComponent, ...] = ()
    mass: Fraction = Fraction(1)


def _threshold(mass_by_citations: Mapping[int, Fraction], n: Fraction) -> tuple[int | None, Fraction]:
    """Top-10% boundary: highest citation count c whose inclusion reaches 10% of the mass.

    Mass strictly above c is then below the 10% share and the tie fraction
    (0.10 n - above) / at lies in (0, 1].
    """
    if not n:
        return None, Fraction(0)
    target = TOP_SHARE * n
    above = Fraction(0)
    for c in sorted(mass_by_citations, reverse=True):
        at = mass_by_citations[c]
        if above + at >= target:
            return c, (target - above) / at
        above += at
    raise AssertionError("cumulative mass never reached the top-10% share")


def build_field_year_stats(
    corpus: Iterable[ResolvedPublication],
    mode: Mode = Mode.STANDARD,
    multiplicative_level: Level | None = None,
) -> dict[FieldYear, FieldYearStats]:
    mode = Mode(mode)
    if mode is Mode.MULTIPLICATIVE and multiplicative_level is None:
        raise ValueError("multiplicative mode requires a unit level")

    counts: dict[FieldYear, Fraction] = defaultdict(Fraction)
    cites: dict[FieldYear, Fraction] = defaultdict(Fraction)
    by_value: dict[FieldYear, dict[int, Fraction]] = defaultdict(lambda: defaultdict(Fraction))

    for pub in corpus:
        fields = pub.field_assignments
        if not fields:
            raise ValueError(f"publication {pub.id} has no field assignment")
        weight = Fraction(1, len(fields))
        if mode is Mode.MULTIPLICATIVE:
            weight *= unit_count(pub, multiplicative_level)
        for f in fields:
            key = (f, pub.year)
            counts[key] += weight
            cites[key] += weight * pub.citations
            if weight:
                by_value[key][pub.citations] += weight

    stats = {}
    for key in sorted(counts):
        thr, tie = _threshold(by_value[key], counts[key])
        stats[key] = FieldYearStats(key[0], key[1], counts[key], cites[key], thr, tie)
    return stats


def _ratio(citations: int, st: FieldYearStats) -> Fraction:
    mean = st.mean_citations
    if not mean:
        # an all-uncited cell (or one without mass): every score equals the mean
        return Fraction(1)
    return citations / mean


def _top10(citations: int, st: FieldYearStats) -> Fraction:
    if st.top10_threshold is None:
        return TOP_SHARE
    if citations > st.top10_threshold:
        return Fraction(1)
    if citations == st.top10_threshold:
        return st.top10_tie_fraction
    return Fraction(0)


def _stats_for(pub, f, stats) -> FieldYearStats:
    try:
        return stats[(f, pub.year)]
    except KeyError:
        raise KeyError(f"no reference values for field {f!r}, year {pub.year}") from None


def normalized_citation_score(pub: ResolvedPublication, stats: Mapping[FieldYear, FieldYearStats]) -> Fraction:
    """Average over the publication's fields of citations / field-year mean."""
    k = len(pub.field_assignments)
    return sum(
        (_ratio(pub.citations, _stats_for(pub, f, stats)) for f in pub.field_assignments),
        Fraction(0),
    ) / k


def top10_score(pub: ResolvedPublication, stats: Mapping[FieldYear, FieldYearStats]) -> Fraction:
    """Top-10% membership in [0, 1], averaged over the publication's fields."""
    k = len(pub.field_assignments)
    return sum(
        (_top10(pub.citations, _stats_for(pub, f, stats)) for f in pub.field_assignments),
        Fraction(0),
    ) / k


def score_publication(
    pub: ResolvedPublication, stats: Mapping[FieldYear, FieldYearStats], exact: bool = True
) -> NormalizedScores:
    frac = Fraction(1, len(pub.field_assignments))
    c = pub.citations
    comps = []
    for f in pub.field_assignments:
        st = _stats_for(pub, f, stats)
        if exact:
            ncs, top = _ratio(c, st), _top10(c, st)
        else:
            # same rules as _ratio/_top10 on cached float reference values
            mean, tie = st._float_view
            ncs = c / mean if mean else 1.0
            thr = st.top10_threshold
            if thr is None:
                top = 0.1
            else:
                top = 1.0 if c > thr else (tie if c == thr else 0.0)
        comps.append(ScoreComponent(f, pub.year, frac, ncs, top))
    ncs = sum(c.ncs for c in comps) / len(comps)
    top = sum(c.top10 for c in comps) / len(comps)
    return NormalizedScores(pub.id, ncs, top, tuple(comps))


def score_corpus(
    corpus: Iterable[ResolvedPublication],
    stats: Mapping[FieldYear, FieldYearStats],
    exact: bool = True,
) -> dict[str, NormalizedScores]:
    return {pub.id: score_publication(pub, stats, exact) for pub in corpus}


def normalize(
    corpus: list[ResolvedPublication],
    mode: Mode = Mode.STANDARD,
    multiplicative_level: Level | None = None,
    exact: bool = True,
) -> tuple[dict[FieldYear, FieldYearStats], dict[str, NormalizedScores]]:
    """Build the reference values and score every publication against them."""
    stats = build_field_year_stats(corpus, mode, multiplicative_level)
    return stats, score_corpus(corpus, stats, exact)


def slice_scores(
    scores: Mapping[str, NormalizedScores], keep: Callable[[str, int], bool]
) -> dict[str, NormalizedScores]:
    """Restrict scores to the (field, year) cells accepted by ``keep``.

    Each publication keeps the fraction-weighted average of its accepted
    components and a mass equal to the sum of their fractions; publications
    with no accepted component are dropped.
    """
    out = {}
    for pid, s in scores.items():
        comps = tuple(c for c in s.components if keep(c.field, c.year))
        if not comps:
            continue
        mass = sum((c.fraction for c in comps), Fraction(0))
        if isinstance(comps[0].ncs, float):
            fm = float(mass)
            ncs = sum(float(c.fraction) * c.ncs for c in comps) / fm
            top = sum(float(c.fraction) * c.top10 for c in comps) / fm
        else:
            ncs = sum((c.fraction * c.ncs for c in comps), Fraction(0)) / mass
            top = sum((c.fraction * c.top10 for c in comps), Fraction(0)) / mass
        out[pid] = replace(s, ncs=ncs, top10_score=top, components=comps, mass=mass)
    return out


STATS_COLUMNS = ("field", "year", "pub_count", "mean_citations", "top10_threshold", "top10_tie_fraction")


def write_stats_csv(stats: Mapping[FieldYear, FieldYearStats], fh: IO[str], fmt=number) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(STATS_COLUMNS)
    for key in sorted(stats):
        st = stats[key]
        mean = st.mean_citations
        writer.writerow(
            [
                st.field,
                st.year,
                fmt(st.pub_count),
                "" if mean is None else fmt(mean),
                "" if st.top10_threshold is None else st.top10_threshold,
                fmt(st.top10_tie_fraction),
            ]
        )
