"""Per-unit MNCS and PP_top10% under any counting method, plus world averages."""

from __future__ import annotations

from collections import defaultdict
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .corpus import Level, ResolvedPublication, unit_count
from .counting import Method, compute_weights
from .normalization import NormalizedScores, Number


class Indicator(str, Enum):
    MNCS = "mncs"
    PP_TOP10 = "pptop10"

    def __str__(self) -> str:
        return self.value

    @property
    def expected_average(self) -> Fraction:
        """Value of the indicator for the world as a whole."""
        return Fraction(1) if self is Indicator.MNCS else Fraction(1, 10)


class UndefinedAverageError(ArithmeticError):
    """Weighted average over an empty (zero-weight) set."""


@dataclass(frozen=True)
class UnitIndicatorRow:
    unit: str
    level: Level
    method: Method
    p: Number
    mncs: Number
    pp_top10: Number

    def value(self, indicator: Indicator) -> Number:
        return self.mncs if Indicator(indicator) is Indicator.MNCS else self.pp_top10


@dataclass(frozen=True)
class WorldAverage:
    level: Level
    method: Method
    indicator: Indicator
    value: Number


def _accumulate(corpus, scores, level, method, exact):
    p: dict[str, Number] = defaultdict(Fraction if exact else float)
    ncs: dict[str, Number] = defaultdict(Fraction if exact else float)
    top: dict[str, Number] = defaultdict(Fraction if exact else float)
    for pub in corpus:
        s = scores.get(pub.id)
        if s is None:
            continue
        wv = compute_weights(pub, level, method)
        whole = s.mass == 1
        for unit, w in wv.weights.items():
            if not w:
                continue
            if not whole:
                w = w * s.mass
            if not exact:
                w = float(w)
            p[unit] += w
            # most weights are 1 and most top-10% scores are 0
            ncs[unit] += s.ncs if w == 1 else w * s.ncs
            if s.top10_score:
                top[unit] += w * s.top10_score
    return p, ncs, top


def sort_rows(rows: Iterable[UnitIndicatorRow]) -> list[UnitIndicatorRow]:
    """Order by p descending, then unit name."""
    out = sorted(rows, key=lambda r: r.unit)
    # float comparison first (cheap, monotone), the exact value only on float ties
    out.sort(key=lambda r: (float(r.p), r.p), reverse=True)
    return out


def unit_indicators(
    corpus: Iterable[ResolvedPublication],
    scores: Mapping[str, NormalizedScores],
    level: Level,
    method: Method,
    exact: bool = True,
) -> list[UnitIndicatorRow]:
    """MNCS and PP_top10% of every unit with positive weight.

    Publications absent from ``scores`` are outside the scope and ignored.
    Rows are sorted by p descending, then unit.
    """
    level, method = Level(level), Method(method)
    p, ncs, top = _accumulate(corpus, scores, level, method, exact)
    rows = [
        UnitIndicatorRow(u, level, method, p[u], ncs[u] / p[u], top[u] / p[u])
        for u in p
        if p[u] > 0
    ]
    return sort_rows(rows)


def world_average(rows: Sequence[UnitIndicatorRow], indicator: Indicator) -> WorldAverage:
    """p-weighted average of a per-unit indicator over all rows."""
    indicator = Indicator(indicator)
    if not rows:
        raise UndefinedAverageError("no units to average over")
    total = sum(r.p for r in rows)
    if not total:
        raise UndefinedAverageError("total publication weight is zero")
    value = sum(r.p * r.value(indicator) for r in rows) / total
    return WorldAverage(rows[0].level, rows[0].method, indicator, value)


@dataclass(frozen=True)
class ExclusionAccount:
    """How unassignable publications move the world average away from its ideal."""

    n_total: Number
    n_excluded: Number
    excluded_score: Number
    total_score: Number

    @property
    def expected_world_average(self) -> Number:
        return (self.total_score - self.excluded_score) / (self.n_total - self.n_excluded)


def exclusion_account(
    corpus: Iterable[ResolvedPublication],
    scores: Mapping[str, NormalizedScores],
    level: Level,
    indicator: Indicator,
) -> ExclusionAccount:
    """Tally the score mass of publications with no unit at ``level``.

    For any method whose per-publication weights sum to one, the world
    average equals ``expected_world_average``: excluded publications leave
    both numerator and denominator.
    """
    indicator = Indicator(indicator)
    n = excl = tot = ex_score = 0
    for pub in corpus:
        s = scores.get(pub.id)
        if s is None:
            continue
        v = s.ncs if indicator is Indicator.MNCS else s.top10_score
        n += s.mass
        tot += s.mass * v
        if unit_count(pub, level) == 0:
            excl += s.mass
            ex_score += s.mass * v
    return ExclusionAccount(n, excl, ex_score, tot)


@dataclass(frozen=True)
class ComparisonRow:
    """One unit under one method, with decreases relative to the baseline.

    ``p_decrease`` is relative, (p_base - p) / p_base; the indicator
    decreases are absolute differences.  Undefined values are None.
    """

    unit: str
    method: Method
    p: Number
    mncs: Number | None
    pp_top10: Number | None
    p_decrease: Number | None
    mncs_decrease: Number | None
    pp_top10_decrease: Number | None


def comparison_table(
    corpus: Sequence[ResolvedPublication],
    scores: Mapping[str, NormalizedScores],
    level: Level,
    methods: Sequence[Method],
    baseline: Method = Method.FULL,
    top_n: int | None = None,
    exact: bool = True,
) -> list[ComparisonRow]:
    """Per unit, p and both indicators under every method next to the baseline.

    Units are ordered by baseline p (descending) then name.  With ``top_n``,
    only the ``top_n`` units with the largest full-counting p are kept.
    """
    level = Level(level)
    methods = [Method(m) for m in methods]
    baseline = Method(baseline)
    if len(methods) < 2:
        raise ValueError("a comparison needs at least two methods")
    if baseline not in methods:
        methods = [baseline] + methods

    tables = {m: {r.unit: r for r in unit_indicators(corpus, scores, level, m, exact)} for m in methods}
    base = tables[baseline]
    units = set().union(*(t.keys() for t in tables.values()))

    if top_n is not None:
        full = tables.get(Method.FULL) or {
            r.unit: r for r in unit_indicators(corpus, scores, level, Method.FULL, exact)
        }
        ranked = sorted(full.values(), key=lambda r: (-r.p, r.unit))
        units &= {r.unit for r in ranked[:top_n]}

    zero = Fraction(0) if exact else 0.0

    def order(u):
        return (-(base[u].p if u in base else zero), u)

    out = []
    for u in sorted(units, key=order):
        b = base.get(u)
        for m in methods:
            r = tables[m].get(u)
            p = r.p if r else zero
            mncs = r.mncs if r else None
            top = r.pp_top10 if r else None
            out.append(
                ComparisonRow(
                    unit=u,
                    method=m,
                    p=p,
                    mncs=mncs,
                    pp_top10=top,
                    p_decrease=(b.p - p) / b.p if b else None,
                    mncs_decrease=b.mncs - mncs if b and r else None,
                    pp_top10_decrease=b.pp_top10 - top if b and r else None,
                )
            )
    return out


@dataclass(frozen=True)
class ProfileRow:
    """Publications with exactly ``m`` co-authoring units."""

    m: int
    n_pubs: Number
    share: Number
    mean_ncs: Number
    mean_top10: Number


def profile(
    corpus: Iterable[ResolvedPublication],
    scores: Mapping[str, NormalizedScores],
    level: Level,
) -> list[ProfileRow]:
    """Distribution of publications over their unit count and mean scores per count.

    Publications without any unit at ``level`` are left out.
    """
    level = Level(level)
    mass: dict[int, Number] = defaultdict(int)
    ncs: dict[int, Number] = defaultdict(int)
    top: dict[int, Number] = defaultdict(int)
    for pub in corpus:
        s = scores.get(pub.id)
        if s is None:
            continue
        m = unit_count(pub, level)
        if m == 0:
            continue
        mass[m] += s.mass
        ncs[m] += s.mass * s.ncs
        top[m] += s.mass * s.top10_score
    total = sum(mass.values())
    return [
        ProfileRow(m, mass[m], mass[m] / total, ncs[m] / mass[m], top[m] / mass[m])
        for m in sorted(mass)
    ]
