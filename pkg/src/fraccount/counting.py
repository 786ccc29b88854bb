"""Counting methods: the weight with which a publication is assigned to each unit."""

from __future__ import annotations

import csv
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import IO

from .corpus import Level, ResolvedPublication, address_unit, enumerate_units
from .reports import number

ONE = Fraction(1)
ZERO = Fraction(0)


class Method(str, Enum):
    FULL = "full"
    FRAC_AUTHOR = "frac-author"
    FRAC_ADDRESS = "frac-address"
    FRAC_ORG = "frac-org"
    FRAC_COUNTRY = "frac-country"
    FIRST_AUTHOR = "first-author"
    CORRESPONDING_AUTHOR = "corresponding-author"

    def __str__(self) -> str:
        return self.value

    @property
    def sums_to_one(self) -> bool:
        return self is not Method.FULL

    def valid_at(self, level: Level) -> bool:
        level = Level(level)
        if self is Method.FRAC_ORG:
            return level in (Level.ORGANIZATION, Level.COUNTRY)
        if self is Method.FRAC_COUNTRY:
            return level is Level.COUNTRY
        return True


FRACTIONAL_METHODS = (
    Method.FRAC_AUTHOR,
    Method.FRAC_ADDRESS,
    Method.FRAC_ORG,
    Method.FRAC_COUNTRY,
)


def methods_for(level: Level) -> list[Method]:
    """All methods applicable at ``level``, in canonical order."""
    return [m for m in Method if m.valid_at(level)]


class CountingUsageError(ValueError):
    """A counting method was requested at a level where it is undefined."""


@dataclass(frozen=True)
class WeightVector:
    """Weights of one publication under one method.

    ``weights`` covers every co-authoring unit (zeros included).  A
    publication that cannot be assigned at this level has ``assignable``
    false and no weights, which is distinct from an all-zero vector.
    """

    publication_id: str
    level: Level
    method: Method
    weights: dict[str, Fraction] = field(default_factory=dict)
    assignable: bool = True

    @property
    def total(self) -> Fraction:
        return sum(self.weights.values(), ZERO)


def _spread(acc: dict[str, Fraction], units: Sequence[str], share: Fraction) -> None:
    """Split ``share`` equally among the distinct ``units``."""
    distinct = list(dict.fromkeys(units))
    if not distinct:
        return
    part = share / len(distinct)
    for u in distinct:
        acc[u] += part


def _author_units_at(pub: ResolvedPublication, pos: int, level: Level) -> list[str]:
    addrs = pub.effective_addresses_for_weights
    return [address_unit(addrs[i], level) for i in pub.effective_author_links[pos - 1]]


def _all_address_units(pub: ResolvedPublication, level: Level) -> list[str]:
    return [address_unit(a, level) for a in pub.effective_addresses_for_weights]


def _single_author(pub: ResolvedPublication, pos: int | None, level: Level, acc: dict) -> None:
    units = _author_units_at(pub, pos, level) if pos is not None else []
    if not units:
        # author without known affiliation: treat as affiliated to all addresses
        units = _all_address_units(pub, level)
    _spread(acc, units, ONE)


def _address_level_weights(pub: ResolvedPublication, level: Level, method: Method) -> dict:
    addrs = pub.effective_addresses_for_weights
    acc = {u: ZERO for u in enumerate_units(pub, level)}

    if method is Method.FULL:
        return {u: ONE for u in acc}

    if method is Method.FRAC_AUTHOR:
        linked = [
            pos
            for pos in range(1, len(pub.authors) + 1)
            if pub.effective_author_links[pos - 1]
        ]
        if not linked:
            _spread(acc, _all_address_units(pub, level), ONE)
        for pos in linked:
            _spread(acc, _author_units_at(pub, pos, level), Fraction(1, len(linked)))

    elif method is Method.FRAC_ADDRESS:
        share = Fraction(1, len(addrs))
        for a in addrs:
            acc[address_unit(a, level)] += share

    elif method is Method.FRAC_ORG:
        countries: dict[str, list[str]] = {}
        for a in addrs:
            countries.setdefault(a.org_key, []).append(a.country_key)
        share = Fraction(1, len(countries))
        for org, org_countries in countries.items():
            if level is Level.ORGANIZATION:
                acc[org] += share
            else:
                _spread(acc, org_countries, share)

    elif method is Method.FRAC_COUNTRY:
        _spread(acc, _all_address_units(pub, level), ONE)

    elif method is Method.FIRST_AUTHOR:
        _single_author(pub, 1 if pub.authors else None, level, acc)

    elif method is Method.CORRESPONDING_AUTHOR:
        if pub.corresponding_address is not None:
            acc[address_unit(pub.corresponding_address, level)] += ONE
        else:
            _single_author(pub, pub.effective_corresponding_author, level, acc)

    return acc


def _author_level_weights(pub: ResolvedPublication, method: Method) -> dict:
    units = pub.author_units
    acc = {u: ZERO for u in units}
    if method is Method.FULL:
        return {u: ONE for u in units}
    if method is Method.FRAC_AUTHOR:
        return {u: Fraction(1, len(units)) for u in units}
    if method is Method.FIRST_AUTHOR:
        acc[units[0]] = ONE
        return acc
    if method is Method.CORRESPONDING_AUTHOR:
        acc[units[pub.effective_corresponding_author - 1]] = ONE
        return acc
    if method is Method.FRAC_ADDRESS:
        # each address splits its share among the authors linked to it
        n_addr = len(pub.effective_addresses_for_weights)
        holders = [[] for _ in range(n_addr)]
        for pos, links in enumerate(pub.effective_author_links):
            for i in links:
                holders[i].append(units[pos])
        holders = [h for h in holders if h]
        if not holders:
            # no author has a known address: every author counts equally
            return {u: Fraction(1, len(units)) for u in units}
        for h in holders:
            _spread(acc, h, Fraction(1, len(holders)))
        return acc
    raise AssertionError(method)


def compute_weights(pub: ResolvedPublication, level: Level, method: Method) -> WeightVector:
    """Weights with which ``pub`` is assigned to its units at ``level``.

    Results are memoized on the (immutable) publication; treat the returned
    vector as read-only.
    """
    level, method = Level(level), Method(method)
    key = ("weights", level, method)
    cached = pub.cache.get(key)
    if cached is not None:
        return cached
    if not method.valid_at(level):
        raise CountingUsageError(f"{method} counting is not defined at the {level} level")
    wv = _compute_weights(pub, level, method)
    pub.cache[key] = wv
    return wv


def _compute_weights(pub: ResolvedPublication, level: Level, method: Method) -> WeightVector:
    if level is Level.AUTHOR:
        weights = _author_level_weights(pub, method) if pub.authors else None
    elif pub.assignable:
        weights = _address_level_weights(pub, level, method)
    else:
        weights = None
    if weights is None:
        return WeightVector(pub.id, level, method, {}, assignable=False)
    return WeightVector(pub.id, level, method, weights)


def weighted_publication_count(
    corpus: Iterable[ResolvedPublication], level: Level, method: Method
) -> dict[str, Fraction]:
    """Total weight per unit; units whose total is zero are omitted."""
    totals: dict[str, Fraction] = {}
    for pub in corpus:
        wv = compute_weights(pub, level, method)
        for unit, w in wv.weights.items():
            if w:
                totals[unit] = totals.get(unit, ZERO) + w
    return totals


WEIGHT_COLUMNS = ("publication_id", "level", "method", "unit", "weight")


def write_weights_csv(vectors: Iterable[WeightVector], fh: IO[str], fmt=number) -> None:
    """CSV rows ``publication_id, level, method, unit, weight``."""
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(WEIGHT_COLUMNS)
    for wv in vectors:
        for unit, w in wv.weights.items():
            writer.writerow([wv.publication_id, wv.level.value, wv.method.value, unit, fmt(w)])
