"""Synthetic publication corpora with tunable co-authorship and citation coupling.

Citations follow a gamma-Poisson (negative binomial) model whose mean is
``base_mean * field_factor * m ** beta``, m being the publication's number of
co-authoring units at ``coupling_level``.  ``beta = 0`` makes citations
independent of co-authorship; ``beta > 0`` rewards collaboration.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any

import numpy as np

from .corpus import AddressEntry, Level, PublicationRecord


class ConfigError(ValueError):
    """The generator configuration is invalid."""


@dataclass
class CitationModel:
    base_mean: float = 5.0
    beta: float = 0.0
    coupling_level: str = "country"
    dispersion: float = 1.5
    field_scale_sd: float = 0.5


@dataclass
class SimulationConfig:
    n_fields: int = 3
    years: list[int] = field(default_factory=lambda: [2009, 2010])
    pubs_per_field_year: int = 100
    author_count_dist: dict[int, float] = field(default_factory=lambda: {1: 0.2, 2: 0.3, 3: 0.3, 5: 0.2})
    addresses_per_author_dist: dict[int, float] = field(default_factory=lambda: {1: 0.8, 2: 0.2})
    n_organizations: int = 40
    n_countries: int = 8
    same_org_prob: float = 0.4
    same_country_prob: float = 0.5
    multi_field_prob: float = 0.15
    reprint_prob: float = 0.8
    missing_links_prob: float = 0.1
    no_address_prob: float = 0.0
    reprint_only_prob: float = 0.0
    citation: CitationModel = field(default_factory=CitationModel)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> SimulationConfig:
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        data = dict(data)
        cit = data.pop("citation", {})
        cit_known = {f.name for f in fields(CitationModel)}
        if set(cit) - cit_known:
            raise ConfigError(f"unknown citation keys: {', '.join(sorted(set(cit) - cit_known))}")
        for key in ("author_count_dist", "addresses_per_author_dist"):
            if key in data:
                try:
                    data[key] = {int(k): float(v) for k, v in data[key].items()}
                except (TypeError, ValueError, AttributeError) as exc:
                    raise ConfigError(f"{key} must map integers to probabilities") from exc
        cfg = cls(**data, citation=CitationModel(**cit))
        cfg.validate()
        return cfg

    @classmethod
    def from_file(cls, path: str | Path) -> SimulationConfig:
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: expected a JSON object")
        return cls.from_dict(data)

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        for key in ("author_count_dist", "addresses_per_author_dist"):
            d[key] = {str(k): v for k, v in sorted(d[key].items())}
        return d

    def validate(self) -> None:
        for name in ("n_fields", "pubs_per_field_year", "n_organizations", "n_countries"):
            if not isinstance(getattr(self, name), int) or getattr(self, name) < 1:
                raise ConfigError(f"{name} must be a positive integer")
        if not self.years:
            raise ConfigError("years must not be empty")
        for name in ("author_count_dist", "addresses_per_author_dist"):
            dist = getattr(self, name)
            if not dist or any(k < 1 for k in dist) or any(p < 0 for p in dist.values()):
                raise ConfigError(f"{name} needs positive counts and non-negative probabilities")
            if not math.isclose(sum(dist.values()), 1.0, abs_tol=1e-9):
                raise ConfigError(f"{name} probabilities sum to {sum(dist.values())}, not 1")
        for name in ("same_org_prob", "same_country_prob", "multi_field_prob", "reprint_prob",
                     "missing_links_prob", "no_address_prob", "reprint_only_prob"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1]")
        c = self.citation
        if c.base_mean <= 0 or c.dispersion <= 0 or c.field_scale_sd < 0:
            raise ConfigError("citation base_mean and dispersion must be positive, field_scale_sd >= 0")
        try:
            Level(c.coupling_level)
        except ValueError:
            raise ConfigError(f"unknown coupling_level {c.coupling_level!r}") from None
        if self.multi_field_prob > 0 and self.n_fields < 2:
            raise ConfigError("multi_field_prob > 0 needs at least two fields")


def _draw(rng: np.random.Generator, dist: dict[int, float], size: int) -> list[int]:
    keys = sorted(dist)
    return rng.choice(keys, size=size, p=[dist[k] for k in keys]).tolist()


def _org_name(j: int) -> str:
    return f"Organization {j + 1:03d}"


def _country_name(j: int) -> str:
    return f"Country {j + 1:02d}"


def _simulate_cell(
    cfg: SimulationConfig, f: int, year: int, factor: float, rng
) -> tuple[list[PublicationRecord], list[int]]:
    """Records of one field-year cell and their unit counts at the coupling level."""
    n = cfg.pubs_per_field_year
    n_countries = cfg.n_countries
    orgs_by_country = [
        [j for j in range(cfg.n_organizations) if j % n_countries == c] for c in range(n_countries)
    ]

    n_authors = _draw(rng, cfg.author_count_dist, n)
    per_author = _draw(rng, cfg.addresses_per_author_dist, sum(n_authors))
    n_slots = sum(per_author)
    u_org = rng.random(n_slots).tolist()
    u_country = rng.random(n_slots).tolist()
    pick = rng.random(n_slots).tolist()
    any_org = rng.integers(cfg.n_organizations, size=n_slots).tolist()
    flags = rng.random((n, 5)).tolist()
    other_field = rng.integers(max(cfg.n_fields - 1, 1), size=n).tolist()
    corr_pick = rng.random(n).tolist()

    level = Level(cfg.citation.coupling_level)
    drafts: list[dict[str, Any]] = []
    m: list[int] = []
    slot = 0
    author_cursor = 0
    for i in range(n):
        a = n_authors[i]
        authors = tuple(f"Author {f}-{year}-{i}-{k + 1}" for k in range(a))
        addresses: list[tuple[int, int]] = []  # (org, country)
        links = []
        for k in range(a):
            own = []
            for _ in range(per_author[author_cursor + k]):
                if addresses and u_org[slot] < cfg.same_org_prob:
                    idx = int(pick[slot] * len(addresses))
                    org = addresses[idx][0]
                elif addresses and u_country[slot] < cfg.same_country_prob:
                    pool = orgs_by_country[addresses[0][1]]
                    org = pool[int(pick[slot] * len(pool))]
                else:
                    org = any_org[slot]
                slot += 1
                addresses.append((org, org % n_countries))
                own.append(len(addresses) - 1)
            links.append(tuple(own))
        author_cursor += a

        no_addr, want_reprint, drop_links, multi, only_reprint = flags[i]
        reprint_at = None
        if no_addr < cfg.no_address_prob:
            addresses, links = [], [() for _ in authors]
        elif want_reprint < cfg.reprint_prob:
            reprint_at = addresses[links[int(corr_pick[i] * a)][0]]
            if only_reprint < cfg.reprint_only_prob:
                addresses, links = [], [() for _ in authors]

        # unit count from the integer model; names are unique per id, so this
        # matches resolving the finished record
        unit_addresses = set(addresses)
        if reprint_at is not None:
            unit_addresses.add(reprint_at)
        if level is Level.AUTHOR:
            m.append(a)
        elif level is Level.ORGANIZATION:
            m.append(len({o for o, _ in unit_addresses}))
        else:
            m.append(len({c for _, c in unit_addresses}))

        fields_ = [f"F{f + 1:02d}"]
        if multi < cfg.multi_field_prob:
            g = other_field[i]
            g = g + 1 if g >= f else g
            fields_.append(f"F{g + 1:02d}")
        entries = tuple(AddressEntry(_org_name(o), _country_name(c)) for o, c in addresses)
        reprint = None if reprint_at is None else AddressEntry(_org_name(reprint_at[0]), _country_name(reprint_at[1]))
        drafts.append(
            dict(
                id=f"F{f + 1:02d}-{year}-{i:06d}",
                year=year,
                doc_type="article",
                authors=authors,
                field_assignments=tuple(fields_),
                regular_addresses=entries,
                reprint_address=reprint,
                author_address_links=None if (drop_links < cfg.missing_links_prob or not entries) else tuple(links),
            )
        )

    mean = cfg.citation.base_mean * factor * np.maximum(np.array(m, dtype=float), 1.0) ** cfg.citation.beta
    shape = cfg.citation.dispersion
    lam = rng.gamma(shape, mean / shape)
    cites = rng.poisson(lam).tolist()
    return [PublicationRecord(citations=int(c), **d) for d, c in zip(drafts, cites)], m


def simulate_corpus(cfg: SimulationConfig, seed: int) -> list[PublicationRecord]:
    """Deterministic corpus for ``seed``; every field-year cell has its own seed stream."""
    cfg.validate()
    cells = [(f, y) for f in range(cfg.n_fields) for y in cfg.years]
    seqs = np.random.SeedSequence(seed).spawn(len(cells) + 1)
    field_rng = np.random.default_rng(seqs[0])
    factors = np.exp(field_rng.normal(0.0, cfg.citation.field_scale_sd, size=cfg.n_fields)).tolist()
    out: list[PublicationRecord] = []
    for (f, y), seq in zip(cells, seqs[1:]):
        records, _ = _simulate_cell(cfg, f, y, factors[f], np.random.default_rng(seq))
        out.extend(records)
    return out
