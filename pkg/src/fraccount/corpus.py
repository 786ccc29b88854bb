"""Publication data model, corpus ingestion and address-resolution rules.

A corpus file holds one JSON object per line.  Each object describes one
publication (see ``CORPUS_SCHEMA`` and ``docs/corpus_format.md``).  Records are
parsed into immutable :class:`PublicationRecord` objects and then resolved into
:class:`ResolvedPublication` objects, which carry the effective author/address
links that the counting methods operate on.
"""

from __future__ import annotations

import json
import logging
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from pathlib import Path
from typing import Any

import jsonschema

logger = logging.getLogger(__name__)

DEFAULT_DOC_TYPES = frozenset({"article", "review"})
DOC_TYPES = ("article", "review", "other")


class Level(str, Enum):
    """Unit of analysis."""

    AUTHOR = "author"
    ORGANIZATION = "organization"
    COUNTRY = "country"

    def __str__(self) -> str:
        return self.value


class CorpusError(Exception):
    """Base class for corpus problems."""


class CorpusParseError(CorpusError):
    """A line of the corpus file could not be parsed."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no
        self.message = message


@dataclass(frozen=True)
class Problem:
    """One invariant violation found while validating a corpus."""

    line_no: int
    record_id: str | None
    rule: str
    message: str

    def __str__(self) -> str:
        rid = self.record_id if self.record_id is not None else "?"
        return f"line {self.line_no} [{rid}] {self.rule}: {self.message}"


class CorpusValidationError(CorpusError):
    """One or more records violate the corpus invariants."""

    def __init__(self, problems: Sequence[Problem]):
        self.problems = list(problems)
        lines = "; ".join(str(p) for p in self.problems[:5])
        more = f" (+{len(self.problems) - 5} more)" if len(self.problems) > 5 else ""
        super().__init__(f"{len(self.problems)} invalid record(s): {lines}{more}")


@lru_cache(maxsize=1 << 16)
def normalize_name(name: str) -> str:
    """Trim, collapse internal whitespace and case-fold a unit name."""
    return " ".join(name.split()).casefold()


@dataclass(frozen=True)
class AddressEntry:
    organization: str
    country: str

    @property
    def org_key(self) -> str:
        return normalize_name(self.organization)

    @property
    def country_key(self) -> str:
        return normalize_name(self.country)

    @property
    def key(self) -> tuple[str, str]:
        return (self.org_key, self.country_key)

    def to_json(self) -> dict[str, str]:
        return {"organization": self.organization, "country": self.country}


@dataclass(frozen=True)
class PublicationRecord:
    id: str
    year: int
    doc_type: str
    citations: int
    authors: tuple[str, ...]
    field_assignments: tuple[str, ...]
    regular_addresses: tuple[AddressEntry, ...] = ()
    reprint_address: AddressEntry | None = None
    author_address_links: tuple[tuple[int, ...], ...] | None = None
    corresponding_author_index: int | None = None

    def to_json(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "year": self.year,
            "doc_type": self.doc_type,
            "citations": self.citations,
            "authors": list(self.authors),
            "regular_addresses": [a.to_json() for a in self.regular_addresses],
            "reprint_address": self.reprint_address.to_json() if self.reprint_address else None,
            "author_address_links": (
                None
                if self.author_address_links is None
                else [list(links) for links in self.author_address_links]
            ),
            "corresponding_author_index": self.corresponding_author_index,
            "field_assignments": list(self.field_assignments),
        }


_ADDRESS_SCHEMA = {
    "type": "object",
    "required": ["organization", "country"],
    "properties": {
        "organization": {"type": "string"},
        "country": {"type": "string"},
    },
    "additionalProperties": False,
}

CORPUS_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "publication record",
    "type": "object",
    "required": ["id", "year", "doc_type", "citations", "authors", "field_assignments"],
    "properties": {
        "id": {"type": "string", "minLength": 1},
        "year": {"type": "integer"},
        "doc_type": {"enum": list(DOC_TYPES)},
        "citations": {"type": "integer", "minimum": 0},
        "authors": {"type": "array", "items": {"type": "string"}},
        "regular_addresses": {"type": "array", "items": _ADDRESS_SCHEMA},
        "reprint_address": {"anyOf": [{"type": "null"}, _ADDRESS_SCHEMA]},
        "author_address_links": {
            "anyOf": [
                {"type": "null"},
                {
                    "type": "array",
                    "items": {"type": "array", "items": {"type": "integer"}},
                },
            ]
        },
        "corresponding_author_index": {"anyOf": [{"type": "null"}, {"type": "integer"}]},
        "field_assignments": {"type": "array", "items": {"type": "string"}, "minItems": 1},
    },
    "additionalProperties": False,
}

_validator = jsonschema.Draft202012Validator(CORPUS_SCHEMA)


def _schema_problems(obj: Any, line_no: int) -> list[Problem]:
    rid = obj.get("id") if isinstance(obj, dict) and isinstance(obj.get("id"), str) else None
    out = []
    for err in sorted(_validator.iter_errors(obj), key=lambda e: list(e.absolute_path)):
        where = "/".join(str(p) for p in err.absolute_path) or "<record>"
        out.append(Problem(line_no, rid, "schema", f"{where}: {err.message}"))
    return out


def record_from_json(obj: dict[str, Any]) -> PublicationRecord:
    """Build a record from an already schema-valid JSON object."""
    links = obj.get("author_address_links")
    reprint = obj.get("reprint_address")
    return PublicationRecord(
        id=obj["id"],
        year=obj["year"],
        doc_type=obj["doc_type"],
        citations=obj["citations"],
        authors=tuple(obj["authors"]),
        field_assignments=tuple(obj["field_assignments"]),
        regular_addresses=tuple(
            AddressEntry(a["organization"], a["country"]) for a in obj.get("regular_addresses", [])
        ),
        reprint_address=AddressEntry(reprint["organization"], reprint["country"]) if reprint else None,
        author_address_links=None if links is None else tuple(tuple(x) for x in links),
        corresponding_author_index=obj.get("corresponding_author_index"),
    )


def check_record(rec: PublicationRecord, line_no: int = 0) -> list[Problem]:
    """Return the invariant violations of one record (empty when valid)."""
    problems = []

    def bad(rule: str, message: str) -> None:
        problems.append(Problem(line_no, rec.id, rule, message))

    addresses = list(rec.regular_addresses)
    if rec.reprint_address is not None:
        addresses.append(rec.reprint_address)
    for addr in addresses:
        if not addr.organization.strip() or not addr.country.strip():
            bad("address-nonempty", f"empty organization or country in {addr.to_json()}")
    if rec.author_address_links is not None:
        if len(rec.author_address_links) != len(rec.authors):
            bad(
                "links-per-author",
                f"{len(rec.author_address_links)} link lists for {len(rec.authors)} authors",
            )
        n_addr = len(rec.regular_addresses)
        for pos, links in enumerate(rec.author_address_links, start=1):
            for idx in links:
                if not 0 <= idx < n_addr:
                    bad(
                        "link-index",
                        f"author {pos} links to address index {idx}, "
                        f"but only {n_addr} regular address(es) exist",
                    )
    if rec.corresponding_author_index is not None and not (
        1 <= rec.corresponding_author_index <= len(rec.authors)
    ):
        bad(
            "corresponding-index",
            f"corresponding_author_index {rec.corresponding_author_index} "
            f"outside 1..{len(rec.authors)}",
        )
    if len(set(rec.field_assignments)) != len(rec.field_assignments):
        bad("field-duplicates", f"duplicate field ids in {list(rec.field_assignments)}")
    return problems


def check_warnings(rec: PublicationRecord, line_no: int = 0) -> list[Problem]:
    """Non-fatal findings: authors whose explicit link list is empty."""
    out = []
    if not rec.authors:
        out.append(Problem(line_no, rec.id, "no-authors", "record has no authors"))
    if rec.author_address_links is not None and rec.regular_addresses:
        for pos, links in enumerate(rec.author_address_links, start=1):
            if not links:
                out.append(
                    Problem(line_no, rec.id, "unlinked-author", f"author {pos} has no address links")
                )
    return out


@dataclass
class ValidationReport:
    records: list[PublicationRecord] = field(default_factory=list)
    line_numbers: list[int] = field(default_factory=list)
    problems: list[Problem] = field(default_factory=list)
    warnings: list[Problem] = field(default_factory=list)
    skipped_doc_type: int = 0

    @property
    def ok(self) -> bool:
        return not self.problems


def _iter_lines(path: Path) -> Iterator[tuple[int, str]]:
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            stripped = line.strip()
            if stripped and not stripped.startswith("#"):
                yield line_no, line


def scan_corpus(
    path: str | Path,
    doc_types: Iterable[str] | None = DEFAULT_DOC_TYPES,
) -> ValidationReport:
    """Parse and check every line; collects all problems instead of stopping.

    Raises :class:`CorpusParseError` for lines that are not JSON objects.
    ``doc_types=None`` keeps every document type.
    """
    keep = None if doc_types is None else frozenset(doc_types)
    report = ValidationReport()
    seen: dict[str, int] = {}
    for line_no, line in _iter_lines(Path(path)):
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusParseError(line_no, f"invalid JSON: {exc.msg} (col {exc.colno})") from exc
        if not isinstance(obj, dict):
            raise CorpusParseError(line_no, "expected a JSON object")
        schema_problems = _schema_problems(obj, line_no)
        if schema_problems:
            report.problems.extend(schema_problems)
            continue
        rec = record_from_json(obj)
        if rec.id in seen:
            report.problems.append(
                Problem(line_no, rec.id, "unique-id", f"id already used on line {seen[rec.id]}")
            )
            continue
        seen[rec.id] = line_no
        problems = check_record(rec, line_no)
        if problems:
            report.problems.extend(problems)
            continue
        report.warnings.extend(check_warnings(rec, line_no))
        if keep is not None and rec.doc_type not in keep:
            report.skipped_doc_type += 1
            continue
        report.records.append(rec)
        report.line_numbers.append(line_no)
    return report


def load_corpus(
    path: str | Path,
    doc_types: Iterable[str] | None = DEFAULT_DOC_TYPES,
) -> list[PublicationRecord]:
    """Load records passing the document-type filter.

    Raises :class:`CorpusParseError` on malformed lines and
    :class:`CorpusValidationError` listing every invalid record.
    """
    report = scan_corpus(path, doc_types)
    if report.problems:
        raise CorpusValidationError(report.problems)
    for w in report.warnings:
        logger.warning("%s", w)
    return report.records


def write_corpus(
    records: Iterable[PublicationRecord], path: str | Path, header: Iterable[str] = ()
) -> None:
    """Write one JSON object per line, after optional ``#`` comment lines."""
    with open(path, "w", encoding="utf-8") as fh:
        for line in header:
            fh.write(f"# {line}\n")
        for rec in records:
            fh.write(json.dumps(rec.to_json(), ensure_ascii=False, sort_keys=True))
            fh.write("\n")


# ---------------------------------------------------------------------------
# Resolution
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ResolvedPublication:
    """A record plus the effective links used by the counting methods.

    ``effective_author_links`` holds, per author, indices into
    ``effective_addresses_for_weights``.  ``corresponding_address`` is the
    reprint address when one exists; corresponding-author counting at the
    organization and country levels is based on it.
    """

    record: PublicationRecord
    effective_author_links: tuple[tuple[int, ...], ...]
    effective_corresponding_author: int | None
    effective_addresses_for_weights: tuple[AddressEntry, ...]
    effective_addresses_for_unit_count: tuple[AddressEntry, ...]
    corresponding_address: AddressEntry | None
    assignable: bool
    author_units: tuple[str, ...]
    # memo for derived values (weight vectors); not part of identity
    cache: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    @property
    def id(self) -> str:
        return self.record.id

    @property
    def year(self) -> int:
        return self.record.year

    @property
    def citations(self) -> int:
        return self.record.citations

    @property
    def authors(self) -> tuple[str, ...]:
        return self.record.authors

    @property
    def field_assignments(self) -> tuple[str, ...]:
        return self.record.field_assignments

    @property
    def doc_type(self) -> str:
        return self.record.doc_type

    def as_record(self) -> PublicationRecord:
        """Re-express the effective fields as an input record."""
        return PublicationRecord(
            id=self.record.id,
            year=self.record.year,
            doc_type=self.record.doc_type,
            citations=self.record.citations,
            authors=self.record.authors,
            field_assignments=self.record.field_assignments,
            regular_addresses=self.effective_addresses_for_weights,
            reprint_address=self.record.reprint_address,
            author_address_links=self.effective_author_links if self.authors else None,
            corresponding_author_index=self.effective_corresponding_author,
        )


def author_unit_ids(authors: Sequence[str]) -> tuple[str, ...]:
    """One identifier per author position; repeated names get a ``#k`` suffix."""
    counts: dict[str, int] = {}
    out = []
    for name in authors:
        key = normalize_name(name)
        counts[key] = counts.get(key, 0) + 1
        out.append(key if counts[key] == 1 else f"{key}#{counts[key]}")
    return tuple(out)


def _dedupe(addresses: Iterable[AddressEntry]) -> tuple[AddressEntry, ...]:
    seen = set()
    out = []
    for a in addresses:
        if a.key not in seen:
            seen.add(a.key)
            out.append(a)
    return tuple(out)


def resolve(pub: PublicationRecord) -> ResolvedPublication:
    """Apply the fallback rules for missing address metadata.

    * no author/address links: every author is linked to every address;
    * no regular addresses but a reprint address: everything uses the reprint;
    * no corresponding author and no reprint address: the first author is
      taken as corresponding author;
    * unit counts use regular + reprint addresses, weights regular only.
    """
    n_authors = len(pub.authors)
    regular = pub.regular_addresses
    reprint = pub.reprint_address

    if regular:
        weight_addrs = regular
        if pub.author_address_links is None:
            links = tuple(tuple(range(len(regular))) for _ in range(n_authors))
        else:
            links = tuple(tuple(dict.fromkeys(x)) for x in pub.author_address_links)
    elif reprint is not None:
        weight_addrs = (reprint,)
        links = tuple((0,) for _ in range(n_authors))
    else:
        weight_addrs = ()
        links = tuple(() for _ in range(n_authors))

    unit_addrs = _dedupe(regular + ((reprint,) if reprint is not None else ()))

    if pub.corresponding_author_index is not None:
        corresponding = pub.corresponding_author_index
    elif n_authors == 0:
        corresponding = None
    elif reprint is None:
        corresponding = 1
    else:
        # The reprint address identifies the corresponding author; take the
        # first author linked to an address identical to it.
        corresponding = 1
        for pos, author_links in enumerate(links, start=1):
            if any(weight_addrs[i].key == reprint.key for i in author_links):
                corresponding = pos
                break

    return ResolvedPublication(
        record=pub,
        effective_author_links=links,
        effective_corresponding_author=corresponding,
        effective_addresses_for_weights=weight_addrs,
        effective_addresses_for_unit_count=unit_addrs,
        corresponding_address=reprint,
        assignable=bool(unit_addrs),
        author_units=author_unit_ids(pub.authors),
    )


def resolve_all(records: Iterable[PublicationRecord]) -> list[ResolvedPublication]:
    return [resolve(r) for r in records]


def address_unit(addr: AddressEntry, level: Level) -> str:
    if level is Level.ORGANIZATION:
        return addr.org_key
    if level is Level.COUNTRY:
        return addr.country_key
    raise ValueError(f"addresses do not name {level} units")


def enumerate_units(pub: ResolvedPublication, level: Level) -> tuple[str, ...]:
    """Distinct co-authoring units of ``pub`` at ``level``, in first-seen order."""
    level = Level(level)
    if level is Level.AUTHOR:
        return pub.author_units
    key = ("units", level)
    units = pub.cache.get(key)
    if units is None:
        units = tuple(dict.fromkeys(address_unit(a, level) for a in pub.effective_addresses_for_unit_count))
        pub.cache[key] = units
    return units


def unit_count(pub: ResolvedPublication, level: Level) -> int:
    """m_i: the number of distinct units that co-authored ``pub``."""
    return len(enumerate_units(pub, level))
