from __future__ import annotations

from pathlib import Path

import pytest

from fraccount.corpus import AddressEntry, PublicationRecord, load_corpus, resolve_all

ROOT = Path(__file__).resolve().parents[1]
DATA = ROOT / "data"
EXAMPLES = DATA / "examples"
GOLDEN = DATA / "golden"

# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE_RESULTS: dict[int, tuple[bool, str]] = {}


def make_record(
    id="p",
    citations=0,
    authors=("A",),
    addresses=(("Org", "Country"),),
    links=None,
    fields=("F",),
    year=2010,
    reprint=None,
    corresponding=None,
    doc_type="article",
) -> PublicationRecord:
    return PublicationRecord(
        id=id,
        year=year,
        doc_type=doc_type,
        citations=citations,
        authors=tuple(authors),
        field_assignments=tuple(fields),
        regular_addresses=tuple(AddressEntry(o, c) for o, c in addresses),
        reprint_address=AddressEntry(*reprint) if reprint else None,
        author_address_links=None if links is None else tuple(tuple(x) for x in links),
        corresponding_author_index=corresponding,
    )


@pytest.fixture(scope="session")
def example_pub():
    return resolve_all(load_corpus(EXAMPLES / "example_publication.jsonl"))[0]


@pytest.fixture(scope="session")
def single_field():
    return resolve_all(load_corpus(EXAMPLES / "single_field.jsonl"))


@pytest.fixture(scope="session")
def multi_field():
    return resolve_all(load_corpus(EXAMPLES / "multi_field.jsonl"))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
