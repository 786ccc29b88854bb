import json

import pytest
from conftest import EXAMPLES, make_record
from hypothesis import given, settings
from strategies import records

from fraccount.corpus import (
    AddressEntry,
    CorpusParseError,
    CorpusValidationError,
    Level,
    check_record,
    enumerate_units,
    load_corpus,
    normalize_name,
    resolve,
    scan_corpus,
    write_corpus,
)


def _write_lines(tmp_path, objs, name="c.jsonl"):
    path = tmp_path / name
    path.write_text("".join(json.dumps(o) + "\n" for o in objs), encoding="utf-8")
    return path


def _obj(**kw):
    base = {
        "id": "r1",
        "year": 2010,
        "doc_type": "article",
        "citations": 3,
        "authors": ["A"],
        "regular_addresses": [{"organization": "O", "country": "C"}],
        "field_assignments": ["F"],
    }
    base.update(kw)
    return base


class TestLoadCorpus:
    def test_single_field_example_has_four_records(self):
        recs = load_corpus(EXAMPLES / "single_field.jsonl", {"article"})
        assert [r.id for r in recs] == ["pub1", "pub2", "pub3", "pub4"]
        assert [r.citations for r in recs] == [3, 6, 1, 10]

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.jsonl"
        path.write_text("")
        assert load_corpus(path) == []

    def test_bad_link_index_names_record(self, tmp_path):
        addrs = [{"organization": f"O{i}", "country": "C"} for i in range(5)]
        path = _write_lines(
            tmp_path,
            [_obj(id="bad-one", authors=["A", "B"], regular_addresses=addrs, author_address_links=[[0], [9]])],
        )
        with pytest.raises(CorpusValidationError) as exc:
            load_corpus(path)
        (problem,) = exc.value.problems
        assert problem.record_id == "bad-one"
        assert problem.rule == "link-index"
        assert "9" in problem.message

    def test_malformed_line_reports_line_number(self, tmp_path):
        path = tmp_path / "c.jsonl"
        path.write_text(json.dumps(_obj()) + "\n{not json\n")
        with pytest.raises(CorpusParseError) as exc:
            load_corpus(path)
        assert exc.value.line_no == 2

    def test_non_object_line(self, tmp_path):
        path = tmp_path / "c.jsonl"
        path.write_text("[1, 2]\n")
        with pytest.raises(CorpusParseError):
            load_corpus(path)

    def test_doc_type_filter(self, tmp_path):
        path = _write_lines(
            tmp_path,
            [_obj(id="a"), _obj(id="b", doc_type="review"), _obj(id="c", doc_type="other")],
        )
        assert [r.id for r in load_corpus(path)] == ["a", "b"]
        assert [r.id for r in load_corpus(path, {"article"})] == ["a"]
        assert [r.id for r in load_corpus(path, None)] == ["a", "b", "c"]

    def test_all_problems_reported_not_dropped(self, tmp_path):
        path = _write_lines(
            tmp_path,
            [
                _obj(id="ok"),
                _obj(id="neg", citations=-1),
                _obj(id="dup-fields", field_assignments=["F", "F"]),
                _obj(id="ok"),
                _obj(id="links", authors=["A", "B"], author_address_links=[[0]]),
                _obj(id="corr", corresponding_author_index=3),
                _obj(id="blank", regular_addresses=[{"organization": "  ", "country": "C"}]),
                _obj(id="nofield", field_assignments=[]),
            ],
        )
        report = scan_corpus(path)
        rules = sorted((p.record_id, p.rule) for p in report.problems)
        assert rules == [
            ("blank", "address-nonempty"),
            ("corr", "corresponding-index"),
            ("dup-fields", "field-duplicates"),
            ("links", "links-per-author"),
            ("neg", "schema"),
            ("nofield", "schema"),
            ("ok", "unique-id"),
        ]
        assert [r.id for r in report.records] == ["ok"]

    def test_unknown_key_is_schema_error(self, tmp_path):
        path = _write_lines(tmp_path, [_obj(extra=1)])
        with pytest.raises(CorpusValidationError):
            load_corpus(path)

    def test_comment_lines_skipped(self, tmp_path):
        path = tmp_path / "c.jsonl"
        path.write_text("# header\n\n" + json.dumps(_obj()) + "\n")
        assert len(load_corpus(path)) == 1

    def test_round_trip(self, tmp_path):
        rec = make_record(
            authors=("A", "B"),
            addresses=(("O1", "C1"), ("O2", "C2")),
            links=((0,), (0, 1)),
            reprint=("O2", "C2"),
            corresponding=2,
            fields=("X", "Y"),
        )
        path = tmp_path / "rt.jsonl"
        write_corpus([rec], path, header=["generated"])
        assert load_corpus(path) == [rec]

    def test_unlinked_author_warning(self, tmp_path):
        path = _write_lines(tmp_path, [_obj(authors=["A", "B"], author_address_links=[[0], []])])
        report = scan_corpus(path)
        assert report.ok
        assert [w.rule for w in report.warnings] == ["unlinked-author"]


class TestResolve:
    def test_example_links_kept(self, example_pub):
        assert example_pub.effective_author_links == ((0,), (0, 1), (2,), (2,), (3, 4))
        assert example_pub.effective_corresponding_author == 4
        assert example_pub.assignable

    def test_missing_links_link_everyone(self):
        r = resolve(make_record(authors=("A", "B", "C"), addresses=(("O1", "C1"), ("O2", "C2"))))
        assert r.effective_author_links == ((0, 1),) * 3

    def test_reprint_only(self):
        r = resolve(make_record(authors=("A", "B"), addresses=(), reprint=("OrgX", "CountryX"), corresponding=2))
        assert r.effective_addresses_for_weights == (AddressEntry("OrgX", "CountryX"),)
        assert r.effective_corresponding_author == 2
        assert r.effective_author_links == ((0,), (0,))
        assert r.assignable

    def test_first_author_is_corresponding_without_reprint(self):
        r = resolve(make_record(authors=("A", "B")))
        assert r.effective_corresponding_author == 1

    def test_reprint_identifies_corresponding_author(self):
        r = resolve(
            make_record(
                authors=("A", "B", "C"),
                addresses=(("O1", "C1"), ("O2", "C2")),
                links=((0,), (0,), (1,)),
                reprint=("o2", "c2"),
            )
        )
        assert r.effective_corresponding_author == 3
        assert r.corresponding_address == AddressEntry("o2", "c2")

    def test_unit_count_addresses_include_reprint(self):
        r = resolve(make_record(addresses=(("O1", "C1"),), reprint=("O2", "C2")))
        assert [a.organization for a in r.effective_addresses_for_unit_count] == ["O1", "O2"]
        assert [a.organization for a in r.effective_addresses_for_weights] == ["O1"]

    def test_reprint_duplicate_deduplicated(self):
        r = resolve(make_record(addresses=(("O1", "C1"), ("O1", "C1")), reprint=(" o1 ", "C1")))
        assert len(r.effective_addresses_for_unit_count) == 1

    def test_no_address_not_assignable(self):
        r = resolve(make_record(addresses=()))
        assert not r.assignable
        assert r.effective_addresses_for_weights == ()

    @given(records())
    @settings(max_examples=200)
    def test_idempotent(self, rec):
        once = resolve(rec)
        assert check_record(once.as_record()) == []
        twice = resolve(once.as_record())
        for name in (
            "effective_author_links",
            "effective_corresponding_author",
            "effective_addresses_for_weights",
            "effective_addresses_for_unit_count",
            "corresponding_address",
            "assignable",
        ):
            assert getattr(twice, name) == getattr(once, name), name

    @given(records())
    def test_assignable_iff_any_address(self, rec):
        r = resolve(rec)
        assert r.assignable == bool(rec.regular_addresses or rec.reprint_address)
        if r.assignable:
            assert r.effective_addresses_for_weights


class TestEnumerateUnits:
    def test_example_counts(self, example_pub):
        assert len(enumerate_units(example_pub, Level.ORGANIZATION)) == 4
        assert len(enumerate_units(example_pub, Level.COUNTRY)) == 3
        assert len(enumerate_units(example_pub, Level.AUTHOR)) == 5

    def test_single_author_single_address(self):
        r = resolve(make_record())
        assert all(len(enumerate_units(r, lv)) == 1 for lv in Level)

    def test_no_semantic_merging(self):
        r = resolve(
            make_record(
                authors=("A", "B"),
                addresses=(("Leiden University", "Netherlands"), ("Leiden University Medical Center", "Netherlands")),
            )
        )
        assert enumerate_units(r, Level.ORGANIZATION) == ("leiden university", "leiden university medical center")

    def test_england_and_scotland_are_two_countries(self):
        r = resolve(make_record(authors=("A", "B"), addresses=(("O1", "England"), ("O2", "Scotland"))))
        assert len(enumerate_units(r, Level.COUNTRY)) == 2

    def test_duplicate_author_names_are_distinct_positions(self):
        r = resolve(make_record(authors=("J. Smith", "j.  smith", "K")))
        assert enumerate_units(r, Level.AUTHOR) == ("j. smith", "j. smith#2", "k")

    def test_not_assignable_gives_empty(self):
        r = resolve(make_record(addresses=()))
        assert enumerate_units(r, Level.COUNTRY) == ()
        assert enumerate_units(r, Level.AUTHOR) == ("a",)

    def test_normalize_name(self):
        assert normalize_name("  Leiden\tUniversity  ") == "leiden university"
        assert normalize_name("STRASSE") == normalize_name("straße")

    @given(records())
    @settings(max_examples=200)
    def test_count_ordering(self, rec):
        r = resolve(rec)
        n_c = len(enumerate_units(r, Level.COUNTRY))
        n_o = len(enumerate_units(r, Level.ORGANIZATION))
        assert n_c <= n_o <= len(r.effective_addresses_for_unit_count)

    @given(records(mixed_orgs=True))
    def test_deterministic(self, rec):
        for lv in Level:
            assert enumerate_units(resolve(rec), lv) == enumerate_units(resolve(rec), lv)
