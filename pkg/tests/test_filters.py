"""Metadata filter semantics."""

import json

import pytest

from docqa.corpus import PreprocessConfig, load_corpus, parse_timestamp
from docqa.errors import FilterError
from docqa.retrieval import EMPTY_FILTER, MetadataFilter, RangeClause, ValueClause, apply_metadata_filter

CFG = PreprocessConfig(stemming_enabled=False)


def build(tmp_path, rows):
    path = tmp_path / "c.jsonl"
    with open(path, "w") as fh:
        for i, meta in enumerate(rows):
            fh.write(json.dumps({"id": f"d{i}", "title": "", "text": "x", "metadata": meta}) + "\n")
    return load_corpus(path, CFG)


def test_empty_filter_keeps_all(tmp_path):
    corpus = build(tmp_path, [{"firm": "Apple"}, {"firm": "IBM"}])
    assert apply_metadata_filter(corpus, EMPTY_FILTER) == {"d0", "d1"}


def test_categorical_membership(tmp_path):
    corpus = build(tmp_path, [{"firm": "Apple"}, {"firm": "IBM"}, {"firm": "Pepsi"}])
    f = MetadataFilter({"firm": ValueClause(frozenset(["Apple", "Pepsi"]))})
    assert apply_metadata_filter(corpus, f) == {"d0", "d2"}


def test_real_bounds_inclusive(tmp_path):
    corpus = build(tmp_path, [{"year": 2014}, {"year": 2015}, {"year": 2017}])
    f = MetadataFilter({"year": RangeClause(2015, 2016)})
    assert apply_metadata_filter(corpus, f) == {"d1"}
    f = MetadataFilter({"year": RangeClause(2014, 2017)})
    assert apply_metadata_filter(corpus, f) == {"d0", "d1", "d2"}


def test_open_ended_bounds(tmp_path):
    corpus = build(tmp_path, [{"year": 2014}, {"year": 2015}, {"year": 2017}])
    assert apply_metadata_filter(corpus, MetadataFilter({"year": RangeClause(lower=2015)})) == {"d1", "d2"}
    assert apply_metadata_filter(corpus, MetadataFilter({"year": RangeClause(upper=2014)})) == {"d0"}


def test_timestamp_bounds(tmp_path):
    corpus = build(tmp_path, [{"date": "2015-06-01"}, {"date": "2015-12-15"}, {"date": "2016-03-01"}])
    lo = parse_timestamp("2015-10-01")
    hi = parse_timestamp("2015-12-31")
    f = MetadataFilter({"date": RangeClause(lo, hi)})
    assert apply_metadata_filter(corpus, f) == {"d1"}


def test_conjunction_across_fields(tmp_path):
    corpus = build(
        tmp_path,
        [{"firm": "Apple", "year": 2015}, {"firm": "Apple", "year": 2016}, {"firm": "IBM", "year": 2015}],
    )
    f = MetadataFilter({"firm": ValueClause(frozenset(["Apple"])), "year": RangeClause(2015, 2015)})
    assert apply_metadata_filter(corpus, f) == {"d0"}


def test_missing_field_fails_clause(tmp_path):
    corpus = build(tmp_path, [{"firm": "Apple"}, {}])
    f = MetadataFilter({"firm": ValueClause(frozenset(["Apple"]))})
    assert apply_metadata_filter(corpus, f) == {"d0"}


def test_unobserved_value_matches_nothing(tmp_path):
    corpus = build(tmp_path, [{"firm": "Apple"}])
    f = MetadataFilter({"firm": ValueClause(frozenset(["Tesla"]))})
    assert apply_metadata_filter(corpus, f) == set()


def test_unknown_field_error(tmp_path):
    corpus = build(tmp_path, [{"firm": "Apple"}])
    with pytest.raises(FilterError, match="sector"):
        apply_metadata_filter(corpus, MetadataFilter({"sector": ValueClause(frozenset(["x"]))}))


def test_kind_mismatch_errors(tmp_path):
    corpus = build(tmp_path, [{"firm": "Apple", "year": 2015}])
    with pytest.raises(FilterError, match="year"):
        apply_metadata_filter(corpus, MetadataFilter({"year": ValueClause(frozenset(["2015"]))}))
    with pytest.raises(FilterError, match="firm"):
        apply_metadata_filter(corpus, MetadataFilter({"firm": RangeClause(0, 1)}))
