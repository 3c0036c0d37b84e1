import json

import pytest

from stlkit.errors import StoreFormatError
from stlkit.pairs import (
    NLSTLPair,
    ReviewDecision,
    load_bundled_seeds,
    read_decisions,
    read_pairs,
    write_decisions,
    write_pairs,
)
from stlkit.stl.parser import parse
from stlkit.stl.printer import format_formula


class TestNLSTLPair:
    def test_round_trip_serialization(self):
        pair = NLSTLPair("id1", "a sentence", "x > 0", domain="robotics",
                         source="generated", round=2, status="candidate",
                         meta={"max_rouge": 0.2})
        again = NLSTLPair.from_dict(pair.to_dict())
        assert again == pair
        assert again.meta == pair.meta

    def test_unknown_status_rejected(self):
        with pytest.raises(StoreFormatError):
            NLSTLPair("x", "nl", "stl", status="draft")

    def test_unknown_source_rejected(self):
        with pytest.raises(StoreFormatError):
            NLSTLPair("x", "nl", "stl", source="scraped")

    def test_canonicalized(self):
        pair = NLSTLPair("x", "nl", "G[0,5](x>0)")
        assert pair.canonicalized().stl == "G[0,5] ( x > 0 )"

    def test_formula_parses(self):
        pair = NLSTLPair("x", "nl", "G[0,5] ( x > 0 )")
        assert format_formula(pair.formula()) == pair.stl

    def test_missing_field(self):
        with pytest.raises(StoreFormatError):
            NLSTLPair.from_dict({"id": "x", "nl": "s"})


class TestFiles:
    def test_pairs_file_round_trip(self, tmp_path, toy_pairs):
        path = tmp_path / "pairs.jsonl"
        write_pairs(path, toy_pairs)
        assert read_pairs(path) == toy_pairs

    def test_write_is_atomic_no_temp_left(self, tmp_path, toy_pairs):
        path = tmp_path / "pairs.jsonl"
        write_pairs(path, toy_pairs)
        write_pairs(path, toy_pairs[:1])
        leftovers = [p for p in tmp_path.iterdir() if p.suffix == ".tmp"]
        assert leftovers == []
        assert len(read_pairs(path)) == 1

    def test_decisions_round_trip(self, tmp_path):
        path = tmp_path / "dec.jsonl"
        decisions = [
            ReviewDecision("a", "accept", reviewer="r1"),
            ReviewDecision("b", "reject", reason="bad bound", reviewer="r1"),
        ]
        write_decisions(path, decisions)
        assert read_decisions(path) == decisions

    def test_invalid_json_line(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text('{"id": "a"}\nnot json\n')
        with pytest.raises(StoreFormatError):
            read_pairs(path)

    def test_invalid_verdict(self):
        with pytest.raises(StoreFormatError):
            ReviewDecision("a", "maybe")


class TestBundledSeeds:
    def test_forty_pairs(self, bundled_pairs):
        assert len(bundled_pairs) == 40

    def test_all_seed_status_and_canonical(self, bundled_pairs):
        for pair in bundled_pairs:
            assert pair.status == "seed"
            assert pair.source == "handcrafted"
            assert pair.stl == format_formula(parse(pair.stl))

    def test_domains_cover_three_fields(self, bundled_pairs):
        domains = {p.domain for p in bundled_pairs}
        assert domains == {"autonomous-driving", "robotics", "electronics"}

    def test_ids_unique(self, bundled_pairs):
        assert len({p.id for p in bundled_pairs}) == 40

    def test_sentences_unique(self, bundled_pairs):
        assert len({p.nl for p in bundled_pairs}) == 40

    def test_structural_variety(self, bundled_pairs):
        from stlkit.stl.analysis import count_operators, subformulas
        from stlkit.stl.ast import Always, Eventually, Implies, Until

        formulas = [p.formula() for p in bundled_pairs]
        assert any(isinstance(f, Until) for f in formulas)
        assert any(isinstance(f, Always) for f in formulas)
        assert any(isinstance(f, Eventually) for f in formulas)
        assert max(count_operators(f) for f in formulas) >= 3
        assert max(len(subformulas(f)) for f in formulas) >= 5
