import os
from pathlib import Path

import pytest

import wwwstory

FIXTURES = Path(os.environ.get("WWWSTORY_FIXTURES", Path(__file__).resolve().parents[2] / "fixtures"))


def toy10():
    return wwwstory.Index.from_corpus_file(FIXTURES / "toy10.jsonl")


def test_tokenize():
    assert wwwstory.tokenize("Pet fish, pet!") == ["pet", "fish", "pet"]
    assert wwwstory.tokenize("") == []


def test_index_counts_and_round_trip(tmp_path):
    idx = toy10()
    assert idx.doc_count == 10
    assert idx.count('term("A")') == 5
    assert idx.count('phrase("A","B")') == 1
    assert idx.matching_docs('and(term("a"),term("c"))') == ["d4", "d5"]
    path = tmp_path / "toy.idx"
    idx.save(path)
    assert wwwstory.Index.load(path).count('and(term("a"),term("b"))') == 2


def test_structural_error():
    with pytest.raises(wwwstory.Error):
        toy10().count('phrase("a")')


def test_toy10_triad():
    provider = wwwstory.local_provider(toy10())
    report = provider.analyze_triad("A", "B", "C", ["A", "B"])
    assert report["ee"]["ee_ratio_vs_a"] == 2.5
    assert report["ee"]["ee_ratio_vs_b"] == 2.0
    assert report["dominance"]["dominance_direct"] == 2.5
    assert report["bonds"]["m_a_b"]["value"] == 1.0
    assert report["consistency"]["all_satisfied"]


def test_petfish_fixture():
    provider = wwwstory.recorded_provider(FIXTURES / "petfish-2016.jsonl")
    assert provider.source == "recorded_external"
    report = provider.analyze_triad("pet", "fish", "guppy", ["pet", "fish"])
    assert report["ee"]["ee_ratio_vs_a"] == pytest.approx(2.59e2, rel=0.01)
    assert report["oe"]["oe_ratio_vs_a"] == pytest.approx(1.09, rel=0.01)
    assert report["dominance"]["dominance_decomposed"] == pytest.approx(2.46e2, rel=0.01)
    assert "2.37e+02" in provider.triad_markdown("pet", "fish", "guppy", ["pet", "fish"])
    with pytest.raises(wwwstory.MissingObservationError):
        provider.count('term("goldfish")')


def test_measures():
    assert wwwstory.landing_probability(5, 10) == 0.5
    assert wwwstory.meaning_bond(2, 5, 3, 10) == (pytest.approx(4 / 3), "attractive")
    with pytest.raises(wwwstory.MeasureError):
        wwwstory.meaning_bond(1, 5, 3, None)


def test_quantum():
    fit = wwwstory.ee_fit(0.5, 0.5, 0.75)
    assert fit["feasible"]
    assert wwwstory.ee_forward(fit["model"])["p_a_and_b"] == pytest.approx(0.75, abs=1e-6)
    assert not wwwstory.ee_fit(8.57e-4, 9.75e-4, 2.22e-1)["feasible"]
    assert not wwwstory.oe_fit(0.3, 0.4, 0.35)["feasible"]
    oe = wwwstory.oe_fit(0.5, 0.0, 0.25)
    assert wwwstory.oe_forward(oe["model"])["int_b"] == pytest.approx(-0.5, abs=1e-5)
    gap, residual = wwwstory.oe_demo(500)
    assert gap <= 1e-9 and residual <= 1e-9
    assert wwwstory.ee_fallacy_classification(0.5, 0.5, 0.25)[0] == "double"
