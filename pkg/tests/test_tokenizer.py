import json
import random
import subprocess
import sys

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mp, mpf

from manymt.errors import DataError
from manymt.synthdata import DEMO_LANGS, random_sentence, render
from manymt.tokenizer import (
    DEFAULT_RESERVED,
    SubwordModel,
    language_weights,
    train_subword,
)


def tiny_corpus():
    return {
        "eng": ["the cat sat on the mat", "a cat and a dog"] * 10,
        "fra": ["le chat et le chien", "un chat sur le tapis"] * 10,
    }


class TestLanguageWeights:
    def test_equal_sizes_symmetric(self):
        w = language_weights({"eng": 500, "fra": 500}, alpha=0.7)
        assert w["eng"] == w["fra"] == 0.5

    def test_closed_form_1000_vs_10(self):
        mp.dps = 40
        w = language_weights({"big": 1000, "small": 10}, alpha=0.3)
        e_big = mpf(1000) ** mpf("0.3")
        e_small = mpf(10) ** mpf("0.3")
        assert w["big"] == pytest.approx(float(e_big / (e_big + e_small)), abs=1e-14)
        assert round(w["big"], 3) == 0.799
        assert round(w["small"], 3) == 0.201

    def test_monotone_and_flattening(self):
        sizes = {"a": 100_000, "b": 5_000, "c": 50}
        ratios = []
        for alpha in (1.0, 0.5, 0.3, 0.1):
            w = language_weights(sizes, alpha)
            assert w["a"] > w["b"] > w["c"]
            ratios.append(w["a"] / w["c"])
        assert ratios == sorted(ratios, reverse=True)  # shrinks toward 1 as alpha -> 0
        assert ratios[-1] < ratios[0]

    def test_alpha_domain(self):
        with pytest.raises(DataError):
            language_weights({"a": 10, "b": 20}, alpha=0.0)
        with pytest.raises(DataError):
            language_weights({"a": 10, "b": 20}, alpha=1.5)


class TestTraining:
    def test_reserved_block_occupies_low_ids(self):
        model = train_subword(tiny_corpus(), alpha=0.3, vocab_size=300)
        for i, tag in enumerate(DEFAULT_RESERVED):
            assert model.reserved_id(tag) == i
            assert model.decode([i]) == tag
        assert len(DEFAULT_RESERVED) == 32

    def test_vocab_size_exact(self):
        model = train_subword(tiny_corpus(), alpha=0.3, vocab_size=321)
        assert model.size == 321
        assert len(model.vocab()) == 321

    def test_unreachable_vocab_size_names_max(self):
        with pytest.raises(DataError, match=r"unreachable.*\d+"):
            train_subword({"eng": ["ab"] * 3}, alpha=0.3, vocab_size=500)

    def test_empty_corpora_rejected(self):
        with pytest.raises(DataError):
            train_subword({}, alpha=0.3, vocab_size=300)
        with pytest.raises(DataError):
            train_subword({"eng": []}, alpha=0.3, vocab_size=300)

    def test_determinism(self):
        a = train_subword(tiny_corpus(), alpha=0.3, vocab_size=310)
        b = train_subword(tiny_corpus(), alpha=0.3, vocab_size=310)
        assert a.merges == b.merges
        assert a.vocab() == b.vocab()

    def test_upweighted_language_merges_first(self):
        # same text mass, but sizes force eng to dominate the merge order
        corpora = {
            "eng": ["xyxyxyxy"] * 5,
            "fra": ["qzqzqzqz"] * 5,
        }
        heavy = train_subword(corpora, alpha=1.0, vocab_size=290,
                              sizes={"eng": 10_000, "fra": 10})
        first = heavy.merges[0]
        x, y = "x".encode()[0], "y".encode()[0]
        assert first[0] == heavy.byte_base + x
        assert first[1] == heavy.byte_base + y


class TestEncodeDecode:
    @pytest.fixture(scope="class")
    def model(self):
        return train_subword(tiny_corpus(), alpha=0.3, vocab_size=320)

    def test_empty_string(self, model):
        assert model.encode("") == []
        assert model.decode([]) == ""

    def test_round_trip_on_corpus(self, model):
        for line in tiny_corpus()["eng"] + tiny_corpus()["fra"]:
            assert model.decode(model.encode(line)) == line

    def test_round_trip_six_scripts(self, fixture_tokenizer):
        rng = random.Random(99)
        lines = []
        for _ in range(1000):
            lang = rng.choice(DEMO_LANGS)
            lines.append(render(lang, random_sentence(rng)))
        for line in lines:
            assert fixture_tokenizer.decode(fixture_tokenizer.encode(line)) == line

    @settings(max_examples=200, deadline=None)
    @given(st.text(max_size=60))
    def test_round_trip_arbitrary_text(self, text):
        model = _SHARED_MODEL
        assert model.decode(model.encode(text)) == text

    def test_literal_reserved_tag_never_uses_reserved_id(self, model):
        ids = model.encode("TBD3")
        assert 3 not in ids
        assert model.decode(ids) == "TBD3"

    def test_out_of_range_id_rejected(self, model):
        with pytest.raises(DataError):
            model.decode([model.size])
        with pytest.raises(DataError):
            model.decode([-1])

    def test_whitespace_variants_round_trip(self, model):
        for text in ("a  b", " lead", "trail ", "   ", "tab\tand\nnewline"):
            assert model.decode(model.encode(text)) == text

    def test_save_load_preserves_behaviour(self, model, tmp_path):
        path = tmp_path / "tok.json"
        model.save(path)
        loaded = SubwordModel.load(path)
        sample = "the cat sat on the mat"
        assert loaded.encode(sample) == model.encode(sample)
        assert loaded.vocab() == model.vocab()
        blob = json.loads(path.read_text())
        assert len(blob["vocab"]) == model.size


_SHARED_MODEL = train_subword(tiny_corpus(), alpha=0.3, vocab_size=320)


class TestKernelBackends:
    def test_backends_produce_identical_models(self):
        code = (
            "import json\n"
            "from manymt import kernels\n"
            "from manymt.tokenizer import train_subword\n"
            "corp = {'eng': ['the cat sat on the mat'] * 8, 'fra': ['le chat et le chien'] * 8}\n"
            "m = train_subword(corp, alpha=0.3, vocab_size=310)\n"
            "print(json.dumps({'backend': kernels.BACKEND, 'merges': m.merges,"
            " 'enc': m.encode('the cat chien xyz')}))\n"
        )
        default = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True)
        forced = subprocess.run(
            [sys.executable, "-c", code], capture_output=True, text=True,
            env={"MANYMT_PURE_PYTHON": "1", "PATH": "/usr/bin:/bin"},
        )
        a = json.loads(default.stdout)
        b = json.loads(forced.stdout)
        assert b["backend"] == "python"
        assert a["merges"] == b["merges"]
        assert a["enc"] == b["enc"]
