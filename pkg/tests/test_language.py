import json

import pytest

from support import FIXTURES
from dialogsmith.corpus.language import default_detector


@pytest.fixture(scope="module")
def det():
    return default_detector()


def test_mini_corpus_accuracy(det):
    """Implementer-labeled 200-sentence corpus: 100 English, 100 not.
    Classification rule under test: en iff detect() says en with ≥0.8."""
    rows = [
        json.loads(ln)
        for ln in (FIXTURES / "langid_corpus.jsonl").read_text().splitlines()
    ]
    en_rows = [r for r in rows if r["label"] == "en"]
    other = [r for r in rows if r["label"] != "en"]
    assert len(en_rows) == 100 and len(other) == 100
    correct = 0
    for r in rows:
        lang, conf = det.detect(r["text"])
        got_en = lang == "en" and conf >= 0.8
        correct += got_en == (r["label"] == "en")
    assert correct >= 190, f"only {correct}/200 correct"


def test_empty_text_rejected(det):
    with pytest.raises(ValueError, match="empty_text"):
        det.detect("")
    with pytest.raises(ValueError, match="empty_text"):
        det.detect("   \n\t ")


def test_deterministic(det):
    s = "The pharmacist suggested taking the tablet with food."
    assert det.detect(s) == det.detect(s)


def test_confidence_monotone_in_evidence(det):
    short = "Der Arzt empfahl viel Tee."
    longer = short + " Nach der Impfung blieb er im Wartezimmer sitzen und trank Wasser."
    lang_s, conf_s = det.detect(short)
    lang_l, conf_l = det.detect(longer)
    assert lang_s == lang_l == "de"
    assert conf_l >= conf_s


def test_confidence_in_unit_interval(det):
    for s in ("ok", "la la la", "x", "Здравствуйте, как дела?"):
        _, conf = det.detect(s)
        assert 0.0 <= conf <= 1.0


def test_is_english_threshold(det):
    assert det.is_english("Take the tablet after breakfast with water every day.")
    assert not det.is_english("Принимайте таблетку после завтрака каждый день.")


def test_digits_and_punct_ignored(det):
    # same residue after normalization -> identical (lang, confidence)
    assert det.detect("Take 2 tablets (after meals), 3 per day.") == det.detect(
        "take tablets after meals per day"
    )


def test_known_languages_cover_nine():
    det = default_detector()
    assert len(det.languages()) == 9
    assert "en" in det.languages()
