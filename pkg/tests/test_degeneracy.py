import pytest

from dialogsmith.corpus.degeneracy import (
    DegeneracyPolicy,
    duplicate_ngram_fraction,
    is_degenerate,
)
from dialogsmith.corpus.model import Dialogue, Turn


def dlg(*turns):
    return Dialogue(id="d", turns=[Turn(role=r, text=t) for r, t in turns])


GOOD = dlg(
    ("user", "What does a CBC measure in practice?"),
    ("assistant", "Red cells, white cells, hemoglobin, hematocrit, and platelets."),
    ("user", "Which value flags anemia?"),
    ("assistant", "A low hemoglobin for age and sex, often with a low hematocrit."),
)


def test_good_dialogue_passes():
    bad, tags = is_degenerate(GOOD)
    assert not bad and tags == []


def test_single_turn_is_exactly_too_few():
    bad, tags = is_degenerate(dlg(("user", "Is this thing on?")))
    assert bad and tags == ["too_few_turns"]


def test_empty_turn_tagged():
    bad, tags = is_degenerate(
        dlg(("user", "Hello?"), ("assistant", "   "), ("user", "Still there?"),
            ("assistant", "Yes, sorry about that."))
    )
    assert bad and "empty_turn" in tags


def test_non_alternating_tagged():
    bad, tags = is_degenerate(
        dlg(("user", "First question."), ("user", "Second question."),
            ("assistant", "Answers to both."))
    )
    assert bad and "non_alternating" in tags


def test_repetition_tagged():
    loop = "breathe in and breathe out and " * 8
    bad, tags = is_degenerate(
        dlg(("user", "Give me a mantra."), ("assistant", loop))
    )
    assert bad and "repetition" in tags


def test_system_turn_does_not_count_toward_minimum():
    bad, tags = is_degenerate(
        dlg(("system", "Be helpful."), ("user", "One question only."))
    )
    assert bad and "too_few_turns" in tags


# duplicate_ngram_fraction is the quantitative heart; pin its arithmetic.

def test_fraction_zero_when_all_distinct():
    assert duplicate_ngram_fraction("a b c d e f g", 4) == 0.0


def test_fraction_exact_value():
    # "x y x y x y x y x y" -> 4-grams: 7 total, 2 distinct -> 5/7 duplicated
    text = "x y " * 5
    assert duplicate_ngram_fraction(text.strip(), 4) == pytest.approx(5 / 7)


def test_fraction_short_text_is_zero():
    assert duplicate_ngram_fraction("one two three", 4) == 0.0


def test_threshold_is_strict():
    policy = DegeneracyPolicy(repetition_threshold=5 / 7)
    text = ("x y " * 5).strip()
    d = dlg(("user", "Say it."), ("assistant", text))
    bad, tags = is_degenerate(d, policy)
    assert "repetition" not in tags  # equal to threshold, not above
