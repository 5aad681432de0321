import math

import pytest

from dialogsmith.client.stub import StubTeacher
from dialogsmith.corpus.model import Document
from dialogsmith.dbke.templates import builtin_template
from dialogsmith.evalharness.benchmarks import BenchmarkItem
from dialogsmith.retrieval import (
    QARejected,
    build_index,
    qa_batch,
    qa_to_dialogue,
    retrieve,
    sample_items,
    tokenize_terms,
)

K1, B = 1.5, 0.75


def doc(id, body, title=""):
    return Document(id=id, source="generic", title=title, body=body)


# three tiny docs with hand-checkable statistics: N=3, avg_len=3
CORPUS = [
    doc("doc-a", "sun moon sun"),          # len 3
    doc("doc-b", "sun star"),              # len 2
    doc("doc-c", "rain cloud rain cloud"), # len 4
]


@pytest.fixture(scope="module")
def ix():
    return build_index(CORPUS)


def test_tokenize_terms():
    assert tokenize_terms("The CAT, sat-down 2x!") == ["the", "cat", "sat", "down", "2x"]
    assert tokenize_terms("...") == []


def test_scores_match_hand_arithmetic(ix):
    # "moon": df=1 -> idf = ln((3-1+.5)/(1+.5)) = ln(5/3); doc-a tf=1, dl=3
    idf = math.log((3 - 1 + 0.5) / (1 + 0.5))
    denom_a = 1 + K1 * (1 - B + B * 3 / 3.0)          # = 2.5
    want_a = idf * 1 * (K1 + 1) / denom_a             # = idf exactly
    got = retrieve(ix, "moon", 5)
    assert got[0][0] == "doc-a"
    assert abs(got[0][1] - want_a) < 1e-9
    assert abs(want_a - idf) < 1e-12  # dl == avg and tf=1 collapse to plain idf

    # "rain": df=1; doc-c tf=2, dl=4
    denom_c = 2 + K1 * (1 - B + B * 4 / 3.0)
    want_c = idf * 2 * (K1 + 1) / denom_c
    got = retrieve(ix, "rain", 5)
    assert got == [("doc-c", pytest.approx(want_c, abs=1e-9))]

    # multi-term query sums per-term contributions
    got = retrieve(ix, "moon rain cloud", 5)
    assert [d for d, _ in got] == ["doc-c", "doc-a"]
    assert abs(got[0][1] - 2 * want_c) < 1e-9  # rain and cloud have equal stats
    assert abs(got[1][1] - want_a) < 1e-9


def test_idf_floor_drops_common_terms(ix):
    # "sun" appears in 2 of 3 docs: idf = ln(1.5/2.5) < 0, floored to zero,
    # so the term contributes nothing and no doc is reported
    assert ix.idf("sun") == 0.0
    assert retrieve(ix, "sun", 5) == []


def test_unknown_term_scores_nothing(ix):
    assert retrieve(ix, "xylophone", 3) == []


def test_k_zero_and_negative(ix):
    assert retrieve(ix, "moon", 0) == []
    with pytest.raises(ValueError):
        retrieve(ix, "moon", -1)


def test_k_truncates(ix):
    assert len(retrieve(ix, "moon rain cloud", 1)) == 1


def test_tie_breaks_on_ascending_id():
    # apple/banana are symmetric: same df, tf, and doc length -> equal scores
    docs = [doc("t-b", "banana pie"), doc("t-a", "apple pie"), doc("t-c", "cherry tart")]
    got = retrieve(build_index(docs), "apple banana", 5)
    assert [d for d, _ in got] == ["t-a", "t-b"]
    assert abs(got[0][1] - got[1][1]) < 1e-12


def test_empty_corpus_rejected():
    with pytest.raises(ValueError, match="empty_corpus"):
        build_index([])


def test_sample_items_deterministic():
    pool = [
        BenchmarkItem(id=f"i{n}", question="q", options=[("A", "x"), ("B", "y")],
                      gold_label="A")
        for n in range(30)
    ]
    a = sample_items(pool, 10, seed=7)
    b = sample_items(pool, 10, seed=7)
    assert [i.id for i in a] == [i.id for i in b]
    assert len({i.id for i in a}) == 10
    assert [i.id for i in sample_items(pool, 10, seed=8)] != [i.id for i in a]
    # n == len(pool) permutes; n > len(pool) refuses
    assert sorted(i.id for i in sample_items(pool, 30, seed=1)) == sorted(
        i.id for i in pool
    )
    with pytest.raises(ValueError):
        sample_items(pool, 31, seed=1)


# -- qa transform ----------------------------------------------------------------

QA_TEMPLATE = builtin_template("qa_justify")

ITEM = BenchmarkItem(
    id="q-77",
    question="Which vitamin deficiency causes scurvy?",
    options=[("A", "Vitamin A"), ("B", "Vitamin B12"),
             ("C", "Vitamin C"), ("D", "Vitamin D")],
    gold_label="C",
)

GOOD_REPLY = (
    "Student: Which vitamin deficiency causes scurvy?\n"
    "Tutor: Scurvy comes from missing vitamin C, needed for collagen synthesis.\n"
    "Student: So what is the answer?\n"
    "Tutor: The answer is (C) Vitamin C.\n"
)

WRONG_REPLY = (
    "Student: Which vitamin deficiency causes scurvy?\n"
    "Tutor: It is definitely one of the fat-soluble vitamins.\n"
)


def test_qa_dialogue_accepted():
    d = qa_to_dialogue(ITEM, ["Vitamin C is required for collagen."],
                       StubTeacher([GOOD_REPLY]), QA_TEMPLATE, seed=5)
    assert d.provenance == "qa_transform"
    assert d.source_doc == "q-77"
    assert d.attempts == 1
    assert "C)" in d.turns[-1].text
    assert [t.role for t in d.turns] == ["user", "assistant", "user", "assistant"]


def test_qa_gold_check_retries_then_rejects():
    teacher = StubTeacher([WRONG_REPLY])
    with pytest.raises(QARejected) as exc:
        qa_to_dialogue(ITEM, [], teacher, QA_TEMPLATE, max_attempts=3)
    assert exc.value.attempts == 3
    assert teacher.calls == 3


def test_qa_retry_recovers():
    teacher = StubTeacher([WRONG_REPLY, GOOD_REPLY], mode="sequence")
    d = qa_to_dialogue(ITEM, [], teacher, QA_TEMPLATE, max_attempts=3)
    assert d.attempts == 2


def test_qa_unparseable_reply_retries():
    teacher = StubTeacher(["no speaker markers anywhere", GOOD_REPLY],
                          mode="sequence")
    d = qa_to_dialogue(ITEM, [], teacher, QA_TEMPLATE, max_attempts=2)
    assert d.attempts == 2


def test_qa_batch_splits_accepted_and_rejected(ix):
    hard = BenchmarkItem(id="q-hard", question="unanswerable?",
                         options=[("A", "x"), ("B", "y")], gold_label="B")
    res = qa_batch([ITEM, hard], ix, {d.id: d for d in CORPUS},
                   StubTeacher([GOOD_REPLY]), QA_TEMPLATE, max_attempts=2)
    assert [d.source_doc for d in res.accepted] == ["q-77"]
    assert res.rejected_ids == ["q-hard"]  # B) never appears in the canned reply


def test_qa_batch_without_index_passes_no_passages():
    res = qa_batch([ITEM], None, {}, StubTeacher([GOOD_REPLY]), QA_TEMPLATE)
    assert len(res.accepted) == 1
