import json
from pathlib import Path

import pytest

from dialogsmith.corpus.model import Document
from dialogsmith.corpus.tokenizer import ByteBpeTokenizer

from support import FIXTURES, PB  # noqa: F401  (re-exported for fixtures below)


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def byte_tok() -> ByteBpeTokenizer:
    return ByteBpeTokenizer.bytes_only()


@pytest.fixture(scope="session")
def fixture_tok() -> ByteBpeTokenizer:
    return ByteBpeTokenizer.from_files(
        FIXTURES / "tokenizer" / "vocab.json", FIXTURES / "tokenizer" / "merges.txt"
    )


@pytest.fixture(scope="session")
def articles() -> list[Document]:
    docs = []
    for line in (FIXTURES / "articles.jsonl").read_text().splitlines():
        rec = json.loads(line)
        docs.append(
            Document(
                id=rec["id"], source=rec["source"], title=rec["title"],
                body=rec["body"], year=rec.get("year"),
            )
        )
    assert len(docs) == 20
    return docs


@pytest.fixture(scope="session")
def stub_transcripts() -> list[str]:
    return [
        p.read_text() for p in sorted((FIXTURES / "transcripts").glob("*.txt"))
    ]
