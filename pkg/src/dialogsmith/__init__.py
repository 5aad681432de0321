"""dialogsmith: dialogue synthesis + eval toolkit for chat fine-tuning corpora.

The package is organized around a pipeline:

    corpus   -- documents, chat logs, tokenization, QA gates
    dbke     -- dialogue-based knowledge encoding (doc -> teacher -> dialogue)
    client   -- HTTP clients for chat / logprob inference endpoints
    retrieval-- BM25 passage lookup used to pick document subsets
    emit     -- loss-masked shard assembly + training recipe files
    evalharness -- multiple-choice likelihood evaluation and reports
"""

__version__ = "0.1.0"
