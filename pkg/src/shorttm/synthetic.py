"""Synthetic corpora with known structure, for tests and benchmarks."""

from __future__ import annotations

import numpy as np

from .corpus import Corpus, GoldLabels, corpus_from_lines
from .embeddings import EmbeddingTable


def disjoint_topic_lines(n_docs=500, n_topics=3, words_per_topic=20, doc_len=8, seed=0,
                         min_len=None):
    """One topic per document, each topic owning its own vocabulary slice.

    Returns (lines, labels). Word ``t<k>_<j>`` belongs to topic k. With
    ``min_len`` set, lengths are uniform in [min_len, doc_len].
    """
    rng = np.random.default_rng(seed)
    labels = rng.integers(0, n_topics, n_docs)
    lines = []
    for k in labels:
        n = doc_len if min_len is None else int(rng.integers(min_len, doc_len + 1))
        ws = rng.integers(0, words_per_topic, n)
        lines.append(" ".join(f"t{k}_{j}" for j in ws))
    return lines, labels


def disjoint_topic_corpus(n_docs=500, n_topics=3, words_per_topic=20, doc_len=8, seed=0,
                          min_len=None) -> tuple[Corpus, GoldLabels]:
    lines, labels = disjoint_topic_lines(n_docs, n_topics, words_per_topic, doc_len, seed, min_len)
    corpus = corpus_from_lines(lines)
    return corpus, GoldLabels(np.asarray(labels, dtype=np.int64),
                              tuple(f"topic{k}" for k in range(n_topics)))


def word_topic_of(vocab) -> np.ndarray:
    """Topic id encoded in synthetic word names (``t<k>_<j>``); -1 otherwise."""
    out = np.full(len(vocab), -1, dtype=np.int64)
    for w in range(len(vocab)):
        name = vocab.word(w)
        if name.startswith("t") and "_" in name:
            try:
                out[w] = int(name[1:name.index("_")])
            except ValueError:
                pass
    return out


def clustered_embeddings(vocab, dim=8, spread=0.2, seed=0, coverage=1.0) -> EmbeddingTable:
    """Vectors near a per-topic center, so same-topic words are cosine-similar."""
    rng = np.random.default_rng(seed)
    topic = word_topic_of(vocab)
    n_topics = max(int(topic.max()) + 1, 1)
    centers = rng.normal(size=(n_topics + 1, dim))
    centers /= np.linalg.norm(centers, axis=1, keepdims=True)
    vecs = centers[topic] + spread * rng.normal(size=(len(vocab), dim))
    has = rng.random(len(vocab)) < coverage
    vecs[~has] = 0.0
    return EmbeddingTable(vecs, has)


def write_embeddings(table: EmbeddingTable, vocab, path):
    with open(path, "w", encoding="utf-8") as fh:
        for w in np.flatnonzero(table.has_vector):
            fh.write(vocab.word(w) + " " + " ".join("%.17g" % x for x in table.vectors[w]) + "\n")


def independent_reference(words, window=10):
    """Reference lines under which the given words are exactly independent.

    One line per subset of ``words`` (a full factorial design), padded with
    filler tokens; every line fits in one window. Each word is in half the
    windows and each pair in a quarter, so c(a, b) * T = c(a) * c(b).
    """
    words = list(words)
    if len(words) >= window:
        raise ValueError("need fewer words than the window size")
    lines = []
    for mask in range(2 ** len(words)):
        keep = [w for i, w in enumerate(words) if mask >> i & 1]
        lines.append(" ".join(keep + ["_pad"] * (window - len(keep))))
    return lines
