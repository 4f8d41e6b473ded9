"""Corpus and label loading.

Input files are line oriented: one document per line, tokens separated by
whitespace. No preprocessing is applied; tokens are taken verbatim.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import CorpusFormatError

log = logging.getLogger(__name__)


class Vocabulary:
    """Dense bijection between word strings and ids in ``[0, V)``."""

    def __init__(self, words=()):
        self.id_to_word: list[str] = []
        self.word_to_id: dict[str, int] = {}
        for w in words:
            self.add(w)

    def add(self, word: str) -> int:
        wid = self.word_to_id.get(word)
        if wid is None:
            wid = len(self.id_to_word)
            self.word_to_id[word] = wid
            self.id_to_word.append(word)
        return wid

    def __len__(self):
        return len(self.id_to_word)

    def __contains__(self, word):
        return word in self.word_to_id

    def __getitem__(self, word):
        return self.word_to_id[word]

    def get(self, word, default=None):
        return self.word_to_id.get(word, default)

    def word(self, wid: int) -> str:
        return self.id_to_word[wid]

    def save(self, path):
        Path(path).write_text("".join(w + "\n" for w in self.id_to_word), encoding="utf-8")

    @classmethod
    def load(cls, path):
        lines = Path(path).read_text(encoding="utf-8").splitlines()
        vocab = cls(lines)
        if len(vocab) != len(lines):
            raise CorpusFormatError(f"{path}: duplicate entries in vocabulary file")
        return vocab


@dataclass(frozen=True)
class Corpus:
    """Tokenized documents over a shared vocabulary.

    ``docs`` holds one int64 array of word ids per document. The flat CSR
    view (``doc_ptr``, ``words``) is what the sampling kernels consume.
    """

    docs: tuple
    vocab: Vocabulary
    skipped_tokens: int = 0
    doc_ptr: np.ndarray = field(init=False, repr=False)
    words: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        lengths = np.array([len(d) for d in self.docs], dtype=np.int64)
        ptr = np.zeros(len(self.docs) + 1, dtype=np.int64)
        np.cumsum(lengths, out=ptr[1:])
        flat = (np.concatenate(self.docs).astype(np.int64) if self.docs
                else np.zeros(0, dtype=np.int64))
        if flat.size and (flat.min() < 0 or flat.max() >= len(self.vocab)):
            raise CorpusFormatError("token id outside vocabulary")
        ptr.setflags(write=False)
        flat.setflags(write=False)
        object.__setattr__(self, "doc_ptr", ptr)
        object.__setattr__(self, "words", flat)

    @property
    def N(self) -> int:
        return len(self.docs)

    @property
    def V(self) -> int:
        return len(self.vocab)

    @property
    def lengths(self) -> np.ndarray:
        return np.diff(self.doc_ptr)

    @property
    def n_tokens(self) -> int:
        return int(self.doc_ptr[-1])

    @property
    def avg_len(self) -> float:
        return self.n_tokens / self.N if self.N else 0.0

    @property
    def max_len(self) -> int:
        return int(self.lengths.max()) if self.N else 0

    @property
    def empty(self) -> np.ndarray:
        """Boolean mask of documents with no tokens."""
        return self.lengths == 0

    def occurrence_index(self) -> np.ndarray:
        """For each token, how many earlier tokens of the same document share its word."""
        occ = np.zeros(self.n_tokens, dtype=np.int64)
        for d in range(self.N):
            seen: dict[int, int] = {}
            start = self.doc_ptr[d]
            for i, w in enumerate(self.docs[d].tolist()):
                c = seen.get(w, 0)
                occ[start + i] = c
                seen[w] = c + 1
        return occ

    def previous_same_word(self) -> np.ndarray:
        """For each token, the flat index of the previous same-word token in its document, or -1."""
        prev = np.full(self.n_tokens, -1, dtype=np.int64)
        for d in range(self.N):
            last: dict[int, int] = {}
            start = int(self.doc_ptr[d])
            for i, w in enumerate(self.docs[d].tolist()):
                prev[start + i] = last.get(w, -1)
                last[w] = start + i
        return prev

    def to_lines(self) -> list[str]:
        return [" ".join(self.vocab.word(w) for w in d) for d in self.docs]


@dataclass(frozen=True)
class GoldLabels:
    labels: np.ndarray
    names: tuple

    @property
    def num_classes(self) -> int:
        return len(self.names)


def _read_lines(path) -> list[str]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CorpusFormatError(f"cannot read {path}: {exc}") from exc
    return text.splitlines()


def corpus_from_lines(lines, vocab: Vocabulary | None = None) -> Corpus:
    """Build a corpus from text lines.

    With ``vocab`` given the vocabulary is frozen and out-of-vocabulary tokens
    are skipped; otherwise a new vocabulary is built in first-occurrence order.
    """
    frozen = vocab is not None
    if vocab is None:
        vocab = Vocabulary()
    docs = []
    skipped = 0
    for line in lines:
        ids = []
        for tok in line.split():
            if frozen:
                wid = vocab.get(tok)
                if wid is None:
                    skipped += 1
                    continue
            else:
                wid = vocab.add(tok)
            ids.append(wid)
        docs.append(np.array(ids, dtype=np.int64))
    return Corpus(tuple(docs), vocab, skipped)


def load_corpus(path, vocab: Vocabulary | None = None) -> Corpus:
    """Load a training corpus (``vocab=None``) or map a new corpus through ``vocab``.

    A training corpus must contain at least one non-empty line. Empty lines
    are kept as empty documents.
    """
    lines = _read_lines(path)
    corpus = corpus_from_lines(lines, vocab)
    if vocab is None:
        if corpus.n_tokens == 0:
            raise CorpusFormatError(f"{path}: no non-empty lines")
    elif corpus.skipped_tokens:
        log.warning("%s: skipped %d out-of-vocabulary tokens", path, corpus.skipped_tokens)
    n_empty = int(corpus.empty.sum())
    if n_empty:
        log.warning("%s: %d empty documents (excluded from sampling and evaluation)", path, n_empty)
    return corpus


def load_labels(path, corpus: Corpus) -> GoldLabels:
    lines = _read_lines(path)
    if len(lines) != corpus.N:
        raise CorpusFormatError(
            f"{path}: {len(lines)} label lines for {corpus.N} documents")
    names: dict[str, int] = {}
    labels = np.empty(len(lines), dtype=np.int64)
    for i, line in enumerate(lines):
        lab = line.strip()
        if not lab:
            raise CorpusFormatError(f"{path}: empty label on line {i + 1}")
        labels[i] = names.setdefault(lab, len(names))
    return GoldLabels(labels, tuple(names))


def corpus_stats(corpus: Corpus) -> tuple[int, int, float, int]:
    """(N, V, average length, maximum length)."""
    return corpus.N, corpus.V, corpus.avg_len, corpus.max_len


def write_corpus(corpus: Corpus, path):
    Path(path).write_text("".join(line + "\n" for line in corpus.to_lines()), encoding="utf-8")
