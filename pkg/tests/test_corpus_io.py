import numpy as np
import pytest

from shorttm.corpus import (Vocabulary, corpus_from_lines, corpus_stats, load_corpus,
                            load_labels, write_corpus)
from shorttm.errors import CorpusFormatError


def test_vocabulary_first_occurrence_order():
    c = corpus_from_lines(["b a b", "c a"])
    assert [c.vocab.word(i) for i in range(c.V)] == ["b", "a", "c"]
    assert c.docs[0].tolist() == [0, 1, 0]
    assert c.N == 2 and c.n_tokens == 5


def test_stats_and_csr_layout():
    c = corpus_from_lines(["a b c", "", "a"])
    N, V, avg, mx = corpus_stats(c)
    assert (N, V, mx) == (3, 3, 3)
    assert avg == pytest.approx(4 / 3)
    assert c.doc_ptr.tolist() == [0, 3, 3, 4]
    assert c.empty.tolist() == [False, True, False]
    with pytest.raises(ValueError):
        c.words[0] = 5


def test_occurrence_index_and_previous_same():
    c = corpus_from_lines(["a a b a", "a"])
    assert c.occurrence_index().tolist() == [0, 1, 0, 2, 0]
    prev = c.previous_same_word()
    assert prev[1] == 0 and prev[3] == 1 and prev[0] == -1 and prev[4] == -1


def test_frozen_vocab_skips_oov():
    train = corpus_from_lines(["a b", "c"])
    new = corpus_from_lines(["a z z", "q"], train.vocab)
    assert new.V == 3 and new.skipped_tokens == 3
    assert new.docs[0].tolist() == [0] and new.empty.tolist() == [False, True]


def test_roundtrip(tmp_path):
    c = corpus_from_lines(["x y", "", "y y z"])
    p = tmp_path / "c.txt"
    write_corpus(c, p)
    d = load_corpus(p)
    assert d.to_lines() == ["x y", "", "y y z"]
    v = tmp_path / "vocab.txt"
    c.vocab.save(v)
    assert [Vocabulary.load(v).word(i) for i in range(3)] == ["x", "y", "z"]


def test_load_errors(tmp_path):
    with pytest.raises(CorpusFormatError):
        load_corpus(tmp_path / "missing.txt")
    empty = tmp_path / "e.txt"
    empty.write_text("\n\n")
    with pytest.raises(CorpusFormatError):
        load_corpus(empty)


def test_labels(tmp_path):
    c = corpus_from_lines(["a", "b", "c"])
    p = tmp_path / "l.txt"
    p.write_text("sport\nnews\nsport\n")
    g = load_labels(p, c)
    assert g.labels.tolist() == [0, 1, 0] and g.num_classes == 2
    p.write_text("sport\nnews\n")
    with pytest.raises(CorpusFormatError):
        load_labels(p, c)


def test_new_corpus_may_be_empty(tmp_path):
    train = corpus_from_lines(["a b"])
    p = tmp_path / "n.txt"
    p.write_text("")
    c = load_corpus(p, train.vocab)
    assert c.N == 0 and c.n_tokens == 0
    assert np.asarray(c.lengths).shape == (0,)
