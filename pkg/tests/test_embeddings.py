import math

import numpy as np
import pytest

from shorttm.corpus import corpus_from_lines
from shorttm.embeddings import (EmbeddingTable, PromotionIndex, build_promotion_index, cosine,
                                load_embeddings)
from shorttm.errors import ConfigError, EmbeddingFormatError


def test_cosine_oracle():
    assert cosine((1, 1), (1, 0)) == pytest.approx(1 / math.sqrt(2), abs=1e-15)
    assert cosine((1, 0), (0, 0)) == 0.0
    assert cosine((2, 0), (-3, 0)) == pytest.approx(-1.0)


def test_load_filters_to_vocab(tmp_path):
    vocab = corpus_from_lines(["a b c"]).vocab
    p = tmp_path / "e.txt"
    p.write_text("b 1 2\nzz 9 9\na 0.5 0\nb 7 7\n")
    t = load_embeddings(p, vocab)
    assert t.dim == 2
    assert t.has_vector.tolist() == [True, True, False]
    np.testing.assert_array_equal(t.vectors[1], [1, 2])  # first duplicate wins
    assert t.coverage == pytest.approx(2 / 3)


def test_load_errors(tmp_path):
    vocab = corpus_from_lines(["a"]).vocab
    p = tmp_path / "e.txt"
    p.write_text("a 1 2\nb 1\n")
    with pytest.raises(EmbeddingFormatError):
        load_embeddings(p, vocab)
    p.write_text("")
    with pytest.raises(EmbeddingFormatError):
        load_embeddings(p, vocab)
    p.write_text("zz 1 2\n")
    with pytest.raises(EmbeddingFormatError):
        load_embeddings(p, vocab, require_coverage=True)


def test_promotion_index_threshold_and_symmetry():
    vecs = np.array([[1.0, 0.0], [1.0, 0.1], [0.0, 1.0], [0.0, 0.0]])
    t = EmbeddingTable(vecs, np.array([True, True, True, False]))
    idx = build_promotion_index(t, 0.9, 0.3)
    assert idx.neighbors(0).tolist() == [1] and idx.neighbors(1).tolist() == [0]
    assert idx.neighbors(2).tolist() == [] and idx.neighbors(3).tolist() == []
    assert idx.weight(0, 0) == 1.0
    assert idx.weight(0, 1) == 0.3
    assert idx.weight(0, 2) == 0.0
    with pytest.raises(ConfigError):
        build_promotion_index(t, 1.5, 0.3)


def test_promotion_index_brute_force(rng):
    X = rng.normal(size=(30, 4))
    t = EmbeddingTable(X, np.ones(30, dtype=bool))
    idx = build_promotion_index(t, 0.4, 0.1, block=7)
    for i in range(30):
        expect = [j for j in range(30) if j != i and cosine(X[i], X[j]) > 0.4]
        assert idx.neighbors(i).tolist() == expect


def test_empty_and_from_pairs():
    e = PromotionIndex.empty(4)
    assert e.n_pairs == 0
    p = PromotionIndex.from_pairs(4, [(0, 2), (2, 0), (1, 1)], 0.2)
    assert p.neighbors(0).tolist() == [2] and p.neighbors(2).tolist() == [0]
    assert p.n_pairs == 2
