import logging

import numpy as np
import pytest

from shorttm.corpus import corpus_from_lines
from shorttm.errors import ShortTMError
from shorttm.inference import infer_unseen
from shorttm.output import TrainedModel
from shorttm.training import train

from conftest import model_config

ALL = ["LDA", "GSDMM", "LFDMM", "GPUDMM", "GPUPDMM", "BTM", "WNTM", "SATM", "PTM"]


@pytest.fixture(scope="module")
def trained(small_corpus, small_emb):
    return {m: train(small_corpus[0], model_config(m, K=2, iterations=20), embeddings=small_emb)
            for m in ALL}


@pytest.mark.parametrize("model", ALL)
def test_foldin_rows_and_phi_fixed(model, trained, small_corpus):
    out = trained[model]
    phi = out.phi.copy()
    theta = infer_unseen(out, small_corpus[0], iterations=10, seed=3)
    assert theta.shape == (small_corpus[0].N, 2)
    np.testing.assert_allclose(theta.sum(axis=1), 1.0, atol=1e-9)
    np.testing.assert_array_equal(out.phi, phi)


@pytest.mark.parametrize("model", ALL)
def test_foldin_oov_and_empty(model, trained, small_corpus, caplog):
    vocab = small_corpus[0].vocab
    new = corpus_from_lines(["nothing known here", vocab.word(0) + " " + vocab.word(1)], vocab)
    with caplog.at_level(logging.WARNING):
        theta = infer_unseen(trained[model], new, iterations=5)
    np.testing.assert_allclose(theta[0], 0.5)
    assert "uniform" in caplog.text
    empty = corpus_from_lines([], vocab)
    assert infer_unseen(trained[model], empty).shape == (0, 2)


def test_foldin_recovers_training_argmax(small_corpus):
    corpus, _ = small_corpus
    out = train(corpus, model_config("GSDMM", K=2, iterations=30))
    d = 0
    new = corpus_from_lines([corpus.to_lines()[d]], corpus.vocab)
    target = int(np.argmax(out.theta[d]))
    hits = sum(int(np.argmax(infer_unseen(out, new, iterations=20, seed=s)[0])) == target
               for s in range(100))
    assert hits >= 95


def test_foldin_deterministic_and_vocab_check(trained, small_corpus):
    a = infer_unseen(trained["LDA"], small_corpus[0], iterations=5, seed=1)
    b = infer_unseen(trained["LDA"], small_corpus[0], iterations=5, seed=1)
    np.testing.assert_array_equal(a, b)
    other = corpus_from_lines(["x y"])
    with pytest.raises(ShortTMError):
        infer_unseen(trained["LDA"], other)


def test_trained_model_from_output(trained):
    tm = TrainedModel.from_output(trained["BTM"])
    assert "topic_prior" in tm.extras and tm.phi.shape[0] == 2
