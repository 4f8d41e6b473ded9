"""Fold-in inference on unseen documents with phi held fixed."""

from __future__ import annotations

import logging

import numpy as np

from .corpus import Corpus
from .errors import ShortTMError
from .models.cooccurrence import btm_theta, extract_biterms, wntm_theta
from .models.aggregation import satm_theta
from .models.dmm import pdmm_doc_topic
from .output import TopicModelOutput, TrainedModel
from .sampling import RandomSource

log = logging.getLogger(__name__)

DEFAULT_INFER_ITERATIONS = 100


def _token_foldin(corpus: Corpus, phi, alpha, iterations, rs):
    """Token-level fold-in (LDA, PTM): z ~ (n_d^k + alpha) * phi_k^w.

    Documents are independent given phi, so position i of every document is
    resampled in one vectorized step.
    """
    K = phi.shape[0]
    N = corpus.N
    lengths = corpus.lengths
    ptr = corpus.doc_ptr
    words = corpus.words
    z = rs.init.integers(0, K, len(words))
    doc_of = np.repeat(np.arange(N), lengths)
    ndk = np.zeros((N, K))
    np.add.at(ndk, (doc_of, z), 1.0)
    by_pos = [np.flatnonzero(lengths > i) for i in range(corpus.max_len if N else 0)]
    for _ in range(iterations):
        u = rs.tok_uniforms(len(words))
        for i, docs in enumerate(by_pos):
            t = ptr[docs] + i
            ndk[docs, z[t]] -= 1.0
            p = (ndk[docs] + alpha) * phi[:, words[t]].T
            c = np.cumsum(p, axis=1)
            k = (c <= (u[t] * c[:, -1])[:, None]).sum(axis=1)
            k = np.minimum(k, K - 1)
            z[t] = k
            ndk[docs, k] += 1.0
    return (ndk + alpha) / (lengths[:, None] + K * alpha)


def _doc_foldin(corpus: Corpus, phi, topic_doc_counts, alpha, iterations, rs):
    """Document-level fold-in (DMM family): z_d ~ (m_k + m_k^new + alpha) * prod_w phi_k^w."""
    K = phi.shape[0]
    N = corpus.N
    active = np.flatnonzero(~corpus.empty)
    logphi = np.log(phi)
    ll = np.zeros((N, K))
    for d in active:
        ll[d] = logphi[:, corpus.docs[d]].sum(axis=1)
    m_train = np.asarray(topic_doc_counts, dtype=np.float64)
    zd = np.full(N, -1)
    zd[active] = rs.init.integers(0, K, len(active))
    m_new = np.bincount(zd[active], minlength=K).astype(np.float64)

    def posterior(d):
        lw = np.log(m_train + m_new + alpha) + ll[d]
        p = np.exp(lw - lw.max())
        return p / p.sum()

    for _ in range(iterations):
        u = rs.doc_uniforms(N)
        for d in active:
            m_new[zd[d]] -= 1.0
            c = np.cumsum(posterior(d))
            k = min(int(np.searchsorted(c, u[d] * c[-1], side="right")), K - 1)
            zd[d] = k
            m_new[k] += 1.0
    theta = np.full((N, K), 1.0 / K)
    for d in active:
        m_new[zd[d]] -= 1.0
        theta[d] = posterior(d)
        m_new[zd[d]] += 1.0
    return theta


def infer_unseen(trained, new_corpus: Corpus, iterations: int | None = None,
                 seed: int | None = None) -> np.ndarray:
    """Topic proportions for ``new_corpus`` (already mapped through the training vocabulary)."""
    if isinstance(trained, TopicModelOutput):
        trained = TrainedModel.from_output(trained)
    phi = np.asarray(trained.phi)
    K, V = phi.shape
    if new_corpus.V != V:
        raise ShortTMError(f"new corpus vocabulary has {new_corpus.V} words, model has {V}")
    cfg = trained.config
    iterations = DEFAULT_INFER_ITERATIONS if iterations is None else int(iterations)
    rs = RandomSource(cfg.seed if seed is None else seed)
    phi_before = phi.copy()
    x = trained.extras
    m = trained.model
    if m in ("LDA", "PTM"):
        theta = _token_foldin(new_corpus, phi, cfg.alpha, iterations, rs)
    elif m in ("GSDMM", "GPUDMM", "LFDMM"):
        theta = _doc_foldin(new_corpus, phi, x["topic_doc_counts"], cfg.alpha, iterations, rs)
    elif m == "GPUPDMM":
        theta = np.full((new_corpus.N, K), 1.0 / K)
        ck = np.asarray(x["topic_word_counts"], dtype=np.float64)
        for d, doc in enumerate(new_corpus.docs):
            if len(doc):
                # p(w|k) is phi itself: pass phi as counts with zero smoothing
                p = pdmm_doc_topic(doc, ck, phi, np.ones(K), cfg.alpha, 0.0)
                theta[d] = p / p.sum()
    elif m == "BTM":
        bt = extract_biterms(new_corpus, cfg.window_c)
        theta = btm_theta(bt, new_corpus.N, phi, np.asarray(x["topic_prior"]))
    elif m == "WNTM":
        theta = wntm_theta(new_corpus, np.asarray(x["word_topic"]))
    elif m == "SATM":
        theta = satm_theta(new_corpus, phi)
    else:
        raise ShortTMError(f"no fold-in for model {m}")
    empty = new_corpus.empty
    if empty.any():
        log.warning("%d documents without in-vocabulary tokens get uniform rows", int(empty.sum()))
        theta[empty] = 1.0 / K
    if not np.array_equal(phi, phi_before):
        raise ShortTMError("fold-in modified phi")
    return theta
