"""Global word co-occurrence models: BTM and WNTM."""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, replace

import numpy as np
import scipy.sparse as sp

from ..corpus import Corpus
from ..errors import InvariantError
from .base import TopicModel, check_equal, format_ints, normalize_rows, uniform_rows
from .lda import LDA

log = logging.getLogger(__name__)


# ---------------------------------------------------------------- BTM

@dataclass(frozen=True)
class Biterms:
    w1: np.ndarray
    w2: np.ndarray
    doc: np.ndarray

    def __len__(self):
        return len(self.w1)

    def pairs(self) -> list[tuple[int, int]]:
        return list(zip(self.w1.tolist(), self.w2.tolist()))


def extract_biterms(corpus: Corpus, window_c: int | None = None) -> Biterms:
    """Unordered token-position pairs inside a window of ``window_c`` tokens.

    ``None`` (or a document no longer than the window) pairs every two
    positions of the document. Repeated words at different positions form
    biterms too.
    """
    if window_c is not None and window_c < 2:
        raise ValueError(f"window_c must be >= 2, got {window_c}")
    w1, w2, dd = [], [], []
    for d, doc in enumerate(corpus.docs):
        n = len(doc)
        if n < 2:
            continue
        i, j = np.triu_indices(n, k=1)
        if window_c is not None and n > window_c:
            keep = (j - i) < window_c
            i, j = i[keep], j[keep]
        w1.append(doc[i])
        w2.append(doc[j])
        dd.append(np.full(len(i), d, dtype=np.int64))
    if not w1:
        log.warning("corpus yields no biterms")
        e = np.zeros(0, dtype=np.int64)
        return Biterms(e, e.copy(), e.copy())
    return Biterms(np.concatenate(w1).astype(np.int64), np.concatenate(w2).astype(np.int64),
                   np.concatenate(dd))


def btm_counts(bt: Biterms, z, K, V):
    nk = np.bincount(z, minlength=K).astype(np.int64)
    nkw = np.zeros((K, V), dtype=np.int64)
    np.add.at(nkw, (z, bt.w1), 1)
    np.add.at(nkw, (z, bt.w2), 1)
    return nk, nkw


def btm_conditional(w1, w2, nk, nkw, alpha, beta) -> np.ndarray:
    """Topic weights for a removed biterm.

    ``nk`` counts biterms, so the topic's word total is 2 * nk.
    """
    V = nkw.shape[1]
    return ((nk + alpha) * (nkw[:, w1] + beta) * (nkw[:, w2] + beta)
            / ((2 * nk + V * beta + 1) * (2 * nk + V * beta)))


def btm_phi(nkw, nk, beta) -> np.ndarray:
    V = nkw.shape[1]
    return (nkw + beta) / (2 * nk[:, None] + V * beta)


def btm_topic_prior(nk, alpha) -> np.ndarray:
    return (nk + alpha) / (nk.sum() + len(nk) * alpha)


def btm_theta(bt: Biterms, N, phi, prior) -> np.ndarray:
    """Average over each document's biterms of p(z|b); no biterms gives a uniform row."""
    K = phi.shape[0]
    theta = uniform_rows(N, K)
    if len(bt) == 0:
        return theta
    pzb = prior[None, :] * phi[:, bt.w1].T * phi[:, bt.w2].T
    pzb /= pzb.sum(axis=1, keepdims=True)
    acc = np.zeros((N, K))
    np.add.at(acc, bt.doc, pzb)
    nb = np.bincount(bt.doc, minlength=N)
    has = nb > 0
    theta[has] = acc[has] / nb[has, None]
    return theta


class BTM(TopicModel):
    name = "BTM"

    def initialize(self, rs):
        self.biterms = extract_biterms(self.corpus, self.config.window_c)
        self.z = rs.init.integers(0, self.K, len(self.biterms)).astype(np.int64)
        self.nk, self.nkw = btm_counts(self.biterms, self.z, self.K, self.V)

    def sweep(self, rs):
        u = rs.tok_uniforms(len(self.biterms))
        self.kernels.btm_sweep(self.biterms.w1, self.biterms.w2, self.z, self.nk, self.nkw,
                               self.alpha, self.beta, u)
        self.n_sweeps += 1

    def phi(self):
        return btm_phi(self.nkw, self.nk, self.beta)

    def theta(self):
        return btm_theta(self.biterms, self.corpus.N, self.phi(), btm_topic_prior(self.nk, self.alpha))

    def assignment_lines(self):
        ptr = np.searchsorted(self.biterms.doc, np.arange(self.corpus.N + 1))
        return [format_ints(self.z[ptr[d]:ptr[d + 1]]) for d in range(self.corpus.N)]

    def extras(self):
        return {"topic_prior": btm_topic_prior(self.nk, self.alpha), "biterm_counts": self.nk.copy()}

    def check_invariants(self):
        nk, nkw = btm_counts(self.biterms, self.z, self.K, self.V)
        check_equal("n_k", self.nk, nk)
        check_equal("n_k^w", self.nkw, nkw)
        check_equal("sum_w n_k^w", self.nkw.sum(axis=1), 2 * self.nk)
        if self.nk.sum() != len(self.biterms):
            raise InvariantError("biterm count not conserved")


# ---------------------------------------------------------------- WNTM

@dataclass(frozen=True)
class WordNetwork:
    """Symmetric weighted co-occurrence graph without self-loops (CSR adjacency)."""

    adjacency: sp.csr_matrix

    @property
    def V(self) -> int:
        return self.adjacency.shape[0]

    def weight(self, a: int, b: int) -> int:
        return int(self.adjacency[a, b])

    def neighbors(self, v: int):
        row = self.adjacency.getrow(v)
        return row.indices, row.data

    @property
    def degree(self) -> np.ndarray:
        return np.asarray(self.adjacency.sum(axis=1)).ravel()

    @property
    def total_weight(self) -> int:
        return int(self.adjacency.sum()) // 2


def build_word_network(corpus: Corpus, window_c: int = 10) -> WordNetwork:
    """Slide a window of ``window_c`` tokens one position at a time.

    Windows start at every position and are cut at the document end. Each
    window adds 1 to every pair of distinct words it contains.
    """
    if window_c < 2:
        raise ValueError(f"window_c must be >= 2, got {window_c}")
    counts: Counter = Counter()
    for doc in corpus.docs:
        toks = doc.tolist()
        n = len(toks)
        for p in range(n):
            uniq = sorted(set(toks[p:min(p + window_c, n)]))
            for a in range(len(uniq)):
                for b in range(a + 1, len(uniq)):
                    counts[(uniq[a], uniq[b])] += 1
    V = corpus.V
    if counts:
        keys = np.array(list(counts.keys()), dtype=np.int64)
        vals = np.array(list(counts.values()), dtype=np.int64)
        rows = np.concatenate([keys[:, 0], keys[:, 1]])
        cols = np.concatenate([keys[:, 1], keys[:, 0]])
        data = np.concatenate([vals, vals])
    else:
        rows = cols = data = np.zeros(0, dtype=np.int64)
    adj = sp.csr_matrix((data, (rows, cols)), shape=(V, V), dtype=np.int64)
    adj.sort_indices()
    return WordNetwork(adj)


def network_to_pseudodocs(network: WordNetwork, vocab) -> tuple[Corpus, np.ndarray]:
    """One pseudo-document per vertex with neighbors, each neighbor repeated by edge weight.

    Returns the pseudo-corpus and the vertex (word id) owning each pseudo-doc.
    """
    adj = network.adjacency
    docs, owners = [], []
    for v in range(network.V):
        s, e = adj.indptr[v], adj.indptr[v + 1]
        if s == e:
            continue
        docs.append(np.repeat(adj.indices[s:e], adj.data[s:e]).astype(np.int64))
        owners.append(v)
    return Corpus(tuple(docs), vocab), np.array(owners, dtype=np.int64)


def wntm_word_topic(ndk, owners, V, alpha) -> np.ndarray:
    """Per-word topic proportions from pseudo-doc counts; uniform for words without one."""
    K = ndk.shape[1]
    psi = np.full((V, K), 1.0 / K)
    if len(owners):
        psi[owners] = (ndk + alpha) / (ndk.sum(axis=1, keepdims=True) + K * alpha)
    return psi


def wntm_phi(psi) -> np.ndarray:
    return normalize_rows(psi.T.copy())


def wntm_theta(corpus: Corpus, psi) -> np.ndarray:
    """theta_d = sum over words of psi_w * n_d^w / n_d, row-normalized."""
    K = psi.shape[1]
    theta = uniform_rows(corpus.N, K)
    for d, doc in enumerate(corpus.docs):
        if len(doc) == 0:
            continue
        ws, cnt = np.unique(doc, return_counts=True)
        row = (psi[ws] * (cnt / len(doc))[:, None]).sum(axis=0)
        theta[d] = row / row.sum()
    return theta


def wntm_train(pseudo: Corpus, config, rs, backend=None, iterations=None) -> LDA:
    """Run LDA sweeps over the pseudo-documents."""
    lda = LDA(pseudo, config, backend=backend)
    lda.initialize(rs)
    for _ in range(config.iterations if iterations is None else iterations):
        lda.sweep(rs)
    return lda


class WNTM(TopicModel):
    name = "WNTM"

    def initialize(self, rs):
        self.network = build_word_network(self.corpus, self.config.window_c)
        self.pseudo, self.owners = network_to_pseudodocs(self.network, self.corpus.vocab)
        if self.pseudo.N == 0:
            log.warning("word network is empty; every word keeps uniform topic proportions")
        cfg = replace(self.config, model="LDA")
        self.lda = LDA(self.pseudo, cfg, backend=self.kernels)
        self.lda.initialize(rs)

    def sweep(self, rs):
        self.lda.sweep(rs)
        self.n_sweeps += 1

    def word_topic(self):
        return wntm_word_topic(self.lda.ndk, self.owners, self.V, self.alpha)

    def phi(self):
        return wntm_phi(self.word_topic())

    def theta(self):
        return wntm_theta(self.corpus, self.word_topic())

    def assignment_lines(self):
        best = self.word_topic().argmax(axis=1)
        return [format_ints(best[doc]) for doc in self.corpus.docs]

    def extras(self):
        return {"word_topic": self.word_topic()}

    def check_invariants(self):
        self.lda.check_invariants()
        if self.pseudo.n_tokens != 2 * self.network.total_weight:
            raise InvariantError("pseudo-document mass differs from twice the edge weight")
