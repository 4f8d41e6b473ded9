"""Self-aggregation models: SATM and PTM."""

from __future__ import annotations

import math

import numpy as np

from ..errors import InvariantError
from ..sampling import normalize_log
from .base import TopicModel, check_equal, format_ints, smoothed_rows, uniform_rows


# ---------------------------------------------------------------- pseudo-doc features

def ptf_add(counts: dict, w, l, k):
    """Add one token to pseudo-doc ``l`` and topic ``k``; ``counts`` holds nlw, nlk, nl, nkw, nk."""
    counts["nlw"][l, w] += 1
    counts["nlk"][l, k] += 1
    counts["nl"][l] += 1
    counts["nkw"][k, w] += 1
    counts["nk"][k] += 1


def ptf_remove(counts: dict, w, l, k):
    counts["nlw"][l, w] -= 1
    counts["nlk"][l, k] -= 1
    counts["nl"][l] -= 1
    counts["nkw"][k, w] -= 1
    counts["nk"][k] -= 1
    if min(counts["nlw"][l, w], counts["nlk"][l, k], counts["nl"][l],
           counts["nkw"][k, w], counts["nk"][k]) < 0:
        raise InvariantError(f"negative pseudo-doc count at (l={l}, k={k}, w={w})")


# ---------------------------------------------------------------- SATM

def satm_pseudo_posterior(ws, nlw, nl, n_docs, floor=1e-300) -> np.ndarray:
    """p(l|d) under a mixture of unigrams over pseudo-docs, with zero ratios floored."""
    logfloor = math.log(floor)
    P = len(nl)
    lp = np.array([math.log(nl[l] / n_docs) if nl[l] > 0 else logfloor for l in range(P)])
    for w in ws:
        lp += [math.log(nlw[l, w] / nl[l]) if nlw[l, w] > 0 and nl[l] > 0 else logfloor
               for l in range(P)]
    return normalize_log(lp)


def satm_joint_conditional(w, pld_row, nlk, nl, nkw, nk, alpha, beta) -> np.ndarray:
    """P x K weights for a removed token."""
    K, V = nkw.shape
    return (pld_row[:, None] * ((nlk + alpha) / (nl + K * alpha)[:, None])
            * ((nkw[:, w] + beta) / (nk + V * beta))[None, :])


def satm_phi(nkw, nk, beta) -> np.ndarray:
    return smoothed_rows(nkw, nk, beta, nkw.shape[1] * beta)


def satm_theta(corpus, phi) -> np.ndarray:
    """Product of phi over the document's tokens, normalized over topics."""
    theta = uniform_rows(corpus.N, phi.shape[0])
    logphi = np.log(phi)
    for d, doc in enumerate(corpus.docs):
        if len(doc):
            theta[d] = normalize_log(logphi[:, doc].sum(axis=1))
    return theta


def satm_counts(doc_ptr, words, lt, zt, P, K, V):
    nlw = np.zeros((P, V), dtype=np.int64)
    np.add.at(nlw, (lt, words), 1)
    nlk = np.zeros((P, K), dtype=np.int64)
    np.add.at(nlk, (lt, zt), 1)
    nkw = np.zeros((K, V), dtype=np.int64)
    np.add.at(nkw, (zt, words), 1)
    return dict(nlw=nlw, nlk=nlk, nl=nlw.sum(axis=1), nkw=nkw, nk=nkw.sum(axis=1))


class SATM(TopicModel):
    name = "SATM"

    def initialize(self, rs):
        self.P = int(self.config.P_count)
        T = len(self.words)
        self.lt = rs.init.integers(0, self.P, T).astype(np.int64)
        self.zt = rs.init.integers(0, self.K, T).astype(np.int64)
        c = satm_counts(self.doc_ptr, self.words, self.lt, self.zt, self.P, self.K, self.V)
        self.nlw, self.nlk, self.nl, self.nkw, self.nk = (c[k] for k in ("nlw", "nlk", "nl", "nkw", "nk"))
        self.pld = np.zeros((self.corpus.N, self.P))

    def sweep(self, rs):
        self.kernels.satm_pseudo_posterior(self.doc_ptr, self.words, self.nlw, self.nl,
                                           self.corpus.N, self.config.satm_floor, self.pld)
        u = rs.tok_uniforms(len(self.words))
        self.kernels.satm_sweep(self.doc_ptr, self.words, self.lt, self.zt, self.pld, self.nlw,
                                self.nlk, self.nl, self.nkw, self.nk, self.alpha, self.beta, u)
        self.n_sweeps += 1

    def phi(self):
        return satm_phi(self.nkw, self.nk, self.beta)

    def theta(self):
        return satm_theta(self.corpus, self.phi())

    def assignment_lines(self):
        return [format_ints(self.zt[self.doc_ptr[d]:self.doc_ptr[d + 1]]) for d in range(self.corpus.N)]

    def check_invariants(self):
        c = satm_counts(self.doc_ptr, self.words, self.lt, self.zt, self.P, self.K, self.V)
        for key in ("nlw", "nlk", "nl", "nkw", "nk"):
            check_equal(key, getattr(self, key), c[key])
        check_equal("sum_k n_l^k", self.nlk.sum(axis=1), self.nl)


# ---------------------------------------------------------------- PTM

def ptm_doc_conditional(z_doc, nlk, ml, nl, alpha, lam, n_docs) -> np.ndarray:
    """Pseudo-doc weights for a document removed from its pseudo-doc.

    The doc-count numerator is smoothed by lam so empty pseudo-docs stay reachable.
    """
    P, K = nlk.shape
    lw = np.log((ml + lam) / ((n_docs - 1) + lam * P))
    seen: dict[int, int] = {}
    for k in z_doc:
        j = seen.get(int(k), 0)
        seen[int(k)] = j + 1
        lw = lw + np.log(nlk[:, k] + alpha + j)
    for i in range(len(z_doc)):
        lw = lw - np.log(nl + K * alpha + i)
    return normalize_log(lw)


def ptm_word_conditional(w, l, nlk, nkw, nk, alpha, beta) -> np.ndarray:
    V = nkw.shape[1]
    return (nlk[l] + alpha) * ((nkw[:, w] + beta) / (nk + V * beta))


def ptm_theta(ndk, nd, alpha) -> np.ndarray:
    return smoothed_rows(ndk, nd, alpha, ndk.shape[1] * alpha)


class PTM(TopicModel):
    name = "PTM"

    def initialize(self, rs):
        self.P = int(self.config.P_count)
        self.lam = float(self.config.lambda_ptm)
        self.active = ~self.corpus.empty
        N, T = self.corpus.N, len(self.words)
        self.ld = rs.init.integers(0, self.P, N).astype(np.int64)
        self.ld[~self.active] = -1
        self.zt = rs.init.integers(0, self.K, T).astype(np.int64)
        self._recount()

    def _counts(self):
        N = self.corpus.N
        doc_of = np.repeat(np.arange(N), self.corpus.lengths)
        lt = self.ld[doc_of]
        nlk = np.zeros((self.P, self.K), dtype=np.int64)
        np.add.at(nlk, (lt, self.zt), 1)
        nkw = np.zeros((self.K, self.V), dtype=np.int64)
        np.add.at(nkw, (self.zt, self.words), 1)
        ndk = np.zeros((N, self.K), dtype=np.int64)
        np.add.at(ndk, (doc_of, self.zt), 1)
        ml = np.bincount(self.ld[self.active], minlength=self.P).astype(np.int64)
        return dict(nlk=nlk, ml=ml, nl=nlk.sum(axis=1), nkw=nkw, nk=nkw.sum(axis=1), ndk=ndk)

    def _recount(self):
        for key, val in self._counts().items():
            setattr(self, key, val)

    def sweep(self, rs):
        u_doc = rs.doc_uniforms(self.corpus.N)
        u_tok = rs.tok_uniforms(len(self.words))
        self.kernels.ptm_sweep(self.doc_ptr, self.words, self.ld, self.zt, self.ndk, self.nlk,
                               self.ml, self.nl, self.nkw, self.nk, self.alpha, self.beta,
                               self.lam, u_doc, u_tok)
        self.n_sweeps += 1

    def phi(self):
        return smoothed_rows(self.nkw, self.nk, self.beta, self.V * self.beta)

    def theta(self):
        return ptm_theta(self.ndk, self.corpus.lengths, self.alpha)

    def assignment_lines(self):
        return [format_ints(self.zt[self.doc_ptr[d]:self.doc_ptr[d + 1]]) for d in range(self.corpus.N)]

    def extras(self):
        return {"pseudo_doc": self.ld.copy()}

    def check_invariants(self):
        for key, val in self._counts().items():
            check_equal(key, getattr(self, key), val)
        if self.ml.sum() != int(self.active.sum()):
            raise InvariantError("sum of m_l differs from the number of documents")
