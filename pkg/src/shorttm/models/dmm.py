"""Dirichlet multinomial mixture family: GSDMM, LF-DMM, GPU-DMM, GPU-PDMM.

The module-level functions are direct, readable evaluations of each
conditional; the model classes run the same arithmetic through the sweep
kernels and the tests hold the two against each other.
"""

from __future__ import annotations

import itertools
import logging
import math

import numpy as np
from scipy.optimize import minimize

from ..embeddings import PromotionIndex, build_promotion_index
from ..errors import ConfigError, InvariantError
from ..sampling import categorical_draw, normalize_log
from .base import (PROMOTED_ATOL, TopicModel, check_close, check_equal, check_nonneg, format_ints,
                   smoothed_rows, uniform_rows)

log = logging.getLogger(__name__)

LOG_SPACE_AFTER = 20


# ---------------------------------------------------------------- topic features

def tf_add_doc(nkw, mk, nk, ws, k):
    np.add.at(nkw[k], ws, 1)
    mk[k] += 1
    nk[k] += len(ws)


def tf_remove_doc(nkw, mk, nk, ws, k):
    np.subtract.at(nkw[k], ws, 1)
    mk[k] -= 1
    nk[k] -= len(ws)
    if mk[k] < 0 or nk[k] < 0 or (len(ws) and nkw[k, ws].min() < 0):
        raise InvariantError(f"negative topic feature count for topic {k}")


def dmm_counts(doc_ptr, words, zd, K, V, dtype=np.int64):
    lengths = np.diff(doc_ptr)
    active = lengths > 0
    doc_of = np.repeat(np.arange(len(lengths)), lengths)
    nkw = np.zeros((K, V), dtype=dtype)
    np.add.at(nkw, (zd[doc_of], words), 1)
    mk = np.bincount(zd[active], minlength=K).astype(np.int64)
    return mk, nkw, nkw.sum(axis=1)


# ---------------------------------------------------------------- GSDMM

def gsdmm_conditional(ws, mk, nkw, nk, alpha, beta, n_docs) -> np.ndarray:
    """Topic weights for a document (given as word ids) removed from the counts.

    ``n_docs`` is the number of non-empty documents including this one.
    Long documents are scored in log space and returned rescaled to max 1.
    """
    K, V = nkw.shape
    prior = (mk + alpha) / ((n_docs - 1) + K * alpha)
    seen: dict[int, int] = {}
    terms = []
    for i, w in enumerate(ws):
        j = seen.get(int(w), 0)
        seen[int(w)] = j + 1
        terms.append((nkw[:, w] + beta + j) / (nk + V * beta + i))
    if len(ws) <= LOG_SPACE_AFTER:
        p = prior
        for t in terms:
            p = p * t
        return p
    lp = np.log(prior)
    for t in terms:
        lp = lp + np.log(t)
    return np.exp(lp - lp.max())


gpudmm_conditional = gsdmm_conditional


def gsdmm_phi(nkw, nk, beta) -> np.ndarray:
    return smoothed_rows(nkw, nk, beta, nkw.shape[1] * beta)


gpudmm_phi = gsdmm_phi


def dmm_theta(doc_weights, N, K, active) -> np.ndarray:
    """Rows are the normalized document conditionals; empty docs get uniform rows."""
    theta = uniform_rows(N, K)
    for d in np.flatnonzero(active):
        p = doc_weights(d)
        theta[d] = p / p.sum()
    return theta


# ---------------------------------------------------------------- LF-DMM

def lf_softmax(tau_k, vectors, has_vector=None) -> np.ndarray:
    """Softmax of tau_k . omega_w over covered words; 0 for words without a vector."""
    out = np.zeros(vectors.shape[0])
    idx = np.arange(vectors.shape[0]) if has_vector is None else np.flatnonzero(has_vector)
    if len(idx) == 0:
        return out
    logits = vectors[idx] @ tau_k
    out[idx] = normalize_log(logits)
    return out


def lfdmm_objective_grad(tau_k, F_k, vectors, mu_reg):
    """Negative regularized log-likelihood of the latent-feature counts and its gradient.

    ``vectors`` and ``F_k`` cover the same words (pass only words with vectors).
    """
    logits = vectors @ tau_k
    m = logits.max()
    logz = m + math.log(np.exp(logits - m).sum())
    sigma = np.exp(logits - logz)
    ftot = F_k.sum()
    L = -(F_k @ logits) + ftot * logz + mu_reg * (tau_k @ tau_k)
    grad = -(vectors.T @ F_k) + ftot * (vectors.T @ sigma) + 2.0 * mu_reg * tau_k
    return float(L), grad


def optimize_topic_vectors(tau, F, vectors, has_vector, mu_reg, max_steps=20) -> np.ndarray:
    """Minimize each topic's objective with L-BFGS-B, keeping only improving results."""
    idx = np.flatnonzero(has_vector)
    X = vectors[idx]
    out = tau.copy()
    for k in range(tau.shape[0]):
        Fk = F[k, idx].astype(np.float64)
        fun = lambda t: lfdmm_objective_grad(t, Fk, X, mu_reg)  # noqa: E731
        L0 = fun(tau[k])[0]
        res = minimize(fun, tau[k], jac=True, method="L-BFGS-B", options={"maxiter": max_steps})
        if not (np.isfinite(res.fun) and np.all(np.isfinite(res.x))) or not np.isfinite(L0):
            log.warning("non-finite topic vector objective for topic %d, reset to zero", k)
            out[k] = 0.0
        elif res.fun < L0:
            out[k] = res.x
    return out


def lfdmm_doc_conditional(ws, mk, nkw, nk, sigma, lam, alpha, beta, n_docs) -> np.ndarray:
    """Topic weights for a removed document under the two-path word model.

    The Dirichlet path counts repeated words incrementally (as in GSDMM), so
    lam = 0 gives exactly the GSDMM conditional.
    """
    K, V = nkw.shape
    prior = (mk + alpha) / ((n_docs - 1) + K * alpha)
    seen: dict[int, int] = {}
    terms = []
    for i, w in enumerate(ws):
        j = seen.get(int(w), 0)
        seen[int(w)] = j + 1
        terms.append((1.0 - lam) * ((nkw[:, w] + beta + j) / (nk + V * beta + i)) + lam * sigma[:, w])
    if len(ws) <= LOG_SPACE_AFTER:
        p = prior
        for t in terms:
            p = p * t
        return p
    lp = np.log(prior)
    for t in terms:
        lp = lp + np.log(t)
    return np.exp(lp - lp.max())


def lfdmm_indicator_weights(w, k, nkw, nk, sigma, lam, beta):
    V = nkw.shape[1]
    return ((1.0 - lam) * ((nkw[k, w] + beta) / (nk[k] + V * beta)), lam * sigma[k, w])


def lfdmm_indicator(w, k, nkw, nk, sigma, lam, beta, u) -> int:
    return categorical_draw(lfdmm_indicator_weights(w, k, nkw, nk, sigma, lam, beta), u)


# ---------------------------------------------------------------- GPU-DMM

def gpu_gate_prob(w, k, mk, nkw, nk, alpha, beta) -> float:
    """Ratio p(z=k|w) / max_j p(z=j|w) from current counts."""
    K, V = nkw.shape
    prior = (mk + alpha) / (mk.sum() + 1 + K * alpha)
    pw = prior * ((nkw[:, w] + beta) / (nk + V * beta))
    return float(pw[k] / pw.max())


def gpu_gate(w, k, mk, nkw, nk, alpha, beta, u) -> int:
    return 1 if u < gpu_gate_prob(w, k, mk, nkw, nk, alpha, beta) else 0


def promoted(nkw, gkw, nk, gk, mu):
    """Promoted counts n + mu * g as floats (g counts promotion hits)."""
    return nkw + mu * gkw, nk + mu * gk


def _gpu_update(nkw, gkw, nk, gk, ws, gates, k, index: PromotionIndex, sign):
    for w, g in zip(ws, gates):
        nkw[k, w] += sign
        nk[k] += sign
        if g:
            nb = index.neighbors(w)
            gkw[k, nb] += sign
            gk[k] += sign * len(nb)


def gpu_tf_add(nkw, gkw, nk, gk, mk, ws, gates, k, index):
    """Add a document; a gated token also promotes its similar words by mu."""
    _gpu_update(nkw, gkw, nk, gk, ws, gates, k, index, 1)
    mk[k] += 1


def gpu_tf_remove(nkw, gkw, nk, gk, mk, ws, gates, k, index):
    _gpu_update(nkw, gkw, nk, gk, ws, gates, k, index, -1)
    mk[k] -= 1
    if mk[k] < 0 or nk[k] < 0 or gk[k] < 0 or nkw[k].min() < 0 or gkw[k].min() < 0:
        raise InvariantError(f"negative promoted count for topic {k}")


def promoted_counts(doc_ptr, words, token_topic, gates, K, V, index: PromotionIndex):
    """Recompute (n_k^w, promotion hits g_k^w) from token topics and gates."""
    nkw = np.zeros((K, V), dtype=np.int64)
    np.add.at(nkw, (token_topic, words), 1)
    gkw = np.zeros((K, V), dtype=np.int64)
    for t in np.flatnonzero(gates):
        gkw[token_topic[t], index.neighbors(words[t])] += 1
    return nkw, gkw


# ---------------------------------------------------------------- GPU-PDMM

def truncated_poisson_pmf(lam, varsigma) -> np.ndarray:
    t = np.arange(1, varsigma + 1)
    logp = t * math.log(lam) - np.array([math.lgamma(x + 1) for x in t])
    return normalize_log(logp)


def pdmm_sample_td(rng, lam, varsigma) -> int:
    return 1 + categorical_draw(truncated_poisson_pmf(lam, varsigma), rng)


def pdmm_word_topic_weights(w, Zd, nkw, nk, beta) -> np.ndarray:
    V = nkw.shape[1]
    Zd = list(Zd)
    return np.array([(1.0 / len(Zd)) * ((nkw[k, w] + beta) / (nk[k] + V * beta)) for k in Zd])


def pdmm_doc_topic(ws, ck, nkw, nk, alpha, beta) -> np.ndarray:
    """p(z|d) = sum over tokens of p(z|w) / n_d, with p(z) from word-topic counts."""
    K, V = nkw.shape
    prior = (ck + alpha) / (ck.sum() + K * alpha)
    score = np.zeros(K)
    for w in ws:
        pw = prior * ((nkw[:, w] + beta) / (nk + V * beta))
        score += pw / pw.sum() / len(ws)
    return score


def pdmm_candidates(ws, ck, nkw, nk, alpha, beta, M) -> list[int]:
    score = pdmm_doc_topic(ws, ck, nkw, nk, alpha, beta)
    return sorted(range(len(score)), key=lambda k: (-score[k], k))[:M]


def pdmm_subsets(M, varsigma):
    """All subsets of candidate positions with size 1..varsigma, padded with -1."""
    combos = [c for s in range(1, varsigma + 1) for c in itertools.combinations(range(M), s)]
    subsets = np.full((len(combos), varsigma), -1, dtype=np.int64)
    for i, c in enumerate(combos):
        subsets[i, :len(c)] = c
    sizes = np.array([len(c) for c in combos], dtype=np.int64)
    return subsets, sizes


def pdmm_subset_assignment(ws, z_doc, zc, nkw, nk, beta) -> list[int]:
    """Tokens keep their topic if it is in the subset, else take the subset's most likely topic."""
    V = nkw.shape[1]
    out = []
    for w, k in zip(ws, z_doc):
        if k in zc:
            out.append(int(k))
            continue
        scores = [((nkw[j, w] + beta) / (nk[j] + V * beta), -j) for j in zc]
        out.append(-max(scores)[1])
    return out


def pdmm_subset_log_score(ws, assign, zc, ck, nkw, nk, alpha, beta, lam) -> float:
    """Log weight of topic set ``zc`` for a document removed from the counts."""
    K, V = nkw.shape
    nd, size = len(ws), len(zc)
    C = ck.sum()
    lw = size * math.log(lam) - nd * math.log(size)
    lw += sum(math.log(ck[k] + alpha) for k in zc)
    lw -= sum(math.log(C + K * alpha + i) for i in range(size))
    seen: dict[tuple, int] = {}
    for w, k in zip(ws, assign):
        j = seen.get((int(w), k), 0)
        seen[(int(w), k)] = j + 1
        lw += math.log(nkw[k, w] + beta + j)
    for k in zc:
        nkd = sum(1 for a in assign if a == k)
        lw -= sum(math.log(nk[k] + V * beta + j) for j in range(nkd))
    return lw


def pdmm_sample_Zd(ws, z_doc, cand, ck, nkw, nk, alpha, beta, lam, varsigma, u):
    """Draw a topic set over subsets of ``cand``; returns (subset, token assignment, probs)."""
    subsets, sizes = pdmm_subsets(len(cand), varsigma)
    options = []
    for row, s in zip(subsets, sizes):
        zc = [cand[j] for j in row[:s]]
        a = pdmm_subset_assignment(ws, z_doc, zc, nkw, nk, beta)
        options.append((zc, a, pdmm_subset_log_score(ws, a, zc, ck, nkw, nk, alpha, beta, lam)))
    probs = normalize_log([o[2] for o in options])
    i = categorical_draw(probs, u)
    return options[i][0], options[i][1], probs


# ---------------------------------------------------------------- models

class GSDMM(TopicModel):
    name = "GSDMM"

    def _setup(self):
        self.occ = self.corpus.occurrence_index()
        self.active = ~self.corpus.empty
        self.n_active = int(self.active.sum())

    def initialize(self, rs):
        self._setup()
        self.zd = rs.init.integers(0, self.K, self.corpus.N).astype(np.int64)
        self.zd[~self.active] = -1
        self.mk, self.nkw, self.nk = dmm_counts(self.doc_ptr, self.words, self.zd, self.K, self.V)

    def sweep(self, rs):
        u = rs.doc_uniforms(self.corpus.N)
        self.kernels.dmm_sweep(self.doc_ptr, self.words, self.occ, self.zd, self.mk, self.nkw,
                               self.nk, self.alpha, self.beta, u)
        self.n_sweeps += 1

    def _denom0(self):
        return (self.n_active - 1) + self.K * self.alpha

    def doc_weights(self, d):
        s, e = self.doc_ptr[d], self.doc_ptr[d + 1]
        ws = self.words[s:e]
        k = self.zd[d]
        tf_remove_doc(self.nkw, self.mk, self.nk, ws, k)
        try:
            return self.kernels.dmm_weights(ws, self.occ[s:e], self.mk, self.nkw, self.nk,
                                            self.alpha, self.beta, self._denom0())
        finally:
            tf_add_doc(self.nkw, self.mk, self.nk, ws, k)

    def phi(self):
        return gsdmm_phi(self.nkw, self.nk, self.beta)

    def theta(self):
        return dmm_theta(self.doc_weights, self.corpus.N, self.K, self.active)

    def assignment_lines(self):
        return [str(int(k)) for k in self.zd]

    def extras(self):
        return {"topic_doc_counts": self.mk.copy()}

    def check_invariants(self):
        mk, nkw, nk = dmm_counts(self.doc_ptr, self.words, self.zd, self.K, self.V)
        check_equal("m_k", self.mk, mk)
        check_equal("n_k^w", self.nkw, nkw)
        check_equal("n_k", self.nk, nk)
        if self.mk.sum() != self.n_active:
            raise InvariantError("sum of m_k differs from the number of assigned documents")


class LFDMM(GSDMM):
    name = "LFDMM"
    uses_embeddings = True

    def initialize(self, rs):
        if self.embeddings is None:
            raise ConfigError("LF-DMM needs word embeddings")
        super().initialize(rs)
        self.lam = float(self.config.lambda_mix)
        self.ind = np.zeros(len(self.words), dtype=np.int8)
        self.fkw = np.zeros((self.K, self.V), dtype=np.int64)
        self.tau = np.zeros((self.K, self.embeddings.dim))
        self._refresh_sigma()

    def _refresh_sigma(self):
        self.sigma = np.vstack([lf_softmax(t, self.embeddings.vectors, self.embeddings.has_vector)
                                for t in self.tau])

    @property
    def in_latent_phase(self) -> bool:
        return self.n_sweeps >= self.config.baseline_iterations

    def sweep(self, rs):
        if not self.in_latent_phase:
            super().sweep(rs)
            return
        u_doc = rs.doc_uniforms(self.corpus.N)
        u_tok = rs.tok_uniforms(len(self.words))
        self.kernels.lfdmm_sweep(self.doc_ptr, self.words, self.occ, self.zd, self.ind, self.mk,
                                 self.nkw, self.nk, self.fkw, self.sigma, self.lam, self.alpha,
                                 self.beta, u_doc, u_tok)
        if self.fkw.any() or self.tau.any():
            self.tau = optimize_topic_vectors(self.tau, self.fkw, self.embeddings.vectors,
                                              self.embeddings.has_vector, self.config.mu_reg,
                                              self.config.optimizer_steps)
            self._refresh_sigma()
        self.n_sweeps += 1

    def doc_weights(self, d):
        s, e = self.doc_ptr[d], self.doc_ptr[d + 1]
        k = self.zd[d]
        ws = self.words[s:e][self.ind[s:e] == 0]
        self.nkw[k] -= np.bincount(ws, minlength=self.V)
        self.nk[k] -= len(ws)
        self.mk[k] -= 1
        try:
            return self.kernels.lfdmm_weights(self.words[s:e], self.occ[s:e], self.mk, self.nkw,
                                              self.nk, self.sigma, self.lam, self.alpha, self.beta,
                                              self._denom0())
        finally:
            self.nkw[k] += np.bincount(ws, minlength=self.V)
            self.nk[k] += len(ws)
            self.mk[k] += 1

    def phi(self):
        return (1.0 - self.lam) * gsdmm_phi(self.nkw, self.nk, self.beta) + self.lam * self.sigma

    def extras(self):
        return {"topic_doc_counts": self.mk.copy(), "tau": self.tau.copy()}

    def check_invariants(self):
        tz = self.zd[np.repeat(np.arange(self.corpus.N), self.corpus.lengths)]
        dir_ = self.ind == 0
        nkw = np.zeros((self.K, self.V), dtype=np.int64)
        np.add.at(nkw, (tz[dir_], self.words[dir_]), 1)
        fkw = np.zeros((self.K, self.V), dtype=np.int64)
        np.add.at(fkw, (tz[~dir_], self.words[~dir_]), 1)
        check_equal("n_k^w", self.nkw, nkw)
        check_equal("n_k", self.nk, nkw.sum(axis=1))
        check_equal("F_k^w", self.fkw, fkw)
        check_equal("m_k", self.mk, np.bincount(self.zd[self.active], minlength=self.K))
        if int(self.ind.sum()) != int(self.fkw.sum()):
            raise InvariantError("indicator total differs from F counts")
        if self.ind[~self.embeddings.has_vector[self.words]].any():
            raise InvariantError("latent-feature path used for a word without a vector")


class GPUDMM(GSDMM):
    name = "GPUDMM"
    uses_embeddings = True

    def __init__(self, corpus, config, embeddings=None, backend=None, promotion=None):
        super().__init__(corpus, config, embeddings, backend)
        self.promotion = promotion

    def _build_promotion(self):
        if self.promotion is None:
            if self.embeddings is None:
                raise ConfigError(f"{self.name} needs word embeddings")
            self.promotion = build_promotion_index(self.embeddings, self.config.epsilon,
                                                   self.config.mu_promote)

    def initialize(self, rs):
        self._build_promotion()
        self._setup()
        self.zd = rs.init.integers(0, self.K, self.corpus.N).astype(np.int64)
        self.zd[~self.active] = -1
        self.gate = np.zeros(len(self.words), dtype=np.int8)
        self.mk, self.nkw, self.nk = dmm_counts(self.doc_ptr, self.words, self.zd, self.K, self.V)
        self.gkw = np.zeros_like(self.nkw)
        self.gk = np.zeros_like(self.nk)

    @property
    def mu(self) -> float:
        return self.promotion.mu_promote

    def promoted(self):
        return promoted(self.nkw, self.gkw, self.nk, self.gk, self.mu)

    def sweep(self, rs):
        u_doc = rs.doc_uniforms(self.corpus.N)
        u_tok = rs.tok_uniforms(len(self.words))
        p = self.promotion
        self.kernels.gpudmm_sweep(self.doc_ptr, self.words, self.occ, self.zd, self.gate, self.mk,
                                  self.nkw, self.gkw, self.nk, self.gk, p.ptr, p.idx, self.mu,
                                  self.alpha, self.beta, u_doc, u_tok)
        self.n_sweeps += 1

    def doc_weights(self, d):
        s, e = self.doc_ptr[d], self.doc_ptr[d + 1]
        ws, gs, k = self.words[s:e], self.gate[s:e], self.zd[d]
        gpu_tf_remove(self.nkw, self.gkw, self.nk, self.gk, self.mk, ws, gs, k, self.promotion)
        try:
            return self.kernels.gpudmm_weights(ws, self.occ[s:e], self.mk, self.nkw, self.gkw,
                                               self.nk, self.gk, self.mu, self.alpha, self.beta,
                                               self._denom0())
        finally:
            gpu_tf_add(self.nkw, self.gkw, self.nk, self.gk, self.mk, ws, gs, k, self.promotion)

    def phi(self):
        nkw, nk = self.promoted()
        return gpudmm_phi(nkw, nk, self.beta)

    def _check_promoted(self, token_topic):
        nkw, gkw = promoted_counts(self.doc_ptr, self.words, token_topic, self.gate, self.K,
                                   self.V, self.promotion)
        check_equal("n_k^w", self.nkw, nkw)
        check_equal("promotion hits g_k^w", self.gkw, gkw)
        check_equal("n_k", self.nk, nkw.sum(axis=1))
        check_equal("g_k", self.gk, gkw.sum(axis=1))
        pkw, pk = self.promoted()
        check_nonneg("promoted n_k^w", pkw, PROMOTED_ATOL)
        check_close("promoted n_k", pk, pkw.sum(axis=1), atol=PROMOTED_ATOL * max(1.0, float(pk.max(initial=0.0))))

    def check_invariants(self):
        tz = self.zd[np.repeat(np.arange(self.corpus.N), self.corpus.lengths)]
        self._check_promoted(tz)
        check_equal("m_k", self.mk, np.bincount(self.zd[self.active], minlength=self.K))


class GPUPDMM(GPUDMM):
    name = "GPUPDMM"

    def initialize(self, rs):
        self._build_promotion()
        self._setup()
        cfg = self.config
        self.varsigma, self.M = int(cfg.varsigma), int(cfg.M_top)
        if self.varsigma > 64:
            raise ConfigError("varsigma above 64 is not supported")
        self.lam_pois = float(cfg.lambda_poisson)
        self.prev_same = self.corpus.previous_same_word()
        self.subsets, self.ssize = pdmm_subsets(self.M, self.varsigma)
        N, T = self.corpus.N, len(self.words)
        self.td = np.zeros(N, dtype=np.int64)
        self.Zd = np.full((N, self.varsigma), -1, dtype=np.int64)
        self.zw = np.zeros(T, dtype=np.int64)
        self.gate = np.zeros(T, dtype=np.int8)
        pmf = truncated_poisson_pmf(self.lam_pois, self.varsigma)
        for d in np.flatnonzero(self.active):
            t = 1 + categorical_draw(pmf, rs.init)
            Z = rs.init.choice(self.K, size=t, replace=False)
            self.td[d] = t
            self.Zd[d, :t] = Z
            s, e = self.doc_ptr[d], self.doc_ptr[d + 1]
            self.zw[s:e] = Z[rs.init.integers(0, t, e - s)]
        self.nkw = np.zeros((self.K, self.V), dtype=np.int64)
        np.add.at(self.nkw, (self.zw, self.words), 1)
        self.nk = self.nkw.sum(axis=1)
        self.gkw = np.zeros_like(self.nkw)
        self.gk = np.zeros_like(self.nk)

    @property
    def ck(self) -> np.ndarray:
        """Words per topic (unpromoted)."""
        return self.nk

    def sweep(self, rs):
        u_doc = rs.doc_uniforms(self.corpus.N)
        u_tok = rs.tok_uniforms(len(self.words), 2)
        p = self.promotion
        self.kernels.pdmm_sweep(self.doc_ptr, self.words, self.prev_same, self.zw, self.gate,
                                self.Zd, self.td, self.nkw, self.gkw, self.nk, self.gk, p.ptr,
                                p.idx, self.mu, self.alpha, self.beta, self.lam_pois, self.subsets,
                                self.ssize, self.M, u_doc, u_tok)
        self.n_sweeps += 1

    def theta(self):
        theta = uniform_rows(self.corpus.N, self.K)
        nkw, nk = self.promoted()
        for d in np.flatnonzero(self.active):
            p = pdmm_doc_topic(self.doc_slice(d), self.ck, nkw, nk, self.alpha, self.beta)
            theta[d] = p / p.sum()
        return theta

    def assignment_lines(self):
        return [format_ints(self.zw[self.doc_ptr[d]:self.doc_ptr[d + 1]]) for d in range(self.corpus.N)]

    def extras(self):
        return {"topic_word_counts": self.ck.copy()}

    def check_invariants(self):
        self._check_promoted(self.zw)
        for d in np.flatnonzero(self.active):
            t = self.td[d]
            if not 1 <= t <= self.varsigma:
                raise InvariantError(f"doc {d} has {t} topics")
            Z = self.Zd[d, :t]
            if len(set(Z.tolist())) != t or (self.Zd[d, t:] != -1).any():
                raise InvariantError(f"doc {d} has a malformed topic set")
            if not np.isin(self.zw[self.doc_ptr[d]:self.doc_ptr[d + 1]], Z).all():
                raise InvariantError(f"doc {d} has a token outside its topic set")
