"""Collapsed Gibbs LDA (baseline and the WNTM engine)."""

from __future__ import annotations

import numpy as np

from ..errors import InvariantError
from .base import TopicModel, check_equal, format_ints, smoothed_rows


def lda_conditional(ndk_row, nkw, nk, w, alpha, beta) -> np.ndarray:
    """Unnormalized topic weights for word ``w`` with the token already removed."""
    if np.min(ndk_row) < 0 or np.min(nkw[:, w]) < 0 or np.min(nk) < 0:
        raise InvariantError("negative count in LDA conditional")
    V = nkw.shape[1]
    return (ndk_row + alpha) * ((nkw[:, w] + beta) / (nk + V * beta))


def lda_phi(nkw, nk, beta) -> np.ndarray:
    return smoothed_rows(nkw, nk, beta, nkw.shape[1] * beta)


def lda_theta(ndk, nd, alpha) -> np.ndarray:
    return smoothed_rows(ndk, nd, alpha, ndk.shape[1] * alpha)


def lda_counts(doc_ptr, words, z, K, V):
    N = len(doc_ptr) - 1
    doc_of = np.repeat(np.arange(N), np.diff(doc_ptr))
    ndk = np.zeros((N, K), dtype=np.int64)
    np.add.at(ndk, (doc_of, z), 1)
    nkw = np.zeros((K, V), dtype=np.int64)
    np.add.at(nkw, (z, words), 1)
    return ndk, nkw, nkw.sum(axis=1)


class LDA(TopicModel):
    name = "LDA"

    def initialize(self, rs):
        self.z = rs.init.integers(0, self.K, len(self.words)).astype(np.int64)
        self.ndk, self.nkw, self.nk = lda_counts(self.doc_ptr, self.words, self.z, self.K, self.V)

    def sweep(self, rs):
        u = rs.tok_uniforms(len(self.words))
        self.kernels.lda_sweep(self.doc_ptr, self.words, self.z, self.ndk, self.nkw, self.nk,
                               self.alpha, self.beta, u)
        self.n_sweeps += 1

    def phi(self):
        return lda_phi(self.nkw, self.nk, self.beta)

    def theta(self):
        return lda_theta(self.ndk, self.corpus.lengths, self.alpha)

    def assignment_lines(self):
        return [format_ints(self.z[self.doc_ptr[d]:self.doc_ptr[d + 1]]) for d in range(self.corpus.N)]

    def check_invariants(self):
        ndk, nkw, nk = lda_counts(self.doc_ptr, self.words, self.z, self.K, self.V)
        check_equal("n_d^k", self.ndk, ndk)
        check_equal("n_k^w", self.nkw, nkw)
        check_equal("n_k", self.nk, nk)
        check_equal("sum_k n_d^k", self.ndk.sum(axis=1), self.corpus.lengths)
