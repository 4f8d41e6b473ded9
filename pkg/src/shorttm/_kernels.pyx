# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled sweep kernels.

Operation-for-operation mirror of ``_kernels_py``; see that module for the
shared conventions. Keep the two in sync: the backend equivalence tests
compare their trajectories exactly.
"""

from libc.math cimport log, exp, INFINITY
from libc.stdlib cimport malloc, free

import numpy as np

from .errors import InvariantError, SamplerError

BACKEND = "cython"

DEF LOG_SPACE_AFTER = 20

ctypedef long long i64
ctypedef signed char i8

cdef Py_ssize_t _draw(double* w, Py_ssize_t n, double u) except -1:
    cdef double total = 0.0, target, acc = 0.0
    cdef Py_ssize_t i
    for i in range(n):
        total += w[i]
    if not (total > 0.0) or total == INFINITY:
        raise SamplerError(f"invalid sampling weights (total={total})")
    target = u * total
    for i in range(n):
        acc += w[i]
        if target < acc:
            return i
    for i in range(n - 1, -1, -1):
        if w[i] > 0:
            return i
    raise SamplerError("no positive weight")


cdef i64 _n_active(const i64[:] doc_ptr):
    cdef Py_ssize_t d
    cdef i64 n = 0
    for d in range(doc_ptr.shape[0] - 1):
        if doc_ptr[d + 1] > doc_ptr[d]:
            n += 1
    return n


cdef double* _alloc(Py_ssize_t n) except NULL:
    cdef double* p = <double*> malloc((n if n > 0 else 1) * sizeof(double))
    if p == NULL:
        raise MemoryError()
    return p


# ---------------------------------------------------------------- LDA

def lda_sweep(const i64[:] doc_ptr, const i64[:] words, i64[:] z, i64[:, :] ndk,
              i64[:, :] nkw, i64[:] nk, double alpha, double beta, const double[:] u_tok):
    cdef Py_ssize_t K = nkw.shape[0], V = nkw.shape[1]
    cdef double vbeta = V * beta
    cdef Py_ssize_t d, t, j
    cdef i64 w, k
    cdef double* p = _alloc(K)
    try:
        for d in range(doc_ptr.shape[0] - 1):
            for t in range(doc_ptr[d], doc_ptr[d + 1]):
                w = words[t]
                k = z[t]
                ndk[d, k] -= 1
                nkw[k, w] -= 1
                nk[k] -= 1
                if ndk[d, k] < 0 or nkw[k, w] < 0 or nk[k] < 0:
                    raise InvariantError(f"negative LDA count at doc {d}, token {t}")
                for j in range(K):
                    p[j] = (ndk[d, j] + alpha) * ((nkw[j, w] + beta) / (nk[j] + vbeta))
                k = _draw(p, K, u_tok[t])
                z[t] = k
                ndk[d, k] += 1
                nkw[k, w] += 1
                nk[k] += 1
    finally:
        free(p)


# ---------------------------------------------------------------- DMM family

cdef void _dmm_weights(double* p, const i64[:] words, const i64[:] occ, Py_ssize_t s, Py_ssize_t e,
                       i64[:] mk, i64[:, :] nkw, i64[:] nk,
                       double alpha, double beta, double denom0) noexcept:
    cdef Py_ssize_t K = nkw.shape[0], V = nkw.shape[1]
    cdef double vbeta = V * beta
    cdef Py_ssize_t n = e - s, i, j
    cdef double mx
    cdef i64 w
    for j in range(K):
        p[j] = (mk[j] + alpha) / denom0
    if n <= LOG_SPACE_AFTER:
        for i in range(n):
            w = words[s + i]
            for j in range(K):
                p[j] = p[j] * ((nkw[j, w] + beta + occ[s + i]) / (nk[j] + vbeta + i))
        return
    for j in range(K):
        p[j] = log(p[j])
    for i in range(n):
        w = words[s + i]
        for j in range(K):
            p[j] = p[j] + log((nkw[j, w] + beta + occ[s + i]) / (nk[j] + vbeta + i))
    mx = p[0]
    for j in range(K):
        if p[j] > mx:
            mx = p[j]
    for j in range(K):
        p[j] = exp(p[j] - mx)


def dmm_weights(const i64[:] ws, const i64[:] occ, i64[:] mk, i64[:, :] nkw,
                i64[:] nk, double alpha, double beta, double denom0):
    cdef Py_ssize_t K = nkw.shape[0]
    out = np.empty(K)
    cdef double[:] ov = out
    _dmm_weights(&ov[0], ws, occ, 0, ws.shape[0], mk, nkw, nk, alpha, beta, denom0)
    return out


def dmm_sweep(const i64[:] doc_ptr, const i64[:] words, const i64[:] occ, i64[:] zd,
              i64[:] mk, i64[:, :] nkw, i64[:] nk, double alpha, double beta,
              const double[:] u_doc):
    cdef Py_ssize_t K = nkw.shape[0]
    cdef double denom0 = (_n_active(doc_ptr) - 1) + K * alpha
    cdef Py_ssize_t d, t, s, e
    cdef i64 k, w
    cdef double* p = _alloc(K)
    try:
        for d in range(doc_ptr.shape[0] - 1):
            s = doc_ptr[d]
            e = doc_ptr[d + 1]
            if s == e:
                continue
            k = zd[d]
            for t in range(s, e):
                w = words[t]
                nkw[k, w] -= 1
                if nkw[k, w] < 0:
                    raise InvariantError(f"negative DMM count removing doc {d}")
            mk[k] -= 1
            nk[k] -= e - s
            if mk[k] < 0 or nk[k] < 0:
                raise InvariantError(f"negative DMM count removing doc {d}")
            _dmm_weights(p, words, occ, s, e, mk, nkw, nk, alpha, beta, denom0)
            k = _draw(p, K, u_doc[d])
            zd[d] = k
            for t in range(s, e):
                nkw[k, words[t]] += 1
            mk[k] += 1
            nk[k] += e - s
    finally:
        free(p)


cdef int _gpu_apply(i64[:, :] nkw, i64[:, :] gkw, i64[:] nk, i64[:] gk, i64 k, i64 w, i8 g,
                    i64 sign, const i64[:] pm_ptr, const i64[:] pm_idx) except -1:
    # promoted counts are n + mu * g with g counting promotion hits
    cdef i64 j, v
    nkw[k, w] += sign
    nk[k] += sign
    if nkw[k, w] < 0 or nk[k] < 0:
        raise InvariantError(f"negative topic-word count for topic {k}")
    if g:
        for j in range(pm_ptr[w], pm_ptr[w + 1]):
            v = pm_idx[j]
            gkw[k, v] += sign
            gk[k] += sign
            if gkw[k, v] < 0:
                raise InvariantError(f"negative promoted count for topic {k}")
        if gk[k] < 0:
            raise InvariantError(f"negative promoted count for topic {k}")
    return 0


cdef void _gpu_weights(double* p, double* tot, const i64[:] words, const i64[:] occ,
                       Py_ssize_t s, Py_ssize_t e, i64[:] mk, i64[:, :] nkw, i64[:, :] gkw,
                       i64[:] nk, i64[:] gk, double mu, double alpha, double beta,
                       double denom0) noexcept:
    cdef Py_ssize_t K = nkw.shape[0], V = nkw.shape[1]
    cdef double vbeta = V * beta
    cdef Py_ssize_t n = e - s, i, j
    cdef double mx
    cdef i64 w
    for j in range(K):
        p[j] = (mk[j] + alpha) / denom0
        tot[j] = nk[j] + mu * gk[j]
    if n <= LOG_SPACE_AFTER:
        for i in range(n):
            w = words[s + i]
            for j in range(K):
                p[j] = p[j] * (((nkw[j, w] + mu * gkw[j, w]) + beta + occ[s + i]) / (tot[j] + vbeta + i))
        return
    for j in range(K):
        p[j] = log(p[j])
    for i in range(n):
        w = words[s + i]
        for j in range(K):
            p[j] = p[j] + log(((nkw[j, w] + mu * gkw[j, w]) + beta + occ[s + i]) / (tot[j] + vbeta + i))
    mx = p[0]
    for j in range(K):
        if p[j] > mx:
            mx = p[j]
    for j in range(K):
        p[j] = exp(p[j] - mx)


def gpudmm_weights(const i64[:] ws, const i64[:] occ, i64[:] mk, i64[:, :] nkw, i64[:, :] gkw,
                   i64[:] nk, i64[:] gk, double mu, double alpha, double beta, double denom0):
    cdef Py_ssize_t K = nkw.shape[0]
    out = np.empty(K)
    tot = np.empty(K)
    cdef double[:] ov = out
    cdef double[:] tv = tot
    _gpu_weights(&ov[0], &tv[0], ws, occ, 0, ws.shape[0], mk, nkw, gkw, nk, gk, mu, alpha, beta, denom0)
    return out


def gpudmm_sweep(const i64[:] doc_ptr, const i64[:] words, const i64[:] occ, i64[:] zd,
                 i8[:] gate, i64[:] mk, i64[:, :] nkw, i64[:, :] gkw, i64[:] nk, i64[:] gk,
                 const i64[:] pm_ptr, const i64[:] pm_idx, double mu,
                 double alpha, double beta, const double[:] u_doc, const double[:] u_tok):
    cdef Py_ssize_t K = nkw.shape[0], V = nkw.shape[1]
    cdef double vbeta = V * beta
    cdef i64 nact = _n_active(doc_ptr)
    cdef double denom0 = (nact - 1) + K * alpha
    cdef double pdenom = nact + K * alpha
    cdef Py_ssize_t d, t, s, e, j
    cdef i64 k, w
    cdef double mx
    cdef double* p = _alloc(K)
    cdef double* pw = _alloc(K)
    cdef double* tot = _alloc(K)
    try:
        for d in range(doc_ptr.shape[0] - 1):
            s = doc_ptr[d]
            e = doc_ptr[d + 1]
            if s == e:
                continue
            k = zd[d]
            for t in range(s, e):
                _gpu_apply(nkw, gkw, nk, gk, k, words[t], gate[t], -1, pm_ptr, pm_idx)
            mk[k] -= 1
            if mk[k] < 0:
                raise InvariantError(f"negative document count removing doc {d}")
            _gpu_weights(p, tot, words, occ, s, e, mk, nkw, gkw, nk, gk, mu, alpha, beta, denom0)
            k = _draw(p, K, u_doc[d])
            zd[d] = k
            for t in range(s, e):
                w = words[t]
                for j in range(K):
                    pw[j] = ((mk[j] + alpha) / pdenom) * (((nkw[j, w] + mu * gkw[j, w]) + beta) / (tot[j] + vbeta))
                mx = pw[0]
                for j in range(K):
                    if pw[j] > mx:
                        mx = pw[j]
                gate[t] = 1 if u_tok[t] < pw[k] / mx else 0
            for t in range(s, e):
                _gpu_apply(nkw, gkw, nk, gk, k, words[t], gate[t], 1, pm_ptr, pm_idx)
            mk[k] += 1
    finally:
        free(p)
        free(pw)
        free(tot)


cdef void _lfdmm_weights(double* p, const i64[:] words, const i64[:] occ, Py_ssize_t s, Py_ssize_t e,
                         i64[:] mk, i64[:, :] nkw, i64[:] nk, const double[:, :] sigma, double lam,
                         double alpha, double beta, double denom0) noexcept:
    cdef Py_ssize_t K = nkw.shape[0], V = nkw.shape[1]
    cdef double vbeta = V * beta
    cdef Py_ssize_t n = e - s, i, j
    cdef double mx
    cdef i64 w
    for j in range(K):
        p[j] = (mk[j] + alpha) / denom0
    if n <= LOG_SPACE_AFTER:
        for i in range(n):
            w = words[s + i]
            for j in range(K):
                p[j] = p[j] * ((1.0 - lam) * ((nkw[j, w] + beta + occ[s + i]) / (nk[j] + vbeta + i))
                               + lam * sigma[j, w])
        return
    for j in range(K):
        p[j] = log(p[j])
    for i in range(n):
        w = words[s + i]
        for j in range(K):
            p[j] = p[j] + log((1.0 - lam) * ((nkw[j, w] + beta + occ[s + i]) / (nk[j] + vbeta + i))
                              + lam * sigma[j, w])
    mx = p[0]
    for j in range(K):
        if p[j] > mx:
            mx = p[j]
    for j in range(K):
        p[j] = exp(p[j] - mx)


def lfdmm_weights(const i64[:] ws, const i64[:] occ, i64[:] mk, i64[:, :] nkw, i64[:] nk,
                  const double[:, :] sigma, double lam, double alpha, double beta, double denom0):
    out = np.empty(nkw.shape[0])
    cdef double[:] ov = out
    _lfdmm_weights(&ov[0], ws, occ, 0, ws.shape[0], mk, nkw, nk, sigma, lam, alpha, beta, denom0)
    return out


def lfdmm_sweep(const i64[:] doc_ptr, const i64[:] words, const i64[:] occ, i64[:] zd,
                i8[:] ind, i64[:] mk, i64[:, :] nkw, i64[:] nk, i64[:, :] fkw,
                const double[:, :] sigma, double lam, double alpha, double beta,
                const double[:] u_doc, const double[:] u_tok):
    cdef Py_ssize_t K = nkw.shape[0], V = nkw.shape[1]
    cdef double vbeta = V * beta
    cdef double denom0 = (_n_active(doc_ptr) - 1) + K * alpha
    cdef Py_ssize_t d, t, s, e
    cdef i64 k, w
    cdef double two[2]
    cdef double* p = _alloc(K)
    try:
        for d in range(doc_ptr.shape[0] - 1):
            s = doc_ptr[d]
            e = doc_ptr[d + 1]
            if s == e:
                continue
            k = zd[d]
            for t in range(s, e):
                w = words[t]
                if ind[t]:
                    fkw[k, w] -= 1
                    if fkw[k, w] < 0:
                        raise InvariantError(f"negative latent-feature count removing doc {d}")
                else:
                    nkw[k, w] -= 1
                    nk[k] -= 1
                    if nkw[k, w] < 0 or nk[k] < 0:
                        raise InvariantError(f"negative DMM count removing doc {d}")
            mk[k] -= 1
            if mk[k] < 0:
                raise InvariantError(f"negative document count removing doc {d}")
            _lfdmm_weights(p, words, occ, s, e, mk, nkw, nk, sigma, lam, alpha, beta, denom0)
            k = _draw(p, K, u_doc[d])
            zd[d] = k
            for t in range(s, e):
                w = words[t]
                two[0] = (1.0 - lam) * ((nkw[k, w] + beta) / (nk[k] + vbeta))
                two[1] = lam * sigma[k, w]
                ind[t] = <i8> _draw(two, 2, u_tok[t])
            for t in range(s, e):
                w = words[t]
                if ind[t]:
                    fkw[k, w] += 1
                else:
                    nkw[k, w] += 1
                    nk[k] += 1
            mk[k] += 1
    finally:
        free(p)


cdef void _pdmm_assign(i64* a, Py_ssize_t s, Py_ssize_t e, const i64[:] words, i64[:] zw,
                       i64* zc, Py_ssize_t size, i64[:, :] nkw, i64[:, :] gkw, i64[:] nk,
                       i64[:] gk, double mu, double beta, double vbeta) noexcept:
    cdef Py_ssize_t t, j
    cdef i64 k, w, bk, kk
    cdef double best, v
    cdef bint found
    for t in range(s, e):
        k = zw[t]
        found = False
        for j in range(size):
            if zc[j] == k:
                found = True
                break
        if found:
            a[t - s] = k
            continue
        w = words[t]
        best = -1.0
        bk = -1
        for j in range(size):
            kk = zc[j]
            v = ((nkw[kk, w] + mu * gkw[kk, w]) + beta) / ((nk[kk] + mu * gk[kk]) + vbeta)
            if v > best or (v == best and kk < bk):
                best = v
                bk = kk
        a[t - s] = bk


def pdmm_sweep(const i64[:] doc_ptr, const i64[:] words, const i64[:] prev_same, i64[:] zw,
               i8[:] gate, i64[:, :] Zd, i64[:] td, i64[:, :] nkw, i64[:, :] gkw, i64[:] nk,
               i64[:] gk, const i64[:] pm_ptr, const i64[:] pm_idx, double mu, double alpha,
               double beta, double lam_pois, const i64[:, :] subsets, const i64[:] ssize,
               Py_ssize_t M, const double[:] u_doc, const double[:, :] u_tok):
    cdef Py_ssize_t K = nkw.shape[0], V = nkw.shape[1]
    cdef Py_ssize_t S = subsets.shape[0], W = Zd.shape[1]
    cdef double vbeta = V * beta, kalpha = K * alpha
    cdef double log_lam = log(lam_pois)
    cdef Py_ssize_t d, t, s, e, nd, j, i, si, size, m, kk
    cdef i64 k, w, t_d, C, nkd, occ, jt, bk
    cdef double lw, mx, norm
    cdef Py_ssize_t max_nd = 0
    if W > 64:
        raise ValueError("topic sets larger than 64 are not supported")
    for d in range(doc_ptr.shape[0] - 1):
        if doc_ptr[d + 1] - doc_ptr[d] > max_nd:
            max_nd = doc_ptr[d + 1] - doc_ptr[d]
    cdef double* buf = _alloc(K if K > W else W)
    cdef double* prior = _alloc(K)
    cdef double* tot = _alloc(K)
    cdef double* score = _alloc(K)
    cdef double* logw = _alloc(S)
    cdef i64* cand = <i64*> malloc(K * sizeof(i64))
    cdef char* taken = <char*> malloc(K)
    cdef i64* zc = <i64*> malloc((W if W > 0 else 1) * sizeof(i64))
    cdef i64* a = <i64*> malloc((max_nd if max_nd > 0 else 1) * sizeof(i64))
    cdef i64 Z[64]
    try:
        for d in range(doc_ptr.shape[0] - 1):
            s = doc_ptr[d]
            e = doc_ptr[d + 1]
            nd = e - s
            if nd == 0:
                continue
            t_d = td[d]
            for j in range(t_d):
                Z[j] = Zd[d, j]
            # word-level topics within the current topic set
            for t in range(s, e):
                w = words[t]
                _gpu_apply(nkw, gkw, nk, gk, zw[t], w, gate[t], -1, pm_ptr, pm_idx)
                for j in range(t_d):
                    buf[j] = (1.0 / t_d) * (((nkw[Z[j], w] + mu * gkw[Z[j], w]) + beta)
                                            / ((nk[Z[j]] + mu * gk[Z[j]]) + vbeta))
                k = Z[_draw(buf, t_d, u_tok[t, 0])]
                zw[t] = k
                _gpu_apply(nkw, gkw, nk, gk, k, w, gate[t], 1, pm_ptr, pm_idx)
            for t in range(s, e):
                _gpu_apply(nkw, gkw, nk, gk, zw[t], words[t], gate[t], -1, pm_ptr, pm_idx)
            # c_k, the words per topic, is the unpromoted total nk
            C = 0
            for kk in range(K):
                C += nk[kk]
            for kk in range(K):
                prior[kk] = (nk[kk] + alpha) / (C + kalpha)
                tot[kk] = nk[kk] + mu * gk[kk]
                score[kk] = 0.0
            # candidate topics by p(z|d)
            for t in range(s, e):
                w = words[t]
                norm = 0.0
                for kk in range(K):
                    buf[kk] = prior[kk] * (((nkw[kk, w] + mu * gkw[kk, w]) + beta) / (tot[kk] + vbeta))
                for kk in range(K):
                    norm += buf[kk]
                for kk in range(K):
                    score[kk] += buf[kk] / norm / nd
            for kk in range(K):
                taken[kk] = 0
            for m in range(M):
                bk = -1
                for kk in range(K):
                    if not taken[kk] and (bk < 0 or score[kk] > score[bk]):
                        bk = kk
                taken[bk] = 1
                cand[m] = bk
            # score every topic subset of the candidates
            for si in range(S):
                size = ssize[si]
                for j in range(size):
                    zc[j] = cand[subsets[si, j]]
                lw = size * log_lam - nd * log(<double> size)
                for j in range(size):
                    lw += log(nk[zc[j]] + alpha)
                for i in range(size):
                    lw -= log(C + kalpha + i)
                _pdmm_assign(a, s, e, words, zw, zc, size, nkw, gkw, nk, gk, mu, beta, vbeta)
                for t in range(s, e):
                    k = a[t - s]
                    w = words[t]
                    occ = 0
                    jt = prev_same[t]
                    while jt >= 0:
                        if a[jt - s] == k:
                            occ += 1
                        jt = prev_same[jt]
                    lw += log((nkw[k, w] + mu * gkw[k, w]) + beta + occ)
                for j in range(size):
                    nkd = 0
                    for i in range(nd):
                        if a[i] == zc[j]:
                            nkd += 1
                    for i in range(nkd):
                        lw -= log(tot[zc[j]] + vbeta + i)
                logw[si] = lw
            mx = logw[0]
            for si in range(S):
                if logw[si] > mx:
                    mx = logw[si]
            for si in range(S):
                logw[si] = exp(logw[si] - mx)
            si = _draw(logw, S, u_doc[d])
            size = ssize[si]
            for j in range(size):
                zc[j] = cand[subsets[si, j]]
            _pdmm_assign(a, s, e, words, zw, zc, size, nkw, gkw, nk, gk, mu, beta, vbeta)
            td[d] = size
            for j in range(W):
                Zd[d, j] = zc[j] if j < size else -1
            for t in range(s, e):
                zw[t] = a[t - s]
            # GPU gates, then add the document back
            for t in range(s, e):
                w = words[t]
                for kk in range(K):
                    buf[kk] = prior[kk] * (((nkw[kk, w] + mu * gkw[kk, w]) + beta) / (tot[kk] + vbeta))
                mx = buf[0]
                for kk in range(K):
                    if buf[kk] > mx:
                        mx = buf[kk]
                gate[t] = 1 if u_tok[t, 1] < buf[zw[t]] / mx else 0
            for t in range(s, e):
                _gpu_apply(nkw, gkw, nk, gk, zw[t], words[t], gate[t], 1, pm_ptr, pm_idx)
    finally:
        free(buf)
        free(prior)
        free(tot)
        free(score)
        free(logw)
        free(cand)
        free(taken)
        free(zc)
        free(a)


# ---------------------------------------------------------------- BTM

def btm_sweep(const i64[:] b1, const i64[:] b2, i64[:] z, i64[:] nk, i64[:, :] nkw,
              double alpha, double beta, const double[:] u_tok):
    cdef Py_ssize_t K = nkw.shape[0], V = nkw.shape[1]
    cdef double vbeta = V * beta
    cdef Py_ssize_t i, j
    cdef i64 w1, w2, k
    cdef double* p = _alloc(K)
    try:
        for i in range(z.shape[0]):
            w1 = b1[i]
            w2 = b2[i]
            k = z[i]
            nk[k] -= 1
            nkw[k, w1] -= 1
            nkw[k, w2] -= 1
            if nk[k] < 0 or nkw[k, w1] < 0 or nkw[k, w2] < 0:
                raise InvariantError(f"negative BTM count at biterm {i}")
            for j in range(K):
                p[j] = ((nk[j] + alpha) * (nkw[j, w1] + beta) * (nkw[j, w2] + beta)
                        / ((2 * nk[j] + vbeta + 1) * (2 * nk[j] + vbeta)))
            k = _draw(p, K, u_tok[i])
            z[i] = k
            nk[k] += 1
            nkw[k, w1] += 1
            nkw[k, w2] += 1
    finally:
        free(p)


# ---------------------------------------------------------------- SATM

def satm_pseudo_posterior(const i64[:] doc_ptr, const i64[:] words, i64[:, :] nlw, i64[:] nl,
                          i64 n_docs, double floor, double[:, :] out):
    cdef Py_ssize_t P = nl.shape[0]
    cdef double logfloor = log(floor)
    cdef Py_ssize_t d, t, l
    cdef i64 w
    cdef double mx, total
    cdef double* base = _alloc(P)
    cdef double* lp = _alloc(P)
    try:
        for l in range(P):
            base[l] = log(<double> nl[l] / <double> n_docs) if nl[l] > 0 else logfloor
        for d in range(doc_ptr.shape[0] - 1):
            if doc_ptr[d] == doc_ptr[d + 1]:
                for l in range(P):
                    out[d, l] = 0.0
                continue
            for l in range(P):
                lp[l] = base[l]
            for t in range(doc_ptr[d], doc_ptr[d + 1]):
                w = words[t]
                for l in range(P):
                    if nlw[l, w] > 0 and nl[l] > 0:
                        lp[l] = lp[l] + log(<double> nlw[l, w] / <double> nl[l])
                    else:
                        lp[l] = lp[l] + logfloor
            mx = lp[0]
            for l in range(P):
                if lp[l] > mx:
                    mx = lp[l]
            total = 0.0
            for l in range(P):
                lp[l] = exp(lp[l] - mx)
                total += lp[l]
            for l in range(P):
                out[d, l] = lp[l] / total
    finally:
        free(base)
        free(lp)


def satm_sweep(const i64[:] doc_ptr, const i64[:] words, i64[:] lt, i64[:] zt,
               const double[:, :] pld, i64[:, :] nlw, i64[:, :] nlk, i64[:] nl,
               i64[:, :] nkw, i64[:] nk, double alpha, double beta, const double[:] u_tok):
    cdef Py_ssize_t K = nkw.shape[0], V = nkw.shape[1], P = nl.shape[0]
    cdef double vbeta = V * beta, kalpha = K * alpha
    cdef Py_ssize_t d, t, l, j, idx
    cdef i64 w, k
    cdef double pl
    cdef double* grid = _alloc(P * K)
    cdef double* phiw = _alloc(K)
    try:
        for d in range(doc_ptr.shape[0] - 1):
            for t in range(doc_ptr[d], doc_ptr[d + 1]):
                w = words[t]
                l = lt[t]
                k = zt[t]
                nlw[l, w] -= 1
                nlk[l, k] -= 1
                nl[l] -= 1
                nkw[k, w] -= 1
                nk[k] -= 1
                if nlw[l, w] < 0 or nlk[l, k] < 0 or nl[l] < 0 or nkw[k, w] < 0 or nk[k] < 0:
                    raise InvariantError(f"negative SATM count at token {t}")
                for j in range(K):
                    phiw[j] = (nkw[j, w] + beta) / (nk[j] + vbeta)
                for l in range(P):
                    pl = pld[d, l]
                    if pl == 0.0:
                        for j in range(K):
                            grid[l * K + j] = 0.0
                        continue
                    for j in range(K):
                        grid[l * K + j] = (pl * ((nlk[l, j] + alpha) / (nl[l] + kalpha))) * phiw[j]
                idx = _draw(grid, P * K, u_tok[t])
                l = idx // K
                k = idx % K
                lt[t] = l
                zt[t] = k
                nlw[l, w] += 1
                nlk[l, k] += 1
                nl[l] += 1
                nkw[k, w] += 1
                nk[k] += 1
    finally:
        free(grid)
        free(phiw)


# ---------------------------------------------------------------- PTM

def ptm_sweep(const i64[:] doc_ptr, const i64[:] words, i64[:] ld, i64[:] zt, i64[:, :] ndk,
              i64[:, :] nlk, i64[:] ml, i64[:] nl, i64[:, :] nkw, i64[:] nk,
              double alpha, double beta, double lam, const double[:] u_doc, const double[:] u_tok):
    cdef Py_ssize_t K = nkw.shape[0], V = nkw.shape[1], P = ml.shape[0]
    cdef double vbeta = V * beta, kalpha = K * alpha
    cdef double denom = (_n_active(doc_ptr) - 1) + lam * P
    cdef Py_ssize_t d, t, s, e, nd, l, j, i
    cdef i64 w, k, lab
    cdef double mx
    cdef Py_ssize_t max_nd = 0
    for d in range(doc_ptr.shape[0] - 1):
        if doc_ptr[d + 1] - doc_ptr[d] > max_nd:
            max_nd = doc_ptr[d + 1] - doc_ptr[d]
    cdef double* logw = _alloc(P)
    cdef double* p = _alloc(K)
    cdef i64* cnt = <i64*> malloc(K * sizeof(i64))
    cdef i64* occk = <i64*> malloc((max_nd if max_nd > 0 else 1) * sizeof(i64))
    try:
        for d in range(doc_ptr.shape[0] - 1):
            s = doc_ptr[d]
            e = doc_ptr[d + 1]
            nd = e - s
            if nd == 0:
                continue
            lab = ld[d]
            for t in range(s, e):
                nlk[lab, zt[t]] -= 1
                if nlk[lab, zt[t]] < 0:
                    raise InvariantError(f"negative PTM count removing doc {d}")
            ml[lab] -= 1
            nl[lab] -= nd
            if ml[lab] < 0 or nl[lab] < 0:
                raise InvariantError(f"negative PTM count removing doc {d}")
            for j in range(K):
                cnt[j] = 0
            for t in range(s, e):
                occk[t - s] = cnt[zt[t]]
                cnt[zt[t]] += 1
            for l in range(P):
                logw[l] = log((ml[l] + lam) / denom)
                for t in range(s, e):
                    logw[l] = logw[l] + log(nlk[l, zt[t]] + alpha + occk[t - s])
                for i in range(nd):
                    logw[l] = logw[l] - log(nl[l] + kalpha + i)
            mx = logw[0]
            for l in range(P):
                if logw[l] > mx:
                    mx = logw[l]
            for l in range(P):
                logw[l] = exp(logw[l] - mx)
            lab = _draw(logw, P, u_doc[d])
            ld[d] = lab
            for t in range(s, e):
                nlk[lab, zt[t]] += 1
            ml[lab] += 1
            nl[lab] += nd
            for t in range(s, e):
                w = words[t]
                k = zt[t]
                nlk[lab, k] -= 1
                nkw[k, w] -= 1
                nk[k] -= 1
                ndk[d, k] -= 1
                if nlk[lab, k] < 0 or nkw[k, w] < 0 or nk[k] < 0 or ndk[d, k] < 0:
                    raise InvariantError(f"negative PTM count at token {t}")
                for j in range(K):
                    p[j] = (nlk[lab, j] + alpha) * ((nkw[j, w] + beta) / (nk[j] + vbeta))
                k = _draw(p, K, u_tok[t])
                zt[t] = k
                nlk[lab, k] += 1
                nkw[k, w] += 1
                nk[k] += 1
                ndk[d, k] += 1
    finally:
        free(logw)
        free(p)
        free(cnt)
        free(occk)
