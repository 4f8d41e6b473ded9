"""Pure-Python sweep kernels.

Reference implementation of every hot loop; ``_kernels.pyx`` mirrors it
operation for operation. Arithmetic is written so both backends evaluate
the same IEEE expressions in the same order: given identical state and
uniforms they produce identical assignments.

Conventions shared by all kernels:

* corpus arrives as CSR (``doc_ptr``, ``words``); empty documents are skipped;
* ``u_doc[d]`` drives the draw for document ``d``, ``u_tok[t]`` the draw
  for token (or biterm) ``t``;
* count tables are mutated in place; a count going negative raises
  :class:`InvariantError`.
"""

import math

import numpy as np

from .errors import InvariantError, SamplerError

# documents longer than this are scored in log space
LOG_SPACE_AFTER = 20

BACKEND = "python"


def _draw(w, u):
    c = np.cumsum(w)
    total = c[-1]
    if not (total > 0.0) or total == math.inf:
        raise SamplerError(f"invalid sampling weights (total={total})")
    i = int(np.searchsorted(c, u * total, side="right"))
    if i >= len(w):
        i = int(np.flatnonzero(w > 0)[-1])
    return i


def _draw_seq(w, u):
    # scalar version of _draw for short Python lists
    total = 0.0
    for x in w:
        total += x
    if not (total > 0.0) or total == math.inf:
        raise SamplerError(f"invalid sampling weights (total={total})")
    target = u * total
    acc = 0.0
    for i, x in enumerate(w):
        acc += x
        if target < acc:
            return i
    for i in range(len(w) - 1, -1, -1):
        if w[i] > 0:
            return i
    raise SamplerError("no positive weight")


def _seqsum(a):
    return np.cumsum(a)[-1]


# numpy's vectorized log/exp may differ from libm in the last ulp (SIMD
# builds); the compiled kernels call libm, so the fallback does too
def _vlog(a):
    return np.fromiter(map(math.log, a), np.float64, len(a))


def _vexp(a):
    return np.fromiter(map(math.exp, a), np.float64, len(a))


def _n_active(doc_ptr):
    return int(np.count_nonzero(np.diff(doc_ptr)))


# ---------------------------------------------------------------- LDA

def lda_sweep(doc_ptr, words, z, ndk, nkw, nk, alpha, beta, u_tok):
    K, V = nkw.shape
    vbeta = V * beta
    for d in range(len(doc_ptr) - 1):
        for t in range(doc_ptr[d], doc_ptr[d + 1]):
            w = words[t]
            k = z[t]
            ndk[d, k] -= 1
            nkw[k, w] -= 1
            nk[k] -= 1
            if ndk[d, k] < 0 or nkw[k, w] < 0 or nk[k] < 0:
                raise InvariantError(f"negative LDA count at doc {d}, token {t}")
            p = (ndk[d] + alpha) * ((nkw[:, w] + beta) / (nk + vbeta))
            k = _draw(p, u_tok[t])
            z[t] = k
            ndk[d, k] += 1
            nkw[k, w] += 1
            nk[k] += 1


# ---------------------------------------------------------------- DMM family

def dmm_weights(ws, occ, mk, nkw, nk, alpha, beta, denom0):
    """Unnormalized single-topic document weights (product form, or log space for long docs)."""
    V = nkw.shape[1]
    vbeta = V * beta
    p = (mk + alpha) / denom0
    n = len(ws)
    if n <= LOG_SPACE_AFTER:
        for i in range(n):
            p = p * ((nkw[:, ws[i]] + beta + occ[i]) / (nk + vbeta + i))
        return p
    lp = _vlog(p)
    for i in range(n):
        lp = lp + _vlog((nkw[:, ws[i]] + beta + occ[i]) / (nk + vbeta + i))
    return _vexp(lp - lp.max())


def lfdmm_weights(ws, occ, mk, nkw, nk, sigma, lam, alpha, beta, denom0):
    V = nkw.shape[1]
    vbeta = V * beta
    p = (mk + alpha) / denom0
    n = len(ws)
    if n <= LOG_SPACE_AFTER:
        for i in range(n):
            w = ws[i]
            p = p * ((1.0 - lam) * ((nkw[:, w] + beta + occ[i]) / (nk + vbeta + i)) + lam * sigma[:, w])
        return p
    lp = _vlog(p)
    for i in range(n):
        w = ws[i]
        lp = lp + _vlog((1.0 - lam) * ((nkw[:, w] + beta + occ[i]) / (nk + vbeta + i)) + lam * sigma[:, w])
    return _vexp(lp - lp.max())


def dmm_sweep(doc_ptr, words, occ, zd, mk, nkw, nk, alpha, beta, u_doc):
    K = nkw.shape[0]
    denom0 = (_n_active(doc_ptr) - 1) + K * alpha
    for d in range(len(doc_ptr) - 1):
        s, e = doc_ptr[d], doc_ptr[d + 1]
        if s == e:
            continue
        ws = words[s:e]
        k = zd[d]
        np.subtract.at(nkw[k], ws, 1)
        mk[k] -= 1
        nk[k] -= e - s
        if mk[k] < 0 or nk[k] < 0 or nkw[k, ws].min() < 0:
            raise InvariantError(f"negative DMM count removing doc {d}")
        p = dmm_weights(ws, occ[s:e], mk, nkw, nk, alpha, beta, denom0)
        k = _draw(p, u_doc[d])
        zd[d] = k
        np.add.at(nkw[k], ws, 1)
        mk[k] += 1
        nk[k] += e - s


def _gpu_apply(nkw, gkw, nk, gk, k, w, g, sign, pm_ptr, pm_idx):
    # promoted counts are n + mu * g with g counting promotion hits, so
    # add/remove stay exact integer updates
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


def gpudmm_weights(ws, occ, mk, nkw, gkw, nk, gk, mu, alpha, beta, denom0):
    """dmm_weights over promoted counts nkw + mu * gkw."""
    V = nkw.shape[1]
    vbeta = V * beta
    p = (mk + alpha) / denom0
    tot = nk + mu * gk
    n = len(ws)
    if n <= LOG_SPACE_AFTER:
        for i in range(n):
            w = ws[i]
            p = p * (((nkw[:, w] + mu * gkw[:, w]) + beta + occ[i]) / (tot + vbeta + i))
        return p
    lp = _vlog(p)
    for i in range(n):
        w = ws[i]
        lp = lp + _vlog(((nkw[:, w] + mu * gkw[:, w]) + beta + occ[i]) / (tot + vbeta + i))
    return _vexp(lp - lp.max())


def _gate(pw, k, u):
    return 1 if u < pw[k] / pw.max() else 0


def gpudmm_sweep(doc_ptr, words, occ, zd, gate, mk, nkw, gkw, nk, gk, pm_ptr, pm_idx, mu,
                 alpha, beta, u_doc, u_tok):
    K, V = nkw.shape
    vbeta = V * beta
    nact = _n_active(doc_ptr)
    denom0 = (nact - 1) + K * alpha
    pdenom = nact + K * alpha
    for d in range(len(doc_ptr) - 1):
        s, e = doc_ptr[d], doc_ptr[d + 1]
        if s == e:
            continue
        k = zd[d]
        for t in range(s, e):
            _gpu_apply(nkw, gkw, nk, gk, k, words[t], gate[t], -1, pm_ptr, pm_idx)
        mk[k] -= 1
        if mk[k] < 0:
            raise InvariantError(f"negative document count removing doc {d}")
        p = gpudmm_weights(words[s:e], occ[s:e], mk, nkw, gkw, nk, gk, mu, alpha, beta, denom0)
        k = _draw(p, u_doc[d])
        zd[d] = k
        prior = (mk + alpha) / pdenom
        tot = nk + mu * gk
        for t in range(s, e):
            w = words[t]
            pw = prior * (((nkw[:, w] + mu * gkw[:, w]) + beta) / (tot + vbeta))
            gate[t] = _gate(pw, k, u_tok[t])
        for t in range(s, e):
            _gpu_apply(nkw, gkw, nk, gk, k, words[t], gate[t], 1, pm_ptr, pm_idx)
        mk[k] += 1


def lfdmm_sweep(doc_ptr, words, occ, zd, ind, mk, nkw, nk, fkw, sigma, lam,
                alpha, beta, u_doc, u_tok):
    K, V = nkw.shape
    vbeta = V * beta
    denom0 = (_n_active(doc_ptr) - 1) + K * alpha
    for d in range(len(doc_ptr) - 1):
        s, e = doc_ptr[d], doc_ptr[d + 1]
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
        p = lfdmm_weights(words[s:e], occ[s:e], mk, nkw, nk, sigma, lam, alpha, beta, denom0)
        k = _draw(p, u_doc[d])
        zd[d] = k
        for t in range(s, e):
            w = words[t]
            w0 = (1.0 - lam) * ((nkw[k, w] + beta) / (nk[k] + vbeta))
            w1 = lam * sigma[k, w]
            ind[t] = _draw_seq((w0, w1), u_tok[t])
        for t in range(s, e):
            w = words[t]
            if ind[t]:
                fkw[k, w] += 1
            else:
                nkw[k, w] += 1
                nk[k] += 1
        mk[k] += 1


def _pdmm_assign(a, s, e, words, zw, zc, nkw, gkw, nk, gk, mu, beta, vbeta):
    for t in range(s, e):
        k = zw[t]
        if k in zc:
            a[t - s] = k
            continue
        w = words[t]
        best = -1.0
        bk = -1
        for kk in zc:
            v = ((nkw[kk, w] + mu * gkw[kk, w]) + beta) / ((nk[kk] + mu * gk[kk]) + vbeta)
            if v > best or (v == best and kk < bk):
                best = v
                bk = kk
        a[t - s] = bk


def pdmm_sweep(doc_ptr, words, prev_same, zw, gate, Zd, td, nkw, gkw, nk, gk,
               pm_ptr, pm_idx, mu, alpha, beta, lam_pois, subsets, ssize, M,
               u_doc, u_tok):
    K, V = nkw.shape
    vbeta = V * beta
    kalpha = K * alpha
    log_lam = math.log(lam_pois)
    S = subsets.shape[0]
    for d in range(len(doc_ptr) - 1):
        s, e = int(doc_ptr[d]), int(doc_ptr[d + 1])
        nd = e - s
        if nd == 0:
            continue
        t_d = int(td[d])
        Z = [int(Zd[d, j]) for j in range(t_d)]
        # word-level topics within the current topic set
        for t in range(s, e):
            w = words[t]
            _gpu_apply(nkw, gkw, nk, gk, zw[t], w, gate[t], -1, pm_ptr, pm_idx)
            wts = [(1.0 / t_d) * (((nkw[kk, w] + mu * gkw[kk, w]) + beta) / ((nk[kk] + mu * gk[kk]) + vbeta))
                   for kk in Z]
            k = Z[_draw_seq(wts, u_tok[t, 0])]
            zw[t] = k
            _gpu_apply(nkw, gkw, nk, gk, k, w, gate[t], 1, pm_ptr, pm_idx)
        for t in range(s, e):
            _gpu_apply(nkw, gkw, nk, gk, zw[t], words[t], gate[t], -1, pm_ptr, pm_idx)
        # c_k, the words per topic, is the unpromoted total nk
        C = 0
        for k in range(K):
            C += nk[k]
        prior = [(nk[k] + alpha) / (C + kalpha) for k in range(K)]
        tot = [nk[k] + mu * gk[k] for k in range(K)]
        # candidate topics by p(z|d)
        score = [0.0] * K
        for t in range(s, e):
            w = words[t]
            pw = [prior[k] * (((nkw[k, w] + mu * gkw[k, w]) + beta) / (tot[k] + vbeta)) for k in range(K)]
            norm = 0.0
            for x in pw:
                norm += x
            for k in range(K):
                score[k] += pw[k] / norm / nd
        cand = sorted(range(K), key=lambda k: (-score[k], k))[:M]
        # score every topic subset of the candidates
        a = [0] * nd
        logw = [0.0] * S
        for si in range(S):
            size = int(ssize[si])
            zc = [cand[subsets[si, j]] for j in range(size)]
            lw = size * log_lam - nd * math.log(size)
            for k in zc:
                lw += math.log(nk[k] + alpha)
            for i in range(size):
                lw -= math.log(C + kalpha + i)
            _pdmm_assign(a, s, e, words, zw, zc, nkw, gkw, nk, gk, mu, beta, vbeta)
            for t in range(s, e):
                kt = a[t - s]
                occ = 0
                j = prev_same[t]
                while j >= 0:
                    if a[j - s] == kt:
                        occ += 1
                    j = prev_same[j]
                lw += math.log((nkw[kt, words[t]] + mu * gkw[kt, words[t]]) + beta + occ)
            for k in zc:
                nkd = 0
                for x in a:
                    if x == k:
                        nkd += 1
                for j in range(nkd):
                    lw -= math.log(tot[k] + vbeta + j)
            logw[si] = lw
        mx = logw[0]
        for x in logw:
            if x > mx:
                mx = x
        si = _draw_seq([math.exp(x - mx) for x in logw], u_doc[d])
        size = int(ssize[si])
        zc = [cand[subsets[si, j]] for j in range(size)]
        _pdmm_assign(a, s, e, words, zw, zc, nkw, gkw, nk, gk, mu, beta, vbeta)
        td[d] = size
        for j in range(Zd.shape[1]):
            Zd[d, j] = zc[j] if j < size else -1
        for t in range(s, e):
            zw[t] = a[t - s]
        # GPU gates, then add the document back
        for t in range(s, e):
            w = words[t]
            pw = [prior[k] * (((nkw[k, w] + mu * gkw[k, w]) + beta) / (tot[k] + vbeta)) for k in range(K)]
            mxp = pw[0]
            for x in pw:
                if x > mxp:
                    mxp = x
            gate[t] = 1 if u_tok[t, 1] < pw[zw[t]] / mxp else 0
        for t in range(s, e):
            _gpu_apply(nkw, gkw, nk, gk, zw[t], words[t], gate[t], 1, pm_ptr, pm_idx)


# ---------------------------------------------------------------- BTM

def btm_sweep(b1, b2, z, nk, nkw, alpha, beta, u_tok):
    K, V = nkw.shape
    vbeta = V * beta
    for i in range(len(z)):
        w1 = b1[i]
        w2 = b2[i]
        k = z[i]
        nk[k] -= 1
        nkw[k, w1] -= 1
        nkw[k, w2] -= 1
        if nk[k] < 0 or nkw[k, w1] < 0 or nkw[k, w2] < 0:
            raise InvariantError(f"negative BTM count at biterm {i}")
        # word total of topic k is 2 * nk (two words per biterm)
        p = ((nk + alpha) * (nkw[:, w1] + beta) * (nkw[:, w2] + beta)
             / ((2 * nk + vbeta + 1) * (2 * nk + vbeta)))
        k = _draw(p, u_tok[i])
        z[i] = k
        nk[k] += 1
        nkw[k, w1] += 1
        nkw[k, w2] += 1


# ---------------------------------------------------------------- SATM

def satm_pseudo_posterior(doc_ptr, words, nlw, nl, n_docs, floor, out):
    logfloor = math.log(floor)
    P = len(nl)
    base = np.array([math.log(nl[l] / n_docs) if nl[l] > 0 else logfloor for l in range(P)])
    for d in range(len(doc_ptr) - 1):
        s, e = doc_ptr[d], doc_ptr[d + 1]
        if s == e:
            out[d] = 0.0
            continue
        lp = base
        for t in range(s, e):
            col = nlw[:, words[t]]
            term = np.full(P, logfloor)
            ok = np.flatnonzero((col > 0) & (nl > 0))
            term[ok] = _vlog(col[ok] / nl[ok])
            lp = lp + term
        p = _vexp(lp - lp.max())
        out[d] = p / _seqsum(p)


def satm_sweep(doc_ptr, words, lt, zt, pld, nlw, nlk, nl, nkw, nk, alpha, beta, u_tok):
    K, V = nkw.shape
    vbeta = V * beta
    kalpha = K * alpha
    for d in range(len(doc_ptr) - 1):
        pl = pld[d][:, None]
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
            grid = (pl * ((nlk + alpha) / (nl + kalpha)[:, None])) * ((nkw[:, w] + beta) / (nk + vbeta))[None, :]
            idx = _draw(grid.ravel(), u_tok[t])
            l = idx // K
            k = idx % K
            lt[t] = l
            zt[t] = k
            nlw[l, w] += 1
            nlk[l, k] += 1
            nl[l] += 1
            nkw[k, w] += 1
            nk[k] += 1


# ---------------------------------------------------------------- PTM

def ptm_sweep(doc_ptr, words, ld, zt, ndk, nlk, ml, nl, nkw, nk, alpha, beta, lam,
              u_doc, u_tok):
    K, V = nkw.shape
    P = ml.shape[0]
    vbeta = V * beta
    kalpha = K * alpha
    denom = (_n_active(doc_ptr) - 1) + lam * P
    cnt = np.zeros(K, dtype=np.int64)
    for d in range(len(doc_ptr) - 1):
        s, e = doc_ptr[d], doc_ptr[d + 1]
        nd = e - s
        if nd == 0:
            continue
        l = ld[d]
        for t in range(s, e):
            nlk[l, zt[t]] -= 1
        ml[l] -= 1
        nl[l] -= nd
        if ml[l] < 0 or nl[l] < 0 or nlk[l].min() < 0:
            raise InvariantError(f"negative PTM count removing doc {d}")
        logw = _vlog((ml + lam) / denom)
        cnt[:] = 0
        for t in range(s, e):
            k = zt[t]
            logw = logw + _vlog(nlk[:, k] + alpha + cnt[k])
            cnt[k] += 1
        for i in range(nd):
            logw = logw - _vlog(nl + kalpha + i)
        l = _draw(_vexp(logw - logw.max()), u_doc[d])
        ld[d] = l
        for t in range(s, e):
            nlk[l, zt[t]] += 1
        ml[l] += 1
        nl[l] += nd
        for t in range(s, e):
            w = words[t]
            k = zt[t]
            nlk[l, k] -= 1
            nkw[k, w] -= 1
            nk[k] -= 1
            ndk[d, k] -= 1
            if nlk[l, k] < 0 or nkw[k, w] < 0 or nk[k] < 0 or ndk[d, k] < 0:
                raise InvariantError(f"negative PTM count at token {t}")
            p = (nlk[l] + alpha) * ((nkw[:, w] + beta) / (nk + vbeta))
            k = _draw(p, u_tok[t])
            zt[t] = k
            nlk[l, k] += 1
            nkw[k, w] += 1
            nk[k] += 1
            ndk[d, k] += 1
