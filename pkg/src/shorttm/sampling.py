"""Random source and low-level sampling helpers."""

from __future__ import annotations

import math

import numpy as np

from .errors import SamplerError


class RandomSource:
    """Seeded uniform streams for one run.

    Three independent child streams are derived from one seed: ``init``
    for initial assignments, ``doc`` for document-level draws and ``tok``
    for token/biterm-level draws. Kernels receive a fresh array of uniforms
    from each stream per sweep, indexed by document or token position, so a
    model that makes the same document-level decisions as another consumes
    the same document uniforms regardless of its token-level work.
    """

    def __init__(self, seed: int):
        self.seed = int(seed)
        ss = np.random.SeedSequence(self.seed)
        init, doc, tok = ss.spawn(3)
        self.init = np.random.Generator(np.random.PCG64(init))
        self.doc = np.random.Generator(np.random.PCG64(doc))
        self.tok = np.random.Generator(np.random.PCG64(tok))

    def doc_uniforms(self, n: int) -> np.ndarray:
        return self.doc.random(n)

    def tok_uniforms(self, n: int, width: int = 1) -> np.ndarray:
        if width == 1:
            return self.tok.random(n)
        return self.tok.random((n, width))


def categorical_draw(weights, u) -> int:
    """Inverse-CDF draw from unnormalized ``weights``.

    ``u`` is either a uniform in [0, 1) or a ``numpy.random.Generator``.
    """
    w = np.asarray(weights, dtype=np.float64)
    if w.size == 0:
        raise SamplerError("empty weight vector")
    if not isinstance(u, (float, int, np.floating)):
        u = u.random()
    c = np.cumsum(w)
    total = c[-1]
    if not (total > 0.0) or not math.isfinite(total) or (w < 0).any():
        raise SamplerError(f"invalid sampling weights (total={total})")
    i = int(np.searchsorted(c, u * total, side="right"))
    if i >= w.size:
        i = int(np.flatnonzero(w > 0)[-1])
    return i


def log_sum_exp(values) -> float:
    v = np.asarray(values, dtype=np.float64)
    if v.size == 0:
        raise ValueError("log_sum_exp of empty input")
    m = v.max()
    if not math.isfinite(m):
        if m == -math.inf:
            raise ValueError("log_sum_exp needs at least one finite value")
        return float(m)
    return float(m + math.log(np.exp(v - m).sum()))


def normalize_log(values) -> np.ndarray:
    """exp(values) normalized to sum 1, computed stably."""
    v = np.asarray(values, dtype=np.float64)
    p = np.exp(v - v.max())
    return p / p.sum()
