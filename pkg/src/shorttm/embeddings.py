"""Pre-trained word vectors and the similar-word promotion index."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, EmbeddingFormatError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class EmbeddingTable:
    """Word vectors aligned with a vocabulary.

    ``vectors`` is V x U; rows for words without a vector are zero and
    ``has_vector`` is False for them.
    """

    vectors: np.ndarray
    has_vector: np.ndarray

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    @property
    def coverage(self) -> float:
        return float(self.has_vector.mean()) if self.has_vector.size else 0.0

    @property
    def covered(self) -> np.ndarray:
        return np.flatnonzero(self.has_vector)


def load_embeddings(path, vocab, require_coverage: bool = False) -> EmbeddingTable:
    """Read a GloVe-style text file, keeping only words in ``vocab``.

    Each line is a token followed by U reals. Duplicate tokens keep their
    first vector.
    """
    dim = None
    rows: dict[int, np.ndarray] = {}
    dupes = 0
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise EmbeddingFormatError(f"cannot read {path}: {exc}") from exc
    with fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.rstrip().split()
            if not parts:
                continue
            if len(parts) < 2:
                raise EmbeddingFormatError(f"{path}:{lineno}: no vector values")
            if dim is None:
                dim = len(parts) - 1
            elif len(parts) - 1 != dim:
                raise EmbeddingFormatError(
                    f"{path}:{lineno}: expected {dim} values, got {len(parts) - 1}")
            wid = vocab.get(parts[0])
            if wid is None:
                continue
            if wid in rows:
                dupes += 1
                continue
            try:
                rows[wid] = np.array(parts[1:], dtype=np.float64)
            except ValueError as exc:
                raise EmbeddingFormatError(f"{path}:{lineno}: {exc}") from exc
    if dim is None:
        raise EmbeddingFormatError(f"{path}: empty embedding file")
    if dupes:
        log.warning("%s: %d duplicate vocabulary entries ignored (first wins)", path, dupes)
    vectors = np.zeros((len(vocab), dim))
    has = np.zeros(len(vocab), dtype=bool)
    for wid, vec in rows.items():
        vectors[wid] = vec
        has[wid] = True
    table = EmbeddingTable(vectors, has)
    if not has.any():
        if require_coverage:
            raise EmbeddingFormatError(f"{path}: no vocabulary word has a vector")
        log.warning("%s: no vocabulary word has a vector", path)
    else:
        log.info("embeddings: U=%d, coverage %.3f", dim, table.coverage)
    return table


def cosine(v1, v2) -> float:
    v1 = np.asarray(v1, dtype=np.float64)
    v2 = np.asarray(v2, dtype=np.float64)
    n1 = math.sqrt(float(v1 @ v1))
    n2 = math.sqrt(float(v2 @ v2))
    if n1 == 0.0 or n2 == 0.0:
        log.warning("cosine of a zero vector, treated as 0")
        return 0.0
    return float(v1 @ v2) / (n1 * n2)


@dataclass(frozen=True)
class PromotionIndex:
    """Similar-word pairs with cosine above ``epsilon``, stored as CSR.

    Neighbors of word ``w`` are ``idx[ptr[w]:ptr[w + 1]]``. The relation is
    symmetric and excludes self pairs.
    """

    epsilon: float
    mu_promote: float
    ptr: np.ndarray
    idx: np.ndarray

    @property
    def n_pairs(self) -> int:
        return len(self.idx)

    def neighbors(self, w: int) -> np.ndarray:
        return self.idx[self.ptr[w]:self.ptr[w + 1]]

    def weight(self, wi: int, wj: int) -> float:
        """Promotion matrix entry: 1 on the diagonal, mu for similar pairs, else 0."""
        if wi == wj:
            return 1.0
        return self.mu_promote if wj in self.neighbors(wi) else 0.0

    @classmethod
    def empty(cls, V: int, mu_promote: float = 0.1, epsilon: float = 1.0):
        return cls(epsilon, mu_promote, np.zeros(V + 1, dtype=np.int64), np.zeros(0, dtype=np.int64))

    @classmethod
    def from_pairs(cls, V: int, pairs, mu_promote: float, epsilon: float = float("nan")):
        """Build from unordered pairs; both directions are stored."""
        adj = [set() for _ in range(V)]
        for a, b in pairs:
            if a != b:
                adj[a].add(b)
                adj[b].add(a)
        ptr = np.zeros(V + 1, dtype=np.int64)
        ptr[1:] = np.cumsum([len(s) for s in adj])
        idx = np.array([j for s in adj for j in sorted(s)], dtype=np.int64)
        return cls(epsilon, mu_promote, ptr, idx)


def build_promotion_index(table: EmbeddingTable, epsilon: float, mu_promote: float,
                          block: int = 1024) -> PromotionIndex:
    if not -1.0 <= epsilon <= 1.0:
        raise ConfigError(f"epsilon must lie in [-1, 1], got {epsilon}")
    V = table.vectors.shape[0]
    cov = table.covered
    X = table.vectors[cov]
    norms = np.linalg.norm(X, axis=1)
    nz = norms > 0
    if not nz.all():
        log.warning("%d zero-norm vectors excluded from similarity", int((~nz).sum()))
    cov, X, norms = cov[nz], X[nz], norms[nz]
    X = X / norms[:, None]
    rows, cols = [], []
    # upper triangle only, then mirrored: keeps the relation exactly symmetric
    for s in range(0, len(cov), block):
        sim = X[s:s + block] @ X.T
        ii, jj = np.nonzero(sim > epsilon)
        ii = ii + s
        keep = jj > ii
        rows.append(ii[keep])
        cols.append(jj[keep])
    r = np.concatenate(rows) if rows else np.zeros(0, dtype=np.int64)
    c = np.concatenate(cols) if cols else np.zeros(0, dtype=np.int64)
    a = np.concatenate([cov[r], cov[c]])
    b = np.concatenate([cov[c], cov[r]])
    order = np.lexsort((b, a))
    a, b = a[order], b[order]
    ptr = np.zeros(V + 1, dtype=np.int64)
    np.cumsum(np.bincount(a, minlength=V), out=ptr[1:])
    log.info("promotion index: %d similar pairs at epsilon=%g", len(a) // 2, epsilon)
    return PromotionIndex(float(epsilon), float(mu_promote), ptr, b.astype(np.int64))
