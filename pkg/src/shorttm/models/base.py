"""Shared model interface and count helpers."""

from __future__ import annotations

import numpy as np

from ..errors import InvariantError
from ..kernels import get_backend

PROMOTED_ATOL = 1e-9


def smoothed_rows(counts, totals, smooth, denom_smooth) -> np.ndarray:
    """(counts + smooth) / (totals + denom_smooth), row by row."""
    return (counts + smooth) / (np.asarray(totals, dtype=np.float64)[:, None] + denom_smooth)


def uniform_rows(n: int, K: int) -> np.ndarray:
    return np.full((n, K), 1.0 / K)


def normalize_rows(m: np.ndarray) -> np.ndarray:
    s = m.sum(axis=1, keepdims=True)
    return m / s


def check_equal(name: str, actual, expected):
    if not np.array_equal(actual, expected):
        diff = np.argwhere(np.asarray(actual) != np.asarray(expected))
        raise InvariantError(f"{name} disagrees with assignments at {diff[:3].tolist()}")


def check_close(name: str, actual, expected, atol=PROMOTED_ATOL):
    err = np.max(np.abs(np.asarray(actual) - np.asarray(expected)), initial=0.0)
    if err > atol:
        raise InvariantError(f"{name} off by {err:.3g} (tolerance {atol:g})")
    if np.min(actual, initial=0.0) < -atol:
        raise InvariantError(f"{name} has a negative entry")


def check_nonneg(name: str, arr, atol=0.0):
    if np.min(arr, initial=0.0) < -atol:
        raise InvariantError(f"{name} has a negative entry")


def format_ints(values) -> str:
    return " ".join(str(int(v)) for v in values)


class TopicModel:
    """Base class: one collapsed Gibbs chain over a corpus.

    Subclasses implement ``initialize`` (random start plus any derived
    structures), ``sweep`` (one full pass), ``phi``, ``theta``,
    ``assignment_lines`` and ``check_invariants``.
    """

    name = "base"
    uses_embeddings = False

    def __init__(self, corpus, config, embeddings=None, backend=None):
        self.corpus = corpus
        self.config = config
        self.embeddings = embeddings
        self.kernels = backend if backend is not None and not isinstance(backend, str) else get_backend(backend)
        self.K = config.K
        self.V = corpus.V
        self.alpha = float(config.alpha)
        self.beta = float(config.beta)
        self.doc_ptr = np.ascontiguousarray(corpus.doc_ptr, dtype=np.int64)
        self.words = np.ascontiguousarray(corpus.words, dtype=np.int64)
        self.n_sweeps = 0

    def initialize(self, rs) -> None:
        raise NotImplementedError

    def sweep(self, rs) -> None:
        raise NotImplementedError

    def phi(self) -> np.ndarray:
        raise NotImplementedError

    def theta(self) -> np.ndarray:
        raise NotImplementedError

    def assignment_lines(self) -> list[str]:
        raise NotImplementedError

    def check_invariants(self) -> None:
        raise NotImplementedError

    def extras(self) -> dict:
        """Arrays needed for fold-in inference besides phi."""
        return {}

    def doc_slice(self, d: int) -> np.ndarray:
        return self.words[self.doc_ptr[d]:self.doc_ptr[d + 1]]
