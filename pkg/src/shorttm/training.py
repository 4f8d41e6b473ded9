"""Training driver shared by every model."""

from __future__ import annotations

import logging
import time

import numpy as np

from .config import ModelConfig
from .errors import ConfigError, EmbeddingFormatError, InvariantError
from .models import REGISTRY
from .output import TopicModelOutput
from .sampling import RandomSource

log = logging.getLogger(__name__)


def build_model(corpus, config: ModelConfig, embeddings=None, backend=None, promotion=None):
    cfg = config.resolved()
    cls = REGISTRY[cfg.model]
    if cfg.needs_embeddings and promotion is None:
        if embeddings is None:
            raise ConfigError(f"{cfg.model} needs word embeddings")
        if not embeddings.has_vector.any():
            raise EmbeddingFormatError(f"{cfg.model}: no vocabulary word has a vector")
    if cfg.model == "LFDMM" and embeddings is None:
        raise ConfigError("LFDMM needs word embeddings")
    if promotion is not None:
        return cls(corpus, cfg, embeddings, backend, promotion=promotion)
    return cls(corpus, cfg, embeddings, backend)


def train(corpus, config: ModelConfig, embeddings=None, backend=None, callback=None,
          check_invariants: bool = False, promotion=None) -> TopicModelOutput:
    """Initialize uniformly at random, run ``iterations`` sweeps, export phi and theta.

    ``callback(model, iteration)`` runs after each sweep. With
    ``check_invariants`` every count table is recomputed from the
    assignments after each sweep.
    """
    model = build_model(corpus, config, embeddings, backend, promotion)
    cfg = model.config
    rs = RandomSource(cfg.seed)
    t0 = time.perf_counter()
    model.initialize(rs)
    init_ms = (time.perf_counter() - t0) * 1e3
    iter_ms = np.zeros(cfg.iterations)
    for it in range(cfg.iterations):
        t0 = time.perf_counter()
        model.sweep(rs)
        iter_ms[it] = (time.perf_counter() - t0) * 1e3
        if check_invariants:
            try:
                model.check_invariants()
            except InvariantError as exc:
                raise InvariantError(f"{cfg.model}, after sweep {it + 1}: {exc}") from exc
        if callback is not None:
            callback(model, it)
    log.info("%s: init %.1f ms, %.2f ms per sweep (%s kernels)", cfg.model, init_ms,
             float(iter_ms.mean()), model.kernels.BACKEND)
    out = TopicModelOutput(cfg.model, cfg, corpus.vocab, model.phi(), model.theta(),
                           model.assignment_lines(), init_ms, iter_ms, model.extras(), model)
    out.check(~corpus.empty)
    return out
