"""Trained-model output, top words and run directories."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import ModelConfig, parse_config_text
from .corpus import Vocabulary
from .errors import InvariantError, ShortTMError

ROW_TOL = 1e-9
FLOAT_FMT = "%.17g"


@dataclass
class TopicModelOutput:
    model: str
    config: ModelConfig
    vocab: Vocabulary
    phi: np.ndarray
    theta: np.ndarray
    assignments: list
    init_ms: float = 0.0
    iter_ms: np.ndarray = field(default_factory=lambda: np.zeros(0))
    extras: dict = field(default_factory=dict)
    state: object = field(default=None, repr=False)

    @property
    def K(self) -> int:
        return self.phi.shape[0]

    @property
    def per_iter_ms(self) -> float:
        return float(np.mean(self.iter_ms)) if len(self.iter_ms) else 0.0

    def runtime(self) -> tuple[float, float]:
        return self.init_ms, self.per_iter_ms

    def check(self, active=None):
        check_stochastic("phi", self.phi)
        check_stochastic("theta", self.theta if active is None else self.theta[active])

    def top_words(self, n: int = 10) -> list[list[int]]:
        return top_words(self.phi, n)


def check_stochastic(name, m, tol=ROW_TOL):
    m = np.asarray(m)
    if m.size == 0:
        return
    if not np.all(np.isfinite(m)) or m.min() < 0:
        raise InvariantError(f"{name} has negative or non-finite entries")
    err = np.max(np.abs(m.sum(axis=1) - 1.0))
    if err > tol:
        raise InvariantError(f"{name} rows deviate from 1 by {err:.3g}")


def top_words(phi, n: int = 10) -> list[list[int]]:
    """Word ids per topic by descending probability; ties go to the lower id."""
    phi = np.asarray(phi)
    n = min(n, phi.shape[1])
    return [np.argsort(-row, kind="stable")[:n].tolist() for row in phi]


def save_matrix(path, m):
    m = np.asarray(m, dtype=np.float64)
    with open(path, "w", encoding="utf-8") as fh:
        for row in m:
            fh.write(" ".join(FLOAT_FMT % x for x in row) + "\n")


def load_matrix(path) -> np.ndarray:
    rows = [list(map(float, line.split())) for line in Path(path).read_text().splitlines() if line.strip()]
    return np.array(rows, dtype=np.float64)


def format_topics(tops, vocab) -> str:
    return "".join(f"Topic {k}: " + " ".join(vocab.word(w) for w in ws) + "\n"
                   for k, ws in enumerate(tops))


def write_run_dir(out: TopicModelOutput, path, n_top: int = 10) -> Path:
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    save_matrix(path / "phi.txt", out.phi)
    save_matrix(path / "theta.txt", out.theta)
    (path / "assign.txt").write_text("".join(a + "\n" for a in out.assignments), encoding="utf-8")
    (path / "topics.txt").write_text(format_topics(out.top_words(n_top), out.vocab), encoding="utf-8")
    out.vocab.save(path / "vocab.txt")
    (path / "run_config.txt").write_text(out.config.to_text(), encoding="utf-8")
    np.savez(path / "model.npz", phi=out.phi, **{f"x_{k}": v for k, v in out.extras.items()})
    return path


@dataclass
class TrainedModel:
    """What fold-in inference needs from a run directory."""

    model: str
    config: ModelConfig
    vocab: Vocabulary
    phi: np.ndarray
    extras: dict

    @classmethod
    def from_output(cls, out: TopicModelOutput):
        return cls(out.model, out.config, out.vocab, out.phi, dict(out.extras))


def load_run_dir(path) -> TrainedModel:
    path = Path(path)
    for name in ("model.npz", "vocab.txt", "run_config.txt"):
        if not (path / name).exists():
            raise ShortTMError(f"{path}: missing {name}; not a run directory")
    cfg = ModelConfig(**parse_config_text((path / "run_config.txt").read_text())).resolved()
    vocab = Vocabulary.load(path / "vocab.txt")
    with np.load(path / "model.npz") as z:
        phi = z["phi"]
        extras = {k[2:]: z[k] for k in z.files if k.startswith("x_")}
    if phi.shape[1] != len(vocab):
        raise ShortTMError(f"{path}: phi has {phi.shape[1]} columns for {len(vocab)} words")
    return TrainedModel(cfg.model, cfg, vocab, phi, extras)


def write_metrics(path, metrics: dict):
    Path(path).write_text(json.dumps(metrics, indent=2, sort_keys=False) + "\n", encoding="utf-8")
