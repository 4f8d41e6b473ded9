"""Clustering, classification and coherence metrics."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

log = logging.getLogger(__name__)


def cluster_assignment(theta, active=None) -> np.ndarray:
    """argmax_k theta_d (first maximum, so ties go to the lowest topic id)."""
    theta = np.asarray(theta)
    labels = theta.argmax(axis=1)
    return labels if active is None else labels[active]


def _contingency(clusters, gold) -> np.ndarray:
    clusters = np.asarray(clusters)
    gold = np.asarray(gold)
    if clusters.shape != gold.shape:
        raise ValueError(f"length mismatch: {clusters.shape} vs {gold.shape}")
    if clusters.size == 0:
        raise ValueError("empty partition")
    _, ci = np.unique(clusters, return_inverse=True)
    _, gi = np.unique(gold, return_inverse=True)
    table = np.zeros((ci.max() + 1, gi.max() + 1), dtype=np.int64)
    np.add.at(table, (ci, gi), 1)
    return table


def purity(clusters, gold) -> float:
    table = _contingency(clusters, gold)
    return float(table.max(axis=1).sum() / table.sum())


def _entropy(counts) -> float:
    p = counts[counts > 0] / counts.sum()
    return float(-(p * np.log(p)).sum())


def nmi(clusters, gold) -> float:
    """Mutual information over the arithmetic mean of the two entropies (natural log).

    If either partition has a single block the score is 0, except that two
    identical single-block partitions score 1.
    """
    table = _contingency(clusters, gold)
    n = table.sum()
    hc = _entropy(table.sum(axis=1))
    hg = _entropy(table.sum(axis=0))
    if hc == 0.0 or hg == 0.0:
        return 1.0 if table.shape == (1, 1) else 0.0
    pij = table / n
    pi = pij.sum(axis=1, keepdims=True)
    pj = pij.sum(axis=0, keepdims=True)
    nz = pij > 0
    mi = float((pij[nz] * np.log(pij[nz] / (pi @ pj)[nz])).sum())
    return min(1.0, max(0.0, mi / ((hc + hg) / 2.0)))


def classify_accuracy(theta, gold, folds: int = 5, seed: int = 0) -> float:
    """Mean held-out accuracy of a linear SVM (C=1, one-vs-rest) under k-fold CV.

    Folds are stratified unless some class has fewer members than folds.
    """
    from sklearn.model_selection import KFold, StratifiedKFold
    from sklearn.svm import LinearSVC

    X = np.asarray(theta, dtype=np.float64)
    y = np.asarray(gold)
    if len(X) != len(y):
        raise ValueError(f"length mismatch: {len(X)} vs {len(y)}")
    if len(y) < folds:
        raise ValueError(f"need at least {folds} documents, got {len(y)}")
    classes, counts = np.unique(y, return_counts=True)
    if len(classes) < 2:
        raise ValueError("classification needs at least two classes")
    if counts.min() < folds:
        log.warning("a class has fewer than %d members; using unstratified folds", folds)
        splitter = KFold(folds, shuffle=True, random_state=seed)
    else:
        splitter = StratifiedKFold(folds, shuffle=True, random_state=seed)
    scores = []
    for tr, te in splitter.split(X, y):
        if len(np.unique(y[tr])) < 2:
            # a degenerate training fold can only predict its single class
            scores.append(float(np.mean(y[te] == y[tr][0])))
            continue
        clf = LinearSVC(C=1.0, max_iter=20000, random_state=seed)
        clf.fit(X[tr], y[tr])
        scores.append(float(np.mean(clf.predict(X[te]) == y[te])))
    return float(np.mean(scores))


@dataclass(frozen=True)
class ReferenceCoCounts:
    """Window document frequencies over a reference corpus.

    ``word[w]`` counts windows containing w, ``pair[(a, b)]`` (a < b) windows
    containing both; ``n_windows`` is the total.
    """

    word: dict
    pair: dict
    n_windows: int
    window: int

    def count(self, w) -> int:
        return self.word.get(w, 0)

    def co_count(self, a, b) -> int:
        if a == b:
            return self.count(a)
        return self.pair.get((a, b) if a < b else (b, a), 0)


def _lines(source):
    if isinstance(source, (list, tuple)):
        return source
    with open(source, encoding="utf-8") as fh:
        return fh.read().splitlines()


def build_reference_counts(source, words, window: int = 10) -> ReferenceCoCounts:
    """Count windows of ``window`` tokens over each line of ``source`` (path or list of lines).

    Windows slide one token at a time inside a line; a line shorter than the
    window is a single window. Only ``words`` are tracked.
    """
    track = set(words)
    wc: dict = {}
    pc: dict = {}
    total = 0
    for line in _lines(source):
        toks = line.split()
        if not toks:
            continue
        n = len(toks)
        for p in range(max(1, n - window + 1)):
            total += 1
            present = sorted(track.intersection(toks[p:p + window]))
            for w in present:
                wc[w] = wc.get(w, 0) + 1
            for a, b in combinations(present, 2):
                pc[(a, b)] = pc.get((a, b), 0) + 1
    return ReferenceCoCounts(wc, pc, total, window)


def topic_pmi(words, counts: ReferenceCoCounts, smoothing: float = 1.0) -> float:
    T = counts.n_windows
    s = smoothing
    vals = []
    for a, b in combinations(words, 2):
        num = (counts.co_count(a, b) + s) * T
        den = (counts.count(a) + s) * (counts.count(b) + s)
        vals.append(math.log(num / den))
    return float(np.mean(vals)) if vals else 0.0


def pmi_coherence(topics, counts: ReferenceCoCounts, smoothing: float = 1.0) -> float:
    """Mean over topics of the mean pairwise PMI of each topic's top words."""
    if counts.n_windows == 0:
        raise ValueError("reference corpus has no windows")
    return float(np.mean([topic_pmi(t, counts, smoothing) for t in topics]))


def runtime_report(output) -> tuple[float, float]:
    return output.init_ms, output.per_iter_ms


def evaluate(output, labels=None, ref_counts=None, active=None, n_top: int = 10,
             folds: int = 5, seed: int = 0) -> dict:
    """Metric dictionary for a trained output; metrics without inputs are None."""
    res = {"purity": None, "nmi": None, "accuracy": None, "pmi": None}
    if labels is not None:
        gold = np.asarray(labels)
        mask = np.ones(len(gold), dtype=bool) if active is None else np.asarray(active)
        clusters = cluster_assignment(output.theta[mask])
        res["purity"] = purity(clusters, gold[mask])
        res["nmi"] = nmi(clusters, gold[mask])
        try:
            res["accuracy"] = classify_accuracy(output.theta[mask], gold[mask], folds, seed)
        except ValueError as exc:
            log.warning("accuracy skipped: %s", exc)
    if ref_counts is not None:
        tops = [[output.vocab.word(w) for w in t] for t in output.top_words(n_top)]
        res["pmi"] = pmi_coherence(tops, ref_counts)
    res["init_ms"], res["per_iter_ms"] = runtime_report(output)
    return res
