"""Command-line interface: train, infer, topics, eval, bench."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .config import load_config_file, merge_config, normalize_model
from .corpus import Vocabulary, load_corpus, load_labels
from .embeddings import load_embeddings
from .errors import ConfigError, ShortTMError
from .evaluation import build_reference_counts, evaluate
from .inference import infer_unseen
from .output import (format_topics, load_matrix, load_run_dir, save_matrix, top_words,
                     write_metrics, write_run_dir)
from .training import train

log = logging.getLogger("shorttm")

METRIC_KEYS = ("purity", "nmi", "accuracy", "pmi", "init_ms", "per_iter_ms")

# flag -> config field; --lambda is routed by model
_FLAG_FIELDS = {
    "K": "K", "alpha": "alpha", "beta": "beta", "iters": "iterations", "seed": "seed",
    "window": "window_c", "pseudo_docs": "P_count", "epsilon": "epsilon", "mu": "mu_promote",
    "mu_reg": "mu_reg", "varsigma": "varsigma", "mtop": "M_top",
    "baseline_iters": "baseline_iterations",
}
_LAMBDA_FIELD = {"LFDMM": "lambda_mix", "GPUPDMM": "lambda_poisson", "PTM": "lambda_ptm"}


def _model_flags(p):
    g = p.add_argument_group("model")
    g.add_argument("--model", help="LDA, GSDMM, LFDMM, GPUDMM, GPUPDMM, BTM, WNTM, SATM or PTM")
    g.add_argument("--config", help="key=value file; flags override it")
    g.add_argument("--K", type=int)
    g.add_argument("--alpha", type=float)
    g.add_argument("--beta", type=float)
    g.add_argument("--iters", type=int, help="Gibbs sweeps")
    g.add_argument("--seed", type=int)
    g.add_argument("--window", type=int, help="window size (BTM, WNTM)")
    g.add_argument("--pseudo-docs", type=int, help="number of pseudo-documents (SATM, PTM)")
    g.add_argument("--epsilon", type=float, help="cosine threshold for similar words")
    g.add_argument("--mu", type=float, help="promotion weight (GPU-DMM, GPU-PDMM)")
    g.add_argument("--mu-reg", type=float, help="topic vector regularizer (LF-DMM)")
    g.add_argument("--lambda", dest="lam", type=float,
                   help="LF-DMM mixture weight, GPU-PDMM Poisson rate or PTM pseudo-doc prior")
    g.add_argument("--varsigma", type=int, help="max topics per document (GPU-PDMM)")
    g.add_argument("--mtop", type=int, help="candidate topics per document (GPU-PDMM)")
    g.add_argument("--baseline-iters", type=int, help="LF-DMM sweeps before the latent-feature path")
    g.add_argument("--backend", choices=("auto", "cython", "python"))


def _input_flags(p, corpus_required=True):
    p.add_argument("--corpus", required=corpus_required)
    p.add_argument("--labels")
    p.add_argument("--embeddings")
    p.add_argument("--ref-corpus", help="reference corpus for PMI coherence")
    p.add_argument("--top-n", type=int, default=10)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="shorttm", description="Short-text topic models")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("train", help="train a model and write a run directory")
    _input_flags(p)
    _model_flags(p)
    p.add_argument("--out", required=True, help="run directory")

    p = sub.add_parser("infer", help="fold-in topic proportions for a new corpus")
    p.add_argument("--model-dir", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--iters", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True, help="theta file")

    p = sub.add_parser("topics", help="top words per topic")
    p.add_argument("--model-dir")
    p.add_argument("--phi")
    p.add_argument("--vocab")
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--out")

    p = sub.add_parser("eval", help="metrics for a run directory, or train --reps times and aggregate")
    _input_flags(p, corpus_required=False)
    _model_flags(p)
    p.add_argument("--run-dir", help="evaluate this run instead of training")
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--out", help="metrics JSON file (default stdout)")

    p = sub.add_parser("bench", help="models x datasets table")
    p.add_argument("--models", required=True, help="comma-separated model names")
    p.add_argument("--corpora", required=True, help="comma-separated corpus files")
    p.add_argument("--labels", help="comma-separated label files aligned with --corpora")
    p.add_argument("--embeddings")
    p.add_argument("--ref-corpus")
    p.add_argument("--top-n", type=int, default=10)
    p.add_argument("--reps", type=int, default=1)
    _model_flags(p)
    p.add_argument("--out", required=True, help="output directory")
    return ap


def config_from_args(args, model=None):
    file_vals = load_config_file(args.config) if getattr(args, "config", None) else {}
    flags = {}
    for attr, key in _FLAG_FIELDS.items():
        v = getattr(args, attr, None)
        if v is not None:
            flags[key] = v
    name = model or getattr(args, "model", None) or file_vals.get("model")
    if name is None:
        raise ConfigError("no model given (--model or model= in the config file)")
    name = normalize_model(name)
    flags["model"] = name
    if getattr(args, "lam", None) is not None:
        if name not in _LAMBDA_FIELD:
            raise ConfigError(f"--lambda has no meaning for {name}")
        flags[_LAMBDA_FIELD[name]] = args.lam
    return merge_config(file_vals, flags)


def _load_inputs(corpus_path, labels_path, emb_path, need_emb):
    corpus = load_corpus(corpus_path)
    labels = load_labels(labels_path, corpus) if labels_path else None
    emb = None
    if emb_path:
        emb = load_embeddings(emb_path, corpus.vocab, require_coverage=need_emb)
    elif need_emb:
        raise ConfigError("this model needs --embeddings")
    return corpus, labels, emb


def _ref_counts(ref_path, out, top_n):
    if not ref_path:
        return None
    words = {out.vocab.word(w) for t in out.top_words(top_n) for w in t}
    return build_reference_counts(ref_path, words)


def run_once(corpus, labels, emb, cfg, ref_path=None, top_n=10, backend=None, dataset=""):
    out = train(corpus, cfg, embeddings=emb, backend=backend)
    m = evaluate(out, labels.labels if labels is not None else None,
                 _ref_counts(ref_path, out, top_n), active=~corpus.empty, n_top=top_n)
    row = {"model": out.model, "dataset": dataset, "K": out.K, "seed": cfg.seed}
    row.update({k: m[k] for k in METRIC_KEYS})
    return out, row


def aggregate(rows: list[dict]) -> dict:
    """Mean of each metric over repetitions plus ``<metric>_std``."""
    res = dict(rows[0])
    res["reps"] = len(rows)
    res["seeds"] = [r["seed"] for r in rows]
    for k in METRIC_KEYS:
        vals = [r[k] for r in rows if r.get(k) is not None]
        res[k] = float(np.mean(vals)) if vals else None
        res[k + "_std"] = float(np.std(vals)) if vals else None
    return res


def cmd_train(args) -> int:
    cfg = config_from_args(args)
    corpus, labels, emb = _load_inputs(args.corpus, args.labels, args.embeddings,
                                       cfg.needs_embeddings)
    out, row = run_once(corpus, labels, emb, cfg, args.ref_corpus, args.top_n, args.backend,
                        Path(args.corpus).stem)
    path = write_run_dir(out, args.out, args.top_n)
    write_metrics(path / "metrics.json", row)
    print(f"wrote {path}")
    return 0


def cmd_infer(args) -> int:
    trained = load_run_dir(args.model_dir)
    corpus = load_corpus(args.corpus, trained.vocab)
    theta = infer_unseen(trained, corpus, args.iters, args.seed)
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    save_matrix(args.out, theta)
    print(f"wrote {args.out} ({corpus.N} documents)")
    return 0


def cmd_topics(args) -> int:
    if args.model_dir:
        trained = load_run_dir(args.model_dir)
        phi, vocab = trained.phi, trained.vocab
    elif args.phi and args.vocab:
        phi, vocab = load_matrix(args.phi), Vocabulary.load(args.vocab)
    else:
        raise ConfigError("give --model-dir, or --phi with --vocab")
    text = format_topics(top_words(phi, args.n), vocab)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def _eval_run_dir(args) -> dict:
    from .output import TopicModelOutput

    trained = load_run_dir(args.run_dir)
    theta = load_matrix(Path(args.run_dir) / "theta.txt")
    out = TopicModelOutput(trained.model, trained.config, trained.vocab, trained.phi, theta, [])
    active = None
    gold = None
    if args.labels:
        if not args.corpus:
            raise ConfigError("--labels needs --corpus to align documents")
        corpus = load_corpus(args.corpus)
        gold = load_labels(args.labels, corpus).labels
        active = ~corpus.empty
    m = evaluate(out, gold, _ref_counts(args.ref_corpus, out, args.top_n), active=active,
                 n_top=args.top_n)
    prev = Path(args.run_dir) / "metrics.json"
    if prev.exists():
        old = json.loads(prev.read_text())
        m["init_ms"], m["per_iter_ms"] = old.get("init_ms"), old.get("per_iter_ms")
    row = {"model": trained.model, "dataset": Path(args.corpus).stem if args.corpus else "",
           "K": trained.config.K, "seed": trained.config.seed}
    row.update({k: m[k] for k in METRIC_KEYS})
    return row


def cmd_eval(args) -> int:
    if not args.labels and not args.ref_corpus:
        raise ConfigError("eval needs --labels (clustering, accuracy) or --ref-corpus (PMI)")
    if args.run_dir:
        res = _eval_run_dir(args)
    else:
        if not args.corpus:
            raise ConfigError("eval needs --run-dir or --corpus")
        if args.reps < 1:
            raise ConfigError("--reps must be >= 1")
        cfg = config_from_args(args)
        corpus, labels, emb = _load_inputs(args.corpus, args.labels, args.embeddings,
                                           cfg.needs_embeddings)
        rows = []
        for r in range(args.reps):
            cfg_r = merge_config(cfg.to_dict(), {"seed": cfg.seed + r})
            rows.append(run_once(corpus, labels, emb, cfg_r, args.ref_corpus, args.top_n,
                                 args.backend, Path(args.corpus).stem)[1])
        res = aggregate(rows) if args.reps > 1 else rows[0]
    text = json.dumps(res, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def cmd_bench(args) -> int:
    models = [m.strip() for m in args.models.split(",") if m.strip()]
    corpora = [c.strip() for c in args.corpora.split(",") if c.strip()]
    labels = [x.strip() for x in args.labels.split(",")] if args.labels else [None] * len(corpora)
    if len(labels) != len(corpora):
        raise ConfigError("--labels must list one file per corpus")
    rows = []
    for cpath, lpath in zip(corpora, labels):
        dataset = Path(cpath).stem
        try:
            corpus = load_corpus(cpath)
            gold = load_labels(lpath, corpus) if lpath else None
            emb_all = load_embeddings(args.embeddings, corpus.vocab) if args.embeddings else None
        except (ShortTMError, OSError) as exc:
            for m in models:
                rows.append({"model": m, "dataset": dataset, "error": str(exc)})
            continue
        for m in models:
            try:
                cfg = config_from_args(args, model=m)
                if cfg.needs_embeddings and emb_all is None:
                    raise ConfigError(f"{cfg.model} needs --embeddings")
                reps = [run_once(corpus, gold, emb_all,
                                 merge_config(cfg.to_dict(), {"seed": cfg.seed + r}),
                                 args.ref_corpus, args.top_n, args.backend, dataset)[1]
                        for r in range(args.reps)]
                rows.append(aggregate(reps) if args.reps > 1 else reps[0])
            except (ShortTMError, ValueError, OSError) as exc:
                log.error("%s on %s failed: %s", m, dataset, exc)
                rows.append({"model": m, "dataset": dataset, "error": str(exc)})
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "bench.json").write_text(json.dumps(rows, indent=2) + "\n", encoding="utf-8")
    table = format_table(rows)
    (out / "bench.tsv").write_text(table, encoding="utf-8")
    sys.stdout.write(table)
    failed = sum("error" in r for r in rows)
    if failed:
        print(f"error: {failed} of {len(rows)} cells failed", file=sys.stderr)
        return 1
    return 0


def format_table(rows) -> str:
    cols = ["model", "dataset", "K", "seed", *METRIC_KEYS, "error"]
    lines = ["\t".join(cols)]
    for r in rows:
        cells = []
        for c in cols:
            v = r.get(c)
            cells.append("" if v is None else f"{v:.4f}" if isinstance(v, float) else str(v))
        lines.append("\t".join(cells))
    return "\n".join(lines) + "\n"


COMMANDS = {"train": cmd_train, "infer": cmd_infer, "topics": cmd_topics, "eval": cmd_eval,
            "bench": cmd_bench}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.cmd](args)
    except (ShortTMError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
