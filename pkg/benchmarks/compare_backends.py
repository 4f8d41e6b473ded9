"""Time the compiled and pure-Python kernels on a synthetic corpus and check they agree.

    python3 benchmarks/compare_backends.py --docs 300 --iters 10
"""

import argparse
import time

import numpy as np

from shorttm import kernels
from shorttm.config import ModelConfig
from shorttm.synthetic import clustered_embeddings, disjoint_topic_corpus
from shorttm.training import train

MODELS = ["LDA", "GSDMM", "LFDMM", "GPUDMM", "GPUPDMM", "BTM", "WNTM", "SATM", "PTM"]


def run(model, corpus, emb, backend, K, iters, seed):
    cfg = ModelConfig(model=model, K=K, iterations=iters, seed=seed,
                      P_count=min(50, corpus.N) if model in ("SATM", "PTM") else None).resolved()
    t0 = time.perf_counter()
    out = train(corpus, cfg, embeddings=emb, backend=backend)
    return out, time.perf_counter() - t0


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--docs", type=int, default=300)
    ap.add_argument("--doc-len", type=int, default=10)
    ap.add_argument("--K", type=int, default=5)
    ap.add_argument("--iters", type=int, default=10)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--models", default=",".join(MODELS))
    args = ap.parse_args(argv)

    if "cython" not in kernels.available():
        raise SystemExit("compiled kernels are not built; run `pip install -e . --no-build-isolation`")
    corpus, _ = disjoint_topic_corpus(n_docs=args.docs, n_topics=args.K, words_per_topic=30,
                                      doc_len=args.doc_len, seed=args.seed, min_len=2)
    emb = clustered_embeddings(corpus.vocab, dim=10, spread=0.3, seed=args.seed)
    print(f"corpus: N={corpus.N} V={corpus.V} tokens={corpus.n_tokens}, K={args.K}, "
          f"{args.iters} sweeps")
    print(f"{'model':8s} {'python s':>10s} {'cython s':>10s} {'speedup':>8s}  identical")
    bad = 0
    for m in args.models.split(","):
        a, ta = run(m, corpus, emb, "python", args.K, args.iters, args.seed)
        b, tb = run(m, corpus, emb, "cython", args.K, args.iters, args.seed)
        same = (a.assignments == b.assignments and np.array_equal(a.phi, b.phi)
                and np.array_equal(a.theta, b.theta))
        bad += not same
        print(f"{m:8s} {ta:10.3f} {tb:10.3f} {ta / max(tb, 1e-9):8.1f}  {'yes' if same else 'NO'}")
    return 1 if bad else 0


if __name__ == "__main__":
    raise SystemExit(main())
