import json

import numpy as np
import pytest

from shorttm.cli import main
from shorttm.output import load_matrix
from shorttm.synthetic import write_embeddings


@pytest.fixture
def files(tmp_path, small_corpus, small_emb):
    corpus, gold = small_corpus
    c = tmp_path / "tiny.txt"
    c.write_text("\n".join(corpus.to_lines()) + "\n")
    lab = tmp_path / "tiny.label"
    lab.write_text("\n".join(str(x) for x in gold.labels) + "\n")
    emb = tmp_path / "vec.txt"
    write_embeddings(small_emb, corpus.vocab, emb)
    return tmp_path, str(c), str(lab), str(emb)


def test_train_writes_run_dir(files, capsys):
    tmp, c, lab, emb = files
    out = tmp / "run"
    assert main(["train", "--model", "GSDMM", "--corpus", c, "--labels", lab, "--ref-corpus", c,
                 "--K", "2", "--iters", "20", "--out", str(out)]) == 0
    for f in ("phi.txt", "theta.txt", "assign.txt", "topics.txt", "metrics.json", "run_config.txt"):
        assert (out / f).exists()
    m = json.loads((out / "metrics.json").read_text())
    assert set(m) >= {"model", "dataset", "K", "seed", "purity", "nmi", "accuracy", "pmi",
                      "init_ms", "per_iter_ms"}
    assert m["purity"] == 1.0 and m["per_iter_ms"] > 0
    assert "alpha=0.1" in (out / "run_config.txt").read_text()


def test_defaults_echoed(files):
    tmp, c, _, _ = files
    assert main(["train", "--model", "BTM", "--corpus", c, "--K", "5", "--iters", "2",
                 "--out", str(tmp / "b")]) == 0
    text = (tmp / "b" / "run_config.txt").read_text()
    assert "alpha=10.0" in text and "beta=0.01" in text


def test_missing_embeddings_is_an_error(files, capsys):
    tmp, c, _, _ = files
    rc = main(["train", "--model", "GPUDMM", "--corpus", c, "--out", str(tmp / "g")])
    assert rc != 0
    assert "embeddings" in capsys.readouterr().err


def test_embedding_model_and_lambda_routing(files):
    tmp, c, _, emb = files
    assert main(["train", "--model", "GPUPDMM", "--corpus", c, "--embeddings", emb, "--K", "3",
                 "--iters", "3", "--lambda", "2.0", "--varsigma", "2", "--mtop", "3",
                 "--out", str(tmp / "p")]) == 0
    text = (tmp / "p" / "run_config.txt").read_text()
    assert "lambda_poisson=2.0" in text and "varsigma=2" in text
    assert main(["train", "--model", "GSDMM", "--corpus", c, "--lambda", "0.5",
                 "--out", str(tmp / "x")]) != 0


def test_config_file_and_flag_precedence(files):
    tmp, c, _, _ = files
    cfg = tmp / "run.cfg"
    cfg.write_text("model=LDA\nK=4\nalpha=0.2\niterations=3\n")
    assert main(["train", "--config", str(cfg), "--corpus", c, "--alpha", "0.7",
                 "--out", str(tmp / "l")]) == 0
    text = (tmp / "l" / "run_config.txt").read_text()
    assert "K=4" in text and "alpha=0.7" in text and "model=LDA" in text


def test_infer_and_topics(files, capsys):
    tmp, c, _, _ = files
    run = tmp / "run"
    main(["train", "--model", "LDA", "--corpus", c, "--K", "2", "--iters", "5", "--out", str(run)])
    assert main(["infer", "--model-dir", str(run), "--corpus", c, "--out", str(tmp / "th.txt")]) == 0
    th = load_matrix(tmp / "th.txt")
    np.testing.assert_allclose(th.sum(axis=1), 1.0)
    empty = tmp / "empty.txt"
    empty.write_text("")
    assert main(["infer", "--model-dir", str(run), "--corpus", str(empty),
                 "--out", str(tmp / "e.txt")]) == 0
    assert (tmp / "e.txt").read_text() == ""
    capsys.readouterr()
    assert main(["topics", "--model-dir", str(run), "--n", "3"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 2 and len(lines[0].split(":")[1].split()) == 3
    assert main(["topics", "--phi", str(run / "phi.txt"), "--vocab", str(run / "vocab.txt")]) == 0


def test_eval_reps_and_run_dir(files, capsys):
    tmp, c, lab, _ = files
    out = tmp / "m.json"
    assert main(["eval", "--model", "GSDMM", "--corpus", c, "--labels", lab, "--K", "2",
                 "--iters", "10", "--reps", "3", "--out", str(out)]) == 0
    m = json.loads(out.read_text())
    assert m["reps"] == 3 and m["seeds"] == [1, 2, 3]
    assert "purity_std" in m and "per_iter_ms_std" in m
    run = tmp / "run"
    main(["train", "--model", "BTM", "--corpus", c, "--K", "2", "--iters", "10", "--out", str(run)])
    capsys.readouterr()
    assert main(["eval", "--run-dir", str(run), "--corpus", c, "--labels", lab]) == 0
    m = json.loads(capsys.readouterr().out)
    assert m["model"] == "BTM" and m["purity"] is not None and m["per_iter_ms"] > 0
    assert main(["eval", "--run-dir", str(run)]) != 0  # no metric inputs


def test_bench_rows_and_partial_failure(files, capsys):
    tmp, c, lab, _ = files
    assert main(["bench", "--models", "GSDMM,LDA", "--corpora", c, "--labels", lab, "--K", "2",
                 "--iters", "5", "--out", str(tmp / "b1")]) == 0
    rows = json.loads((tmp / "b1" / "bench.json").read_text())
    assert [r["model"] for r in rows] == ["GSDMM", "LDA"]
    metric_keys = json.loads(json.dumps(rows[0])).keys()
    assert {"purity", "nmi", "accuracy", "pmi", "init_ms", "per_iter_ms"} <= set(metric_keys)
    rc = main(["bench", "--models", "GSDMM,GPUDMM", "--corpora", c, "--K", "2", "--iters", "3",
               "--out", str(tmp / "b2")])
    rows = json.loads((tmp / "b2" / "bench.json").read_text())
    assert rc != 0 and len(rows) == 2
    assert "error" not in rows[0] and "embeddings" in rows[1]["error"]


def test_bench_deterministic(files):
    tmp, c, lab, _ = files
    for d in ("x", "y"):
        main(["bench", "--models", "GSDMM", "--corpora", c, "--labels", lab, "--K", "2",
              "--iters", "5", "--out", str(tmp / d)])
    a = json.loads((tmp / "x" / "bench.json").read_text())[0]
    b = json.loads((tmp / "y" / "bench.json").read_text())[0]
    for k in ("purity", "nmi", "accuracy"):
        assert a[k] == b[k]
