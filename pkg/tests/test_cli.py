import json
from pathlib import Path

import pytest

from litscreen.cli import main, parse_flat_config
from litscreen.corpus import save_corpus
from litscreen.synthetic import two_cluster_corpus


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    corpus, _ = two_cluster_corpus(n=90, relevant_fraction=0.1, seed=21)
    corpus_path = root / "corpus.jsonl"
    save_corpus(corpus, corpus_path)
    outdir = root / "out"
    assert main(["features", "--corpus", str(corpus_path), "--model", "bow", "--outdir", str(outdir)]) == 0
    assert main([
        "features", "--corpus", str(corpus_path), "--model", "lda", "--outdir", str(outdir),
        "--topics", "4", "--iterations", "40",
    ]) == 0
    assert main([
        "features", "--corpus", str(corpus_path), "--model", "pv", "--outdir", str(outdir),
        "--dim", "8", "--epochs", "3",
    ]) == 0
    return corpus_path, outdir


def test_features_cache_hit(workspace, capsys):
    corpus_path, outdir = workspace
    rc = main([
        "features", "--corpus", str(corpus_path), "--model", "lda", "--outdir", str(outdir),
        "--topics", "4", "--iterations", "40",
    ])
    assert rc == 0
    assert "cache hit" in capsys.readouterr().out


def test_features_param_change_rebuilds(workspace, capsys):
    corpus_path, outdir = workspace
    rc = main([
        "features", "--corpus", str(corpus_path), "--model", "bow", "--outdir", str(outdir),
        "--sublinear",
    ])
    assert rc == 0
    out = capsys.readouterr().out
    assert "built bow" in out
    # restore the cached default-parameters artifact for later tests
    main(["features", "--corpus", str(corpus_path), "--model", "bow", "--outdir", str(outdir)])


def test_lda_artifact_has_requested_topic_count(workspace):
    import numpy as np

    _, outdir = workspace
    topics = np.load(outdir / "features" / "lda" / "topics.npy")
    assert topics.shape[1] == 4


def test_simulate_writes_traces_reports_results(workspace):
    corpus_path, outdir = workspace
    rc = main([
        "simulate", "--corpus", str(corpus_path), "--model", "bow", "--strategy", "ig",
        "--outdir", str(outdir), "--seeds", "0,1", "--batch-size", "10",
    ])
    assert rc == 0
    runs = outdir / "runs"
    assert (runs / "trace_bow-ig_seed0.csv").exists()
    assert (runs / "report_bow-ig_seed1.json").exists()
    report = json.loads((runs / "report_bow-ig_seed0.json").read_text())
    assert "wss95" in report and "wss95_manual" in report
    results = (outdir / "results.csv").read_text().splitlines()
    assert results[0].startswith("label,")
    assert sum(1 for line in results[1:] if line.startswith("bow-ig,")) == 2


def test_simulate_rerun_byte_identical(workspace, tmp_path):
    corpus_path, outdir = workspace
    import shutil

    for name in ("runA", "runB"):
        target = tmp_path / name
        shutil.copytree(outdir / "features", target / "features")
        rc = main([
            "simulate", "--corpus", str(corpus_path), "--model", "bow", "--strategy", "lc",
            "--outdir", str(target), "--seeds", "2", "--batch-size", "10",
        ])
        assert rc == 0
    a = (tmp_path / "runA" / "runs" / "trace_bow-lc_seed2.csv").read_bytes()
    b = (tmp_path / "runB" / "runs" / "trace_bow-lc_seed2.csv").read_bytes()
    assert a == b


def test_simulate_baseline_t_test(workspace):
    corpus_path, outdir = workspace
    rc = main([
        "simulate", "--corpus", str(corpus_path), "--model", "bow", "--strategy", "naive",
        "--outdir", str(outdir), "--seeds", "0,1", "--batch-size", "10",
        "--baseline", "bow-ig",
    ])
    assert rc == 0
    summary = json.loads((outdir / "runs" / "summary_bow-naive.json").read_text())
    assert summary["baseline"] == "bow-ig"
    assert "p_value" in summary


def test_simulate_manifest(workspace, tmp_path):
    corpus_path, outdir = workspace
    manifest = tmp_path / "manifest.json"
    manifest.write_text(json.dumps({
        "corpus": str(corpus_path),
        "model": "bow",
        "strategy": "naive",
        "outdir": str(outdir),
        "seeds": [5],
        "label": "from-manifest",
        "config": {"batch_size": 10},
    }))
    rc = main(["simulate", "--manifest", str(manifest)])
    assert rc == 0
    assert (outdir / "runs" / "trace_from-manifest_seed5.csv").exists()


def test_select_command(workspace, capsys):
    corpus_path, outdir = workspace
    rc = main([
        "select", "--corpus", str(corpus_path), "--outdir", str(outdir),
        "--batch-size", "10", "--cutoff", "0.2",
    ])
    assert rc == 0
    payload = json.loads((outdir / "select.json").read_text())
    assert payload["chosen"] in ("bow", "pv")
    assert 0 <= payload["recall_bow"] <= 1 and 0 <= payload["recall_pv"] <= 1


def test_tampered_artifact_aborts(workspace, tmp_path):
    corpus_path, outdir = workspace
    import shutil

    target = tmp_path / "tampered"
    shutil.copytree(outdir / "features", target / "features")
    victim = target / "features" / "bow" / "matrix.npz"
    data = bytearray(victim.read_bytes())
    data[-1] ^= 0xFF
    victim.write_bytes(bytes(data))
    rc = main([
        "simulate", "--corpus", str(corpus_path), "--model", "bow", "--strategy", "naive",
        "--outdir", str(target), "--seeds", "0", "--batch-size", "10",
    ])
    assert rc == 2


def test_missing_artifact_is_an_error(workspace, tmp_path):
    corpus_path, _ = workspace
    rc = main([
        "simulate", "--corpus", str(corpus_path), "--model", "bow_tm", "--strategy", "naive",
        "--outdir", str(tmp_path / "missing"), "--seeds", "0",
    ])
    assert rc == 2


def test_flat_config_file(tmp_path, workspace):
    corpus_path, outdir = workspace
    cfg = tmp_path / "strategy.cfg"
    cfg.write_text("# strategy settings\nbatch_size = 10\nlc_fraction = 0.2\nstrategy = \"lc\"\n")
    parsed = parse_flat_config(cfg)
    assert parsed == {"batch_size": 10, "lc_fraction": 0.2, "strategy": "lc"}
    rc = main([
        "simulate", "--corpus", str(corpus_path), "--model", "bow",
        "--outdir", str(outdir), "--seeds", "3", "--config", str(cfg),
        "--label", "lc-from-config",
    ])
    assert rc == 0
    trace = (outdir / "runs" / "trace_lc-from-config_seed3.csv").read_text()
    assert trace.splitlines()[0].startswith("iteration,")
