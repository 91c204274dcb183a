"""Drive the live screening service end to end over HTTP.

Starts the service as a subprocess, creates a session over an unlabelled
corpus, plays a scripted reviewer for a few batches, and exports the trace.
The same calls are what the browser frontend makes.
"""

import json
import subprocess
import sys
import tempfile
import time
import urllib.request
from pathlib import Path

from litscreen.corpus import Corpus, Document, save_corpus
from litscreen.synthetic import two_cluster_corpus

PORT = 8765
BASE = f"http://127.0.0.1:{PORT}"


def call(path, payload=None):
    if payload is None:
        req = urllib.request.Request(BASE + path)
    else:
        req = urllib.request.Request(
            BASE + path,
            data=json.dumps(payload).encode(),
            headers={"Content-Type": "application/json"},
        )
    with urllib.request.urlopen(req) as resp:
        body = resp.read().decode()
    return json.loads(body) if body.startswith("{") else body


with tempfile.TemporaryDirectory() as tmp:
    data_dir = Path(tmp)
    labelled, _ = two_cluster_corpus(n=100, relevant_fraction=0.1, seed=13)
    gold = {d.id: int(d.label) for d in labelled}
    save_corpus(
        Corpus([Document(id=d.id, title="study " + d.id, abstract=d.abstract) for d in labelled]),
        data_dir / "pool.jsonl",
    )

    server = subprocess.Popen(
        [sys.executable, "-m", "litscreen.cli", "serve", "--data-dir", str(data_dir),
         "--port", str(PORT)],
        stdout=subprocess.DEVNULL,
        stderr=subprocess.DEVNULL,
    )
    try:
        for _ in range(50):
            try:
                urllib.request.urlopen(BASE + "/docs")
                break
            except Exception:
                time.sleep(0.2)

        session = call("/sessions", {
            "corpus_ref": "pool.jsonl",
            "feature_model": "bow",
            "strategy": "ig",
            "config": {"batch_size": 10, "seed": 3, "lda_topics": 6, "lda_iterations": 80},
        })
        sid = session["session_id"]
        print("session:", sid)

        for round_no in range(4):
            batch = call(f"/sessions/{sid}/batch")
            scored = batch["docs"][0]["relevance"] is not None
            decisions = [{"id": d["id"], "label": gold[d["id"]]} for d in batch["docs"]]
            ack = call(f"/sessions/{sid}/labels", {"labels": decisions})
            progress = call(f"/sessions/{sid}/progress")
            print(f"batch {batch['iteration']}: {len(decisions)} decisions "
                  f"(scored={scored}), screened {progress['screened']}/{progress['total']}, "
                  f"relevant found {progress['relevant_found']}, phase {progress['phase']}")

        trace = call(f"/sessions/{sid}/export")
        print("\nexported trace columns:", trace.splitlines()[0])
        print("exported rows:", len(trace.splitlines()) - 1)
    finally:
        server.terminate()
        server.wait()
