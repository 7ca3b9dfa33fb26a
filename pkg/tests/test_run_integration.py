"""End-to-end check of the live pipeline: ``wordswarm run`` spawns a
scraper child wired into the session and serves /status until interrupted."""

from __future__ import annotations

import json
import signal
import socket
import subprocess
import sys
import time
import urllib.request
from pathlib import Path

FIXTURES = Path(__file__).parent / "fixtures"


def free_port() -> int:
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


def test_run_ingests_fixture_and_exits_cleanly(tmp_path):
    port = free_port()
    config_path = tmp_path / "run.json"
    config_path.write_text(
        json.dumps(
            {
                "server": {"host": "127.0.0.1", "port": port},
                "snapshot_period": 0.5,
                "analyzer": {"window": 50, "f_min": 1, "n_max": 20},
                "sources": [
                    {"location": str(FIXTURES / "corpus_small.ndjson"), "kind": "ndjson_file"}
                ],
            }
        )
    )
    proc = subprocess.Popen(
        [sys.executable, "-m", "wordswarm.cli", "--config", str(config_path), "run"],
        stdout=subprocess.PIPE,
        stderr=subprocess.PIPE,
        text=True,
    )
    try:
        status = None
        deadline = time.time() + 20
        while time.time() < deadline:
            try:
                with urllib.request.urlopen(f"http://127.0.0.1:{port}/status", timeout=1) as resp:
                    status = json.loads(resp.read())
                if status["ingested"] >= 2 and status["agents"] >= 1:
                    break
            except OSError:
                pass
            time.sleep(0.2)
        assert status is not None, "server never answered /status"
        assert status["ingested"] == 2, f"status: {status}"
        assert status["agents"] >= 1
    finally:
        proc.send_signal(signal.SIGINT)
        try:
            code = proc.wait(timeout=15)
        except subprocess.TimeoutExpired:
            proc.kill()
            raise AssertionError("run did not exit on SIGINT")
    assert code == 0, proc.stderr.read()


def test_run_accepts_records_on_tcp_intake(tmp_path):
    port = free_port()
    intake_port = free_port()
    config_path = tmp_path / "run.json"
    config_path.write_text(
        json.dumps(
            {
                "server": {"host": "127.0.0.1", "port": port, "intake_tcp_port": intake_port},
                "snapshot_period": 0.5,
                "analyzer": {"window": 50, "f_min": 1, "n_max": 20},
            }
        )
    )
    proc = subprocess.Popen(
        [sys.executable, "-m", "wordswarm.cli", "--config", str(config_path), "run"],
        stdout=subprocess.PIPE,
        stderr=subprocess.PIPE,
        text=True,
    )
    try:
        # wait for the web endpoint, then push records through the TCP intake
        deadline = time.time() + 20
        up = False
        while time.time() < deadline and not up:
            try:
                urllib.request.urlopen(f"http://127.0.0.1:{port}/status", timeout=1)
                up = True
            except OSError:
                time.sleep(0.2)
        assert up, "server never came up"

        feeder = subprocess.run(
            [
                sys.executable, "-m", "wordswarm.scraper",
                "--source", str(FIXTURES / "corpus_small.ndjson"),
                "--kind", "ndjson_file",
                "--out", f"tcp:127.0.0.1:{intake_port}",
                "--once",
            ],
            capture_output=True,
            text=True,
            timeout=30,
        )
        assert feeder.returncode == 0, feeder.stderr

        status = None
        deadline = time.time() + 20
        while time.time() < deadline:
            with urllib.request.urlopen(f"http://127.0.0.1:{port}/status", timeout=1) as resp:
                status = json.loads(resp.read())
            if status["ingested"] >= 2 and status["agents"] >= 3:
                break
            time.sleep(0.2)
        assert status["ingested"] == 2, f"status: {status}"
        assert status["agents"] == 3
    finally:
        proc.send_signal(signal.SIGINT)
        try:
            code = proc.wait(timeout=15)
        except subprocess.TimeoutExpired:
            proc.kill()
            raise
    assert code == 0


def test_set_query_reaches_child_and_clears_window(tmp_path):
    from websockets.sync.client import connect as ws_connect

    port = free_port()
    config_path = tmp_path / "run.json"
    config_path.write_text(
        json.dumps(
            {
                "server": {"host": "127.0.0.1", "port": port},
                "snapshot_period": 0.5,
                "analyzer": {"window": 50, "f_min": 1, "n_max": 20},
                "sources": [
                    {"location": str(FIXTURES / "corpus_small.ndjson"), "kind": "ndjson_file"}
                ],
            }
        )
    )
    proc = subprocess.Popen(
        [sys.executable, "-m", "wordswarm.cli", "--config", str(config_path), "run"],
        stdout=subprocess.PIPE,
        stderr=subprocess.PIPE,
        text=True,
    )
    try:
        deadline = time.time() + 20
        status = None
        while time.time() < deadline:
            try:
                with urllib.request.urlopen(f"http://127.0.0.1:{port}/status", timeout=1) as resp:
                    status = json.loads(resp.read())
                if status["window"] == 2:
                    break
            except OSError:
                pass
            time.sleep(0.2)
        assert status and status["window"] == 2, f"status: {status}"

        with ws_connect(f"ws://127.0.0.1:{port}/session") as ws:
            ws.send(json.dumps({"type": "set_query", "terms": ["alpha"]}))
            reply = None
            deadline = time.time() + 10
            while time.time() < deadline:
                msg = json.loads(ws.recv(timeout=5))
                if msg["type"] in ("ok", "error"):
                    reply = msg
                    break
            assert reply == {"type": "ok", "command": "set_query"}

        with urllib.request.urlopen(f"http://127.0.0.1:{port}/status", timeout=2) as resp:
            status = json.loads(resp.read())
        assert status["window"] == 0, f"window not cleared: {status}"
    finally:
        proc.send_signal(signal.SIGINT)
        try:
            code = proc.wait(timeout=15)
        except subprocess.TimeoutExpired:
            proc.kill()
            raise
    assert code == 0


def test_run_fails_fast_when_port_taken(tmp_path):
    blocker = socket.socket()
    blocker.bind(("127.0.0.1", 0))
    blocker.listen(1)
    port = blocker.getsockname()[1]
    config_path = tmp_path / "run.json"
    config_path.write_text(json.dumps({"server": {"host": "127.0.0.1", "port": port}}))
    try:
        proc = subprocess.run(
            [sys.executable, "-m", "wordswarm.cli", "--config", str(config_path), "run"],
            capture_output=True,
            text=True,
            timeout=30,
        )
        assert proc.returncode == 2
    finally:
        blocker.close()
