import json

import numpy as np
import pytest

from ocrscore import RasterImage, encode_png
from ocrscore.cli import main

SVG_CODE = '<svg xmlns="http://www.w3.org/2000/svg"><rect width="4" height="4"/></svg>'


def _write_dataset(tmp_path, rows=None):
    if rows is None:
        rows = [
            {"id": "t1", "domain": "text_doc", "prediction": "hello",
             "ground_truth": "hello"},
            {"id": "f1", "domain": "formula", "prediction": "$a + b$",
             "ground_truth": "$a + b$"},
            {"id": "b1", "domain": "table",
             "prediction": "<table><tr><td>1</td></tr></table>",
             "ground_truth": "<table><tr><td>1</td></tr></table>"},
        ]
    path = tmp_path / "records.jsonl"
    path.write_text(
        "".join(json.dumps(r) + "\n" for r in rows), encoding="utf-8"
    )
    return path


def _write_groups(tmp_path):
    path = tmp_path / "groups.jsonl"
    path.write_text(
        json.dumps({"input_id": "flat", "rewards": [0.1, 0.1, 0.1, 0.1]}) + "\n"
        + json.dumps({"input_id": "spread",
                      "rewards": [0.1, 0.35, 0.6, 0.85]}) + "\n"
        + json.dumps({"input_id": "mixed",
                      "rewards": [0.1, 0.1, 0.6, 0.85]}) + "\n",
        encoding="utf-8",
    )
    return path


def _stderr_payload(capsys):
    err = capsys.readouterr().err.strip().splitlines()
    return json.loads(err[-1])


class TestScoreCommand:
    def test_writes_report_and_exits_zero(self, tmp_path, capsys):
        dataset = _write_dataset(tmp_path)
        output = tmp_path / "out" / "report.json"
        code = main(["score", "--dataset", str(dataset),
                     "--output", str(output)])
        assert code == 0
        payload = json.loads(output.read_text(encoding="utf-8"))
        assert payload["schema_version"] == 1
        assert set(payload["per_record"]) == {"t1", "f1", "b1"}
        assert payload["overall"] == pytest.approx(100.0)
        assert "records: 3" in capsys.readouterr().out

    def test_report_is_byte_identical_across_runs(self, tmp_path):
        dataset = _write_dataset(tmp_path)
        outputs = []
        for n, workers in enumerate(("1", "4", "1")):
            out = tmp_path / f"report{n}.json"
            assert main(["score", "--dataset", str(dataset),
                         "--output", str(out), "--workers", workers]) == 0
            outputs.append(out.read_bytes())
        assert outputs[0] == outputs[1] == outputs[2]

    def test_malformed_dataset_line_exits_three(self, tmp_path, capsys):
        dataset = tmp_path / "bad.jsonl"
        dataset.write_text(
            '{"id": "a", "domain": "text_doc", "prediction": "x", '
            '"ground_truth": "y"}\n{oops\n',
            encoding="utf-8",
        )
        code = main(["score", "--dataset", str(dataset),
                     "--output", str(tmp_path / "r.json")])
        assert code == 3
        payload = _stderr_payload(capsys)
        assert payload["exit_code"] == 3
        assert payload["error"] == "ParseError"
        assert "line 2" in payload["message"]

    def test_missing_output_flag_exits_two(self, tmp_path, capsys):
        dataset = _write_dataset(tmp_path)
        code = main(["score", "--dataset", str(dataset)])
        assert code == 2
        payload = _stderr_payload(capsys)
        assert payload["error"] == "ConfigError"
        assert "output" in payload["message"]

    def test_missing_dataset_exits_two(self, tmp_path, capsys):
        code = main(["score", "--output", str(tmp_path / "r.json")])
        assert code == 2
        assert "dataset" in _stderr_payload(capsys)["message"]

    def test_unreachable_remote_backend_exits_four(self, tmp_path, capsys):
        import socket

        probe = socket.socket()
        probe.bind(("127.0.0.1", 0))
        port = probe.getsockname()[1]
        probe.close()
        dataset = _write_dataset(tmp_path)
        code = main([
            "score", "--dataset", str(dataset),
            "--output", str(tmp_path / "r.json"),
            "--backend", "remote", "--endpoint", f"http://127.0.0.1:{port}",
        ])
        assert code == 4
        payload = _stderr_payload(capsys)
        assert payload["error"] == "TransportError"

    def test_flags_override_config_file(self, tmp_path):
        config = tmp_path / "run.yaml"
        config.write_text("workers: 1\ndataset: nonexistent.jsonl\n",
                          encoding="utf-8")
        dataset = _write_dataset(tmp_path)
        output = tmp_path / "r.json"
        code = main(["score", "--config", str(config),
                     "--dataset", str(dataset), "--output", str(output)])
        assert code == 0
        assert output.exists()

    def test_env_endpoint_override(self, tmp_path, capsys, monkeypatch):
        # remote backend from file + unreachable endpoint from env -> exit 4
        import socket

        probe = socket.socket()
        probe.bind(("127.0.0.1", 0))
        port = probe.getsockname()[1]
        probe.close()
        config = tmp_path / "run.yaml"
        config.write_text(
            "vision:\n  backend: remote\n  endpoint: http://unused:1\n"
            "  timeout: 1.0\n  retries: 0\n",
            encoding="utf-8",
        )
        monkeypatch.setenv("OCRSCORE_ENDPOINT", f"http://127.0.0.1:{port}")
        dataset = _write_dataset(tmp_path)
        code = main(["score", "--config", str(config),
                     "--dataset", str(dataset),
                     "--output", str(tmp_path / "r.json")])
        assert code == 4
        message = _stderr_payload(capsys)["message"]
        assert str(port) in message  # env endpoint used, not the file's
        assert "unused" not in message

    def test_transport_failures_still_write_report(self, tmp_path, capsys):
        # one vision record against a dead endpoint: report written, exit 4
        import socket

        probe = socket.socket()
        probe.bind(("127.0.0.1", 0))
        port = probe.getsockname()[1]
        probe.close()
        rng = np.random.default_rng(3)
        image = RasterImage.from_array(rng.integers(0, 256, size=(16, 16, 3)))
        (tmp_path / "img.png").write_bytes(encode_png(image))
        rows = [
            {"id": "v1", "domain": "svg", "prediction": SVG_CODE,
             "ground_truth": SVG_CODE, "gt_image_path": "img.png",
             "pred_image_path": "img.png"},
        ]
        dataset = _write_dataset(tmp_path, rows)
        # health() must succeed for the run to start scoring records, so
        # spin up a server that only answers /health.
        import threading
        from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

        class HealthOnly(BaseHTTPRequestHandler):
            def log_message(self, *args):
                pass

            def do_GET(self):
                body = b'{"dim": 4}'
                self.send_response(200)
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)

            def do_POST(self):
                body = b'{"error": "down"}'
                self.send_response(503)
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)

        server = ThreadingHTTPServer(("127.0.0.1", 0), HealthOnly)
        thread = threading.Thread(target=server.serve_forever, daemon=True)
        thread.start()
        try:
            endpoint = f"http://127.0.0.1:{server.server_address[1]}"
            output = tmp_path / "r.json"
            code = main(["score", "--dataset", str(dataset),
                         "--output", str(output),
                         "--backend", "remote", "--endpoint", endpoint])
        finally:
            server.shutdown()
            server.server_close()
        assert code == 4
        payload = json.loads(output.read_text(encoding="utf-8"))
        record = payload["per_record"]["v1"]
        assert "vision_reward" not in record  # unscored, not zero
        assert record["format_reward"] == 1.0
        stderr = _stderr_payload(capsys)
        assert "v1" in stderr["message"]
        assert stderr["exit_code"] == 4


class TestGrpoSimCommand:
    def test_writes_trajectory_csv(self, tmp_path, capsys):
        output = tmp_path / "run.csv"
        code = main(["grpo-sim", "--output", str(output), "--target", "ab",
                     "--group-size", "4", "--iterations", "12", "--seed", "5"])
        assert code == 0
        lines = output.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "iteration,mean_reward,max_reward"
        assert len(lines) == 13
        assert "simulated 12 iterations" in capsys.readouterr().out

    def test_same_seed_same_csv(self, tmp_path):
        args = ["grpo-sim", "--target", "ab", "--group-size", "8",
                "--iterations", "20", "--seed", "9"]
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(args + ["--output", str(a)]) == 0
        assert main(args + ["--output", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_bad_group_size_exits_two(self, tmp_path, capsys):
        code = main(["grpo-sim", "--output", str(tmp_path / "r.csv"),
                     "--group-size", "1"])
        assert code == 2
        assert "group_size" in _stderr_payload(capsys)["message"]


class TestFilterCommand:
    def test_filters_and_orders_groups(self, tmp_path, capsys):
        groups = _write_groups(tmp_path)
        output = tmp_path / "kept.txt"
        code = main(["filter", "--groups", str(groups),
                     "--output", str(output), "--bins", "4",
                     "--threshold", "0.3"])
        assert code == 0
        assert output.read_text(encoding="utf-8") == "spread\nmixed\n"
        assert "kept 2 of 3 groups" in capsys.readouterr().out

    def test_requires_groups_flag(self, tmp_path, capsys):
        code = main(["filter", "--output", str(tmp_path / "kept.txt")])
        assert code == 2
        assert "groups" in _stderr_payload(capsys)["message"]

    def test_undersized_group_exits_three(self, tmp_path, capsys):
        groups = tmp_path / "groups.jsonl"
        groups.write_text('{"input_id": "solo", "rewards": [1.0]}\n',
                          encoding="utf-8")
        code = main(["filter", "--groups", str(groups),
                     "--output", str(tmp_path / "kept.txt")])
        assert code == 3
        assert "solo" in _stderr_payload(capsys)["message"]


class TestValidateConfigCommand:
    def test_valid_config(self, tmp_path, capsys):
        dataset = _write_dataset(tmp_path)
        config = tmp_path / "run.yaml"
        config.write_text(f"dataset: {dataset}\nworkers: 2\n", encoding="utf-8")
        code = main(["validate-config", "--config", str(config)])
        assert code == 0
        out = capsys.readouterr().out
        assert out.startswith("config ok: ")
        summary = json.loads(out.removeprefix("config ok: "))
        assert summary["workers"] == 2

    def test_unknown_key_exits_two(self, tmp_path, capsys):
        config = tmp_path / "run.yaml"
        config.write_text("speed: 11\n", encoding="utf-8")
        code = main(["validate-config", "--config", str(config)])
        assert code == 2
        assert "speed" in _stderr_payload(capsys)["message"]

    def test_missing_config_file_exits_two(self, tmp_path):
        assert main(["validate-config",
                     "--config", str(tmp_path / "absent.yaml")]) == 2

    def test_config_without_path_exits_two(self, capsys):
        assert main(["validate-config"]) == 2
        assert "config" in _stderr_payload(capsys)["message"]

    def test_missing_dataset_exits_three(self, tmp_path, capsys):
        config = tmp_path / "run.yaml"
        config.write_text("dataset: not/there.jsonl\n", encoding="utf-8")
        code = main(["validate-config", "--config", str(config)])
        assert code == 3
        assert "not found" in _stderr_payload(capsys)["message"]


class TestErrorEnvelope:
    def test_stderr_is_machine_readable(self, tmp_path, capsys):
        main(["score", "--dataset", str(tmp_path / "missing.jsonl"),
              "--output", str(tmp_path / "r.json")])
        payload = _stderr_payload(capsys)
        assert set(payload) == {"error", "message", "exit_code"}
        assert isinstance(payload["exit_code"], int)
