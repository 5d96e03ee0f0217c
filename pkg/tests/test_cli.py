"""Command-line interface tests.

Exit-code contract under test throughout: 0 success, 1 domain error,
2 environment error. The serve tests boot the real server in a
subprocess; everything else runs in-process through click's runner.
"""

import json
import pathlib
import re
import socket
import subprocess
import sys
import threading
import time
from http.server import BaseHTTPRequestHandler, HTTPServer

import pytest
from click.testing import CliRunner

from muit.cli import main

FIXTURES = pathlib.Path(__file__).parent / "fixtures"
CORPUS = pathlib.Path(__file__).parent.parent / "corpus"


@pytest.fixture
def runner():
    return CliRunner()


def free_port() -> int:
    sock = socket.socket()
    sock.bind(("127.0.0.1", 0))
    port = sock.getsockname()[1]
    sock.close()
    return port


class TestCompile:
    def test_corpus_file_compiles(self, runner, tmp_path):
        out = tmp_path / "bundle"
        result = runner.invoke(
            main, ["compile", str(CORPUS / "approval_tasks.muit"), "--out", str(out)]
        )
        assert result.exit_code == 0, result.output
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["app"] == "approval_tasks"
        assert (out / "app.js").is_file()

    def test_app_name_flag_overrides_stem(self, runner, tmp_path):
        out = tmp_path / "bundle"
        result = runner.invoke(
            main,
            [
                "compile",
                str(CORPUS / "approval_tasks.muit"),
                "--out",
                str(out),
                "--app-name",
                "approval",
            ],
        )
        assert result.exit_code == 0
        assert json.loads((out / "manifest.json").read_text())["app"] == "approval"

    def test_type_error_exits_1_with_diagnostics(self, runner, tmp_path):
        bad = tmp_path / "bad.muit"
        bad.write_text("entity Task {\n  name : mystery\n}\n")
        result = runner.invoke(main, ["compile", str(bad)])
        assert result.exit_code == 1
        # Diagnostics come out in the compiler's file:line:col format.
        assert re.search(r"bad\.muit:\d+:\d+: error: ", result.output)

    def test_missing_file_exits_2(self, runner):
        result = runner.invoke(main, ["compile", "no/such/file.muit"])
        assert result.exit_code == 2


class TestImportWsdl:
    def test_fixture_round_trip(self, runner, tmp_path):
        out = tmp_path / "derived.muit"
        result = runner.invoke(
            main, ["import-wsdl", str(FIXTURES / "approval_tasks.wsdl"), "--out", str(out)]
        )
        assert result.exit_code == 0, result.output
        source = out.read_text()
        assert "operation import" in source
        # The emitted source must make it through compile on its own.
        compiled = runner.invoke(
            main, ["compile", str(out), "--out", str(tmp_path / "bundle")]
        )
        assert compiled.exit_code == 0, compiled.output

    def test_default_output_name_is_wsdl_stem(self, runner):
        with runner.isolated_filesystem():
            result = runner.invoke(
                main, ["import-wsdl", str(FIXTURES / "reimbursement_task.wsdl")]
            )
            assert result.exit_code == 0
            assert pathlib.Path("reimbursement_task.muit").is_file()

    def test_rpc_style_exits_1(self, runner, tmp_path):
        rpc = tmp_path / "rpc.wsdl"
        rpc.write_text(
            (FIXTURES / "approval_tasks.wsdl")
            .read_text()
            .replace('style="document"', 'style="rpc"')
        )
        result = runner.invoke(main, ["import-wsdl", str(rpc)])
        assert result.exit_code == 1
        assert "not supported" in result.output

    def test_missing_file_exits_2(self, runner):
        result = runner.invoke(main, ["import-wsdl", "nowhere.wsdl"])
        assert result.exit_code == 2

    def test_url_fetch_404_exits_2(self, runner):
        class NotFound(BaseHTTPRequestHandler):
            def do_GET(self):
                self.send_response(404)
                self.end_headers()

            def log_message(self, *args):
                pass

        server = HTTPServer(("127.0.0.1", 0), NotFound)
        thread = threading.Thread(target=server.serve_forever, daemon=True)
        thread.start()
        try:
            url = f"http://127.0.0.1:{server.server_port}/svc.wsdl"
            result = runner.invoke(main, ["import-wsdl", url])
            assert result.exit_code == 2
        finally:
            server.shutdown()


class TestSimulate:
    def test_default_sweep_is_three_rows(self, runner):
        result = runner.invoke(main, ["simulate"])
        assert result.exit_code == 0
        lines = result.output.strip().split("\n")
        assert lines[0] == "N,mode,passivation,ART_s,p95_s,peak_live"
        assert [line.split(",")[0] for line in lines[1:]] == ["100", "500", "1000"]
        assert all(",on," in line for line in lines[1:])

    def test_spec_file_with_overrides(self, runner, tmp_path):
        spec = tmp_path / "spec.toml"
        spec.write_text("n_values = [20]\ndelayed_fraction = 0.0\n")
        out = tmp_path / "report.csv"
        result = runner.invoke(
            main,
            ["simulate", "--spec", str(spec), "--out", str(out), "--passivation", "off"],
        )
        assert result.exit_code == 0
        lines = out.read_text().strip().split("\n")
        # Nothing delayed, so latency is the bare 2s service time.
        assert lines[1] == "20,async,off,2.000000,2.000000,20"

    def test_caller_flag_overrides_spec_sweep(self, runner, tmp_path):
        spec = tmp_path / "spec.toml"
        spec.write_text("n_values = [500]\n")
        result = runner.invoke(
            main, ["simulate", "--spec", str(spec), "-n", "10", "-n", "15"]
        )
        assert result.exit_code == 0
        lines = result.output.strip().split("\n")
        assert [line.split(",")[0] for line in lines[1:]] == ["10", "15"]

    def test_unknown_spec_key_exits_1(self, runner, tmp_path):
        spec = tmp_path / "spec.toml"
        spec.write_text("delay_seconds = 10\n")
        result = runner.invoke(main, ["simulate", "--spec", str(spec)])
        assert result.exit_code == 1
        assert "unknown key" in result.output

    def test_invalid_workload_exits_1(self, runner):
        result = runner.invoke(main, ["simulate", "-n", "0"])
        assert result.exit_code == 1

    def test_malformed_toml_exits_1(self, runner, tmp_path):
        spec = tmp_path / "spec.toml"
        spec.write_text("n_values = [\n")
        result = runner.invoke(main, ["simulate", "--spec", str(spec)])
        assert result.exit_code == 1


class TestServe:
    def write_config(self, tmp_path, port) -> pathlib.Path:
        config = tmp_path / "engine.toml"
        config.write_text(
            "[server]\n"
            f'host = "127.0.0.1"\nport = {port}\n'
            "[engine]\n"
            'store_path = "instances.log"\n'
            "[[deployment]]\n"
            f'name = "approval"\nsource = "{CORPUS / "approval_tasks.muit"}"\n'
            'assignee = "li.si"\n'
        )
        return config

    def test_prints_listening_line_within_2s(self, tmp_path):
        port = free_port()
        config = self.write_config(tmp_path, port)
        started = time.monotonic()
        proc = subprocess.Popen(
            [sys.executable, "-m", "muit.cli", "serve", "-c", str(config)],
            stdout=subprocess.PIPE,
            stderr=subprocess.STDOUT,
            text=True,
        )
        try:
            line = proc.stdout.readline().strip()
            elapsed = time.monotonic() - started
            assert line == f"listening on 127.0.0.1:{port}"
            assert elapsed < 2.0
            import httpx

            response = httpx.get(f"http://127.0.0.1:{port}/metrics", timeout=5.0)
            assert response.status_code == 200
            assert "engine" in response.json()
        finally:
            proc.terminate()
            # uvicorn shuts down cleanly then re-raises the captured
            # signal, so killed-by-SIGTERM is the graceful signature.
            assert proc.wait(timeout=10) in (0, -15)

    def test_port_in_use_exits_2(self, tmp_path):
        blocker = socket.socket()
        blocker.bind(("127.0.0.1", 0))
        blocker.listen(1)
        port = blocker.getsockname()[1]
        config = self.write_config(tmp_path, port)
        try:
            proc = subprocess.run(
                [sys.executable, "-m", "muit.cli", "serve", "-c", str(config)],
                capture_output=True,
                text=True,
                timeout=15,
            )
            assert proc.returncode == 2
            assert "cannot bind" in proc.stderr
        finally:
            blocker.close()

    def test_bad_config_exits_2(self, runner, tmp_path):
        config = tmp_path / "engine.toml"
        config.write_text("[server]\nprot = 99\n")
        result = runner.invoke(main, ["serve", "-c", str(config)])
        assert result.exit_code == 2
        assert "unknown key" in result.output

    def test_broken_deployment_source_exits_1(self, runner, tmp_path):
        bad = tmp_path / "bad.muit"
        bad.write_text("entity Task {\n  name : mystery\n}\n")
        config = tmp_path / "engine.toml"
        config.write_text(
            f'[[deployment]]\nname = "bad"\nsource = "{bad}"\n'
        )
        result = runner.invoke(main, ["serve", "-c", str(config)])
        assert result.exit_code == 1


class TestHelpAndLogging:
    def test_every_flag_is_documented(self, runner):
        commands = {"": main, **main.commands}
        for name, command in commands.items():
            args = ([name] if name else []) + ["--help"]
            result = runner.invoke(main, args)
            assert result.exit_code == 0
            for param in command.params:
                if param.param_type_name != "option":
                    continue
                assert param.help, f"{name or 'main'} --{param.name} lacks help text"
                assert param.opts[0] in result.output, (
                    f"{name or 'main'}: {param.opts[0]} missing from --help"
                )

    def test_version_prints_release(self, runner):
        result = runner.invoke(main, ["version"])
        assert result.exit_code == 0
        assert re.fullmatch(r"muit \S+\n", result.output)

    def test_muit_log_rejects_unknown_level(self, runner):
        result = runner.invoke(main, ["version"], env={"MUIT_LOG": "chatty"})
        assert result.exit_code == 2
        assert "MUIT_LOG" in result.output

    def test_muit_log_accepts_standard_levels(self, runner):
        result = runner.invoke(main, ["version"], env={"MUIT_LOG": "debug"})
        assert result.exit_code == 0
