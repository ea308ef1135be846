"""Command line interface: subcommands, exit codes, and printed payloads.

Every test drives ``main(argv)`` in process.  An autouse fixture scrubs the
configuration environment variables and moves the working directory to a
fresh ``tmp_path`` so defaults and explicit flags are the only inputs.
"""

from __future__ import annotations

import json
import re
from pathlib import Path

import pytest

from finops_agent.assets import QUERIES_DIR, SCRIPTS_DIR
from finops_agent.cli import main
from finops_agent.evalharness.benchmark import USE_CASE_QUERY, BenchmarkOutcome
from finops_agent.evalharness.report import MetricsTable
from finops_agent.orchestrator import STAGES

SCRUBBED_ENV = (
    "SCHEMA_PATH",
    "FIXTURES_PATH",
    "GATEWAY_ADDR",
    "LLM_BASE_URL",
    "LLM_API_KEY",
    "LLM_MODEL_ID",
)

ASK_SCRIPTED = ("ask", USE_CASE_QUERY, "--backend", "scripted:demo_session")


@pytest.fixture(autouse=True)
def isolated_cli(monkeypatch, tmp_path):
    """Blank environment, empty working directory."""
    for var in SCRUBBED_ENV:
        monkeypatch.delenv(var, raising=False)
    monkeypatch.chdir(tmp_path)


@pytest.fixture
def uvicorn_stub(monkeypatch):
    """Record the uvicorn.run call instead of binding a socket."""
    calls: dict = {}

    def fake_run(app, host, port, log_level):
        calls.update(app=app, host=host, port=port, log_level=log_level)

    monkeypatch.setattr("uvicorn.run", fake_run)
    return calls


def run_cli(capsys, *argv: str) -> tuple[int, str, str]:
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestUsage:
    def test_no_subcommand_is_a_usage_error(self, capsys):
        code, _, err = run_cli(capsys)
        assert code == 64
        assert "usage:" in err

    def test_unknown_subcommand_is_a_usage_error(self, capsys):
        code, _, _ = run_cli(capsys, "frobnicate")
        assert code == 64

    def test_unknown_flag_is_a_usage_error(self, capsys):
        code, _, _ = run_cli(capsys, "seed", "--bogus")
        assert code == 64

    def test_help_exits_zero(self, capsys):
        code, out, _ = run_cli(capsys, "--help")
        assert code == 0
        assert "finops-agent" in out

    def test_subcommand_help_exits_zero(self, capsys):
        code, out, _ = run_cli(capsys, "ask", "--help")
        assert code == 0
        assert "--max-iterations" in out


class TestValidate:
    def test_packaged_alias_query_is_valid(self, capsys):
        code, out, _ = run_cli(capsys, "validate", str(QUERIES_DIR / "review_optimization.graphql"))
        assert code == 0
        payload = json.loads(out)
        assert payload["valid"] is True
        assert payload["errors"] == []
        assert payload["resolved_aliases"] == {
            "apptioGetSpendingAnomalyEvents": "get_spending_anomaly_events",
            "turbonomicGetActions": "get_actions",
        }

    def test_unknown_field_reports_code_path_and_message(self, capsys, tmp_path):
        query_file = tmp_path / "q.graphql"
        query_file.write_text("{ get_actions { id bogus } }", encoding="utf-8")
        code, out, _ = run_cli(capsys, "validate", str(query_file))
        assert code == 1
        payload = json.loads(out)
        assert payload["valid"] is False
        assert payload["errors"] == [
            {
                "code": "UnknownField",
                "path": "get_actions.bogus",
                "message": "type 'Action' has no field 'bogus'",
            }
        ]

    def test_syntax_error_payload(self, capsys, tmp_path):
        query_file = tmp_path / "broken.graphql"
        query_file.write_text("query {", encoding="utf-8")
        code, out, _ = run_cli(capsys, "validate", str(query_file))
        assert code == 1
        payload = json.loads(out)
        assert payload["valid"] is False
        (error,) = payload["errors"]
        assert error["code"] == "SyntaxError"
        assert error["path"] == "$"
        assert re.search(r"\(line \d+, col \d+\)$", error["message"])

    def test_unsupported_construct_payload(self, capsys, tmp_path):
        query_file = tmp_path / "mutation.graphql"
        query_file.write_text("mutation { drop_everything }", encoding="utf-8")
        code, out, _ = run_cli(capsys, "validate", str(query_file))
        assert code == 1
        payload = json.loads(out)
        (error,) = payload["errors"]
        assert error["code"] == "UnsupportedConstruct"
        assert payload["resolved_aliases"] == {}

    def test_missing_file_exits_noinput(self, capsys):
        code, _, err = run_cli(capsys, "validate", "nope.graphql")
        assert code == 66
        assert "no such file" in err

    def test_unreadable_schema_is_a_startup_error(self, capsys, tmp_path):
        query_file = tmp_path / "q.graphql"
        query_file.write_text("{ get_actions { id } }", encoding="utf-8")
        code, _, err = run_cli(capsys, "validate", str(query_file), "--schema", "missing.graphql")
        assert code == 2
        assert err.startswith("error:")


class TestAsk:
    def test_scripted_session_runs_to_completion(self, capsys, tmp_path):
        out_dir = tmp_path / "artifacts"
        code, out, err = run_cli(capsys, *ASK_SCRIPTED, "--out", str(out_dir))
        assert code == 0
        payload = json.loads(out)
        assert payload["completed"] is True
        assert payload["halt_reason"] == "plan_complete"
        assert payload["model_id"] == "demo_session"
        assert payload["stage_markers"] == list(STAGES)
        assert payload["iterations"] == 8
        assert payload["record_count"] == 3
        assert payload["wall_time_seconds"] >= 0
        transcript_path = Path(payload["transcript_path"])
        records_path = Path(payload["records_path"])
        assert transcript_path.parent == out_dir
        assert isinstance(json.loads(transcript_path.read_text(encoding="utf-8")), dict)
        assert len(records_path.read_text(encoding="utf-8").splitlines()) == 3
        for stage in STAGES:
            assert f"stage: {stage}" in err

    def test_artifacts_default_to_runs_directory(self, capsys):
        code, out, _ = run_cli(capsys, *ASK_SCRIPTED)
        assert code == 0
        payload = json.loads(out)
        transcript_path = Path(payload["transcript_path"])
        assert transcript_path.parent == Path("runs")
        assert transcript_path.is_file()

    def test_iteration_cap_exits_incomplete(self, capsys, tmp_path):
        out_dir = tmp_path / "capped"
        code, out, _ = run_cli(capsys, *ASK_SCRIPTED, "--max-iterations", "1", "--out", str(out_dir))
        assert code == 3
        payload = json.loads(out)
        assert payload["completed"] is False
        assert payload["halt_reason"] == "iteration_cap"
        assert payload["iterations"] == 1
        assert Path(payload["transcript_path"]).is_file()  # capped runs still persist

    def test_verbose_traces_iterations_and_records(self, capsys):
        code, _, err = run_cli(capsys, *ASK_SCRIPTED, "-v")
        assert code == 0
        assert "iteration 1:" in err
        assert "record:" in err

    def test_blank_query_is_a_usage_error(self, capsys):
        code, _, err = run_cli(capsys, "ask", "   ", "--backend", "scripted:demo_session")
        assert code == 64
        assert "nonempty" in err

    def test_unknown_backend_is_a_usage_error(self, capsys):
        code, _, err = run_cli(capsys, "ask", "hi", "--backend", "carrier_pigeon")
        assert code == 64
        assert "expected 'http' or 'scripted:<path>'" in err

    def test_missing_script_is_a_startup_error(self, capsys):
        code, _, err = run_cli(capsys, "ask", "hi", "--backend", "scripted:no_such_script")
        assert code == 2
        assert "no scripted-backend file" in err

    def test_http_backend_needs_endpoint_configuration(self, capsys):
        code, _, err = run_cli(capsys, "ask", "hi")
        assert code == 2
        assert "LLM_BASE_URL" in err

    def test_script_mismatch_is_a_startup_error(self, capsys):
        code, _, err = run_cli(capsys, "ask", "Count the llamas.", "--backend", "scripted:demo_session")
        assert code == 2
        assert "error:" in err
        assert "expected substring" in err  # the script refused the off-script prompt


class TestEval:
    def test_single_scripted_backend_writes_reports(self, capsys, tmp_path):
        out_dir = tmp_path / "eval"
        code, out, _ = run_cli(
            capsys, "eval", "--backend", "scripted:perfect", "--n-runs", "2", "--out", str(out_dir)
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["all_complete"] is True
        assert payload["incomplete_backends"] == []
        report_md = Path(payload["report_md"])
        report_csv = Path(payload["report_csv"])
        assert report_md == out_dir / "report.md"
        markdown = report_md.read_text(encoding="utf-8")
        assert markdown.splitlines()[0].startswith("| Model |")
        assert "| perfect |" in markdown
        assert report_csv.read_text(encoding="utf-8").count("perfect") == 1
        runs_dir = Path(payload["runs_dir"])
        assert runs_dir == out_dir / "runs"
        assert len(list(runs_dir.glob("*perfect*"))) >= 2  # one transcript per run

    def test_config_file_drives_the_run(self, capsys, tmp_path):
        config = tmp_path / "bench.toml"
        config.write_text(
            'n_runs = 1\nout_dir = "from-config"\n\n'
            '[[backends]]\nname = "ideal"\nkind = "scripted"\nscript = "perfect"\n',
            encoding="utf-8",
        )
        code, out, _ = run_cli(capsys, "eval", "--config", str(config))
        assert code == 0
        payload = json.loads(out)
        report_md = Path(payload["report_md"])
        assert report_md.parts[0] == "from-config"
        markdown = report_md.read_text(encoding="utf-8")
        assert "| ideal |" in markdown
        assert "low-N (n=1)" in markdown

    def test_n_runs_flag_overrides_config(self, capsys, tmp_path):
        config = tmp_path / "bench.toml"
        config.write_text(
            'n_runs = 7\n\n[[backends]]\nname = "ideal"\nkind = "scripted"\nscript = "perfect"\n',
            encoding="utf-8",
        )
        code, out, _ = run_cli(
            capsys, "eval", "--config", str(config), "--n-runs", "1", "--out", str(tmp_path / "o")
        )
        assert code == 0
        markdown = Path(json.loads(out)["report_md"]).read_text(encoding="utf-8")
        assert "low-N (n=1)" in markdown

    def test_missing_config_exits_noinput(self, capsys):
        code, _, err = run_cli(capsys, "eval", "--config", "nope.toml")
        assert code == 66
        assert "no such file" in err

    def test_malformed_config_is_a_usage_error(self, capsys, tmp_path):
        config = tmp_path / "bad.toml"
        config.write_text("backends = [", encoding="utf-8")
        code, _, err = run_cli(capsys, "eval", "--config", str(config))
        assert code == 64
        assert str(config) in err

    def test_no_backends_is_a_usage_error(self, capsys):
        code, _, err = run_cli(capsys, "eval")
        assert code == 64
        assert "no backends configured" in err

    def test_nonpositive_runs_is_a_usage_error(self, capsys):
        code, _, err = run_cli(capsys, "eval", "--backend", "scripted:perfect", "--n-runs", "0")
        assert code == 64
        assert "n_runs must be >= 1" in err

    def test_unknown_backend_shortcut_is_a_usage_error(self, capsys):
        code, _, err = run_cli(capsys, "eval", "--backend", "quantum")
        assert code == 64
        assert "unknown backend" in err

    def test_config_unknown_kind_is_a_startup_error(self, capsys, tmp_path):
        config = tmp_path / "bench.toml"
        config.write_text('[[backends]]\nname = "x"\nkind = "carrier"\n', encoding="utf-8")
        code, _, err = run_cli(capsys, "eval", "--config", str(config))
        assert code == 2
        assert "unknown kind" in err

    def test_http_backend_needs_endpoint_configuration(self, capsys):
        code, _, err = run_cli(capsys, "eval", "--backend", "http", "--n-runs", "1")
        assert code == 2
        assert "LLM_BASE_URL" in err

    def test_partial_benchmark_exits_partial(self, capsys, tmp_path, monkeypatch):
        outcome = BenchmarkOutcome(table=MetricsTable(rows=()), incomplete_backends=("flaky",))
        monkeypatch.setattr("finops_agent.cli.run_benchmark", lambda config: outcome)
        out_dir = tmp_path / "partial"
        code, out, _ = run_cli(
            capsys, "eval", "--backend", "scripted:perfect", "--n-runs", "1", "--out", str(out_dir)
        )
        assert code == 4
        payload = json.loads(out)
        assert payload["incomplete_backends"] == ["flaky"]
        assert payload["all_complete"] is False
        assert (out_dir / "report.md").is_file()  # partial runs still get reports


class TestServe:
    def test_serves_on_the_configured_address(self, capsys, uvicorn_stub, monkeypatch):
        monkeypatch.setenv("GATEWAY_ADDR", "0.0.0.0:9001")
        code, _, err = run_cli(capsys, "serve")
        assert code == 0
        assert (uvicorn_stub["host"], uvicorn_stub["port"]) == ("0.0.0.0", 9001)
        assert "serving on http://0.0.0.0:9001" in err
        assert uvicorn_stub["app"].title == "finops-agent"

    def test_flags_override_the_gateway_address(self, capsys, uvicorn_stub, monkeypatch):
        monkeypatch.setenv("GATEWAY_ADDR", "0.0.0.0:9001")
        code, _, _ = run_cli(capsys, "serve", "--host", "127.0.0.1", "--port", "9")
        assert code == 0
        assert (uvicorn_stub["host"], uvicorn_stub["port"]) == ("127.0.0.1", 9)

    @pytest.mark.parametrize("addr", ["nonsense", "host:", ":8080", "host:eight"])
    def test_malformed_gateway_address_is_a_usage_error(self, capsys, uvicorn_stub, monkeypatch, addr):
        monkeypatch.setenv("GATEWAY_ADDR", addr)
        code, _, err = run_cli(capsys, "serve")
        assert code == 64
        assert "GATEWAY_ADDR" in err

    def test_unknown_backend_is_a_usage_error(self, capsys, uvicorn_stub):
        code, _, err = run_cli(capsys, "serve", "--backend", "frob")
        assert code == 64
        assert "unknown backend" in err

    def test_custom_scripts_directory_is_accepted(self, capsys, uvicorn_stub):
        code, _, _ = run_cli(capsys, "serve", "--backend", f"scripted:{SCRIPTS_DIR}")
        assert code == 0
        assert uvicorn_stub["app"].title == "finops-agent"

    def test_unreadable_schema_is_a_startup_error(self, capsys, uvicorn_stub):
        code, _, err = run_cli(capsys, "serve", "--schema", "missing.graphql")
        assert code == 2
        assert err.startswith("error:")
        assert "host" not in uvicorn_stub  # never reached the server

    def test_bind_failure_is_a_startup_error(self, capsys, monkeypatch):
        def fake_run(app, host, port, log_level):
            raise OSError("address already in use")

        monkeypatch.setattr("uvicorn.run", fake_run)
        code, _, err = run_cli(capsys, "serve")
        assert code == 2
        assert "address already in use" in err

    @pytest.mark.parametrize("server_code,expected", [(1, 2), (0, 0), (None, 0)])
    def test_server_exit_codes_are_translated(self, capsys, monkeypatch, server_code, expected):
        def fake_run(app, host, port, log_level):
            raise SystemExit(server_code)

        monkeypatch.setattr("uvicorn.run", fake_run)
        code, _, _ = run_cli(capsys, "serve")
        assert code == expected


class TestSeed:
    def test_seed_copies_every_packaged_asset(self, capsys, tmp_path):
        dest = tmp_path / "data"
        code, out, _ = run_cli(capsys, "seed", "--out", str(dest))
        assert code == 0
        payload = json.loads(out)
        assert payload["dest"] == str(dest)
        assert payload["files_written"] > 0
        for expected in (
            "schema/unified.graphql",
            "schema/aliases.json",
            "fixtures/v1/turbonomic.json",
            "fixtures/v1/apptio.json",
            "exemplars/bank.json",
            "scripts/demo_session.json",
            "groundtruth/review_onlineboutique.json",
            "queries/review_optimization.graphql",
        ):
            assert (dest / expected).is_file()

    def test_seed_skips_existing_unless_overwrite(self, capsys, tmp_path):
        dest = tmp_path / "data"
        _, out, _ = run_cli(capsys, "seed", "--out", str(dest))
        first = json.loads(out)["files_written"]
        code, out, _ = run_cli(capsys, "seed", "--out", str(dest))
        assert code == 0
        assert json.loads(out)["files_written"] == 0
        code, out, _ = run_cli(capsys, "seed", "--out", str(dest), "--overwrite")
        assert code == 0
        assert json.loads(out)["files_written"] == first

    def test_seed_default_destination(self, capsys):
        code, out, _ = run_cli(capsys, "seed")
        assert code == 0
        assert json.loads(out)["dest"] == "finops-data"
        assert Path("finops-data/schema/unified.graphql").is_file()

    def test_verbose_seed_lists_written_files(self, capsys, tmp_path):
        dest = tmp_path / "data"
        code, out, err = run_cli(capsys, "seed", "-v", "--out", str(dest))
        assert code == 0
        written = json.loads(out)["files_written"]
        assert len([line for line in err.splitlines() if line.startswith("wrote ")]) == written

    def test_seeded_tree_is_usable_as_configuration(self, capsys, tmp_path):
        dest = tmp_path / "data"
        run_cli(capsys, "seed", "--out", str(dest))
        code, out, _ = run_cli(
            capsys,
            "ask",
            USE_CASE_QUERY,
            "--backend",
            f"scripted:{dest / 'scripts' / 'demo_session.json'}",
            "--schema",
            str(dest / "schema" / "unified.graphql"),
            "--fixtures",
            str(dest / "fixtures" / "v1"),
            "--out",
            str(tmp_path / "runs"),
        )
        assert code == 0
        assert json.loads(out)["record_count"] == 3
