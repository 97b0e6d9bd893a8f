"""
End-to-end checks of both command-line entry points through click's runner.
"""

import json

import pytest
from click.testing import CliRunner

from lambdagent import __version__
from lambdagent.api.cli import cli
from lambdagent.api.harness_cli import harness


@pytest.fixture
def invoke():
    runner = CliRunner()

    def run(*args, group=cli, **kwargs):
        return runner.invoke(group, [str(a) for a in args], obj={}, **kwargs)

    return run


@pytest.fixture
def calc_files(data_dir):
    return data_dir / "react_calc.yaml", data_dir / "scripts" / "react_calc.yaml"


def test_version(invoke):
    result = invoke("version")
    assert result.exit_code == 0
    assert result.output.strip() == __version__


class TestCompile:
    def test_lambda_export(self, invoke, data_dir, golden):
        result = invoke("lambda", data_dir / "coder_agent.yaml")
        assert result.exit_code == 0
        assert result.output == golden("coder_agent.lambda")

    def test_compile_prints_type_and_term(self, invoke, calc_files, golden):
        result = invoke("compile", calc_files[0])
        assert result.exit_code == 0
        assert result.output == golden("compile_react_calc.txt")

    def test_structured(self, invoke, calc_files, golden):
        result = invoke("compile", calc_files[0], "--format", "structured")
        assert result.exit_code == 0
        assert result.output == golden("compile_react_calc.jsonl")
        assert json.loads(result.output)["agentId"] == "calculator"

    def test_lint_errors_block_compilation(self, invoke, tmp_path):
        config = tmp_path / "no_model.yaml"
        config.write_text("agentId: a\ntype: simple\nsystemPrompt: Hi.\n", encoding="utf-8")
        result = invoke("compile", config)
        assert result.exit_code == 2
        assert "L002" in result.output

    def test_force(self, invoke, tmp_path):
        config = tmp_path / "no_steps.yaml"
        config.write_text(
            "agentId: a\ntype: react\nmodel: m\nsystemPrompt: Go.\nreact: {maxSteps: 0}\nmcp: {localTools: [terminate]}\n",
            encoding="utf-8",
        )
        assert invoke("compile", config).exit_code == 2
        assert invoke("compile", config, "--force").exit_code == 0

    def test_library_errors_exit_two(self, invoke, tmp_path):
        config = tmp_path / "bad.yaml"
        config.write_text("agentId: a\ntype: swarm\n", encoding="utf-8")
        result = invoke("lambda", config)
        assert result.exit_code == 2
        assert "error:" in result.output


class TestRun:
    def test_scripted_run(self, invoke, calc_files):
        config, script = calc_files
        result = invoke("run", config, "3*5*7", "--oracle-script", script)
        assert result.exit_code == 0
        lines = result.output.splitlines()
        assert lines[0] == "105"
        assert lines[1].startswith("3 steps, ")

    def test_structured(self, invoke, calc_files):
        config, script = calc_files
        result = invoke("run", config, "3*5*7", "--oracle-script", script, "--format", "structured")
        payload = json.loads(result.output)
        assert (payload["ok"], payload["result"], payload["steps"]) == (True, "105", 3)

    def test_trace_round_trip(self, invoke, calc_files, tmp_path):
        config, script = calc_files
        trace_file = tmp_path / "run.jsonl"
        run = invoke("run", config, "3*5*7", "--oracle-script", script, "--trace-out", trace_file)
        shown = invoke("trace", trace_file)
        assert shown.exit_code == 0
        assert shown.output.splitlines()[-1] == run.output.splitlines()[-1]
        assert "tool calc('3*5') -> '15'" in shown.output

    def test_bad_trace_file(self, invoke, tmp_path):
        bogus = tmp_path / "bogus.jsonl"
        bogus.write_text("not json\n", encoding="utf-8")
        result = invoke("trace", bogus)
        assert result.exit_code == 2
        assert "not a trace file" in result.output

    def test_failed_outcome_exits_two(self, invoke, data_dir, tmp_path):
        script = tmp_path / "script.yaml"
        script.write_text('default: "ACTION: shell\\nARGS: ls"\n', encoding="utf-8")
        result = invoke("run", data_dir / "react_calc.yaml", "q", "--oracle-script", script)
        assert result.exit_code == 2

    def test_repl(self, invoke, calc_files):
        config, script = calc_files
        result = invoke("repl", config, "--oracle-script", script, input="3*5*7\n:memory\n:quit\nignored\n")
        assert result.exit_code == 0
        lines = result.output.splitlines()
        assert len(lines) == 3
        assert lines[0] == "105"
        assert lines[1].startswith("3 steps, ")
        assert lines[2] == "(empty)"


class TestLint:
    def test_single_file(self, invoke, data_dir):
        result = invoke("lint", data_dir / "crewai_analyst.yaml")
        assert result.exit_code == 1
        assert result.output.splitlines() == [
            "WARN  L017   react.maxSteps: not specified",
            "INFO  L004c  mcp.localTools: no terminate tool (CrewAI: handled by framework)",
        ]

    def test_directory(self, invoke, data_dir):
        result = invoke("lint", data_dir / "baselines", "--summary")
        assert result.exit_code == 0
        assert result.output.count("  clean") == 10
        assert "clean = 10 (100.0%)" in result.output

    def test_structured(self, invoke, data_dir):
        result = invoke("lint", data_dir / "crewai_analyst.yaml", "--format", "structured")
        rows = [json.loads(line) for line in result.output.splitlines()]
        assert [row["rule_id"] for row in rows] == ["L017", "L004c"]
        assert all(row["file"].endswith("crewai_analyst.yaml") for row in rows)

    def test_with_code(self, invoke, entangled_dir):
        case = entangled_dir / "fp_l001_01"
        plain = invoke("lint", case / "agent.yaml")
        joint = invoke("lint", case / "agent.yaml", "--with-code", case / "code")
        assert plain.exit_code == 2
        assert joint.exit_code == 0
        assert "supplied by code" in joint.output


class TestTools:
    def test_list(self, invoke):
        result = invoke("tools")
        assert result.exit_code == 0
        names = [line.split()[0] for line in result.output.splitlines()]
        assert "calc" in names
        assert not any(name.startswith("react.") for name in names)

    def test_invoke(self, invoke):
        assert invoke("tools", "--invoke", "calc", "--input", "2*3").output.strip() == "6"

    def test_unknown_tool(self, invoke):
        assert invoke("tools", "--invoke", "weather").exit_code == 2


class TestHarness:
    def test_matrix(self, invoke):
        result = invoke("run-matrix", group=harness)
        assert result.exit_code == 0
        assert result.output.splitlines()[-1].startswith("injected=42 detected=42")

    def test_cost_table(self, invoke):
        result = invoke("cost-table", "--format", "structured", group=harness)
        rows = [json.loads(line) for line in result.output.splitlines()]
        assert [row["actual"] for row in rows] == [4, 6, 40, 6]

    def test_joint(self, invoke, entangled_dir):
        result = invoke("joint", entangled_dir, group=harness)
        assert result.exit_code == 0
        assert "27/28 = 96.4%" in result.output
