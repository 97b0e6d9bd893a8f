import pytest

from lambdagent.core.errors import HarnessSetupError
from lambdagent.models.schemas import AgentType, CanonicalConfig, FaultKind
from lambdagent.services.benchmark import benchmark
from lambdagent.services.fault_harness import (
    Inapplicable,
    inject,
    load_baselines,
    matrix_table,
    render_report,
    run_matrix,
)
from lambdagent.services.lint_engine import lint


@pytest.fixture(scope="module")
def baselines():
    return load_baselines()


@pytest.fixture(scope="module")
def report(baselines):
    return run_matrix(baselines)


def test_shipped_baselines(baselines):
    names = [name for name, _ in baselines]
    assert len(names) == 10
    assert names == sorted(names)


class TestMatrix:
    def test_totals(self, report):
        assert (report.injected, report.detected, report.skipped_inapplicable) == (42, 42, 8)
        assert report.false_positives_on_baselines == 0
        assert report.recall == 1.0
        assert report.precision == 1.0

    def test_per_fault(self, report):
        assert report.per_fault[FaultKind.EMPTY_ROUTES].applicable == 4
        assert report.per_fault[FaultKind.EMPTY_SYSTEM_PROMPT].applicable == 10
        assert all(t.detected == t.applicable for t in report.per_fault.values())

    def test_cells_name_the_expected_rule(self, report):
        for cell in report.cells:
            if cell.applicable:
                assert cell.expected_rule in cell.new_errors

    def test_table(self, report):
        table = matrix_table(report)
        assert table.shape == (10, 5)
        assert table.loc["simple_qa", "EmptyRoutes"] == "n/a"
        assert table.loc["router_support", "EmptyRoutes"] == "detected"

    def test_render(self, report):
        assert render_report(report).splitlines()[-1] == (
            "injected=42 detected=42 recall=100.0% precision=100.0% baseline_fp=0 skipped=8"
        )


class TestInject:
    def test_inapplicable(self, baselines):
        simple = dict(baselines)["simple_qa"]
        assert isinstance(inject(simple, FaultKind.EMPTY_ROUTES), Inapplicable)
        assert isinstance(inject(simple, FaultKind.REMOVE_TERMINATE), Inapplicable)

    def test_first_target_in_pre_order(self, baselines):
        router = dict(baselines)["router_support"]
        mutated = inject(router, FaultKind.REMOVE_TERMINATE)
        assert mutated.routes.labeled["billing"].tools == ["invoice"]
        assert router.routes.labeled["billing"].tools == ["invoice", "terminate"]

    def test_online_terminate_removed(self, baselines):
        mutated = inject(dict(baselines)["react_search"], FaultKind.REMOVE_TERMINATE)
        assert not mutated.has_terminate
        assert [f.rule_id for f in lint(mutated)] == ["L004a"]

    def test_zero_steps_on_group_chat(self, baselines):
        mutated = inject(dict(baselines)["multi_agent_debate"], FaultKind.ZERO_MAX_STEPS)
        assert mutated.max_steps == 0


class TestDirtyBaseline:
    dirty = CanonicalConfig(agent_id="dirty", agent_type=AgentType.SIMPLE, system_prompt="Hi.")

    def test_refused(self):
        with pytest.raises(HarnessSetupError):
            run_matrix([("dirty", self.dirty)])

    def test_counted_when_allowed(self):
        report = run_matrix([("dirty", self.dirty)], allow_dirty=True)
        assert report.false_positives_on_baselines == 1
        assert report.precision < 1.0


@pytest.mark.slow
def test_benchmark_reports_every_operation():
    timings = benchmark(repeats=5)
    assert set(timings) == {
        "tool call", "3-stage compose", "if branch", "guard", "memory write", "trace log", "compile",
    }
    assert all(us >= 0 for us in timings.values())
