import math
import multiprocessing
import time

import openpyxl
import pytest
from fastapi.testclient import TestClient

import benchmark.runner as runner
import main
from benchmark.excel_export import SUMMARY_COLUMNS, records_to_excel, summarize
from benchmark.generator import Variable, WorkloadSpec, generate_models, generate_policies, is_extension
from benchmark.records import BASELINE_TASK, CSV_COLUMNS, TASKS, BenchRecord, check_scaling, emit_csv, net_time, read_csv
from benchmark.runner import TASK_FUNCTIONS, Workload, run_benchmark, run_stress
from policy.errors import DerivationError
from policy.extract import extract_app_policy, extract_data_policies
from policy.models import SECURITY
from rdf.turtle import parse_turtle, serialize_turtle
from reasoner.conformance import check_conformance
from reasoner.models import ConflictKind

SMALL_COUNTS = {variable: 4 for variable in Variable}


def _spec(variable: Variable = Variable.DATA_NUM_SECURITY, **kwargs) -> WorkloadSpec:
    kwargs.setdefault("fixed_defaults", SMALL_COUNTS)
    kwargs.setdefault("repeats", 1)
    return WorkloadSpec(variable=variable, **kwargs)


def _documents(spec: WorkloadSpec, value: int, seed=None):
    data, app, context = generate_policies(spec, value, seed)
    return [serialize_turtle(graph) for graph in data], serialize_turtle(app), serialize_turtle(context)


def test_same_seed_same_documents():
    assert _documents(_spec(), 6) == _documents(_spec(), 6)
    assert _documents(_spec(), 6) != _documents(_spec(), 6, seed=1)


@pytest.mark.parametrize("variable", list(Variable))
def test_generated_documents_extract(variable):
    data, app, _ = _documents(_spec(variable), 5)
    for document in data:
        assert len(extract_data_policies(parse_turtle(document))) == 1
    assert len(extract_app_policy(parse_turtle(app)).inputs) == 4


def test_swept_variable_sets_the_count():
    data_policies, app = generate_models(_spec(Variable.DATA_NUM_SECURITY), 7)
    assert all(sum(1 for tag in p.policy.tags if tag.category == SECURITY) == 7 for p in data_policies)
    data_policies, app = generate_models(_spec(Variable.APP_NUM_OUTPUT), 3)
    assert [output.port_name for output in app.outputs] == ["out0", "out1", "out2"]
    data_policies, _ = generate_models(_spec(Variable.APP_NUM_DATA), 9)
    assert len(data_policies) == 9


def test_no_prohibitions_no_prohibited_uses():
    kb = Workload(_spec(Variable.DATA_NUM_PROHIBITION, fixed_defaults={**SMALL_COUNTS, Variable.APP_NUM_DATA: 8}), 0).load()
    assert check_conformance(kb, kinds=[ConflictKind.PROHIBITED_USE]) == []


def test_extension_variables():
    assert not is_extension(Variable.APP_NUM_DELETE)
    assert is_extension(Variable.APP_NUM_EDIT)


def test_negative_values_are_rejected():
    with pytest.raises(ValueError):
        _spec(values=[10, -1])


def _record(value: int, net_ms: float, task: str = "conformance", **kwargs) -> BenchRecord:
    return BenchRecord(variable="data:tag:numSecurity", value=value, task=task, repeat=0,
                       wall_ms=5.0 + net_ms, baseline_ms=5.0, **kwargs)


def test_csv_round_trip(tmp_path):
    records = [_record(100, 1.25, peak_kib=12.5), _record(1000, 10.0, timeout=True, extension=True),
               _record(100, 0.0, task=BASELINE_TASK, result_size=4), _record(10, 0.0, error="DerivationError: x")]
    path = tmp_path / "out" / "bench.csv"
    emit_csv(records, path)
    assert path.read_text(encoding="utf-8").splitlines()[0] == ",".join(CSV_COLUMNS)
    assert read_csv(path) == records


def test_linear_scaling_passes():
    verdict = check_scaling([_record(100, 2.0), _record(1000, 20.0)], "data:tag:numSecurity", "conformance")
    assert verdict.ratio == pytest.approx(10.0)
    assert verdict.verdict == "PASS"


def test_quadratic_scaling_fails():
    verdict = check_scaling([_record(100, 2.0), _record(1000, 200.0)], "data:tag:numSecurity", "conformance")
    assert verdict.ratio == pytest.approx(100.0)
    assert verdict.verdict == "FAIL"


def test_scaling_needs_both_values():
    with pytest.raises(ValueError):
        check_scaling([_record(100, 2.0)], "data:tag:numSecurity", "conformance")


def test_timeouts_count_as_infinite():
    records = [_record(1000, 1.0), _record(1000, 1.0, timeout=True)]
    assert math.isinf(net_time(records, "data:tag:numSecurity", "conformance", 1000))
    assert net_time(records, "data:tag:numSecurity", "conformance", 10) is None


def test_smoke_run():
    records = run_benchmark(_spec(values=[2, 4], repeats=2))
    assert len(records) == 2 * 2 * (1 + len(TASKS))
    baselines = [r for r in records if r.task == BASELINE_TASK]
    assert len(baselines) == 4
    assert all(r.wall_ms == r.baseline_ms for r in baselines)
    for r in records:
        assert r.wall_ms >= r.baseline_ms >= 0
        assert not r.timeout
        assert r.extension is False


def test_result_sizes_match_the_tasks():
    spec = _spec(values=[3])
    kb = Workload(spec, 3).load()
    expected = {name: task(kb) for name, task in TASK_FUNCTIONS.items()}
    for record in run_benchmark(spec):
        if record.task != BASELINE_TASK:
            assert record.result_size == expected[record.task]


def test_subtasks_and_memory():
    records = run_benchmark(_spec(values=[2], subtasks=True, track_memory=True))
    tasks = {r.task for r in records}
    assert {f"conformance:{kind.value}" for kind in ConflictKind} <= tasks
    assert all(r.peak_kib is not None and r.peak_kib > 0 for r in records)


def test_slow_runs_time_out(monkeypatch):
    def slow(load, task, track_memory):
        time.sleep(0.5)
        return 1.0, 0.5, 0, None

    monkeypatch.setattr(runner, "_measure", slow)
    records = run_benchmark(_spec(values=[2], timeout=0.05))
    assert all(r.timeout for r in records)
    assert all(r.wall_ms == pytest.approx(50.0) for r in records)
    assert multiprocessing.active_children() == []


def test_failed_runs_are_recorded(monkeypatch):
    def broken(load, task, track_memory):
        raise DerivationError("out0", "cannot derive")

    monkeypatch.setattr(runner, "_measure", broken)
    records = run_benchmark(_spec(values=[2]))
    assert [r.task for r in records] == [BASELINE_TASK, *TASKS]
    assert all(r.error.startswith("DerivationError") for r in records)
    assert not any(r.timeout for r in records)
    assert math.isinf(net_time(records, "data:tag:numSecurity", "conformance", 2))


@pytest.mark.parametrize("value", [0, 1, 2, 3])
def test_fewer_data_policies_than_inputs(value):
    spec = _spec(Variable.APP_NUM_DATA, values=[value])
    data_policies, app = generate_models(spec, value)
    covered = {str(p.uri) for p in data_policies}
    for output in app.outputs:
        assert {str(app.input(port).data_uri) for port in output.from_ports} <= covered

    records = run_benchmark(spec)
    assert len(records) == 1 + len(TASKS)
    assert all(r.error is None and not r.timeout for r in records)


def test_concurrent_runs_agree_with_serial():
    assert run_stress(_spec(), 4, workers=4, rounds=2) == 0


def test_excel_export(tmp_path):
    records = [_record(100, 2.0), _record(100, 0.0, task=BASELINE_TASK), _record(1000, 3.0, timeout=True)]
    path = tmp_path / "bench.xlsx"
    records_to_excel(records, path, metadata={"seed": 0})

    wb = openpyxl.load_workbook(path)
    assert wb.sheetnames == ["Runs", "Summary", "Metadata"]
    runs = wb["Runs"]
    assert [cell.value for cell in runs[1]] == CSV_COLUMNS
    assert runs.max_row == 4
    assert runs.freeze_panes == "A2"
    assert runs["A1"].fill.start_color.rgb.endswith("366092")
    summary = wb["Summary"]
    assert [cell.value for cell in summary[1]] == SUMMARY_COLUMNS
    assert summary.max_row == 4
    assert summary.cell(row=4, column=7).value == "timeout"


def test_summary_uses_net_times():
    rows = summarize([_record(100, 2.0), _record(100, 4.0), _record(100, 0.0, task=BASELINE_TASK)])
    assert rows[0][:6] == ["data:tag:numSecurity", 100, "conformance", 2, 0, 0]
    assert rows[0][6] == pytest.approx(3.0)
    assert rows[1][6] == pytest.approx(5.0)


def test_http_mode_against_the_service(tmp_path, monkeypatch):
    monkeypatch.setenv("DTOU_STORE", str(tmp_path / "store"))
    monkeypatch.delenv("DTOU_STRICT", raising=False)
    monkeypatch.setattr(runner.httpx, "Client",
                        lambda base_url, timeout: TestClient(main.app, base_url=base_url))

    spec = _spec(Variable.DATA_NUM_OBLIGATION, values=[2], endpoint="http://testserver")
    records = run_benchmark(spec)
    assert [r.task for r in records] == [BASELINE_TASK, *TASKS]

    kb = Workload(spec, 2).load()
    sizes = {r.task: r.result_size for r in records}
    assert sizes["conformance"] == TASK_FUNCTIONS["conformance"](kb)
    assert sizes["obligation"] == TASK_FUNCTIONS["obligation"](kb)
    assert sizes["derivation"] == TASK_FUNCTIONS["derivation"](kb)
