"""
Benchmark runner
Times the three reasoning tasks on generated workloads, one run at a time
"""
import logging
import multiprocessing
import time
import tracemalloc
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, List, Optional, Tuple
from urllib.parse import quote

import httpx

from benchmark.generator import BENCH, BENCH_TIME, BENCH_USER, WorkloadSpec, generate_models, is_extension
from benchmark.records import BASELINE_TASK, TASKS, BenchRecord
from policy.to_graph import app_policy_to_graph, policy_to_graph, usage_context_graph
from rdf.turtle import parse_turtle, serialize_turtle
from reasoner.conformance import check_conformance
from reasoner.derivation import derive_policies
from reasoner.knowledge_base import assemble
from reasoner.models import ConflictKind, KnowledgeBase
from reasoner.obligations import check_obligations

logger = logging.getLogger(__name__)

# Forked workers inherit the loaded modules, so a run starts without re-importing the engine
_CONTEXT = multiprocessing.get_context("fork" if "fork" in multiprocessing.get_all_start_methods() else "spawn")

Task = Callable[[KnowledgeBase], int]


def _derived_terms(kb: KnowledgeBase) -> int:
    total = 0
    for derived in derive_policies(kb):
        policy = derived.policy.policy
        total += len(policy.attributes) + len(policy.tags) + len(policy.prohibitions) + len(policy.obligations)
    return total


TASK_FUNCTIONS: Dict[str, Task] = {
    "conformance": lambda kb: len(check_conformance(kb)),
    "obligation": lambda kb: len(check_obligations(kb)),
    "derivation": _derived_terms,
}


def _subtask(kind: ConflictKind) -> Task:
    return lambda kb: len(check_conformance(kb, kinds=[kind]))


def task_functions(subtasks: bool = False) -> Dict[str, Task]:
    """Task name -> function returning the result size"""
    tasks = dict(TASK_FUNCTIONS)
    if subtasks:
        for kind in ConflictKind:
            tasks[f"conformance:{kind.value}"] = _subtask(kind)
    return tasks


class Workload:
    """Turtle documents of one benchmark point, loaded afresh for every run"""

    def __init__(self, spec: WorkloadSpec, value: int):
        data_policies, app = generate_models(spec, value)
        self.data_uris = [str(policy_set.uri) for policy_set in data_policies]
        self.output_ports = [output.port_name for output in app.outputs]
        self.data_documents = [serialize_turtle(policy_to_graph(policy_set)) for policy_set in data_policies]
        self.app_document = serialize_turtle(app_policy_to_graph(app))
        self.context_document = serialize_turtle(usage_context_graph(BENCH_USER, app.id, BENCH_TIME))

    def load(self) -> KnowledgeBase:
        return assemble(
            parse_turtle(self.context_document),
            parse_turtle(self.app_document),
            [parse_turtle(document) for document in self.data_documents],
        )


def _measure(load: Callable[[], KnowledgeBase], task: Optional[Task],
             track_memory: bool) -> Tuple[float, float, int, Optional[float]]:
    """(wall ms, load ms, result size, peak KiB) of one load-then-task run"""
    if track_memory:
        tracemalloc.start()
    try:
        start = time.perf_counter()
        kb = load()
        loaded = time.perf_counter()
        if task is None:
            done = loaded
            size = len(kb.pairings)
        else:
            size = task(kb)
            done = time.perf_counter()
        peak = tracemalloc.get_traced_memory()[1] / 1024 if track_memory else None
    finally:
        if track_memory:
            tracemalloc.stop()
    return (done - start) * 1000, (loaded - start) * 1000, size, peak


def _run_once(workload: Workload, task_name: Optional[str], subtasks: bool, track_memory: bool,
              sender) -> None:
    """Worker body: one measured run, its outcome sent through `sender`"""
    try:
        task = task_functions(subtasks)[task_name] if task_name is not None else None
        sender.send(("ok", _measure(workload.load, task, track_memory)))
    except Exception as e:
        sender.send(("error", f"{type(e).__name__}: {e}"))
    finally:
        sender.close()


def _isolated_run(workload: Workload, task_name: Optional[str], spec: WorkloadSpec) -> Tuple[str, object]:
    """
    One run in its own process

    Returns:
        ("ok", measurement), ("error", message) or ("timeout", None); a
        timed-out worker is terminated before the next run starts
    """
    receiver, sender = _CONTEXT.Pipe(duplex=False)
    process = _CONTEXT.Process(
        target=_run_once, args=(workload, task_name, spec.subtasks, spec.track_memory, sender), daemon=True,
    )
    process.start()
    sender.close()
    try:
        if not receiver.poll(spec.timeout):
            process.terminate()
            return "timeout", None
        return receiver.recv()
    except EOFError:
        process.join()
        return "error", f"worker exited with code {process.exitcode}"
    finally:
        process.join()
        receiver.close()


def run_benchmark(spec: WorkloadSpec) -> List[BenchRecord]:
    """
    Run every (value, repeat, task) of a workload

    Each repeat records a baseline row (policy loading only) followed by one
    row per task; a task row's baseline_ms is the load time of that same run,
    so wall_ms - baseline_ms is the net reasoning time. Every run gets its
    own worker process; runs that time out or raise are recorded as rows.

    Args:
        spec: Workload to run; spec.endpoint switches to HTTP mode

    Returns:
        Records in run order
    """
    if spec.endpoint:
        return run_http_benchmark(spec)

    tasks = task_functions(spec.subtasks)
    extension = is_extension(spec.variable)
    records: List[BenchRecord] = []
    for value in spec.values:
        workload = Workload(spec, value)
        logger.info(f"Benchmark {spec.variable.value}={value}: {len(workload.data_documents)} data documents")
        for repeat in range(spec.repeats):
            for name in [BASELINE_TASK, *tasks]:
                status, outcome = _isolated_run(workload, None if name == BASELINE_TASK else name, spec)
                if status == "timeout":
                    logger.warning(f"Timeout after {spec.timeout}s: {spec.variable.value}={value} {name} #{repeat}")
                    records.append(BenchRecord(
                        variable=spec.variable.value, value=value, task=name, repeat=repeat,
                        wall_ms=spec.timeout * 1000, baseline_ms=0.0, timeout=True, extension=extension,
                    ))
                    continue
                if status == "error":
                    logger.error(f"Run failed: {spec.variable.value}={value} {name} #{repeat}: {outcome}")
                    records.append(BenchRecord(
                        variable=spec.variable.value, value=value, task=name, repeat=repeat,
                        wall_ms=0.0, baseline_ms=0.0, error=str(outcome), extension=extension,
                    ))
                    continue
                wall_ms, load_ms, size, peak = outcome  # type: ignore[misc]
                records.append(BenchRecord(
                    variable=spec.variable.value, value=value, task=name, repeat=repeat,
                    wall_ms=wall_ms, baseline_ms=load_ms, result_size=size, peak_kib=peak, extension=extension,
                ))
    return records


def run_stress(spec: WorkloadSpec, value: int, workers: int = 8, rounds: int = 4) -> int:
    """
    Run all tasks concurrently and compare with a serial run

    Not part of reported timings.

    Returns:
        Number of concurrent results that differ from the serial ones
    """
    workload = Workload(spec, value)
    kb = workload.load()
    expected = {name: task(kb) for name, task in TASK_FUNCTIONS.items()}
    jobs = [name for _ in range(rounds) for name in TASK_FUNCTIONS]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        results = list(executor.map(lambda name: (name, TASK_FUNCTIONS[name](workload.load())), jobs))
    mismatches = sum(1 for name, size in results if size != expected[name])
    logger.info(f"Stress {spec.variable.value}={value}: {len(results)} runs, {mismatches} mismatches")
    return mismatches


def _http_size(task: str, body: dict) -> int:
    if task == "conformance":
        return len(body["conflicts"])
    if task == "obligation":
        return len(body["obligations"])
    return body["attributes"] + body["tags"] + body["prohibitions"] + body["obligations"]


def run_http_benchmark(spec: WorkloadSpec) -> List[BenchRecord]:
    """
    End-to-end timings against a running service

    Data policies are uploaded once per value (one per data uri); each repeat
    registers the app policy (the baseline) and then times each request from
    sending it to receiving the result.
    """
    extension = is_extension(spec.variable)
    records: List[BenchRecord] = []
    with httpx.Client(base_url=spec.endpoint, timeout=spec.timeout) as client:
        for value in spec.values:
            workload = Workload(spec, value)
            uploaded = set()
            for uri, document in zip(workload.data_uris, workload.data_documents):
                if uri in uploaded:
                    continue
                uploaded.add(uri)
                client.put(f"/dtou/policy/{quote(uri, safe='')}", content=document.encode("utf-8")).raise_for_status()
            if len(uploaded) < len(workload.data_documents):
                logger.warning(f"HTTP mode stores one policy per data uri; {len(workload.data_documents) - len(uploaded)} skipped")

            for repeat in range(spec.repeats):
                start = time.perf_counter()
                response = client.post("/dtou/app-policy", content=workload.app_document.encode("utf-8"))
                response.raise_for_status()
                load_ms = (time.perf_counter() - start) * 1000
                registration_id = response.json()["registration_id"]
                records.append(BenchRecord(
                    variable=spec.variable.value, value=value, task=BASELINE_TASK, repeat=repeat,
                    wall_ms=load_ms, baseline_ms=load_ms, extension=extension,
                ))
                reasoning = {"registration_id": registration_id, "user": str(BENCH_USER), "time": BENCH_TIME}
                for task in TASKS:
                    start = time.perf_counter()
                    try:
                        if task == "derivation":
                            size = 0
                            for port in workload.output_ports:
                                body = client.post("/dtou/derive", json={
                                    "registration_id": registration_id, "output_port": port,
                                    "target_uri": str(BENCH[f"derived/{quote(port, safe='')}"]),
                                })
                                body.raise_for_status()
                                size += _http_size(task, body.json())
                        else:
                            path = "/dtou/conformance" if task == "conformance" else "/dtou/obligations"
                            body = client.post(path, json=reasoning)
                            body.raise_for_status()
                            size = _http_size(task, body.json())
                    except httpx.TimeoutException:
                        logger.warning(f"HTTP timeout: {spec.variable.value}={value} {task} #{repeat}")
                        records.append(BenchRecord(
                            variable=spec.variable.value, value=value, task=task, repeat=repeat,
                            wall_ms=spec.timeout * 1000, baseline_ms=0.0, timeout=True, extension=extension,
                        ))
                        continue
                    elapsed = (time.perf_counter() - start) * 1000
                    records.append(BenchRecord(
                        variable=spec.variable.value, value=value, task=task, repeat=repeat,
                        wall_ms=load_ms + elapsed, baseline_ms=load_ms, result_size=size, extension=extension,
                    ))
    return records
