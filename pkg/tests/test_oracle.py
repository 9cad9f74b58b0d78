import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from benchmark.generator import Variable, WorkloadSpec
from benchmark.runner import Workload
from conftest import fixture_text
from oracle import Oracle, derived_terms, random_documents
from reasoner.conformance import check_conformance
from reasoner.derivation import derive_policies
from reasoner.obligations import check_obligations

SMALL_COUNTS = {variable: 3 for variable in Variable}


def _assert_agrees(oracle: Oracle) -> None:
    kb = oracle.knowledge_base()
    assert check_conformance(kb) == oracle.conflicts()
    assert check_obligations(kb) == oracle.obligations()
    expected = oracle.derivations()
    derived = {d.output_port: derived_terms(d) for d in derive_policies(kb)}
    assert derived == expected


@pytest.mark.parametrize("seed", range(100))
def test_random_documents_agree_with_brute_force(seed):
    _assert_agrees(Oracle(*random_documents(seed)))


@settings(max_examples=50, deadline=None, derandomize=True)
@given(st.integers(min_value=100, max_value=10 ** 6))
def test_more_random_documents_agree(seed):
    _assert_agrees(Oracle(*random_documents(seed)))


@pytest.mark.parametrize("variable", [
    Variable.DATA_NUM_SECURITY,
    Variable.DATA_NUM_PROHIBITION,
    Variable.DATA_NUM_OBLIGATION,
    Variable.APP_NUM_DATA,
    Variable.APP_NUM_PURPOSE,
    Variable.APP_NUM_DELETE,
    Variable.APP_NUM_EDIT,
])
def test_generated_workloads_agree_with_brute_force(variable):
    workload = Workload(WorkloadSpec(variable=variable, values=[10], fixed_defaults=SMALL_COUNTS), 10)
    _assert_agrees(Oracle(workload.context_document, workload.app_document, workload.data_documents))


def test_fixtures_agree_with_brute_force():
    _assert_agrees(Oracle(
        fixture_text("alice-context.ttl"),
        fixture_text("happyshop-app.ttl"),
        [fixture_text("payment-info.ttl"), fixture_text("address.ttl")],
    ))
    _assert_agrees(Oracle(
        fixture_text("research-context.ttl"),
        fixture_text("research-app.ttl"),
        [fixture_text("shoe-size.ttl")],
    ))
