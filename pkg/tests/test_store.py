from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timedelta, timezone

import pytest

import store.store as store_module
from conftest import ADDRESS_URI, PAYMENT_URI, fixture_text
from store.models import Provenance
from store.store import PolicyStore, StoreValidationError


@pytest.fixture
def policy_store(tmp_path) -> PolicyStore:
    return PolicyStore(tmp_path / "store")


def _policy_for(uri: str) -> str:
    return fixture_text("payment-info.ttl").replace(f"<{PAYMENT_URI}>", f"<{uri}>")


def test_put_then_get(policy_store):
    document = fixture_text("payment-info.ttl")
    policy_store.put_policy(PAYMENT_URI, document)
    record = policy_store.get_policy(PAYMENT_URI)
    assert record.policy_document == document
    assert record.provenance is None
    assert [r.data_uri for r in policy_store.list_policies()] == [PAYMENT_URI]


def test_unknown_uri(policy_store):
    assert policy_store.get_policy("http://a.b/nothing") is None


def test_replace_keeps_one_record(policy_store):
    policy_store.put_policy(PAYMENT_URI, fixture_text("payment-info.ttl"))
    replacement = fixture_text("payment-info.ttl").replace(":prohibition :pr1.", ".")
    policy_store.put_policy(PAYMENT_URI, replacement)
    assert policy_store.get_policy(PAYMENT_URI).policy_document == replacement
    assert len(policy_store.list_policies()) == 1


@pytest.mark.parametrize("uri, document", [
    (PAYMENT_URI, "this is not turtle"),
    (PAYMENT_URI, fixture_text("payment-info.ttl").replace(":uri <http://a.b/payment-info>;", "")),
    (ADDRESS_URI, fixture_text("payment-info.ttl")),
    (PAYMENT_URI, fixture_text("payment-info.ttl") + fixture_text("address.ttl")),
])
def test_invalid_documents_are_not_stored(policy_store, uri, document):
    with pytest.raises(StoreValidationError):
        policy_store.put_policy(uri, document)
    assert policy_store.get_policy(uri) is None
    assert policy_store.list_policies() == []


def test_records_survive_a_restart(tmp_path):
    first = PolicyStore(tmp_path)
    first.put_policy(ADDRESS_URI, fixture_text("address.ttl"),
                     Provenance(app_name="http://happy.shop", output_port="out1-port"))
    registration = first.register_app(fixture_text("happyshop-app.ttl"))

    second = PolicyStore(tmp_path)
    record = second.get_policy(ADDRESS_URI)
    assert record.policy_document == fixture_text("address.ttl")
    assert record.provenance == Provenance(app_name="http://happy.shop", output_port="out1-port")
    assert record.created_at == first.get_policy(ADDRESS_URI).created_at
    assert second.get_app(registration.registration_id).app_policy_document == fixture_text("happyshop-app.ttl")


def test_concurrent_writes_of_distinct_uris(policy_store):
    uris = [f"http://a.b/item-{i}" for i in range(100)]

    def write_then_read(uri: str) -> bool:
        policy_store.put_policy(uri, _policy_for(uri))
        return policy_store.get_policy(uri).policy_document == _policy_for(uri)

    with ThreadPoolExecutor(max_workers=16) as pool:
        assert all(pool.map(write_then_read, uris))
    assert [record.data_uri for record in policy_store.list_policies()] == sorted(uris)
    assert all(PolicyStore(policy_store.root).get_policy(uri) is not None for uri in uris)


def test_registrations_get_distinct_ids(policy_store):
    document = fixture_text("happyshop-app.ttl")
    first = policy_store.register_app(document)
    second = policy_store.register_app(document)
    assert first.registration_id != second.registration_id
    assert len(first.registration_id) == 32
    assert first.expires_at - first.registered_at == timedelta(seconds=policy_store.registration_ttl)


def test_invalid_app_is_not_registered(policy_store):
    with pytest.raises(StoreValidationError):
        policy_store.register_app(fixture_text("payment-info.ttl"))


def test_expired_registration(policy_store, monkeypatch):
    long_ago = datetime.now(timezone.utc) - timedelta(days=2)
    monkeypatch.setattr(store_module, "_utcnow", lambda: long_ago)
    expired = policy_store.register_app(fixture_text("happyshop-app.ttl"))
    monkeypatch.undo()

    live = policy_store.register_app(fixture_text("happyshop-app.ttl"))
    assert policy_store.get_app(expired.registration_id) is None
    assert policy_store.purge_expired() == 1
    assert policy_store.get_app(live.registration_id) is not None
    assert not (policy_store.root / "apps" / f"{expired.registration_id}.ttl").exists()


def test_global_store_requires_init(monkeypatch):
    monkeypatch.setattr(store_module, "_store_instance", None)
    with pytest.raises(RuntimeError):
        store_module.get_store()
