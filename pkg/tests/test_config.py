from pathlib import Path

from config import DEFAULT_VOCAB, load_settings
from rdf.namespaces import DEFAULT_PREFIXES, DTOU


def test_vocabulary_comes_from_settings():
    assert str(DTOU) == load_settings().vocab
    assert DEFAULT_PREFIXES[""] == load_settings().vocab


def test_vocabulary_follows_the_environment(monkeypatch):
    monkeypatch.setenv("DTOU_VOCAB", "http://example.org/v#")
    assert load_settings().vocab == "http://example.org/v#"
    monkeypatch.delenv("DTOU_VOCAB")
    assert load_settings().vocab == DEFAULT_VOCAB


def test_overrides_win_over_the_environment(monkeypatch):
    monkeypatch.setenv("DTOU_STORE", "/tmp/from-env")
    assert load_settings().store_dir == Path("/tmp/from-env")
    assert load_settings(store_dir=Path("/tmp/flag"), strict=None).store_dir == Path("/tmp/flag")
