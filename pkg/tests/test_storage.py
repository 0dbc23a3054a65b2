import json
import pytest

from pdf_forge.core.config import settings
from pdf_forge.core.exceptions import ArtifactExistsError
from pdf_forge.storage import LocalDirectoryStore, get_artifact_store, reset_artifact_store


@pytest.fixture
def store(tmp_path):
    store = LocalDirectoryStore(str(tmp_path / "run"))
    assert store.initialize()
    return store


def test_save_and_read_back(store):
    path = store.save_text("pdf.csv", "v,pdf\n0,1\n")
    assert path.endswith("pdf.csv")
    assert store.exists("pdf.csv")
    assert store.get_text("pdf.csv") == "v,pdf\n0,1\n"
    assert store.get_text("missing.csv") is None
    assert [p.name for p in store.storage_path.iterdir()] == ["pdf.csv"]


def test_nested_paths_create_directories(store):
    store.save_text("calibration/desk.json", "{}")
    assert (store.storage_path / "calibration" / "desk.json").exists()


def test_refuses_to_overwrite(store):
    store.save_text("model.json", "{}")
    with pytest.raises(ArtifactExistsError) as info:
        store.save_text("model.json", "{}")
    assert info.value.exit_code == 3


def test_check_writable_lists_every_clash(store):
    store.save_text("a.csv", "")
    store.save_text("b.csv", "")
    with pytest.raises(ArtifactExistsError, match="a.csv, b.csv"):
        store.check_writable(["a.csv", "b.csv", "c.csv"])
    store.check_writable(["c.csv"])


def test_force_overwrites(tmp_path):
    first = LocalDirectoryStore(str(tmp_path / "run"))
    first.initialize()
    first.save_text("model.json", "old")
    forced = LocalDirectoryStore(str(tmp_path / "run"), force=True)
    forced.check_writable(["model.json"])
    forced.save_text("model.json", "new")
    assert forced.get_text("model.json") == "new"


def test_json_floats_round_trip(store):
    value = 0.1 + 0.2
    store.save_json("diagnostics.json", {"kl": value, "ks_p": None})
    assert json.loads(store.get_text("diagnostics.json")) == {"kl": value, "ks_p": None}


def test_health_check(store):
    store.save_text("x.txt", "")
    health = store.health_check()
    assert health["status"] == "healthy"
    assert health["backend"] == "local"
    assert health["artifacts_count"] == 1


def test_shared_store_is_a_singleton():
    shared = get_artifact_store()
    assert get_artifact_store() is shared
    assert str(shared.storage_path) == settings.artifacts_path
    reset_artifact_store()
    assert get_artifact_store() is not shared


def test_explicit_path_gets_a_fresh_store(tmp_path):
    one = get_artifact_store(str(tmp_path / "out"))
    two = get_artifact_store(str(tmp_path / "out"))
    assert one is not two
    assert (tmp_path / "out").is_dir()


def test_unknown_backend(monkeypatch):
    monkeypatch.setattr(settings, "storage_backend", "s3")
    with pytest.raises(ValueError):
        get_artifact_store()
