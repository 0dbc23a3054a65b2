"""Test fixtures."""
import os
import numpy as np
import pytest

from hypothesis import settings as hypothesis_settings, Verbosity

from pdf_forge.core.config import settings
from pdf_forge.engine.scoring import calibrate
from pdf_forge.models.sample import RawSample
from pdf_forge.storage.factory import reset_artifact_store


# register test flags for hypothesis; allows e.g. extended deadlines on CI
hypothesis_settings.register_profile("ci", deadline=None, max_examples=200)
hypothesis_settings.register_profile("dev", deadline=None, max_examples=10)
hypothesis_settings.register_profile("debug", deadline=None, max_examples=10, verbosity=Verbosity.verbose)
hypothesis_settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "dev"))


@pytest.fixture(scope="session")
def small_calibration():
    """A quick two-size calibration; enough resolution for coverage decisions in tests"""
    return calibrate([256, 1024], 2000, seed=20190101, verify=False)


@pytest.fixture
def calibration_file(tmp_path, small_calibration):
    path = tmp_path / "calibration.json"
    path.write_text(small_calibration.model_dump_json(indent=2))
    return str(path)


@pytest.fixture(autouse=True)
def isolated_artifacts(tmp_path, monkeypatch):
    """Keep the shared artifact store inside the test's tmp dir"""
    monkeypatch.setattr(settings, "artifacts_path", str(tmp_path / "artifacts"))
    reset_artifact_store()
    yield
    reset_artifact_store()


@pytest.fixture
def uniform_sample():
    rng = np.random.default_rng(11)
    return RawSample(values=rng.uniform(-1.0, 1.0, 512))


@pytest.fixture
def normal_sample():
    rng = np.random.default_rng(12)
    return RawSample(values=rng.standard_normal(1024))


@pytest.fixture
def uniform_sample_file(tmp_path):
    rng = np.random.default_rng(13)
    path = tmp_path / "uniform.txt"
    path.write_text("".join(f"{v:.17g}\n" for v in rng.uniform(-1.0, 1.0, 1024)))
    return str(path)
