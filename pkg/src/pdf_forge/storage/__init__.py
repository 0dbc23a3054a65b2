# Storage module
from .factory import get_artifact_store, reset_artifact_store
from .base import ArtifactStore
from .local import LocalDirectoryStore

__all__ = ["get_artifact_store", "reset_artifact_store", "ArtifactStore", "LocalDirectoryStore"]
