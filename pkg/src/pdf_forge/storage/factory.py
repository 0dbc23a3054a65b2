from typing import Optional

from pdf_forge.core.config import settings
from pdf_forge.core.exceptions import SampleIOError
from pdf_forge.core.logging import get_logger
from pdf_forge.storage.base import ArtifactStore
from pdf_forge.storage.local import LocalDirectoryStore


logger = get_logger(__name__)


class ArtifactStoreFactory:
    """Factory class for creating artifact stores"""

    @staticmethod
    def create_store(path: Optional[str] = None, force: bool = False) -> ArtifactStore:
        """
        Create an artifact store based on configuration

        Args:
            path: Directory for the store; defaults to settings.artifacts_path
            force: Allow existing artifacts to be overwritten

        Raises:
            ValueError: If the storage backend configuration is invalid
        """
        backend_type = settings.storage_backend.lower()
        logger.debug(f"Creating artifact store: {backend_type}")

        if backend_type == "local":
            return LocalDirectoryStore(path or settings.artifacts_path, force=force)
        raise ValueError(f"Unsupported storage backend: {backend_type}")


# Global artifact store instance (the shared store under settings.artifacts_path)
_artifact_store: Optional[ArtifactStore] = None


def get_artifact_store(path: Optional[str] = None, force: bool = False) -> ArtifactStore:
    """
    Get an initialized artifact store.

    Without a path the shared store under settings.artifacts_path is returned
    (singleton pattern); with a path a fresh store is created for that run.
    """
    global _artifact_store

    if path is None and _artifact_store is not None:
        return _artifact_store

    store = ArtifactStoreFactory.create_store(path, force=force)
    if not store.initialize():
        raise SampleIOError(f"cannot create artifact directory {path or settings.artifacts_path}")

    if path is None:
        _artifact_store = store
        logger.info("Artifact store initialized successfully")
    return store


def reset_artifact_store():
    """Reset the shared artifact store (useful for testing)"""
    global _artifact_store
    _artifact_store = None
