from abc import ABC, abstractmethod
from typing import Any, Dict, List, Optional


class ArtifactStore(ABC):
    """Abstract base class for run artifact storage (models, tables, logs, calibrations)"""

    @abstractmethod
    def initialize(self) -> bool:
        """
        Initialize the store (create directories, validate access, etc.)

        Returns:
            True if successful, False otherwise
        """
        pass

    @abstractmethod
    def save_text(self, path: str, content: str) -> str:
        """
        Save text content

        Args:
            path: Relative path within the store (e.g., "pdf.csv")
            content: File content to save

        Returns:
            Location of the written artifact

        Raises:
            ArtifactExistsError: If the artifact exists and overwriting is not allowed
        """
        pass

    @abstractmethod
    def save_json(self, path: str, data: Any) -> str:
        """
        Save a JSON document

        Args:
            path: Relative path within the store
            data: JSON-serializable content

        Returns:
            Location of the written artifact
        """
        pass

    @abstractmethod
    def get_text(self, path: str) -> Optional[str]:
        """
        Get text content

        Args:
            path: Relative path within the store

        Returns:
            File content if found, None otherwise
        """
        pass

    @abstractmethod
    def exists(self, path: str) -> bool:
        pass

    @abstractmethod
    def health_check(self) -> Dict[str, Any]:
        """
        Perform a health check of the store

        Returns:
            Dictionary with health status information
        """
        pass

    @abstractmethod
    def check_writable(self, paths: List[str]) -> None:
        """
        Verify that none of the given artifacts would be overwritten

        Raises:
            ArtifactExistsError: If any of them exists and overwriting is not allowed
        """
        pass
