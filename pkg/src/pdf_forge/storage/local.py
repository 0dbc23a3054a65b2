import json

from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional

from pdf_forge.core.exceptions import ArtifactExistsError
from pdf_forge.core.logging import get_logger
from pdf_forge.storage.base import ArtifactStore


class LocalDirectoryStore(ArtifactStore):
    """Local directory store for run artifacts"""

    def __init__(self, storage_path: str, force: bool = False):
        """
        Initialize local directory storage

        Args:
            storage_path: Directory the artifacts are written to
            force: Allow existing artifacts to be overwritten
        """
        self.storage_path = Path(storage_path)
        self.force = force
        self.logger = get_logger(__name__)

    def initialize(self) -> bool:
        """Initialize the storage directory"""
        try:
            self.storage_path.mkdir(parents=True, exist_ok=True)
            self.logger.info(f"Initialized local artifact store at: {self.storage_path}")
            return True
        except OSError as e:
            self.logger.error(f"Failed to initialize local artifact store: {e}")
            return False

    def _resolve(self, path: str) -> Path:
        return self.storage_path / path

    def check_writable(self, paths: List[str]) -> None:
        """Fail before anything is written if any target already exists"""
        if self.force:
            return
        clashes = [p for p in paths if self.exists(p)]
        if clashes:
            raise ArtifactExistsError(
                f"refusing to overwrite {', '.join(clashes)} in {self.storage_path}; pass --force to replace them"
            )

    def save_text(self, path: str, content: str) -> str:
        file_path = self._resolve(path)
        if file_path.exists() and not self.force:
            raise ArtifactExistsError(f"refusing to overwrite {file_path}; pass --force to replace it")
        file_path.parent.mkdir(parents=True, exist_ok=True)
        file_path.write_text(content)
        self.logger.debug(f"Saved {file_path}")
        return str(file_path)

    def save_json(self, path: str, data: Any) -> str:
        # JSON float output is shortest round-trip, so reloads are bit-exact
        return self.save_text(path, json.dumps(data, indent=2, default=str))

    def get_text(self, path: str) -> Optional[str]:
        file_path = self._resolve(path)
        if not file_path.exists():
            return None
        return file_path.read_text()

    def exists(self, path: str) -> bool:
        return self._resolve(path).exists()

    def health_check(self) -> Dict[str, Any]:
        """Perform health check of local storage"""
        try:
            writable = self.storage_path.exists() and self.storage_path.is_dir()
            artifacts = [p.name for p in self.storage_path.iterdir()] if writable else []
            return {
                "status": "healthy" if writable else "unhealthy",
                "backend": "local",
                "storage_path": str(self.storage_path),
                "artifacts_count": len(artifacts),
                "timestamp": datetime.now().isoformat(),
            }
        except OSError as e:
            return {
                "status": "unhealthy",
                "backend": "local",
                "error": str(e),
                "timestamp": datetime.now().isoformat(),
            }
