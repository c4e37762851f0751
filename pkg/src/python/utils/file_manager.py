"""
File Manager utility
Handles output directories, file listing and content hashing of run artefacts
"""

import hashlib
from pathlib import Path
from typing import Dict, List, Union

from src.python.utils.errors import IoError

PathLike = Union[str, Path]


class FileManager:
    """Manages run directories and artefact fingerprints"""

    def __init__(self, base_dir: PathLike):
        self.base_dir = Path(base_dir)

    def calculate_file_hash(self, file_path: PathLike) -> str:
        """Calculate SHA256 hash of file"""
        sha256_hash = hashlib.sha256()
        try:
            with open(file_path, "rb") as f:
                for byte_block in iter(lambda: f.read(4096), b""):
                    sha256_hash.update(byte_block)
        except OSError as exc:
            raise IoError(f"cannot hash {file_path}: {exc}") from exc
        return sha256_hash.hexdigest()

    def get_files_by_extension(self, directory: PathLike, extension: str) -> List[Path]:
        """Get all files with specific extension from directory, sorted"""
        directory_path = Path(directory)
        if not directory_path.exists():
            return []

        pattern = f"**/*{extension}" if not extension.startswith('*') else f"**/{extension}"
        return sorted(directory_path.glob(pattern))

    def ensure_output_directory(self, directory: PathLike) -> Path:
        """Ensure output directory exists"""
        path = Path(directory)
        try:
            path.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise IoError(f"cannot create directory {path}: {exc}") from exc
        return path

    def hash_tree(self, directory: PathLike = None, extension: str = '') -> Dict[str, str]:
        """Relative path -> SHA256 for every file under directory (default: base_dir)"""
        root = Path(directory) if directory is not None else self.base_dir
        files = [p for p in self.get_files_by_extension(root, extension or '*') if p.is_file()]
        return {p.relative_to(root).as_posix(): self.calculate_file_hash(p) for p in files}
