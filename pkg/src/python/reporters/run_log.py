"""
Run log: one JSON object per line, keys sorted, no timestamps
"""
import json
from pathlib import Path
from typing import Any, Dict, List, Union

from src.python.utils.errors import IoError


class RunLog:
    """Append-only JSONL log of cycle records"""

    def __init__(self, path: Union[str, Path], reset: bool = True):
        self.path = Path(path)
        try:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            if reset:
                self.path.write_text('', encoding='utf-8')
        except OSError as exc:
            raise IoError(f"cannot create run log {self.path}: {exc}") from exc

    def append(self, record: Dict[str, Any]) -> None:
        line = json.dumps(record, sort_keys=True, separators=(',', ':'))
        try:
            with open(self.path, 'a', encoding='utf-8') as f:
                f.write(line + '\n')
        except OSError as exc:
            raise IoError(f"cannot append to run log {self.path}: {exc}") from exc

    def read(self) -> List[Dict[str, Any]]:
        try:
            lines = self.path.read_text(encoding='utf-8').splitlines()
        except OSError as exc:
            raise IoError(f"cannot read run log {self.path}: {exc}") from exc
        return [json.loads(line) for line in lines if line.strip()]
