"""
Logger utility for the word spotting pipeline
Console (stderr) and optional DEBUG file output, with helpers for sections,
steps, training iterations, adaptation cycles and mAP summaries
"""

import logging
import sys
from datetime import datetime
from pathlib import Path
from typing import Mapping, Optional, Union

FILE_FORMAT = logging.Formatter(
    '%(asctime)s - %(name)s - %(levelname)s - [%(filename)s:%(lineno)d] - %(message)s',
    datefmt='%Y-%m-%d %H:%M:%S'
)
CONSOLE_FORMAT = logging.Formatter('%(asctime)s - %(levelname)s - %(message)s', datefmt='%H:%M:%S')
SEPARATOR = "=" * 80


class PipelineLogger:
    """Centralized logger for every wordspot command.

    stdout is never written: `spot` prints its ranked TSV there.

    Attributes:
        logger (logging.Logger): Logger nomeado, sem propagação para o root
        log_file (Optional[Path]): Arquivo DEBUG da execução, quando log_dir é dado
    """

    def __init__(
        self,
        name: str = "wordspot_pipeline",
        log_dir: Optional[Union[str, Path]] = None,
        verbose: bool = False
    ):
        self.logger = logging.getLogger(name)
        self.logger.setLevel(logging.DEBUG)
        self.logger.handlers = []
        self.logger.propagate = False
        self.log_file: Optional[Path] = None

        console = logging.StreamHandler(sys.stderr)
        console.setLevel(logging.DEBUG if verbose else logging.INFO)
        console.setFormatter(CONSOLE_FORMAT)
        self.logger.addHandler(console)

        if log_dir:
            self.log_file = self._attach_file(Path(log_dir))
            self.logger.debug(f"Log file created: {self.log_file}")

    def _attach_file(self, log_dir: Path) -> Path:
        log_dir.mkdir(parents=True, exist_ok=True)
        path = log_dir / f"wordspot_{datetime.now().strftime('%Y%m%d_%H%M%S')}.log"
        handler = logging.FileHandler(path, encoding='utf-8')
        handler.setLevel(logging.DEBUG)
        handler.setFormatter(FILE_FORMAT)
        self.logger.addHandler(handler)
        return path

    def debug(self, message: str, exc_info: bool = False):
        self.logger.debug(message, exc_info=exc_info)

    def info(self, message: str):
        self.logger.info(message)

    def section(self, title: str):
        """Banner around a command"""
        self.logger.info(SEPARATOR)
        self.logger.info(f"  {title}")
        self.logger.info(SEPARATOR)

    def step(self, step_number: int, description: str):
        self.logger.info(f"[STEP {step_number}] {description}")

    def iteration(self, index: int, total: int, learning_rate: float, loss: float):
        """Training progress line (mean loss of the last logging window)"""
        self.logger.info(f"  iter {index}/{total}  lr={learning_rate:g}  loss={loss:.4f}")

    def cycle(self, cycle_index: int, total_cycles: int, message: str):
        self.logger.info(f"[CYCLE {cycle_index}/{total_cycles}] {message}")

    def metrics(self, prefix: str, scores: Mapping[str, float]):
        """One line with every protocol's mAP, protocols sorted"""
        parts = [f"{protocol} mAP {value:.4f}" for protocol, value in sorted(scores.items())]
        self.logger.info(f"{prefix}: {', '.join(parts) if parts else 'no mAP'}")
