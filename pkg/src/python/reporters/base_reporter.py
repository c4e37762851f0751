"""
Classe base para todos os relatórios
Diretório de saída (criado sob demanda), nomes dos arquivos e validação de DataFrames
"""
from pathlib import Path
from typing import Callable, Optional, Sequence, TextIO

import pandas as pd

from src.python.utils.errors import IoError


class BaseReporter:
    """Base dos relatórios de uma execução.

    Nomes de arquivo não levam data/hora: execuções com a mesma semente geram
    arquivos idênticos.

    Attributes:
        output_base (Path): Diretório onde os relatórios são gravados
        extension (str): Extensão padrão dos arquivos
    """

    extension = 'tsv'

    def __init__(self, output_base_path: Optional[Path] = None, create: bool = True):
        """
        Args:
            output_base_path: Diretório dos relatórios (padrão: <raiz>/outputs/reports)
            create: False adia a criação do diretório para a primeira escrita
        """
        if output_base_path is None:
            output_base_path = Path(__file__).resolve().parents[3] / 'outputs' / 'reports'
        self.output_base = Path(output_base_path)
        if create:
            self.ensure_output_base()

    def ensure_output_base(self) -> Path:
        try:
            self.output_base.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise IoError(f"cannot create report directory {self.output_base}: {exc}") from exc
        return self.output_base

    def get_output_path(self, report_name: str) -> Path:
        """<output_base>/<report_name>.<extension>"""
        return self.output_base / f"{report_name}.{self.extension}"

    def write_report(self, path: Path, write: Callable[[TextIO], None]) -> Path:
        """Abre `path` (UTF-8, '\\n') criando o diretório pai e repassa o arquivo a `write`"""
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            with open(path, 'w', encoding='utf-8', newline='') as f:
                write(f)
        except OSError as exc:
            raise IoError(f"cannot write report {path}: {exc}") from exc
        return path

    def validate_dataframe(
        self,
        df: pd.DataFrame,
        required_columns: Optional[Sequence[str]] = None,
        allow_empty: bool = False
    ) -> bool:
        """
        Confere linhas e colunas obrigatórias antes da escrita

        Raises:
            ValueError: DataFrame nulo, vazio (sem allow_empty) ou com colunas faltando
        """
        if df is None or (df.empty and not allow_empty):
            raise ValueError("DataFrame vazio ou nulo")

        missing = set(required_columns or ()) - set(df.columns)
        if missing:
            raise ValueError(f"Colunas faltando: {sorted(missing)}")
        return True
