"""
Exportador de relatórios em formato TSV
Avaliação mAP, traço da perda, confiança, reconhecimento e listas ranqueadas
"""
import sys
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, TextIO

import pandas as pd

from .base_reporter import BaseReporter

EVAL_COLUMNS = ['query_id', 'query', 'ap', 'num_relevant']
LOSS_COLUMNS = ['iteration', 'loss']
RECOGNITION_COLUMNS = ['path', 'label', 'dissimilarity', 'lexicon_index']
RANKED_COLUMNS = ['rank', 'item_id', 'path', 'dissimilarity']
CONFIDENCE_COLUMNS = ['id', 'path', 'measure', 'score']


class TsvReporter(BaseReporter):
    """Gera relatórios TSV (pandas) com rodapé opcional"""

    def write_frame(
        self,
        df: pd.DataFrame,
        stream: TextIO,
        footer: Optional[Sequence[str]] = None,
        float_format: str = '%.6f'
    ) -> None:
        df.to_csv(stream, sep='\t', index=False, float_format=float_format, lineterminator='\n')
        for line in footer or ():
            stream.write(f"{line}\n")

    def export(
        self,
        df: pd.DataFrame,
        report_name: str,
        footer: Optional[Sequence[str]] = None,
        float_format: str = '%.6f',
        required_columns: Optional[List[str]] = None,
        path: Optional[Path] = None
    ) -> Path:
        """
        Exporta DataFrame para TSV

        Args:
            df: DataFrame com os dados
            report_name: Nome do arquivo sem extensão
            footer: Linhas escritas após a tabela
            float_format: Formato dos números reais
            required_columns: Colunas obrigatórias
            path: Caminho explícito (ignora report_name)

        Returns:
            Path do arquivo gerado
        """
        self.validate_dataframe(df, required_columns, allow_empty=True)
        output_path = Path(path) if path is not None else self.get_output_path(report_name)
        return self.write_report(output_path, lambda f: self.write_frame(df, f, footer, float_format))

    # --- report builders ----------------------------------------------------

    def export_evaluation(self, result, report_name: str) -> Path:
        """Per-query APs with the `mAP<TAB>value` footer (4 decimals)"""
        df = pd.DataFrame(
            [(q.query_id, q.query, q.ap, q.num_relevant) for q in result.queries],
            columns=EVAL_COLUMNS,
        )
        return self.export(df, report_name, footer=[f"mAP\t{result.mean_ap:.4f}"],
                           required_columns=EVAL_COLUMNS)

    def export_loss_trace(self, losses: Sequence[float], report_name: str = 'loss_trace') -> Path:
        df = pd.DataFrame({'iteration': range(1, len(losses) + 1), 'loss': list(losses)}, columns=LOSS_COLUMNS)
        return self.export(df, report_name, float_format='%.8f', required_columns=LOSS_COLUMNS)

    def export_recognition(self, rows: Iterable[Dict], report_name: str = 'recognition') -> Path:
        df = pd.DataFrame(list(rows), columns=RECOGNITION_COLUMNS)
        return self.export(df, report_name, float_format='%.6f', required_columns=RECOGNITION_COLUMNS)

    def export_confidence(self, rows: Iterable[Dict], report_name: str = 'confidence_report') -> Path:
        """
        Uma linha por (imagem, medida); colunas pseudo_label/correct só quando presentes
        """
        df = pd.DataFrame(list(rows))
        if df.empty:
            df = pd.DataFrame(columns=CONFIDENCE_COLUMNS)
        return self.export(df, report_name, float_format='%.8f', required_columns=CONFIDENCE_COLUMNS)

    def ranked_frame(self, ranked, paths: Optional[Sequence[str]] = None, top_k: Optional[int] = None) -> pd.DataFrame:
        items = ranked.items if top_k is None else ranked.items[:top_k]
        return pd.DataFrame(
            [
                (rank, item_id, paths[item_id] if paths is not None else '', dissimilarity)
                for rank, (item_id, dissimilarity) in enumerate(items, 1)
            ],
            columns=RANKED_COLUMNS,
        )

    def print_ranked(self, ranked, paths: Optional[Sequence[str]] = None, top_k: Optional[int] = None,
                     stream: Optional[TextIO] = None) -> None:
        """Lista ranqueada em TSV (stdout por padrão), dissimilaridade com 4 casas"""
        self.write_frame(self.ranked_frame(ranked, paths, top_k), stream or sys.stdout, float_format='%.4f')
