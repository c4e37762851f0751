"""
Test reporters
Relatórios TSV (pandas), lista ranqueada e log JSONL dos ciclos
"""

import io
import sys
from pathlib import Path

import pandas as pd
import pytest

# Add project root to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from src.python.reporters.run_log import RunLog
from src.python.reporters.tsv_reporter import CONFIDENCE_COLUMNS, TsvReporter
from src.python.spotting.evaluation import EvaluationResult, QueryResult
from src.python.spotting.retrieval import RankedList
from src.python.utils.file_manager import FileManager


@pytest.fixture
def reporter(tmp_path):
    return TsvReporter(tmp_path / 'reports')


def test_lazy_output_directory(tmp_path):
    lazy = TsvReporter(tmp_path / 'later', create=False)
    assert not (tmp_path / 'later').exists()
    lazy.export_loss_trace([0.5])
    assert (tmp_path / 'later' / 'loss_trace.tsv').is_file()


def test_evaluation_report_has_map_footer(reporter):
    result = EvaluationResult('qbs', [
        QueryResult(0, 'spot', 1.0, 3),
        QueryResult(1, 'word', 0.5, 2),
    ])
    lines = reporter.export_evaluation(result, 'eval_qbs').read_text(encoding='utf-8').splitlines()
    assert lines[0] == 'query_id\tquery\tap\tnum_relevant'
    assert lines[1] == '0\tspot\t1.000000\t3'
    assert lines[-1] == 'mAP\t0.7500'


def test_loss_trace(reporter):
    frame = pd.read_csv(reporter.export_loss_trace([0.7, 0.6, 0.5]), sep='\t')
    assert frame['iteration'].tolist() == [1, 2, 3]
    assert frame['loss'].tolist() == pytest.approx([0.7, 0.6, 0.5])


def test_confidence_report_keeps_optional_columns(reporter):
    rows = [
        {'id': 0, 'path': 'a.pgm', 'measure': 'sigmoid', 'score': 2.5, 'pseudo_label': 'ab', 'correct': 1},
        {'id': 1, 'path': 'b.pgm', 'measure': 'sigmoid', 'score': 1.5, 'pseudo_label': 'cd', 'correct': 0},
    ]
    frame = pd.read_csv(reporter.export_confidence(rows), sep='\t')
    assert frame.columns.tolist() == CONFIDENCE_COLUMNS + ['pseudo_label', 'correct']
    assert frame['correct'].tolist() == [1, 0]


def test_missing_columns_are_rejected(reporter):
    with pytest.raises(ValueError, match='Colunas faltando'):
        reporter.export_confidence([{'id': 0, 'path': 'a.pgm'}])


def test_print_ranked(reporter):
    ranked = RankedList('spot', [(2, 0.0), (0, 0.25), (1, 0.75)])
    stream = io.StringIO()
    reporter.print_ranked(ranked, paths=['a.pgm', 'b.pgm', 'c.pgm'], top_k=2, stream=stream)
    assert stream.getvalue().splitlines() == [
        'rank\titem_id\tpath\tdissimilarity',
        '1\t2\tc.pgm\t0.0000',
        '2\t0\ta.pgm\t0.2500',
    ]


def test_run_log_round_trip(tmp_path):
    log = RunLog(tmp_path / 'logs' / 'run_log.jsonl')
    log.append({'cycle': 1, 'b': 2.0, 'a': None})
    log.append({'cycle': 2})
    assert log.path.read_text(encoding='utf-8').splitlines()[0] == '{"a":null,"b":2.0,"cycle":1}'
    assert [r['cycle'] for r in log.read()] == [1, 2]
    assert RunLog(log.path).read() == []


def test_hash_tree_is_relative_and_sorted(tmp_path):
    (tmp_path / 'sub').mkdir()
    (tmp_path / 'sub' / 'b.txt').write_text('b', encoding='utf-8')
    (tmp_path / 'a.txt').write_text('a', encoding='utf-8')
    hashes = FileManager(tmp_path).hash_tree()
    assert list(hashes) == ['a.txt', 'sub/b.txt']
    assert hashes['a.txt'] == FileManager(tmp_path).calculate_file_hash(tmp_path / 'a.txt')
