"""
Test command-line interface
Executa os subcomandos de ponta a ponta sobre corpora minúsculos e confere códigos de saída e artefatos
"""

import io
import json
import sys
from pathlib import Path

import pandas as pd
import pytest
from rich.console import Console

# Add project root to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from src.python.cli_interface import EXIT_OK, EXIT_RUNTIME, EXIT_USAGE, build_parser, run
from src.python.corpus.manifest import MANIFEST_NAME, Manifest
from src.python.main import ADAPTED_NAME, MODEL_NAME, RUN_LOG_NAME
from src.python.utils.file_manager import FileManager

from tests.conftest import tiny_architecture, write_corpus

WORDS = ['ab', 'ab', 'cafe', 'cafe', 'bed', 'bed', 'fade', 'fade']


def quiet_run(argv):
    return run([str(a) for a in argv], console=Console(file=io.StringIO()))


def write_config(tmp_path: Path, out_dir: Path, **paths) -> Path:
    config = {
        '_comment': 'tiny end-to-end run',
        'seed': 3,
        'phoc': {'levels': [1], 'alphabet': 'abcdef'},
        'estimator': {'input_height': 8, 'input_width': 12, 'architecture': tiny_architecture(6)},
        'training': {'segments': [[6, 0.001]], 'batch_size': 4, 'log_every': 0},
        'synth': {'words': ['ab', 'cafe', 'bed'], 'per_word': 2, 'scale_jitter': None},
        'adapt': {'cycles': 2, 'switch_after': 1, 'initial_fraction': 0.5, 'later_fraction': 1.0,
                  'augmented_size': 8, 'measure': 'entropy', 'mc_passes': 3},
        'paths': dict({'model': str(out_dir / MODEL_NAME), 'output_dir': str(out_dir)},
                      **{k: str(v) for k, v in paths.items()}),
    }
    path = tmp_path / 'config.json'
    path.write_text(json.dumps(config), encoding='utf-8')
    return path


@pytest.fixture
def workspace(tmp_path):
    """Labeled train/target/eval corpora, a word list and a config writing to tmp_path/out"""
    lexicon = tmp_path / 'lexicon.txt'
    lexicon.write_text('# words\nab\ncafe\nbed\nfade\n', encoding='utf-8')
    config = write_config(
        tmp_path, tmp_path / 'out',
        train_corpus=write_corpus(tmp_path / 'train', WORDS, seed=1),
        target_corpus=write_corpus(tmp_path / 'target', WORDS, seed=2),
        eval_corpus=write_corpus(tmp_path / 'eval', WORDS, seed=3),
        lexicon=lexicon,
    )
    return tmp_path, config


@pytest.fixture
def trained(workspace):
    root, config = workspace
    assert quiet_run(['train', '--config', config]) == EXIT_OK
    return root, config


class TestParser:

    def test_global_flags_on_every_subcommand(self):
        parser = build_parser()
        for command in ('synth', 'train', 'adapt', 'recognize', 'eval', 'confidence-report'):
            args = parser.parse_args([command, '--seed', '5', '--verbose'])
            assert (args.seed, args.verbose) == (5, True)
        args = parser.parse_args(['spot', '--query', 'ab'])
        assert (args.mode, args.top_k, args.oracle_gallery) == ('qbs', None, False)

    def test_measure_list(self):
        args = build_parser().parse_args(['confidence-report', '--measures', 'sigmoid,mc-dropout'])
        assert args.measures == ['sigmoid', 'mc_dropout']


class TestExitCodes:

    def test_usage_errors_exit_1(self, workspace):
        _, config = workspace
        assert quiet_run(['teleport']) == EXIT_USAGE
        assert quiet_run(['spot', '--config', config]) == EXIT_USAGE
        assert quiet_run(['spot', '--config', config, '--query', 'ab', '--top-k', '0']) == EXIT_USAGE
        assert quiet_run(['confidence-report', '--config', config, '--measures', 'vibes']) == EXIT_USAGE

    def test_config_errors_exit_1(self, tmp_path):
        missing_seed = tmp_path / 'no_seed.json'
        missing_seed.write_text('{}', encoding='utf-8')
        assert quiet_run(['train', '--config', missing_seed]) == EXIT_USAGE
        assert quiet_run(['train', '--config', tmp_path / 'absent.json']) == EXIT_USAGE

    def test_missing_model_exits_1_without_writing(self, workspace):
        root, config = workspace
        assert quiet_run(['eval', '--config', config]) == EXIT_USAGE
        assert not (root / 'out').exists()

    def test_corrupt_model_exits_2(self, trained):
        root, config = trained
        model = root / 'out' / MODEL_NAME
        data = bytearray(model.read_bytes())
        data[-6] ^= 0xFF
        model.write_bytes(bytes(data))
        assert quiet_run(['eval', '--config', config]) == EXIT_RUNTIME

    def test_unlabeled_eval_corpus_exits_2(self, trained):
        root, _ = trained
        config = write_config(
            root, root / 'out',
            eval_corpus=write_corpus(root / 'blind', WORDS, labeled=False),
        )
        assert quiet_run(['eval', '--config', config]) == EXIT_RUNTIME

    def test_oracle_measure_needs_labels(self, trained):
        root, _ = trained
        config = write_config(
            root, root / 'out',
            target_corpus=write_corpus(root / 'blind', WORDS, labeled=False),
            lexicon=root / 'lexicon.txt',
        )
        assert quiet_run(['adapt', '--config', config, '--confidence', 'oracle']) == EXIT_USAGE


class TestCommands:

    def test_synth_writes_corpus(self, workspace):
        root, config = workspace
        assert quiet_run(['synth', '--config', config, '--out', root / 'synth']) == EXIT_OK
        manifest = Manifest.load(root / 'synth' / MANIFEST_NAME)
        assert manifest.transcriptions() == ['ab', 'ab', 'cafe', 'cafe', 'bed', 'bed']
        assert all(manifest.resolve(entry).is_file() for entry in manifest.entries)

    def test_train_writes_model_and_loss_trace(self, trained):
        root, _ = trained
        assert (root / 'out' / MODEL_NAME).is_file()
        losses = pd.read_csv(root / 'out' / 'loss_trace.tsv', sep='\t')
        assert len(losses) == 6

    def test_adapt_writes_checkpoints_and_run_log(self, trained):
        root, config = trained
        assert quiet_run(['adapt', '--config', config]) == EXIT_OK
        out = root / 'out'
        assert (out / ADAPTED_NAME).is_file()
        assert sorted(p.name for p in (out / 'checkpoints').iterdir()) == ['cycle_1.wsaf', 'cycle_2.wsaf']
        records = [json.loads(line) for line in (out / RUN_LOG_NAME).read_text(encoding='utf-8').splitlines()]
        assert [r['cycle'] for r in records] == [1, 2]
        assert [r['selected'] for r in records] == [4, 8]
        assert records[0]['measure'] == 'entropy'
        assert set(records[0]['map']) == {'qbe', 'qbs'}

    def test_adapt_artefacts_depend_only_on_seed(self, trained):
        root, config = trained
        logs = []
        for seed, name in ((11, 'a'), (11, 'b'), (12, 'c')):
            assert quiet_run(['adapt', '--config', config, '--seed', seed, '--out', root / name]) == EXIT_OK
            logs.append((root / name / RUN_LOG_NAME).read_text(encoding='utf-8'))
        assert logs[0] == logs[1]
        assert logs[0] != logs[2]
        artefacts = [FileManager(root / name).hash_tree() for name in ('a', 'b')]
        assert artefacts[0] == artefacts[1]
        assert 'checkpoints/cycle_2.wsaf' in artefacts[0]

    def test_spot_with_oracle_gallery(self, trained, capsys):
        _, config = trained
        assert quiet_run(['spot', '--config', config, '--query', 'cafe', '--oracle-gallery', '--top-k', '3']) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == 'rank\titem_id\tpath\tdissimilarity'
        assert len(lines) == 4
        assert lines[1] == '1\t2\timages/002.pgm\t0.0000'
        assert lines[2] == '2\t3\timages/003.pgm\t0.0000'

    def test_spot_by_example(self, trained, capsys):
        root, config = trained
        query = root / 'target' / 'images' / '000.pgm'
        assert quiet_run(['spot', '--config', config, '--query', query, '--mode', 'qbe']) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert len(lines) == 1 + len(WORDS)
        own = [line for line in lines[1:] if line.split('\t')[1] == '0']
        assert own[0].endswith('\t0.0000')

    def test_recognize(self, trained):
        root, config = trained
        assert quiet_run(['recognize', '--config', config, '--closed-lexicon']) == EXIT_OK
        frame = pd.read_csv(root / 'out' / 'recognition.tsv', sep='\t')
        assert len(frame) == len(WORDS)
        assert set(frame['label']) <= {'ab', 'cafe', 'bed', 'fade'}

    def test_eval_writes_map_footer(self, trained):
        root, config = trained
        assert quiet_run(['eval', '--config', config, '--protocol', 'both']) == EXIT_OK
        for protocol in ('qbe', 'qbs'):
            last = (root / 'out' / f"eval_{protocol}.tsv").read_text(encoding='utf-8').splitlines()[-1]
            label, value = last.split('\t')
            assert label == 'mAP'
            assert 0.0 < float(value) <= 1.0

    def test_eval_with_stopwords(self, trained):
        root, config = trained
        stopwords = root / 'stop.txt'
        stopwords.write_text('ab\n', encoding='utf-8')
        assert quiet_run(['eval', '--config', config, '--protocol', 'qbs', '--stopwords', stopwords]) == EXIT_OK
        frame = pd.read_csv(root / 'out' / 'eval_qbs.tsv', sep='\t', skipfooter=1, engine='python')
        assert frame['query'].tolist() == ['cafe', 'bed', 'fade']

    def test_confidence_report_columns(self, trained):
        root, config = trained
        assert quiet_run(['confidence-report', '--config', config, '--measures', 'sigmoid,entropy,oracle']) == EXIT_OK
        frame = pd.read_csv(root / 'out' / 'confidence_report.tsv', sep='\t')
        assert frame.columns.tolist() == ['id', 'path', 'measure', 'score', 'pseudo_label', 'correct']
        assert len(frame) == 3 * len(WORDS)
        assert frame['measure'].unique().tolist() == ['sigmoid', 'entropy', 'oracle']
        assert (frame.loc[frame['measure'] == 'oracle', 'score'] <= 0).all()
