"""
Test configuration loading
"""

import json
import sys
from pathlib import Path

import pytest

# Add project root to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from src.python.utils.config_loader import ConfigLoader, RunConfig, load_config
from src.python.utils.errors import ConfigError

CONFIG_DIR = project_root / 'inputs' / 'config'


def write_json(path: Path, data) -> Path:
    path.write_text(json.dumps(data), encoding='utf-8')
    return path


class TestShippedConfigs:

    def test_default_config_holds_reference_values(self):
        config = load_config(CONFIG_DIR / 'default_config.json')
        assert config.seed == 0
        assert config.phoc.to_config().dim == 540
        assert config.estimator.input_shape == (32, 96)
        schedule = config.training.schedule(seed=1)
        assert schedule.segments == ((70000, 1e-4), (10000, 1e-5))
        assert (schedule.batch_size, schedule.weight_decay) == (10, 5e-5)

        adapt = config.adapt.schedule(2, config.training)
        assert adapt.cycles == 20
        assert [adapt.fraction_for(k) for k in (10, 11)] == [0.1, 0.6]
        assert adapt.augmented_size == 10000
        assert adapt.learning_rate == 1e-5

    def test_desk_config(self):
        config = load_config(CONFIG_DIR / 'desk_config.json')
        assert config.seed == 7
        assert config.adapt.cycles == 6
        assert config.paths.output_dir == Path('outputs/desk')


class TestOverrides:

    def test_seed_and_output_override(self, tmp_path):
        path = write_json(tmp_path / 'c.json', {'seed': 1, 'paths': {'lexicon': 'words.txt'}})
        config = ConfigLoader(path).load(seed=99, output_dir=tmp_path / 'out')
        assert config.seed == 99
        assert config.paths.output_dir == tmp_path / 'out'
        assert config.paths.lexicon == Path('words.txt')

    def test_seed_is_required(self, tmp_path):
        with pytest.raises(ConfigError, match='seed'):
            load_config(write_json(tmp_path / 'c.json', {}))
        assert load_config(None, seed=3).seed == 3

    def test_underscore_keys_are_comments(self, tmp_path):
        config = load_config(write_json(tmp_path / 'c.json', {'_note': 'ignored', 'seed': 5}))
        assert config.seed == 5


class TestValidation:

    def test_errors_name_the_dotted_field(self, tmp_path):
        path = write_json(tmp_path / 'c.json', {'seed': 1, 'adapt': {'cycles': 0}})
        with pytest.raises(ConfigError, match=r'adapt\.cycles'):
            load_config(path)

    def test_style_ranges_are_validated(self, tmp_path):
        data = {'seed': 1, 'synth': {'styles': [{'id': 'x', 'stroke_width': [5.0, 2.0]}]}}
        with pytest.raises(ConfigError, match=r'synth\.styles\.0\.stroke_width'):
            load_config(write_json(tmp_path / 'c.json', data))

    def test_unknown_keys_are_rejected(self, tmp_path):
        with pytest.raises(ConfigError, match='trainnig'):
            load_config(write_json(tmp_path / 'c.json', {'seed': 1, 'trainnig': {}}))

    def test_measure_names_accept_dashes(self):
        config = RunConfig(seed=0, adapt={'measure': 'mc-dropout'})
        assert config.adapt.measure == 'mc_dropout'
        with pytest.raises(ValueError):
            RunConfig(seed=0, adapt={'measure': 'vibes'})

    def test_bad_phoc_alphabet(self):
        config = RunConfig(seed=0, phoc={'alphabet': 'aab'})
        with pytest.raises(ConfigError):
            config.phoc.to_config()

    def test_unknown_style(self):
        with pytest.raises(ConfigError):
            RunConfig(seed=0).synth.resolve_style('style_z')
        assert RunConfig(seed=0).synth.resolve_style('style_b').glyph_variant == 'block'

    def test_missing_and_broken_files(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / 'absent.json')
        broken = tmp_path / 'broken.json'
        broken.write_text('{"seed": ', encoding='utf-8')
        with pytest.raises(ConfigError):
            load_config(broken)
        with pytest.raises(ConfigError):
            load_config(write_json(tmp_path / 'list.json', [1, 2]))

    def test_require_reports_missing_paths(self, tmp_path):
        config = RunConfig(seed=0, paths={'lexicon': str(tmp_path / 'absent.txt')})
        with pytest.raises(ConfigError, match=r'paths\.lexicon'):
            config.require('paths.lexicon')
        with pytest.raises(ConfigError, match=r'paths\.model'):
            config.require('paths.model')
