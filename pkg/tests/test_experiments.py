import dataclasses
import json
from pathlib import Path

import pytest

from core.config import ConfigManager, ExperimentConfig
from core.exceptions import ConfigurationError, TrainingDivergedError, ValidationError
from experiments import (
    RunReport, grid_configs, load_report, report_table, run_experiment, run_grid,
    run_mlp, run_single,
)

CONFIG_DIR = Path(__file__).resolve().parent.parent / 'configs'


def _single_cfg(tmp_path, **overrides):
    raw = {
        'scenario': 'single',
        'p_d': 0.2,
        'samples': 5000,
        'out_dir': str(tmp_path),
        'dataset': {'n': 200, 'sigma': 1.0},
        'network': {'units': 20},
        'train': {'epochs': 5},
    }
    raw.update(overrides)
    return ExperimentConfig.from_dict(raw)


def _mlp_cfg(tmp_path, **overrides):
    raw = {
        'scenario': 'mlp',
        'p_d': 0.5,
        'samples': 20,
        'grid_points': 5,
        'out_dir': str(tmp_path),
        'dataset': {'kind': 'line', 'n': 200},
        'network': {'hidden': [8, 8]},
        'train': {'epochs': 3},
    }
    raw.update(overrides)
    return ExperimentConfig.from_dict(raw)


class TestExperimentConfig:
    def test_defaults_by_scenario(self):
        single = ExperimentConfig.from_dict({'scenario': 'single', 'p_d': 0.2})
        assert single.train.epochs == 600
        assert single.train.batch_size == 64 and single.adam.learning_rate == 1.2e-4
        assert single.samples == 1_000_000
        assert single.name == 'single_0.2_1'
        mlp = ExperimentConfig.from_dict({'scenario': 'mlp', 'p_d': 0.5})
        assert mlp.dataset.kind == 'diamond' and mlp.dataset.n == 32000
        assert mlp.train.epochs == 1000 and mlp.samples == 300
        assert mlp.train.batch_size == 32 and mlp.adam.learning_rate == 1e-3
        assert mlp.name == 'diamond_0.5_nobias'

    def test_round_trip(self, tmp_path):
        cfg = _mlp_cfg(tmp_path)
        assert ExperimentConfig.from_dict(cfg.to_dict()) == cfg

    def test_unknown_keys(self):
        with pytest.raises(ConfigurationError):
            ExperimentConfig.from_dict({'scenario': 'single', 'learning_rate': 1.0})
        with pytest.raises(ConfigurationError):
            ExperimentConfig.from_dict({'scenario': 'single', 'train': {'lr': 1.0}})

    @pytest.mark.parametrize("raw", [
        {'scenario': 'single', 'dataset': {'kind': 'line'}},
        {'scenario': 'mlp', 'dataset': {'kind': 'gaussian'}},
        {'scenario': 'other'},
        {'scenario': 'single', 'p_d': 1.0},
        {'scenario': 'single', 'samples': 1},
        {'scenario': 'single', 'p_d': '0.2'},
        {'scenario': 'single', 'samples': 10.5},
        {'scenario': 'single', 'train': {'epochs': True}},
        {'scenario': 'single', 'train': 5},
        {'scenario': 'mlp', 'network': {'hidden': [8, '8']}},
        {'scenario': 'mlp', 'dataset': {'kind': 'ramp'}},
        {'scenario': 'mlp', 'dataset': {'kind': 'ramp', 'knots': [[0, 0]]}},
        {'scenario': 'single', 'dataset': {'knots': [[0, 0], [1, 1]]}},
        {'scenario': 'grid', 'dataset': {'knots': [[0, 0], [1, 1]]}},
    ])
    def test_invalid(self, raw):
        with pytest.raises(ConfigurationError):
            ExperimentConfig.from_dict(raw)

    def test_custom_shape(self):
        cfg = ExperimentConfig.from_dict({'scenario': 'mlp', 'p_d': 0.5,
                                          'dataset': {'kind': 'ramp', 'knots': [[0, 0], [1, 1]]}})
        assert cfg.name == 'ramp_0.5_nobias'
        assert ExperimentConfig.from_dict(cfg.to_dict()) == cfg

    @pytest.mark.parametrize("path", sorted(CONFIG_DIR.glob('*.toml')), ids=lambda p: p.name)
    def test_shipped_configs_load(self, path):
        cfg = ConfigManager.load_experiment(path)
        assert cfg.scenario in ('single', 'mlp', 'grid')

    def test_hash_tracks_content(self, tmp_path):
        a, b = _single_cfg(tmp_path), _single_cfg(tmp_path)
        assert ConfigManager.config_hash(a) == ConfigManager.config_hash(b)
        b.seeds.mc = 99
        assert ConfigManager.config_hash(a) != ConfigManager.config_hash(b)


class TestRunSingle:
    def test_artifacts_and_report(self, tmp_path):
        cfg = _single_cfg(tmp_path)
        report = run_single(cfg)
        assert report.status == 'ok'
        assert report.theory['w'] == pytest.approx(10.0 / (20 * 0.8 + 0.2))
        for name in ('config', 'metadata', 'dataset', 'dataset_histogram', 'network',
                     'loss_trace', 'mc', 'mc_json', 'mc_histogram'):
            assert report.path(name).exists(), name
        assert report.config_hash == ConfigManager.config_hash(cfg)
        assert load_report(cfg.run_dir) == report

        metadata = json.loads(report.path('metadata').read_text())
        assert ExperimentConfig.from_dict(metadata['config']) == cfg
        assert metadata['seeds'] == {'init': 1, 'mask': 2, 'mc': 3}

        hist_lines = report.path('mc_histogram').read_text().splitlines()
        assert hist_lines[0] == 'bin_left,bin_right,count'
        assert sum(int(line.split(',')[2]) for line in hist_lines[1:]) == 5000

    def test_experimental_columns(self, tmp_path):
        report = run_single(_single_cfg(tmp_path))
        exp = report.experimental
        assert exp['mc_variance'] == pytest.approx(exp['exact_variance'], rel=0.1)
        assert exp['weight_dispersion'] >= 0.0

    def test_no_dropout_has_no_variance(self, tmp_path):
        report = run_single(_single_cfg(tmp_path, p_d=0.0))
        assert report.experimental['mc_variance'] < 1e-12

    def test_csv_outputs_are_byte_identical(self, tmp_path):
        first = run_single(_single_cfg(tmp_path / 'a'))
        second = run_single(_single_cfg(tmp_path / 'b'))
        csvs = sorted(p.name for p in Path(first.run_dir).glob('*.csv'))
        assert len(csvs) == 5
        for name in csvs:
            assert (Path(first.run_dir) / name).read_bytes() == \
                   (Path(second.run_dir) / name).read_bytes(), name

    def test_divergence_writes_failed_report(self, tmp_path):
        cfg = _single_cfg(tmp_path, p_d=0.0, adam={'learning_rate': 1e300},
                          dataset={'n': 8, 'sigma': 0.0})
        with pytest.raises(TrainingDivergedError):
            run_single(cfg)
        report = load_report(cfg.run_dir)
        assert report.status == 'failed'
        assert report.error['error'] == 'TrainingDivergedError'
        assert report.error['epoch'] >= 1

    def test_wrong_scenario(self, tmp_path):
        with pytest.raises(ValidationError):
            run_single(_mlp_cfg(tmp_path))


class TestRunMLP:
    def test_curve_and_summary(self, tmp_path):
        report = run_mlp(_mlp_cfg(tmp_path))
        lines = report.path('mc').read_text().splitlines()
        assert lines[0] == 'x,mean,sigma'
        assert len(lines) == 6
        assert set(report.experimental) >= {'mean_sigma', 'sigma_cv', 'sigma_abs_mean_corr',
                                            'target_mse', 'final_loss'}
        assert report.theory is None
        assert report.last_layer_bias is False

    def test_custom_shape(self, tmp_path):
        cfg = _mlp_cfg(tmp_path, dataset={'kind': 'ramp', 'n': 100,
                                          'knots': [[0.0, 0.0], [1.0, 0.5]]})
        report = run_mlp(cfg)
        assert report.dataset == 'ramp'
        target = report.path('target').read_text().splitlines()
        assert target[0] == 'x,target'
        assert target[-1] == '1.0,0.5'

    def test_wrong_scenario(self, tmp_path):
        with pytest.raises(ValidationError):
            run_mlp(_single_cfg(tmp_path))


class TestRunGrid:
    def test_variants(self, tmp_path):
        cfg = _mlp_cfg(tmp_path, scenario='grid', name='small_grid',
                       grid={'shapes': ['line', 'square'], 'p_ds': [0.5], 'biases': [True, False]})
        configs = grid_configs(cfg)
        assert [c.name for c in configs] == ['line_0.5_bias', 'line_0.5_nobias',
                                             'square_0.5_bias', 'square_0.5_nobias']
        assert all(c.run_dir.parent == cfg.run_dir for c in configs)

        reports = run_experiment(cfg)
        assert len(reports) == 4
        table = (cfg.run_dir / 'grid_table.csv').read_text().splitlines()
        assert table[0] == 'p_d,dataset,bias,mean_sigma,sigma_cv,sigma_abs_mean_corr,target_mse'
        assert len(table) == 5

    def test_axis_overrides(self, tmp_path):
        cfg = _mlp_cfg(tmp_path, scenario='grid')
        reports = run_grid(cfg, shapes=['triangle'], p_ds=[0.2], biases=[False])
        assert [r.name for r in reports] == ['triangle_0.2_nobias']


def _fake_single(p_d, dataset, w_exp, var_exp):
    return RunReport(scenario='single', name=f'{p_d}_{dataset}', p_d=p_d, dataset=dataset,
                     run_dir='.', config_hash='0',
                     theory={'w': 0.025, 'mean_f': 9.99, 'var_f': 0.05},
                     experimental={'w_mean': w_exp, 'mc_variance': var_exp})


class TestReportTable:
    def test_single_rows(self, tmp_path):
        reports = [_fake_single(0.2, "N(10,1)", 0.025, 0.058),
                   _fake_single(0.2, "N(10,10)", 0.026, 0.076)]
        table = report_table(reports, tmp_path / 'table')
        assert table.columns == ['p_d', 'dataset', 'w_theory', 'var_theory', 'w_exp', 'var_exp']
        assert table.rows[1] == [0.2, 'N(10,10)', 0.025, 0.05, 0.026, 0.076]
        csv_lines = (tmp_path / 'table.csv').read_text().splitlines()
        assert csv_lines[2] == '0.2,"N(10,10)",0.025,0.05,0.026,0.076'
        text = (tmp_path / 'table.txt').read_text().splitlines()
        assert len(text) == 3
        assert len({len(line) for line in text}) == 1
        assert '0.058' in text[1]

    def test_single_report(self):
        assert len(report_table([_fake_single(0.5, "N(10,1)", 0.04, 0.2)]).rows) == 1

    def test_empty(self):
        with pytest.raises(ValidationError):
            report_table([])

    def test_mixed_scenarios(self):
        mlp = dataclasses.replace(_fake_single(0.5, 'line', 0, 0), scenario='mlp')
        with pytest.raises(ValidationError):
            report_table([_fake_single(0.5, "N(10,1)", 0.04, 0.2), mlp])

    def test_from_run_directories(self, tmp_path):
        report = run_single(_single_cfg(tmp_path))
        table = report_table([report.run_dir])
        assert table.rows[0][0] == 0.2


@pytest.fixture(scope='module')
def single_reports(tmp_path_factory):
    out = tmp_path_factory.mktemp('single')
    reports = {}
    for path in sorted(CONFIG_DIR.glob('single_*.toml')):
        cfg = dataclasses.replace(ConfigManager.load_experiment(path), out_dir=str(out), workers=4)
        report = run_single(cfg)
        reports[(cfg.p_d, cfg.dataset.sigma)] = report
    return reports


@pytest.fixture(scope='module')
def mlp_reports(tmp_path_factory):
    out = tmp_path_factory.mktemp('mlp')
    reports = {}
    for path in sorted(CONFIG_DIR.glob('mlp_*.toml')):
        cfg = dataclasses.replace(ConfigManager.load_experiment(path), out_dir=str(out), workers=4)
        reports[cfg.name] = run_mlp(cfg)
    return reports


@pytest.mark.slow
class TestSingleLayerReproduction:
    @pytest.mark.parametrize("p_d, w_theory, var_theory", [(0.2, 0.025, 0.050), (0.5, 0.040, 0.199)])
    @pytest.mark.parametrize("sigma", [1.0, 10.0])
    def test_weights_and_variance(self, single_reports, p_d, w_theory, var_theory, sigma):
        report = single_reports[(p_d, sigma)]
        assert report.theory['w'] == pytest.approx(w_theory, abs=5e-4)
        assert report.experimental['w_mean'] == pytest.approx(w_theory, rel=0.05)
        ratio = report.experimental['mc_variance'] / report.theory['var_f']
        assert 0.9 <= ratio <= 1.8

    @pytest.mark.parametrize("p_d", [0.2, 0.5])
    def test_variance_independent_of_data_spread(self, single_reports, p_d):
        wide, narrow = single_reports[(p_d, 10.0)], single_reports[(p_d, 1.0)]
        ratio = wide.experimental['mc_variance'] / narrow.experimental['mc_variance']
        assert 0.7 <= ratio <= 1.7
        data_ratio = wide.experimental['data_variance'] / narrow.experimental['data_variance']
        assert data_ratio == pytest.approx(100, rel=0.1)

    @pytest.mark.parametrize("p_d", [0.2, 0.5])
    def test_weights_homogenize_on_narrow_data(self, single_reports, p_d):
        assert single_reports[(p_d, 1.0)].experimental['weight_dispersion'] < 0.15

    def test_table(self, single_reports):
        table = report_table(list(single_reports.values()))
        assert len(table.rows) == 4


@pytest.mark.slow
class TestMLPProperties:
    def test_last_layer_bias_collapses_variance(self, mlp_reports):
        with_bias = mlp_reports['diamond_0.5_bias'].experimental['mean_sigma']
        without = mlp_reports['diamond_0.5_nobias'].experimental['mean_sigma']
        assert with_bias <= 0.02
        assert with_bias <= 0.1 * without

    @pytest.mark.parametrize("name", ['diamond_0.5_nobias', 'diamond_0.2_nobias'])
    def test_constant_variance_without_bias(self, mlp_reports, name):
        assert mlp_reports[name].experimental['sigma_cv'] < 0.25

    def test_variance_grows_with_rate(self, mlp_reports):
        assert (mlp_reports['diamond_0.5_nobias'].experimental['mean_sigma']
                > mlp_reports['diamond_0.2_nobias'].experimental['mean_sigma'])

    @pytest.mark.parametrize("name", ['line_0.5_nobias', 'triangle_0.5_nobias'])
    def test_sigma_follows_output_magnitude(self, mlp_reports, name):
        assert mlp_reports[name].experimental['sigma_abs_mean_corr'] > 0.8
