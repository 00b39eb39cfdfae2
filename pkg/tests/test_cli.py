import json
from pathlib import Path

import pytest

from experiments import RunReport
from experiments.cli import build_parser, main

SMALL_SINGLE = """\
scenario = "single"
p_d = 0.2
samples = 5000

[dataset]
n = 200

[network]
units = 20

[train]
epochs = 5
"""


def _run(capsys, *argv):
    code = main(['--log-level', 'ERROR', *map(str, argv)])
    return code, json.loads(capsys.readouterr().out)


class TestGenData:
    def test_shape_dataset(self, tmp_path, capsys):
        code, out = _run(capsys, 'gen-data', '--kind', 'line', '--n', 50, '--out-dir', tmp_path)
        assert code == 0
        assert Path(out['dataset']).exists()
        assert out['generator_id'] == 'line' and out['n'] == 50

    def test_negative_sigma_is_reported(self, tmp_path, capsys):
        code, out = _run(capsys, 'gen-data', '--sigma', -1, '--out-dir', tmp_path)
        assert code == 1
        assert out['error'] == 'ParameterError'


class TestTheory:
    def test_single_prediction(self, capsys):
        code, out = _run(capsys, 'theory', '--units', 500, '--p-d', 0.2)
        assert code == 0
        assert out['w_opt'] == pytest.approx(0.025, abs=5e-4)
        assert out['var_f'] == pytest.approx(0.050, abs=5e-4)

    def test_multiple_predictions(self, capsys):
        _, out = _run(capsys, 'theory', '--units', 500, '--p-d', 0.2, 0.5)
        assert [row['p_d'] for row in out] == [0.2, 0.5]

    def test_sweep(self, tmp_path, capsys):
        code, out = _run(capsys, 'theory', '--sweep', '--units', 10, 500,
                         '--p-d', 0.1, 0.2, 0.5, '--out-dir', tmp_path)
        assert code == 0 and out['rows'] == 6
        lines = Path(out['sweep']).read_text().splitlines()
        assert lines[0] == 'K,p_d,y_bar,w_opt,mean_f,var_f,bias'
        assert len(lines) == 7


class TestTrainAndEvaluate:
    def test_single_layer(self, tmp_path, capsys):
        _, data = _run(capsys, 'gen-data', '--n', 64, '--out-dir', tmp_path)
        code, trained = _run(capsys, 'train', '--data', data['dataset'], '--p-d', 0.2,
                             '--units', 10, '--epochs', 3, '--out-dir', tmp_path / 'train')
        assert code == 0
        assert Path(trained['loss_trace']).read_text().count('\n') == 4
        code, mc = _run(capsys, 'mc-eval', '--network', trained['network'],
                        '--samples', 1000, '--out-dir', tmp_path / 'mc')
        assert code == 0 and mc['points'] == 1

    def test_curve(self, tmp_path, capsys):
        _, data = _run(capsys, 'gen-data', '--kind', 'triangle', '--n', 64, '--out-dir', tmp_path)
        _, trained = _run(capsys, 'train', '--data', data['dataset'], '--p-d', 0.5,
                          '--hidden', 4, 4, '--epochs', 2, '--out-dir', tmp_path / 'train')
        code, mc = _run(capsys, 'mc-eval', '--network', trained['network'], '--samples', 20,
                        '--grid-points', 5, '--out-dir', tmp_path / 'mc')
        assert code == 0 and mc['points'] == 5
        assert Path(mc['mc']).read_text().splitlines()[0] == 'x,mean,sigma'

    def test_missing_network(self, tmp_path, capsys):
        code, out = _run(capsys, 'mc-eval', '--network', tmp_path / 'missing.json')
        assert code == 1
        assert out['error'] == 'ValidationError'


class TestRunAndReport:
    def test_run_with_overrides_then_report(self, tmp_path, capsys):
        config = tmp_path / 'small.toml'
        config.write_text(SMALL_SINGLE)
        code, report = _run(capsys, 'run', config, '--out-dir', tmp_path / 'runs',
                            '--seed', 7, '--samples', 2000)
        assert code == 0
        assert report['status'] == 'ok'
        assert report['seeds'] == {'init': 7, 'mask': 8, 'mc': 9}
        assert report['name'] == 'single_0.2_1'

        capsys.readouterr()
        assert main(['report', report['run_dir'], '--output', str(tmp_path / 'table')]) == 0
        text = capsys.readouterr().out.splitlines()
        assert text[0].split() == ['p_d', 'dataset', 'w_theory', 'var_theory', 'w_exp', 'var_exp']
        assert len(text) == 2
        assert (tmp_path / 'table.csv').exists()

    def test_unknown_config_key(self, tmp_path, capsys):
        config = tmp_path / 'bad.toml'
        config.write_text(SMALL_SINGLE + '\n[optimizer]\nname = "sgd"\n')
        code, out = _run(capsys, 'run', config)
        assert code == 1
        assert out['error'] == 'ConfigurationError'

    def test_mixed_reports(self, tmp_path, capsys):
        dirs = []
        for scenario in ('single', 'mlp'):
            run_dir = tmp_path / scenario
            run_dir.mkdir()
            RunReport(scenario=scenario, name=scenario, p_d=0.5, dataset='x',
                      run_dir=str(run_dir), config_hash='0').save()
            dirs.append(run_dir)
        code, out = _run(capsys, 'report', *dirs)
        assert code == 1
        assert out['error'] == 'ValidationError'
        assert out['scenarios'] == ['mlp', 'single']


class TestArguments:
    def test_subcommand_required(self):
        with pytest.raises(SystemExit) as excinfo:
            build_parser().parse_args([])
        assert excinfo.value.code == 2

    def test_bad_value(self):
        with pytest.raises(SystemExit) as excinfo:
            main(['theory', '--p-d', 'half'])
        assert excinfo.value.code == 2


class TestBadInputs:
    def test_corrupt_network_file(self, tmp_path, capsys):
        path = tmp_path / 'network.json'
        path.write_text('{"format": "mcd_lab.network/1", ')
        code, out = _run(capsys, 'mc-eval', '--network', path)
        assert code == 1
        assert out['error'] == 'ValidationError'

    def test_blank_lines_in_dataset_are_skipped(self, tmp_path, capsys):
        _, data = _run(capsys, 'gen-data', '--n', 16, '--out-dir', tmp_path)
        path = Path(data['dataset'])
        lines = path.read_text().splitlines()
        path.write_text('\n'.join(lines[:4] + [''] + lines[4:]) + '\n\n')
        code, trained = _run(capsys, 'train', '--data', path, '--p-d', 0.2, '--units', 4,
                             '--epochs', 1, '--out-dir', tmp_path / 'train')
        assert code == 0
        assert Path(trained['network']).exists()

    @pytest.mark.parametrize("row", ['0.5', '0.5,abc', '0.5,1.0,2.0'])
    def test_malformed_dataset_row(self, tmp_path, capsys, row):
        path = tmp_path / 'data.csv'
        path.write_text(f'x,y\n0.1,0.2\n{row}\n')
        code, out = _run(capsys, 'train', '--data', path, '--p-d', 0.2, '--epochs', 1)
        assert code == 1
        assert out['error'] == 'ValidationError'
        assert out['row'] == 2

    def test_config_value_of_wrong_type(self, tmp_path, capsys):
        config = tmp_path / 'typed.toml'
        config.write_text(SMALL_SINGLE.replace('p_d = 0.2', 'p_d = "0.2"'))
        code, out = _run(capsys, 'run', config)
        assert code == 1
        assert out['error'] == 'ConfigurationError'
        assert 'p_d' in out['message']

    def test_custom_shape_from_knots(self, tmp_path, capsys):
        code, out = _run(capsys, 'gen-data', '--kind', 'ramp', '--knots', '0,0', '1,0.5',
                         '--n', 20, '--out-dir', tmp_path)
        assert code == 0
        assert out['generator_id'] == 'ramp'
        assert out['params']['knots'] == [[0.0, 0.0], [1.0, 0.5]]

    def test_invalid_knots(self, tmp_path, capsys):
        code, out = _run(capsys, 'gen-data', '--kind', 'ramp', '--knots', '0.2,0', '1,1',
                         '--out-dir', tmp_path)
        assert code == 1
        assert out['error'] == 'ValidationError'

    def test_unknown_shape_without_knots(self, tmp_path, capsys):
        code, out = _run(capsys, 'gen-data', '--kind', 'ramp', '--out-dir', tmp_path)
        assert code == 1
        assert out['shape'] == 'ramp'
