#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""命令列介面：子命令、結束碼與輸出"""

import json

import pytest

from src.cli import EXIT_FAILURE, EXIT_OK, EXIT_USAGE, cli_dispatch
from src.core.scenario_loader import dump_config


@pytest.fixture
def scenario_file(tmp_path, depleting_config):
    path = tmp_path / 'short.yaml'
    path.write_text(dump_config(depleting_config.with_updates(n_paths=6)), encoding='utf-8')
    return path


def _lines(text):
    return dict(line.split('=', 1) for line in text.splitlines() if '=' in line and ' ' not in line)


class TestUsage:
    def test_version(self):
        assert cli_dispatch(['--version']) == EXIT_OK

    def test_unknown_subcommand(self):
        assert cli_dispatch(['explode']) == EXIT_USAGE

    def test_unknown_flag(self):
        assert cli_dispatch(['validate', 'table1_base', '--frobnicate']) == EXIT_USAGE

    def test_missing_scenario(self, capsys):
        assert cli_dispatch(['calibrate-zu0']) == EXIT_USAGE
        assert 'error: usage:' in capsys.readouterr().err

    def test_two_scenarios(self, scenario_file):
        assert cli_dispatch(['calibrate-zu0', 'table1_base', '--config', str(scenario_file)]) == EXIT_USAGE


class TestValidate:
    def test_preset(self, capsys):
        assert cli_dispatch(['validate', 'table1_base']) == EXIT_OK
        assert capsys.readouterr().out.startswith('ok: table1_base')

    def test_file_with_unknown_key(self, tmp_path, base_config, capsys):
        path = tmp_path / 'bad.yaml'
        path.write_text(dump_config(base_config).replace('  kappa: 3.0\n', '  kappa: 3.0\n  kapa: 1\n'),
                        encoding='utf-8')
        assert cli_dispatch(['validate', '--config', str(path)]) == EXIT_FAILURE
        err = capsys.readouterr().err
        assert 'ConfigValidationError' in err
        assert 'key=market.kapa' in err and 'line=' in err

    def test_missing_file(self, tmp_path, capsys):
        assert cli_dispatch(['validate', str(tmp_path / 'nope.yaml')]) == EXIT_FAILURE
        assert 'error: FileNotFoundError' in capsys.readouterr().err

    def test_scenario_file(self, scenario_file, capsys):
        assert cli_dispatch(['validate', str(scenario_file)]) == EXIT_OK
        assert capsys.readouterr().out.startswith(f'ok: {scenario_file}')


class TestCalibrateAndPresets:
    def test_calibrate_base(self, capsys):
        assert cli_dispatch(['calibrate-zu0', 'table1_base']) == EXIT_OK
        assert capsys.readouterr().out.strip() == '1296'

    def test_calibrate_target(self, capsys):
        assert cli_dispatch(['calibrate-zu0', '--preset', 'table1_bb', '--target', '0.04']) == EXIT_OK
        assert float(capsys.readouterr().out) == pytest.approx(1e-8 * 750.0 ** 4)

    def test_calibrate_bad_target(self, capsys):
        assert cli_dispatch(['calibrate-zu0', 'table1_base', '--target', '0']) == EXIT_FAILURE
        assert 'ConfigValidationError' in capsys.readouterr().err

    def test_unknown_preset(self):
        assert cli_dispatch(['calibrate-zu0', '--preset', 'table7']) == EXIT_FAILURE

    def test_presets(self, capsys):
        assert cli_dispatch(['presets']) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert len(lines) == 5
        assert lines[0].startswith('table1_base\tsteady_state')


class TestRuns:
    def test_montecarlo_is_reproducible(self, tmp_path, scenario_file, capsys):
        outputs = []
        for name in ('a', 'b'):
            code = cli_dispatch(['montecarlo', str(scenario_file), '--workers', '1',
                                 '--out', str(tmp_path / name)])
            assert code == EXIT_OK
            outputs.append(_lines(capsys.readouterr().out))
        assert outputs[0]['summary_checksum'] == outputs[1]['summary_checksum']
        assert outputs[0]['paths'] == '6'
        manifest = json.loads((tmp_path / 'a' / 'manifest.json').read_text(encoding='utf-8'))
        assert manifest['checksums']['summary.json'] == outputs[0]['summary_checksum']

    def test_montecarlo_overrides(self, tmp_path, scenario_file, capsys):
        code = cli_dispatch(['montecarlo', str(scenario_file), '--paths', '3', '--seed', '7',
                             '--workers', '1', '--write-paths', '--out', str(tmp_path)])
        assert code == EXIT_OK
        manifest = json.loads((tmp_path / 'manifest.json').read_text(encoding='utf-8'))
        assert manifest['n_paths'] == 3
        assert manifest['master_seed'] == 7
        assert (tmp_path / 'paths.csv').exists()

    def test_sweep(self, tmp_path, scenario_file, capsys):
        code = cli_dispatch(['sweep', str(scenario_file), '--parameter', 'zu0', '--values', '20', '40',
                             '--paths', '2', '--workers', '1', '--out', str(tmp_path)])
        assert code == EXIT_OK
        assert (tmp_path / 'sweep_summary.csv').exists()
        assert (tmp_path / '01_zu0=40' / 'eair_table.csv').exists()

    def test_empty_sweep(self, tmp_path, scenario_file):
        code = cli_dispatch(['sweep', str(scenario_file), '--parameter', 'theta', '--out', str(tmp_path)])
        assert code == EXIT_OK
        assert (tmp_path / 'manifest.json').exists()
        assert (tmp_path / 'sweep_summary.csv').exists()

    def test_lambda_values_need_f0(self, tmp_path, scenario_file):
        code = cli_dispatch(['sweep', str(scenario_file), '--parameter', 'zu0', '--values', '20',
                             '--lambda-values', '0.01', '--out', str(tmp_path)])
        assert code == EXIT_USAGE

    def test_simulate_path(self, tmp_path, scenario_file, capsys):
        code = cli_dispatch(['simulate', str(scenario_file), '--path', '0', '--out', str(tmp_path)])
        assert code == EXIT_OK
        assert _lines(capsys.readouterr().out)['path_index'] == '0'
        assert (tmp_path / 'path.csv').exists()

    def test_simulate_named_path(self, tmp_path, scenario_file, capsys):
        code = cli_dispatch(['simulate', str(scenario_file), '--path', 'pessimistic', '--out', str(tmp_path)])
        assert code == EXIT_OK
        manifest = json.loads((tmp_path / 'manifest.json').read_text(encoding='utf-8'))
        assert manifest['path'] == 'pessimistic'

    def test_simulate_bad_path(self, tmp_path, scenario_file):
        assert cli_dispatch(['simulate', str(scenario_file), '--path', 'median',
                             '--out', str(tmp_path)]) == EXIT_USAGE
