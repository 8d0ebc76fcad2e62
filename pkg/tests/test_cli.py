# -*- coding: utf-8 -*-
"""Tests for the command line and report rendering."""
import json
import logging

import pytest
from click.testing import CliRunner

from acx import exceptions
from acx.cli import cli
from acx.corpus import builtin_mapping
from acx.mapping import SimulationDef
from acx.props import check_property_set
from acx.report import TextReportShape, build_report, get_report_shape, load_report, render, report_exit_code

from .conftest import DEFAULT_BOUND, corpus_document


@pytest.fixture
def runner():
    yield CliRunner()
    # handlers configured inside the runner point at its captured streams
    for name in ('', 'acx'):
        logging.getLogger(name).handlers.clear()
    logging.getLogger('acx').propagate = True


def run(runner, *args):
    return runner.invoke(cli, list(args), catch_exceptions=False)


class TestCheck:
    def test_holding_properties(self, runner, tmp_path):
        out = tmp_path / 'report.json'
        result = run(runner, 'check', 'acl-to-rbac', '--props', 'SCa,QPa,CS1,Rfwd', '--bound', '2,2,6',
                     '--out', str(out))
        assert result.exit_code == 0, result.output
        report = json.loads(out.read_text(encoding='utf-8'))
        assert [r['property'] for r in report['results']] == ['SCa', 'CS1', 'QPa', 'R→']
        assert report['exit_code'] == 0

    def test_failing_property(self, runner):
        assert run(runner, 'check', 'acl-to-rbac', '--props', 'SCs', '--bound', '2,1,4').exit_code == 1

    def test_contaminating_transfer(self, runner, tmp_path):
        out = tmp_path / 'report.json'
        result = run(runner, 'check', 'acl-transfer-contaminating', '--props', 'CTs', '--out', str(out))
        assert result.exit_code == 1
        cx = json.loads(out.read_text(encoding='utf-8'))['results'][0]['counterexample']
        assert cx['kind'] == 'trace' and cx['index'] == 0

    def test_malformed_file(self, runner, tmp_path):
        path = tmp_path / 'broken.json'
        path.write_text('{"name": "acl",')
        result = run(runner, 'check', str(path), '--props', 'SCa')
        assert result.exit_code == 2
        assert 'malformed JSON' in result.output

    def test_missing_command_rule(self, runner, tmp_path):
        doc = corpus_document('acl-to-rbac')
        doc['command_rules'] = [r for r in doc['command_rules'] if r['command'] != 'revoke']
        path = tmp_path / 'partial.json'
        path.write_text(json.dumps(doc))
        result = run(runner, 'check', str(path), '--props', 'SCa')
        assert result.exit_code == 2
        assert 'MissingCommandRule' in result.output

    @pytest.mark.parametrize('props', ['', 'SCa,XYz'])
    def test_bad_props(self, runner, props):
        assert run(runner, 'check', 'acl-to-rbac', '--props', props).exit_code == 2

    def test_bad_bound(self, runner):
        assert run(runner, 'check', 'acl-to-rbac', '--props', 'SCa', '--bound', '2,2').exit_code == 2

    def test_config_from_environment(self, runner, tmp_path):
        out = tmp_path / 'report.json'
        result = runner.invoke(cli, ['check', 'identity-acl', '--props', 'SCs', '--out', str(out)],
                               env={'ACX_CONFIG': json.dumps({'BOUND': [1, 0, 2]})}, catch_exceptions=False)
        assert result.exit_code == 0
        bound = json.loads(out.read_text(encoding='utf-8'))['bound']
        assert bound == {'atoms_per_sort': 1, 'max_new_atoms': 0, 'max_depth': 2}

    def test_report_round_trip(self, runner, tmp_path):
        out = tmp_path / 'report.json'
        first = run(runner, 'check', 'acl-transfer-clean', '--props', 'CS1,CSc', '--out', str(out))
        again = run(runner, 'report', str(out))
        assert first.exit_code == again.exit_code == 1
        assert 'CSc' in again.output and 'stutter' in again.output


class TestOtherCommands:
    def test_validate(self, runner):
        result = run(runner, 'validate', 'acl', 'acl-to-rbac')
        assert result.exit_code == 0
        assert 'ok system acl' in result.output
        assert 'ok mapping acl-to-rbac' in result.output

    def test_explore(self, runner):
        result = run(runner, 'explore', 'acl', '--bound', '1,0,4')
        assert result.exit_code == 0
        assert '"states": 2' in result.output

    def test_decompose(self, runner):
        result = run(runner, 'lattice', 'decompose', 'ALS')
        assert result.output.strip() == 'SCs QPa R↔'

    def test_compare(self, runner):
        assert run(runner, 'lattice', 'compare', 'TL-SMR', 'HMG+').output.strip() == 'StrictlyStronger'
        assert run(runner, 'lattice', 'compare', 'SCa', 'SCs,QPa').output.strip() == 'StrictlyWeaker'

    def test_unknown_simulation(self, runner):
        result = run(runner, 'lattice', 'compare', 'XYZ', 'ALS')
        assert result.exit_code == 2
        assert 'UnknownSimulation' in result.output

    def test_canonical(self, runner):
        assert run(runner, 'lattice', 'canonical', 'Ganta').exit_code == 2
        assert 'SSp' in run(runner, 'lattice', 'canonical', 'TL-SMR').output

    def test_closure(self, runner):
        assert run(runner, 'lattice', 'closure', 'Rbi').output.strip() == 'R→ R↔'


class TestReport:
    @pytest.fixture
    def report(self, transfer_clean):
        results = check_property_set(transfer_clean, DEFAULT_BOUND, 'SCa,CS1,CSc')
        return build_report(transfer_clean, DEFAULT_BOUND, results)

    def test_build(self, report):
        assert report['mapping'] == 'acl-transfer-clean'
        assert report['correspondence'] == 'SCa'
        assert report['strongest'] == {'SC': ['SCa'], 'CS': ['CSc']}
        assert report_exit_code(report) == 1

    def test_json_is_canonical(self, report):
        text = render(report, 'json')
        assert json.loads(text)['results'][1]['verdict'] == 'Fails'
        assert text == render(json.loads(text), 'json')

    def test_text(self, report):
        lines = render(report, 'text').splitlines()
        assert lines[0].startswith('acl-transfer-clean: acl-transfer -> acl [SCa, R→]')
        assert any(line.split()[:2] == ['CS1', 'Fails'] for line in lines)
        assert lines[-1] == 'exit code: 1'

    def test_shape_by_path(self):
        assert get_report_shape('acx.report.TextReportShape') is TextReportShape
        assert get_report_shape('json').create_body({'a': 1}) == '{\n  "a": 1\n}'

    def test_load_rejects_unknown_keys(self, report, tmp_path):
        path = tmp_path / 'report.json'
        path.write_text(json.dumps(dict(report, verdicts=[])))
        with pytest.raises(exceptions.InvalidDefinition):
            load_report(str(path))

    def test_exit_code_without_stored_value(self, report):
        stripped = {k: v for k, v in report.items() if k != 'exit_code'}
        assert report_exit_code(stripped) == 1

    def test_identity_report_passes(self):
        sim = SimulationDef.of(builtin_mapping('identity-acl'))
        report = build_report(sim, '1,0,2', check_property_set(sim, '1,0,2', ['SCs', 'Rbi']))
        assert report['exit_code'] == 0
