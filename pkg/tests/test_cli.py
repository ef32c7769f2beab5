import glob
import json
import os

import pytest

from wagner import cli

CIRCLE = ['cos(t) - 1', 'sin(t)', '0', '0', 'sin(2*t)/4 - t/2']
POINTS = [{'x': [0, 0, 0, 0, 0], 'v': [1, 0, 0, 0]},
          {'x': [0.25, -0.5, 0.1, 0.3, 0.7], 'v': [0.6, -0.2, 0.9, 0.4]}]


def write_manifest(tmp_path, **fields):
    doc = {'m': 2, 'chart': 'HEIS5', 'metric': 'CURV5', 'points': POINTS}
    doc.update(fields)
    path = tmp_path / 'manifest.json'
    path.write_text(json.dumps(doc))
    return str(path)


def run(tmp_path, *argv, out='report.json'):
    out = str(tmp_path / out)
    code = cli.main(list(argv) + ['--out', out, '-q'])
    with open(out, encoding='utf-8') as f:
        return code, json.load(f)


def test_validate_passes(tmp_path):
    code, report = run(tmp_path, 'validate', '--manifest', write_manifest(tmp_path))
    assert code == cli.EXIT_PASS
    assert report['engine'] == 'wagner'
    assert report['command'] == 'validate'
    assert report['passed'] is True
    assert report['chart']['passed'] and report['metric']['passed']


def test_validate_degenerate_chart(tmp_path):
    manifest = write_manifest(tmp_path, chart={'gamma': ['0', '0', '0', '0']})
    code, report = run(tmp_path, 'validate', '--manifest', manifest)
    assert code == cli.EXIT_FAILURES
    assert report['chart']['points'][0]['rank'] == 0
    assert report['passed'] is False


def test_validate_inhomogeneous_metric(tmp_path):
    manifest = write_manifest(tmp_path, metric='v1^2 + v1')
    code, report = run(tmp_path, 'validate', '--manifest', manifest)
    assert code == cli.EXIT_FAILURES
    assert report['metric']['samples'][0]['euler_residual'] == pytest.approx(0.5)


def test_eval(tmp_path):
    code, report = run(tmp_path, 'eval', '--manifest', write_manifest(tmp_path))
    assert code == cli.EXIT_PASS
    origin = report['points'][0]
    assert origin['G'][0][1] == pytest.approx(1.0)
    assert origin['G_n'][1] == pytest.approx(-2.0)
    assert origin['R_hor'][1][0][1] == pytest.approx(1.0)
    assert origin['K_trace'][1] == pytest.approx(2.0)
    assert set(origin['residuals']) == {'metrizability', 'reeb_metrizability',
                                        'spray_euler', 'symmetry', 'trace_identity'}


def test_eval_options_reach_the_engine(tmp_path):
    manifest = write_manifest(tmp_path, options={'eq22_sigma': 0.25})
    code, report = run(tmp_path, 'eval', '--manifest', manifest)
    assert code == cli.EXIT_PASS
    assert report['options']['eq22_sigma'] == 0.25
    assert report['points'][0]['G_n'][1] == pytest.approx(-0.5)


def test_eval_is_deterministic(tmp_path):
    manifest = write_manifest(tmp_path, sample_box={'count': 2})
    cli.main(['eval', '--manifest', manifest, '--out', str(tmp_path / 'a.json'), '-q'])
    cli.main(['eval', '--manifest', manifest, '--out', str(tmp_path / 'b.json'), '-q'])
    assert (tmp_path / 'a.json').read_bytes() == (tmp_path / 'b.json').read_bytes()


def test_eval_threads_keep_order(tmp_path, monkeypatch):
    manifest = write_manifest(tmp_path, sample_box={'count': 2})
    cli.main(['eval', '--manifest', manifest, '--out', str(tmp_path / 'a.json'), '-q'])
    monkeypatch.setenv('WAGNER_THREADS', '3')
    cli.main(['eval', '--manifest', manifest, '--out', str(tmp_path / 'b.json'), '-q'])
    assert (tmp_path / 'a.json').read_bytes() == (tmp_path / 'b.json').read_bytes()


def test_eval_refuses_invalid_manifest(tmp_path):
    manifest = write_manifest(tmp_path, chart={'gamma': ['0', '0', '0', '0']})
    code, report = run(tmp_path, 'eval', '--manifest', manifest)
    assert code == cli.EXIT_FAILURES
    assert report['points'] == []
    code, report = run(tmp_path, 'eval', '--manifest', manifest, '--force')
    assert code == cli.EXIT_FAILURES
    assert report['points'][0]['error']['error'] == 'DegenerateContactError'
    assert report['points'][0]['error']['rank'] == 0


def test_brackets(tmp_path):
    manifest = write_manifest(tmp_path, metric='WARP5', points=POINTS[:1])
    code, report = run(tmp_path, 'brackets', '--manifest', manifest)
    assert code == cli.EXIT_PASS
    rows = report['points'][0]['brackets']
    assert len(rows) == 10
    assert rows[0]['pair'] == [1, 2]
    assert rows[-1]['pair'] == [4, 'n']


def test_scan(tmp_path):
    manifest = write_manifest(tmp_path, metric='WARP5', points=[], sample_box={'count': 3})
    logdir = str(tmp_path / 'runs')
    code, report = run(tmp_path, 'scan', '--manifest', manifest, '--logdir', logdir)
    assert code == cli.EXIT_PASS
    assert report['classification'] == 'flat'
    assert report['count'] == 3
    assert len(glob.glob(os.path.join(logdir, 'events.out.tfevents.*'))) == 1


def test_scan_reports_non_flat_as_pass(tmp_path):
    manifest = write_manifest(tmp_path, points=[], sample_box={'count': 2})
    code, report = run(tmp_path, 'scan', '--manifest', manifest)
    assert code == cli.EXIT_PASS
    assert report['classification'] == 'non-flat'


def test_transport(tmp_path):
    curves = [{'label': 'circle', 'components': CIRCLE, 't_span': [0, 6.283185307179586],
               'samples': 40, 'v0': [1, 0, 0, 0], 'max_drift': 1e-3}]
    manifest = write_manifest(tmp_path, metric='WARP5', curves=curves)
    code, report = run(tmp_path, 'transport', '--manifest', manifest)
    assert code == cli.EXIT_PASS
    row = report['curves'][0]
    assert row['trace'] == 'circle.csv'
    lines = (tmp_path / 'circle.csv').read_text().splitlines()
    assert lines[0] == 't,x1,x2,x3,x4,x5,v1,v2,v3,v4,F'
    assert len(lines) == 42


def test_transport_inadmissible_curve(tmp_path):
    curves = [{'label': 'reeb line', 'components': ['0', '0', '0', '0', 't'],
               't_span': [0, 1], 'samples': 5, 'v0': [1, 0, 0, 0]}]
    manifest = write_manifest(tmp_path, curves=curves)
    code, report = run(tmp_path, 'transport', '--manifest', manifest)
    assert code == cli.EXIT_FAILURES
    row = report['curves'][0]
    assert row['error']['error'] == 'InadmissibleCurveError'
    assert row['error']['defect'] == pytest.approx(1.0)


def test_unusable_manifest(tmp_path):
    path = tmp_path / 'broken.json'
    path.write_text('{')
    code, report = run(tmp_path, 'validate', '--manifest', str(path))
    assert code == cli.EXIT_UNUSABLE
    assert report['error'] == 'ManifestError'


def test_unusable_manifest_on_stdout(tmp_path, capsys):
    manifest = write_manifest(tmp_path, metric='v1 + * v2')
    assert cli.main(['validate', '--manifest', manifest, '-q']) == cli.EXIT_UNUSABLE
    report = json.loads(capsys.readouterr().out)
    assert report['offset'] == 5


def test_bad_thread_count(tmp_path, monkeypatch):
    monkeypatch.setenv('WAGNER_THREADS', 'many')
    code, report = run(tmp_path, 'validate', '--manifest', write_manifest(tmp_path))
    assert code == cli.EXIT_UNUSABLE
    assert report['error'] == 'ConfigurationError'


def test_parser():
    args = cli.build_parser().parse_args(['transport', '--manifest', 'm.json',
                                          '--trace-dir', 'traces'])
    assert args.trace_dir == 'traces'
    with pytest.raises(SystemExit):
        cli.build_parser().parse_args(['eval', '--manifest', 'm.json', '--logdir', 'x'])
    with pytest.raises(SystemExit):
        cli.build_parser().parse_args(['scan'])
