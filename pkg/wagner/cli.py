"""Command line entry point.

Usage::

    wagner validate  --manifest heis5_curv5.json
    wagner eval      --manifest heis5_curv5.json --out eval.json
    wagner brackets  --manifest heis5_curv5.json
    wagner scan      --manifest heis5_warp5.json --logdir runs/warp5
    wagner transport --manifest heis5_rand5.json --out transport.json

Exit codes: 0 when every check passes, 1 when the report records failures,
2 when the manifest or the environment is unusable.
"""

import argparse
import logging
import os
import re
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__, report
from .chart import validate_chart
from .connection import solver_for
from .curvature import bracket_table, curvature_at, flatness_scan
from .errors import ManifestError, WagnerError
from .finsler import validate_metric
from .manifest import load_manifest
from .options import thread_count
from .transport import transport

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_FAILURES = 1
EXIT_UNUSABLE = 2

METRIZABILITY_TOLERANCE = 1e-8
SYMMETRY_TOLERANCE = 1e-10
SPRAY_TOLERANCE = 1e-10


def _error(e):
    fields = e.fields() if isinstance(e, WagnerError) else {}
    return dict({'error': type(e).__name__, 'message': str(e)}, **fields)


def _point(p):
    return {'x': list(p.x), 'v': list(p.v)}


def _ordered_map(func, items, threads):
    """``func`` over ``items`` in input order, with up to ``threads`` workers."""
    if threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(func, items))
    return [func(item) for item in items]


def _guarded(func):
    """Per-item wrapper turning engine errors into recorded failures."""
    def run(p):
        try:
            return func(p)
        except WagnerError as e:
            logger.warning('point x=%s, v=%s failed: %s', list(p.x), list(p.v), e)
            return dict(_point(p), passed=False, error=_error(e))
    return run


def _validation(manifest, points):
    chart, metric = manifest.chart, manifest.metric
    bases = []
    for p in points:
        if p.x not in bases:
            bases.append(p.x)
    chart_rows = validate_chart(chart, bases, manifest.options)
    diagnostics = validate_metric(metric, chart, points)
    metric_rows = [{'x': list(s.x), 'v': list(s.v), 'F': s.F,
                    'euler_residual': s.euler_residual,
                    'second_euler_residual': s.second_euler_residual,
                    'positive': s.positive, 'definite': s.definite,
                    'min_eigenvalue': s.min_eigenvalue, 'passed': s.passed,
                    'error': s.error}
                   for s in diagnostics.samples]
    chart_passed = all(row['passed'] for row in chart_rows)
    return {
        'chart': {'name': chart.name, 'passed': chart_passed, 'points': chart_rows},
        'metric': {'label': metric.label, 'passed': diagnostics.passed,
                   'max_euler_residual': diagnostics.max_euler_residual,
                   'samples': metric_rows},
        'passed': chart_passed and diagnostics.passed,
    }


def cmd_validate(manifest, args, threads):
    """Contact rank, Reeb defect and metric conditions over the sweep points."""
    validation = _validation(manifest, manifest.sweep_points())
    return validation, validation['passed']


def _evaluate_point(manifest):
    fm, chart, options = manifest.metric, manifest.chart, manifest.options
    solver = solver_for(fm, chart, options)

    def one(p):
        curvature = curvature_at(fm, chart, p, options)
        evaluation = solver.evaluate(p, 'nested')
        scale = max(1.0, abs(evaluation.F_value))
        metrizability = float(np.max(np.abs(evaluation.metrizability)))
        passed = (metrizability <= METRIZABILITY_TOLERANCE * scale
                  and evaluation.symmetry <= SYMMETRY_TOLERANCE * scale
                  and evaluation.euler_spray <= SPRAY_TOLERANCE)
        return dict(_point(p), **{
            'F': evaluation.F_value,
            'G': evaluation.G,
            'G_vert': evaluation.G_vert,
            'G_n': evaluation.G_n,
            'K': evaluation.K,
            'P': evaluation.P,
            'R_hor': curvature.R_hor,
            'R_mixed': curvature.R_mixed,
            'K_trace': curvature.K_trace,
            'residuals': {
                'metrizability': evaluation.metrizability,
                'reeb_metrizability': evaluation.reeb_metrizability,
                'spray_euler': evaluation.euler_spray,
                'symmetry': evaluation.symmetry,
                'trace_identity': curvature.trace_residual,
            },
            'passed': bool(passed),
        })
    return one


def cmd_eval(manifest, args, threads):
    """Connection and curvature tensors at every evaluation point."""
    points = manifest.sweep_points()
    validation = _validation(manifest, points)
    body = {'validation': validation, 'points': []}
    if not validation['passed']:
        if not args.force:
            logger.warning('manifest does not validate; rerun with --force to evaluate anyway')
            return body, False
        logger.warning('evaluating a manifest that does not validate (--force)')
    rows = _ordered_map(_guarded(_evaluate_point(manifest)), points, threads)
    body['points'] = rows
    return body, validation['passed'] and all(row['passed'] for row in rows)


def cmd_brackets(manifest, args, threads):
    """Bracket oracle against the curvature formulas at every evaluation point."""
    fm, chart, options = manifest.metric, manifest.chart, manifest.options

    def one(p):
        rows = bracket_table(fm, chart, p, options)
        return dict(_point(p), brackets=rows, passed=all(row['passed'] for row in rows))

    rows = _ordered_map(_guarded(one), manifest.sweep_points(), threads)
    return {'points': rows}, all(row['passed'] for row in rows)


def cmd_scan(manifest, args, threads):
    """Flatness classification over the sweep points."""
    result = flatness_scan(manifest.metric, manifest.chart, manifest.sweep_points(),
                           manifest.options, threads)
    if args.logdir:
        from .writer import SummaryWriter
        with SummaryWriter(args.logdir) as writer:
            writer.add_scan('scan/%s' % manifest.metric.label, result)
    body = {
        'classification': result.classification,
        'count': result.count,
        'max_R_hor': result.max_R_hor,
        'argmax_R_hor': _point(result.argmax_R_hor),
        'max_R_mixed': result.max_R_mixed,
        'argmax_R_mixed': _point(result.argmax_R_mixed),
        'per_sample': [list(pair) for pair in result.per_sample],
    }
    return body, True


def _trace_name(label):
    return re.sub(r'[^\w.-]', '_', label) + '.csv'


def cmd_transport(manifest, args, threads):
    """Transport along every manifest curve; CSV traces go next to the report."""
    fm, chart, options = manifest.metric, manifest.chart, manifest.options
    trace_dir = args.trace_dir
    if trace_dir is None and args.out:
        trace_dir = os.path.dirname(os.path.abspath(args.out))
    writer = None
    if args.logdir:
        from .writer import SummaryWriter
        writer = SummaryWriter(args.logdir)
    rows = []
    try:
        for entry in manifest.curves:
            curve = entry.curve
            row = {'label': curve.label, 'mode': entry.mode, 'samples': curve.samples,
                   't_span': list(curve.t_span), 'v0': list(entry.v0)}
            try:
                result = transport(fm, chart, curve, entry.v0, entry.mode, options=options)
            except WagnerError as e:
                logger.warning('transport along %s failed: %s', curve.label, e)
                row.update(passed=False, error=_error(e))
                rows.append(row)
                continue
            passed = entry.max_drift is None or result.F_drift <= entry.max_drift
            row.update(F_drift=result.F_drift, max_drift=entry.max_drift,
                       final_v=result.final_v, trace=None, passed=passed)
            if trace_dir is not None:
                path = os.path.join(trace_dir, _trace_name(curve.label))
                with open(path, 'w', encoding='utf-8', newline='') as f:
                    report.trace_csv(result, chart, f)
                row['trace'] = os.path.basename(path)
            if writer is not None:
                writer.add_trace('transport/%s' % curve.label, result)
            rows.append(row)
    finally:
        if writer is not None:
            writer.close()
    if not rows:
        logger.warning('manifest %s has no curves to transport along', manifest.path)
    return {'curves': rows}, all(row['passed'] for row in rows)


COMMANDS = {
    'validate': cmd_validate,
    'eval': cmd_eval,
    'brackets': cmd_brackets,
    'scan': cmd_scan,
    'transport': cmd_transport,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog='wagner',
        description='Truncated metric connections and Wagner curvature of contact '
                    'sub-Finsler structures.')
    parser.add_argument('--version', action='version', version='%(prog)s ' + __version__)
    subparsers = parser.add_subparsers(dest='command', metavar='COMMAND')
    subparsers.required = True
    for name, func in COMMANDS.items():
        sub = subparsers.add_parser(name, help=func.__doc__.splitlines()[0])
        sub.add_argument('--manifest', required=True, help='JSON manifest to run')
        sub.add_argument('--out', help='write the JSON report here instead of stdout')
        sub.add_argument('--force', action='store_true',
                         help='evaluate even when validation fails')
        sub.add_argument('--allow-m1', action='store_true',
                         help='accept three-dimensional charts (m = 1)')
        if name in ('scan', 'transport'):
            sub.add_argument('--logdir',
                             help='also write TensorBoard scalars to this directory')
        if name == 'transport':
            sub.add_argument('--trace-dir',
                             help='directory of the CSV traces (default: next to --out)')
        verbosity = sub.add_mutually_exclusive_group()
        verbosity.add_argument('-v', '--verbose', action='store_true')
        verbosity.add_argument('-q', '--quiet', action='store_true')
    return parser


def _configure_logging(args):
    level = logging.INFO
    if args.verbose:
        level = logging.DEBUG
    elif args.quiet:
        level = logging.WARNING
    logging.basicConfig(stream=sys.stderr, level=level,
                        format='%(asctime)s %(name)s %(levelname)s: %(message)s')


def _emit(document, out):
    if out:
        report.write_json(document, path=out)
    else:
        report.write_json(document, stream=sys.stdout)


def main(argv=None):
    args = build_parser().parse_args(argv)
    _configure_logging(args)
    try:
        threads = thread_count()
        manifest = load_manifest(args.manifest, allow_m1=args.allow_m1)
    except WagnerError as e:
        logger.error('%s', e)
        _emit(_error(e), args.out)
        return EXIT_UNUSABLE

    started = time.time()
    logger.info('%s: chart %s, metric %s, %d thread(s)', args.command,
                manifest.chart.name, manifest.metric.label, threads)
    document = report.envelope(args.command, manifest.options, manifest.path)
    try:
        body, passed = COMMANDS[args.command](manifest, args, threads)
    except ManifestError as e:
        logger.error('%s', e)
        _emit(_error(e), args.out)
        return EXIT_UNUSABLE
    except WagnerError as e:
        logger.error('%s failed: %s', args.command, e)
        document.update(passed=False, error=_error(e))
        _emit(document, args.out)
        return EXIT_FAILURES
    document.update(body)
    document['passed'] = bool(passed)
    _emit(document, args.out)
    logger.info('%s finished in %.2fs: %s', args.command, time.time() - started,
                'pass' if passed else 'FAIL')
    return EXIT_PASS if passed else EXIT_FAILURES


if __name__ == '__main__':
    sys.exit(main())
