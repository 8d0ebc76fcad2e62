# -*- coding: utf-8 -*-
"""
Reports of a ``check`` run and their renderings.

A report is a plain JSON document (``schemas.ReportDocument``). A report
shape turns it into the text written to stdout or ``--out``; shapes are
looked up by format name or dotted path like any other pluggable class.
"""
import logging

from acx import schemas, settings, utils
from acx.props import exit_code, strongest_holding

logger = logging.getLogger(__name__)


def build_report(sim, bound, results):
    report = {
        'mapping': sim.mapping.name,
        'source': sim.mapping.source.name,
        'target': sim.mapping.target.name,
        'correspondence': sim.correspondence.value,
        'reachability': sim.reachability.value,
        'bound': utils.to_primitive(bound),
        'results': [r.to_primitive() for r in results],
        'strongest': strongest_holding(results),
        'exit_code': exit_code(results),
    }
    return schemas.ReportDocument().validate(report)


def load_report(path):
    """A saved report, checked against the report document shape."""
    return schemas.ReportDocument().validate(utils.load_json(path))


def report_exit_code(report):
    if report.get('exit_code') is not None:
        return report['exit_code']
    return 0 if all(passed(r) for r in report['results']) else 1


def passed(result):
    if result['verdict'] == 'Evidence':
        return bool((result.get('evidence') or {}).get('supported'))
    return result['verdict'] == 'Holds'


class ReportShape:
    """
    report shapes define the rendering of a
    report document.
    """

    @staticmethod
    def create_body(report):
        return utils.canonical_json(report, indent=2)


class TextReportShape(ReportShape):
    """
    one line per property, then the counterexample
    or evidence summary indented below it:

        SCa    Holds     bound 2,1,6
        SCs    Fails     side-condition
    """

    @staticmethod
    def create_body(report):
        bound = report['bound']
        if isinstance(bound, dict):
            bound = '%s,%s,%s' % (bound['atoms_per_sort'], bound['max_new_atoms'], bound['max_depth'])
        lines = ['%s: %s -> %s [%s, %s] bound %s' % (report['mapping'], report.get('source'), report.get('target'),
                                                     report.get('correspondence'), report.get('reachability'),
                                                     bound)]
        for result in report['results']:
            lines.append('  %-5s %-12s %s' % (result['property'], result['verdict'], _summary(result)))
            for note in result.get('notes') or []:
                lines.append('        note: %s' % note)
        strongest = report.get('strongest') or {}
        if strongest:
            lines.append('strongest: %s' % ' '.join('%s=%s' % (k, ','.join(v)) for k, v in sorted(strongest.items())))
        lines.append('exit code: %d' % report_exit_code(report))
        return '\n'.join(lines)


def _summary(result):
    cx = result.get('counterexample')
    if cx:
        parts = [cx['kind']]
        if cx.get('command'):
            parts.append('command %s' % cx['command'])
        if cx.get('query'):
            parts.append('query %s' % cx['query'])
        if cx.get('trace'):
            parts.append('trace [%s]' % '; '.join(cx['trace']))
        if cx.get('index') is not None:
            parts.append('at %d' % cx['index'])
        return ', '.join(parts)
    ev = result.get('evidence')
    if result['verdict'] == 'Evidence' and ev:
        fitted = ev.get('fitted') or {}
        return '%s (slope %.2f)' % ('supported' if ev.get('supported') else 'not supported',
                                    fitted.get('slope', 0.0))
    return ''


SHAPES = {'json': ReportShape, 'text': TextReportShape}


def get_report_shape(fmt=None):
    shape = fmt or settings.get('REPORT_FORMAT')
    if isinstance(shape, str):
        shape = SHAPES.get(shape) or utils.import_from_str(shape)
    if not isinstance(shape, type) or not issubclass(shape, ReportShape):
        shape = ReportShape
    return shape


def render(report, fmt=None):
    return get_report_shape(fmt).create_body(report)


__all__ = ['build_report', 'load_report', 'render', 'report_exit_code', 'ReportShape', 'TextReportShape',
           'get_report_shape']
