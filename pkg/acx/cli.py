# -*- coding: utf-8 -*-
"""
Command line surface of the workbench.

Exit codes: 0 every requested property holds (or has supporting evidence),
1 some property fails, 2 invalid input.
"""
import functools
import json
import logging
import logging.config
import os

import click

from acx import exceptions, lattice, settings, utils
from acx.corpus import resolve, resolve_mapping, resolve_system
from acx.explore import Bound, reachable
from acx.mapping import SimulationDef
from acx.props import check_property_set
from acx.report import build_report, load_report, render, report_exit_code
from acx.schemas import RunConfigDocument
from acx.system import populate
from acx.tags import ascii_table

logger = logging.getLogger(__name__)

TAG_HELP = 'Tags are comma separated, as symbols or ASCII: %s.' % ', '.join(
    '%s=%s' % row for row in ascii_table())


def load_config():
    """``ACX_CONFIG`` holds a JSON object laid over the defaults."""
    config_json = os.environ.get('ACX_CONFIG', '')
    if not config_json:
        return
    try:
        conf = json.loads(config_json)
    except ValueError as ex:
        raise exceptions.InvalidDefinition('ACX_CONFIG is not valid JSON: %s' % ex)
    if not isinstance(conf, dict):
        raise exceptions.InvalidDefinition('ACX_CONFIG must be a JSON object')
    settings.load(**conf)


def handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except exceptions.AcxError as ex:
            logger.debug('input error', exc_info=ex)
            click.echo('error: %s: %s' % (ex.__class__.__name__, ex.message), err=True)
            if ex.details is not None:
                click.echo(utils.canonical_json(ex.details), err=True)
            raise SystemExit(ex.exit_code)
    return wrapper


@click.group()
@click.option('--log-level', type=click.Choice(['DEBUG', 'INFO', 'WARNING', 'ERROR']), default=None,
              help='Level of the acx loggers.')
@click.option('--dev', is_flag=True, default=False, help='Plain text logs instead of JSON.')
@handle_errors
def cli(log_level, dev):
    """Access control expressiveness workbench."""
    load_config()
    if log_level:
        settings.load(LOG_LEVEL=dict(settings.get('LOG_LEVEL'), acx=log_level))
    if dev:
        settings.load(DEV=True)
    logging.config.dictConfig(settings.get('LOGGING_CONFIG'))


@cli.command()
@click.argument('paths', nargs=-1, required=True)
@handle_errors
def validate(paths):
    """Check system and mapping files (or corpus ids)."""
    for path in paths:
        kind, value = resolve(path)
        click.echo('ok %s %s' % (kind, value.name))
        for warning in getattr(value, 'warnings', ()):
            click.echo('warning: %s' % warning)


@cli.command()
@click.argument('system')
@click.option('--bound', default=None, help='A,S,D: atoms per sort, new atoms per sort, depth.')
@handle_errors
def explore(system, bound):
    """Reachable states of a system within a bound."""
    sys = resolve_system(system)
    b = Bound.parse(bound)
    reach = reachable(sys, populate(sys, sys.init, b.atoms_per_sort), b)
    click.echo(utils.canonical_json(dict(reach.to_primitive(), system=sys.name, bound=str(b)), indent=2))


@cli.command()
@click.argument('mapping')
@click.option('--props', required=True, help='Properties to check. ' + TAG_HELP)
@click.option('--bound', default=None, help='A,S,D: atoms per sort, new atoms per sort, depth.')
@click.option('--out', default=None, type=click.Path(dir_okay=False), help='Write the report here.')
@click.option('--format', 'fmt', type=click.Choice(['json', 'text']), default=None, help='Report format.')
@handle_errors
def check(mapping, props, bound, out, fmt):
    """Check properties of a mapping; exit 1 when any fails."""
    config = RunConfigDocument().validate({
        'mapping': mapping, 'props': props.replace(',', ' ').split(),
        'bound': bound or ','.join(str(v) for v in settings.get('BOUND')), 'out': out,
        'format': fmt or settings.get('REPORT_FORMAT'),
    })
    tags = lattice.PropertySet.of(config['props'])
    sim = SimulationDef.of(resolve_mapping(config['mapping']))
    b = Bound.parse(config['bound'])
    results = check_property_set(sim, b, tags)
    report = build_report(sim, b, results)
    text = render(report, config['format'])
    if config['out']:
        with open(config['out'], 'w', encoding='utf-8') as fp:
            fp.write(text + '\n')
        click.echo(render(report, 'text'))
    else:
        click.echo(text)
    raise SystemExit(report['exit_code'])


@cli.command()
@click.argument('path')
@click.option('--format', 'fmt', type=click.Choice(['json', 'text']), default='text', help='Output format.')
@handle_errors
def report(path, fmt):
    """Re-render a saved report."""
    document = load_report(path)
    click.echo(render(document, fmt))
    raise SystemExit(report_exit_code(document))


@cli.group('lattice')
def lattice_group():
    """Query the property lattice and the catalog of surveyed simulations."""


@lattice_group.command()
@click.argument('name')
@handle_errors
def decompose(name):
    click.echo(str(lattice.decompose_named(name)))


@lattice_group.command()
@click.argument('a')
@click.argument('b')
@handle_errors
def compare(a, b):
    """Compare two catalog entries (or tag lists)."""
    click.echo(str(lattice.compare_sets(_tags_or_entry(a), _tags_or_entry(b))))


@lattice_group.command()
@click.argument('name')
@handle_errors
def canonical(name):
    click.echo(str(lattice.canonical_usage(name)))


@lattice_group.command()
@click.argument('names', nargs=-1)
@handle_errors
def hasse(names):
    """Covering pairs between catalog decompositions, weaker first."""
    for weaker, stronger in lattice.hasse(names or None):
        click.echo('%s < %s' % (weaker, stronger))


@lattice_group.command()
@click.argument('tags')
@handle_errors
def closure(tags):
    """Every tag implied by TAGS (comma separated)."""
    click.echo(str(lattice.closure(lattice.PropertySet.of(tags))))


def _tags_or_entry(text):
    try:
        return lattice.decompose_named(text)
    except exceptions.UnknownSimulation:
        try:
            return lattice.PropertySet.of(text)
        except exceptions.UnknownTag:
            raise exceptions.UnknownSimulation('%r is neither a catalog entry nor a tag list' % text)


def main():
    cli(prog_name='acx')


if __name__ == '__main__':
    main()
