# -*- coding: utf-8 -*-
"""
The built-in corpus: sample systems and mappings shipped as JSON files.

An id is a file name without ``.json`` in the corpus directory
(``settings.CORPUS_DIR``, overridden by ``ACX_CORPUS``). ``identity-<system>``
names the generated identity mapping of a corpus system. Loaded definitions are
kept in ``registry`` groups ``systems`` and ``mappings``.
"""
import logging
import os

from acx import exceptions, registry, settings
from acx.mapping import identity_mapping, load_mapping
from acx.system import validate_system
from acx.utils import load_json

logger = logging.getLogger(__name__)

SYSTEMS = ('acl', 'rbac', 'acl-transfer', 'acl-access')
MAPPINGS = ('acl-to-rbac', 'identity-acl', 'acl-transfer-clean', 'acl-transfer-contaminating', 'acl-access-to-rbac')
IDENTITY_PREFIX = 'identity-'


def corpus_dir():
    return settings.get('CORPUS_DIR')


def corpus_path(ident):
    return os.path.join(corpus_dir(), '%s.json' % ident)


def is_mapping(document):
    return isinstance(document, dict) and 'source' in document and 'target' in document


def available():
    """``(systems, mappings)`` ids present in the corpus directory."""
    systems, mappings = [], []
    directory = corpus_dir()
    for filename in sorted(os.listdir(directory)) if os.path.isdir(directory) else []:
        ident, ext = os.path.splitext(filename)
        if ext != '.json' or ident == 'catalog':
            continue
        (mappings if is_mapping(load_json(os.path.join(directory, filename))) else systems).append(ident)
    return systems, mappings + [IDENTITY_PREFIX + s for s in systems]


def builtin_system(ident):
    cached = registry.get(ident, group='systems')
    if cached is not None:
        return cached
    path = corpus_path(ident)
    if not os.path.isfile(path):
        raise exceptions.UnknownId('unknown system %r in corpus %s' % (ident, corpus_dir()))
    document = load_json(path)
    if is_mapping(document):
        raise exceptions.UnknownId('%r is a mapping, not a system' % ident)
    sys = validate_system(document)
    registry.set(ident, sys, group='systems')
    logger.debug('loaded corpus system %s', ident)
    return sys


def builtin_mapping(ident):
    cached = registry.get(ident, group='mappings')
    if cached is not None:
        return cached
    if ident.startswith(IDENTITY_PREFIX) and not os.path.isfile(corpus_path(ident)):
        mapping = identity_mapping(builtin_system(ident[len(IDENTITY_PREFIX):]))
    else:
        path = corpus_path(ident)
        if not os.path.isfile(path):
            raise exceptions.UnknownId('unknown mapping %r in corpus %s' % (ident, corpus_dir()))
        document = load_json(path)
        if not is_mapping(document):
            raise exceptions.UnknownId('%r is a system, not a mapping' % ident)
        mapping = load_mapping(document, builtin_system(document['source']), builtin_system(document['target']))
    registry.set(ident, mapping, group='mappings')
    return mapping


def _resolve_system(ref, base):
    """A mapping's ``source``/``target``: a file next to it, else a corpus id."""
    path = os.path.join(base, ref if ref.endswith('.json') else '%s.json' % ref)
    if os.path.isfile(path):
        return validate_system(load_json(path))
    return builtin_system(ref[:-5] if ref.endswith('.json') else ref)


def load_mapping_file(path):
    document = load_json(path)
    if not is_mapping(document):
        raise exceptions.InvalidDefinition('%s is not a mapping (no source/target)' % path)
    base = os.path.dirname(os.path.abspath(path))
    return load_mapping(document, _resolve_system(document['source'], base), _resolve_system(document['target'], base))


def corpus_id(ref):
    """``corpus/rbac.json`` and ``rbac`` both name the corpus entry ``rbac``."""
    name = os.path.basename(ref)
    return name[:-5] if name.endswith('.json') else name


def resolve(ref):
    """A system or mapping from a file path or a corpus id.

    Returns ``('system', SystemDef)`` or ``('mapping', MappingDef)``. Existing
    files win over corpus ids.
    """
    if os.path.isfile(ref):
        document = load_json(ref)
        if is_mapping(document):
            return 'mapping', load_mapping_file(ref)
        return 'system', validate_system(document)
    ident = corpus_id(ref)
    if ident.startswith(IDENTITY_PREFIX) or os.path.isfile(corpus_path(ident)) and \
            is_mapping(load_json(corpus_path(ident))):
        return 'mapping', builtin_mapping(ident)
    if os.path.isfile(corpus_path(ident)):
        return 'system', builtin_system(ident)
    raise exceptions.UnknownId('%s is neither a file nor a corpus id' % ref)


def resolve_mapping(ref):
    kind, value = resolve(ref)
    if kind != 'mapping':
        raise exceptions.InvalidDefinition('%s is a system; a mapping is expected' % ref)
    return value


def resolve_system(ref):
    kind, value = resolve(ref)
    if kind != 'system':
        raise exceptions.InvalidDefinition('%s is a mapping; a system is expected' % ref)
    return value


def reset():
    registry.clear('systems')
    registry.clear('mappings')


__all__ = ['SYSTEMS', 'MAPPINGS', 'builtin_system', 'builtin_mapping', 'load_mapping_file', 'resolve',
           'resolve_mapping', 'resolve_system', 'available', 'reset']
