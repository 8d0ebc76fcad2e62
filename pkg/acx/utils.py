# -*- coding: utf-8 -*-
import enum
import inspect
import json
import os
from typing import Mapping, Sequence, Set

from acx import exceptions


def to_primitive(obj):
    """Convert obj to a value safe to serialize.

    Engine values (atoms, states, tags, results) expose ``to_primitive()``;
    sets are emitted as sorted lists so the output is canonical.
    """
    if obj is None:
        return None
    if hasattr(obj, 'to_primitive') and callable(obj.to_primitive) \
            and len(inspect.signature(obj.to_primitive).parameters) == 0:
        return obj.to_primitive()
    if isinstance(obj, enum.Enum):
        return to_primitive(obj.value)
    if isinstance(obj, (bool, int, float, str)):
        return obj
    if isinstance(obj, Mapping):
        return dict(
            (str(to_primitive(k)), to_primitive(v)) for k, v in obj.items()
        )
    if isinstance(obj, (Set, frozenset)):
        items = [to_primitive(e) for e in obj]
        return sorted(items, key=canonical_json)
    if isinstance(obj, Sequence):
        return [to_primitive(e) for e in obj]
    return str(obj)


def canonical_json(data, indent=None):
    """Bit-exact JSON: keys sorted, UTF-8 text, fixed separators."""
    separators = (',', ': ') if indent else (',', ':')
    return json.dumps(to_primitive(data), sort_keys=True, ensure_ascii=False, indent=indent,
                      separators=separators)


def import_from_str(obj_path):
    module_name, obj_name = obj_path.rsplit('.', 1)
    module_meta = __import__(module_name, globals(), locals(), [obj_name])
    return getattr(module_meta, obj_name)


def load_json(path):
    """Read a UTF-8 JSON file, turning parse errors into InvalidDefinition with a location."""
    if not os.path.isfile(path):
        raise exceptions.InvalidDefinition('file not found: %s' % path, details={'path': str(path)})
    with open(path, encoding='utf-8') as fp:
        text = fp.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as ex:
        raise exceptions.InvalidDefinition('%s: malformed JSON at line %s column %s: %s'
                                           % (path, ex.lineno, ex.colno, ex.msg),
                                           details={'path': str(path), 'line': ex.lineno, 'column': ex.colno})

