# -*- coding: utf-8 -*-
import contextvars

# run context: {'run_id': ..., 'mapping': ..., 'bound': ...}, read by the log formatter
context_var = contextvars.ContextVar('context_var', default=None)

_DEFAULT_GROUP = '__default'


class Registry:
    """Named values kept in groups, e.g. the checker for each property dimension
    (group 'checkers') or the corpus entries already loaded (group 'systems').
    """

    def __init__(self):
        object.__setattr__(self, '_groups', {})

    def __getattr__(self, item):
        return self.get(item)

    def __setattr__(self, key, value):
        self.set(key, value)

    def set(self, k, v, group=None):
        self._groups.setdefault(group or _DEFAULT_GROUP, {})[k] = v

    def get(self, k, group=None):
        return self.get_group(group).get(k)

    def get_group(self, group=None):
        return self._groups.get(group or _DEFAULT_GROUP, {})

    def clear(self, group):
        self._groups.pop(group, None)


registry = Registry()

__version__ = '0.1.0'
