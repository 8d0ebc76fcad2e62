# -*- coding: utf-8 -*-
"""One JSON object per log line, tagged with the current check run."""
import datetime
import json
import logging
import os
import sys
from collections import OrderedDict

from . import context_var

_RUN_KEYS = ('run_id', 'mapping', 'bound')


def _caller_name(record, max_frames=40):
    """``module.Class.method`` of the frame that logged, or ``module.function``."""
    frame = sys._getframe()
    for _ in range(max_frames):
        if frame is None or frame.f_code.co_name == record.funcName:
            break
        frame = frame.f_back
    owner = frame.f_locals.get('self') if frame is not None and frame.f_code.co_name == record.funcName else None
    if owner is None:
        return '%s.%s' % (record.module, record.funcName)
    cls = owner if isinstance(owner, type) else type(owner)
    return '%s.%s.%s' % (cls.__module__, cls.__name__, record.funcName)


class JsonFormatter(logging.Formatter):
    def format(self, record):
        super().format(record)
        text = record.message
        if record.exc_text:
            text = '%s\n%s' % (text.rstrip('\n'), record.exc_text)

        run = context_var.get() or {}
        line = OrderedDict((
            ('@timestamp', datetime.datetime.fromtimestamp(record.created, datetime.timezone.utc).isoformat()),
            ('service.name', os.environ.get('PROJECT_NAME', 'acx')),
            ('log.level', record.levelname),
            ('log.logger', record.name),
        ))
        for key in _RUN_KEYS:
            line[key] = getattr(record, key, run.get(key, ''))
        line['property'] = getattr(record, 'property', '')
        line['method_name'] = _caller_name(record)
        line['line_number'] = record.lineno
        line['thread_name'] = record.threadName
        line['message'] = text
        line['stack_trace'] = record.stack_info
        return json.dumps(line, default=str)
