# -*- coding: utf-8 -*-
import os

working_settings = {}

DEFAULTS = {
    'PROJECT_NAME': os.environ.get('PROJECT_NAME', 'acx'),
    'CORPUS_DIR': os.environ.get('ACX_CORPUS', '') or os.path.join(os.path.dirname(__file__), 'corpus'),

    # atoms per sort, max new atoms per sort, depth
    'BOUND': [2, 1, 6],
    'MAX_STATES': 20000,

    # universe sizes sampled by the complexity checkers (CC, QC)
    'COMPLEXITY_SIZES': [2, 3, 4, 5, 6, 7, 8],
    'COMPLEXITY_SAMPLE_COMMANDS': 40,
    # log-log slope of cost against state size, fitted on the larger half of the sizes
    'CONSTANT_SLOPE': 0.15,
    'LINEAR_SLOPE': 1.5,

    'WORKERS': 1,
    'REPORT_FORMAT': 'json',

    'DEV': False,
    'LOG_LEVEL': {
        'other': 'WARNING',
        'acx': 'INFO',
    },
}


def load(**user_settings):
    working_settings.update(user_settings)


def reset():
    working_settings.clear()


def logging_config():
    """dictConfig for the root logger and ``acx``, both on stderr.

    JSON lines by default, for log collectors; ``DEV`` switches to a one-line text format.
    """
    levels = get('LOG_LEVEL')
    loggers, handlers = {}, {}
    for logger_name, handler_name, level_key in (('', 'default', 'other'), ('acx', 'acx', 'acx')):
        level = levels.get(level_key, DEFAULTS['LOG_LEVEL'][level_key])
        loggers[logger_name] = {'level': level, 'handlers': [handler_name], 'propagate': False}
        handlers[handler_name] = {'class': 'logging.StreamHandler', 'formatter': 'json', 'level': level,
                                  'stream': 'ext://sys.stderr'}
    if get('DEV'):
        formatter = {'class': 'logging.Formatter', 'datefmt': '[%Y-%m-%d %H:%M:%S %z]',
                     'format': '%(asctime)s [%(process)d] [%(levelname)s] %(name)s: %(message)s'}
    else:
        formatter = {'class': 'acx.log_formatter.JsonFormatter'}
    return {'version': 1, 'disable_existing_loggers': False, 'loggers': loggers, 'handlers': handlers,
            'formatters': {'json': formatter}}


def get(attr):
    if attr in working_settings:
        return working_settings[attr]
    if attr == 'LOGGING_CONFIG':
        return logging_config()
    try:
        return DEFAULTS[attr]
    except KeyError:
        raise AttributeError("Invalid setting: '%s'" % attr)


def __getattr__(name):
    return get(name)
