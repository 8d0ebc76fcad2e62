# -*- coding: utf-8 -*-
"""
Declarative shapes for the JSON documents the workbench reads.

A ``Serializer`` subclass lists the keys of one JSON object as fields.
``validate`` returns the normalized dict or raises ``InvalidDefinition`` with
the path of the offending key, e.g. ``commands[2]: actor index must be >= 0``.

Fields and serializers both pick up their ``validate_*`` methods as checks;
a serializer check receives the whole document and returns it.
"""
import inspect
import re
from collections import OrderedDict
from collections.abc import Mapping, Sequence

from acx.exceptions import InvalidDefinition

__all__ = ['Undefined', 'StringField', 'IntField', 'BooleanField', 'SerializerField', 'ListField', 'JsonField',
           'Serializer']


class _UndefinedType:
    """Default of a field that has none. Falsy, distinct from ``None``."""
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return 'Undefined'

    def __bool__(self):
        return False


Undefined = _UndefinedType()


def _check_names(bases, attrs):
    names = OrderedDict()
    for base in reversed(bases):
        names.update(getattr(base, '_check_names', {}))
    names.update((name, True) for name in attrs if name.startswith('validate_'))
    return names


class FieldMeta(type):
    """Merges ``MESSAGES`` along the bases and records ``validate_*`` checks."""

    def __new__(mcs, name, bases, attrs):
        messages = {}
        for base in reversed(bases):
            messages.update(getattr(base, 'MESSAGES', {}))
        messages.update(attrs.get('MESSAGES', {}))
        attrs['MESSAGES'] = messages
        attrs['_check_names'] = _check_names(bases, attrs)
        return super().__new__(mcs, name, bases, attrs)


class BaseField(metaclass=FieldMeta):
    """One key of a document.

    :param label: name used in error messages; the attribute name otherwise
    :param required: a missing or null value is an error
    :param default: value, or zero-argument factory, for a missing key
    :param choices: the allowed values
    """
    MESSAGES = {
        'required': '{0} is required',
        'choices': '{0} must be one of {1}',
    }

    def __init__(self, label=None, required=False, default=Undefined, choices=None):
        assert not (required and default is not Undefined), 'a required field takes no default'
        if isinstance(choices, str):
            raise TypeError('choices must be a collection, not a string')
        self._label = label
        self.required = required
        self._default = default
        self.choices = choices
        self.name = None
        self.checks = [getattr(self, name) for name in self._check_names]

    def __repr__(self):
        return '<%s %s>' % (type(self).__name__, self.label)

    def bind(self, name):
        self.name = name

    @property
    def label(self):
        return self._label or self.name

    def error(self, key, *args):
        return InvalidDefinition(self.MESSAGES[key].format(self.label, *args))

    def default(self):
        return self._default() if callable(self._default) else self._default

    def convert(self, value):
        return value

    def validate(self, value):
        if value is None and self._default is not Undefined:
            value = self.default()
        if value is None:
            if self.required:
                raise self.error('required')
            return None
        value = self.convert(value)
        for check in self.checks:
            check(value)
        return value

    def validate_choices(self, value):
        if self.choices is not None and value not in self.choices:
            raise self.error('choices', ', '.join(map(str, self.choices)))


class StringField(BaseField):
    MESSAGES = {
        'type': '{0} must be a string',
        'regex': '{0} {1!r} is not a valid name',
    }

    def __init__(self, label=None, regex=None, **kwargs):
        self.regex = re.compile(regex) if regex else None
        super().__init__(label, **kwargs)

    def convert(self, value):
        if not isinstance(value, str):
            raise self.error('type')
        return value

    def validate_regex(self, value):
        if self.regex is not None and not self.regex.match(value):
            raise self.error('regex', value)


class IntField(BaseField):
    """Whole numbers only; ``true`` and ``1.0`` are rejected."""
    MESSAGES = {
        'type': '{0} must be an integer, got {1!r}',
        'min': '{0} must be >= {1}',
        'max': '{0} must be <= {1}',
    }

    def __init__(self, label=None, min_value=None, max_value=None, **kwargs):
        self.min_value = min_value
        self.max_value = max_value
        super().__init__(label, **kwargs)

    def convert(self, value):
        if isinstance(value, bool) or not isinstance(value, int):
            raise self.error('type', value)
        return value

    def validate_range(self, value):
        if self.min_value is not None and value < self.min_value:
            raise self.error('min', self.min_value)
        if self.max_value is not None and value > self.max_value:
            raise self.error('max', self.max_value)


class BooleanField(BaseField):
    MESSAGES = {'type': '{0} must be true or false'}

    def convert(self, value):
        if not isinstance(value, bool):
            raise self.error('type')
        return value


class JsonField(BaseField):
    """Any JSON tree (formulas, rule bodies); its loader checks the inside."""


class SerializerField(BaseField):
    """A nested object described by another serializer."""

    def __init__(self, label=None, serializer=None, **kwargs):
        assert 'default' not in kwargs, 'a nested document takes no default'
        if not isinstance(serializer, Serializer):
            raise TypeError('serializer must be a Serializer instance')
        self.serializer = serializer
        super().__init__(label, **kwargs)

    def convert(self, value):
        try:
            return self.serializer.validate(value)
        except InvalidDefinition as exc:
            raise InvalidDefinition('{0}: {1}'.format(self.label, exc.message))


class ListField(BaseField):
    """A list whose items all conform to ``field``. Missing means empty.

    ::

        sorts = ListField('relation sorts', StringField('sort'))
    """
    MESSAGES = {
        'type': '{0} must be a list',
        'min_size': '{0} needs at least {1} items',
    }

    def __init__(self, label=None, field=None, min_size=None, **kwargs):
        if not isinstance(field, BaseField):
            raise TypeError('field must be a BaseField instance')
        self.field = field
        self.min_size = min_size
        super().__init__(label, **kwargs)

    def validate(self, value):
        if value is None and not self.required:
            value = []
        return super().validate(value)

    def convert(self, value):
        if isinstance(value, (str, bytes, Mapping)) or not isinstance(value, Sequence):
            raise self.error('type')
        items = []
        for index, item in enumerate(value):
            try:
                items.append(self.field.validate(item))
            except InvalidDefinition as exc:
                raise InvalidDefinition('{0}[{1}]: {2}'.format(self.label, index, exc.message))
        return items

    def validate_size(self, value):
        if self.min_size is not None and len(value) < self.min_size:
            raise self.error('min_size', self.min_size)


class SerializerMeta(type):
    """Collects the declared fields, the document checks and ``Meta`` options."""

    def __new__(mcs, name, bases, attrs):
        fields = OrderedDict()
        meta = {}
        for base in reversed(bases):
            fields.update(getattr(base, '_fields', {}))
            meta.update(getattr(base, '_meta', {}))
        for attr_name, attr in attrs.items():
            if isinstance(attr, BaseField):
                attr.bind(attr_name)
                fields[attr_name] = attr
            elif attr_name == 'Meta' and inspect.isclass(attr):
                meta.update((k, v) for k, v in vars(attr).items() if not k.startswith('__'))
        attrs['_fields'] = fields
        attrs['_meta'] = meta
        attrs['_check_names'] = _check_names(bases, attrs)
        return super().__new__(mcs, name, bases, attrs)


class Serializer(metaclass=SerializerMeta):
    """A JSON object with declared fields.

    Unknown keys are rejected unless ``Meta.allow_extra`` is set.
    """

    def __init__(self):
        self.checks = [getattr(self, name) for name in self._check_names]

    @property
    def fields(self):
        return self._fields

    def validate(self, data):
        if not isinstance(data, Mapping):
            raise InvalidDefinition('expected a JSON object, got {0}'.format(type(data).__name__))
        extra = set(data) - set(self._fields)
        if extra and not self._meta.get('allow_extra', False):
            raise InvalidDefinition('unknown keys: {0}'.format(', '.join(sorted(extra))))
        doc = {name: field.validate(data.get(name)) for name, field in self._fields.items()}
        for check in self.checks:
            doc = check(doc)
        return doc
