# -*- coding: utf-8 -*-
"""
Document serializers for the JSON inputs and outputs of the workbench: system
descriptions, mappings, run configuration and saved reports.

They check the document shape only; the semantic checks (sorts, arities,
variable binding) are done by ``validate_system`` and ``load_mapping``.
"""
from acx import serializers
from acx.exceptions import InvalidDefinition
from acx.tags import Dimension, PropertyTag

NAME = r'^[A-Za-z_][A-Za-z0-9_+\-]*$'
PARAM = r'^\??[A-Za-z_][A-Za-z0-9_]*:[A-Za-z_][A-Za-z0-9_]*$'
BOUND = r'^\d+,\d+,\d+$'


def spellings(dimension):
    """Symbol and ASCII spelling of every level of ``dimension``, in lattice order."""
    names = []
    for tag in PropertyTag:
        if tag.dimension is not dimension:
            continue
        for name in (tag.symbol, tag.ascii):
            if name not in names:
                names.append(name)
    return names


class RelationDocument(serializers.Serializer):
    name = serializers.StringField('relation name', required=True, regex=NAME)
    sorts = serializers.ListField('relation sorts', serializers.StringField('sort'), required=True)


class QueryDocument(serializers.Serializer):
    name = serializers.StringField('query name', required=True, regex=NAME)
    params = serializers.ListField('query params', serializers.StringField('param', regex=PARAM))
    request = serializers.BooleanField('request flag', default=False)
    formula = serializers.JsonField('query formula', required=True)


class CommandDocument(serializers.Serializer):
    name = serializers.StringField('command name', required=True, regex=NAME)
    params = serializers.ListField('command params', serializers.StringField('param', regex=PARAM))
    actor = serializers.IntField('actor index', min_value=0)
    guard = serializers.JsonField('command guard')
    effects = serializers.ListField('command effects', serializers.JsonField('effect'))


class StateDocument(serializers.Serializer):
    universes = serializers.JsonField('universes', default=dict)
    relations = serializers.JsonField('relations', default=dict)

    def validate_shape(self, data):
        for key in ('universes', 'relations'):
            value = data[key]
            if not isinstance(value, dict) or not all(isinstance(v, list) for v in value.values()):
                raise InvalidDefinition('%s must map names to lists' % key)
        for sort, atoms in data['universes'].items():
            if not all(isinstance(atom, str) for atom in atoms):
                raise InvalidDefinition('atoms of %s must be strings' % sort)
        for name, rows in data['relations'].items():
            if not all(isinstance(row, list) for row in rows):
                raise InvalidDefinition('tuples of %s must be lists' % name)
            if not all(isinstance(atom, str) for row in rows for atom in row):
                raise InvalidDefinition('tuples of %s must hold atom names' % name)
        return data


class SystemDocument(serializers.Serializer):
    name = serializers.StringField('system name', regex=NAME)
    description = serializers.StringField('description')
    sorts = serializers.ListField('sorts', serializers.StringField('sort', regex=NAME), required=True, min_size=1)
    relations = serializers.ListField('relations', serializers.SerializerField('relation', RelationDocument()))
    queries = serializers.ListField('queries', serializers.SerializerField('query', QueryDocument()))
    requests = serializers.ListField('requests', serializers.StringField('request'))
    commands = serializers.ListField('commands', serializers.SerializerField('command', CommandDocument()))
    init = serializers.SerializerField('init', StateDocument())
    admins = serializers.StringField('admins relation')


class StateRuleDocument(serializers.Serializer):
    match = serializers.ListField('match clauses', serializers.JsonField('clause'))
    emit = serializers.ListField('emissions', serializers.JsonField('emission'), required=True, min_size=1)


class CommandRuleDocument(serializers.Serializer):
    command = serializers.StringField('source command', required=True)
    params = serializers.ListField('rule params', serializers.StringField('param', regex=r'^\??[A-Za-z_]\w*$'))
    body = serializers.ListField('rule body', serializers.JsonField('step'), required=True)


class QueryRuleDocument(serializers.Serializer):
    query = serializers.StringField('source query', required=True)
    params = serializers.ListField('rule params', serializers.StringField('param', regex=r'^\??[A-Za-z_]\w*$'))
    formula = serializers.JsonField('query-formula decider')
    theory = serializers.JsonField('theory decider')
    state = serializers.JsonField('state decider')

    def validate_one_decider(self, data):
        given = [k for k in ('formula', 'theory', 'state') if data.get(k) is not None]
        if len(given) != 1:
            raise InvalidDefinition('decider for %s needs exactly one of formula, theory, state' % data['query'])
        return data


class MappingDocument(serializers.Serializer):
    name = serializers.StringField('mapping name', regex=NAME)
    description = serializers.StringField('description')
    source = serializers.StringField('source system', required=True)
    target = serializers.StringField('target system', required=True)
    sorts = serializers.JsonField('sort translation')
    state_rules = serializers.ListField('state rules', serializers.SerializerField('state rule', StateRuleDocument()))
    command_rules = serializers.ListField('command rules',
                                         serializers.SerializerField('command rule', CommandRuleDocument()))
    query_rules = serializers.ListField('query rules', serializers.SerializerField('query rule', QueryRuleDocument()))
    request_transform = serializers.JsonField('request transform')
    correspondence = serializers.StringField('correspondence', choices=spellings(Dimension.SC), default='SCa')
    reachability = serializers.StringField('reachability', choices=spellings(Dimension.R), default='R→')

    def validate_tables(self, data):
        for key in ('sorts', 'request_transform'):
            value = data.get(key)
            if value is not None and (not isinstance(value, dict)
                                      or not all(isinstance(v, str) for v in value.values())):
                raise InvalidDefinition('%s must map names to names' % key)
        return data


class RunConfigDocument(serializers.Serializer):
    """Options of one ``check`` run, as given on the command line."""
    mapping = serializers.StringField('mapping', required=True)
    props = serializers.ListField('properties', serializers.StringField('property'), required=True, min_size=1)
    bound = serializers.StringField('bound', regex=BOUND, default='2,1,6')
    out = serializers.StringField('output file')
    format = serializers.StringField('format', choices=['json', 'text'], default='json')


class ResultDocument(serializers.Serializer):
    property = serializers.StringField('property', required=True)
    verdict = serializers.StringField('verdict', required=True,
                                      choices=['Holds', 'Fails', 'Evidence', 'Inapplicable'])
    bound = serializers.JsonField('bound')
    counterexample = serializers.JsonField('counterexample')
    evidence = serializers.JsonField('evidence')
    stats = serializers.JsonField('stats')
    notes = serializers.ListField('notes', serializers.StringField('note'))


class ReportDocument(serializers.Serializer):
    mapping = serializers.StringField('mapping', required=True)
    source = serializers.StringField('source')
    target = serializers.StringField('target')
    correspondence = serializers.StringField('correspondence')
    reachability = serializers.StringField('reachability')
    bound = serializers.JsonField('bound', required=True)
    results = serializers.ListField('results', serializers.SerializerField('result', ResultDocument()),
                                    required=True)
    strongest = serializers.JsonField('strongest')
    exit_code = serializers.IntField('exit code', min_value=0, max_value=2)
