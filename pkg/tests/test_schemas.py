# -*- coding: utf-8 -*-
import pytest

from acx import serializers
from acx.exceptions import InvalidDefinition
from acx.schemas import (MappingDocument, QueryRuleDocument, ReportDocument, RunConfigDocument, SystemDocument,
                         spellings)
from acx.tags import Dimension, PropertyTag


def minimal_system(**extra):
    return dict({'name': 'tiny', 'sorts': ['user']}, **extra)


class TestFields:
    def test_required(self):
        with pytest.raises(InvalidDefinition, match='source system is required'):
            MappingDocument().validate({'target': 'rbac'})

    def test_defaults(self):
        doc = MappingDocument().validate({'source': 'acl', 'target': 'rbac'})
        assert (doc['correspondence'], doc['reachability']) == ('SCa', 'R→')
        assert doc['state_rules'] == [] and doc['sorts'] is None

    def test_factory_default_is_fresh(self):
        first = SystemDocument().validate(minimal_system(init={}))['init']
        second = SystemDocument().validate(minimal_system(init={}))['init']
        assert first == {'universes': {}, 'relations': {}}
        assert first['universes'] is not second['universes']

    def test_choices(self):
        with pytest.raises(InvalidDefinition, match='must be one of SCs, SCq, SCa'):
            MappingDocument().validate({'source': 'acl', 'target': 'rbac', 'correspondence': 'SCx'})

    @pytest.mark.parametrize('key, value', [('correspondence', 'SCq'), ('reachability', 'Rbi'),
                                            ('reachability', 'R↔')])
    def test_tag_spellings(self, key, value):
        doc = MappingDocument().validate({'source': 'acl', 'target': 'rbac', key: value})
        assert doc[key] == value

    def test_tag_choices_cover_every_spelling(self):
        assert spellings(Dimension.SC) == ['SCs', 'SCq', 'SCa']
        assert spellings(Dimension.R) == ['R→', 'Rfwd', 'R↔', 'Rbi']
        for tag in PropertyTag:
            assert {tag.symbol, tag.ascii} <= set(spellings(tag.dimension))

    def test_regex(self):
        with pytest.raises(InvalidDefinition, match="system name '9lives'"):
            SystemDocument().validate(minimal_system(name='9lives'))

    @pytest.mark.parametrize('value', [True, 1.0, '1'])
    def test_int_rejects_non_integers(self, value):
        with pytest.raises(InvalidDefinition, match='exit code must be an integer'):
            ReportDocument().validate({'mapping': 'm', 'bound': {}, 'results': [], 'exit_code': value})

    def test_int_range(self):
        with pytest.raises(InvalidDefinition, match='exit code must be <= 2'):
            ReportDocument().validate({'mapping': 'm', 'bound': {}, 'results': [], 'exit_code': 3})

    def test_boolean(self):
        with pytest.raises(InvalidDefinition, match='request flag must be true or false'):
            SystemDocument().validate(minimal_system(queries=[{'name': 'q', 'formula': True, 'request': 'yes'}]))


class TestNesting:
    def test_list_item_path(self):
        commands = [{'name': 'ok'}, {'name': 'bad', 'actor': -1}]
        with pytest.raises(InvalidDefinition) as info:
            SystemDocument().validate(minimal_system(commands=commands))
        assert info.value.message == 'commands[1]: command: actor index must be >= 0'

    def test_nested_document_path(self):
        with pytest.raises(InvalidDefinition, match='^init: unknown keys: tuples$'):
            SystemDocument().validate(minimal_system(init={'tuples': []}))

    def test_list_type_and_size(self):
        with pytest.raises(InvalidDefinition, match='sorts must be a list'):
            SystemDocument().validate({'sorts': 'user'})
        with pytest.raises(InvalidDefinition, match='sorts needs at least 1 items'):
            SystemDocument().validate({'sorts': []})

    def test_not_an_object(self):
        with pytest.raises(InvalidDefinition, match='expected a JSON object, got list'):
            SystemDocument().validate([])


class TestDocumentChecks:
    def test_exactly_one_decider(self):
        with pytest.raises(InvalidDefinition, match='decider for member'):
            QueryRuleDocument().validate({'query': 'member', 'formula': True, 'theory': {}})
        assert QueryRuleDocument().validate({'query': 'member', 'state': {}})['state'] == {}

    def test_state_shape(self):
        with pytest.raises(InvalidDefinition, match='tuples of member must be lists'):
            SystemDocument().validate(minimal_system(init={'relations': {'member': ['alice']}}))

    @pytest.mark.parametrize('init, message', [
        ({'universes': {'user': [1]}}, 'atoms of user must be strings'),
        ({'relations': {'member': [['alice', None]]}}, 'tuples of member must hold atom names'),
    ])
    def test_atoms_are_names(self, init, message):
        with pytest.raises(InvalidDefinition, match='^init: %s$' % message):
            SystemDocument().validate(minimal_system(init=init))

    def test_run_config(self):
        config = RunConfigDocument().validate({'mapping': 'acl-to-rbac', 'props': ['SCa']})
        assert (config['bound'], config['format']) == ('2,1,6', 'json')


def test_allow_extra_and_inherited_fields():
    class Base(serializers.Serializer):
        name = serializers.StringField('name', required=True)

    class Loose(Base):
        count = serializers.IntField('count', default=0)

        class Meta:
            allow_extra = True

        def validate_count_matches(self, data):
            return dict(data, doubled=data['count'] * 2)

    doc = Loose().validate({'name': 'x', 'count': 2, 'other': 1})
    assert doc == {'name': 'x', 'count': 2, 'doubled': 4}
    with pytest.raises(InvalidDefinition, match='unknown keys: other'):
        Base().validate({'name': 'x', 'other': 1})
