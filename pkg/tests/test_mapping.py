# -*- coding: utf-8 -*-
"""Tests for mapping loading and the instrumented interpreter."""
import copy

import pytest

from acx import exceptions
from acx.corpus import builtin_mapping
from acx.mapping import SimulationDef, classify, decide_query, emission_degree, identity_mapping, load_mapping, \
    map_command, map_state
from acx.system import Atom, GroundCommand, GroundQuery, State, populate, state_from_primitive, theory
from acx.tags import PropertyTag

from .conftest import MEMBER_SCAN_REVOKE, ROLE_SCAN_AUTH, corpus_document, mapping_variant, simulation


def grant(a, u, o):
    return GroundCommand('grant', (Atom('U', a), Atom('U', u), Atom('O', o)))


def auth(u, o):
    return GroundQuery('auth', (Atom('U', u), Atom('O', o)))


@pytest.fixture
def m(acl_to_rbac):
    return acl_to_rbac.mapping


class TestMapState:
    def test_one_role_per_user(self, m, acl):
        t = map_state(m, state_from_primitive(acl, {'universes': {'U': ['a', 'b']}}))
        assert t.universe('R') == {'role(a)', 'role(b)'}
        assert t.relation('UR') == {('a', 'role(a)'), ('b', 'role(b)')}
        assert t.relation('PA') == frozenset()

    def test_empty_source(self, m, acl):
        assert map_state(m, acl.init).size() == 0

    def test_entry_becomes_permission(self, m, acl):
        t = map_state(m, state_from_primitive(acl, {'relations': {'ACL': [['a', 'o1']]}}))
        assert ('role(a)', 'o1') in t.relation('PA')
        assert t.universe('P') == {'o1'}

    def test_constant_emission(self, admin_mapping, acl):
        sim = admin_mapping([{'emit': ['grant', '?a', '?u', '?o']}])
        t = map_state(sim.mapping, acl.init)
        assert t.relation('Admin') == {('root',)}
        assert t.universe('U') == {'root'}

    def test_is_a_function(self, m, acl):
        s = populate(acl, acl.init, 2)
        assert map_state(m, s) == map_state(m, populate(acl, acl.init, 2))


class TestMapCommand:
    def test_grant_assigns_to_private_role(self, m):
        t = map_state(m, populate(m.source, m.source.init, 1))
        trace, counter, level = map_command(m, grant('u1', 'u1', 'o1'), t)
        assert trace == [GroundCommand('assignPerm', (Atom('U', 'u1'), Atom('R', 'role(u1)'), Atom('P', 'o1')))]
        assert level == 'CDi'
        assert counter.cost == 0
        assert counter.commands_emitted == 1

    def test_contaminating_transfer_has_two_steps(self, transfer_contaminating, acl_transfer):
        mapping = transfer_contaminating.mapping
        t = map_state(mapping, state_from_primitive(acl_transfer, {'universes': {'U': ['u2']},
                                                                   'relations': {'ACL': [['u1', 'o1']]}}))
        cmd = GroundCommand('transfer', (Atom('U', 'u1'), Atom('U', 'u2'), Atom('O', 'o1')))
        trace, _, level = map_command(mapping, cmd, t)
        assert [str(c) for c in trace] == ['grant(u1,u2,o1)', 'revoke(u1,u1,o1)']
        assert level == 'CDt'

    def test_guarded_rule_emits_nothing_when_false(self, transfer_clean, acl_transfer):
        mapping = transfer_clean.mapping
        t = map_state(mapping, populate(acl_transfer, acl_transfer.init, 2))
        cmd = GroundCommand('transfer', (Atom('U', 'u1'), Atom('U', 'u2'), Atom('O', 'o1')))
        assert map_command(mapping, cmd, t)[0] == []

    def test_foreach_over_query(self, rbac):
        sim = simulation(mapping_variant('acl-to-rbac', command_rules=[MEMBER_SCAN_REVOKE]))
        t = state_from_primitive(rbac, {'universes': {'P': ['o1']},
                                        'relations': {'UR': [['u1', 'role(u1)'], ['u2', 'role(u1)']]}})
        cmd = GroundCommand('revoke', (Atom('U', 'u1'), Atom('U', 'u1'), Atom('O', 'o1')))
        trace, counter, level = map_command(sim.mapping, cmd, t)
        assert [str(c) for c in trace] == ['revokePerm(u1,role(u1),o1)', 'revokePerm(u2,role(u1),o1)']
        assert counter.bindings_enumerated == 2
        assert level == 'CDt'

    def test_relation_condition_is_state_dependent(self, logged):
        assert logged.mapping.command_rule('revoke').level == 'CDs'
        assert logged.mapping.command_rule('grant').level == 'CDi'


class TestDecideQuery:
    def test_single_query(self, m, acl):
        s = state_from_primitive(acl, {'universes': {'U': ['u2']}, 'relations': {'ACL': [['u1', 'o1']]}})
        t = map_state(m, s)
        value, counter, level = decide_query(m, auth('u1', 'o1'), t)
        assert value and level == 'QD1'
        assert counter.queries_consulted == 1
        assert not decide_query(m, auth('u2', 'o1'), t)[0]

    def test_atom_without_image(self, m, acl):
        t = map_state(m, populate(acl, acl.init, 1))
        with pytest.raises(exceptions.UntranslatableAtom):
            decide_query(m, auth('u9', 'o1'), t)

    def test_two_atoms_are_not_unitary(self):
        rule = {'query': 'access', 'params': ['?u', '?o'],
                'formula': {'and': [{'ask': ['auth', '?u', '?o']},
                                    {'ask': ['member', '?u', {'derive': ['role', '?u']}]}]}}
        sim = simulation(mapping_variant('acl-access-to-rbac', query_rules=[rule]))
        assert classify(sim.mapping.query_rule('access')) == 'QDi'

    def test_theory_decider_agrees_on_theory_equal_states(self, rbac):
        sim = simulation(mapping_variant('acl-to-rbac', query_rules=[ROLE_SCAN_AUTH]))
        base = {'universes': {'R': ['spare']}, 'relations': {'UR': [['u1', 'role(u1)']],
                                                            'PA': [['role(u1)', 'o1']]}}
        hidden = copy.deepcopy(base)
        hidden['relations']['PA'].append(['spare', 'o1'])
        t1, t2 = state_from_primitive(rbac, base), state_from_primitive(rbac, hidden)
        assert t1 != t2 and theory(rbac, t1) == theory(rbac, t2)
        q = auth('u1', 'o1')
        assert decide_query(sim.mapping, q, t1)[0] == decide_query(sim.mapping, q, t2)[0] is True
        assert sim.mapping.query_rule('auth').level == 'QDt'


class TestLoadMapping:
    def test_builtin(self, m):
        assert m.name == 'acl-to-rbac'
        assert [r.command for r in m.command_rules] == ['grant', 'revoke']
        assert m.sorts == {'U': 'U', 'O': 'P'}
        assert m.correspondence == 'SCa'

    def test_missing_command_rule(self, acl, rbac):
        doc = corpus_document('acl-to-rbac')
        doc['command_rules'] = doc['command_rules'][:1]
        with pytest.raises(exceptions.MissingCommandRule) as info:
            load_mapping(doc, acl, rbac)
        assert 'revoke' in info.value.message

    def test_missing_decider(self, acl, rbac):
        doc = corpus_document('acl-to-rbac')
        doc['query_rules'] = []
        with pytest.raises(exceptions.MissingQueryRule):
            load_mapping(doc, acl, rbac)

    def test_duplicate_rule(self, acl, rbac):
        doc = corpus_document('acl-to-rbac')
        doc['command_rules'].append(copy.deepcopy(doc['command_rules'][0]))
        with pytest.raises(exceptions.DuplicateRule):
            load_mapping(doc, acl, rbac)

    def test_unknown_emitted_relation(self, acl, rbac):
        doc = corpus_document('acl-to-rbac')
        doc['state_rules'][2]['emit'] = [{'tuple': ['ACL', '?u', '?o']}]
        with pytest.raises(exceptions.RuleEmitsUnknownRelation):
            load_mapping(doc, acl, rbac)

    def test_formula_decider_may_not_quantify(self, acl, rbac):
        doc = corpus_document('acl-to-rbac')
        doc['query_rules'] = [dict(ROLE_SCAN_AUTH, formula=ROLE_SCAN_AUTH['theory'], theory=None)]
        with pytest.raises(exceptions.InvalidDefinition):
            load_mapping(doc, acl, rbac)

    def test_one_decider_kind(self, acl, rbac):
        doc = corpus_document('acl-to-rbac')
        doc['query_rules'][0]['theory'] = {'ask': ['auth', '?u', '?o']}
        with pytest.raises(exceptions.InvalidDefinition):
            load_mapping(doc, acl, rbac)

    def test_unknown_request_transform(self):
        doc = corpus_document('acl-access-to-rbac')
        doc['request_transform'] = {'access': 'member'}
        with pytest.raises(exceptions.UnknownQuery):
            simulation(doc)

    def test_several_errors(self, acl, rbac):
        doc = corpus_document('acl-to-rbac')
        doc['command_rules'] = []
        doc['query_rules'] = []
        with pytest.raises(exceptions.SchemaErrors) as info:
            load_mapping(doc, acl, rbac)
        assert {type(e) for e in info.value.errors} == {exceptions.MissingCommandRule, exceptions.MissingQueryRule}


class TestIdentity:
    def test_identity_covers_everything(self, rbac):
        m = identity_mapping(rbac)
        assert {r.command for r in m.command_rules} == {c.name for c in rbac.commands}
        assert {r.query for r in m.query_rules} == {q.name for q in rbac.queries}
        assert (m.correspondence, m.reachability) == ('SCs', 'R↔')

    def test_identity_state_mapping(self, acl):
        m = identity_mapping(acl)
        s = state_from_primitive(acl, {'relations': {'ACL': [['u1', 'o1']]}, 'universes': {'U': ['u2']}})
        assert map_state(m, s) == s

    def test_identity_from_corpus(self):
        assert builtin_mapping('identity-acl').name == 'identity-acl'

    def test_emission_degree(self, m, quadratic):
        assert max(emission_degree(r) for r in m.state_rules) == 1
        assert max(emission_degree(r) for r in quadratic.mapping.state_rules) == 2


class TestSimulationDef:
    def test_defaults_from_mapping(self, m):
        sim = SimulationDef.of(m)
        assert sim.correspondence is PropertyTag.SCa
        assert sim.reachability is PropertyTag.Rfwd
        assert sim.name == 'acl-to-rbac[SCa,R→]'

    def test_replace_keeps_unset_levels(self, m):
        sim = SimulationDef.of(m).replace(reachability='Rbi')
        assert sim.correspondence is PropertyTag.SCa
        assert sim.reachability is PropertyTag.Rbi

    def test_rejects_other_dimensions(self, m):
        with pytest.raises(exceptions.UnknownTag):
            SimulationDef(m, 'QPa', 'R→')
