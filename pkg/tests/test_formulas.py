# -*- coding: utf-8 -*-
"""Tests for formula parsing and evaluation."""
import pytest
from hypothesis import HealthCheck, given, settings as hsettings, strategies as st

from acx import exceptions
from acx.formulas import (And, Ask, Const, Derive, EvalContext, Exists, Member, Truth, Var, derive,
                          expand_exists, parse_formula, parse_term, substitute)
from acx.mapping import CostCounter
from acx.system import State

USERS = ['u1', 'u2', 'u3']
ROLES = ['r1', 'r2']


def role_state(ur=(), users=USERS, roles=ROLES):
    return State({'U': users, 'R': roles}, {'UR': ur})


class TestParse:
    def test_terms(self):
        assert parse_term('?u') == Var('u')
        assert parse_term('root') == Const('root')
        assert parse_term({'derive': ['role', '?u']}) == Derive('role', (Var('u'),))

    def test_exists_strips_marker(self):
        f = parse_formula({'exists': ['?r', 'R', {'member': ['UR', '?u', '?r']}]})
        assert f == Exists('r', 'R', Member('UR', (Var('u'), Var('r'))))
        assert f.free_variables() == {'u'}
        assert f.has_quantifier()

    def test_to_primitive_keeps_shape(self):
        raw = {'and': [{'ask': ['auth', '?u', '?o']}, {'not': {'eq': ['?u', 'root']}}]}
        assert parse_formula(raw).to_primitive() == raw

    @pytest.mark.parametrize('raw', [
        {'member': []},
        {'eq': ['?a']},
        {'exists': ['?r', {'member': ['UR', '?u', '?r']}]},
        {'implies': [True, False]},
        {'and': True, 'or': False},
        'true',
    ])
    def test_rejects_malformed(self, raw):
        with pytest.raises(exceptions.InvalidDefinition):
            parse_formula(raw)

    def test_rejects_empty_variable(self):
        with pytest.raises(exceptions.InvalidDefinition):
            parse_term('?')


class TestEvaluate:
    def test_derive_is_structural(self):
        assert derive('role', 'u1') == 'role(u1)'
        assert Derive('role', (Var('u'),)).evaluate({'u': 'u1'}) == derive('role', 'u1')

    def test_unbound_variable(self):
        with pytest.raises(exceptions.UnboundVariable):
            Member('UR', (Var('u'), Var('r'))).evaluate(EvalContext(role_state()), {'u': 'u1'})

    def test_ask_needs_an_oracle(self):
        with pytest.raises(exceptions.InvalidDefinition):
            Ask('auth', (Var('u'),)).evaluate(EvalContext(role_state()), {'u': 'u1'})

    def test_counter(self):
        counter = CostCounter()
        f = Exists('r', 'R', Member('UR', (Var('u'), Var('r'))))
        assert not f.evaluate(EvalContext(role_state(), counter=counter), {'u': 'u1'})
        assert counter.bindings_enumerated == len(ROLES)
        assert counter.state_items_inspected == len(ROLES)

    def test_ask_uses_oracle(self):
        asked = []

        def oracle(name, idents):
            asked.append((name, idents))
            return True
        ctx = EvalContext(role_state(), ask=oracle, counter=CostCounter())
        assert And((Ask('auth', (Var('u'), Const('p1'))), Truth(True))).evaluate(ctx, {'u': 'u2'})
        assert asked == [('auth', ('u2', 'p1'))]
        assert ctx.counter.queries_consulted == 1

    def test_substitute_respects_binding(self):
        f = Exists('r', 'R', Member('UR', (Var('u'), Var('r'))))
        g = substitute(f, {'u': Const('u1'), 'r': Const('r9')})
        assert g == Exists('r', 'R', Member('UR', (Const('u1'), Var('r'))))

    @hsettings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
    @given(ur=st.sets(st.tuples(st.sampled_from(USERS), st.sampled_from(ROLES))), user=st.sampled_from(USERS))
    def test_exists_matches_explicit_disjunction(self, ur, user):
        state = role_state(ur)
        f = parse_formula({'exists': ['?r', 'R', {'and': [{'member': ['UR', '?u', '?r']},
                                                         {'not': {'eq': ['?r', 'r2']}}]}]})
        ctx = EvalContext(state)
        assert f.evaluate(ctx, {'u': user}) == expand_exists(f, state).evaluate(ctx, {'u': user})
        assert f.evaluate(ctx, {'u': user}) == ((user, 'r1') in ur)
