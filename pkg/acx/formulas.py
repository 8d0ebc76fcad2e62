# -*- coding: utf-8 -*-
"""
Formula trees shared by system queries, command guards, mapping conditions and
query deciders.

JSON form::

    {"member": [rel, t1, t2]}     tuple membership in a relation of the state
    {"ask": [query, t1, t2]}      value of a (target) query, mapping side only
    {"eq": [t1, t2]}              identity of two atoms
    {"not": F} {"and": [F...]} {"or": [F...]}
    {"exists": [var, sort, F]}    enumeration over the universe of ``sort``
    true / false

Terms are ``"?x"`` (parameter or bound variable), a constant identifier, or
``{"derive": [tag, t1, ...]}`` which builds the structural identifier
``tag(a1,...)``.
"""
import itertools
from dataclasses import dataclass
from typing import Tuple

from acx.exceptions import InvalidDefinition, UnboundVariable


def derive(tag, *idents):
    """Structural identity of a derived atom: equal (tag, args) give equal identifiers."""
    return '%s(%s)' % (tag, ','.join(idents))


# ---------------------- terms -----------------------

@dataclass(frozen=True)
class Var:
    name: str

    def evaluate(self, env):
        try:
            return env[self.name]
        except KeyError:
            raise UnboundVariable('variable ?%s is not bound' % self.name)

    def variables(self):
        return {self.name}

    def to_primitive(self):
        return '?' + self.name


@dataclass(frozen=True)
class Const:
    ident: str

    def evaluate(self, env):
        return self.ident

    def variables(self):
        return set()

    def to_primitive(self):
        return self.ident


@dataclass(frozen=True)
class Derive:
    tag: str
    args: Tuple

    def evaluate(self, env):
        return derive(self.tag, *(a.evaluate(env) for a in self.args))

    def variables(self):
        return set().union(*(a.variables() for a in self.args)) if self.args else set()

    def to_primitive(self):
        return {'derive': [self.tag] + [a.to_primitive() for a in self.args]}


def parse_term(data):
    if isinstance(data, str):
        if data.startswith('?'):
            if len(data) < 2:
                raise InvalidDefinition('empty variable name in term %r' % data)
            return Var(data[1:])
        if not data:
            raise InvalidDefinition('empty constant term')
        return Const(data)
    if isinstance(data, dict) and set(data) == {'derive'}:
        items = data['derive']
        if not isinstance(items, list) or not items or not isinstance(items[0], str):
            raise InvalidDefinition('derive term needs [tag, terms...]: %r' % (data,))
        return Derive(items[0], tuple(parse_term(t) for t in items[1:]))
    raise InvalidDefinition('invalid term: %r' % (data,))


# ---------------------- formulas -----------------------

class Formula:
    """Base class. ``evaluate(ctx, env)`` where ``ctx`` is an ``EvalContext``."""

    def free_variables(self):
        raise NotImplementedError

    def leaves(self):
        """Member / Ask / Eq leaves, in tree order."""
        raise NotImplementedError

    def has_quantifier(self):
        return False

    def has_negation(self):
        return False


@dataclass(frozen=True)
class Truth(Formula):
    value: bool

    def evaluate(self, ctx, env):
        return self.value

    def free_variables(self):
        return set()

    def leaves(self):
        return []

    def to_primitive(self):
        return self.value


@dataclass(frozen=True)
class Member(Formula):
    relation: str
    terms: Tuple

    def evaluate(self, ctx, env):
        if ctx.counter is not None:
            ctx.counter.state_items_inspected += 1
        row = tuple(t.evaluate(env) for t in self.terms)
        return row in ctx.state.relation(self.relation)

    def free_variables(self):
        return set().union(*(t.variables() for t in self.terms)) if self.terms else set()

    def leaves(self):
        return [self]

    def to_primitive(self):
        return {'member': [self.relation] + [t.to_primitive() for t in self.terms]}


@dataclass(frozen=True)
class Ask(Formula):
    query: str
    terms: Tuple

    def evaluate(self, ctx, env):
        if ctx.ask is None:
            raise InvalidDefinition('query atom %s used where no query oracle is available' % self.query)
        if ctx.counter is not None:
            ctx.counter.queries_consulted += 1
        return ctx.ask(self.query, tuple(t.evaluate(env) for t in self.terms))

    def free_variables(self):
        return set().union(*(t.variables() for t in self.terms)) if self.terms else set()

    def leaves(self):
        return [self]

    def to_primitive(self):
        return {'ask': [self.query] + [t.to_primitive() for t in self.terms]}


@dataclass(frozen=True)
class Eq(Formula):
    left: object
    right: object

    def evaluate(self, ctx, env):
        return self.left.evaluate(env) == self.right.evaluate(env)

    def free_variables(self):
        return self.left.variables() | self.right.variables()

    def leaves(self):
        return [self]

    def to_primitive(self):
        return {'eq': [self.left.to_primitive(), self.right.to_primitive()]}


@dataclass(frozen=True)
class Not(Formula):
    body: Formula

    def evaluate(self, ctx, env):
        return not self.body.evaluate(ctx, env)

    def free_variables(self):
        return self.body.free_variables()

    def leaves(self):
        return self.body.leaves()

    def has_quantifier(self):
        return self.body.has_quantifier()

    def has_negation(self):
        return True

    def to_primitive(self):
        return {'not': self.body.to_primitive()}


@dataclass(frozen=True)
class And(Formula):
    items: Tuple

    def evaluate(self, ctx, env):
        return all(f.evaluate(ctx, env) for f in self.items)

    def free_variables(self):
        return set().union(*(f.free_variables() for f in self.items)) if self.items else set()

    def leaves(self):
        return [leaf for f in self.items for leaf in f.leaves()]

    def has_quantifier(self):
        return any(f.has_quantifier() for f in self.items)

    def has_negation(self):
        return any(f.has_negation() for f in self.items)

    def to_primitive(self):
        return {'and': [f.to_primitive() for f in self.items]}


@dataclass(frozen=True)
class Or(Formula):
    items: Tuple

    def evaluate(self, ctx, env):
        return any(f.evaluate(ctx, env) for f in self.items)

    def free_variables(self):
        return set().union(*(f.free_variables() for f in self.items)) if self.items else set()

    def leaves(self):
        return [leaf for f in self.items for leaf in f.leaves()]

    def has_quantifier(self):
        return any(f.has_quantifier() for f in self.items)

    def has_negation(self):
        return any(f.has_negation() for f in self.items)

    def to_primitive(self):
        return {'or': [f.to_primitive() for f in self.items]}


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    sort: str
    body: Formula

    def evaluate(self, ctx, env):
        for ident in sorted(ctx.state.universe(self.sort)):
            if ctx.counter is not None:
                ctx.counter.bindings_enumerated += 1
            if self.body.evaluate(ctx, dict(env, **{self.var: ident})):
                return True
        return False

    def free_variables(self):
        return self.body.free_variables() - {self.var}

    def leaves(self):
        return self.body.leaves()

    def has_quantifier(self):
        return True

    def has_negation(self):
        return self.body.has_negation()

    def to_primitive(self):
        return {'exists': [self.var, self.sort, self.body.to_primitive()]}


class EvalContext:
    """What a formula may observe: the state, an optional query oracle for
    ``ask`` leaves and an optional cost counter.
    """
    __slots__ = ('state', 'ask', 'counter')

    def __init__(self, state, ask=None, counter=None):
        self.state = state
        self.ask = ask
        self.counter = counter


def parse_formula(data):
    if isinstance(data, bool):
        return Truth(data)
    if not isinstance(data, dict) or len(data) != 1:
        raise InvalidDefinition('formula node must be true/false or a single-key object: %r' % (data,))
    (op, arg), = data.items()
    if op in ('member', 'ask'):
        if not isinstance(arg, list) or not arg or not isinstance(arg[0], str):
            raise InvalidDefinition('%s needs [name, terms...]: %r' % (op, arg))
        terms = tuple(parse_term(t) for t in arg[1:])
        return Member(arg[0], terms) if op == 'member' else Ask(arg[0], terms)
    if op == 'eq':
        if not isinstance(arg, list) or len(arg) != 2:
            raise InvalidDefinition('eq needs exactly two terms: %r' % (arg,))
        return Eq(parse_term(arg[0]), parse_term(arg[1]))
    if op == 'not':
        return Not(parse_formula(arg))
    if op in ('and', 'or'):
        if not isinstance(arg, list):
            raise InvalidDefinition('%s needs a list of formulas' % op)
        items = tuple(parse_formula(f) for f in arg)
        return And(items) if op == 'and' else Or(items)
    if op == 'exists':
        if not isinstance(arg, list) or len(arg) != 3 or not all(isinstance(x, str) for x in arg[:2]):
            raise InvalidDefinition('exists needs [var, sort, formula]: %r' % (arg,))
        return Exists(arg[0].lstrip('?'), arg[1], parse_formula(arg[2]))
    raise InvalidDefinition('unknown formula operator %r' % op)


def expand_exists(formula, state):
    """Rewrite every ``exists`` into the explicit disjunction over the current
    universe. Used to cross-check quantifier evaluation.
    """
    if isinstance(formula, Exists):
        items = []
        for ident in sorted(state.universe(formula.sort)):
            items.append(substitute(expand_exists(formula.body, state), {formula.var: Const(ident)}))
        return Or(tuple(items))
    if isinstance(formula, Not):
        return Not(expand_exists(formula.body, state))
    if isinstance(formula, And):
        return And(tuple(expand_exists(f, state) for f in formula.items))
    if isinstance(formula, Or):
        return Or(tuple(expand_exists(f, state) for f in formula.items))
    return formula


def substitute(formula, mapping):
    """Replace variables by terms (``mapping``: var name -> term)."""

    def term(t):
        if isinstance(t, Var):
            return mapping.get(t.name, t)
        if isinstance(t, Derive):
            return Derive(t.tag, tuple(term(a) for a in t.args))
        return t

    if isinstance(formula, Member):
        return Member(formula.relation, tuple(term(t) for t in formula.terms))
    if isinstance(formula, Ask):
        return Ask(formula.query, tuple(term(t) for t in formula.terms))
    if isinstance(formula, Eq):
        return Eq(term(formula.left), term(formula.right))
    if isinstance(formula, Not):
        return Not(substitute(formula.body, mapping))
    if isinstance(formula, And):
        return And(tuple(substitute(f, mapping) for f in formula.items))
    if isinstance(formula, Or):
        return Or(tuple(substitute(f, mapping) for f in formula.items))
    if isinstance(formula, Exists):
        inner = {k: v for k, v in mapping.items() if k != formula.var}
        return Exists(formula.var, formula.sort, substitute(formula.body, inner))
    return formula


def assignments(variables, candidates):
    """Cartesian enumeration of ``variables`` over ``candidates[var]`` in canonical order."""
    pools = [sorted(candidates[v]) for v in variables]
    for values in itertools.product(*pools):
        yield dict(zip(variables, values))
