# -*- coding: utf-8 -*-
"""
Access control systems: schemas, states, queries and guarded commands.

A ``SystemDef`` is the checked, immutable form of a system description; build
one with ``validate_system``. States are immutable values, equal iff all
universes and relations are equal, and hashable so exploration can deduplicate
them.
"""
import itertools
import logging
from dataclasses import dataclass, field
from typing import Optional, Tuple

from acx import exceptions
from acx.formulas import (Ask, EvalContext, Exists, Member, Truth, Var, derive, parse_formula,
                          parse_term)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, order=True)
class Atom:
    sort: str
    ident: str

    def __str__(self):
        return self.ident

    def to_primitive(self):
        return {'sort': self.sort, 'id': self.ident}


@dataclass(frozen=True, order=True)
class GroundQuery:
    name: str
    args: Tuple[Atom, ...]

    def __str__(self):
        return '%s(%s)' % (self.name, ','.join(a.ident for a in self.args))

    def to_primitive(self):
        return str(self)


@dataclass(frozen=True, order=True)
class GroundCommand:
    name: str
    args: Tuple[Atom, ...]

    def __str__(self):
        return '%s(%s)' % (self.name, ','.join(a.ident for a in self.args))

    def to_primitive(self):
        return str(self)


class State:
    """An immutable protection state: one universe per sort, one tuple set per relation."""
    __slots__ = ('universes', 'relations', '_hash')

    def __init__(self, universes, relations):
        object.__setattr__(self, 'universes', {k: frozenset(v) for k, v in universes.items()})
        object.__setattr__(self, 'relations', {k: frozenset(tuple(t) for t in v) for k, v in relations.items()})
        object.__setattr__(self, '_hash', None)

    def __setattr__(self, key, value):
        raise TypeError('State is immutable')

    def universe(self, sort):
        return self.universes.get(sort, frozenset())

    def relation(self, name):
        return self.relations.get(name, frozenset())

    def size(self):
        return sum(len(u) for u in self.universes.values()) + sum(len(r) for r in self.relations.values())

    def replace(self, universes=None, relations=None):
        return State(dict(self.universes, **(universes or {})), dict(self.relations, **(relations or {})))

    def __eq__(self, other):
        if not isinstance(other, State):
            return NotImplemented
        return self.universes == other.universes and self.relations == other.relations

    def __hash__(self):
        if self._hash is None:
            object.__setattr__(self, '_hash', hash((frozenset(self.universes.items()),
                                                    frozenset(self.relations.items()))))
        return self._hash

    def __repr__(self):
        return '<State %s>' % self.describe()

    def describe(self):
        parts = ['%s={%s}' % (k, ','.join(sorted(v))) for k, v in sorted(self.universes.items())]
        parts += ['%s={%s}' % (k, ','.join('(%s)' % ','.join(t) for t in sorted(v)))
                  for k, v in sorted(self.relations.items())]
        return ' '.join(parts)

    def to_primitive(self):
        return {
            'universes': {k: sorted(v) for k, v in sorted(self.universes.items())},
            'relations': {k: [list(t) for t in sorted(v)] for k, v in sorted(self.relations.items())},
        }


def state_from_primitive(sys, data):
    """Rebuild a state of ``sys`` from its canonical primitive form."""
    data = data or {}
    universes = {s: set(data.get('universes', {}).get(s, [])) for s in sys.sorts}
    relations = {}
    for name, rel in sys.relations_by_name.items():
        rows = [tuple(r) for r in data.get('relations', {}).get(name, [])]
        for row in rows:
            if len(row) != len(rel.sorts):
                raise exceptions.ArityMismatch('tuple %r of %s has arity %d, expected %d'
                                               % (row, name, len(row), len(rel.sorts)))
            for sort, ident in zip(rel.sorts, row):
                universes[sort].add(ident)
        relations[name] = rows
    unknown = set(data.get('universes', {})) - set(sys.sorts)
    if unknown:
        raise exceptions.UnknownSort('unknown sort(s) in state: %s' % ', '.join(sorted(unknown)))
    unknown = set(data.get('relations', {})) - set(sys.relations_by_name)
    if unknown:
        raise exceptions.UnknownRelation('unknown relation(s) in state: %s' % ', '.join(sorted(unknown)))
    return State(universes, relations)


def canonical_state(sys, state):
    return state.to_primitive()


# ---------------------- definitions -----------------------

@dataclass(frozen=True)
class Param:
    name: str
    sort: str

    def to_primitive(self):
        return '%s:%s' % (self.name, self.sort)


@dataclass(frozen=True)
class RelationDef:
    name: str
    sorts: Tuple[str, ...]

    def to_primitive(self):
        return {'name': self.name, 'sorts': list(self.sorts)}


@dataclass(frozen=True)
class QueryDef:
    name: str
    params: Tuple[Param, ...]
    formula: object
    request: bool = False

    @property
    def param_sorts(self):
        return tuple(p.sort for p in self.params)

    def to_primitive(self):
        return {'name': self.name, 'params': [p.to_primitive() for p in self.params],
                'formula': self.formula.to_primitive(), 'request': self.request}


@dataclass(frozen=True)
class Add:
    relation: str
    terms: tuple

    def to_primitive(self):
        return {'add': [self.relation] + [t.to_primitive() for t in self.terms]}


@dataclass(frozen=True)
class Remove:
    relation: str
    terms: tuple

    def to_primitive(self):
        return {'remove': [self.relation] + [t.to_primitive() for t in self.terms]}


@dataclass(frozen=True)
class Fresh:
    var: str
    sort: str
    tag: str
    terms: tuple

    def to_primitive(self):
        return {'fresh': ['?' + self.var, self.sort, self.tag] + [t.to_primitive() for t in self.terms]}


@dataclass(frozen=True)
class CommandDef:
    name: str
    params: Tuple[Param, ...]
    guard: object
    effects: tuple
    actor: Optional[int] = None

    @property
    def param_sorts(self):
        return tuple(p.sort for p in self.params)

    def to_primitive(self):
        data = {'name': self.name, 'params': [p.to_primitive() for p in self.params],
                'guard': self.guard.to_primitive(), 'effects': [e.to_primitive() for e in self.effects]}
        if self.actor is not None:
            data['actor'] = self.actor
        return data


@dataclass(frozen=True)
class SystemDef:
    name: str
    sorts: Tuple[str, ...]
    relations: Tuple[RelationDef, ...]
    queries: Tuple[QueryDef, ...]
    commands: Tuple[CommandDef, ...]
    init: State
    admins: Optional[str] = None
    description: str = ''
    warnings: Tuple[str, ...] = field(default=(), compare=False)

    @property
    def relations_by_name(self):
        return {r.name: r for r in self.relations}

    @property
    def requests(self):
        return tuple(q for q in self.queries if q.request)

    def query(self, name):
        for q in self.queries:
            if q.name == name:
                return q
        raise exceptions.UnknownQuery('%s has no query %s' % (self.name, name))

    def command(self, name):
        for c in self.commands:
            if c.name == name:
                return c
        raise exceptions.UnknownCommand('%s has no command %s' % (self.name, name))

    def relation(self, name):
        try:
            return self.relations_by_name[name]
        except KeyError:
            raise exceptions.UnknownRelation('%s has no relation %s' % (self.name, name))

    def empty_state(self):
        return State({s: () for s in self.sorts}, {r.name: () for r in self.relations})

    def to_primitive(self):
        data = {
            'name': self.name,
            'sorts': list(self.sorts),
            'relations': [r.to_primitive() for r in self.relations],
            'queries': [q.to_primitive() for q in self.queries],
            'commands': [c.to_primitive() for c in self.commands],
            'init': self.init.to_primitive(),
        }
        if self.description:
            data['description'] = self.description
        if self.admins:
            data['admins'] = self.admins
        return data


# ---------------------- validation -----------------------

class SchemaChecker:
    """Collects every schema error of one description before reporting."""

    def __init__(self, name):
        self.name = name
        self.errors = []
        self.warnings = []

    def error(self, exc_cls, message):
        self.errors.append(exc_cls('%s: %s' % (self.name, message)))

    def run(self, fn, *args):
        try:
            return fn(*args)
        except exceptions.SchemaErrors as exc:
            self.errors.extend(exc.errors)
        except exceptions.AcxError as exc:
            self.errors.append(exc)
        return None

    def raise_errors(self):
        if len(self.errors) == 1:
            raise self.errors[0]
        if self.errors:
            raise exceptions.SchemaErrors(self.errors)


def parse_params(items, sorts, where, checker):
    params = []
    seen = set()
    for item in items:
        name, _, sort = item.partition(':')
        name = name.lstrip('?')
        if name in seen:
            checker.error(exceptions.DuplicateName, '%s declares parameter %s twice' % (where, name))
        seen.add(name)
        if sort not in sorts:
            checker.error(exceptions.UnknownSort, '%s: parameter %s has unknown sort %r' % (where, name, sort))
        params.append(Param(name, sort))
    return tuple(params)


def check_terms(terms, expected_sorts, scope, where, checker):
    """``scope`` maps variable names to sorts."""
    for term, sort in zip(terms, expected_sorts):
        for var in term.variables():
            if var not in scope:
                checker.error(exceptions.UnboundVariable, '%s: variable ?%s is not bound' % (where, var))
        if sort is not None and isinstance(term, Var) and scope.get(term.name) not in (None, sort):
            checker.error(exceptions.SortMismatch, '%s: ?%s has sort %s where %s is expected'
                          % (where, term.name, scope[term.name], sort))


def check_formula(formula, relations, sorts, scope, where, checker, queries=None):
    """Static check of a formula against a schema. ``queries`` (name -> sorts)
    enables ``ask`` leaves, which are otherwise rejected.
    """
    if isinstance(formula, Member):
        rel = relations.get(formula.relation)
        if rel is None:
            checker.error(exceptions.UnknownRelation, '%s: unknown relation %s' % (where, formula.relation))
            return
        if len(formula.terms) != len(rel.sorts):
            checker.error(exceptions.ArityMismatch, '%s: %s takes %d terms, got %d'
                          % (where, rel.name, len(rel.sorts), len(formula.terms)))
            return
        check_terms(formula.terms, rel.sorts, scope, where, checker)
    elif isinstance(formula, Ask):
        if queries is None:
            checker.error(exceptions.InvalidDefinition, '%s: query atom %s is not allowed here'
                          % (where, formula.query))
            return
        if formula.query not in queries:
            checker.error(exceptions.UnknownQuery, '%s: unknown query %s' % (where, formula.query))
            return
        expected = queries[formula.query]
        if len(formula.terms) != len(expected):
            checker.error(exceptions.ArityMismatch, '%s: %s takes %d terms, got %d'
                          % (where, formula.query, len(expected), len(formula.terms)))
            return
        check_terms(formula.terms, expected, scope, where, checker)
    elif isinstance(formula, Exists):
        if formula.sort not in sorts:
            checker.error(exceptions.UnknownSort, '%s: exists over unknown sort %r' % (where, formula.sort))
        check_formula(formula.body, relations, sorts, dict(scope, **{formula.var: formula.sort}), where, checker,
                      queries)
    elif isinstance(formula, Truth):
        pass
    elif hasattr(formula, 'items'):
        for item in formula.items:
            check_formula(item, relations, sorts, scope, where, checker, queries)
    elif hasattr(formula, 'body'):
        check_formula(formula.body, relations, sorts, scope, where, checker, queries)
    else:
        # eq
        for term in (formula.left, formula.right):
            for var in term.variables():
                if var not in scope:
                    checker.error(exceptions.UnboundVariable, '%s: variable ?%s is not bound' % (where, var))


def parse_effect(data, where):
    if not isinstance(data, dict) or len(data) != 1:
        raise exceptions.InvalidDefinition('%s: effect must be a single-key object: %r' % (where, data))
    (op, arg), = data.items()
    if not isinstance(arg, list) or not arg or not all(isinstance(x, str) for x in arg[:1]):
        raise exceptions.InvalidDefinition('%s: effect %s needs a list starting with a name' % (where, op))
    if op == 'add':
        return Add(arg[0], tuple(parse_term(t) for t in arg[1:]))
    if op == 'remove':
        return Remove(arg[0], tuple(parse_term(t) for t in arg[1:]))
    if op == 'fresh':
        if len(arg) < 3 or not all(isinstance(x, str) for x in arg[:3]):
            raise exceptions.InvalidDefinition('%s: fresh needs [var, sort, tag, terms...]' % where)
        return Fresh(arg[0].lstrip('?'), arg[1], arg[2], tuple(parse_term(t) for t in arg[3:]))
    raise exceptions.InvalidDefinition('%s: unknown effect %r' % (where, op))


def validate_system(description):
    """Check a system description and return the ``SystemDef``.

    Accepts the raw JSON document or an already checked ``SystemDef`` (which is
    returned unchanged). Raises the single schema error found, or
    ``SchemaErrors`` carrying all of them.
    """
    if isinstance(description, SystemDef):
        return description

    from acx.schemas import SystemDocument
    doc = SystemDocument().validate(description)
    checker = SchemaChecker(doc['name'] or 'system')

    sorts = []
    for sort in doc['sorts']:
        if sort in sorts:
            checker.error(exceptions.DuplicateName, 'sort %s declared twice' % sort)
        else:
            sorts.append(sort)

    relations = {}
    for rel in doc['relations']:
        if rel['name'] in relations or rel['name'] in sorts:
            checker.error(exceptions.DuplicateName, 'name %s declared twice' % rel['name'])
            continue
        for sort in rel['sorts']:
            if sort not in sorts:
                checker.error(exceptions.UnknownSort, 'relation %s uses unknown sort %r' % (rel['name'], sort))
        # an undeclared sort is kept as None so later terms are not checked against it
        relations[rel['name']] = RelationDef(rel['name'], tuple(s if s in sorts else None for s in rel['sorts']))

    queries = []
    names = set()
    for item in doc['queries']:
        where = 'query %s' % item['name']
        if item['name'] in names:
            checker.error(exceptions.DuplicateName, 'query %s declared twice' % item['name'])
        names.add(item['name'])
        params = parse_params(item['params'], sorts, where, checker)
        formula = checker.run(parse_formula, item['formula'])
        if formula is None:
            continue
        check_formula(formula, relations, sorts, {p.name: p.sort for p in params}, where, checker)
        request = item['request'] or item['name'] in (doc['requests'] or [])
        queries.append(QueryDef(item['name'], params, formula, bool(request)))
        if request and formula.has_negation():
            checker.warnings.append('%s: request %s uses negation' % (checker.name, item['name']))

    for name in doc['requests'] or []:
        if name not in names:
            checker.error(exceptions.UnknownQuery, 'request %s is not a declared query' % name)

    commands = []
    names = set()
    for item in doc['commands']:
        where = 'command %s' % item['name']
        if item['name'] in names:
            checker.error(exceptions.DuplicateName, 'command %s declared twice' % item['name'])
        names.add(item['name'])
        params = parse_params(item['params'], sorts, where, checker)
        scope = {p.name: p.sort for p in params}
        guard = checker.run(parse_formula, True if item['guard'] is None else item['guard'])
        if guard is not None:
            check_formula(guard, relations, sorts, scope, where, checker)
        effects = []
        for raw in item['effects']:
            effect = checker.run(parse_effect, raw, where)
            if effect is None:
                continue
            if isinstance(effect, Fresh):
                if effect.sort not in sorts:
                    checker.error(exceptions.UnknownSort, '%s: fresh atom of unknown sort %r' % (where, effect.sort))
                for term in effect.terms:
                    for var in term.variables():
                        if var not in scope:
                            checker.error(exceptions.UnboundVariable, '%s: variable ?%s is not bound' % (where, var))
                scope[effect.var] = effect.sort
            else:
                check_formula(Member(effect.relation, effect.terms), relations, sorts, scope, where, checker)
            effects.append(effect)
        actor = item['actor']
        if actor is not None and actor >= len(params):
            checker.error(exceptions.InvalidDefinition, '%s: actor index %d out of range' % (where, actor))
        commands.append(CommandDef(item['name'], params, guard or Truth(True), tuple(effects), actor))

    admins = doc['admins']
    if admins is not None:
        rel = relations.get(admins)
        if rel is None:
            checker.error(exceptions.UnknownRelation, 'admins relation %s is not declared' % admins)
        elif len(rel.sorts) != 1:
            checker.error(exceptions.ArityMismatch, 'admins relation %s must be unary' % admins)

    init = None
    if not checker.errors:
        ordered = tuple(relations[name] for name in relations)
        partial = SystemDef(checker.name, tuple(sorts), ordered, (), (), State({}, {}))
        init = checker.run(state_from_primitive, partial, doc['init'])
    checker.raise_errors()

    for warning in checker.warnings:
        logger.warning(warning)

    return SystemDef(
        name=checker.name,
        sorts=tuple(sorts),
        relations=tuple(relations.values()),
        queries=tuple(queries),
        commands=tuple(commands),
        init=init,
        admins=admins,
        description=doc['description'] or '',
        warnings=tuple(checker.warnings),
    )


# ---------------------- semantics -----------------------

def _coerce_args(params, args, what):
    if len(args) != len(params):
        raise exceptions.ArityMismatch('%s takes %d arguments, got %d' % (what, len(params), len(args)))
    atoms = []
    for param, arg in zip(params, args):
        if isinstance(arg, Atom):
            if arg.sort != param.sort:
                raise exceptions.SortMismatch('%s: argument %s has sort %s, expected %s'
                                              % (what, arg.ident, arg.sort, param.sort))
            atoms.append(arg)
        else:
            atoms.append(Atom(param.sort, arg))
    return tuple(atoms)


def entails(sys, state, query, args, counter=None):
    """``state ⊢ query(args)``. ``query`` is a name or a ``QueryDef``."""
    qdef = query if isinstance(query, QueryDef) else sys.query(query)
    atoms = _coerce_args(qdef.params, args, qdef.name)
    env = {p.name: a.ident for p, a in zip(qdef.params, atoms)}
    return qdef.formula.evaluate(EvalContext(state, counter=counter), env)


def _put(universes, relations, rel, row):
    relations[rel.name] = relations[rel.name] | {row}
    for sort, ident in zip(rel.sorts, row):
        if ident not in universes[sort]:
            universes[sort] = universes[sort] | {ident}


def step(sys, state, command, args=None):
    """Apply one command. Returns ``state`` itself when the guard fails.

    ``command`` may be a ``GroundCommand`` (then ``args`` is omitted) or a
    command name with its arguments.
    """
    if isinstance(command, GroundCommand):
        command, args = command.name, command.args
    cdef = sys.command(command)
    atoms = _coerce_args(cdef.params, args or (), cdef.name)
    env = {p.name: a.ident for p, a in zip(cdef.params, atoms)}
    if not cdef.guard.evaluate(EvalContext(state), env):
        return state

    universes = dict(state.universes)
    relations = dict(state.relations)
    for effect in cdef.effects:
        if isinstance(effect, Fresh):
            ident = derive(effect.tag, *(t.evaluate(env) for t in effect.terms))
            universes[effect.sort] = universes.get(effect.sort, frozenset()) | {ident}
            env[effect.var] = ident
            continue
        rel = sys.relation(effect.relation)
        row = tuple(t.evaluate(env) for t in effect.terms)
        if isinstance(effect, Add):
            _put(universes, relations, rel, row)
        else:
            relations[rel.name] = relations[rel.name] - {row}
    return State(universes, relations)


def run_trace(sys, state, commands):
    """Apply ``commands`` in order. Returns ``(final, intermediates)`` where
    ``intermediates[i]`` is the state after command ``i``.
    """
    intermediates = []
    for command in commands:
        state = step(sys, state, command)
        intermediates.append(state)
    return state, intermediates


def state_size(state):
    """Atoms in every universe plus tuples in every relation."""
    return state.size()


def ground_instances(params, state):
    pools = [[Atom(p.sort, i) for i in sorted(state.universe(p.sort))] for p in params]
    return itertools.product(*pools)


def ground_queries(sys, state, requests_only=False):
    queries = sys.requests if requests_only else sys.queries
    for qdef in queries:
        for args in ground_instances(qdef.params, state):
            yield GroundQuery(qdef.name, args)


def ground_commands(sys, state):
    for cdef in sys.commands:
        for args in ground_instances(cdef.params, state):
            yield GroundCommand(cdef.name, args)


def theory(sys, state):
    """Every ground query over the universes of ``state`` with its truth value."""
    return {q: entails(sys, state, q.name, q.args) for q in ground_queries(sys, state)}


def allowed(sys, state):
    """The set of true ground requests."""
    return frozenset(q for q in ground_queries(sys, state, requests_only=True) if entails(sys, state, q.name, q.args))


def actor_of(sys, command):
    cdef = sys.command(command.name)
    if cdef.actor is None:
        return None
    return command.args[cdef.actor]


def administrators(sys, state):
    if not sys.admins:
        return frozenset()
    return frozenset(row[0] for row in state.relation(sys.admins))


def populate(sys, state, atoms_per_sort):
    """Top each universe up to ``atoms_per_sort`` atoms named ``<sort><i>``
    (lower-cased sort, 1-based, skipping names already present).
    """
    universes = {}
    for sort in sys.sorts:
        current = set(state.universe(sort))
        index = 1
        while len(current) < atoms_per_sort:
            ident = '%s%d' % (sort.lower(), index)
            index += 1
            current.add(ident)
        universes[sort] = current
    return State(universes, {r.name: state.relation(r.name) for r in sys.relations})


__all__ = ['Atom', 'GroundQuery', 'GroundCommand', 'State', 'SystemDef', 'QueryDef', 'CommandDef', 'RelationDef',
           'Param', 'Add', 'Remove', 'Fresh', 'validate_system', 'entails', 'step', 'run_trace', 'state_size',
           'theory', 'allowed', 'ground_queries', 'ground_commands', 'ground_instances', 'populate',
           'canonical_state', 'state_from_primitive', 'actor_of', 'administrators', 'check_formula',
           'check_terms', 'parse_params', 'SchemaChecker']
