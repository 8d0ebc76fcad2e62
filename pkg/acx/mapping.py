# -*- coding: utf-8 -*-
"""
Mappings between access control systems and their instrumented interpreter.

A mapping has three parts: state rules (the state mapping), command rules (one
per source command, producing a sequence of target commands) and query rules
(one decider per source query). Rules are declarative so that their dependence
on the target state can be read off the rule itself and confirmed by running it.

Mapping file::

    {
      "source": "acl", "target": "rbac",
      "sorts": {"O": "P"},
      "state_rules": [{"match": [{"sort": ["U", "?u"]}],
                       "emit": [{"atom": ["R", {"derive": ["role", "?u"]}]}]}],
      "command_rules": [{"command": "grant",
                         "body": [{"emit": ["assignPerm", "?a", {"derive": ["role", "?u"]}, "?o"]}]}],
      "query_rules": [{"query": "auth", "formula": {"ask": ["auth", "?u", "?o"]}}]
    }

Body steps are ``{"emit": [cmd, terms...]}``,
``{"foreach": {"query"|"relation": [name, terms...], "body": [...]}}`` and
``{"when": {"query"|"relation": [...] | "formula": F, "body": [...], "else": [...]}}``.
"""
import itertools
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Tuple

from acx import exceptions
from acx.formulas import Ask, EvalContext, Member, Var, parse_formula, parse_term
from acx.system import (Atom, GroundCommand, SchemaChecker, State, SystemDef, check_formula, check_terms,
                        entails)
from acx.tags import PropertyTag

logger = logging.getLogger(__name__)

INDEPENDENT, THEORY, STATE = 'CDi', 'CDt', 'CDs'


class CostCounter:
    """Work done by one interpretation call."""
    __slots__ = ('bindings_enumerated', 'state_items_inspected', 'commands_emitted', 'queries_consulted')

    def __init__(self):
        self.bindings_enumerated = 0
        self.state_items_inspected = 0
        self.commands_emitted = 0
        self.queries_consulted = 0

    @property
    def cost(self):
        return self.bindings_enumerated + self.state_items_inspected

    def add(self, other):
        for name in self.__slots__:
            setattr(self, name, getattr(self, name) + getattr(other, name))
        return self

    def to_primitive(self):
        return {name: getattr(self, name) for name in self.__slots__}


# ---------------------- rules -----------------------

@dataclass(frozen=True)
class SortClause:
    sort: str
    var: str


@dataclass(frozen=True)
class RelationClause:
    relation: str
    terms: tuple


@dataclass(frozen=True)
class EmitAtom:
    sort: str
    term: object


@dataclass(frozen=True)
class EmitTuple:
    relation: str
    terms: tuple


@dataclass(frozen=True)
class StateMappingRule:
    match: tuple
    emit: tuple

    def to_primitive(self):
        clauses = []
        for c in self.match:
            if isinstance(c, SortClause):
                clauses.append({'sort': [c.sort, '?' + c.var]})
            else:
                clauses.append({'relation': [c.relation] + [t.to_primitive() for t in c.terms]})
        emit = []
        for e in self.emit:
            if isinstance(e, EmitAtom):
                emit.append({'atom': [e.sort, e.term.to_primitive()]})
            else:
                emit.append({'tuple': [e.relation] + [t.to_primitive() for t in e.terms]})
        return {'match': clauses, 'emit': emit}


@dataclass(frozen=True)
class EmitStep:
    command: str
    terms: tuple


@dataclass(frozen=True)
class QueryBinding:
    query: str
    terms: tuple


@dataclass(frozen=True)
class RelationBinding:
    relation: str
    terms: tuple


@dataclass(frozen=True)
class ForeachStep:
    binding: object
    body: tuple


@dataclass(frozen=True)
class WhenStep:
    condition: object
    body: tuple
    orelse: tuple = ()


@dataclass(frozen=True)
class CommandMappingRule:
    command: str
    params: Tuple[str, ...]
    body: tuple

    @cached_property
    def level(self):
        return classify(self)


@dataclass(frozen=True)
class QueryDeciderRule:
    query: str
    params: Tuple[str, ...]
    kind: str  # 'formula' | 'theory' | 'state'
    formula: object

    @cached_property
    def level(self):
        return classify(self)

    def referenced_queries(self):
        return sorted({leaf.query for leaf in self.formula.leaves() if isinstance(leaf, Ask)})


@dataclass(frozen=True)
class MappingDef:
    name: str
    source: SystemDef
    target: SystemDef
    sort_map: Tuple[Tuple[str, str], ...]
    state_rules: Tuple[StateMappingRule, ...]
    command_rules: Tuple[CommandMappingRule, ...]
    query_rules: Tuple[QueryDeciderRule, ...]
    request_transform: Optional[Tuple[Tuple[str, str], ...]] = None
    correspondence: str = 'SCa'
    reachability: str = 'R→'
    description: str = field(default='', compare=False)

    @cached_property
    def sorts(self):
        return dict(self.sort_map)

    @cached_property
    def _command_rules(self):
        return {r.command: r for r in self.command_rules}

    @cached_property
    def _query_rules(self):
        return {r.query: r for r in self.query_rules}

    @cached_property
    def transform(self):
        return dict(self.request_transform) if self.request_transform is not None else None

    def command_rule(self, name):
        try:
            return self._command_rules[name]
        except KeyError:
            raise exceptions.MissingCommandRule('%s: no rule for command %s' % (self.name, name))

    def query_rule(self, name):
        try:
            return self._query_rules[name]
        except KeyError:
            raise exceptions.MissingQueryRule('%s: no decider for query %s' % (self.name, name))

    def translate(self, atom):
        """Carry a source atom into the target: same identifier, translated sort."""
        try:
            return Atom(self.sorts[atom.sort], atom.ident)
        except KeyError:
            raise exceptions.UntranslatableAtom('%s: sort %s of %s has no target image'
                                                % (self.name, atom.sort, atom.ident))

    def inverse_sorts(self, target_sort):
        return [s for s, t in self.sort_map if t == target_sort]


@dataclass(frozen=True)
class SimulationDef:
    mapping: MappingDef
    correspondence: PropertyTag
    reachability: PropertyTag

    def __post_init__(self):
        correspondence = PropertyTag.parse(self.correspondence)
        reachability = PropertyTag.parse(self.reachability)
        if correspondence not in (PropertyTag.SCs, PropertyTag.SCq, PropertyTag.SCa):
            raise exceptions.UnknownTag('%s is not a correspondence level' % correspondence)
        if reachability not in (PropertyTag.Rfwd, PropertyTag.Rbi):
            raise exceptions.UnknownTag('%s is not a reachability level' % reachability)
        object.__setattr__(self, 'correspondence', correspondence)
        object.__setattr__(self, 'reachability', reachability)

    @classmethod
    def of(cls, mapping, correspondence=None, reachability=None):
        return cls(mapping, correspondence or mapping.correspondence, reachability or mapping.reachability)

    def replace(self, correspondence=None, reachability=None):
        return SimulationDef(self.mapping, correspondence or self.correspondence, reachability or self.reachability)

    @property
    def name(self):
        return '%s[%s,%s]' % (self.mapping.name, self.correspondence, self.reachability)


# ---------------------- static analyses -----------------------

def _steps(body):
    for step in body:
        yield step
        if isinstance(step, ForeachStep):
            yield from _steps(step.body)
        elif isinstance(step, WhenStep):
            yield from _steps(step.body)
            yield from _steps(step.orelse)


def _observes_state(formula):
    return any(isinstance(leaf, Member) for leaf in formula.leaves())


def _observes_theory(formula):
    return formula.has_quantifier() or any(isinstance(leaf, Ask) for leaf in formula.leaves())


def classify(rule):
    """Dependence level a rule exhibits by construction.

    Command rules: ``CDi`` without state-observing steps, ``CDt`` when only
    target queries (or universes) are consulted, ``CDs`` when a raw relation is
    read. Query rules: ``QD1`` for a decider that is one target query atom,
    ``QDi`` for a quantifier-free formula over target queries, ``QDt`` for a
    theory formula, ``QDs`` when raw relations are read.
    """
    if isinstance(rule, QueryDeciderRule):
        if rule.kind == 'state' or _observes_state(rule.formula):
            return 'QDs'
        if rule.kind == 'theory' or rule.formula.has_quantifier():
            return 'QDt'
        if isinstance(rule.formula, Ask):
            return 'QD1'
        return 'QDi'

    level = INDEPENDENT
    for step in _steps(rule.body):
        if isinstance(step, ForeachStep):
            if isinstance(step.binding, RelationBinding):
                return STATE
            level = THEORY
        elif isinstance(step, WhenStep):
            if _observes_state(step.condition):
                return STATE
            if _observes_theory(step.condition):
                level = THEORY
    return level


def emission_degree(rule):
    """Number of match clauses that introduce a new variable: the polynomial
    degree of the rule's output in the size of the source state.
    """
    bound = set()
    degree = 0
    for clause in rule.match:
        if isinstance(clause, SortClause):
            fresh = {clause.var} - bound
        else:
            fresh = set().union(*(t.variables() for t in clause.terms)) - bound if clause.terms else set()
        if fresh:
            degree += 1
        bound |= fresh
    return degree


def emission_multiplicity(rule):
    return len(rule.emit)


# ---------------------- interpretation -----------------------

def _match(rule, state, env=None):
    """Variable bindings of a state rule, in canonical order."""
    envs = [dict(env or {})]
    for clause in rule.match:
        next_envs = []
        for current in envs:
            if isinstance(clause, SortClause):
                if clause.var in current:
                    if current[clause.var] in state.universe(clause.sort):
                        next_envs.append(current)
                    continue
                for ident in sorted(state.universe(clause.sort)):
                    next_envs.append(dict(current, **{clause.var: ident}))
            else:
                next_envs.extend(_unify_rows(clause.terms, sorted(state.relation(clause.relation)), current))
        envs = next_envs
    return envs


def _unify_rows(terms, rows, env, counter=None):
    result = []
    for row in rows:
        if counter is not None:
            counter.state_items_inspected += 1
        candidate = dict(env)
        for term, ident in zip(terms, row):
            if isinstance(term, Var) and term.name not in candidate:
                candidate[term.name] = ident
            elif term.evaluate(candidate) != ident:
                break
        else:
            result.append(candidate)
    return result


def map_state(m, s):
    """The state mapping. Emitted tuples also put their components into the
    universes of the target, so the image is schema-valid.
    """
    target = m.target
    universes = {sort: set() for sort in target.sorts}
    relations = {r.name: set() for r in target.relations}
    schema = target.relations_by_name
    for rule in m.state_rules:
        for env in _match(rule, s):
            for emission in rule.emit:
                if isinstance(emission, EmitAtom):
                    universes[emission.sort].add(emission.term.evaluate(env))
                    continue
                rel = schema.get(emission.relation)
                if rel is None:
                    raise exceptions.RuleEmitsUnknownRelation('%s: %s is not a relation of %s'
                                                              % (m.name, emission.relation, target.name))
                row = tuple(t.evaluate(env) for t in emission.terms)
                relations[rel.name].add(row)
                for sort, ident in zip(rel.sorts, row):
                    universes[sort].add(ident)
    return State(universes, relations)


def _target_ask(m, state):
    target = m.target

    def ask(name, idents):
        return entails(target, state, name, idents)
    return ask


def _bind_command_args(m, rule, cmd):
    cdef = m.source.command(cmd.name)
    if len(cmd.args) != len(cdef.params):
        raise exceptions.ArityMismatch('%s takes %d arguments, got %d' % (cdef.name, len(cdef.params), len(cmd.args)))
    params = rule.params or tuple(p.name for p in cdef.params)
    env = {}
    for name, param, arg in zip(params, cdef.params, cmd.args):
        atom = arg if isinstance(arg, Atom) else Atom(param.sort, arg)
        if atom.sort != param.sort:
            raise exceptions.SortMismatch('%s: argument %s has sort %s, expected %s'
                                          % (cdef.name, atom.ident, atom.sort, param.sort))
        env[name] = atom.ident
    return env


def _run_body(m, body, env, ctx, out):
    target = m.target
    for step in body:
        if isinstance(step, EmitStep):
            cdef = target.command(step.command)
            idents = [t.evaluate(env) for t in step.terms]
            out.append(GroundCommand(cdef.name, tuple(Atom(p.sort, i) for p, i in zip(cdef.params, idents))))
            ctx.counter.commands_emitted += 1
        elif isinstance(step, ForeachStep):
            binding = step.binding
            if isinstance(binding, RelationBinding):
                rows = sorted(ctx.state.relation(binding.relation))
                for bound in _unify_rows(binding.terms, rows, env, ctx.counter):
                    ctx.counter.bindings_enumerated += 1
                    _run_body(m, step.body, bound, ctx, out)
            else:
                qdef = target.query(binding.query)
                free = []
                candidates = {}
                for term, param in zip(binding.terms, qdef.params):
                    if isinstance(term, Var) and term.name not in env and term.name not in candidates:
                        free.append(term.name)
                        candidates[term.name] = ctx.state.universe(param.sort)
                pools = [sorted(candidates[v]) for v in free]
                for values in itertools.product(*pools):
                    ctx.counter.bindings_enumerated += 1
                    bound = dict(env, **dict(zip(free, values)))
                    if Ask(binding.query, binding.terms).evaluate(ctx, bound):
                        _run_body(m, step.body, bound, ctx, out)
        elif isinstance(step, WhenStep):
            if step.condition.evaluate(ctx, env):
                _run_body(m, step.body, env, ctx, out)
            else:
                _run_body(m, step.orelse, env, ctx, out)


def map_command(m, cmd, t):
    """Interpret the command rule of ``cmd`` against target state ``t``.

    Returns ``(commands, counter, level)``: the target command sequence, the
    work done, and the dependence level of the rule.
    """
    rule = m.command_rule(cmd.name)
    env = _bind_command_args(m, rule, cmd)
    counter = CostCounter()
    ctx = EvalContext(t, ask=_target_ask(m, t), counter=counter)
    out = []
    _run_body(m, rule.body, env, ctx, out)
    return out, counter, rule.level


def decide_query(m, q, t):
    """Decide source ground query ``q`` on target state ``t``.

    Returns ``(value, counter, level)``. Every argument must have a target
    image present in ``t``.
    """
    rule = m.query_rule(q.name)
    qdef = m.source.query(q.name)
    if len(q.args) != len(qdef.params):
        raise exceptions.ArityMismatch('%s takes %d arguments, got %d' % (q.name, len(qdef.params), len(q.args)))
    params = rule.params or tuple(p.name for p in qdef.params)
    env = {}
    for name, atom in zip(params, q.args):
        image = m.translate(atom)
        if image.ident not in t.universe(image.sort):
            raise exceptions.UntranslatableAtom('%s: %s has no image of sort %s in the target state'
                                                % (m.name, atom.ident, image.sort))
        env[name] = image.ident
    counter = CostCounter()
    value = rule.formula.evaluate(EvalContext(t, ask=_target_ask(m, t), counter=counter), env)
    return bool(value), counter, rule.level


# ---------------------- loading -----------------------

def _parse_clause(data):
    if isinstance(data, dict) and len(data) == 1:
        (kind, arg), = data.items()
        if kind == 'sort' and isinstance(arg, list) and len(arg) == 2 and all(isinstance(x, str) for x in arg):
            return SortClause(arg[0], arg[1].lstrip('?'))
        if kind == 'relation' and isinstance(arg, list) and arg and isinstance(arg[0], str):
            return RelationClause(arg[0], tuple(parse_term(t) for t in arg[1:]))
    raise exceptions.InvalidDefinition('invalid match clause: %r' % (data,))


def _parse_emission(data):
    if isinstance(data, dict) and len(data) == 1:
        (kind, arg), = data.items()
        if kind == 'atom' and isinstance(arg, list) and len(arg) == 2 and isinstance(arg[0], str):
            return EmitAtom(arg[0], parse_term(arg[1]))
        if kind == 'tuple' and isinstance(arg, list) and arg and isinstance(arg[0], str):
            return EmitTuple(arg[0], tuple(parse_term(t) for t in arg[1:]))
    raise exceptions.InvalidDefinition('invalid emission: %r' % (data,))


def _parse_binding(data, where):
    if 'query' in data:
        items, cls = data['query'], QueryBinding
    elif 'relation' in data:
        items, cls = data['relation'], RelationBinding
    else:
        return None
    if not isinstance(items, list) or not items or not isinstance(items[0], str):
        raise exceptions.InvalidDefinition('%s: binding needs [name, terms...]' % where)
    return cls(items[0], tuple(parse_term(t) for t in items[1:]))


def _parse_body(data, where):
    if not isinstance(data, list):
        raise exceptions.InvalidDefinition('%s: body must be a list of steps' % where)
    steps = []
    for item in data:
        if not isinstance(item, dict) or len(item) != 1:
            raise exceptions.InvalidDefinition('%s: step must be a single-key object: %r' % (where, item))
        (kind, arg), = item.items()
        if kind == 'emit':
            if not isinstance(arg, list) or not arg or not isinstance(arg[0], str):
                raise exceptions.InvalidDefinition('%s: emit needs [command, terms...]' % where)
            steps.append(EmitStep(arg[0], tuple(parse_term(t) for t in arg[1:])))
        elif kind == 'foreach':
            if not isinstance(arg, dict) or set(arg) - {'query', 'relation', 'body'}:
                raise exceptions.InvalidDefinition('%s: foreach takes query|relation and body' % where)
            binding = _parse_binding(arg, where)
            if binding is None:
                raise exceptions.InvalidDefinition('%s: foreach needs a query or relation binding' % where)
            steps.append(ForeachStep(binding, _parse_body(arg.get('body', []), where)))
        elif kind == 'when':
            if not isinstance(arg, dict) or set(arg) - {'query', 'relation', 'formula', 'body', 'else'}:
                raise exceptions.InvalidDefinition('%s: when takes query|relation|formula, body and else' % where)
            binding = _parse_binding(arg, where)
            if isinstance(binding, QueryBinding):
                condition = Ask(binding.query, binding.terms)
            elif isinstance(binding, RelationBinding):
                condition = Member(binding.relation, binding.terms)
            elif 'formula' in arg:
                condition = parse_formula(arg['formula'])
            else:
                raise exceptions.InvalidDefinition('%s: when needs a condition' % where)
            steps.append(WhenStep(condition, _parse_body(arg.get('body', []), where),
                                  _parse_body(arg.get('else', []), where)))
        else:
            raise exceptions.InvalidDefinition('%s: unknown step %r' % (where, kind))
    return tuple(steps)


def _term_sort(term, scope):
    if isinstance(term, Var):
        return scope.get(term.name)
    return None


def _check_state_rule(rule, m_sorts, src, tgt, where, checker):
    scope = {}
    src_rels = src.relations_by_name
    for clause in rule.match:
        if isinstance(clause, SortClause):
            if clause.sort not in src.sorts:
                checker.error(exceptions.UnknownSort, '%s: unknown source sort %r' % (where, clause.sort))
                continue
            scope.setdefault(clause.var, m_sorts.get(clause.sort))
        else:
            rel = src_rels.get(clause.relation)
            if rel is None:
                checker.error(exceptions.UnknownRelation, '%s: unknown source relation %s' % (where, clause.relation))
                continue
            if len(rel.sorts) != len(clause.terms):
                checker.error(exceptions.ArityMismatch, '%s: %s takes %d terms' % (where, rel.name, len(rel.sorts)))
                continue
            for term, sort in zip(clause.terms, rel.sorts):
                if isinstance(term, Var):
                    scope.setdefault(term.name, m_sorts.get(sort))
    tgt_rels = tgt.relations_by_name
    for emission in rule.emit:
        if isinstance(emission, EmitAtom):
            if emission.sort not in tgt.sorts:
                checker.error(exceptions.UnknownSort, '%s: unknown target sort %r' % (where, emission.sort))
                continue
            pairs = [(emission.term, emission.sort)]
        else:
            rel = tgt_rels.get(emission.relation)
            if rel is None:
                checker.error(exceptions.RuleEmitsUnknownRelation, '%s: %s is not a relation of %s'
                              % (where, emission.relation, tgt.name))
                continue
            if len(rel.sorts) != len(emission.terms):
                checker.error(exceptions.ArityMismatch, '%s: %s takes %d terms' % (where, rel.name, len(rel.sorts)))
                continue
            pairs = list(zip(emission.terms, rel.sorts))
        for term, sort in pairs:
            for var in term.variables():
                if var not in scope:
                    checker.error(exceptions.UnboundVariable, '%s: variable ?%s is not matched' % (where, var))
            actual = _term_sort(term, scope)
            if actual is not None and actual != sort:
                checker.error(exceptions.SortMismatch, '%s: ?%s has sort %s where %s is emitted'
                              % (where, term.name, actual, sort))


def _target_queries(tgt):
    return {q.name: q.param_sorts for q in tgt.queries}


def _check_body(body, scope, tgt, where, checker):
    queries = _target_queries(tgt)
    relations = tgt.relations_by_name
    for step in body:
        if isinstance(step, EmitStep):
            try:
                cdef = tgt.command(step.command)
            except exceptions.UnknownCommand as exc:
                checker.errors.append(exc)
                continue
            if len(step.terms) != len(cdef.params):
                checker.error(exceptions.ArityMismatch, '%s: %s takes %d arguments'
                              % (where, cdef.name, len(cdef.params)))
                continue
            check_terms(step.terms, cdef.param_sorts, scope, where, checker)
        elif isinstance(step, ForeachStep):
            binding = step.binding
            if isinstance(binding, QueryBinding):
                sorts = queries.get(binding.query)
                if sorts is None:
                    checker.error(exceptions.UnknownQuery, '%s: unknown target query %s' % (where, binding.query))
                    continue
            else:
                rel = relations.get(binding.relation)
                if rel is None:
                    checker.error(exceptions.UnknownRelation, '%s: unknown target relation %s'
                                  % (where, binding.relation))
                    continue
                sorts = rel.sorts
            if len(sorts) != len(binding.terms):
                checker.error(exceptions.ArityMismatch, '%s: binding takes %d terms' % (where, len(sorts)))
                continue
            inner = dict(scope)
            for term, sort in zip(binding.terms, sorts):
                if isinstance(term, Var) and term.name not in inner:
                    inner[term.name] = sort
            check_terms(binding.terms, sorts, inner, where, checker)
            _check_body(step.body, inner, tgt, where, checker)
        else:
            check_formula(step.condition, relations, tgt.sorts, scope, where, checker, queries)
            _check_body(step.body, scope, tgt, where, checker)
            _check_body(step.orelse, scope, tgt, where, checker)


def _rule_scope(params, declared, m_sorts, where, checker):
    names = params or tuple(p.name for p in declared)
    if len(names) != len(declared):
        checker.error(exceptions.ArityMismatch, '%s: rule binds %d parameters, %d declared'
                      % (where, len(names), len(declared)))
        return {}
    scope = {}
    for name, param in zip(names, declared):
        scope[name.lstrip('?')] = m_sorts.get(param.sort)
    return scope


def load_mapping(raw, src, tgt):
    """Check a mapping document against its (validated) systems and build the ``MappingDef``."""
    from acx.schemas import MappingDocument
    doc = MappingDocument().validate(raw)
    name = doc['name'] or '%s-to-%s' % (src.name, tgt.name)
    checker = SchemaChecker(name)

    m_sorts = {s: s for s in src.sorts if s in tgt.sorts}
    for s, t in (doc['sorts'] or {}).items():
        if s not in src.sorts:
            checker.error(exceptions.UnknownSort, 'sort translation from unknown source sort %r' % s)
        elif t not in tgt.sorts:
            checker.error(exceptions.UnknownSort, 'sort translation to unknown target sort %r' % t)
        else:
            m_sorts[s] = t

    state_rules = []
    for index, item in enumerate(doc['state_rules']):
        where = 'state rule %d' % index
        rule = checker.run(lambda: StateMappingRule(tuple(_parse_clause(c) for c in item['match']),
                                                    tuple(_parse_emission(e) for e in item['emit'])))
        if rule is not None:
            _check_state_rule(rule, m_sorts, src, tgt, where, checker)
            state_rules.append(rule)

    command_rules = {}
    for item in doc['command_rules']:
        where = 'command rule %s' % item['command']
        if item['command'] in command_rules:
            checker.error(exceptions.DuplicateRule, 'two rules for command %s' % item['command'])
            continue
        try:
            cdef = src.command(item['command'])
        except exceptions.UnknownCommand as exc:
            checker.errors.append(exc)
            continue
        params = tuple(p.lstrip('?') for p in item['params'])
        body = checker.run(_parse_body, item['body'], where)
        if body is None:
            continue
        _check_body(body, _rule_scope(params, cdef.params, m_sorts, where, checker), tgt, where, checker)
        command_rules[cdef.name] = CommandMappingRule(cdef.name, params, body)
    for cdef in src.commands:
        if cdef.name not in command_rules:
            checker.error(exceptions.MissingCommandRule, 'no rule for source command %s' % cdef.name)

    query_rules = {}
    queries = _target_queries(tgt)
    for item in doc['query_rules']:
        where = 'decider %s' % item['query']
        if item['query'] in query_rules:
            checker.error(exceptions.DuplicateRule, 'two deciders for query %s' % item['query'])
            continue
        try:
            qdef = src.query(item['query'])
        except exceptions.UnknownQuery as exc:
            checker.errors.append(exc)
            continue
        kind = next(k for k in ('formula', 'theory', 'state') if item[k] is not None)
        formula = checker.run(parse_formula, item[kind])
        if formula is None:
            continue
        params = tuple(p.lstrip('?') for p in item['params'])
        scope = _rule_scope(params, qdef.params, m_sorts, where, checker)
        check_formula(formula, tgt.relations_by_name, tgt.sorts, scope, where, checker, queries)
        if kind != 'state' and any(isinstance(leaf, Member) for leaf in formula.leaves()):
            checker.error(exceptions.InvalidDefinition, '%s: a %s decider may not read relations' % (where, kind))
        if kind == 'formula' and formula.has_quantifier():
            checker.error(exceptions.InvalidDefinition, '%s: a formula decider may not quantify' % where)
        query_rules[qdef.name] = QueryDeciderRule(qdef.name, params, kind, formula)
    for qdef in src.queries:
        if qdef.name not in query_rules:
            checker.error(exceptions.MissingQueryRule, 'no decider for source query %s' % qdef.name)

    transform = doc['request_transform']
    if transform is not None:
        src_requests = {q.name for q in src.requests}
        tgt_requests = {q.name for q in tgt.requests}
        for s, t in transform.items():
            if s not in src_requests:
                checker.error(exceptions.UnknownQuery, 'request transform from unknown source request %s' % s)
            if t not in tgt_requests:
                checker.error(exceptions.UnknownQuery, 'request transform to unknown target request %s' % t)

    checker.raise_errors()
    mapping = MappingDef(
        name=name,
        source=src,
        target=tgt,
        sort_map=tuple(sorted(m_sorts.items())),
        state_rules=tuple(state_rules),
        command_rules=tuple(command_rules[c.name] for c in src.commands),
        query_rules=tuple(query_rules[q.name] for q in src.queries),
        request_transform=tuple(sorted(transform.items())) if transform is not None else None,
        correspondence=PropertyTag.parse(doc['correspondence']).value,
        reachability=PropertyTag.parse(doc['reachability']).value,
        description=doc['description'] or '',
    )
    logger.debug('loaded mapping %s: %d state rules, %d command rules, %d deciders',
                 name, len(state_rules), len(command_rules), len(query_rules))
    return mapping


def identity_mapping(sys):
    """The mapping of a system onto itself: every set and relation copied, every
    command and query passed through unchanged.
    """
    state_rules = [StateMappingRule((SortClause(sort, 'x'),), (EmitAtom(sort, Var('x')),)) for sort in sys.sorts]
    for rel in sys.relations:
        terms = tuple(Var('x%d' % i) for i in range(len(rel.sorts)))
        state_rules.append(StateMappingRule((RelationClause(rel.name, terms),), (EmitTuple(rel.name, terms),)))
    command_rules = tuple(
        CommandMappingRule(c.name, (), (EmitStep(c.name, tuple(Var(p.name) for p in c.params)),))
        for c in sys.commands)
    query_rules = tuple(
        QueryDeciderRule(q.name, (), 'formula', Ask(q.name, tuple(Var(p.name) for p in q.params)))
        for q in sys.queries)
    return MappingDef(
        name='identity-%s' % sys.name,
        source=sys,
        target=sys,
        sort_map=tuple((s, s) for s in sys.sorts),
        state_rules=tuple(state_rules),
        command_rules=command_rules,
        query_rules=query_rules,
        request_transform=tuple((q.name, q.name) for q in sys.requests),
        correspondence='SCs',
        reachability='R↔',
        description='identity mapping of %s' % sys.name,
    )


__all__ = ['CostCounter', 'StateMappingRule', 'CommandMappingRule', 'QueryDeciderRule', 'MappingDef',
           'SimulationDef', 'map_state', 'map_command', 'decide_query', 'load_mapping', 'identity_mapping',
           'classify', 'emission_degree', 'emission_multiplicity']
