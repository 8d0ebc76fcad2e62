# -*- coding: utf-8 -*-
"""
Property checkers: one per dimension of the property lattice.

Every checker takes ``(sim, bound, level)`` and returns a ``CheckResult``.
Exhaustive dimensions read the shared ``SimulationSpace`` of the simulation
and answer Holds (at the bound) or Fails with a counterexample that
``replay`` can re-execute. Complexity dimensions sample instrumented costs on
growing states and answer Evidence.

Checkers register themselves per dimension in ``registry`` (group
``checkers``); ``check_property_set`` dispatches through it.
"""
import contextvars
import itertools
import logging
import math
import uuid
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from acx import context_var, exceptions, lattice, registry, settings
from acx.explore import (Bound, check_reachability, corresponds, explore_simulation, source_commands_over,
                         source_queries_over)
from acx.formulas import Ask
from acx.mapping import EmitStep, _steps, classify, decide_query, emission_degree, map_command, map_state
from acx.results import CheckResult, Counterexample, Verdict, evidence, fails, holds, inapplicable
from acx.system import (GroundQuery, actor_of, administrators, allowed, entails, ground_queries, populate,
                        run_trace, step, theory)
from acx.tags import Dimension, PropertyTag

logger = logging.getLogger(__name__)

CHECKERS = 'checkers'

UNRESTRICTED = (PropertyTag.SSinf, PropertyTag.CDs, PropertyTag.CCinf, PropertyTag.CSinf, PropertyTag.QDs,
                PropertyTag.QCinf)


def checker(dimension):
    def decorator(fn):
        registry.set(dimension, fn, group=CHECKERS)
        return fn
    return decorator


def _level(level, dimension):
    level = PropertyTag.parse(level)
    if level.dimension is not dimension:
        raise exceptions.UnknownTag('%s is not a %s level' % (level, dimension.value))
    return level


def _unrestricted(level, b):
    return holds(level, b, notes=['%s places no restriction' % level])


# ---------------------- sampling -----------------------

def scaled_state(sys, atoms, dense=False):
    """The initial state grown to ``atoms`` atoms per sort. ``dense`` also fills
    every relation with all sort-correct tuples.
    """
    state = populate(sys, sys.init, atoms)
    if not dense:
        return state
    relations = {r.name: itertools.product(*(sorted(state.universe(s)) for s in r.sorts)) for r in sys.relations}
    return state.replace(relations=relations)


def _spread(items, limit):
    if len(items) <= limit:
        return items
    return [items[i] for i in np.unique(np.linspace(0, len(items) - 1, limit).round().astype(int))]


def fit_slope(xs, ys):
    """Slope of log(y + 1) against log(x); 0 when x does not vary."""
    points = sorted({(x, y) for x, y in zip(xs, ys) if x > 0})
    if len({x for x, _ in points}) < 2:
        return 0.0
    slope, _ = np.polyfit(np.log([x for x, _ in points]), np.log([y + 1 for _, y in points]), 1)
    return float(slope)


def complexity_samples(m, instances, cost_of):
    """Worst sampled cost per universe size, for sparse (universes only) and
    dense (full relations) images of scaled source states.
    """
    samples = []
    limit = settings.get('COMPLEXITY_SAMPLE_COMMANDS')
    for family, dense in (('sparse', False), ('dense', True)):
        for atoms in settings.get('COMPLEXITY_SIZES'):
            t = map_state(m, scaled_state(m.source, atoms, dense))
            costs = [cost_of(item, t) for item in _spread(instances(t), limit)]
            samples.append({'family': family, 'atoms': atoms, 'state_size': t.size(), 'cost': max(costs, default=0)})
    return samples


def fit_complexity(samples, threshold):
    slopes = {}
    for family in ('sparse', 'dense'):
        rows = [s for s in samples if s['family'] == family]
        upper = rows[len(rows) // 2:]
        slopes[family] = fit_slope([r['state_size'] for r in upper], [r['cost'] for r in upper])
    slope = max(slopes.values(), default=0.0)
    return {'slope': slope, 'slopes': slopes, 'threshold': threshold}, slope <= threshold


# ---------------------- SS -----------------------

def storage_samples(m, space):
    pairs = set()
    states = list(space.source_reach.states)
    for atoms in settings.get('COMPLEXITY_SIZES'):
        states.append(scaled_state(m.source, atoms))
        states.append(scaled_state(m.source, atoms, dense=True))
    for s in states:
        pairs.add((s.size(), map_state(m, s).size()))
    return [{'source_size': x, 'target_size': y} for x, y in sorted(pairs)]


def fit_storage(samples):
    """``c`` and ``k`` fitted on the two smallest source sizes; ``s`` is the smallest size."""
    sizes = sorted({r['source_size'] for r in samples if r['source_size'] > 0})
    smallest = set(sizes[:2])
    head = [r for r in samples if r['source_size'] in smallest]
    c = max((r['target_size'] / r['source_size'] for r in head), default=0.0)
    k = max((math.log(max(r['target_size'], 1)) / math.log(r['source_size'])
             for r in head if r['source_size'] > 1), default=1.0)
    return {'s': sizes[0] if sizes else 0, 'c': c, 'k_fitted': k,
            'slope': fit_slope([r['source_size'] for r in samples], [r['target_size'] for r in samples])}, smallest


@checker(Dimension.SS)
def check_storage(sim, bound, level=PropertyTag.SSl):
    b, level = Bound.parse(bound), _level(level, Dimension.SS)
    if level in UNRESTRICTED:
        return _unrestricted(level, b)
    m = sim.mapping
    space = explore_simulation(sim, b)
    stats, notes = space.stats(), space.notes()
    degree = max((emission_degree(r) for r in m.state_rules), default=0)
    samples = storage_samples(m, space)
    fitted, smallest = fit_storage(samples)
    fitted['degree'] = degree
    data = {'samples': samples, 'fitted': fitted, 'supported': True}

    if level is PropertyTag.SSp:
        fitted['k'] = max(degree, 1)
        notes.append('polynomial by construction: state rules have emission degree %d' % degree)
        return holds(level, b, stats, notes, evidence=data)
    if degree <= 1:
        notes.append('linear by construction: every state rule has emission degree at most 1')
        return holds(level, b, stats, notes, evidence=data)

    rest = [r for r in samples if r['source_size'] not in smallest]
    supported = all(r['target_size'] <= fitted['c'] * r['source_size'] + 1e-9 for r in rest)
    notes.append('c fitted on source sizes %s, tested on %d larger samples' % (sorted(smallest), len(rest)))
    return evidence(level, b, samples, fitted, supported, stats, notes)


# ---------------------- CD -----------------------

def _theory_key(sys, state, cache):
    if state not in cache:
        cache[state] = frozenset(theory(sys, state).items())
    return cache[state]


def command_dependence_pair(m, level, cmd, t, other):
    """True when ``t`` and ``other`` should give ``cmd`` the same translation
    under ``level`` but do not.
    """
    if level is PropertyTag.CDt and theory(m.target, t) != theory(m.target, other):
        return False
    return map_command(m, cmd, t)[0] != map_command(m, cmd, other)[0]


@checker(Dimension.CD)
def check_command_dependence(sim, bound, level=PropertyTag.CDi):
    b, level = Bound.parse(bound), _level(level, Dimension.CD)
    if level in UNRESTRICTED:
        return _unrestricted(level, b)
    m = sim.mapping
    space = explore_simulation(sim, b)
    stats, notes = space.stats(), space.notes()
    classified = {r.command: r.level for r in m.command_rules}
    stats['classification'] = classified
    theories = {}
    seen = {}
    for t in space.target_states:
        key_t = None if level is PropertyTag.CDi else _theory_key(m.target, t, theories)
        for cmd in space.source_commands_over(t):
            trace = tuple(space.map_command(cmd, t)[0])
            first = seen.setdefault((cmd, key_t), (t, trace))
            if first[1] != trace:
                logger.debug('%s depends on the target state beyond %s', cmd, level)
                return fails(level, b, Counterexample(
                    'dependence', target_state=first[0], other_state=t, command=cmd, trace=first[1],
                    detail={'other_trace': [str(c) for c in trace], 'classified': classified[cmd.name]}),
                    stats, notes)
    for name, found in classified.items():
        if not lattice.implies(found, level):
            notes.append('rule for %s is %s by construction; no distinguishing states within the bound'
                         % (name, found))
    return holds(level, b, stats, notes)


# ---------------------- CC / QC -----------------------

def _command_cost(m):
    def cost_of(cmd, t):
        return map_command(m, cmd, t)[1].cost
    return cost_of


def _query_cost(m):
    def cost_of(q, t):
        counter = decide_query(m, q, t)[1]
        return counter.cost + counter.queries_consulted
    return cost_of


@checker(Dimension.CC)
def check_command_complexity(sim, bound, level=PropertyTag.CCc):
    b, level = Bound.parse(bound), _level(level, Dimension.CC)
    if level in UNRESTRICTED:
        return _unrestricted(level, b)
    m = sim.mapping
    samples = complexity_samples(m, lambda t: source_commands_over(m, t), _command_cost(m))
    threshold = settings.get('CONSTANT_SLOPE') if level is PropertyTag.CCc else settings.get('LINEAR_SLOPE')
    fitted, supported = fit_complexity(samples, threshold)
    return evidence(level, b, samples, fitted, supported, stats={'max_cost': max(s['cost'] for s in samples)},
                    notes=['cost is bindings enumerated plus state items inspected per command translation'])


@checker(Dimension.QC)
def check_query_complexity(sim, bound, level=PropertyTag.QCc):
    b, level = Bound.parse(bound), _level(level, Dimension.QC)
    if level in UNRESTRICTED:
        return _unrestricted(level, b)
    m = sim.mapping
    samples = complexity_samples(m, lambda t: source_queries_over(m, t), _query_cost(m))
    fitted, supported = fit_complexity(samples, settings.get('CONSTANT_SLOPE'))
    return evidence(level, b, samples, fitted, supported, stats={'max_cost': max(s['cost'] for s in samples)},
                    notes=['cost is bindings enumerated, state items inspected and queries consulted per decision'])


# ---------------------- CS -----------------------

@checker(Dimension.CS)
def check_stuttering(sim, bound, level=PropertyTag.CS1):
    b, level = Bound.parse(bound), _level(level, Dimension.CS)
    if level in UNRESTRICTED:
        return _unrestricted(level, b)
    space = explore_simulation(sim, b)
    stats, notes = space.stats(), space.notes()
    longest = 0
    for t in space.target_states:
        for cmd in space.source_commands_over(t):
            trace = space.map_command(cmd, t)[0]
            longest = max(longest, len(trace))
            if level is PropertyTag.CS1 and len(trace) > 1:
                return fails(level, b, Counterexample('stutter', target_state=t, command=cmd, trace=tuple(trace),
                                                      detail={'length': len(trace)}), stats, notes)
    stats['max_trace_length'] = longest
    if level is PropertyTag.CSc:
        notes.append('c = %d: no simulated command used more target commands' % longest)
    return holds(level, b, stats, notes)


# ---------------------- CT -----------------------

def lockstep_violation(corr, source, next_source, intermediates):
    """Index of the first intermediate breaking semantic lock-step, or None.

    Some split must leave every state before it corresponding to ``source``
    and every state from it on corresponding to ``next_source``.
    """
    if len(intermediates) <= 1:
        return None
    prefix = 0
    while prefix < len(intermediates) and corr(source, intermediates[prefix]):
        prefix += 1
    for split in range(min(prefix, len(intermediates) - 1) + 1):
        if all(corr(next_source, s) for s in intermediates[split:]):
            return None
    return min(prefix, len(intermediates) - 1)


def monotonicity_violation(sys, start, intermediates, requests_only):
    """``(index, detail)`` of the first query flip that agrees with neither its
    predecessor nor the final state, or ``(None, None)``.
    """
    if len(intermediates) <= 1:
        return None, None
    states = [start] + list(intermediates)
    queries = list(ground_queries(sys, states[-1], requests_only))
    truth = [frozenset(q for q in queries if entails(sys, s, q.name, q.args)) for s in states]
    final = truth[-1]
    for i in range(1, len(states)):
        for q in queries:
            now, before, end = q in truth[i], q in truth[i - 1], q in final
            if (now and not before and not end) or (not now and before and end):
                return i - 1, {'query': str(q), 'value': now}
    return None, None


def contamination(sys, start, intermediates):
    """``(index, detail)`` of an intermediate whose Allowed set is contained in
    neither the start's nor the end's, or ``(None, None)``.
    """
    if len(intermediates) <= 1:
        return None, None
    first, last = allowed(sys, start), allowed(sys, intermediates[-1])
    for i, state in enumerate(intermediates):
        current = allowed(sys, state)
        if not (current <= first or current <= last):
            return i, {'allowed': sorted(str(q) for q in current), 'start': sorted(str(q) for q in first),
                       'end': sorted(str(q) for q in last)}
    return None, None


@checker(Dimension.CT)
def check_trace_structure(sim, bound, level=PropertyTag.CTs):
    b, level = Bound.parse(bound), _level(level, Dimension.CT)
    space = explore_simulation(sim, b)
    stats, notes = space.stats(), space.notes()
    target = sim.mapping.target

    if level is PropertyTag.CT1:
        for record in space.steps:
            index = lockstep_violation(space.corresponds, record.source, record.next_source, record.intermediates)
            if index is not None:
                return fails(level, b, Counterexample(
                    'trace', source_state=record.source, target_state=record.target, command=record.command,
                    trace=record.trace, index=index, detail={'correspondence': sim.correspondence.value}),
                    stats, notes)
        return holds(level, b, stats, notes)

    traces = 0
    for t in space.target_states:
        for cmd in space.source_commands_over(t):
            trace, _, intermediates = space.run(cmd, t)
            if len(trace) <= 1:
                continue
            traces += 1
            if level is PropertyTag.CTs:
                index, detail = contamination(target, t, intermediates)
            else:
                index, detail = monotonicity_violation(target, t, intermediates, level is PropertyTag.CTa)
            if index is not None:
                logger.debug('%s breaks %s after %s', cmd, level, trace[index])
                return fails(level, b, Counterexample('trace', target_state=t, command=cmd, trace=tuple(trace),
                                                      index=index, detail=detail), stats, notes)
    stats['multi_command_traces'] = traces
    return holds(level, b, stats, notes)


# ---------------------- CA -----------------------

def _emitted_commands(m):
    return {s.command for rule in m.command_rules for s in _steps(rule.body) if isinstance(s, EmitStep)}


def _require_actors(m, level):
    missing = [c.name for c in m.source.commands if c.actor is None]
    missing += sorted(name for name in _emitted_commands(m) if m.target.command(name).actor is None)
    if missing:
        raise exceptions.NoActorDeclared('%s: commands without an actor: %s' % (m.name, ', '.join(missing)))
    if level is PropertyTag.CAa and not m.target.admins:
        raise exceptions.NoActorDeclared('%s: %s declares no administrators' % (m.name, m.target.name))


def actor_violation(level, source_actor, target_actor, admins):
    if level is PropertyTag.CAtop:
        return target_actor.ident != source_actor.ident
    return target_actor.ident in admins and source_actor.ident not in admins


@checker(Dimension.CA)
def check_actor(sim, bound, level=PropertyTag.CAtop):
    """Administrators are the target's admin relation in the state at hand;
    a source actor is an administrator when its identifier is one.
    """
    b, level = Bound.parse(bound), _level(level, Dimension.CA)
    m = sim.mapping
    _require_actors(m, level)
    space = explore_simulation(sim, b)
    stats, notes = space.stats(), space.notes()
    for t in space.target_states:
        admins = administrators(m.target, t)
        for cmd in space.source_commands_over(t):
            source_actor = actor_of(m.source, cmd)
            trace = space.map_command(cmd, t)[0]
            for index, emitted in enumerate(trace):
                target_actor = actor_of(m.target, emitted)
                if actor_violation(level, source_actor, target_actor, admins):
                    return fails(level, b, Counterexample(
                        'actor', target_state=t, command=cmd, trace=tuple(trace), index=index,
                        detail={'source_actor': source_actor.ident, 'target_actor': target_actor.ident,
                                'administrators': sorted(admins)}), stats, notes)
    return holds(level, b, stats, notes)


# ---------------------- QD -----------------------

def _decider_env(m, rule, q):
    qdef = m.source.query(q.name)
    params = rule.params or tuple(p.name for p in qdef.params)
    return {name: m.translate(atom).ident for name, atom in zip(params, q.args)}


def consulted_key(m, rule, q, t):
    """Values of the ground target queries a quantifier-free decider consults for ``q``."""
    env = _decider_env(m, rule, q)
    key = []
    for leaf in rule.formula.leaves():
        if isinstance(leaf, Ask):
            idents = tuple(term.evaluate(env) for term in leaf.terms)
            key.append((leaf.query, idents, entails(m.target, t, leaf.query, idents)))
    return tuple(key)


def _decider_key(m, rule, q, t, level, theories):
    if level is PropertyTag.QDt:
        return _theory_key(m.target, t, theories)
    return consulted_key(m, rule, q, t)


@checker(Dimension.QD)
def check_query_dependence(sim, bound, level=PropertyTag.QD1):
    b, level = Bound.parse(bound), _level(level, Dimension.QD)
    if level in UNRESTRICTED:
        return _unrestricted(level, b)
    m = sim.mapping
    space = explore_simulation(sim, b)
    stats, notes = space.stats(), space.notes()
    classified = {r.query: r.level for r in m.query_rules}
    stats['classification'] = classified
    weaker = [r for r in m.query_rules if not lattice.implies(r.level, level)]
    static_only = level is not PropertyTag.QDt

    theories = {}
    seen = {}
    for t in space.target_states:
        for q in space.source_queries_over(t):
            rule = m.query_rule(q.name)
            if static_only and not lattice.implies(rule.level, level):
                continue
            value = decide_query(m, q, t)[0]
            first = seen.setdefault((q, _decider_key(m, rule, q, t, level, theories)), (t, value))
            if first[1] != value:
                return fails(level, b, Counterexample(
                    'dependence', target_state=first[0], other_state=t, query=q,
                    detail={'values': [first[1], value], 'classified': rule.level}), stats, notes)

    if static_only and weaker:
        rule = weaker[0]
        return fails(level, b, Counterexample(
            'classification', query=rule.query, detail={'classified': rule.level, 'required': level.value}),
            stats, notes)
    for rule in weaker:
        notes.append('decider for %s is %s by construction; no distinguishing states within the bound'
                     % (rule.query, rule.level))
    return holds(level, b, stats, notes)


# ---------------------- QP -----------------------

def _check_signatures(m, names, target_names=None):
    """Each source query ``name`` must meet a target query ``target_names[name]``
    taking the translated parameter sorts.
    """
    target_queries = {q.name: q for q in m.target.queries}
    for name in names:
        qdef = m.source.query(name)
        other = target_queries.get((target_names or {}).get(name, name))
        if other is None:
            raise exceptions.SignatureMismatch('%s: %s has no identically named query in %s'
                                               % (m.name, name, m.target.name))
        translated = tuple(m.sorts.get(s) for s in qdef.param_sorts)
        if translated != other.param_sorts:
            raise exceptions.SignatureMismatch('%s: %s(%s) does not match %s(%s)' % (
                m.name, name, ','.join(qdef.param_sorts), other.name, ','.join(other.param_sorts)))


def request_transform(m):
    """The request transformation of ``m``, identity when none is declared."""
    names = [q.name for q in m.source.requests]
    transform = m.transform if m.transform is not None else {name: name for name in names}
    missing = [name for name in names if name not in transform]
    if missing:
        raise exceptions.SignatureMismatch('%s: request transform does not cover %s' % (m.name, ', '.join(missing)))
    _check_signatures(m, names, transform)
    return transform


def image_of(m, q, name=None):
    return GroundQuery(name or q.name, tuple(m.translate(a) for a in q.args))


def preservation_mismatch(m, q, t):
    """``(decided, entailed)`` when the decider disagrees with the identical target query, else None."""
    decided = decide_query(m, q, t)[0]
    image = image_of(m, q)
    entailed = entails(m.target, t, image.name, image.args)
    return (decided, entailed) if decided != entailed else None


def uncovered_grants(m, transform, t):
    """Granted target requests that no source request decided true maps to."""
    covered = set()
    for r in source_queries_over(m, t, requests_only=True):
        if decide_query(m, r, t)[0]:
            covered.add(image_of(m, r, transform[r.name]))
    return sorted(g for g in allowed(m.target, t) if g not in covered)


@checker(Dimension.QP)
def check_query_preservation(sim, bound, level=PropertyTag.QPa):
    b, level = Bound.parse(bound), _level(level, Dimension.QP)
    m = sim.mapping
    requests_only = level is PropertyTag.QPa
    if level is PropertyTag.QPw:
        transform = request_transform(m)
    else:
        _check_signatures(m, [q.name for q in (m.source.requests if requests_only else m.source.queries)])
    space = explore_simulation(sim, b)
    stats, notes = space.stats(), space.notes()

    for t in space.target_states:
        if level is not PropertyTag.QPw:
            for q in space.source_queries_over(t, requests_only):
                mismatch = preservation_mismatch(m, q, t)
                if mismatch is not None:
                    return fails(level, b, Counterexample(
                        'preservation', target_state=t, query=q,
                        detail={'decided': mismatch[0], 'entailed': mismatch[1]}), stats, notes)
            continue
        for r in space.source_queries_over(t, requests_only=True):
            image = image_of(m, r, transform[r.name])
            if decide_query(m, r, t)[0] and not entails(m.target, t, image.name, image.args):
                return fails(level, b, Counterexample(
                    'preservation', target_state=t, query=r, detail={'decided': True, 'entailed': False,
                                                                      'image': str(image)}), stats, notes)
        uncovered = uncovered_grants(m, transform, t)
        if uncovered:
            return fails(level, b, Counterexample(
                'coverage', target_state=t, query=uncovered[0],
                detail={'uncovered': [str(g) for g in uncovered]}), stats, notes)
    if level is PropertyTag.QPw:
        stats['request_transform'] = dict(transform)
    return holds(level, b, stats, notes)


# ---------------------- SC / R -----------------------

@checker(Dimension.SC)
def check_correspondence(sim, bound, level=PropertyTag.SCa):
    """The side condition: every explored source state corresponds to its image."""
    b, level = Bound.parse(bound), _level(level, Dimension.SC)
    m = sim.mapping
    space = explore_simulation(sim, b)
    stats, notes = space.stats(), space.notes()
    at_level = sim.replace(correspondence=level)
    for s in space.source_reach:
        t = map_state(m, s)
        if not corresponds(at_level, s, t):
            return fails(level, b, Counterexample('correspondence', source_state=s, target_state=t,
                                                  detail={'correspondence': level.value}), stats, notes)
    return holds(level, b, stats, notes)


@checker(Dimension.R)
def check_reachability_level(sim, bound, level=PropertyTag.Rfwd):
    return check_reachability(sim, bound, _level(level, Dimension.R))


# ---------------------- driver -----------------------

def check_property(sim, bound, tag):
    tag = PropertyTag.parse(tag)
    fn = registry.get(tag.dimension, group=CHECKERS)
    try:
        result = fn(sim, bound, tag)
    except (exceptions.SignatureMismatch, exceptions.NoActorDeclared) as ex:
        result = inapplicable(tag, Bound.parse(bound), ex.message)
    logger.info('%s %s: %s', sim.name, tag, result.describe(), extra={'property': tag.value})
    return result


def simulation_for(sim, props):
    """``sim`` run under the correspondence and reachability named in ``props``.

    The declared correspondence is kept when it is among the SC tags asked
    for, otherwise the strongest one asked for is used. Without SC or R tags
    the declared levels stay.
    """
    props = lattice.PropertySet.of(props)
    correspondence = [t for t in props if t.dimension is Dimension.SC]
    reachability = [t for t in props if t.dimension is Dimension.R]
    if sim.correspondence in correspondence:
        chosen = sim.correspondence
    else:
        chosen = next(iter(lattice.strongest(correspondence).sorted()), None)
    return sim.replace(correspondence=chosen,
                       reachability=next(iter(lattice.strongest(reachability).sorted()), None))


def check_property_set(sim, bound, props):
    """Run one checker per tag; results come back in lattice order."""
    b = Bound.parse(bound)
    tags = lattice.PropertySet.of(props).sorted()
    run_sim = simulation_for(sim, tags)
    token = context_var.set({'run_id': uuid.uuid4().hex, 'mapping': sim.mapping.name, 'bound': str(b)})
    try:
        explore_simulation(run_sim, b)
        workers = max(1, int(settings.get('WORKERS')))
        if workers == 1:
            return [check_property(run_sim, b, tag) for tag in tags]
        with ThreadPoolExecutor(max_workers=workers) as executor:
            futures = [executor.submit(contextvars.copy_context().run, check_property, run_sim, b, tag)
                       for tag in tags]
            return [f.result() for f in futures]
    finally:
        context_var.reset(token)


def strongest_holding(results):
    """Per dimension, the strongest passing levels (CT may keep an antichain)."""
    summary = {}
    passed = [r.property for r in results if r.passed]
    for dimension in Dimension:
        levels = [t for t in passed if t.dimension is dimension]
        if levels:
            summary[dimension.value] = lattice.strongest(levels).to_primitive()
    return summary


def exit_code(results):
    return 0 if all(r.passed for r in results) else 1


# ---------------------- replay -----------------------

def replay(sim, result):
    """Re-execute the counterexample of a failing result; True when the
    violation shows up again.
    """
    cx = result.counterexample
    if result.verdict is not Verdict.FAILS or cx is None:
        return False
    tag = PropertyTag.parse(result.property)
    b = Bound.parse(result.bound)
    m = sim.mapping
    if 'correspondence' in cx.detail:
        sim = sim.replace(correspondence=cx.detail['correspondence'])
    kind = cx.kind

    if kind in ('side-condition', 'correspondence'):
        t = map_state(m, cx.source_state)
        return t == cx.target_state and not corresponds(sim, cx.source_state, t)
    if kind == 'forward':
        trace = tuple(map_command(m, cx.command, cx.target_state)[0])
        final, _ = run_trace(m.target, cx.target_state, trace)
        return trace == tuple(cx.trace) and not corresponds(sim, step(m.source, cx.source_state, cx.command), final)
    if kind == 'backward':
        succ = step(m.target, cx.target_state, cx.trace[0])
        return explore_simulation(sim, b).witness(cx.source_state, succ) is None
    if kind == 'dependence':
        if cx.command is not None:
            return command_dependence_pair(m, tag, cx.command, cx.target_state, cx.other_state)
        rule = m.query_rule(cx.query.name)
        theories = {}
        same_key = _decider_key(m, rule, cx.query, cx.target_state, tag, theories) == \
            _decider_key(m, rule, cx.query, cx.other_state, tag, theories)
        return same_key and decide_query(m, cx.query, cx.target_state)[0] != \
            decide_query(m, cx.query, cx.other_state)[0]
    if kind == 'classification':
        return not lattice.implies(classify(m.query_rule(cx.query)), tag)
    if kind == 'stutter':
        return len(map_command(m, cx.command, cx.target_state)[0]) > 1
    if kind == 'trace':
        trace = map_command(m, cx.command, cx.target_state)[0]
        _, intermediates = run_trace(m.target, cx.target_state, trace)
        if tag is PropertyTag.CT1:
            next_source = step(m.source, cx.source_state, cx.command)
            return lockstep_violation(lambda a, c: corresponds(sim, a, c), cx.source_state, next_source,
                                      intermediates) is not None
        if tag is PropertyTag.CTs:
            return contamination(m.target, cx.target_state, intermediates)[0] is not None
        return monotonicity_violation(m.target, cx.target_state, intermediates,
                                      tag is PropertyTag.CTa)[0] is not None
    if kind == 'actor':
        trace = map_command(m, cx.command, cx.target_state)[0]
        return actor_violation(tag, actor_of(m.source, cx.command), actor_of(m.target, trace[cx.index]),
                               administrators(m.target, cx.target_state))
    if kind == 'preservation':
        if tag is PropertyTag.QPw:
            image = image_of(m, cx.query, request_transform(m)[cx.query.name])
            return decide_query(m, cx.query, cx.target_state)[0] and \
                not entails(m.target, cx.target_state, image.name, image.args)
        return preservation_mismatch(m, cx.query, cx.target_state) is not None
    if kind == 'coverage':
        return cx.query in uncovered_grants(m, request_transform(m), cx.target_state)
    raise exceptions.InvalidDefinition('cannot replay a %r counterexample' % kind)


__all__ = ['CheckResult', 'Counterexample', 'Verdict', 'check_storage', 'check_command_dependence',
           'check_command_complexity', 'check_stuttering', 'check_trace_structure', 'check_actor',
           'check_query_dependence', 'check_query_complexity', 'check_query_preservation', 'check_correspondence',
           'check_reachability', 'check_property', 'check_property_set', 'strongest_holding', 'exit_code',
           'replay', 'scaled_state', 'fit_slope']
