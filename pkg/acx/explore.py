# -*- coding: utf-8 -*-
"""
Bounded exhaustive exploration.

``reachable`` is a plain BFS over every ground command instance. A
``SimulationSpace`` is the shared exploration of one simulation at one bound:
both reach sets, the paired BFS that drives the target through the command
mapping, and memoized correspondence tests. Property checkers only read it.
"""
import itertools
import logging
import threading
from collections import deque
from dataclasses import dataclass
from functools import lru_cache

import networkx as nx

from acx import exceptions, settings
from acx.mapping import SimulationDef, decide_query, map_command, map_state
from acx.results import Counterexample, fails, holds
from acx.system import (Atom, GroundCommand, GroundQuery, entails, ground_commands, ground_queries, populate,
                        run_trace, step)
from acx.tags import PropertyTag

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Bound:
    atoms_per_sort: int = 2
    max_new_atoms: int = 1
    max_depth: int = 6

    def __post_init__(self):
        for name in ('atoms_per_sort', 'max_new_atoms', 'max_depth'):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value < 0:
                raise exceptions.InvalidDefinition('bound %s must be a natural number, got %r' % (name, value))

    @classmethod
    def parse(cls, text):
        """``A,S,D``: atoms per sort, max new atoms per sort, depth."""
        if isinstance(text, Bound):
            return text
        if text is None:
            return cls(*settings.get('BOUND'))
        parts = text.split(',') if isinstance(text, str) else list(text)
        try:
            values = [int(p) for p in parts]
        except (TypeError, ValueError):
            raise exceptions.InvalidDefinition('bound must be A,S,D with natural numbers, got %r' % (text,))
        if len(values) != 3:
            raise exceptions.InvalidDefinition('bound must be A,S,D with natural numbers, got %r' % (text,))
        return cls(*values)

    def caps(self, sys, start):
        return {sort: max(len(start.universe(sort)), self.atoms_per_sort) + self.max_new_atoms for sort in sys.sorts}

    def __str__(self):
        return '%d,%d,%d' % (self.atoms_per_sort, self.max_new_atoms, self.max_depth)

    def to_primitive(self):
        return {'atoms_per_sort': self.atoms_per_sort, 'max_new_atoms': self.max_new_atoms,
                'max_depth': self.max_depth}


def _within(state, caps):
    return all(len(state.universe(sort)) <= cap for sort, cap in caps.items())


class ReachSet:
    """States reachable from ``start`` within a bound, in BFS order."""

    def __init__(self, start, states, edges, depths, truncated):
        self.start = start
        self.states = tuple(states)
        self.edges = tuple(edges)
        self.depths = depths
        self.truncated = truncated
        self._graph = None

    def __contains__(self, state):
        return state in self.depths

    def __len__(self):
        return len(self.states)

    def __iter__(self):
        return iter(self.states)

    @property
    def graph(self):
        if self._graph is None:
            graph = nx.DiGraph()
            graph.add_nodes_from(self.states)
            graph.add_edges_from((s, t) for s, _, t in self.edges)
            self._graph = graph
        return self._graph

    def descendants(self, state):
        """States reachable from ``state`` inside this set, itself included."""
        return nx.descendants(self.graph, state) | {state}

    def to_primitive(self):
        return {'states': len(self.states), 'edges': len(self.edges), 'truncated': self.truncated,
                'max_depth': max(self.depths.values()) if self.depths else 0}


def reachable(sys, start, b, max_states=None):
    """BFS over all ground command instances from ``start``.

    ``truncated`` is set when a successor was dropped: it would exceed a
    universe cap, the state cap, or lies beyond the depth bound.
    """
    max_states = max_states or settings.get('MAX_STATES')
    caps = b.caps(sys, start)
    depths = {start: 0}
    states = [start]
    edges = []
    truncated = False
    frontier = [start]
    for depth in range(b.max_depth):
        next_frontier = []
        for state in frontier:
            for cmd in ground_commands(sys, state):
                succ = step(sys, state, cmd)
                if not _within(succ, caps):
                    truncated = True
                    continue
                if succ not in depths:
                    if len(states) >= max_states:
                        truncated = True
                        continue
                    depths[succ] = depth + 1
                    states.append(succ)
                    next_frontier.append(succ)
                edges.append((state, cmd, succ))
        frontier = next_frontier
        if not frontier:
            break
    else:
        truncated = truncated or any(
            _within(succ, caps) and succ not in depths
            for state in frontier for succ in (step(sys, state, c) for c in ground_commands(sys, state)))
    logger.info('explored %s: %d states, %d edges, truncated=%s', sys.name, len(states), len(edges), truncated)
    return ReachSet(start, states, edges, depths, truncated)


# ---------------------- correspondence -----------------------

def structural_match(source_state, target_state):
    """Every source set and relation is present in the target with identical contents."""
    for sort, atoms in source_state.universes.items():
        if sort not in target_state.universes or target_state.universes[sort] != atoms:
            return False
    for name, rows in source_state.relations.items():
        if name not in target_state.relations or target_state.relations[name] != rows:
            return False
    return True


def source_valuation(m, s, requests_only=False):
    """True source ground queries of ``s``."""
    return frozenset(q for q in ground_queries(m.source, s, requests_only) if entails(m.source, s, q.name, q.args))


def decided_valuation(m, domain_state, t, requests_only=False):
    """Source ground queries over the universes of ``domain_state`` that the
    decider answers true on ``t``. Raises ``UntranslatableAtom``.
    """
    return frozenset(q for q in ground_queries(m.source, domain_state, requests_only)
                     if decide_query(m, q, t)[0])


# ---------------------- source instances over target states -----------------------

def translated_instances(m, params, t):
    """Argument tuples for source ``params`` drawn from the translated universes of target state ``t``."""
    pools = []
    for p in params:
        if p.sort not in m.sorts:
            return []
        pools.append([Atom(p.sort, ident) for ident in sorted(t.universe(m.sorts[p.sort]))])
    return list(itertools.product(*pools))


def source_commands_over(m, t):
    """Source ground commands whose arguments have images in ``t``."""
    return [GroundCommand(cdef.name, args)
            for cdef in m.source.commands for args in translated_instances(m, cdef.params, t)]


def source_queries_over(m, t, requests_only=False):
    queries = m.source.requests if requests_only else m.source.queries
    return [GroundQuery(qdef.name, args) for qdef in queries for args in translated_instances(m, qdef.params, t)]


def corresponds(sim, sS, sT):
    level = sim.correspondence
    if level is PropertyTag.SCs:
        return structural_match(sS, sT)
    requests_only = level is PropertyTag.SCa
    try:
        return source_valuation(sim.mapping, sS, requests_only) == decided_valuation(sim.mapping, sS, sT,
                                                                                     requests_only)
    except exceptions.UntranslatableAtom:
        return False


# ---------------------- simulation space -----------------------

@dataclass(frozen=True)
class PairedStep:
    source: object
    target: object
    command: GroundCommand
    trace: tuple
    intermediates: tuple
    next_source: object
    next_target: object
    corresponds: bool


class SimulationSpace:
    """One exploration of a simulation at a bound, shared by all checkers."""

    def __init__(self, sim, b):
        self.sim = sim
        self.bound = b
        m = self.mapping = sim.mapping
        self.source_start = populate(m.source, m.source.init, b.atoms_per_sort)
        self.target_start = map_state(m, self.source_start)
        self.source_caps = b.caps(m.source, self.source_start)
        self.source_reach = reachable(m.source, self.source_start, b)
        self.target_reach = reachable(m.target, self.target_start, b)
        self.target_caps = b.caps(m.target, self.target_start)
        # memo tables are shared by the checker threads
        self._lock = threading.Lock()
        self._mapped = {}
        self._corresponds = {}
        self._source_keys = {}
        self._target_keys = {}
        self._successors = {}
        self._witnesses = {}
        self._native = {}
        self.truncated = self.source_reach.truncated or self.target_reach.truncated
        self._explore_pairs()
        seen = set()
        self.target_states = []
        for state in [t for _, t in self.pairs] + list(self.target_reach.states):
            if state not in seen:
                seen.add(state)
                self.target_states.append(state)
        logger.info('simulation space %s at %s: %d pairs, %d paired steps, %d target states',
                    sim.name, b, len(self.pairs), len(self.steps), len(self.target_states))

    # memoized interpretation

    def _memo(self, table, key, compute):
        if key in table:
            return table[key]
        value = compute()
        with self._lock:
            return table.setdefault(key, value)

    def map_command(self, cmd, t):
        return self._memo(self._mapped, (cmd, t), lambda: map_command(self.mapping, cmd, t))

    def run(self, cmd, t):
        """``(trace, final, intermediates)`` of simulating source ``cmd`` from ``t``."""
        trace = self.map_command(cmd, t)[0]
        final, intermediates = run_trace(self.mapping.target, t, trace)
        return trace, final, intermediates

    def corresponds(self, sS, sT):
        return self._memo(self._corresponds, (sS, sT), lambda: self._compute_corresponds(sS, sT))

    def _compute_corresponds(self, sS, sT):
        level = self.sim.correspondence
        if level is PropertyTag.SCs:
            return structural_match(sS, sT)
        requests_only = level is PropertyTag.SCa
        source_key = self._memo(self._source_keys, sS,
                                lambda: source_valuation(self.mapping, sS, requests_only))
        domain = frozenset(sS.universes.items())
        target_key = self._memo(self._target_keys, (domain, sT),
                                lambda: self._decided_or_none(sS, sT, requests_only))
        return source_key == target_key

    def _decided_or_none(self, sS, sT, requests_only):
        try:
            return decided_valuation(self.mapping, sS, sT, requests_only)
        except exceptions.UntranslatableAtom:
            return None

    def successors(self, state):
        def compute():
            src = self.mapping.source
            moves = ((cmd, step(src, state, cmd)) for cmd in ground_commands(src, state))
            return [(cmd, succ) for cmd, succ in moves if _within(succ, self.source_caps)]
        return self._memo(self._successors, state, compute)

    def native_successors(self, state):
        """Native target steps from ``state`` that stay within the target caps."""
        def compute():
            tgt = self.mapping.target
            moves = ((cmd, step(tgt, state, cmd)) for cmd in ground_commands(tgt, state))
            return [(cmd, succ) for cmd, succ in moves if _within(succ, self.target_caps)]
        return self._memo(self._native, state, compute)

    def _explore_pairs(self):
        src_start, tgt_start = self.source_start, self.target_start
        self.side_condition = self.corresponds(src_start, tgt_start)
        self.pairs = []
        self.steps = []
        if not self.side_condition:
            return
        seen = {(src_start, tgt_start)}
        self.pairs.append((src_start, tgt_start))
        frontier = [(src_start, tgt_start)]
        for depth in range(self.bound.max_depth + 1):
            expand = depth < self.bound.max_depth
            next_frontier = []
            for source, target in frontier:
                for cmd, next_source in self.successors(source):
                    trace, next_target, intermediates = self.run(cmd, target)
                    ok = self.corresponds(next_source, next_target)
                    self.steps.append(PairedStep(source, target, cmd, tuple(trace), tuple(intermediates),
                                                 next_source, next_target, ok))
                    pair = (next_source, next_target)
                    if ok and expand and pair not in seen:
                        if len(seen) >= settings.get('MAX_STATES'):
                            self.truncated = True
                            continue
                        seen.add(pair)
                        self.pairs.append(pair)
                        next_frontier.append(pair)
            frontier = next_frontier
            if not frontier:
                break

    def witness(self, source, target):
        """A source state reachable from ``source`` within the depth bound that
        corresponds to ``target``, or None.

        Zero steps count: a native step that changes nothing observable is
        matched by ``source`` itself, the same way an empty simulated trace is
        accepted in the forward direction.
        """
        return self._memo(self._witnesses, (source, target), lambda: self._search_witness(source, target))

    def _search_witness(self, source, target):
        seen = {source}
        queue = deque([(source, 0)])
        while queue:
            state, depth = queue.popleft()
            if self.corresponds(state, target):
                return state
            if depth >= self.bound.max_depth:
                continue
            for _, succ in self.successors(state):
                if succ not in seen:
                    seen.add(succ)
                    queue.append((succ, depth + 1))
        return None

    def source_commands_over(self, t):
        return source_commands_over(self.mapping, t)

    def source_queries_over(self, t, requests_only=False):
        return source_queries_over(self.mapping, t, requests_only)

    def stats(self):
        return {
            'source': self.source_reach.to_primitive(),
            'target': self.target_reach.to_primitive(),
            'pairs': len(self.pairs),
            'paired_steps': len(self.steps),
            'target_states': len(self.target_states),
            'truncated': self.truncated,
        }

    def notes(self):
        if self.truncated:
            return ['BoundTooSmall: exploration was truncated at bound %s; verdicts hold up to it' % self.bound]
        return []


@lru_cache(maxsize=16)
def _explore(mapping, correspondence, b):
    return SimulationSpace(SimulationDef(mapping, correspondence, PropertyTag.Rfwd), b)


def clear_cache():
    """Drop cached simulation spaces, e.g. after settings changed."""
    _explore.cache_clear()


def explore_simulation(sim, b):
    """The shared ``SimulationSpace`` of ``sim`` at bound ``b`` (cached)."""
    return _explore(sim.mapping, sim.correspondence, Bound.parse(b))


def check_reachability(sim, b, variant=None):
    """R→: every source step from an explored corresponding pair is tracked by
    the simulated trace. R↔ additionally: every native target step from such a
    pair is matched by some source state reachable within the depth bound.
    """
    b = Bound.parse(b)
    variant = PropertyTag.parse(variant or sim.reachability)
    if variant not in (PropertyTag.Rfwd, PropertyTag.Rbi):
        raise exceptions.UnknownTag('%s is not a reachability level' % variant)
    space = explore_simulation(sim, b)
    stats = space.stats()
    notes = space.notes()

    if not space.side_condition:
        return fails(variant, b, Counterexample(
            'side-condition', source_state=space.source_start, target_state=space.target_start,
            detail={'correspondence': sim.correspondence.value}), stats, notes)

    for record in space.steps:
        if not record.corresponds:
            logger.debug('forward reachability broken by %s', record.command)
            return fails(variant, b, Counterexample(
                'forward', source_state=record.source, target_state=record.target, command=record.command,
                trace=record.trace, detail={'next_source': record.next_source, 'next_target': record.next_target,
                                            'correspondence': sim.correspondence.value}),
                stats, notes)

    if variant is PropertyTag.Rbi:
        escape = _native_escape(space, stats, notes)
        if escape is not None:
            source, state, prefix, cmd, succ = escape
            logger.debug('no source witness for native %s after %d native steps', cmd, len(prefix))
            return fails(variant, b, Counterexample(
                'backward', source_state=source, target_state=state, trace=(cmd,),
                detail={'next_target': succ, 'native_prefix': prefix, 'searched_depth': b.max_depth,
                        'correspondence': sim.correspondence.value}), stats, notes)

    return holds(variant, b, stats, notes)


def _native_escape(space, stats, notes):
    """First native target step, from any explored corresponding pair, whose
    successor no source state matches: ``(source, target, prefix, cmd, succ)``.

    Pairs found through native steps are corresponding pairs too, so the
    search continues from ``(witness, succ)`` up to ``max_depth`` native steps.
    """
    max_depth = space.bound.max_depth
    seen = set(space.pairs)
    queue = deque((source, target, ()) for source, target in space.pairs)
    checked = 0
    truncated = False
    while queue:
        source, state, prefix = queue.popleft()
        for cmd, succ in space.native_successors(state):
            checked += 1
            found = space.witness(source, succ)
            if found is None:
                stats['native_steps'] = checked
                return source, state, prefix, cmd, succ
            pair = (found, succ)
            if len(prefix) + 1 >= max_depth or pair in seen:
                continue
            if len(seen) >= settings.get('MAX_STATES'):
                truncated = True
                continue
            seen.add(pair)
            queue.append((found, succ, prefix + (cmd,)))
    stats['native_steps'] = checked
    stats['native_pairs'] = len(seen)
    if truncated and not space.truncated:
        notes.append('BoundTooSmall: native exploration was truncated at %d pairs' % settings.get('MAX_STATES'))
    return None


__all__ = ['Bound', 'ReachSet', 'reachable', 'corresponds', 'check_reachability', 'SimulationSpace',
           'explore_simulation', 'clear_cache', 'structural_match', 'PairedStep', 'translated_instances',
           'source_commands_over', 'source_queries_over']
