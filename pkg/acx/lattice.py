# -*- coding: utf-8 -*-
"""
The property lattice: implication between tags, closure of tag sets, the
catalog of surveyed simulations and the comparison of their property sets.

Implication is a DAG (stronger -> weaker) built from the within-dimension
orders and the cross-dimension rules of ``catalog.json``.
"""
import enum
import functools
import logging
import os
from dataclasses import dataclass
from typing import Optional

import networkx as nx

from acx import exceptions
from acx.tags import PropertyTag, sort_tags
from acx.utils import load_json

logger = logging.getLogger(__name__)

CATALOG_FILE = os.path.join(os.path.dirname(__file__), 'corpus', 'catalog.json')


class PropertySet(frozenset):
    """An immutable set of property tags."""

    @classmethod
    def of(cls, items=()):
        if isinstance(items, str):
            return cls(PropertyTag.parse_list(items))
        return cls(PropertyTag.parse(item) for item in items)

    def sorted(self):
        return sort_tags(self)

    def __str__(self):
        return ' '.join(tag.symbol for tag in self.sorted())

    def __repr__(self):
        return 'PropertySet({%s})' % ', '.join(tag.symbol for tag in self.sorted())

    def to_primitive(self):
        return [tag.symbol for tag in self.sorted()]


class Comparison(enum.Enum):
    EQUAL = 'Equal'
    STRONGER = 'StrictlyStronger'
    WEAKER = 'StrictlyWeaker'
    INCOMPARABLE = 'Incomparable'

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class ImplicationRule:
    premise: PropertyTag
    conclusion: PropertyTag
    source: str

    def to_primitive(self):
        return {'premise': self.premise.symbol, 'conclusion': self.conclusion.symbol, 'source': self.source}


@dataclass(frozen=True)
class SimulationCatalogEntry:
    name: str
    decomposition: PropertySet
    canonical: Optional[PropertySet]
    citation: str

    def to_primitive(self):
        return {'name': self.name, 'decomposition': self.decomposition.to_primitive(),
                'canonical': self.canonical.to_primitive() if self.canonical is not None else None,
                'citation': self.citation}


class Lattice:

    def __init__(self, data):
        self.rules = []
        for dimension, chain in data['orders'].items():
            source = data.get('order_sources', {}).get(dimension, 'within-dimension order')
            tags = [PropertyTag.parse(t) for t in chain]
            for stronger, weaker in zip(tags, tags[1:]):
                self.rules.append(ImplicationRule(stronger, weaker, source))
        for rule in data['rules']:
            self.rules.append(ImplicationRule(PropertyTag.parse(rule['premise']),
                                              PropertyTag.parse(rule['conclusion']), rule['source']))
        self.non_rules = [ImplicationRule(PropertyTag.parse(r['premise']), PropertyTag.parse(r['conclusion']),
                                          r['source']) for r in data.get('non_rules', [])]

        self.graph = nx.DiGraph()
        self.graph.add_nodes_from(PropertyTag)
        for rule in self.rules:
            self.graph.add_edge(rule.premise, rule.conclusion, source=rule.source)
        if not nx.is_directed_acyclic_graph(self.graph):
            raise exceptions.InvalidDefinition('implication rules contain a cycle: %s'
                                               % nx.find_cycle(self.graph))
        self._reach = nx.transitive_closure_dag(self.graph)
        for rule in self.non_rules:
            if self._reach.has_edge(rule.premise, rule.conclusion):
                raise exceptions.InvalidDefinition('%s => %s is listed as a non-rule but derivable'
                                                   % (rule.premise, rule.conclusion))

        self.entries = {}
        for item in data['simulations']:
            decomposition = PropertySet.of(item['decomposition'])
            extras = item.get('canonical_extras')
            canonical = PropertySet(decomposition | PropertySet.of(extras)) if extras else None
            self.entries[item['name']] = SimulationCatalogEntry(item['name'], decomposition, canonical,
                                                                item.get('citation', ''))

    def implies(self, a, b):
        a, b = PropertyTag.parse(a), PropertyTag.parse(b)
        return a is b or self._reach.has_edge(a, b)

    def closure(self, tags):
        """Every tag implied by ``tags``, the tags themselves included."""
        tags = PropertySet.of(tags)
        result = set(tags)
        for tag in tags:
            result.update(self._reach.successors(tag))
        return PropertySet(result)

    def strongest(self, tags):
        """The maximal tags of the closure: one per totally ordered dimension,
        possibly an antichain such as {CTa, CTs} for trace structure.
        """
        closed = self.closure(tags)
        return PropertySet(t for t in closed if not any(o is not t and self.implies(o, t) for o in closed))

    def redundant(self, tags):
        """Members of ``tags`` implied by another member."""
        tags = PropertySet.of(tags)
        return PropertySet(t for t in tags if any(o is not t and self.implies(o, t) for o in tags))

    def compare_sets(self, a, b):
        ca, cb = self.closure(a), self.closure(b)
        if ca == cb:
            return Comparison.EQUAL
        if ca > cb:
            return Comparison.STRONGER
        if ca < cb:
            return Comparison.WEAKER
        return Comparison.INCOMPARABLE

    def entry(self, name):
        try:
            return self.entries[name]
        except KeyError:
            raise exceptions.UnknownSimulation('unknown simulation %r (known: %s)'
                                               % (name, ', '.join(self.entries)))

    def decompose_named(self, name):
        return self.entry(name).decomposition

    def canonical_usage(self, name):
        entry = self.entry(name)
        if entry.canonical is None:
            raise exceptions.NoCanonicalData('no canonical usage is recorded for %s' % name)
        return entry.canonical

    def hasse(self, names=None):
        """Covering pairs (weaker, stronger) between catalog decompositions."""
        names = list(names or self.entries)
        order = nx.DiGraph()
        order.add_nodes_from(names)
        for a in names:
            for b in names:
                if a != b and self.compare_sets(self.decompose_named(a), self.decompose_named(b)) \
                        is Comparison.WEAKER:
                    order.add_edge(a, b)
        return sorted(nx.transitive_reduction(order).edges())


@functools.lru_cache(maxsize=4)
def load_lattice(path=None):
    path = path or CATALOG_FILE
    logger.debug('loading property catalog %s', path)
    return Lattice(load_json(path))


def _default():
    return load_lattice()


def implies(a, b):
    return _default().implies(a, b)


def closure(tags):
    return _default().closure(tags)


def strongest(tags):
    return _default().strongest(tags)


def redundant(tags):
    return _default().redundant(tags)


def compare_sets(a, b):
    return _default().compare_sets(a, b)


def decompose_named(name):
    return _default().decompose_named(name)


def canonical_usage(name):
    return _default().canonical_usage(name)


def hasse(names=None):
    return _default().hasse(names)


def catalog():
    return list(_default().entries.values())


def rules():
    return list(_default().rules)
