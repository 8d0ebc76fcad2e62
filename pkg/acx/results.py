# -*- coding: utf-8 -*-
"""Verdicts, counterexamples and check results shared by the explorer and the property checkers."""
import enum
from dataclasses import dataclass, field
from typing import Optional

from acx.utils import to_primitive


class Verdict(enum.Enum):
    HOLDS = 'Holds'
    FAILS = 'Fails'
    EVIDENCE = 'Evidence'
    INAPPLICABLE = 'Inapplicable'


@dataclass
class Counterexample:
    """What a failing check observed, enough to re-run it.

    ``command`` is the source command, ``trace`` the target commands produced
    for it (or the native target command for backward reachability),
    ``other_state`` the second target state of a dependence pair.
    """
    kind: str
    source_state: Optional[object] = None
    target_state: Optional[object] = None
    command: Optional[object] = None
    trace: tuple = ()
    query: Optional[object] = None
    other_state: Optional[object] = None
    index: Optional[int] = None
    detail: dict = field(default_factory=dict)

    def to_primitive(self):
        data = {'kind': self.kind}
        for name in ('source_state', 'target_state', 'other_state', 'command', 'query', 'index'):
            value = getattr(self, name)
            if value is not None:
                data[name] = to_primitive(value)
        if self.trace:
            data['trace'] = [str(c) for c in self.trace]
        if self.detail:
            data['detail'] = to_primitive(self.detail)
        return data


@dataclass
class CheckResult:
    property: object
    verdict: Verdict
    bound: object
    counterexample: Optional[Counterexample] = None
    evidence: Optional[dict] = None
    stats: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    @property
    def holds(self):
        return self.verdict is Verdict.HOLDS

    @property
    def fails(self):
        return self.verdict is Verdict.FAILS

    @property
    def passed(self):
        """Holds, or Evidence that supports the level."""
        if self.verdict is Verdict.EVIDENCE:
            return bool(self.evidence and self.evidence.get('supported'))
        return self.holds

    def describe(self):
        if self.verdict is Verdict.HOLDS:
            return 'Holds(bound %s)' % self.bound
        if self.verdict is Verdict.EVIDENCE:
            return 'Evidence(%s)' % ('supported' if self.passed else 'not supported')
        if self.verdict is Verdict.INAPPLICABLE:
            return 'Inapplicable(%s)' % '; '.join(self.notes)
        return 'Fails(%s)' % (self.counterexample.kind if self.counterexample else 'no counterexample')

    def to_primitive(self):
        return {
            'property': to_primitive(self.property),
            'verdict': self.verdict.value,
            'bound': to_primitive(self.bound),
            'counterexample': to_primitive(self.counterexample),
            'evidence': to_primitive(self.evidence),
            'stats': to_primitive(self.stats),
            'notes': list(self.notes),
        }


def holds(tag, bound, stats=None, notes=None, evidence=None):
    return CheckResult(tag, Verdict.HOLDS, bound, evidence=evidence, stats=stats or {}, notes=list(notes or []))


def fails(tag, bound, counterexample, stats=None, notes=None, evidence=None):
    return CheckResult(tag, Verdict.FAILS, bound, counterexample=counterexample, evidence=evidence,
                       stats=stats or {}, notes=list(notes or []))


def evidence(tag, bound, samples, fitted, supported, stats=None, notes=None):
    return CheckResult(tag, Verdict.EVIDENCE, bound,
                       evidence={'samples': samples, 'fitted': fitted, 'supported': bool(supported)},
                       stats=stats or {}, notes=list(notes or []))


def inapplicable(tag, bound, reason):
    return CheckResult(tag, Verdict.INAPPLICABLE, bound, notes=[reason])
