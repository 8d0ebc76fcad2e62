# -*- coding: utf-8 -*-
import copy
import os

import pytest

from acx import settings
from acx.corpus import builtin_mapping, builtin_system, corpus_dir, reset
from acx.explore import Bound, clear_cache
from acx.mapping import SimulationDef, load_mapping
from acx.system import validate_system
from acx.utils import load_json

DEFAULT_BOUND = Bound(2, 1, 6)

ACL_GRANT = {"name": "grant", "params": ["a:U", "u:U", "o:O"], "actor": 0, "guard": True,
             "effects": [{"add": ["ACL", "?u", "?o"]}]}
ACL_REVOKE = {"name": "revoke", "params": ["a:U", "u:U", "o:O"], "actor": 0, "guard": True,
              "effects": [{"remove": ["ACL", "?u", "?o"]}]}
ACL_AUTH = {"name": "auth", "params": ["u:U", "o:O"], "request": True, "formula": {"member": ["ACL", "?u", "?o"]}}

COPY_ACL = [
    {"match": [{"sort": ["U", "?u"]}], "emit": [{"atom": ["U", "?u"]}]},
    {"match": [{"sort": ["O", "?o"]}], "emit": [{"atom": ["O", "?o"]}]},
    {"match": [{"relation": ["ACL", "?u", "?o"]}], "emit": [{"tuple": ["ACL", "?u", "?o"]}]},
]
PASS_GRANT = {"command": "grant", "params": ["?a", "?u", "?o"], "body": [{"emit": ["grant", "?a", "?u", "?o"]}]}
PASS_REVOKE = {"command": "revoke", "params": ["?a", "?u", "?o"], "body": [{"emit": ["revoke", "?a", "?u", "?o"]}]}
ASK_AUTH = {"query": "auth", "params": ["?u", "?o"], "formula": {"ask": ["auth", "?u", "?o"]}}


@pytest.fixture(autouse=True)
def clean_settings():
    settings.reset()
    clear_cache()
    yield
    settings.reset()
    clear_cache()
    reset()


def corpus_document(ident):
    return load_json(os.path.join(corpus_dir(), '%s.json' % ident))


def mapping_variant(ident, command_rules=(), query_rules=(), **changes):
    """A corpus mapping document with some rules replaced by name."""
    doc = copy.deepcopy(corpus_document(ident))
    for rule in command_rules:
        doc['command_rules'] = [rule if r['command'] == rule['command'] else r for r in doc['command_rules']]
    for rule in query_rules:
        doc['query_rules'] = [rule if r['query'] == rule['query'] else r for r in doc['query_rules']]
    doc.update(changes)
    return doc


def simulation(doc, source=None, target=None):
    src = source or builtin_system(doc['source'])
    tgt = target or builtin_system(doc['target'])
    return SimulationDef.of(load_mapping(doc, src, tgt))


@pytest.fixture
def acl():
    return builtin_system('acl')


@pytest.fixture
def rbac():
    return builtin_system('rbac')


@pytest.fixture
def acl_transfer():
    return builtin_system('acl-transfer')


@pytest.fixture
def acl_to_rbac():
    return SimulationDef.of(builtin_mapping('acl-to-rbac'))


@pytest.fixture
def transfer_clean():
    return SimulationDef.of(builtin_mapping('acl-transfer-clean'))


@pytest.fixture
def transfer_contaminating():
    return SimulationDef.of(builtin_mapping('acl-transfer-contaminating'))


@pytest.fixture
def access_to_rbac():
    return SimulationDef.of(builtin_mapping('acl-access-to-rbac'))


# ---------------------- inline systems -----------------------

@pytest.fixture
def active():
    """One sort, one unary relation."""
    return validate_system({
        "name": "active", "sorts": ["A"],
        "relations": [{"name": "Active", "sorts": ["A"]}],
        "queries": [{"name": "on", "params": ["x:A"], "request": True, "formula": {"member": ["Active", "?x"]}}],
        "commands": [{"name": "activate", "params": ["x:A"], "actor": 0, "effects": [{"add": ["Active", "?x"]}]}],
    })


@pytest.fixture
def pairs():
    return validate_system({
        "name": "pairs", "sorts": ["A"],
        "relations": [{"name": "Pair", "sorts": ["A", "A"]}],
        "queries": [{"name": "on", "params": ["x:A"], "request": True, "formula": {"member": ["Pair", "?x", "?x"]}}],
        "commands": [{"name": "activate", "params": ["x:A"], "actor": 0,
                      "effects": [{"add": ["Pair", "?x", "?x"]}]}],
    })


@pytest.fixture
def quadratic(active, pairs):
    """Every pair of active atoms becomes a target tuple."""
    return simulation({
        "name": "active-to-pairs", "source": "active", "target": "pairs",
        "state_rules": [
            {"match": [{"sort": ["A", "?x"]}], "emit": [{"atom": ["A", "?x"]}]},
            {"match": [{"relation": ["Active", "?x"]}, {"relation": ["Active", "?y"]}],
             "emit": [{"tuple": ["Pair", "?x", "?y"]}]},
        ],
        "command_rules": [{"command": "activate", "body": [{"emit": ["activate", "?x"]}]}],
        "query_rules": [{"query": "on", "formula": {"ask": ["on", "?x"]}}],
    }, active, pairs)


@pytest.fixture
def acl_log():
    """ACL with a hidden log relation no query reads."""
    return validate_system({
        "name": "acl-log", "sorts": ["U", "O"],
        "relations": [{"name": "ACL", "sorts": ["U", "O"]}, {"name": "Log", "sorts": ["U", "O"]}],
        "queries": [ACL_AUTH],
        "commands": [ACL_GRANT, ACL_REVOKE,
                     {"name": "note", "params": ["a:U", "u:U", "o:O"], "actor": 0,
                      "effects": [{"add": ["Log", "?u", "?o"]}]}],
    })


@pytest.fixture
def logged(acl, acl_log):
    """Revocation only when logged; the decider also reads the log."""
    return simulation({
        "name": "acl-to-acl-log", "source": "acl", "target": "acl-log",
        "state_rules": COPY_ACL,
        "command_rules": [
            PASS_GRANT,
            {"command": "revoke", "params": ["?a", "?u", "?o"],
             "body": [{"when": {"relation": ["Log", "?u", "?o"], "body": [{"emit": ["revoke", "?a", "?u", "?o"]}]}}]},
        ],
        "query_rules": [{"query": "auth", "params": ["?u", "?o"],
                         "state": {"or": [{"member": ["ACL", "?u", "?o"]}, {"member": ["Log", "?u", "?o"]}]}}],
    }, acl, acl_log)


@pytest.fixture
def acl_admin():
    return validate_system({
        "name": "acl-admin", "sorts": ["U", "O"],
        "relations": [{"name": "ACL", "sorts": ["U", "O"]}, {"name": "Admin", "sorts": ["U"]}],
        "queries": [ACL_AUTH],
        "commands": [ACL_GRANT, ACL_REVOKE],
        "admins": "Admin",
    })


@pytest.fixture
def admin_mapping(acl, acl_admin):
    """``grant_body`` builds an acl -> acl-admin mapping whose target has the administrator root."""

    def build(grant_body):
        return simulation({
            "name": "acl-to-acl-admin", "source": "acl", "target": "acl-admin",
            "state_rules": COPY_ACL + [{"match": [], "emit": [{"tuple": ["Admin", "root"]}]}],
            "command_rules": [{"command": "grant", "params": ["?a", "?u", "?o"], "body": grant_body}, PASS_REVOKE],
            "query_rules": [ASK_AUTH],
        }, acl, acl_admin)
    return build


# revoke rules of acl-to-rbac variants that scan the target
MEMBER_SCAN_REVOKE = {
    "command": "revoke", "params": ["?a", "?u", "?o"],
    "body": [{"foreach": {"query": ["member", "?x", {"derive": ["role", "?u"]}],
                          "body": [{"emit": ["revokePerm", "?x", {"derive": ["role", "?u"]}, "?o"]}]}}],
}
AUTH_SCAN_REVOKE = {
    "command": "revoke", "params": ["?a", "?u", "?o"],
    "body": [{"foreach": {"query": ["auth", "?x", "?p"],
                          "body": [{"emit": ["revokePerm", "?a", {"derive": ["role", "?x"]}, "?p"]}]}}],
}
ROLE_SCAN_AUTH = {
    "query": "auth", "params": ["?u", "?o"],
    "theory": {"exists": ["?r", "R", {"and": [{"ask": ["member", "?u", "?r"]}, {"ask": ["auth", "?u", "?o"]}]}]},
}
