import json

import pytest

from selfsim import InverseInconsistencyError, MachineError, MealyMachine, catalog, is_identity
from selfsim.catalog import check_declared_orders, load_json, resolve
from selfsim.perm import Perm


def test_load_examples():
    g = catalog.load("G").machine
    assert g.d == 8 and g.names == ("a", "b", "b-1")
    assert g["b"].perm == Perm.from_cycles("(123)(456)", 8)
    assert [t or "id" for t in g["b"].transitions] == ["id"] * 6 + ["b", "b-1"]
    assert catalog.load("H").machine["b'"].transitions[7] is None
    assert [t or "id" for t in catalog.load("grigorchuk").machine["d"].transitions] == ["b", "id"]


def test_grigorchuk_exp_replaces_a():
    plain = catalog.load("grigorchuk").machine
    exp = catalog.load("grigorchuk-exp").machine
    swap = {"a": "a'"}
    for name in ("b", "c", "d"):
        assert exp[name].perm == plain[name].perm
        assert [swap.get(t, t) for t in plain[name].transitions] == list(exp[name].transitions)
    assert exp["a'"].perm == plain["a"].perm and exp["a'"].transitions == ("a'", "a'")


@pytest.mark.parametrize("name, a", [("grigorchuk", "a"), ("grigorchuk-exp", "a'")])
def test_grigorchuk_relations(name, a):
    m = catalog.load(name).machine
    for rel in (f"{a} {a}", "b b", "c c", "d d", "b c d"):
        assert is_identity(m.word(rel))
    assert not is_identity(m.word(f"{a} b"))


def test_default_generators():
    assert [str(g) for g in catalog.load("G").generators] == ["a", "b", "b-1"]
    assert [str(g) for g in catalog.load("grigorchuk").generators] == ["a", "b", "c", "d"]


def test_provenance_present():
    for name in catalog.NAMES:
        assert catalog.load(name).provenance


def test_unknown_name():
    with pytest.raises(KeyError):
        catalog.load("nope")
    with pytest.raises(KeyError):
        resolve("nope")


def test_json_round_trip(tmp_path):
    for name in catalog.NAMES:
        m = catalog.load(name).machine
        p = tmp_path / "m.json"
        p.write_text(m.to_json())
        e = load_json(p)
        assert e.machine == m
        assert resolve(str(p)).machine == m


def test_inconsistent_inverse_file(tmp_path):
    defn = catalog.machine_definition("G")
    defn["states"][2]["transitions"][6] = "b"
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(defn))
    with pytest.raises(InverseInconsistencyError, match="b-1 section 7"):
        load_json(p)


def test_wrong_declared_order():
    defn = catalog.machine_definition("G")
    defn["orders"] = {"a": 2, "b": 2}
    with pytest.raises(MachineError):
        check_declared_orders(MealyMachine.from_dict(defn))
