import itertools
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from selfsim import (
    InverseInconsistencyError,
    MachineError,
    MealyMachine,
    StructuralError,
    Word,
    apply,
    catalog,
    fixes_vertex,
    invert,
    root_perm,
    section,
)
from selfsim.machine import section_at
from selfsim.perm import Perm


def reference_apply(defn: dict, names: list[str], vertex: list[int]) -> list[int]:
    """Independent interpreter over the raw JSON definition; leftmost name acts first."""
    d = defn["alphabet"]
    table = {s["name"]: (Perm.from_cycles(s["perm"], d), s["transitions"]) for s in defn["states"]}
    v = list(vertex)
    for name in names:
        out, cur = [], name
        for x in v:
            if cur == "id":
                out.append(x)
                continue
            perm, trans = table[cur]
            out.append(perm(x))
            cur = trans[x - 1]
        v = out
    return v


def words(m, max_size=12):
    return st.lists(st.integers(0, len(m) - 1), max_size=max_size).map(lambda s: Word(m, s))


G_ = catalog.load("G").machine
vertices = st.lists(st.integers(1, 8), max_size=6)


# --- examples -------------------------------------------------------------


def test_root_perm_examples(G):
    assert root_perm(G.word("a")) == Perm.from_cycles("(34)(67)(58)", 8)
    assert root_perm(G.identity).is_identity()
    # a then b, composed by hand: 1->1->2, 2->2->3, 3->4->5, 5->8->8, 8->5->6, 6->7->7, 7->6->4, 4->3->1
    assert root_perm(G.word("ab")) == Perm.from_cycles("(12358674)", 8)


def test_section_examples(G):
    assert str(section(G.word("b"), 8)) == "b-1"
    assert str(section(G.word("b"), 3)) == "id"
    assert str(section(G.word("aa"), 1)) == "a a"
    assert str(section_at(G.word("b"), [7, 7])) == "b"


def test_apply_examples(G):
    assert apply(G.word("b"), [1, 7]) == [2, 7]
    assert apply(G.identity, [5, 3, 2]) == [5, 3, 2]
    assert apply(G.word("a"), [1, 1, 1]) == [1, 1, 1]
    assert apply(G.word("abab-1a"), [2]) == [7]


def test_invert_examples(G):
    assert invert(G.word("b")).names == ["b-1"]
    assert invert(G.identity).symbols == ()
    assert str(invert(G.word("ab"))) == "b-1 a"


def test_fixes_vertex_examples(G):
    assert fixes_vertex(G.word("a"), [1])
    assert not fixes_vertex(G.word("b"), [1])
    assert fixes_vertex(G.word("(abab)^-1 b (abab)"), [1])


def test_vertex_out_of_range(G):
    with pytest.raises(ValueError):
        apply(G.word("a"), [9])
    with pytest.raises(ValueError):
        section(G.word("a"), 0)


def test_mixed_machine_words(G, H):
    with pytest.raises(StructuralError):
        G.word("a") * H.word("a")


# --- definition checks ------------------------------------------------------


def test_derived_inverse_of_b(G):
    d = G.derive_inverse("b")
    assert d.perm == Perm.from_cycles("(132)(465)", 8)
    assert [t or "id" for t in d.transitions] == ["id"] * 6 + ["b-1", "b"]
    assert d == G.state("b-1")


def test_inverse_synthesized_when_missing():
    m = MealyMachine.from_dict(
        {"alphabet": 2, "states": [{"name": "t", "perm": "(12)", "transitions": ["id", "t"]}]}
    )
    assert m.names == ("t", "t-1")
    assert [x or "id" for x in m.state("t-1").transitions] == ["t-1", "id"]
    w = m.word("t t-1")
    assert all(apply(w, list(v)) == list(v) for v in itertools.product((1, 2), repeat=5))


def test_inverse_inconsistency_rejected():
    defn = catalog.machine_definition("G")
    defn["states"][2]["transitions"] = ["id"] * 6 + ["b", "b-1"]
    with pytest.raises(InverseInconsistencyError):
        MealyMachine.from_dict(defn)
    defn = catalog.machine_definition("G")
    defn["states"][2]["perm"] = "(123)(456)"
    with pytest.raises(InverseInconsistencyError):
        MealyMachine.from_dict(defn)


@pytest.mark.parametrize(
    "patch",
    [
        lambda d: d.pop("states"),
        lambda d: d.update(alphabet="8"),
        lambda d: d.update(extra=1),
        lambda d: d["states"][0].update(transitions=["a"]),
        lambda d: d["states"][0].update(transitions=["zz"] + ["id"] * 7),
        lambda d: d["states"][0].update(perm="(19)"),
        lambda d: d.update(orders={"q": 2}),
        lambda d: d["states"][1].update(name="a"),
    ],
)
def test_malformed_definitions(patch):
    defn = catalog.machine_definition("G")
    patch(defn)
    with pytest.raises(MachineError):
        MealyMachine.from_dict(defn)


def test_json_round_trip(tmp_path):
    for name in catalog.NAMES:
        m = catalog.load(name).machine
        assert MealyMachine.loads(m.to_json()) == m
        p = tmp_path / f"{name}.json"
        p.write_text(m.to_json())
        back = MealyMachine.from_json(p)
        assert back == m and hash(back) == hash(m)
        assert json.loads(back.to_json()) == json.loads(m.to_json())


def test_invalid_json():
    with pytest.raises(MachineError):
        MealyMachine.loads("{not json")


# --- properties -----------------------------------------------------------


@settings(max_examples=200)
@given(words(G_), vertices)
def test_action_matches_reference_interpreter(w, v):
    defn = catalog.machine_definition("G")
    assert apply(w, v) == reference_apply(defn, w.names, v)


@settings(max_examples=200)
@given(words(G_), words(G_), vertices)
def test_action_homomorphism(u, w, v):
    assert apply(u * w, v) == apply(w, apply(u, v))
    assert root_perm(u * w) == root_perm(u) * root_perm(w)


@given(words(G_), st.integers(1, 8), st.lists(st.integers(1, 8), max_size=4))
def test_section_law(w, i, v):
    assert apply(w, [i] + v) == [root_perm(w)(i)] + apply(section(w, i), v)


@given(words(G_), vertices)
def test_inverse_law(w, v):
    assert apply(invert(w), apply(w, v)) == v
    assert apply(w ** -1, apply(w, v)) == v


@pytest.mark.parametrize("level", [1, 2, 3, 4])
def test_states_act_bijectively(G, level):
    for name in G.names:
        images = {tuple(apply(G.word(name), list(v))) for v in itertools.product(range(1, 9), repeat=level)}
        assert len(images) == 8**level


def test_word_helpers(G):
    w = G.word("a b b")
    assert len(w) == 3 and w.names == ["a", "b", "b"]
    assert not w.is_reduced() and w.reduced().names == ["a", "b-1"]
    assert (w ** 0).symbols == () and str(G.identity) == "id"
    assert Word.from_names(G, ["a", "id", "b"]) == G.word("ab")
    with pytest.raises(KeyError):
        Word.from_names(G, ["q"])
