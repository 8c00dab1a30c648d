"""The named machines shipped with the library, and JSON ingestion of user machines."""

from __future__ import annotations

import copy
from dataclasses import dataclass
from pathlib import Path

from .decision import BisimBudget, decider
from .machine import MachineError, MealyMachine, Word

_ID6 = ["id"] * 6

_DEFINITIONS = {
    "G": {
        "provenance": "the 8-letter automaton group of intermediate growth and exponential activity: "
        "a = <a,id,...,id>(34)(67)(58), b = <id,...,id,b,b^-1>(123)(456), "
        "b^-1 = <id,...,id,b^-1,b>(132)(465)",
        "machine": {
            "alphabet": 8,
            "states": [
                {"name": "a", "perm": "(34)(67)(58)", "transitions": ["a"] + ["id"] * 7},
                {"name": "b", "perm": "(123)(456)", "transitions": _ID6 + ["b", "b-1"]},
                {"name": "b-1", "perm": "(132)(465)", "transitions": _ID6 + ["b-1", "b"]},
            ],
            "inverses": [["a", "a"], ["b", "b-1"]],
            "orders": {"a": 2, "b": 3},
        },
    },
    "H": {
        "provenance": "Wilson-type companion group with bounded activity: a as in G and "
        "b' = <id,...,id,b',id>(123)(456)",
        "machine": {
            "alphabet": 8,
            "states": [
                {"name": "a", "perm": "(34)(67)(58)", "transitions": ["a"] + ["id"] * 7},
                {"name": "b'", "perm": "(123)(456)", "transitions": _ID6 + ["b'", "id"]},
                {"name": "b'-1", "perm": "(132)(465)", "transitions": _ID6 + ["b'-1", "id"]},
            ],
            "inverses": [["a", "a"], ["b'", "b'-1"]],
            "orders": {"a": 2, "b'": 3},
        },
    },
    "grigorchuk": {
        "provenance": "first Grigorchuk group: a = <id,id>(12), b = <c,a>, c = <d,a>, d = <b,id>",
        "machine": {
            "alphabet": 2,
            "states": [
                {"name": "a", "perm": "(12)", "transitions": ["id", "id"]},
                {"name": "b", "perm": "()", "transitions": ["c", "a"]},
                {"name": "c", "perm": "()", "transitions": ["d", "a"]},
                {"name": "d", "perm": "()", "transitions": ["b", "id"]},
            ],
            "inverses": [["a", "a"], ["b", "b"], ["c", "c"], ["d", "d"]],
            "orders": {"a": 2, "b": 2, "c": 2, "d": 2},
        },
    },
    "grigorchuk-exp": {
        "provenance": "Grigorchuk automaton with every a replaced by a' = <a',a'>(12)",
        "machine": {
            "alphabet": 2,
            "states": [
                {"name": "a'", "perm": "(12)", "transitions": ["a'", "a'"]},
                {"name": "b", "perm": "()", "transitions": ["c", "a'"]},
                {"name": "c", "perm": "()", "transitions": ["d", "a'"]},
                {"name": "d", "perm": "()", "transitions": ["b", "id"]},
            ],
            "inverses": [["a'", "a'"], ["b", "b"], ["c", "c"], ["d", "d"]],
            "orders": {"a'": 2, "b": 2, "c": 2, "d": 2},
        },
    },
}

NAMES = tuple(_DEFINITIONS)


@dataclass
class CatalogEntry:
    name: str
    machine: MealyMachine
    provenance: str
    generators: list[Word]


def _default_generators(machine: MealyMachine) -> list[Word]:
    # one word per state, collapsing states that reduce to the same symbol
    seen = []
    for s in range(len(machine)):
        r = machine.reduce_symbols((s,))
        if r and r not in seen:
            seen.append(r)
    return [Word(machine, r) for r in seen]


def check_declared_orders(machine: MealyMachine, budget: BisimBudget | None = None) -> None:
    """Reject declared orders that free reduction would use unsoundly."""
    if not machine.orders:
        return
    # check on an order-free copy: reduction must not assume what is being checked
    bare = MealyMachine(machine.d, machine.states, machine.inverses)
    dec = decider(bare)
    for name, n in machine.orders.items():
        if not dec.is_identity((bare.index[name],) * n, budget or BisimBudget(max_nodes=10_000)):
            raise MachineError(f"declared order {n} of state {name} is wrong: {name}^{n} is not trivial")


def machine_definition(name: str) -> dict:
    if name not in _DEFINITIONS:
        raise KeyError(f"unknown catalog machine {name!r}; known: {', '.join(NAMES)}")
    return copy.deepcopy(_DEFINITIONS[name]["machine"])


def load(name: str) -> CatalogEntry:
    machine = MealyMachine.from_dict(machine_definition(name))
    check_declared_orders(machine)
    return CatalogEntry(name, machine, _DEFINITIONS[name]["provenance"], _default_generators(machine))


def load_json(path: str | Path) -> CatalogEntry:
    machine = MealyMachine.from_json(path)
    check_declared_orders(machine)
    return CatalogEntry(str(path), machine, f"user machine from {path}", _default_generators(machine))


def resolve(selector: str) -> CatalogEntry:
    """A catalog name, or else a path to a machine JSON file."""
    if selector in _DEFINITIONS:
        return load(selector)
    if Path(selector).is_file():
        return load_json(selector)
    raise KeyError(f"{selector!r} is neither a catalog name ({', '.join(NAMES)}) nor a JSON file")
