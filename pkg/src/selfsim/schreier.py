"""Schreier graphs of generator actions on the levels of the tree."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .growth import state_level_actions, word_level_action
from .machine import MealyMachine, Word

MAX_LEVEL = 7
FORMATS = ("dot", "edge-csv", "json")


@dataclass
class SchreierGraph:
    """Labelled action graph on all ``d**level`` vertices, self-loops included.

    ``images[label][k]`` is the index of the image of vertex ``k``; vertex
    indices follow lexicographic order of the vertex words.
    """

    machine: MealyMachine
    level: int
    labels: list[str]
    images: dict[str, np.ndarray]

    @property
    def num_vertices(self) -> int:
        return self.machine.d**self.level

    def vertex(self, k: int) -> tuple[int, ...]:
        d = self.machine.d
        out = []
        for _ in range(self.level):
            k, r = divmod(k, d)
            out.append(r + 1)
        return tuple(reversed(out))

    def vertex_name(self, k: int) -> str:
        sep = "" if self.machine.d <= 9 else "."
        return sep.join(str(x) for x in self.vertex(k))

    def index(self, vertex: Sequence[int]) -> int:
        k = 0
        for x in vertex:
            k = k * self.machine.d + (x - 1)
        return k

    def edges(self) -> Iterator[tuple[int, int, str]]:
        for k in range(self.num_vertices):
            for lab in self.labels:
                yield k, int(self.images[lab][k]), lab

    def edge_multiset(self) -> dict[str, list[tuple[tuple[int, ...], tuple[int, ...]]]]:
        return {
            lab: [(self.vertex(k), self.vertex(int(j))) for k, j in enumerate(self.images[lab])]
            for lab in self.labels
        }

    def loops(self, label: str) -> int:
        img = self.images[label]
        return int(np.count_nonzero(img == np.arange(len(img))))

    def is_connected(self) -> bool:
        n = self.num_vertices
        if n == 1:
            return True
        src = np.concatenate([np.arange(n) for _ in self.labels])
        dst = np.concatenate([self.images[lab] for lab in self.labels])
        adj = coo_matrix((np.ones(len(src)), (src, dst)), shape=(n, n))
        count, _ = connected_components(adj, directed=True, connection="weak")
        return count == 1


def build(machine: MealyMachine, generators: Sequence[Word], level: int) -> SchreierGraph:
    if level < 0 or level > MAX_LEVEL:
        raise ValueError(f"level must be between 0 and {MAX_LEVEL}")
    actions = state_level_actions(machine, level)
    labels = [str(g) for g in generators]
    images = {str(g): word_level_action(g, machine, level, actions) for g in generators}
    return SchreierGraph(machine, level, labels, images)


def projects_onto(upper: SchreierGraph, lower: SchreierGraph) -> bool:
    """Deleting last letters maps every edge of ``upper`` to an edge of ``lower``."""
    if upper.level != lower.level + 1 or upper.labels != lower.labels:
        return False
    d = upper.machine.d
    parent = np.arange(upper.num_vertices) // d
    return all(
        np.array_equal(lower.images[lab][parent], upper.images[lab] // d) for lab in upper.labels
    )


def export(graph: SchreierGraph, fmt: str) -> bytes:
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}; expected one of {', '.join(FORMATS)}")
    names = [graph.vertex_name(k) for k in range(graph.num_vertices)]
    if fmt == "dot":
        lines = [f"digraph schreier_level_{graph.level} {{"]
        lines += [f'  "{n}";' for n in names]
        lines += [f'  "{names[s]}" -> "{names[t]}" [label="{lab}"];' for s, t, lab in graph.edges()]
        lines.append("}")
        return ("\n".join(lines) + "\n").encode()
    if fmt == "edge-csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["src", "dst", "label"])
        for s, t, lab in graph.edges():
            writer.writerow([names[s], names[t], lab])
        return buf.getvalue().encode()
    doc = {
        "level": graph.level,
        "alphabet": graph.machine.d,
        "generators": graph.labels,
        "vertices": names,
        "adjacency": {
            names[k]: {lab: names[int(graph.images[lab][k])] for lab in graph.labels}
            for k in range(graph.num_vertices)
        },
    }
    return (json.dumps(doc, indent=1, sort_keys=True) + "\n").encode()
