"""Ball growth with exact deduplication, activity functions and their classification."""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from typing import Sequence

import networkx as nx
import numpy as np

from .decision import BisimBudget, BudgetExceeded, decider
from .machine import MealyMachine, Word

REFERENCE_ALPHA = math.log(8) / (math.log(8) - math.log(7 / 8))
GROWTH_DISCLAIMER = (
    "exponent fits are descriptive only; a finite ball series cannot verify "
    "the asymptotic upper bound exp(c n^alpha)"
)


# ----------------------------------------------------------------------
# level actions


def state_level_actions(machine: MealyMachine, level: int) -> list[np.ndarray]:
    """Image arrays of every state on the ``d**level`` vertices of a level.

    Vertex ``x1 ... xl`` (0-based letters) has index ``sum(x_k * d**(l-k))``.
    """
    d = machine.d
    cur = [np.zeros(1, dtype=np.int64) for _ in machine.states]
    ident = np.zeros(1, dtype=np.int64)
    for lv in range(1, level + 1):
        size = d ** (lv - 1)
        nxt = []
        for s in range(len(machine)):
            perm, trans = machine._perm[s], machine._trans[s]
            parts = [perm[x] * size + (ident if trans[x] < 0 else cur[trans[x]]) for x in range(d)]
            nxt.append(np.concatenate(parts))
        cur = nxt
        ident = np.arange(d**lv, dtype=np.int64)
    return cur


def word_level_action(word: Word | Sequence[int], machine: MealyMachine, level: int, actions=None) -> np.ndarray:
    symbols = word.symbols if isinstance(word, Word) else word
    actions = actions if actions is not None else state_level_actions(machine, level)
    img = np.arange(machine.d**level, dtype=np.int64)
    for s in symbols:
        img = actions[s][img]
    return img


# ----------------------------------------------------------------------
# growth


@dataclass
class GrowthReport:
    sizes: list[int]
    generators: list[str]
    level: int
    candidates: int = 0
    fingerprint_hits: int = 0
    equality_checks: int = 0
    collisions: int = 0
    elements: list[Word] | None = None
    sphere_sizes: list[int] = field(default_factory=list)

    @property
    def fit(self) -> dict:
        return fit_growth(self.sizes)

    def to_json(self) -> dict:
        return {
            "sizes": self.sizes,
            "generators": self.generators,
            "bucket_level": self.level,
            "dedup": {
                "candidates": self.candidates,
                "fingerprint_hits": self.fingerprint_hits,
                "equality_checks": self.equality_checks,
                "collisions": self.collisions,
            },
            "fit": self.fit,
        }

    def to_csv(self) -> str:
        return "n,ball_size\n" + "".join(f"{n},{b}\n" for n, b in enumerate(self.sizes))


def fit_growth(sizes: Sequence[int]) -> dict:
    """Descriptive exponent estimates for ``log b(n) ~ c n^alpha``.

    ``alpha_lsq`` is the least-squares slope of log log b(n) against log n;
    ``alpha_tail`` is the slope between the last two points.
    """
    pts = [(math.log(n), math.log(math.log(b))) for n, b in enumerate(sizes) if n >= 2 and b > 1]
    out: dict = {
        "reference_alpha": REFERENCE_ALPHA,
        "alpha_lsq": None,
        "c_lsq": None,
        "alpha_tail": None,
        "ratios": [sizes[n + 1] / sizes[n] for n in range(len(sizes) - 1)],
        "disclaimer": GROWTH_DISCLAIMER,
    }
    if len(pts) >= 2:
        x, y = np.array(pts).T
        slope, icept = np.polyfit(x, y, 1)
        out["alpha_lsq"] = float(slope)
        out["c_lsq"] = float(math.exp(icept))
        out["alpha_tail"] = float((y[-1] - y[-2]) / (x[-1] - x[-2]))
    return out


def default_bucket_level(machine: MealyMachine) -> int:
    """At least 3, and deep enough that a level has >= 512 vertices."""
    return max(3, math.ceil(math.log(512) / math.log(machine.d) - 1e-9))


def ball_sizes(
    machine: MealyMachine,
    generators: Sequence[Word],
    n_max: int,
    level: int | None = None,
    budget: BisimBudget | None = None,
    keep_elements: bool = False,
) -> GrowthReport:
    """Sizes of the balls of radius 0..n_max in the Cayley graph.

    Elements are bucketed by their action on a tree level; words sharing a
    bucket are compared exactly with the bisimulation test, so the count is
    exact for any bucket level.
    """
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    gens = [machine.reduce_symbols(g.symbols) for g in generators]
    dec = decider(machine)
    inverses = {machine.reduce_symbols(machine.invert_symbols(g)) for g in gens}
    if not inverses <= set(gens) and not all(
        any(dec.is_identity(h + g, budget) for g in gens) for h in gens
    ):
        raise ValueError("generating set must be closed under inversion")
    level = default_bucket_level(machine) if level is None else level
    actions = state_level_actions(machine, level)
    gen_actions = [word_level_action(g, machine, level, actions) for g in gens]

    def key(arr: np.ndarray) -> bytes:
        return hashlib.blake2b(arr.astype(np.int32).tobytes(), digest_size=16).digest()

    ident = np.arange(machine.d**level, dtype=np.int64)
    buckets: dict[bytes, list[tuple[int, ...]]] = {key(ident): [()]}
    report = GrowthReport([1], [str(Word(machine, g)) for g in gens], level)
    report.sphere_sizes = [1]
    elements = [()] if keep_elements else None
    frontier: list[tuple[tuple[int, ...], np.ndarray]] = [((), ident)]
    total = 1
    for _ in range(n_max):
        nxt = []
        for w, img in frontier:
            for g, gimg in zip(gens, gen_actions):
                cand = machine.reduce_symbols(w + g)
                cimg = gimg[img]
                report.candidates += 1
                k = key(cimg)
                bucket = buckets.get(k)
                if bucket is None:
                    buckets[k] = [cand]
                else:
                    report.fingerprint_hits += 1
                    if cand in bucket:
                        continue
                    dup = False
                    for rep in bucket:
                        report.equality_checks += 1
                        if dec.is_identity(cand + machine.invert_symbols(rep), budget):
                            dup = True
                            break
                    if dup:
                        continue
                    report.collisions += 1
                    bucket.append(cand)
                nxt.append((cand, cimg))
                if elements is not None:
                    elements.append(cand)
        total += len(nxt)
        report.sizes.append(total)
        report.sphere_sizes.append(len(nxt))
        frontier = nxt
    if elements is not None:
        report.elements = [Word(machine, e) for e in elements]
    return report


# ----------------------------------------------------------------------
# activity


class ActivityError(ValueError):
    pass


MAX_DIRECT_LEVEL = 6
MAX_RECURSIVE_LEVEL = 60


def activity_direct(w: Word, level: int, budget: BisimBudget | None = None) -> int:
    """Count level vertices whose section of ``w`` is non-trivial, vertex by vertex."""
    if level > MAX_DIRECT_LEVEL:
        raise ActivityError(f"level {level} is too deep for direct enumeration; use activity_recursive")
    m = w.machine
    dec = decider(m)
    count = 0
    stack = [(m.reduce_symbols(w.symbols), 0)]
    while stack:
        u, depth = stack.pop()
        if depth == level:
            if u and not dec.is_identity(u, budget):
                count += 1
            continue
        if not u:
            continue  # every descendant section of the identity is the identity
        for i in range(m.d):
            stack.append((m.reduce_symbols(m.section_of(u, i)), depth + 1))
    return count


def activity_recursive(w: Word, level: int, budget: BisimBudget | None = None) -> int:
    """act(l) = sum over letters of act_(w_i)(l - 1), memoized on reduced words."""
    if level > MAX_RECURSIVE_LEVEL:
        raise ActivityError(f"level must be at most {MAX_RECURSIVE_LEVEL}")
    m = w.machine
    dec = decider(m)
    budget = budget or BisimBudget()
    memo: dict[tuple[tuple[int, ...], int], int] = {}

    def act(u: tuple[int, ...], lv: int) -> int:
        if not u:
            return 0
        if lv == 0:
            return 0 if dec.is_identity(u, budget) else 1
        hit = memo.get((u, lv))
        if hit is not None:
            return hit
        if len(memo) >= budget.max_nodes:
            raise BudgetExceeded("activity memo exceeded the node budget")
        total = sum(act(s, lv - 1) for s in m.reduced_sections_of(u))
        memo[(u, lv)] = total
        return total

    return act(m.reduce_symbols(w.symbols), level)


@dataclass
class ActivityProfile:
    state: str
    values: list[int]
    classification: str  # "bounded" | "polynomial" | "exponential"
    degree: int | None = None
    rate: float | None = None

    def to_json(self) -> dict:
        return {
            "state": self.state,
            "values": self.values,
            "classification": self.classification,
            "degree": self.degree,
            "rate": self.rate,
        }

    def to_csv(self) -> str:
        return "level,count\n" + "".join(f"{k},{v}\n" for k, v in enumerate(self.values, start=1))


def spectral_radius(matrix: np.ndarray, iters: int = 10_000, tol: float = 1e-13) -> float:
    """Perron root of a non-negative irreducible matrix by power iteration.

    Iterates on ``A + I`` (primitive even when ``A`` is periodic) and
    subtracts the shift.
    """
    a = np.asarray(matrix, dtype=float) + np.eye(len(matrix))
    x = np.ones(len(a))
    lam = 0.0
    for _ in range(iters):
        y = a @ x
        new = float(np.max(y))
        y /= new
        if abs(new - lam) < tol and np.max(np.abs(y - x)) < tol:
            lam = new
            break
        x, lam = y, new
    return lam - 1.0


def state_graph(machine: MealyMachine, budget: BisimBudget | None = None) -> nx.MultiDiGraph:
    """Multigraph on semantically non-trivial states; one edge per letter."""
    dec = decider(machine)
    nontrivial = [s for s in range(len(machine)) if not dec.is_identity((s,), budget)]
    g = nx.MultiDiGraph()
    g.add_nodes_from(machine.names[s] for s in nontrivial)
    keep = set(nontrivial)
    for s in nontrivial:
        for t in machine._trans[s]:
            if t in keep:
                g.add_edge(machine.names[s], machine.names[t])
    return g


def classify_activity(
    machine: MealyMachine, state: str, levels: int = 10, budget: BisimBudget | None = None
) -> ActivityProfile:
    """Bounded / polynomial(degree) / exponential(rate) activity of a state."""
    values = [activity_recursive(machine.gen(state), lv, budget) for lv in range(1, levels + 1)]
    g = state_graph(machine, budget)
    if state not in g:
        return ActivityProfile(state, values, "bounded", 0)
    reach = nx.descendants(g, state) | {state}
    sub = g.subgraph(reach)
    cond = nx.condensation(nx.DiGraph(sub))
    rate = None
    cyclic: dict[int, bool] = {}
    for c, data in cond.nodes(data=True):
        members = sorted(data["members"])
        edges = sub.subgraph(members).number_of_edges()
        cyclic[c] = edges >= 1 and (len(members) > 1 or sub.has_edge(members[0], members[0]))
        if edges > len(members):
            idx = {n: k for k, n in enumerate(members)}
            mat = np.zeros((len(members), len(members)))
            for u, v in sub.subgraph(members).edges():
                mat[idx[u], idx[v]] += 1
            lam = spectral_radius(mat)
            rate = lam if rate is None else max(rate, lam)
    if rate is not None:
        return ActivityProfile(state, values, "exponential", None, rate)
    best: dict[int, int] = {}
    for c in reversed(list(nx.topological_sort(cond))):
        below = max((best[x] for x in cond.successors(c)), default=0)
        best[c] = below + (1 if cyclic[c] else 0)
    start = cond.graph["mapping"][state]
    degree = max(best[start] - 1, 0)
    return ActivityProfile(state, values, "bounded" if degree == 0 else "polynomial", degree)
