"""Identity, equality and element order by coinductive section exploration."""

from __future__ import annotations

import sys
from collections import Counter, deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Iterator, Sequence

from sympy import primefactors

from .machine import MealyMachine, Word, fixes_vertex, root_perm, section
from .perm import Perm
from .words import alternating_pair, iter_reduced_symbols, parse_word

DEFAULT_MAX_NODES = 10**6
DEFAULT_MAX_LEN = 256
DEFAULT_CAP = 2**20


class BudgetExceeded(RuntimeError):
    """Exploration hit the node or length budget; no answer was produced."""


@dataclass(frozen=True)
class BisimBudget:
    """Termination guard for section exploration.

    ``max_len`` caps section growth: a section may not be longer (in
    symbols) than ``max(len(root word), max_len)``.
    """

    max_nodes: int = DEFAULT_MAX_NODES
    max_len: int = DEFAULT_MAX_LEN

    def __post_init__(self):
        if self.max_nodes < 1 or self.max_len < 1:
            raise ValueError("budget values must be positive")


@dataclass(frozen=True)
class OrderResult:
    outcome: str  # "finite" | "exceeded_cap" | "infinite"
    n: int | None = None  # the order, or the cap that was exceeded
    witness: tuple[str, ...] = ()

    @property
    def is_finite(self) -> bool:
        return self.outcome == "finite"

    def __str__(self) -> str:
        if self.outcome == "finite":
            return str(self.n)
        if self.outcome == "infinite":
            return "infinite (" + " -> ".join(self.witness) + ")"
        return f"order exceeds cap {self.n}"


class _Infinite(Exception):
    def __init__(self, chain):
        self.chain = chain


class _CapExceeded(Exception):
    def __init__(self, n):
        self.n = n


class Decider:
    """Decision procedures for one machine, with monotone fact caches.

    ``_trivial`` holds words proven to act trivially, ``_nontrivial`` maps
    words to a vertex (0-based letters) they move, and ``_order`` holds
    verified element orders.
    """

    def __init__(self, machine: MealyMachine):
        self.machine = machine
        self._trivial: set[tuple[int, ...]] = set()
        self._nontrivial: dict[tuple[int, ...], tuple[int, ...]] = {}
        self._order: dict[tuple[int, ...], int] = {}

    # -- identity ------------------------------------------------------

    def is_identity(self, symbols: Sequence[int], budget: BisimBudget | None = None) -> bool:
        return self._explore(symbols, budget or BisimBudget()) is None

    def witness(self, symbols: Sequence[int], budget: BisimBudget | None = None) -> tuple[int, ...] | None:
        """A vertex moved by the word (0-based letters), or None if it is trivial."""
        return self._explore(symbols, budget or BisimBudget())

    def _explore(self, symbols: Sequence[int], budget: BisimBudget) -> tuple[int, ...] | None:
        m = self.machine
        root = m.reduce_symbols(symbols)
        if not root or root in self._trivial:
            return None
        if root in self._nontrivial:
            return self._nontrivial[root]
        limit = max(len(root), budget.max_len)
        parent: dict[tuple[int, ...], tuple[tuple[int, ...], int] | None] = {root: None}
        queue = deque([root])
        while queue:
            u = queue.popleft()
            perm, secs = m.perm_and_sections(u)
            for i, j in enumerate(perm):
                if i != j:
                    return self._record_witness(parent, u, (i,))
            for i, s in enumerate(secs):
                s = m.reduce_symbols(s)
                if not s or s in parent or s in self._trivial:
                    continue
                if s in self._nontrivial:
                    return self._record_witness(parent, u, (i,) + self._nontrivial[s])
                if len(s) > limit:
                    raise BudgetExceeded(f"section length {len(s)} exceeds {limit}")
                parent[s] = (u, i)
                if len(parent) > budget.max_nodes:
                    raise BudgetExceeded(f"more than {budget.max_nodes} distinct sections")
                queue.append(s)
        self._trivial.update(parent)
        return None

    def _record_witness(self, parent, u, tail: tuple[int, ...]) -> tuple[int, ...]:
        path = tail
        node = u
        while True:
            self._nontrivial.setdefault(node, path)
            link = parent[node]
            if link is None:
                return path
            node, i = link
            path = (i,) + path

    # -- order ---------------------------------------------------------

    def order(self, symbols: Sequence[int], cap: int = DEFAULT_CAP, budget: BisimBudget | None = None) -> OrderResult:
        budget = budget or BisimBudget()
        m = self.machine
        w = m.reduce_symbols(symbols)
        if w in self._order:
            n = self._order[w]
            return OrderResult("finite", n) if n <= cap else OrderResult("exceeded_cap", cap)
        limit = sys.getrecursionlimit()
        sys.setrecursionlimit(max(limit, 10_000))
        try:
            n, _ = self._order_rec(w, {}, 1, cap, budget)
        except _Infinite as exc:
            return OrderResult("infinite", None, tuple(str(Word(m, s)) for s in exc.chain))
        except _CapExceeded:
            return OrderResult("exceeded_cap", cap)
        finally:
            sys.setrecursionlimit(limit)
        if self._verify_order(w, n, budget):
            self._order[w] = n
            return OrderResult("finite", n) if n <= cap else OrderResult("exceeded_cap", cap)
        return self._search_order(w, cap, budget)

    def _verify_order(self, w: tuple[int, ...], n: int, budget: BisimBudget) -> bool:
        if not self.is_identity(w * n, budget):
            return False
        return all(not self.is_identity(w * (n // p), budget) for p in primefactors(n))

    def _search_order(self, w: tuple[int, ...], cap: int, budget: BisimBudget) -> OrderResult:
        step = Perm(x + 1 for x in self.machine.perm_of(w)).order()
        n = step
        while n <= cap:
            if self.is_identity(w * n, budget):
                self._order[w] = n
                return OrderResult("finite", n)
            n += step
        return OrderResult("exceeded_cap", cap)

    def _order_rec(self, u, stack: dict, mult: int, cap: int, budget: BisimBudget) -> tuple[int, int]:
        """Candidate order of ``u`` and the shallowest stack depth its computation relied on.

        The order is the lcm over cycles (length k, representative i) of the
        root permutation of k * order(first-return word at i). A first-return
        word already on the stack closes a loop: with total multiplier 1 it
        adds no constraint, otherwise the element has infinite order.
        """
        m = self.machine
        if not u:
            return 1, len(stack)
        if u in self._order:
            return self._order[u], len(stack)
        depth = len(stack)
        stack[u] = (depth, mult)
        low = depth
        n = 1
        perm = m.perm_of(u)
        seen = [False] * m.d
        for i in range(m.d):
            if seen[i]:
                continue
            k = 0
            j = i
            while not seen[j]:
                seen[j] = True
                j = perm[j]
                k += 1
            p = m.reduce_symbols(m.section_of(u * k, i))
            if not p:
                sub = 1
            elif p in stack:
                d2, m2 = stack[p]
                if mult * k != m2:
                    chain = [s for s, (dd, _) in stack.items() if dd >= d2]
                    raise _Infinite(chain + [p])
                sub = 1
                low = min(low, d2)
            else:
                sub, sublow = self._order_rec(p, stack, mult * k, cap, budget)
                low = min(low, sublow)
            n = lcm(n, k * sub)
            if n > cap:
                del stack[u]
                raise _CapExceeded(n)
        del stack[u]
        if low >= depth and self._verify_order(u, n, budget):
            self._order[u] = n
        return n, low


def decider(machine: MealyMachine) -> Decider:
    """The shared decider of a machine (caches only hold proven facts)."""
    d = machine.__dict__.get("_decider")
    if d is None:
        d = machine.__dict__["_decider"] = Decider(machine)
    return d


def is_identity(w: Word, budget: BisimBudget | None = None) -> bool:
    return decider(w.machine).is_identity(w.symbols, budget)


def are_equal(u: Word, v: Word, budget: BisimBudget | None = None) -> bool:
    return is_identity(u * v.inverse(), budget)


def nontrivial_witness(w: Word, budget: BisimBudget | None = None) -> list[int] | None:
    """A vertex (1-based letters) that ``w`` moves, or None when ``w`` is trivial."""
    v = decider(w.machine).witness(w.symbols, budget)
    return None if v is None else [x + 1 for x in v]


def order(w: Word, cap: int = DEFAULT_CAP, budget: BisimBudget | None = None) -> OrderResult:
    if cap < 1:
        raise ValueError("cap must be positive")
    return decider(w.machine).order(w.symbols, cap, budget)


# ----------------------------------------------------------------------
# exhaustive sweeps


def contraction_profile(machine: MealyMachine, max_a: int, letter: str = "a") -> Iterator[tuple[tuple[int, ...], int, int]]:
    """Yield ``(word, a_length, L)`` for every reduced word with a-length <= max_a.

    Words are grown by prepending one symbol at a time; since the prepended
    symbol acts first, slot i of the new word's sections is
    ``s_i . (old section at perm_s(i))``, so only the slots where ``s`` has a
    non-trivial section change. Sections are kept as reduced cons lists
    ``(head, a_count, tail)``.
    """
    a, b, bi = alternating_pair(machine, letter)
    d = machine.d
    perm, trans, combine = machine._perm, machine._trans, machine._combine
    weight = [1 if s == a else 0 for s in range(len(machine))]

    def prepend(t, cell):
        if cell is None:
            return (t, weight[t], None)
        c = combine[t][cell[0]]
        if c == -2:
            return (t, weight[t] + cell[1], cell)
        tail = cell[2]
        if c == -1:
            return tail
        return (c, weight[c] + (tail[1] if tail else 0), tail)

    def step(t, secs):
        pt, tt = perm[t], trans[t]
        return tuple(
            secs[pt[i]] if tt[i] < 0 else prepend(tt[i], secs[pt[i]]) for i in range(d)
        )

    empty = (None,) * d
    stack = [((), empty, 0)]
    while stack:
        word, secs, na = stack.pop()
        L = 0
        for c in secs:
            if c is not None:
                L += c[1]
        yield word, na, L
        head = word[0] if word else None
        if head != a and na < max_a:
            stack.append(((a,) + word, step(a, secs), na + 1))
        if head is None or head == a:
            for t in (bi, b):
                stack.append(((t,) + word, step(t, secs), na))


WORST_CASE_WORD = "(ab)^7 a b-1 a b (ab-1)^7"


@dataclass
class ContractionReport:
    max_a: int
    words_checked: int
    violations: list[str]
    max_ratio: Fraction
    argmax: list[str]
    argmax_count: int
    max_L_by_a: dict[int, int]
    worst_case_word: str | None = None
    worst_case_L: int | None = None
    worst_case_ratio: Fraction | None = None
    worst_case_is_maximizer: bool | None = None

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "max_a": self.max_a,
            "words_checked": self.words_checked,
            "violations": self.violations,
            "max_ratio": float(self.max_ratio),
            "max_ratio_exact": str(self.max_ratio),
            "argmax": self.argmax,
            "argmax_count": self.argmax_count,
            "max_L_by_a": {str(k): v for k, v in sorted(self.max_L_by_a.items())},
            "worst_case_word": self.worst_case_word,
            "worst_case_L": self.worst_case_L,
            "worst_case_ratio": None if self.worst_case_ratio is None else float(self.worst_case_ratio),
            "worst_case_is_maximizer": self.worst_case_is_maximizer,
        }


def verify_contraction(machine: MealyMachine, max_a: int, letter: str = "a", keep_argmax: int = 64) -> ContractionReport:
    """Check ``L(w) <= (7/8)|w|_a + 1`` over every reduced word with ``|w|_a <= max_a``.

    The ratio maximized is ``(L - 1)/|w|_a`` over words with at least one ``a``.
    """
    if max_a < 1:
        raise ValueError("max_a must be at least 1")
    names = machine.names
    fmt = lambda sym: " ".join(names[s] for s in sym) or "id"
    violations: list[str] = []
    best = Fraction(-1)
    argmax: list[tuple[int, ...]] = []
    argmax_count = 0
    max_L: dict[int, int] = {}
    count = 0
    for word, na, L in contraction_profile(machine, max_a, letter):
        count += 1
        if 8 * L > 7 * na + 8:
            violations.append(fmt(word))
        if L > max_L.get(na, -1):
            max_L[na] = L
        if na == 0:
            continue
        r = Fraction(L - 1, na)
        if r > best:
            best, argmax, argmax_count = r, [word], 1
        elif r == best:
            argmax_count += 1
            if len(argmax) < keep_argmax:
                argmax.append(word)
    report = ContractionReport(
        max_a, count, violations, best, sorted(fmt(w) for w in argmax), argmax_count, max_L
    )
    try:
        worst = parse_word(machine, WORST_CASE_WORD)
    except ValueError:
        return report
    wa = worst.symbols.count(machine.index[letter])
    if wa <= max_a:
        from .words import section_profile

        L = section_profile(worst, letter).L
        report.worst_case_word = str(worst)
        report.worst_case_L = L
        report.worst_case_ratio = Fraction(L - 1, wa)
        report.worst_case_is_maximizer = report.worst_case_ratio == best
    return report


@dataclass
class TorsionReport:
    max_a: int
    orders: dict[str, int]
    failures: dict[str, str]

    @property
    def ok(self) -> bool:
        return not self.failures

    @property
    def histogram(self) -> dict[int, int]:
        return dict(sorted(Counter(self.orders.values()).items()))

    def to_json(self) -> dict:
        return {
            "max_a": self.max_a,
            "words_checked": len(self.orders) + len(self.failures),
            "orders": self.orders,
            "histogram": {str(k): v for k, v in self.histogram.items()},
            "failures": self.failures,
        }


def _orders_chunk(args):
    machine, words, cap, budget = args
    dec = decider(machine)
    out = []
    for sym in words:
        try:
            out.append((sym, dec.order(sym, cap, budget)))
        except BudgetExceeded as exc:
            out.append((sym, exc))
    return out


def verify_torsion_base(
    machine: MealyMachine,
    max_a: int = 8,
    cap: int = DEFAULT_CAP,
    budget: BisimBudget | None = None,
    letter: str = "a",
    workers: int = 1,
) -> TorsionReport:
    """Compute a verified finite order for every reduced word with a-length <= max_a."""
    budget = budget or BisimBudget()
    words = [sym for n in range(max_a + 1) for sym in iter_reduced_symbols(machine, n, letter)]
    if workers > 1:
        chunks = [words[k::workers] for k in range(workers)]
        with ProcessPoolExecutor(workers) as pool:
            results = [r for part in pool.map(_orders_chunk, [(machine, c, cap, budget) for c in chunks]) for r in part]
        pos = {w: k for k, w in enumerate(words)}
        results.sort(key=lambda r: pos[r[0]])
    else:
        results = _orders_chunk((machine, words, cap, budget))
    names = machine.names
    orders: dict[str, int] = {}
    failures: dict[str, str] = {}
    for sym, res in results:
        key = " ".join(names[s] for s in sym) or "id"
        if isinstance(res, OrderResult) and res.is_finite:
            orders[key] = res.n
        else:
            failures[key] = str(res) if isinstance(res, OrderResult) else f"budget: {res}"
    return TorsionReport(max_a, orders, failures)


# b^(abab) = (abab)^-1 b (abab): the conjugate whose first section is b
CONJUGATE_WORD = "(abab)^-1 b (abab)"
CONJUGATE_PERM = "(264)(358)"
CONJUGATE_SECTIONS = ("b", "a b-1", "a", "b-1 a", "b-1", "id", "b-1", "b a")


@dataclass
class SectionOntoReport:
    checks: dict[str, bool]
    computed_sections: list[str]
    display_mismatches: dict[int, tuple[str, str]] = field(default_factory=dict)

    @property
    def onto(self) -> bool:
        """Both generators lie in the image of the section map at vertex 1."""
        return all(v for k, v in self.checks.items() if not k.startswith("display"))

    @property
    def ok(self) -> bool:
        return all(self.checks.values())


def verify_section_onto(machine: MealyMachine, budget: BisimBudget | None = None) -> SectionOntoReport:
    a = parse_word(machine, "a")
    b = parse_word(machine, "b")
    c = parse_word(machine, CONJUGATE_WORD)
    checks = {
        "a fixes 1": fixes_vertex(a, [1]),
        "a_1 = a": are_equal(section(a, 1), a, budget),
        "c fixes 1": fixes_vertex(c, [1]),
        "c_1 = b": are_equal(section(c, 1), b, budget),
        "display: perm": root_perm(c) == Perm.from_cycles(CONJUGATE_PERM, machine.d),
    }
    computed = [str(Word(machine, s)) for s in machine.reduced_sections_of(c.symbols)]
    mismatches = {}
    for i, (got, shown) in enumerate(zip(computed, CONJUGATE_SECTIONS), start=1):
        if got != str(parse_word(machine, shown).reduced()):
            mismatches[i] = (got, shown)
    checks["display: sections"] = not mismatches
    return SectionOntoReport(checks, computed, mismatches)
