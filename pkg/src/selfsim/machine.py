"""Mealy machines over a finite alphabet and the tree action of their state words.

Letters are ``1..d`` at the public surface and ``0..d-1`` inside the kernel
methods (those taking raw symbol tuples). Groups act on the right, as in GAP:
a word ``s1 s2 ... sk`` acts on a vertex by applying ``s1`` first, so that

    (i.v)^g = i^perm_g . v^(g_i)     and     (gh)_i = g_i h_(i^perm_g).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .perm import Perm

ID = "id"
_NOINT = -2
_CANCEL = -1


class MachineError(ValueError):
    """Malformed machine definition."""


class InverseInconsistencyError(MachineError):
    pass


class StructuralError(ValueError):
    """Words from different machines were mixed, or a letter is out of range."""


@dataclass(frozen=True)
class StateDef:
    name: str
    perm: Perm
    transitions: tuple[str | None, ...]  # None is the identity sentinel

    def __post_init__(self):
        if len(self.perm) != len(self.transitions):
            raise MachineError(f"state {self.name}: perm and transitions disagree on alphabet size")


class MealyMachine:
    """An invertible Mealy automaton whose states generate a self-similar group.

    ``inverses`` pairs every state with its inverse (a state may be its own
    inverse). States missing from ``inverses`` get a synthesized partner named
    ``<name>-1``. ``orders`` optionally declares the order of a state; free
    reduction treats each inverse pair as a cyclic factor of that order.
    """

    def __init__(
        self,
        d: int,
        states: Sequence[StateDef],
        inverses: Mapping[str, str] | Iterable[tuple[str, str]] = (),
        orders: Mapping[str, int] | None = None,
    ):
        if d < 2:
            raise MachineError("alphabet size must be at least 2")
        self.d = d
        states = list(states)
        names = [s.name for s in states]
        if len(set(names)) != len(names):
            raise MachineError("duplicate state names")
        if ID in names:
            raise MachineError("'id' is reserved for the identity sentinel")
        for s in states:
            if len(s.perm) != d:
                raise MachineError(f"state {s.name}: permutation is not on {d} letters")

        pairs = dict(inverses.items()) if isinstance(inverses, Mapping) else {}
        if not isinstance(inverses, Mapping):
            for x, y in inverses:
                for u, v in ((x, y), (y, x)):
                    if pairs.get(u, v) != v:
                        raise MachineError(f"state {u} paired with both {pairs[u]} and {v}")
                    pairs[u] = v
        for x, y in list(pairs.items()):
            if x not in names or y not in names:
                raise MachineError(f"inverse pair ({x}, {y}) names an unknown state")
            if pairs.setdefault(y, x) != x:
                raise MachineError(f"inverse pairing of {y} is not symmetric")

        # synthesize missing inverse states
        synthesized = []
        for s in states:
            if s.name in pairs:
                continue
            inv_name = s.name + "-1"
            if inv_name in names:
                raise MachineError(f"cannot synthesize inverse of {s.name}: {inv_name} exists unpaired")
            pairs[s.name], pairs[inv_name] = inv_name, s.name
            synthesized.append(s)
        all_names = set(names) | {pairs[s.name] for s in synthesized}
        for s in states:
            for t in s.transitions:
                if t is not None and t not in all_names:
                    raise MachineError(f"state {s.name}: unknown transition target {t!r}")
        for s in synthesized:
            perm, trans = _derived_inverse(s, pairs)
            states.append(StateDef(pairs[s.name], perm, trans))

        self.states: tuple[StateDef, ...] = tuple(states)
        self.names: tuple[str, ...] = tuple(s.name for s in self.states)
        self.index: dict[str, int] = {n: k for k, n in enumerate(self.names)}
        self.inverses: dict[str, str] = {s.name: pairs[s.name] for s in states}
        self.orders: dict[str, int] = dict(orders or {})
        for name, n in self.orders.items():
            if name not in self.index:
                raise MachineError(f"order declared for unknown state {name!r}")
            if int(n) < 1:
                raise MachineError(f"order of {name} must be positive")
            partner = pairs[name]
            if partner in self.orders and self.orders[partner] != n:
                raise MachineError(f"orders of {name} and {partner} disagree")
        self._check_inverses()
        self._compile()
        self._key = json.dumps(self.to_dict(), sort_keys=True)

    # ------------------------------------------------------------------
    # construction helpers

    def _check_inverses(self) -> None:
        for s in self.states:
            t = self.state(self.inverses[s.name])
            perm, trans = _derived_inverse(s, self.inverses)
            if t.perm != perm:
                raise InverseInconsistencyError(
                    f"perm({t.name}) = {t.perm} but the inverse of perm({s.name}) is {perm}"
                )
            for j, (got, want) in enumerate(zip(t.transitions, trans), start=1):
                if got != want:
                    raise InverseInconsistencyError(
                        f"{t.name} section {j} is {got or ID} but inverting {s.name} "
                        f"requires {want or ID}"
                    )

    def _compile(self) -> None:
        self._perm = tuple(tuple(x - 1 for x in s.perm.images) for s in self.states)
        self._perm_inv = tuple(tuple(y - 1 for y in s.perm.inverse().images) for s in self.states)
        self._trans = tuple(
            tuple(-1 if t is None else self.index[t] for t in s.transitions) for s in self.states
        )
        self._inv = tuple(self.index[self.inverses[n]] for n in self.names)

        # cyclic factors of the free product
        factor = [-1] * len(self.names)
        exp = [0] * len(self.names)
        self._factor_order: list[int | None] = []
        self._factor_gens: list[tuple[int, int]] = []
        for s, name in enumerate(self.names):
            if factor[s] >= 0:
                continue
            t = self._inv[s]
            f = len(self._factor_order)
            n = self.orders.get(name, self.orders.get(self.names[t]))
            if s == t:
                if n not in (None, 1, 2):
                    raise MachineError(f"self-inverse state {name} cannot have order {n}")
                n = 2 if n is None else n
            factor[s] = factor[t] = f
            exp[s], exp[t] = 1, -1 if s != t else 1
            self._factor_order.append(n)
            self._factor_gens.append((s, t))
        self._factor = tuple(factor)
        self._exp = tuple(exp)
        self._single_syllable = all(n is not None and n <= 3 for n in self._factor_order)
        if self._single_syllable:
            k = len(self.names)
            combine = [[_NOINT] * k for _ in range(k)]
            for s in range(k):
                for t in range(k):
                    if factor[s] != factor[t]:
                        continue
                    e = self._normalize(factor[s], exp[s] + exp[t])
                    combine[s][t] = _CANCEL if e == 0 else self._syllable(factor[s], e)[0]
            self._combine = tuple(tuple(r) for r in combine)
            single = []
            for s in range(k):
                e = self._normalize(factor[s], exp[s])
                single.append(_CANCEL if e == 0 else self._syllable(factor[s], e)[0])
            self._single = tuple(single)

    def _normalize(self, f: int, e: int) -> int:
        n = self._factor_order[f]
        if n is None:
            return e
        r = e % n
        return r - n if r > n // 2 else r

    def _syllable(self, f: int, e: int) -> tuple[int, ...]:
        pos, neg = self._factor_gens[f]
        return (pos,) * e if e > 0 else (neg,) * (-e)

    # ------------------------------------------------------------------
    # public accessors

    def state(self, name: str) -> StateDef:
        try:
            return self.states[self.index[name]]
        except KeyError:
            raise KeyError(f"unknown state {name!r}") from None

    def __getitem__(self, name: str) -> StateDef:
        return self.state(name)

    def __len__(self) -> int:
        return len(self.states)

    def word(self, text: str = "") -> "Word":
        from .words import parse_word

        return parse_word(self, text)

    def gen(self, name: str) -> "Word":
        return Word(self, (self.index[name],))

    @property
    def identity(self) -> "Word":
        return Word(self, ())

    def derive_inverse(self, name: str) -> StateDef:
        """Compute the inverse of a state from its data alone."""
        perm, trans = _derived_inverse(self.state(name), self.inverses)
        return StateDef(self.inverses[name], perm, trans)

    def has_free_product_factors(self) -> bool:
        return self._single_syllable

    def __eq__(self, other: object) -> bool:
        return isinstance(other, MealyMachine) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __repr__(self) -> str:
        return f"MealyMachine(d={self.d}, states={list(self.names)})"

    # ------------------------------------------------------------------
    # kernel on raw symbol tuples (0-based letters)

    def reduce_symbols(self, symbols: Sequence[int]) -> tuple[int, ...]:
        if self._single_syllable:
            combine = self._combine
            stack: list[int] = []
            for t in symbols:
                if stack:
                    c = combine[stack[-1]][t]
                    if c == _NOINT:
                        stack.append(t)
                    elif c == _CANCEL:
                        stack.pop()
                    else:
                        stack[-1] = c
                else:
                    u = self._single[t]
                    if u != _CANCEL:
                        stack.append(u)
            return tuple(stack)
        syl: list[list[int]] = []
        for t in symbols:
            f = self._factor[t]
            if syl and syl[-1][0] == f:
                e = self._normalize(f, syl[-1][1] + self._exp[t])
                if e == 0:
                    syl.pop()
                else:
                    syl[-1][1] = e
            else:
                e = self._normalize(f, self._exp[t])
                if e:
                    syl.append([f, e])
        out: list[int] = []
        for f, e in syl:
            out.extend(self._syllable(f, e))
        return tuple(out)

    def perm_of(self, symbols: Sequence[int]) -> tuple[int, ...]:
        cur = tuple(range(self.d))
        perm = self._perm
        for s in symbols:
            p = perm[s]
            cur = tuple(p[x] for x in cur)
        return cur

    def section_of(self, symbols: Sequence[int], letter: int) -> tuple[int, ...]:
        out = []
        j = letter
        perm, trans = self._perm, self._trans
        for s in symbols:
            t = trans[s][j]
            if t >= 0:
                out.append(t)
            j = perm[s][j]
        return tuple(out)

    def sections_of(self, symbols: Sequence[int]) -> list[tuple[int, ...]]:
        """All d unreduced sections."""
        return self.perm_and_sections(symbols)[1]

    def perm_and_sections(self, symbols: Sequence[int]) -> tuple[tuple[int, ...], list[tuple[int, ...]]]:
        """Root permutation and all d unreduced sections in a single pass."""
        d = self.d
        outs: list[list[int]] = [[] for _ in range(d)]
        pos = list(range(d))
        perm, trans = self._perm, self._trans
        for s in symbols:
            ts, ps = trans[s], perm[s]
            for i in range(d):
                j = pos[i]
                t = ts[j]
                if t >= 0:
                    outs[i].append(t)
                pos[i] = ps[j]
        return tuple(pos), [tuple(o) for o in outs]

    def reduced_sections_of(self, symbols: Sequence[int]) -> list[tuple[int, ...]]:
        return [self.reduce_symbols(s) for s in self.sections_of(symbols)]

    def apply_state(self, s: int, vertex: Sequence[int]) -> list[int]:
        out = list(vertex)
        perm, trans = self._perm, self._trans
        for k, x in enumerate(vertex):
            if s < 0:
                break
            out[k] = perm[s][x]
            s = trans[s][x]
        return out

    def apply_symbols(self, symbols: Sequence[int], vertex: Sequence[int]) -> list[int]:
        v = list(vertex)
        for s in symbols:
            v = self.apply_state(s, v)
        return v

    def invert_symbols(self, symbols: Sequence[int]) -> tuple[int, ...]:
        inv = self._inv
        return tuple(inv[s] for s in reversed(symbols))

    # ------------------------------------------------------------------
    # serialization

    def to_dict(self) -> dict:
        seen = set()
        pairs = []
        for n in self.names:
            m = self.inverses[n]
            if n not in seen:
                pairs.append([n, m])
                seen.update((n, m))
        return {
            "alphabet": self.d,
            "states": [
                {
                    "name": s.name,
                    "perm": s.perm.to_cycles(),
                    "transitions": [t or ID for t in s.transitions],
                }
                for s in self.states
            ],
            "inverses": pairs,
            "orders": dict(sorted(self.orders.items())),
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_dict(cls, data: Mapping) -> "MealyMachine":
        try:
            d = data["alphabet"]
            raw_states = data["states"]
        except (KeyError, TypeError) as exc:
            raise MachineError(f"missing field {exc}") from None
        if not isinstance(d, int) or isinstance(d, bool):
            raise MachineError("'alphabet' must be an integer")
        extra = set(data) - {"alphabet", "states", "inverses", "orders"}
        if extra:
            raise MachineError(f"unknown fields: {sorted(extra)}")
        states = []
        for k, raw in enumerate(raw_states):
            try:
                name = raw["name"]
                perm = Perm.parse(raw["perm"], d)
                trans = raw["transitions"]
            except KeyError as exc:
                raise MachineError(f"state #{k}: missing field {exc}") from None
            except ValueError as exc:
                raise MachineError(f"state #{k}: {exc}") from None
            if not isinstance(name, str) or not name:
                raise MachineError(f"state #{k}: name must be a non-empty string")
            if len(trans) != d:
                raise MachineError(f"state {name}: expected {d} transitions, got {len(trans)}")
            states.append(StateDef(name, perm, tuple(None if t == ID else t for t in trans)))
        inverses = [tuple(p) for p in data.get("inverses", [])]
        if any(len(p) != 2 for p in inverses):
            raise MachineError("each inverse entry must be a pair of names")
        return cls(d, states, inverses, data.get("orders") or {})

    @classmethod
    def from_json(cls, path: str | Path) -> "MealyMachine":
        return cls.loads(Path(path).read_text())

    @classmethod
    def loads(cls, text: str) -> "MealyMachine":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise MachineError(f"invalid JSON: {exc}") from None
        return cls.from_dict(data)


def _derived_inverse(s: StateDef, pairs: Mapping[str, str]) -> tuple[Perm, tuple[str | None, ...]]:
    # (s^-1)_j = (s_{perm_s^-1(j)})^-1
    inv = s.perm.inverse()
    trans = tuple(
        None if (t := s.transitions[inv(j) - 1]) is None else pairs[t]
        for j in range(1, len(s.perm) + 1)
    )
    return inv, trans


class Word:
    """An unreduced product of machine states; the leftmost symbol acts first."""

    __slots__ = ("machine", "symbols")

    def __init__(self, machine: MealyMachine, symbols: Iterable[int] = ()):
        self.machine = machine
        self.symbols = tuple(symbols)

    @classmethod
    def from_names(cls, machine: MealyMachine, names: Iterable[str]) -> "Word":
        out = []
        for n in names:
            if n == ID:
                continue
            if n not in machine.index:
                raise KeyError(f"unknown state {n!r}")
            out.append(machine.index[n])
        return cls(machine, out)

    def _same(self, other: "Word") -> None:
        if not isinstance(other, Word):
            raise TypeError(f"expected a Word, got {type(other).__name__}")
        if other.machine is not self.machine and other.machine != self.machine:
            raise StructuralError("words belong to different machines")

    def __mul__(self, other: "Word") -> "Word":
        self._same(other)
        return Word(self.machine, self.symbols + other.symbols)

    def __pow__(self, n: int) -> "Word":
        if n < 0:
            return self.inverse() ** (-n)
        return Word(self.machine, self.symbols * n)

    def inverse(self) -> "Word":
        return Word(self.machine, self.machine.invert_symbols(self.symbols))

    def reduced(self) -> "Word":
        return Word(self.machine, self.machine.reduce_symbols(self.symbols))

    def is_reduced(self) -> bool:
        return self.machine.reduce_symbols(self.symbols) == self.symbols

    @property
    def names(self) -> list[str]:
        return [self.machine.names[s] for s in self.symbols]

    def __len__(self) -> int:
        return len(self.symbols)

    def __iter__(self):
        return iter(self.names)

    def __bool__(self) -> bool:
        return bool(self.symbols)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Word) or other.symbols != self.symbols:
            return False
        return other.machine is self.machine or other.machine == self.machine

    def __hash__(self) -> int:
        return hash(self.symbols)

    def __str__(self) -> str:
        return " ".join(self.names) if self.symbols else ID

    def __repr__(self) -> str:
        return f"Word({str(self)!r})"


def _check_letter(machine: MealyMachine, i: int) -> None:
    if not (isinstance(i, int) and 1 <= i <= machine.d):
        raise StructuralError(f"letter {i!r} out of range 1..{machine.d}")


def root_perm(w: Word) -> Perm:
    return Perm(x + 1 for x in w.machine.perm_of(w.symbols))


def section(w: Word, i: int) -> Word:
    """Unreduced section of ``w`` at letter ``i``."""
    _check_letter(w.machine, i)
    return Word(w.machine, w.machine.section_of(w.symbols, i - 1))


def section_at(w: Word, vertex: Sequence[int]) -> Word:
    """Section at a vertex, reducing after each level."""
    m = w.machine
    sym = w.symbols
    for x in vertex:
        _check_letter(m, x)
        sym = m.reduce_symbols(m.section_of(sym, x - 1))
    return Word(m, sym)


def apply(w: Word, vertex: Sequence[int]) -> list[int]:
    for x in vertex:
        _check_letter(w.machine, x)
    return [x + 1 for x in w.machine.apply_symbols(w.symbols, [x - 1 for x in vertex])]


def invert(w: Word) -> Word:
    return w.inverse()


def fixes_vertex(w: Word, vertex: Sequence[int]) -> bool:
    return apply(w, vertex) == list(vertex)
