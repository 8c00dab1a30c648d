"""Free-product reduction, the alternating normal form, and reduced-word enumeration."""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterator, NamedTuple

from .machine import ID, MealyMachine, Word

_ALIASES = {"′": "'", "·": " ", "*": " "}
_SUPERSCRIPT = re.compile("⁻?[⁰¹²³⁴⁵⁶⁷⁸⁹]+")
_SUP_DIGITS = str.maketrans("⁻⁰¹²³⁴⁵⁶⁷⁸⁹", "-0123456789")


class WordSyntaxError(ValueError):
    pass


def _tokenize(machine: MealyMachine, text: str) -> list[tuple[str, object]]:
    for k, v in _ALIASES.items():
        text = text.replace(k, v)
    text = _SUPERSCRIPT.sub(lambda m: "^" + m.group().translate(_SUP_DIGITS), text)
    names = sorted(list(machine.names) + [ID], key=len, reverse=True)
    tokens: list[tuple[str, object]] = []
    i = 0
    while i < len(text):
        c = text[i]
        if c.isspace() or c == ".":
            i += 1
        elif c in "()":
            tokens.append((c, c))
            i += 1
            if c == ")" and text.startswith("-1", i):
                tokens.append(("^", -1))
                i += 2
        elif c == "^":
            m = re.match(r"\^\s*(-?\d+)", text[i:])
            if not m:
                raise WordSyntaxError(f"expected an integer exponent at position {i} in {text!r}")
            tokens.append(("^", int(m.group(1))))
            i += m.end()
        else:
            for n in names:
                if text.startswith(n, i):
                    i += len(n)
                    inv = False
                    if text.startswith("-1", i):
                        inv = True
                        i += 2
                    tokens.append(("name", (n, inv)))
                    break
            else:
                raise WordSyntaxError(f"unknown symbol at position {i} in {text!r}")
    return tokens


def parse_word(machine: MealyMachine, text: str) -> Word:
    """Parse the word grammar: state names, ``x-1`` inverses, ``(...)`` groups and ``^n`` powers.

    Superscript exponents (``b⁻¹``, ``(ab)⁷``) are accepted as powers.

    Names may be separated by spaces or dots, or run together when
    unambiguous; ``id`` (or an empty string) is the identity.
    """
    tokens = _tokenize(machine, text)
    pos = 0

    def expr(depth: int) -> tuple[int, ...]:
        nonlocal pos
        out: list[int] = []
        while pos < len(tokens):
            kind, val = tokens[pos]
            if kind == ")":
                if depth == 0:
                    raise WordSyntaxError(f"unbalanced ')' in {text!r}")
                return tuple(out)
            if kind == "^":
                raise WordSyntaxError(f"exponent without a base in {text!r}")
            if kind == "(":
                pos += 1
                atom = expr(depth + 1)
                if pos >= len(tokens) or tokens[pos][0] != ")":
                    raise WordSyntaxError(f"unbalanced '(' in {text!r}")
                pos += 1
            else:
                name, inv = val
                pos += 1
                atom = () if name == ID else (machine.index[name],)
                if inv:
                    atom = machine.invert_symbols(atom)
            if pos < len(tokens) and tokens[pos][0] == "^":
                n = tokens[pos][1]
                pos += 1
                if n < 0:
                    atom, n = machine.invert_symbols(atom), -n
                atom = atom * n
            out.extend(atom)
        if depth:
            raise WordSyntaxError(f"unbalanced '(' in {text!r}")
        return tuple(out)

    return Word(machine, expr(0))


def free_reduce(w: Word) -> Word:
    """Rewrite ``w`` to its unique reduced form in the free product of the state factors."""
    return w.reduced()


def a_length(w: Word, letter: str = "a") -> int:
    if letter not in w.machine.index:
        return 0
    a = w.machine.index[letter]
    return w.symbols.count(a)


class AlternatingPair(NamedTuple):
    """State indices of an order-2 generator ``a`` and an order-3 pair ``b``, ``b^-1``."""

    a: int
    b: int
    b_inv: int


def alternating_pair(machine: MealyMachine, letter: str = "a") -> AlternatingPair:
    """Locate the Z/2 * Z/3 structure that reduced words of G (and H) alternate over."""
    if letter not in machine.index or not machine.has_free_product_factors():
        raise ValueError("machine is not a free product of Z/2 and Z/3 factors")
    a = machine.index[letter]
    fa = machine._factor[a]
    others = {machine._factor[s] for s in range(len(machine)) if machine._factor[s] != fa}
    if machine._factor_order[fa] != 2 or len(others) != 1:
        raise ValueError("machine is not a free product of Z/2 and Z/3 factors")
    (fb,) = others
    if machine._factor_order[fb] != 3:
        raise ValueError("machine is not a free product of Z/2 and Z/3 factors")
    b, b_inv = machine._factor_gens[fb]
    # the canonical representatives are the only symbols in reduced words
    b, b_inv = machine._single[b], machine._single[b_inv]
    return AlternatingPair(machine._single[a], b, b_inv)


@dataclass(frozen=True)
class NormalFormShape:
    """Exponents of ``b^e1 (ab)^p1 (ab^-1)^q1 ... (ab)^pk (ab^-1)^qk a^e2``."""

    eps1: int = 0
    eps2: int = 0
    blocks: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if self.eps1 not in (-1, 0, 1) or self.eps2 not in (0, 1):
            raise ValueError("eps1 must be in {-1,0,1} and eps2 in {0,1}")
        k = len(self.blocks)
        for j, (p, q) in enumerate(self.blocks):
            if p < 0 or q < 0:
                raise ValueError("block exponents must be non-negative")
            if (p == 0 and j > 0) or (q == 0 and j < k - 1) or p == q == 0:
                raise ValueError(f"block {j} = ({p}, {q}) violates the interior positivity rule")

    def to_word(self, machine: MealyMachine, letter: str = "a") -> Word:
        a, b, bi = alternating_pair(machine, letter)
        out: list[int] = []
        if self.eps1:
            out.append(b if self.eps1 > 0 else bi)
        for p, q in self.blocks:
            out.extend((a, b) * p)
            out.extend((a, bi) * q)
        if self.eps2:
            out.append(a)
        return Word(machine, out)


def reconstruct(s: NormalFormShape, machine: MealyMachine, letter: str = "a") -> Word:
    return s.to_word(machine, letter)


def shape(w: Word, letter: str = "a") -> NormalFormShape:
    a, b, bi = alternating_pair(w.machine, letter)
    sym = w.symbols
    if w.machine.reduce_symbols(sym) != sym:
        raise ValueError(f"word {w} is not reduced")
    i = 0
    eps1 = 0
    if sym and sym[0] != a:
        eps1 = 1 if sym[0] == b else -1
        i = 1
    signs = []
    while i + 1 < len(sym):
        signs.append(1 if sym[i + 1] == b else -1)
        i += 2
    eps2 = 1 if i < len(sym) else 0
    blocks = []
    for sign, run in itertools.groupby(signs):
        n = len(list(run))
        if sign > 0:
            blocks.append([n, 0])
        elif blocks and blocks[-1][1] == 0:
            blocks[-1][1] = n
        else:
            blocks.append([0, n])
    return NormalFormShape(eps1, eps2, tuple(tuple(x) for x in blocks))


def iter_reduced_symbols(machine: MealyMachine, n_a: int, letter: str = "a") -> Iterator[tuple[int, ...]]:
    """Reduced words with exactly ``n_a`` occurrences of ``a``, as raw tuples."""
    a, b, bi = alternating_pair(machine, letter)
    ends = ((), (b,), (bi,))
    if n_a == 0:
        yield from ends
        return
    for head in ends:
        for mids in itertools.product((b, bi), repeat=n_a - 1):
            body = [a]
            for x in mids:
                body.append(x)
                body.append(a)
            body = head + tuple(body)
            for tail in ends:
                yield body + tail


def enumerate_reduced(machine: MealyMachine, max_a: int, letter: str = "a") -> Iterator[Word]:
    """Every reduced word with at most ``max_a`` letters ``a``, by non-decreasing a-length."""
    if max_a < 0:
        raise ValueError("max_a must be non-negative")
    for n in range(max_a + 1):
        for sym in iter_reduced_symbols(machine, n, letter):
            yield Word(machine, sym)


def count_reduced(n_a: int) -> int:
    """Closed-form count of reduced words with exactly ``n_a`` a's."""
    return 3 if n_a == 0 else 9 * 2 ** (n_a - 1)


class SectionProfile(NamedTuple):
    sections: list[Word]
    L: int


def section_profile(w: Word, letter: str = "a") -> SectionProfile:
    m = w.machine
    secs = [Word(m, s) for s in m.reduced_sections_of(w.symbols)]
    return SectionProfile(secs, sum(a_length(s, letter) for s in secs))
