"""Permutations of the alphabet {1, ..., d}."""

from __future__ import annotations

import re
from typing import Iterable, Sequence

_CYCLE_RE = re.compile(r"\(([^()]*)\)")


class Perm:
    """A permutation of ``1..d`` stored as its image list.

    ``images[i - 1]`` is the image of letter ``i``. Products are read left to
    right, matching right actions: ``(s * t)(i) == t(s(i))``.
    """

    __slots__ = ("images",)

    def __init__(self, images: Iterable[int]):
        images = tuple(int(x) for x in images)
        if sorted(images) != list(range(1, len(images) + 1)):
            raise ValueError(f"not a bijection of 1..{len(images)}: {images}")
        self.images = images

    @classmethod
    def identity(cls, d: int) -> "Perm":
        return cls(range(1, d + 1))

    @classmethod
    def from_cycles(cls, text: str, d: int) -> "Perm":
        """Parse cycle notation such as ``"(34)(67)(58)"``.

        Letters inside a cycle may be separated by spaces or commas; when
        every letter is a single digit they may also be run together.
        Fixed points can be omitted.
        """
        stripped = text.replace(" ", "")
        if stripped in ("", "()", "id"):
            return cls.identity(d)
        if _CYCLE_RE.sub("", stripped):
            raise ValueError(f"malformed cycle notation: {text!r}")
        images = list(range(1, d + 1))
        seen: set[int] = set()
        for body in _CYCLE_RE.findall(text):
            if "," in body or " " in body.strip():
                letters = [int(x) for x in re.split(r"[,\s]+", body.strip()) if x]
            else:
                letters = [int(x) for x in body]
            for x in letters:
                if not 1 <= x <= d:
                    raise ValueError(f"letter {x} out of range 1..{d} in {text!r}")
                if x in seen:
                    raise ValueError(f"letter {x} repeated in {text!r}")
                seen.add(x)
            for x, y in zip(letters, letters[1:] + letters[:1]):
                images[x - 1] = y
        return cls(images)

    @classmethod
    def parse(cls, spec: str | Sequence[int], d: int) -> "Perm":
        """Accept either cycle notation or an explicit image list."""
        if isinstance(spec, str):
            return cls.from_cycles(spec, d)
        p = cls(spec)
        if len(p) != d:
            raise ValueError(f"image list has length {len(p)}, expected {d}")
        return p

    def __len__(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i - 1]

    def __mul__(self, other: "Perm") -> "Perm":
        if len(self) != len(other):
            raise ValueError("permutations act on different alphabets")
        return Perm(other.images[j - 1] for j in self.images)

    def inverse(self) -> "Perm":
        inv = [0] * len(self)
        for i, j in enumerate(self.images, start=1):
            inv[j - 1] = i
        return Perm(inv)

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.images, start=1))

    def cycles(self, include_fixed: bool = False) -> list[tuple[int, ...]]:
        """Disjoint cycles, each starting at its smallest letter."""
        seen = set()
        out = []
        for start in range(1, len(self) + 1):
            if start in seen:
                continue
            cyc = [start]
            seen.add(start)
            j = self(start)
            while j != start:
                cyc.append(j)
                seen.add(j)
                j = self(j)
            if len(cyc) > 1 or include_fixed:
                out.append(tuple(cyc))
        return out

    def order(self) -> int:
        from math import lcm

        return lcm(1, *(len(c) for c in self.cycles()))

    def fixed_points(self) -> list[int]:
        return [i for i in range(1, len(self) + 1) if self(i) == i]

    def to_cycles(self) -> str:
        cyc = self.cycles()
        if not cyc:
            return "()"
        sep = "" if len(self) <= 9 else ","
        return "".join("(" + sep.join(str(x) for x in c) + ")" for c in cyc)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Perm) and self.images == other.images

    def __hash__(self) -> int:
        return hash(self.images)

    def __repr__(self) -> str:
        return f"Perm({self.to_cycles()!r}, d={len(self)})"

    def __str__(self) -> str:
        return self.to_cycles()
