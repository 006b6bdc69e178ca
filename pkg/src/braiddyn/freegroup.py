"""Right action of braid words on the free group of the punctured disk.

The disk with n marked points has free fundamental group on loops
x_1, ..., x_n, one around each puncture.  The generator sigma_i acts on the
right by

    x_i     -> x_i x_{i+1} x_i^-1
    x_{i+1} -> x_i
    x_j     -> x_j            otherwise,

and sigma_i^-1 by the inverse substitution (x_i -> x_{i+1},
x_{i+1} -> x_{i+1}^-1 x_i x_{i+1}).  Free words are kept reduced at all
times; substitution cancels at the write head, which is where inverse pairs
appear.  The loop stretch of a braid is the log of the longest reduced image
among the basis loops, measured in nats.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .braids import BraidWord, Exhausted

__all__ = ["FreeWord", "reduce_letters", "apply_generator", "apply_braid", "loop_stretch"]

DEFAULT_LENGTH_CAP = 10_000_000


@dataclass(frozen=True)
class FreeWord:
    """A freely reduced word; letter +i is x_i, letter -i its inverse."""

    rank: int
    letters: tuple[int, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError(f"rank must be >= 1, got {self.rank}")
        letters = tuple(int(g) for g in self.letters)
        for g in letters:
            if g == 0 or abs(g) > self.rank:
                raise ValueError(f"letter {g} out of range for rank {self.rank}")
        for u, v in zip(letters, letters[1:]):
            if u == -v:
                raise ValueError("word is not freely reduced; use reduce_letters")
        object.__setattr__(self, "letters", letters)

    def __len__(self) -> int:
        return len(self.letters)

    def inverse(self) -> "FreeWord":
        return FreeWord(self.rank, tuple(-g for g in reversed(self.letters)))

    def to_json(self) -> str:
        return json.dumps({"rank": self.rank, "letters": list(self.letters)})

    @classmethod
    def from_json(cls, text: str) -> "FreeWord":
        data = json.loads(text)
        return cls(data["rank"], tuple(data["letters"]))

    @classmethod
    def basis(cls, rank: int, i: int) -> "FreeWord":
        if not 1 <= i <= rank:
            raise ValueError(f"basis index {i} out of range for rank {rank}")
        return cls(rank, (i,))


def reduce_letters(rank: int, letters) -> FreeWord:
    """Freely reduce an arbitrary letter sequence (stack cancellation)."""
    out: list[int] = []
    for g in letters:
        if out and out[-1] == -g:
            out.pop()
        else:
            out.append(int(g))
    return FreeWord(rank, tuple(out))


def _images(rank: int, g: int) -> dict[int, tuple[int, ...]]:
    """Substitution table of a signed braid generator on basis letters."""
    i = abs(g)
    if not 1 <= i <= rank - 1:
        raise ValueError(f"generator {g} out of range for rank {rank}")
    if g > 0:
        return {i: (i, i + 1, -i), i + 1: (i,)}
    return {i: (i + 1,), i + 1: (-(i + 1), i, i + 1)}


def apply_generator(w: FreeWord, g: int, length_cap: int | None = None) -> FreeWord:
    """Image of w under one signed braid generator, freely reduced."""
    table = _images(w.rank, g)
    out: list[int] = []
    for letter in w.letters:
        piece = table.get(abs(letter))
        if piece is None:
            piece = (letter,)
        elif letter < 0:
            piece = tuple(-p for p in reversed(piece))
        for p in piece:
            if out and out[-1] == -p:
                out.pop()
            else:
                out.append(p)
        if length_cap is not None and len(out) > length_cap + 2:
            raise Exhausted(f"image length exceeded cap {length_cap}")
    if length_cap is not None and len(out) > length_cap:
        raise Exhausted(f"image length exceeded cap {length_cap}")
    return FreeWord(w.rank, tuple(out))


def apply_braid(w: FreeWord, b: BraidWord, length_cap: int | None = None) -> FreeWord:
    """Fold the generator action over the braid word, left to right."""
    if w.rank != b.strands:
        raise ValueError(f"rank {w.rank} does not match strand count {b.strands}")
    for g in b.letters:
        w = apply_generator(w, g, length_cap=length_cap)
    return w


def loop_stretch(b: BraidWord, length_cap: int = DEFAULT_LENGTH_CAP) -> float:
    """log of the longest reduced basis-loop image under the braid.

    Raises Exhausted when an intermediate word outgrows ``length_cap``;
    callers then switch to the coordinate growth path.
    """
    longest = 1
    for i in range(1, b.strands + 1):
        w = apply_braid(FreeWord.basis(b.strands, i), b, length_cap=length_cap)
        longest = max(longest, len(w))
    return math.log(longest)
