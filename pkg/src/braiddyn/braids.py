"""Word algebra for the Artin braid group B_n and its pure-braid subgroup.

A braid word is a sequence of signed generator indices: the integer ``+i``
stands for the standard generator sigma_i (1 <= i <= n-1) and ``-i`` for its
inverse.  Words are read left to right, so concatenation matches the cocycle
composition order used by the orbit-braid extractor: the braid of two
consecutive time blocks is the word of the first block followed by the word
of the second.

Positions and strand labels are 1-based throughout.  The permutation of a
word maps *positions* to the label of the strand that ends there, i.e.
``images[k]`` is the strand occupying position k at the end of the braid.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field

__all__ = [
    "BraidWord",
    "BraidError",
    "Exhausted",
    "compose",
    "inverse",
    "free_cancel",
    "permutation",
    "is_pure",
    "exponent_sum",
    "linking_matrix",
    "geodesic_length",
    "word_length_bounds",
    "random_word",
]


class BraidError(ValueError):
    """Raised on malformed words or incompatible strand counts."""


class Exhausted(Exception):
    """A budgeted exact search ran out of budget before completing."""


@dataclass(frozen=True)
class BraidWord:
    """A word in the generators of B_n; the empty word is the identity."""

    strands: int
    letters: tuple[int, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.strands < 1:
            raise BraidError(f"strand count must be >= 1, got {self.strands}")
        object.__setattr__(self, "letters", tuple(int(g) for g in self.letters))
        for g in self.letters:
            if g == 0 or abs(g) > self.strands - 1:
                raise BraidError(
                    f"letter {g} out of range for {self.strands} strands"
                )

    def __len__(self) -> int:
        return len(self.letters)

    def __mul__(self, other: "BraidWord") -> "BraidWord":
        return compose(self, other)

    def to_json(self) -> str:
        return json.dumps({"strands": self.strands, "letters": list(self.letters)})

    @classmethod
    def from_json(cls, text: str) -> "BraidWord":
        data = json.loads(text)
        return cls(data["strands"], tuple(data["letters"]))

    @classmethod
    def identity(cls, strands: int) -> "BraidWord":
        return cls(strands, ())


def compose(a: BraidWord, b: BraidWord) -> BraidWord:
    """Concatenate two words on the same strand count."""
    if a.strands != b.strands:
        raise BraidError(f"strand counts differ: {a.strands} != {b.strands}")
    return BraidWord(a.strands, a.letters + b.letters)


def inverse(a: BraidWord) -> BraidWord:
    """Reverse the word and flip every sign."""
    return BraidWord(a.strands, tuple(-g for g in reversed(a.letters)))


def free_cancel(a: BraidWord) -> BraidWord:
    """Delete adjacent sigma_i sigma_i^-1 pairs until none remain."""
    out: list[int] = []
    for g in a.letters:
        if out and out[-1] == -g:
            out.pop()
        else:
            out.append(g)
    return BraidWord(a.strands, tuple(out))


def permutation(a: BraidWord) -> tuple[int, ...]:
    """Strand occupying each final position; sigma_i acts as (i, i+1)."""
    occ = list(range(1, a.strands + 1))
    for g in a.letters:
        i = abs(g) - 1
        occ[i], occ[i + 1] = occ[i + 1], occ[i]
    return tuple(occ)


def is_pure(a: BraidWord) -> bool:
    """True iff every strand returns to its starting position."""
    return permutation(a) == tuple(range(1, a.strands + 1))


def exponent_sum(a: BraidWord) -> int:
    """Sum of letter signs; invariant under the braid relations."""
    return sum(1 if g > 0 else -1 for g in a.letters)


def linking_matrix(a: BraidWord) -> list[list[int]]:
    """Pairwise linking numbers of a pure braid.

    Entry (i, j) is half the signed count of crossings between the strands
    labelled i and j.  Each letter crosses exactly one pair of strands, so
    the matrix entries sum against word length: 2*|lk(i,j)| <= L(a).
    """
    if not is_pure(a):
        raise BraidError("linking_matrix requires a pure braid")
    n = a.strands
    counts = [[0] * n for _ in range(n)]
    occ = list(range(n))
    for g in a.letters:
        k = abs(g) - 1
        u, v = occ[k], occ[k + 1]
        s = 1 if g > 0 else -1
        counts[u][v] += s
        counts[v][u] += s
        occ[k], occ[k + 1] = occ[k + 1], occ[k]
    for i in range(n):
        for j in range(n):
            if counts[i][j] % 2 != 0:
                raise BraidError("odd crossing count on a pure braid")
            counts[i][j] //= 2
    return counts


def _max_abs_linking(a: BraidWord) -> int:
    lk = linking_matrix(a)
    n = a.strands
    best = 0
    for i in range(n):
        for j in range(i + 1, n):
            best = max(best, abs(lk[i][j]))
    return best


def geodesic_length(a: BraidWord, budget: int = 200_000) -> int:
    """Exact generator-length of the braid, by breadth-first search.

    Explores the Cayley graph of B_n with generators sigma_i^{+-1} outward
    from the identity, canonicalising visited nodes with the left-greedy
    normal form, until the class of ``a`` is reached.  Raises Exhausted once
    more than ``budget`` nodes have been visited, in which case callers fall
    back to word_length_bounds.
    """
    from .normalform import normal_form, nf_mul_gen

    target = normal_form(a)
    n = a.strands
    ident = normal_form(BraidWord(n, ()))
    if target == ident:
        return 0
    gens = [g for i in range(1, n) for g in (i, -i)]
    seen = {ident}
    frontier = deque([(ident, 0)])
    while frontier:
        node, dist = frontier.popleft()
        for g in gens:
            nxt = nf_mul_gen(n, node, g)
            if nxt == target:
                return dist + 1
            if nxt not in seen:
                if len(seen) >= budget:
                    raise Exhausted(f"geodesic search exceeded {budget} nodes")
                seen.add(nxt)
                frontier.append((nxt, dist + 1))
    raise BraidError("search space exhausted without reaching target")  # pragma: no cover


def _rewrite_neighbours(word: tuple[int, ...]) -> list[tuple[int, ...]]:
    """Length-preserving rewrites: commutations and triple shuffles."""
    out = []
    for k in range(len(word) - 1):
        g, h = word[k], word[k + 1]
        if abs(abs(g) - abs(h)) >= 2:
            out.append(word[:k] + (h, g) + word[k + 2 :])
    for k in range(len(word) - 2):
        g, h, f = word[k], word[k + 1], word[k + 2]
        # sigma_i sigma_j sigma_i -> sigma_j sigma_i sigma_j with matching signs
        if g == f and abs(abs(g) - abs(h)) == 1 and (g > 0) == (h > 0):
            out.append(word[:k] + (h, g, h) + word[k + 3 :])
        # mixed form sigma_i sigma_j sigma_i^-1 -> sigma_j^-1 sigma_i sigma_j
        if g == -f and abs(abs(g) - abs(h)) == 1 and (g > 0) == (h > 0):
            out.append(word[:k] + (-h, g, h) + word[k + 3 :])
        # and its mirror sigma_i^-1 sigma_j sigma_i -> sigma_j sigma_i sigma_j^-1
        if g == -f and abs(abs(g) - abs(h)) == 1 and (f > 0) == (h > 0):
            out.append(word[:k] + (h, f, -h) + word[k + 3 :])
    return out


def word_length_bounds(a: BraidWord, rewrite_budget: int = 256) -> tuple[int, int]:
    """Cheap two-sided bounds on the geodesic length L(a).

    The lower bound combines the exponent sum with the pairwise linking
    numbers (each crossing of a strand pair consumes one letter).  The upper
    bound is the shortest word found by free cancellation plus a budgeted
    search over length-preserving relator rewrites that can expose new
    cancellations.
    """
    reduced = free_cancel(a)
    lower = abs(exponent_sum(reduced))
    if is_pure(reduced):
        lower = max(lower, 2 * _max_abs_linking(reduced))
    best = len(reduced)
    seen = {reduced.letters}
    frontier = deque([reduced.letters])
    while frontier and len(seen) < rewrite_budget:
        word = frontier.popleft()
        for cand in _rewrite_neighbours(word):
            cand = free_cancel(BraidWord(a.strands, cand)).letters
            if cand in seen:
                continue
            seen.add(cand)
            if len(cand) < best:
                best = len(cand)
            frontier.append(cand)
            if len(seen) >= rewrite_budget:
                break
    return lower, best


def random_word(rng, strands: int, length: int) -> BraidWord:
    """Uniform random word of the given length (test helper)."""
    gens = [g for i in range(1, strands) for g in (i, -i)]
    idx = rng.integers(0, len(gens), size=length)
    return BraidWord(strands, tuple(gens[int(k)] for k in idx))
