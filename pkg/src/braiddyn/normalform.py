"""Left-greedy normal form for braid words, used for equality testing.

Every braid has a unique decomposition D^p x_1 ... x_k where D is the
half-twist, each factor x_t is a permutation braid (neither trivial nor D),
and each adjacent pair is left-weighted: every generator that can start
x_{t+1} can also end x_t.  Two words represent the same braid iff they have
the same decomposition, which gives canonical dictionary keys for search.

Permutations are one-line tuples over 0..n-1 composed as functions,
(p*q)(j) = p(q(j)); a braid word read left to right maps to the product of
its transpositions read left to right under this convention.
"""

from __future__ import annotations

from .braids import BraidWord

__all__ = ["normal_form", "nf_mul_gen", "braid_equal"]

NormalForm = tuple[int, tuple[tuple[int, ...], ...]]

_RENORM: dict = {}
_MAX_PASSES = 10_000


def _identity(n: int) -> tuple[int, ...]:
    return tuple(range(n))


def _longest(n: int) -> tuple[int, ...]:
    return tuple(range(n - 1, -1, -1))


def _compose(p: tuple[int, ...], q: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(p[q[j]] for j in range(len(p)))


def _swap_positions(p: tuple[int, ...], s: int) -> tuple[int, ...]:
    out = list(p)
    out[s], out[s + 1] = out[s + 1], out[s]
    return tuple(out)


def _swap_values(p: tuple[int, ...], s: int) -> tuple[int, ...]:
    table = {s: s + 1, s + 1: s}
    return tuple(table.get(v, v) for v in p)


def _tau(p: tuple[int, ...]) -> tuple[int, ...]:
    # Conjugation by the half-twist: tau(x) = w0 x w0, an involution.
    n = len(p)
    return tuple(n - 1 - p[n - 1 - j] for j in range(n))


def _left_descents(p: tuple[int, ...]) -> list[int]:
    pos = [0] * len(p)
    for j, v in enumerate(p):
        pos[v] = j
    return [s for s in range(len(p) - 1) if pos[s] > pos[s + 1]]


def _right_descent_set(p: tuple[int, ...]) -> set[int]:
    return {s for s in range(len(p) - 1) if p[s] > p[s + 1]}


def _renorm_pair(x, y):
    """Left-weight the pair (x, y), transferring head letters of y into x."""
    key = (x, y)
    hit = _RENORM.get(key)
    if hit is not None:
        return hit
    cx, cy = x, y
    while True:
        rx = _right_descent_set(cx)
        move = [s for s in _left_descents(cy) if s not in rx]
        if not move:
            break
        s = move[0]
        cx = _swap_positions(cx, s)
        cy = _swap_values(cy, s)
    _RENORM[key] = (cx, cy)
    return cx, cy


def _normalize_factors(n: int, factors: list) -> tuple[int, tuple]:
    """Comb a factor list until left-weighted; return (delta shift, factors)."""
    ident = _identity(n)
    w0 = _longest(n)
    for _ in range(_MAX_PASSES):
        changed = False
        for t in range(len(factors) - 1):
            x, y = _renorm_pair(factors[t], factors[t + 1])
            if x != factors[t]:
                factors[t], factors[t + 1] = x, y
                changed = True
        if not changed:
            break
    else:  # pragma: no cover
        raise RuntimeError("normal form combing failed to converge")
    lead = 0
    while lead < len(factors) and factors[lead] == w0:
        lead += 1
    tail = len(factors)
    while tail > lead and factors[tail - 1] == ident:
        tail -= 1
    return lead, tuple(factors[lead:tail])


def normal_form(a: BraidWord) -> NormalForm:
    """Canonical (half-twist power, factor sequence) form of the word."""
    n = a.strands
    if n == 1:
        return (0, ())
    w0 = _longest(n)
    factors: list = []
    shifts: list[int] = []
    for g in a.letters:
        s = abs(g) - 1
        f = _swap_positions(_identity(n), s)
        if g > 0:
            factors.append(f)
            shifts.append(0)
        else:
            factors.append(_compose(w0, f))
            shifts.append(-1)
    # Push every half-twist power to the front, conjugating what it passes.
    power = 0
    for t in range(len(factors) - 1, -1, -1):
        if power % 2:
            factors[t] = _tau(factors[t])
        power += shifts[t]
    lead, normalized = _normalize_factors(n, factors)
    return (power + lead, normalized)


def nf_mul_gen(n: int, nf: NormalForm, g: int) -> NormalForm:
    """Normal form of (braid of nf) * sigma_g, for signed generator g."""
    power, factors = nf
    s = abs(g) - 1
    f = _swap_positions(_identity(n), s)
    if g > 0:
        work = list(factors) + [f]
    else:
        work = [_tau(x) for x in factors] + [_compose(_longest(n), f)]
        power -= 1
    lead, normalized = _normalize_factors(n, work)
    return (power + lead, normalized)


def braid_equal(a: BraidWord, b: BraidWord) -> bool:
    """Word-problem equality via normal forms."""
    if a.strands != b.strands:
        return False
    return normal_form(a) == normal_form(b)
