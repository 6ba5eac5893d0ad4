"""Symbolic sets of positive integer time indices.

Components are intervals, finite sets, strided block patterns, and
nested periodic blocks (a block repeated along several layers of
periods, as produced by recursively substituted words).  Membership and
counting are exact; unions assume pairwise-disjoint components, which is
what the construction-produced sets guarantee.

Sweep-based operations (member iteration, longest complement run) are
bounded by SWEEP_LIMIT because these sets routinely describe horizons
around 10**24 indices.
"""

from fractions import Fraction
from typing import Iterator, Optional, Sequence, Tuple

SWEEP_LIMIT = 10 ** 6


class _Interval:
    __slots__ = ("a", "b")

    def __init__(self, a: int, b: int):
        if a < 1 or b < a:
            raise ValueError(f"bad interval [{a}, {b}]")
        self.a = a
        self.b = b

    def contains(self, j: int) -> bool:
        return self.a <= j <= self.b

    def count_up_to(self, h: int) -> int:
        return max(0, min(self.b, h) - self.a + 1)

    def describe(self):
        return ("interval", self.a, self.b)


class _Finite:
    __slots__ = ("members",)

    def __init__(self, members):
        ms = frozenset(int(m) for m in members)
        if any(m < 1 for m in ms):
            raise ValueError("finite components hold indices >= 1")
        self.members = ms

    def contains(self, j: int) -> bool:
        return j in self.members

    def count_up_to(self, h: int) -> int:
        return sum(1 for m in self.members if m <= h)

    def describe(self):
        return ("finite", tuple(sorted(self.members)))


class _Strided:
    """Blocks of block_len consecutive indices starting at offset,
    offset+period, ... for reps repetitions (None = unbounded)."""

    __slots__ = ("offset", "period", "block_len", "reps")

    def __init__(self, offset: int, period: int, block_len: int, reps: Optional[int]):
        if offset < 1 or period < 1 or not 1 <= block_len <= period:
            raise ValueError("bad strided pattern")
        if reps is not None and reps < 0:
            raise ValueError("bad repetition count")
        self.offset = offset
        self.period = period
        self.block_len = block_len
        self.reps = reps

    def contains(self, j: int) -> bool:
        if j < self.offset:
            return False
        q, r = divmod(j - self.offset, self.period)
        if self.reps is not None and q >= self.reps:
            return False
        return r < self.block_len

    def count_up_to(self, h: int) -> int:
        if h < self.offset:
            return 0
        q, r = divmod(h - self.offset, self.period)
        if self.reps is not None and q >= self.reps:
            return self.reps * self.block_len
        return q * self.block_len + min(r + 1, self.block_len)

    def describe(self):
        return ("strided", self.offset, self.period, self.block_len, self.reps)


class _NestedBlocks:
    """One block of block_len letters sitting at 0-based offset `origin`
    inside an innermost unit, replicated along nested layers.

    layers are (period, count) pairs, outermost first: a 0-based position
    p belongs iff at every layer p = q*period + r with q < count, and the
    final remainder lands inside [origin, origin + block_len).
    Index j (1-based) maps to position p = j - 1.
    """

    __slots__ = ("origin", "block_len", "layers", "_unit_counts")

    def __init__(self, origin: int, block_len: int,
                 layers: Sequence[Tuple[int, int]]):
        if origin < 0 or block_len < 1:
            raise ValueError("bad nested block")
        layers = tuple((int(p), int(c)) for p, c in layers)
        span = origin + block_len
        for period, count in reversed(layers):
            if period < span or count < 1:
                raise ValueError("layer period shorter than its content")
            span = period * count  # content that must fit in the next layer out
        self.origin = origin
        self.block_len = block_len
        self.layers = layers
        # members inside one full unit at each depth, innermost first
        counts = [block_len]
        for period, count in reversed(layers):
            counts.append(counts[-1] * count)
        self._unit_counts = counts[::-1]  # [full at depth 0, ..., block_len]

    def contains(self, j: int) -> bool:
        p = j - 1
        if p < 0:
            return False
        for period, count in self.layers:
            q, p = divmod(p, period)
            if q >= count:
                return False
        return self.origin <= p < self.origin + self.block_len

    def count_up_to(self, h: int) -> int:
        return self._count_positions(h)  # positions 0..h-1 == indices 1..h

    def _count_positions(self, limit: int, depth: int = 0) -> int:
        """Members with 0-based position < limit, below layer `depth`."""
        if limit <= 0:
            return 0
        if depth == len(self.layers):
            return max(0, min(limit, self.origin + self.block_len) - self.origin)
        period, count = self.layers[depth]
        full = min(limit // period, count)
        res = full * self._unit_counts[depth + 1]
        if full < count:
            res += self._count_positions(limit - full * period, depth + 1)
        return res

    def describe(self):
        return ("nested_blocks", self.origin, self.block_len, self.layers)


class IndexSet:
    """Union of pairwise-disjoint components.  Factories below are the
    supported construction paths."""

    __slots__ = ("components",)

    def __init__(self, components=()):
        self.components = tuple(components)

    @classmethod
    def empty(cls) -> "IndexSet":
        return cls()

    @classmethod
    def interval(cls, a: int, b: int) -> "IndexSet":
        return cls([_Interval(a, b)])

    @classmethod
    def finite(cls, members) -> "IndexSet":
        return cls([_Finite(members)])

    @classmethod
    def strided(cls, offset: int, period: int, block_len: int = 1,
                reps: Optional[int] = None) -> "IndexSet":
        return cls([_Strided(offset, period, block_len, reps)])

    @classmethod
    def multiples_of(cls, k: int) -> "IndexSet":
        return cls.strided(offset=k, period=k, block_len=1, reps=None)

    @classmethod
    def nested_blocks(cls, origin: int, block_len: int,
                      layers: Sequence[Tuple[int, int]]) -> "IndexSet":
        return cls([_NestedBlocks(origin, block_len, layers)])

    @staticmethod
    def union(*sets: "IndexSet") -> "IndexSet":
        """Union of sets the caller vouches are pairwise disjoint; counts
        are additive under that assumption."""
        comps = []
        for s in sets:
            comps.extend(s.components)
        return IndexSet(comps)

    def is_empty_symbolically(self) -> bool:
        return not self.components

    def contains(self, j: int) -> bool:
        if j < 1:
            return False
        return any(c.contains(j) for c in self.components)

    __contains__ = contains

    def count_up_to(self, h: int) -> int:
        """|set ∩ [1, h]|, exact, assuming disjoint components."""
        if h < 1:
            return 0
        return sum(c.count_up_to(h) for c in self.components)

    def density_up_to(self, h: int) -> Fraction:
        if h < 1:
            raise ValueError("density needs a horizon >= 1")
        return Fraction(self.count_up_to(h), h)

    def iter_members(self, limit: int) -> Iterator[int]:
        """Ascending members <= limit; sweep-bounded."""
        if limit > SWEEP_LIMIT:
            raise ValueError(f"member sweep capped at {SWEEP_LIMIT}; got {limit}")
        for j in range(1, limit + 1):
            if self.contains(j):
                yield j

    def describe(self):
        """Stable structural description for reports."""
        return tuple(c.describe() for c in self.components)


def longest_complement_run(s: IndexSet, horizon: int) -> Tuple[int, int]:
    """Longest run of consecutive indices in [1, horizon] missing from s.

    Returns (start, length); ties resolve to the smallest start.  The
    whole range counts as one run when s is empty there.  Sweep-bounded.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    if horizon > SWEEP_LIMIT:
        raise ValueError(f"complement sweep capped at {SWEEP_LIMIT}; got {horizon}")
    best_start, best_len = 1, 0
    run_start, run_len = 1, 0
    for j in range(1, horizon + 1):
        if s.contains(j):
            run_len = 0
            run_start = j + 1
        else:
            run_len += 1
            if run_len > best_len:
                best_start, best_len = run_start, run_len
    if best_len == 0:
        # complement empty in range; report the empty run at the front
        return (1, 0)
    return (best_start, best_len)
