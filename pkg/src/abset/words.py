"""Two-letter words as structured expressions, and their rotation orbits.

A word over the alphabet {x, y} is held as an immutable DAG of atoms,
concatenations and integer powers, so words with ~10**24 letters stay a
few nodes deep.  Letter counts and length are memoized eagerly at
construction; prefix counts descend the DAG instead of expanding it.

Evaluating a word at a rotation pair (alpha, beta) means: each x steps
the circle point by alpha, each y by beta.  The point reached after the
whole word is `evaluate_end`; the sampled trajectory is `orbit_points`.
"""

from fractions import Fraction
from typing import Iterable, Iterator, NamedTuple

from .exact import f64, mod1

# letters a word of this size is allowed to spell out explicitly
FLATTEN_LIMIT = 10 ** 6


class CountVector(NamedTuple):
    """Letter counts (#x, #y).  Tuple addition would concatenate, so the
    arithmetic lives in named methods."""

    x: int
    y: int

    def plus(self, other: "CountVector") -> "CountVector":
        return CountVector(self.x + other.x, self.y + other.y)

    def scaled(self, k: int) -> "CountVector":
        return CountVector(self.x * k, self.y * k)

    def dot(self, alpha: Fraction, beta: Fraction) -> Fraction:
        """Un-reduced end value x*alpha + y*beta."""
        return self.x * alpha + self.y * beta

    def total(self) -> int:
        return self.x + self.y


ZERO_COUNTS = CountVector(0, 0)


class WordExpr:
    """Immutable word expression node.

    kind is one of 'x', 'y', 'e' (empty), '.' (concat), '^' (power).
    Construct only through the module factories `concat` / `power` and
    the atoms X, Y, EMPTY; they keep counts and length coherent.
    """

    __slots__ = ("kind", "left", "right", "base", "exponent", "counts", "length")

    def __init__(self, kind, left=None, right=None, base=None, exponent=None,
                 counts=ZERO_COUNTS, length=0):
        self.kind = kind
        self.left = left
        self.right = right
        self.base = base
        self.exponent = exponent
        self.counts = counts
        self.length = length

    def __repr__(self):
        if self.length <= 40:
            return f"WordExpr({format_word(self)})"
        return f"WordExpr(kind={self.kind!r}, length={self.length})"


X = WordExpr("x", counts=CountVector(1, 0), length=1)
Y = WordExpr("y", counts=CountVector(0, 1), length=1)
EMPTY = WordExpr("e")


def concat(a: WordExpr, b: WordExpr) -> WordExpr:
    """Word a followed by word b."""
    if a is EMPTY:
        return b
    if b is EMPTY:
        return a
    return WordExpr(".", left=a, right=b,
                    counts=a.counts.plus(b.counts),
                    length=a.length + b.length)


def power(w: WordExpr, k: int) -> WordExpr:
    """w repeated k times, k >= 0.  power(w, 0) is the empty word."""
    if k < 0:
        raise ValueError("power needs a non-negative exponent")
    if k == 0 or w is EMPTY:
        return EMPTY
    if k == 1:
        return w
    if w.kind == "^":  # collapse nested powers; counts are unchanged
        return power(w.base, w.exponent * k)
    return WordExpr("^", base=w, exponent=k,
                    counts=w.counts.scaled(k),
                    length=w.length * k)


def block(a: int, b: int) -> WordExpr:
    """Convenience run builder x^a y^b."""
    return concat(power(X, a), power(Y, b))


def prefix_counts(w: WordExpr, j: int) -> CountVector:
    """Letter counts of the first j letters, 0 <= j <= |w|.

    Runs in O(depth * log exponent): concat branches once on the left
    length, power splits j by divmod on the base length.
    """
    if not 0 <= j <= w.length:
        raise ValueError(f"prefix length {j} outside [0, {w.length}]")
    cx = cy = 0
    node = w
    while j > 0:
        kind = node.kind
        if kind == "x":
            cx += 1
            break
        if kind == "y":
            cy += 1
            break
        if kind == ".":
            ll = node.left.length
            if j <= ll:
                node = node.left
            else:
                c = node.left.counts
                cx += c.x
                cy += c.y
                j -= ll
                node = node.right
            continue
        if kind == "^":
            q, j = divmod(j, node.base.length)
            c = node.base.counts
            cx += c.x * q
            cy += c.y * q
            node = node.base
            continue
        raise AssertionError(f"unreachable kind {kind!r}")
    return CountVector(cx, cy)


def letters(w: WordExpr) -> Iterator[str]:
    """Yield the letters of w left to right, lazily.

    Works on words of any size; the caller bounds how much it consumes.
    """
    stack = [(w, 1)]
    while stack:
        node, reps = stack.pop()
        kind = node.kind
        if kind == "e":
            continue
        if kind in ("x", "y"):
            for _ in range(reps):
                yield kind
            continue
        if reps > 1:
            stack.append((node, reps - 1))
        if kind == ".":
            stack.append((node.right, 1))
            stack.append((node.left, 1))
        elif kind == "^":
            stack.append((node.base, node.exponent))
        else:
            raise AssertionError(f"unreachable kind {kind!r}")


def to_string(w: WordExpr) -> str:
    """Spell the word out, for debugging small words only."""
    if w.length > FLATTEN_LIMIT:
        raise ValueError(f"refusing to flatten a word of length {w.length}")
    return "".join(letters(w))


def format_word(w: WordExpr) -> str:
    """Serialize to the grammar:  x | y | (E E) | (E ^ k).  Empty is ()."""
    kind = w.kind
    if kind == "x" or kind == "y":
        return kind
    if kind == "e":
        return "()"
    if kind == ".":
        return f"({format_word(w.left)} {format_word(w.right)})"
    if kind == "^":
        return f"({format_word(w.base)} ^ {w.exponent})"
    raise AssertionError(f"unreachable kind {kind!r}")


def parse_word(text: str) -> WordExpr:
    """Parse the `format_word` grammar back into a WordExpr."""
    tokens = text.replace("(", " ( ").replace(")", " ) ").split()
    pos = 0

    def parse() -> WordExpr:
        nonlocal pos
        if pos >= len(tokens):
            raise ValueError("unexpected end of word expression")
        tok = tokens[pos]
        pos += 1
        if tok == "x":
            return X
        if tok == "y":
            return Y
        if tok != "(":
            raise ValueError(f"unexpected token {tok!r}")
        if pos < len(tokens) and tokens[pos] == ")":
            pos += 1
            return EMPTY
        first = parse()
        if pos < len(tokens) and tokens[pos] == "^":
            pos += 1
            if pos >= len(tokens):
                raise ValueError("missing exponent")
            k = int(tokens[pos])
            pos += 1
            if pos >= len(tokens) or tokens[pos] != ")":
                raise ValueError("missing ) after exponent")
            pos += 1
            return power(first, k)
        second = parse()
        if pos >= len(tokens) or tokens[pos] != ")":
            raise ValueError("missing ) after concatenation")
        pos += 1
        return concat(first, second)

    out = parse()
    if pos != len(tokens):
        raise ValueError(f"trailing tokens {' '.join(tokens[pos:])!r}")
    return out


def evaluate_end(w: WordExpr, alpha: Fraction, beta: Fraction) -> Fraction:
    """Point of the circle reached after the whole word, in [0, 1)."""
    return mod1(w.counts.dot(Fraction(alpha), Fraction(beta)))


class OrbitSample:
    """A finite sampled trajectory: (time index, circle point) pairs.

    Built either in time order (indices strictly increasing, the default
    contract) or by `sorted_on_circle`, where entries are ordered by point
    value, deduplicated, and each index records the first visit time.
    """

    __slots__ = ("entries", "ordering")

    def __init__(self, entries, ordering: str = "time"):
        entries = tuple((int(i), mod1(p)) for i, p in entries)
        if ordering == "time":
            for (i0, _), (i1, _) in zip(entries, entries[1:]):
                if i1 <= i0:
                    raise ValueError("time indices must be strictly increasing")
        elif ordering == "circle":
            for (_, p0), (_, p1) in zip(entries, entries[1:]):
                if p1 <= p0:
                    raise ValueError("circle ordering must be strictly increasing")
        else:
            raise ValueError(f"unknown ordering {ordering!r}")
        self.entries = entries
        self.ordering = ordering

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def points(self):
        return [p for _, p in self.entries]

    def indices(self):
        return [i for i, _ in self.entries]

    def sorted_on_circle(self) -> "OrbitSample":
        """Deduplicate by point value; keep the earliest index per point."""
        first = {}
        for i, p in self.entries:
            if p not in first:
                first[p] = i
        ordered = sorted(first.items())  # by point value
        return OrbitSample([(i, p) for p, i in ordered], ordering="circle")

    def csv_rows(self):
        """Rows (index, numerator, denominator, decimal64) for serialization."""
        return [(i, str(p.numerator), str(p.denominator), f64(p))
                for i, p in self.entries]


def orbit_points(w: WordExpr, alpha, beta, indices: Iterable[int]) -> OrbitSample:
    """Sample the trajectory of w at the given strictly increasing time
    indices (0 = starting point, |w| = end)."""
    alpha = Fraction(alpha)
    beta = Fraction(beta)
    entries = []
    for j in indices:
        c = prefix_counts(w, j)
        entries.append((j, mod1(c.dot(alpha, beta))))
    return OrbitSample(entries)
