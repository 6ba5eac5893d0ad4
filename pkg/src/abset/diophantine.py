"""Simultaneous-approximation minima for a rotation pair, and the scans
built on them.

The basic object is delta_n = min ||a*alpha + b*beta|| over integer
pairs (a, b) >= 0 with a + b = n, together with the realizing vector
u_n.  An index n is *minimal* when delta_n improves on (or ties) every
earlier value.  On top of the minima sit four scans:

  * integer_ratio_scan: pairs of values whose ratio is within tolerance
    of an integer l must satisfy the structural lemma n_i | n_j and
    u_j = l * u_i; deviations are reported.
  * no_close_minima_check: indices k <= ceil(1/delta_n^s) with
    delta_k < delta_n^t must be multiples of each other with
    proportional values.
  * gap_dichotomy: pairwise distances on an orbit prefix either exceed
    delta_n^t or fall below delta_m / delta_n^s; nothing in between.
  * assouad_lower_probe: the localized covering case analysis behind
    the min(s/t, r/t, r) lower-bound exponent.

Precision discipline: irrational inputs are dyadic midpoint-plus-radius
values (ApproxReal).  Every comparison is certified only when the
midpoints differ by more than the summed radii times 2**GUARD_BITS;
anything closer is "unknown", which scans report and never resolve
silently.  Exact rationals ride the same code paths with radius zero,
where every comparison is decided.
"""

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, List, Optional, Sequence, Tuple, Union

import mpmath

from .errors import InsufficientPrecision, InvariantViolation, UsageError
from .exact import ceil_root_ratio, dec_sci, dist_to_int
from .index_sets import IndexSet
from .words import WordExpr, letters, parse_word

GUARD_BITS = 8
MIN_INPUT_BITS = 128            # coarser input radii are a usage error
DEFAULT_PREC = 256
DEFAULT_SCAN_CAP = 5000
DEFAULT_PAIR_BUDGET = 500_000
DEFAULT_SEP_BUDGET = 20_000
LOG_DIGITS = 12
DEC_PREC_BITS = 128

_ZERO = Fraction(0)
_ONE = Fraction(1)


# ---------------------------------------------------------------------------
# certified values


@dataclass(frozen=True)
class ApproxReal:
    """A real number known to lie in [mid - rad, mid + rad].

    mid and rad are exact rationals (dyadic in practice).  Arithmetic
    tracks the radius conservatively; nothing is ever rounded without
    widening rad to cover the rounding.
    """

    mid: Fraction
    rad: Fraction = _ZERO

    def __post_init__(self):
        object.__setattr__(self, "mid", Fraction(self.mid))
        object.__setattr__(self, "rad", Fraction(self.rad))
        if self.rad < 0:
            raise UsageError("ApproxReal radius must be nonnegative")

    @classmethod
    def exact(cls, value) -> "ApproxReal":
        return cls(Fraction(value), _ZERO)

    @classmethod
    def sqrt_of_int(cls, n: int, prec_bits: int) -> "ApproxReal":
        """sqrt(n) with radius 2**-(prec_bits+1)."""
        if n < 0:
            raise UsageError("sqrt of a negative integer")
        root = math.isqrt(n << (2 * prec_bits))
        half = Fraction(1, 1 << (prec_bits + 1))
        return cls(Fraction(2 * root + 1, 1 << (prec_bits + 1)), half)

    @property
    def lo(self) -> Fraction:
        return self.mid - self.rad

    @property
    def hi(self) -> Fraction:
        return self.mid + self.rad

    @property
    def is_exact(self) -> bool:
        return self.rad == 0

    def __add__(self, other) -> "ApproxReal":
        o = _as_value(other)
        return ApproxReal(self.mid + o.mid, self.rad + o.rad)

    def __sub__(self, other) -> "ApproxReal":
        o = _as_value(other)
        return ApproxReal(self.mid - o.mid, self.rad + o.rad)

    def __neg__(self) -> "ApproxReal":
        return ApproxReal(-self.mid, self.rad)

    def scaled(self, q) -> "ApproxReal":
        q = Fraction(q)
        return ApproxReal(self.mid * q, self.rad * abs(q))

    def times(self, other) -> "ApproxReal":
        o = _as_value(other)
        corners = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi]
        return _from_bounds(min(corners), max(corners))

    def pow_int(self, k: int) -> "ApproxReal":
        if k < 0:
            raise UsageError("pow_int needs k >= 0")
        if k == 0:
            return ApproxReal.exact(1)
        lo, hi = self.lo, self.hi
        if lo >= 0:
            return _from_bounds(lo ** k, hi ** k)
        if hi <= 0:
            if k % 2 == 0:
                return _from_bounds(hi ** k, lo ** k)
            return _from_bounds(lo ** k, hi ** k)
        if k % 2 == 0:
            return _from_bounds(_ZERO, max(lo ** k, hi ** k))
        return _from_bounds(lo ** k, hi ** k)

    def dist_to_nearest_int(self) -> "ApproxReal":
        # distance-to-Z is 1-Lipschitz, so the radius carries over
        return ApproxReal(dist_to_int(self.mid), self.rad)

    def shifted_mod1(self) -> "ApproxReal":
        """Translate the midpoint into [0, 1) by an exact integer."""
        return ApproxReal(self.mid - math.floor(self.mid), self.rad)

    def __str__(self):
        return f"{dec_sci(self.mid)} +- {dec_sci(self.rad)}" if self.rad else dec_sci(self.mid)


def _from_bounds(lo: Fraction, hi: Fraction) -> ApproxReal:
    return ApproxReal((lo + hi) / 2, (hi - lo) / 2)


def _as_value(x) -> ApproxReal:
    if isinstance(x, ApproxReal):
        return x
    return ApproxReal.exact(x)


def _abs_val(v: ApproxReal) -> ApproxReal:
    if v.lo >= 0:
        return v
    if v.hi <= 0:
        return -v
    return _from_bounds(_ZERO, max(-v.lo, v.hi))


def try_cmp(a, b) -> Optional[int]:
    """-1, 0, +1 when the order of a and b is certain, else None.

    With radius zero the comparison is exact.  Otherwise the midpoints
    must differ by more than the summed radii shifted by GUARD_BITS;
    margins inside the guard zone are deliberately reported as unknown.
    """
    d = _as_value(a) - _as_value(b)
    if d.rad == 0:
        return (d.mid > 0) - (d.mid < 0)
    if abs(d.mid) > d.rad * (1 << GUARD_BITS):
        return 1 if d.mid > 0 else -1
    return None


def cmp_certified(a, b, context: str = "compare") -> int:
    c = try_cmp(a, b)
    if c is None:
        d = _as_value(a) - _as_value(b)
        raise InsufficientPrecision(context, f"midpoint gap {dec_sci(abs(d.mid))} "
                                             f"within guard of radius {dec_sci(d.rad)}")
    return c


def margin_bits(a, b) -> Optional[int]:
    """floor(log2(|mid gap| / radius)) for a decided comparison; None when
    exact (infinite margin)."""
    d = _as_value(a) - _as_value(b)
    if d.rad == 0:
        return None
    if d.mid == 0:
        return 0
    q = abs(d.mid) / d.rad
    return q.numerator.bit_length() - q.denominator.bit_length()


def cmp_products(left: Sequence[Tuple[object, int]],
                 right: Sequence[Tuple[object, int]]) -> Optional[int]:
    """Certified comparison of two products of integer powers.

    Each side is a list of (value, exponent) factors.  Fractional-power
    threshold tests reduce to this form: d < delta**(p/q) iff
    d**q < delta**p for nonnegative operands.
    """
    def side(factors):
        acc = ApproxReal.exact(1)
        for base, k in factors:
            acc = acc.times(_as_value(base).pow_int(k))
        return acc
    return try_cmp(side(left), side(right))


# ---------------------------------------------------------------------------
# input values: rational +- sums of square roots

_TOKEN = re.compile(r"\s*(?:(?P<sign>[+-])|(?P<sqrt>sqrt\(\s*(?P<rad>\d+)\s*\))"
                    r"|(?P<dec>\d+\.\d+)|(?P<frac>\d+/\d+)|(?P<int>\d+)"
                    r"|(?P<star>\*)|(?P<bad>sqrt\([^)]*\)?|\S))")


@dataclass(frozen=True)
class RealValue:
    """rational + sum of coef * sqrt(radicand) with nonsquare radicands."""

    rational: Fraction = _ZERO
    surds: Tuple[Tuple[int, Fraction], ...] = ()

    @classmethod
    def from_fraction(cls, fr) -> "RealValue":
        return cls(Fraction(fr), ())

    @classmethod
    def sqrt(cls, n: int, coef=1) -> "RealValue":
        if n < 0:
            raise UsageError("sqrt of a negative integer")
        coef = Fraction(coef)
        root = math.isqrt(n)
        if root * root == n:
            return cls(coef * root, ())
        # pull out square factors so equal surds cancel exactly;
        # skipped for huge radicands where trial division would crawl
        if n <= 10**8:
            d = 2
            while d * d <= n:
                while n % (d * d) == 0:
                    n //= d * d
                    coef *= d
                d += 1
        return cls(_ZERO, ((n, coef),))

    def __add__(self, other: "RealValue") -> "RealValue":
        terms = dict(self.surds)
        for rad, c in other.surds:
            terms[rad] = terms.get(rad, _ZERO) + c
        surds = tuple(sorted((r, c) for r, c in terms.items() if c != 0))
        return RealValue(self.rational + other.rational, surds)

    def __neg__(self) -> "RealValue":
        return RealValue(-self.rational, tuple((r, -c) for r, c in self.surds))

    def __sub__(self, other: "RealValue") -> "RealValue":
        return self + (-other)

    @property
    def is_rational(self) -> bool:
        return not self.surds

    def as_fraction(self) -> Fraction:
        if self.surds:
            raise UsageError(f"{self} is not rational")
        return self.rational

    def approx(self, prec_bits: int = DEFAULT_PREC) -> ApproxReal:
        """Midpoint-radius value with radius below 2**-prec_bits."""
        head = sum(abs(c) for _, c in self.surds) + 1
        work = prec_bits + 8 + math.ceil(head).bit_length()
        acc = ApproxReal.exact(self.rational)
        for rad, c in self.surds:
            acc = acc + ApproxReal.sqrt_of_int(rad, work).scaled(c)
        return acc

    def __str__(self):
        pieces = []
        for rad, c in self.surds:
            mag = abs(c)
            body = f"sqrt({rad})" if mag == 1 else f"{mag}*sqrt({rad})"
            pieces.append(("-" if c < 0 else "+", body))
        if self.rational != 0 or not pieces:
            pieces.append(("-" if self.rational < 0 else "+", str(abs(self.rational))))
        sign, body = pieces[0]
        out = ("-" if sign == "-" else "") + body
        for sign, body in pieces[1:]:
            out += f" {sign} {body}"
        return out


def parse_value(text: str) -> RealValue:
    """Parse a signed sum of sqrt(k), rationals p/q and decimal literals.

    An optional `coef*` prefix is accepted before sqrt so that rendered
    values round-trip.  Unknown tokens are named in the error.
    """
    out = RealValue()
    pos = 0
    expect_term = True
    have_sign = False
    sign = 1
    pending_coef: Optional[Fraction] = None
    n_terms = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        pos = m.end()
        if m.group("bad"):
            raise UsageError(f"unexpected token {m.group('bad')!r} in value expression")
        if m.group("sign"):
            if have_sign or pending_coef is not None:
                raise UsageError(f"unexpected token {m.group('sign')!r} in value expression")
            expect_term = True
            sign = 1 if m.group("sign") == "+" else -1
            have_sign = True
            continue
        if m.group("star"):
            raise UsageError("unexpected token '*' in value expression")
        if not expect_term:
            raise UsageError(f"missing '+' or '-' before {m.group(0).strip()!r}")
        if m.group("sqrt"):
            coef = pending_coef if pending_coef is not None else _ONE
            out = out + RealValue.sqrt(int(m.group("rad")), sign * coef)
            pending_coef = None
        else:
            tok = m.group("dec") or m.group("frac") or m.group("int")
            if pending_coef is not None:
                raise UsageError("a '*' coefficient must be followed by sqrt(...)")
            value = Fraction(tok)
            nxt = _TOKEN.match(text, pos)
            if nxt is not None and nxt.group("star"):
                pos = nxt.end()
                pending_coef = value
                continue
            out = out + RealValue.from_fraction(sign * value)
        expect_term = False
        have_sign = False
        sign = 1
        n_terms += 1
    if pending_coef is not None:
        raise UsageError("dangling '*' without a sqrt term")
    if expect_term:
        raise UsageError("empty value expression" if n_terms == 0
                         else "trailing sign in value expression")
    return out


# ---------------------------------------------------------------------------
# minima of ||a*alpha + b*beta|| along a + b = n


@dataclass(frozen=True)
class MinimaRecord:
    n: int
    delta: Union[Fraction, ApproxReal]
    u: Tuple[int, int]
    minimal: bool

    def interval(self) -> Tuple[Fraction, Fraction]:
        if isinstance(self.delta, ApproxReal):
            return (self.delta.lo, self.delta.hi)
        return (self.delta, self.delta)


class _MinimaData:
    """Internal scan result: records plus the raw dyadic units."""

    __slots__ = ("kind", "records", "units", "scale_bits", "zero_at")

    def __init__(self, kind, records, units, scale_bits, zero_at):
        self.kind = kind                # "exact" | "dyadic"
        self.records = records          # List[MinimaRecord]
        self.units = units              # List[(d_units, rad_units)] | None
        self.scale_bits = scale_bits    # P with denominator 2**P | None
        self.zero_at = zero_at          # n of an exact zero, or None


def _resolve_input(value, prec_bits: int):
    """-> Fraction (exact) or ApproxReal."""
    if isinstance(value, str):
        value = parse_value(value)
    if isinstance(value, RealValue):
        return value.as_fraction() if value.is_rational else value.approx(prec_bits)
    if isinstance(value, ApproxReal):
        return Fraction(value.mid) if value.rad == 0 else value
    return Fraction(value)


def _resolve_pair(alpha, beta, prec_bits: int):
    a = _resolve_input(alpha, prec_bits)
    b = _resolve_input(beta, prec_bits)
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return "exact", a, b, None
    # dyadic grid: both on a common denominator 2**P
    p = prec_bits + 16
    cap = Fraction(1, 1 << MIN_INPUT_BITS)
    units = []
    for x in (a, b):
        x = _as_value(x)
        if x.rad > cap:
            raise UsageError(f"input radius {dec_sci(x.rad)} is coarser than "
                             f"the required {MIN_INPUT_BITS} bits")
        num = x.mid.numerator << p
        u = (num + (x.mid.denominator >> 1)) // x.mid.denominator
        slack = Fraction(x.rad) * (1 << p) + 1
        units.append((u, math.ceil(slack)))
    return "dyadic", units[0], units[1], p


def _minima_exact(alpha: Fraction, beta: Fraction, n_max: int) -> _MinimaData:
    records: List[MinimaRecord] = []
    best: Optional[Fraction] = None
    zero_at = None
    step = alpha - beta
    for n in range(1, n_max + 1):
        val = n * beta
        d_min = dist_to_int(val)
        a_min = 0
        for a in range(1, n + 1):
            val += step
            d = dist_to_int(val)
            if d < d_min:                      # strict: ties keep the smallest a
                d_min, a_min = d, a
        minimal = best is None or d_min <= best
        records.append(MinimaRecord(n, d_min, (a_min, n - a_min), minimal))
        if minimal:
            best = d_min
        if d_min == 0:
            zero_at = n
            break
    return _MinimaData("exact", records, None, None, zero_at)


def _minima_dyadic(ua: Tuple[int, int], ub: Tuple[int, int], p: int,
                   n_max: int) -> _MinimaData:
    one = 1 << p
    half = one >> 1
    a_mid, a_rad = ua
    b_mid, b_rad = ub
    step = a_mid - b_mid
    records: List[MinimaRecord] = []
    units: List[Tuple[int, int]] = []
    best: Optional[Tuple[int, int]] = None      # (d_units, rad_units)
    for n in range(1, n_max + 1):
        val = n * b_mid
        d_min = None
        a_min = 0
        dists = []
        for a in range(0, n + 1):
            if a:
                val += step
            r = val % one
            d = r if r <= half else one - r
            dists.append(d)
            if d_min is None or d < d_min:
                d_min, a_min = d, a
        def rad_of(a):
            return (n - a) * b_rad + a * a_rad
        rad_min = rad_of(a_min)
        for a, d in enumerate(dists):
            if a == a_min:
                continue
            if d - d_min <= (rad_min + rad_of(a)) << GUARD_BITS:
                raise InsufficientPrecision(
                    "minima-argmin",
                    f"n={n}: candidates a={a_min} and a={a} are not separable")
        if best is None:
            minimal = True
        else:
            gap = best[0] - d_min
            if abs(gap) <= (best[1] + rad_min) << GUARD_BITS:
                raise InsufficientPrecision(
                    "minima-flag", f"n={n}: tie with the running minimum")
            minimal = gap > 0
        records.append(MinimaRecord(
            n, ApproxReal(Fraction(d_min, one), Fraction(rad_min, one)),
            (a_min, n - a_min), minimal))
        units.append((d_min, rad_min))
        if minimal:
            best = (d_min, rad_min)
    return _MinimaData("dyadic", records, units, p, None)


def _minima_impl(alpha, beta, n_max: int, prec_bits: int) -> _MinimaData:
    if n_max < 1:
        raise UsageError("minima scan needs n_max >= 1")
    kind, a, b, p = _resolve_pair(alpha, beta, prec_bits)
    if kind == "exact":
        return _minima_exact(a, b, n_max)
    return _minima_dyadic(a, b, p, n_max)


def delta_n(alpha, beta, n: int, prec_bits: int = DEFAULT_PREC) -> MinimaRecord:
    """The n-th minimum with its realizing vector and minimality flag."""
    if n < 1:
        raise UsageError("delta_n needs n >= 1")
    data = _minima_impl(alpha, beta, n, prec_bits)
    if len(data.records) < n:        # an exact zero ended the scan early
        rec = data.records[-1]
        raise UsageError(f"minima sequence terminates at n={rec.n} with value 0")
    return data.records[n - 1]


def minima_sequence(alpha, beta, n_max: int,
                    prec_bits: int = DEFAULT_PREC) -> List[MinimaRecord]:
    """Records for n = 1..n_max; stops early at an exact zero."""
    return _minima_impl(alpha, beta, n_max, prec_bits).records


def scan_horizon(delta, s: Fraction) -> int:
    """N = ceil((1/delta)**s) for a certified-positive minimum."""
    s = Fraction(s)
    p, q = s.numerator, s.denominator
    if isinstance(delta, Fraction):
        if delta <= 0:
            raise UsageError("scan horizon needs delta > 0")
        return ceil_root_ratio(delta.denominator ** p, delta.numerator ** p, q)
    lo, hi = delta.lo, delta.hi
    if lo <= 0:
        raise InsufficientPrecision("scan-horizon", "minimum not certified positive")
    n_hi = ceil_root_ratio(lo.denominator ** p, lo.numerator ** p, q)
    n_lo = ceil_root_ratio(hi.denominator ** p, hi.numerator ** p, q)
    if n_lo != n_hi:
        raise InsufficientPrecision("scan-horizon", f"N lies in [{n_lo}, {n_hi}]")
    return n_hi


# ---------------------------------------------------------------------------
# probe parameters


@dataclass(frozen=True)
class ProbeParams:
    s: Fraction = Fraction(49, 100)
    t: Fraction = Fraction(2)
    r: Fraction = Fraction(1, 2)

    def __post_init__(self):
        object.__setattr__(self, "s", Fraction(self.s))
        object.__setattr__(self, "t", Fraction(self.t))
        object.__setattr__(self, "r", Fraction(self.r))
        if not 0 < self.s < Fraction(1, 2):
            raise UsageError(f"need 0 < s < 1/2, got s={self.s}")
        if not self.t > 1 + 2 * self.s:
            raise UsageError(f"need t > 1 + 2s, got t={self.t} with s={self.s}")
        if not 0 < self.r < 1:
            raise UsageError(f"need 0 < r < 1, got r={self.r}")

    @property
    def exponent_at_params(self) -> Fraction:
        return min(self.s / self.t, self.r / self.t, self.r)

    @property
    def implied_exponent_limit(self) -> Fraction:
        # supremum of min(s/t, r/t, r) over 0 < s < 1/2, t > 1+2s at this r:
        # approach s -> 1/2, t -> 2
        return min(Fraction(1, 4), self.r / 2)


# ---------------------------------------------------------------------------
# integer-ratio scan


@dataclass(frozen=True)
class RatioPair:
    i: int
    j: int
    ell: int
    divisibility_ok: bool
    vector_ok: bool


@dataclass(frozen=True)
class RatioViolation:
    i: int
    j: int
    ell: int
    reason: str                  # "divisibility" | "vector-multiple"
    u_i: Tuple[int, int]
    u_j: Tuple[int, int]


@dataclass(frozen=True)
class RatioScanReport:
    n_max: int
    tol: Fraction
    records: Tuple[MinimaRecord, ...]
    qualifying: Tuple[RatioPair, ...]
    violations: Tuple[RatioViolation, ...]
    undecided: Tuple[Tuple[int, int], ...]
    pairs_examined: int
    zero_at: Optional[int]


# float prefilter: pairs whose ratio is farther than this from every
# integer cannot be within any tolerance below ~1e-12
_SCREEN = 1e-9


def primitive_decomposition(u: Tuple[int, int],
                            v: Tuple[int, int]) -> Tuple[Tuple[int, int], int, int]:
    """Common primitive vector g with u = a*g, v = b*g, for collinear u, v."""
    if u[0] * v[1] - u[1] * v[0] != 0:
        raise UsageError(f"vectors {u} and {v} are not collinear")
    base = u if u != (0, 0) else v
    if base == (0, 0):
        raise UsageError("both vectors are zero")
    g = math.gcd(abs(base[0]), abs(base[1]))
    prim = (base[0] // g, base[1] // g)
    if prim[0] < 0 or (prim[0] == 0 and prim[1] < 0):
        prim = (-prim[0], -prim[1])
    def coeff(w):
        if w == (0, 0):
            return 0
        return w[0] // prim[0] if prim[0] else w[1] // prim[1]
    a, b = coeff(u), coeff(v)
    if (a * prim[0], a * prim[1]) != u or (b * prim[0], b * prim[1]) != v:
        raise InvariantViolation("collinearity-decomposition",
                                 f"u={u} v={v} prim={prim}")
    return prim, a, b


def integer_ratio_scan(alpha, beta, n_max: int, tol=Fraction(1, 1 << 64),
                       prec_bits: int = DEFAULT_PREC) -> RatioScanReport:
    """Flag value pairs with a near-integer ratio and audit the lemma
    n_i | n_j, u_j = l * u_i on each; raw rational inputs may genuinely
    violate it and are reported, not raised."""
    tol = Fraction(tol)
    if tol <= 0:
        raise UsageError("tolerance must be positive")
    data = _minima_impl(alpha, beta, n_max, prec_bits)
    recs = data.records
    qualifying: List[RatioPair] = []
    violations: List[RatioViolation] = []
    undecided: List[Tuple[int, int]] = []
    pairs = 0

    def audit(ri: MinimaRecord, rj: MinimaRecord, ell: int):
        div_ok = rj.n % ri.n == 0
        vec = (ell * ri.u[0], ell * ri.u[1])
        vec_ok = rj.u == vec
        qualifying.append(RatioPair(ri.n, rj.n, ell, div_ok, vec_ok))
        if not div_ok:
            violations.append(RatioViolation(ri.n, rj.n, ell, "divisibility",
                                             ri.u, rj.u))
        if not vec_ok:
            violations.append(RatioViolation(ri.n, rj.n, ell, "vector-multiple",
                                             ri.u, rj.u))
        else:
            # second route to the same fact: common primitive direction
            _, a, b = primitive_decomposition(ri.u, rj.u)
            if b != ell * a:
                raise InvariantViolation("collinearity-decomposition",
                                         f"pair ({ri.n},{rj.n}): {b} != {ell}*{a}")

    if data.kind == "exact":
        for i in range(len(recs)):
            di = recs[i].delta
            if di == 0:
                continue
            for j in range(i + 1, len(recs)):
                dj = recs[j].delta
                pairs += 1
                ell = int((2 * dj + di) // (2 * di))       # nearest integer
                if ell < 1:
                    continue
                if abs(dj - ell * di) <= tol * di:
                    audit(recs[i], recs[j], ell)
    else:
        units = data.units
        one = 1 << data.scale_bits
        fl = [float(d) for d, _ in units]
        for i in range(len(recs)):
            du_i, ru_i = units[i]
            if du_i <= ru_i << GUARD_BITS:
                # sign of the base value itself is unclear; flagged as (n, 0)
                undecided.append((recs[i].n, 0))
                continue
            d_i = ApproxReal(Fraction(du_i, one), Fraction(ru_i, one))
            for j in range(i + 1, len(recs)):
                pairs += 1
                ratio = fl[j] / fl[i]
                ell = math.floor(ratio + 0.5)
                if ell < 1 or abs(ratio - ell) > _SCREEN:
                    continue
                du_j, ru_j = units[j]
                d_j = ApproxReal(Fraction(du_j, one), Fraction(ru_j, one))
                off = _abs_val(d_j - d_i.scaled(ell))
                c = try_cmp(off, d_i.scaled(tol))
                if c is None:
                    undecided.append((recs[i].n, recs[j].n))
                elif c <= 0:
                    audit(recs[i], recs[j], ell)
    return RatioScanReport(n_max, tol, tuple(recs), tuple(qualifying),
                           tuple(violations), tuple(undecided), pairs,
                           data.zero_at)


# ---------------------------------------------------------------------------
# close-minima audit


@dataclass(frozen=True)
class PairCheck:
    m: int
    k: int
    ell: Optional[int]
    divisibility_ok: bool
    value_consistent: Optional[bool]     # None: divisibility already failed
    margin_bits: Optional[int]


@dataclass(frozen=True)
class CloseMinimaVerdict:
    n: int
    horizon: int
    scanned_to: int
    partial: bool
    qualifying: Tuple[int, ...]
    undecided: Tuple[int, ...]
    pairs: Tuple[PairCheck, ...]
    violations: Tuple[PairCheck, ...]
    vacuous: bool
    consistent: bool


def no_close_minima_check(alpha, beta, params: ProbeParams, n: int,
                          prec_bits: int = DEFAULT_PREC,
                          scan_cap: int = DEFAULT_SCAN_CAP) -> CloseMinimaVerdict:
    """Indices k in (n, ceil(1/delta_n**s)] with delta_k < delta_n**t must
    be mutually divisible with proportional values."""
    base = _minima_impl(alpha, beta, n, prec_bits)
    if len(base.records) < n:
        raise UsageError(f"minima sequence terminates at "
                         f"n={base.records[-1].n} with value 0")
    rec_n = base.records[n - 1]
    if not rec_n.minimal:
        raise UsageError(f"delta at n={n} is not minimal")
    if isinstance(rec_n.delta, Fraction) and rec_n.delta == 0:
        raise UsageError("a zero minimum has no scan horizon")
    horizon = scan_horizon(rec_n.delta, params.s)
    scanned_to = min(horizon, n + scan_cap)
    data = _minima_impl(alpha, beta, scanned_to, prec_bits)
    recs = data.records
    scanned_to = min(scanned_to, len(recs))
    partial = scanned_to < horizon
    tp, tq = params.t.numerator, params.t.denominator
    d_n = recs[n - 1].delta

    qualifying: List[int] = []
    undecided: List[int] = []
    for k in range(n + 1, scanned_to + 1):
        c = cmp_products([(recs[k - 1].delta, tq)], [(d_n, tp)])
        if c is None:
            undecided.append(k)
        elif c < 0:
            qualifying.append(k)

    pairs: List[PairCheck] = []
    violations: List[PairCheck] = []
    for ai in range(len(qualifying)):
        for bi in range(ai + 1, len(qualifying)):
            m, k = qualifying[ai], qualifying[bi]
            div_ok = k % m == 0
            if not div_ok:
                check = PairCheck(m, k, None, False, None, None)
            else:
                ell = k // m
                d_m = _as_value(recs[m - 1].delta)
                d_k = _as_value(recs[k - 1].delta)
                target = d_m.scaled(ell)
                c = try_cmp(d_k, target)
                consistent = c == 0 if c is not None else True
                check = PairCheck(m, k, ell, True, consistent,
                                  margin_bits(d_k, target))
            pairs.append(check)
            if not check.divisibility_ok or check.value_consistent is False:
                violations.append(check)
    return CloseMinimaVerdict(n, horizon, scanned_to, partial,
                              tuple(qualifying), tuple(undecided),
                              tuple(pairs), tuple(violations),
                              vacuous=not qualifying,
                              consistent=not violations)


# ---------------------------------------------------------------------------
# orbits and the gap dichotomy


def orbit_of_word(word: Union[WordExpr, str], alpha, beta,
                  prec_bits: int = DEFAULT_PREC) -> List[Union[Fraction, ApproxReal]]:
    """Points t_1..t_|w| visited by the word, reduced mod 1.

    `word` may be a WordExpr, a plain string of x/y letters, or a string
    in the parenthesized grammar of `words.parse_word`.
    """
    if isinstance(word, str):
        if word and set(word) <= {"x", "y"}:
            seq: Iterator[str] = iter(word)
        else:
            try:
                seq = letters(parse_word(word))
            except ValueError as exc:
                raise UsageError(f"bad word expression: {exc}") from None
    else:
        seq = letters(word)
    kind, a, b, p = _resolve_pair(alpha, beta, prec_bits)
    out: List[Union[Fraction, ApproxReal]] = []
    if kind == "exact":
        val = _ZERO
        for ch in seq:
            val += a if ch == "x" else b
            val -= math.floor(val)
            out.append(val)
        return out
    one = 1 << p
    (a_mid, a_rad), (b_mid, b_rad) = a, b
    mid = 0
    rad = 0
    for ch in seq:
        mid += a_mid if ch == "x" else b_mid
        rad += a_rad if ch == "x" else b_rad
        mid %= one
        out.append(ApproxReal(Fraction(mid, one), Fraction(rad, one)))
    return out


def _point_units(points) -> Optional[Tuple[int, List[Tuple[int, int]]]]:
    """(P, [(mid_units, rad_units)]) when every point is dyadic, else None."""
    scale = 0
    for pt in points:
        v = _as_value(pt)
        for fr in (v.mid, v.rad):
            den = fr.denominator
            if den & (den - 1):
                return None
            scale = max(scale, den.bit_length() - 1)
    out = []
    for pt in points:
        v = _as_value(pt)
        out.append((v.mid.numerator << (scale - (v.mid.denominator.bit_length() - 1)),
                    v.rad.numerator << (scale - (v.rad.denominator.bit_length() - 1))))
    return scale, out


@dataclass(frozen=True)
class SeparationReport:
    pairs_checked: int
    violations: Tuple[Tuple[int, int], ...]
    undecided: int
    worst_margin_bits: Optional[int]


def orbit_separation_check(points, records: Sequence[MinimaRecord]) -> SeparationReport:
    """Audit d(t_i, t_j) >= delta_(j-i) over all pairs of orbit points.

    True for every genuine orbit of the pair behind `records`; a certified
    counterexample means the points do not belong to such an orbit.
    """
    n_pts = len(points)
    if n_pts < 2:
        return SeparationReport(0, (), 0, None)
    if len(records) < n_pts - 1:
        raise UsageError(f"need minima up to gap {n_pts - 1}, got {len(records)}")
    for g, rec in enumerate(records[:n_pts - 1], start=1):
        if rec.n != g:
            raise UsageError("minima records must cover gaps 1, 2, ... in order")

    pt_units = _point_units(points)
    rec_units = _point_units([r.delta for r in records[:n_pts - 1]])
    violations: List[Tuple[int, int]] = []
    undecided = 0
    worst: Optional[int] = None
    pairs = 0
    if pt_units is not None and rec_units is not None:
        p1, pu = pt_units
        p2, du = rec_units
        p = max(p1, p2)
        pu = [(m << (p - p1), r << (p - p1)) for m, r in pu]
        du = [(m << (p - p2), r << (p - p2)) for m, r in du]
        one = 1 << p
        half = one >> 1
        for i in range(n_pts):
            mi, ri = pu[i]
            for j in range(i + 1, n_pts):
                pairs += 1
                r = (pu[j][0] - mi) % one
                d = r if r <= half else one - r
                dm, dr = du[j - i - 1]
                gap = d - dm
                radsum = ri + pu[j][1] + dr
                if abs(gap) <= radsum << GUARD_BITS:
                    undecided += 1
                elif gap < 0:
                    violations.append((i + 1, j + 1))
                else:
                    bits = gap.bit_length() - max(1, radsum).bit_length()
                    if worst is None or bits < worst:
                        worst = bits
    else:
        for i in range(n_pts):
            vi = _as_value(points[i])
            for j in range(i + 1, n_pts):
                pairs += 1
                d = (_as_value(points[j]) - vi).dist_to_nearest_int()
                delta = records[j - i - 1].delta
                c = try_cmp(d, delta)
                if c is None:
                    undecided += 1
                elif c < 0:
                    violations.append((i + 1, j + 1))
                else:
                    mb = margin_bits(d, delta)
                    if mb is not None and (worst is None or mb < worst):
                        worst = mb
    return SeparationReport(pairs, tuple(violations), undecided, worst)


def vector_sum_bound(alpha, beta, rec_a: MinimaRecord, rec_b: MinimaRecord,
                     prec_bits: int = DEFAULT_PREC) -> Tuple[Optional[bool], str]:
    """||(u_a + u_b).(alpha, beta)|| <= delta_a + delta_b (triangle bound).

    Returns (decision, rendered value); a certified failure raises, since
    the bound is forced by the metric.
    """
    kind, a, b, p = _resolve_pair(alpha, beta, prec_bits)
    ua, ub = rec_a.u, rec_b.u
    ca, cb = ua[0] + ub[0], ua[1] + ub[1]
    if kind == "exact":
        val: Union[Fraction, ApproxReal] = dist_to_int(ca * a + cb * b)
    else:
        one = 1 << p
        mid = (ca * a[0] + cb * b[0]) % one
        mid = min(mid, one - mid)
        val = ApproxReal(Fraction(mid, one),
                         Fraction(ca * a[1] + cb * b[1], one))
    bound = _as_value(rec_a.delta) + _as_value(rec_b.delta)
    c = try_cmp(val, bound)
    if c == 1:
        raise InvariantViolation("triangle-bound",
                                 f"u_a={ua} u_b={ub}: {val} > {bound}")
    return (None if c is None else True), str(_as_value(val))


@dataclass(frozen=True)
class GapDichotomyReport:
    n: int
    m: int
    refused: bool
    reason: Optional[str] = None
    horizon: Optional[int] = None
    delta_n_dec: Optional[str] = None
    delta_m_dec: Optional[str] = None
    pairs_total: int = 0
    separated: int = 0
    clustered: int = 0
    violations: Tuple[Tuple[int, int], ...] = ()
    undecided: Tuple[Tuple[int, int], ...] = ()
    min_gap_violations: Tuple[Tuple[int, int], ...] = ()


def _dec(value) -> str:
    return dec_sci(_as_value(value).mid)


def gap_dichotomy(alpha, beta, points, n: int, m: int, params: ProbeParams,
                  prec_bits: int = DEFAULT_PREC,
                  pair_budget: int = DEFAULT_PAIR_BUDGET) -> GapDichotomyReport:
    """Classify orbit pair distances as separated (>= delta_n**t) or
    clustered (<= delta_m / delta_n**s); anything between is a violation.

    Unmet preconditions refuse the classification with a reason instead
    of raising.
    """
    def refuse(reason, horizon=None):
        return GapDichotomyReport(n, m, True, reason, horizon)

    if n < 1 or m < 1:
        return refuse("indices must be >= 1")
    data = _minima_impl(alpha, beta, max(n, m), prec_bits)
    recs = data.records
    if len(recs) < max(n, m):
        return refuse(f"minima sequence terminates at n={recs[-1].n} with value 0")
    rec_n, rec_m = recs[n - 1], recs[m - 1]
    if not rec_n.minimal:
        return refuse(f"delta at n={n} is not minimal")
    if not rec_m.minimal:
        return refuse(f"delta at m={m} is not minimal")
    if isinstance(rec_n.delta, Fraction) and rec_n.delta == 0:
        return refuse("delta_n is zero")
    tp, tq = params.t.numerator, params.t.denominator
    sp, sq = params.s.numerator, params.s.denominator
    c = cmp_products([(rec_m.delta, tq)], [(rec_n.delta, tp)])
    if c is None:
        return refuse("delta_m vs delta_n**t undecidable at working precision")
    if c >= 0:
        return refuse("delta_m is not below delta_n**t")
    try:
        horizon = scan_horizon(rec_n.delta, params.s)
    except InsufficientPrecision as exc:
        return refuse(f"horizon undecidable: {exc.detail}")
    if m > horizon:
        return refuse(f"m={m} exceeds the horizon {horizon}", horizon)
    if len(points) < horizon:
        return refuse(f"orbit has {len(points)} points, horizon needs {horizon}",
                      horizon)
    if horizon * (horizon - 1) // 2 > pair_budget:
        return refuse(f"horizon {horizon} exceeds the pair budget", horizon)

    d_n, d_m = rec_n.delta, rec_m.delta
    separated = clustered = 0
    violations: List[Tuple[int, int]] = []
    undecided: List[Tuple[int, int]] = []
    min_gap_bad: List[Tuple[int, int]] = []
    pairs = 0
    vals = [_as_value(points[k]) for k in range(horizon)]
    for i in range(horizon):
        for j in range(i + 1, horizon):
            pairs += 1
            d = (vals[j] - vals[i]).dist_to_nearest_int()
            cg = try_cmp(d, d_m)
            if cg == -1:
                min_gap_bad.append((i + 1, j + 1))
            sep = cmp_products([(d, tq)], [(d_n, tp)])
            if sep is not None and sep >= 0:
                separated += 1
                continue
            clu = cmp_products([(d, sq), (d_n, sp)], [(d_m, sq)])
            if clu is not None and clu <= 0:
                clustered += 1
            elif sep is None or clu is None:
                undecided.append((i + 1, j + 1))
            else:
                violations.append((i + 1, j + 1))
    return GapDichotomyReport(n, m, False, None, horizon,
                              _dec(d_n), _dec(d_m), pairs, separated, clustered,
                              tuple(violations), tuple(undecided),
                              tuple(min_gap_bad))


@dataclass(frozen=True)
class QualifyingScan:
    n_max: int
    qualifying: Tuple[Tuple[int, int], ...]
    reports: Tuple[GapDichotomyReport, ...]
    violation_total: int
    refusals: Tuple[Tuple[int, int, str], ...]
    notes: Tuple[str, ...]


def dichotomy_scan(alpha, beta, points, params: ProbeParams, n_max: int,
                   prec_bits: int = DEFAULT_PREC,
                   pair_budget: int = DEFAULT_PAIR_BUDGET) -> QualifyingScan:
    """Run gap_dichotomy on every qualifying (n, m): n minimal, m minimal,
    m <= min(horizon(n), n_max), delta_m < delta_n**t."""
    data = _minima_impl(alpha, beta, n_max, prec_bits)
    recs = data.records
    tp, tq = params.t.numerator, params.t.denominator
    qualifying: List[Tuple[int, int]] = []
    reports: List[GapDichotomyReport] = []
    refusals: List[Tuple[int, int, str]] = []
    notes: List[str] = []
    total = 0
    for rec in recs:
        if not rec.minimal:
            continue
        if isinstance(rec.delta, Fraction) and rec.delta == 0:
            notes.append(f"n={rec.n}: zero minimum, no horizon")
            continue
        try:
            horizon = scan_horizon(rec.delta, params.s)
        except InsufficientPrecision as exc:
            notes.append(f"n={rec.n}: {exc}")
            continue
        for other in recs:
            mm = other.n
            if mm <= rec.n or mm > min(horizon, n_max) or not other.minimal:
                continue
            c = cmp_products([(other.delta, tq)], [(rec.delta, tp)])
            if c is None:
                notes.append(f"(n={rec.n}, m={mm}): closeness undecidable")
                continue
            if c < 0:
                qualifying.append((rec.n, mm))
                rep = gap_dichotomy(alpha, beta, points, rec.n, mm, params,
                                    prec_bits, pair_budget)
                reports.append(rep)
                if rep.refused:
                    refusals.append((rec.n, mm, rep.reason))
                else:
                    total += len(rep.violations)
    return QualifyingScan(n_max, tuple(qualifying), tuple(reports), total,
                          tuple(refusals), tuple(notes))


# ---------------------------------------------------------------------------
# localized covering probe


@dataclass(frozen=True)
class WindowWitness:
    center_index: int
    center_dec: str
    radius_dec: str
    count_orbit: int
    count_full: int
    exponent_dec: str


@dataclass(frozen=True)
class ProbeCase:
    n: int
    outcome: str                 # "case1" | "case2a" | "case2b" | "skipped"
    note: str = ""
    horizon: Optional[int] = None
    rho_n: Optional[Fraction] = None
    delta_n_dec: Optional[str] = None
    close_m: Optional[int] = None
    sep_count: Optional[int] = None
    sep_scale_dec: Optional[str] = None
    sep_violations: int = 0
    sep_undecided: int = 0
    threshold_ok: Optional[bool] = None
    window: Optional[WindowWitness] = None
    exponent_dec: Optional[str] = None


@dataclass(frozen=True)
class AssouadProbeReport:
    params: ProbeParams
    cases: Tuple[ProbeCase, ...]
    exponent_at_params: Fraction
    implied_exponent_limit: Fraction


def _log_of(value):
    v = _as_value(value).mid
    return mpmath.log(v.numerator) - mpmath.log(v.denominator)


def _probe_exponent(count: int, neg_log_scale) -> str:
    with mpmath.workprec(DEC_PREC_BITS):
        if count <= 1 or neg_log_scale <= 0:
            return mpmath.nstr(mpmath.mpf(0), LOG_DIGITS)
        return mpmath.nstr(mpmath.log(count) / neg_log_scale, LOG_DIGITS)


def assouad_lower_probe(alpha, beta, points, indices, params: ProbeParams,
                        n_list: Sequence[int],
                        prec_bits: int = DEFAULT_PREC,
                        sep_budget: int = DEFAULT_SEP_BUDGET) -> AssouadProbeReport:
    """Case analysis behind the localized lower bound.

    For each minimal n: either no k <= N carries a value below
    delta_n**t (case 1: the whole index window is delta_n**t-separated),
    or the greedy delta_n**t/2-net is already large (case 2a), or
    pigeonholing concentrates points in a window of radius
    delta_m / delta_n**s (case 2b, reported with the witness window).
    Purely diagnostic: precondition failures skip the entry, never raise.
    """
    if not n_list:
        raise UsageError("probe needs a nonempty n_list")
    data = _minima_impl(alpha, beta, max(n_list), prec_bits)
    recs = data.records
    tp, tq = params.t.numerator, params.t.denominator
    sp, sq = params.s.numerator, params.s.denominator
    rp, rq = params.r.numerator, params.r.denominator
    cases: List[ProbeCase] = []

    for n in n_list:
        if n < 1 or n > len(recs):
            cases.append(ProbeCase(n, "skipped", "outside the computed minima range"))
            continue
        rec = recs[n - 1]
        if not rec.minimal:
            cases.append(ProbeCase(n, "skipped", "not a minimal index"))
            continue
        if isinstance(rec.delta, Fraction) and rec.delta == 0:
            cases.append(ProbeCase(n, "skipped", "zero minimum"))
            continue
        try:
            horizon = scan_horizon(rec.delta, params.s)
        except InsufficientPrecision as exc:
            cases.append(ProbeCase(n, "skipped", f"horizon undecidable: {exc.detail}"))
            continue
        if horizon > len(recs) and data.zero_at is None:
            # companion minima up to the horizon, not just up to max(n_list)
            try:
                data = _minima_impl(alpha, beta, horizon, prec_bits)
            except InsufficientPrecision as exc:
                cases.append(ProbeCase(n, "skipped",
                                       f"minima extension undecidable: "
                                       f"{exc.detail}", horizon))
                continue
            recs = data.records
        if len(points) < horizon:
            cases.append(ProbeCase(n, "skipped",
                                   f"orbit has {len(points)} points, horizon "
                                   f"needs {horizon}", horizon))
            continue
        if indices is None:
            sel = list(range(1, horizon + 1))
        elif isinstance(indices, IndexSet):
            sel = [k for k in range(1, horizon + 1) if k in indices]
        else:
            sel = sorted(k for k in indices if 1 <= k <= horizon)
        if not sel:
            cases.append(ProbeCase(n, "skipped", "no surviving indices below the "
                                                 "horizon", horizon))
            continue
        rho = Fraction(len(sel), horizon)
        d_n = rec.delta
        d_n_dec = _dec(d_n)
        ent = [(k, _as_value(points[k - 1])) for k in sel]
        note_bits: List[str] = []

        # nearest qualifying companion below the horizon
        close_m = None
        for other in recs[:min(horizon, len(recs))]:
            if other.n == n or not other.minimal:
                continue
            c = cmp_products([(other.delta, tq)], [(d_n, tp)])
            if c is None:
                note_bits.append(f"m={other.n} closeness undecidable")
            elif c < 0:
                close_m = other.n
                break
        with mpmath.workprec(DEC_PREC_BITS):
            neg_log_dn = -_log_of(d_n)

        if close_m is None:
            # every index pair below the horizon keeps distance >= delta_n**t
            sep_bad = sep_und = 0
            checked = 0
            outer = True
            for ai in range(len(ent)):
                if not outer:
                    break
                for bi in range(ai + 1, len(ent)):
                    if checked >= sep_budget:
                        note_bits.append(f"separation sampled on first {checked} pairs")
                        outer = False
                        break
                    checked += 1
                    d = (ent[bi][1] - ent[ai][1]).dist_to_nearest_int()
                    c = cmp_products([(d, tq)], [(d_n, tp)])
                    if c is None:
                        sep_und += 1
                    elif c < 0:
                        sep_bad += 1
            with mpmath.workprec(DEC_PREC_BITS):
                log_scale = neg_log_dn * tp / tq         # log(1/delta_n**t)
                scale_dec = mpmath.nstr(mpmath.e ** (-log_scale), LOG_DIGITS)
                expo = _probe_exponent(len(ent), log_scale)
            cases.append(ProbeCase(n, "case1", "; ".join(note_bits), horizon, rho,
                                   d_n_dec, None, len(ent), scale_dec, sep_bad,
                                   sep_und, None, None, expo))
            continue

        # greedy net at half the separation scale
        net: List[Tuple[int, ApproxReal]] = []
        net_und = 0
        for k, v in ent:
            ok = True
            for _, f in net:
                d = (v - f).dist_to_nearest_int()
                c = cmp_products([(d.scaled(2), tq)], [(d_n, tp)])
                if c is None:
                    net_und += 1
                    ok = False
                    break
                if c < 0:
                    ok = False
                    break
            if ok:
                net.append((k, v))
        if net_und:
            note_bits.append(f"{net_und} net decisions undecided, kept out")
        big_net = cmp_products([(len(net), rq), (d_n, rp)], [(1, 1)])
        with mpmath.workprec(DEC_PREC_BITS):
            half_scale = neg_log_dn * tp / tq + mpmath.log(2)
        if big_net == 1:
            with mpmath.workprec(DEC_PREC_BITS):
                scale_dec = mpmath.nstr(mpmath.e ** (-half_scale), LOG_DIGITS)
                expo = _probe_exponent(len(net), half_scale)
            cases.append(ProbeCase(n, "case2a", "; ".join(note_bits), horizon, rho,
                                   d_n_dec, close_m, len(net), scale_dec, 0, 0,
                                   True, None, expo))
            continue
        if big_net is None:
            note_bits.append("net size vs delta**-r undecidable, fell through to 2b")

        # pigeonhole: densest ball of the net, then the cluster-radius window
        d_m = recs[close_m - 1].delta
        best_k, best_v, best_count = net[0][0], net[0][1], -1
        for k, f in net:
            cnt = 0
            for _, v in ent:
                d = (v - f).dist_to_nearest_int()
                c = cmp_products([(d.scaled(2), tq)], [(d_n, tp)])
                if c is not None and c < 0:
                    cnt += 1
            if cnt > best_count:
                best_k, best_v, best_count = k, f, cnt
        in_window_orbit = 0
        for _, v in ent:
            d = (v - best_v).dist_to_nearest_int()
            c = cmp_products([(d, sq), (d_n, sp)], [(d_m, sq)])
            if c is not None and c <= 0:
                in_window_orbit += 1
        # bulk count: float screen against the window radius, exact powers
        # only for points within a 1e-9 relative band of the boundary
        with mpmath.workprec(DEC_PREC_BITS):
            w_mp = mpmath.e ** (_log_of(d_m) + neg_log_dn * sp / sq)
        w_f = float(w_mp)
        in_window_full = 0
        for pt in points:
            d = (_as_value(pt) - best_v).dist_to_nearest_int()
            if w_f > 0.0:
                d_lo = float(d.lo) if isinstance(d, ApproxReal) else float(d)
                d_hi = float(d.hi) if isinstance(d, ApproxReal) else d_lo
                if d_hi < w_f * (1.0 - 1e-9):
                    in_window_full += 1
                    continue
                if d_lo > w_f * (1.0 + 1e-9):
                    continue
            c = cmp_products([(d, sq), (d_n, sp)], [(d_m, sq)])
            if c is not None and c <= 0:
                in_window_full += 1
        # count >= rho * N * delta_n**r, via count**rq >= (rho N)**rq delta**rp
        thr = cmp_products([(in_window_orbit, rq)],
                           [(rho * horizon, rq), (d_n, rp)])
        with mpmath.workprec(DEC_PREC_BITS):
            neg_log_w = -_log_of(d_m) - neg_log_dn * sp / sq
            radius_dec = mpmath.nstr(mpmath.e ** (-neg_log_w), LOG_DIGITS)
            expo = _probe_exponent(in_window_full, neg_log_w)
        witness = WindowWitness(best_k, _dec(best_v), radius_dec,
                                in_window_orbit, in_window_full, expo)
        cases.append(ProbeCase(n, "case2b", "; ".join(note_bits), horizon, rho,
                               d_n_dec, close_m, len(net), None, 0, 0,
                               None if thr is None else thr >= 0,
                               witness, expo))
    return AssouadProbeReport(params, tuple(cases),
                              params.exponent_at_params,
                              params.implied_exponent_limit)
