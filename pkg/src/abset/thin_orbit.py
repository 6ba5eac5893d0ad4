"""Thin-orbit tower: long return words with sparse balancing blocks.

Stage n is a word W_n over {x, y} together with a rotation pair
(alpha_n, beta_n) at which W_n evaluates to a prescribed small value
eps_n.  The next stage repeats W_n many times and appends one balancing
block V_n:

    W_(n+1) = W_n^(L_n) V_n,        V_n = (x^(2k-l) y^(2l+k))^ceil(sqrt(L_n))

where (k, l) are the letter counts of W_n.  The repetition count L_n is
the largest value keeping |W_(n+1)| within T = ceil((1/eps_n)^(1/n)).
The rotation pair is then nudged along the direction (l, -k), which
preserves the value of W_n exactly while steering W_(n+1) onto the new
target eps_(n+1) = eps_n^rho(n+1).

The balancing blocks occupy an index set of vanishing density; deleting
them leaves times whose orbit values split as an integer combination of
full-word values plus a prefix of W_(n0).  restricted_covering measures
how well that split concentrates at scale 2 sqrt(eps_n0).  Box-count and
drift bounds there are recorded, not enforced: at desk-scale parameter
choices the level-1 bounds fail by a wide, structural margin (the L_n
eps_n span alone exceeds sqrt(eps_n)), and the reports say so.
"""

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

from .errors import InvariantViolation, UsageError
from .exact import ceil_root, ceil_root_ratio, exact_sqrt, lift_half, mod1, sqrt_bracket
from .index_sets import IndexSet
from .words import WordExpr, X, Y, block, concat, power, prefix_counts

DEFAULT_SEED = 20260823
DEFAULT_SAMPLE_BUDGET = 2000
MAX_EPS_BITS = 1 << 26          # refuse targets whose denominator outgrows this


RhoSchedule = Union[Callable[[int], int], Sequence[int]]


@dataclass(frozen=True)
class ThinConfig:
    """m: half-length of the seed block W_1 = x^m y^m.
    eps1: the seed landing value.
    rho: exponent schedule; eps_n = eps_(n-1) ** rho(n) for n >= 2.
    buffer: how many ceil(sqrt(L))-sized units choose_L reserves for the
    balancing block (3 covers |V_n| < 3 sqrt(L) N_n).
    strict_bounds: raise instead of record when a perturbation exceeds
    sqrt(eps)."""

    m: int
    eps1: Fraction
    rho: RhoSchedule
    buffer: int = 3
    strict_bounds: bool = False
    max_eps_bits: int = MAX_EPS_BITS

    def __post_init__(self):
        if self.m < 1:
            raise UsageError("need m >= 1")
        if not 0 < self.eps1 < 1:
            raise UsageError("need 0 < eps1 < 1")
        if self.buffer < 1:
            raise UsageError("need buffer >= 1")

    def rho_at(self, n: int) -> int:
        """Exponent applied entering stage n (n >= 2)."""
        if callable(self.rho):
            r = self.rho(n)
        else:
            if n - 2 >= len(self.rho):
                raise UsageError(f"rho schedule ends before stage {n}")
            r = self.rho[n - 2]
        if r < 2:
            raise UsageError(f"rho must be >= 2, got {r} at stage {n}")
        return int(r)

    @classmethod
    def desk(cls) -> "ThinConfig":
        return cls(m=10, eps1=Fraction(1, 2 ** 40), rho=lambda n: 4)

    @classmethod
    def faithful(cls) -> "ThinConfig":
        return cls(m=1000, eps1=Fraction(1, 10 ** 1000),
                   rho=lambda n: 1000 * n ** 3)


@dataclass(frozen=True)
class TStage:
    n: int
    alpha: Fraction
    beta: Fraction
    eps: Fraction
    W: WordExpr
    N: int                      # |W_n|
    k: int                      # x-count of W_n
    l: int                      # y-count of W_n
    L: Optional[int]            # repetitions used building this stage
    s: Optional[int]            # ceil(sqrt(L))
    V: Optional[WordExpr]       # balancing block appended
    t: Optional[Fraction]       # scalar of the (l, -k) repair applied
    shift_sup: Fraction         # sup-norm of the rotation perturbation
    shift_within_sqrt: Optional[bool]   # recorded: shift_sup < sqrt(eps_prev)

    @property
    def g_value(self) -> Fraction:
        """k beta - l alpha mod 1; zero means the pair is balanced for
        this word's counts."""
        return mod1(self.k * self.beta - self.l * self.alpha)


def init_stage(config: ThinConfig) -> TStage:
    """W_1 = x^m y^m at alpha = beta = 1/2 + eps1/(2m), which lands W_1
    exactly on eps1 and zeroes the imbalance k beta - l alpha."""
    m = config.m
    alpha = Fraction(1, 2) + config.eps1 / (2 * m)
    w = block(m, m)
    if mod1(m * alpha + m * alpha) != config.eps1:
        raise InvariantViolation("seed-landing", "W_1 must land on eps1")
    return TStage(n=1, alpha=alpha, beta=alpha, eps=config.eps1, W=w,
                  N=2 * m, k=m, l=m, L=None, s=None, V=None, t=None,
                  shift_sup=Fraction(0), shift_within_sqrt=None)


def choose_L(eps: Fraction, N: int, n: int, buffer: int = 3) -> Tuple[int, int]:
    """Largest L with (L + buffer * ceil(sqrt(L))) * N <= T where
    T = ceil((1/eps)^(1/n)).  Returns (L, T)."""
    T = ceil_root_ratio(eps.denominator, eps.numerator, n)

    def fits(L: int) -> bool:
        return (L + buffer * ceil_root(L, 2)) * N <= T

    if not fits(4):
        raise UsageError(
            f"horizon T={T} leaves no room for L >= 4 at N={N}; "
            "eps is too large for this stage count")
    lo, hi = 4, T // N + 1   # fits(lo) holds; hi * N already exceeds T
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if fits(mid):
            lo = mid
        else:
            hi = mid
    return lo, T


def advance(stage: TStage, config: ThinConfig) -> TStage:
    n = stage.n
    rho = config.rho_at(n + 1)
    target_bits = stage.eps.denominator.bit_length() * rho
    if target_bits > config.max_eps_bits:
        raise UsageError(
            f"eps_{n + 1} needs about {target_bits} bits; the schedule "
            f"outgrows the {config.max_eps_bits}-bit working cap after "
            f"stage {n}.  Raise max_eps_bits or shorten the tower.")
    eps_next = stage.eps ** rho

    L, T = choose_L(stage.eps, stage.N, n, config.buffer)
    s = ceil_root(L, 2)
    k, l = stage.k, stage.l
    a_exp, b_exp = 2 * k - l, 2 * l + k
    if a_exp <= 0 or 2 * l - k <= 0:
        raise InvariantViolation("symbol-balance",
                                 f"counts ({k}, {l}) left the 2:1 band")
    v = power(concat(power(X, a_exp), power(Y, b_exp)), s)
    w_next = concat(power(stage.W, L), v)
    N_next = L * stage.N + v.length
    if N_next > T:
        raise InvariantViolation("horizon-overflow",
                                 f"|W_{n + 1}| = {N_next} > T = {T}")

    k2, l2 = w_next.counts.x, w_next.counts.y
    if (k2, l2) != (L * k + s * a_exp, L * l + s * b_exp):
        raise InvariantViolation("count-recursion")
    lo_b = Fraction(n + 2, 2 * n + 3)
    if not lo_b < Fraction(k2, l2) < 1 / lo_b:
        raise InvariantViolation("symbol-balance",
                                 f"stage {n + 1} ratio {k2}/{l2} outside band")

    cur = mod1(k2 * stage.alpha + l2 * stage.beta)
    delta_val = lift_half(cur - eps_next)
    t = delta_val / (s * (k * k + l * l))
    alpha = stage.alpha + t * l
    beta = stage.beta - t * k
    if not (0 < alpha < 1 and 0 < beta < 1):
        raise InvariantViolation("rotation-range")

    if mod1(k2 * alpha + l2 * beta) != eps_next:
        raise InvariantViolation("landing", f"stage {n + 1} missed eps target")
    if mod1(k * alpha + l * beta) != mod1(k * stage.alpha + l * stage.beta):
        raise InvariantViolation("previous-word-moved",
                                 "the (l, -k) repair must fix W_n exactly")
    if prefix_counts(w_next, stage.N) != stage.W.counts:
        raise InvariantViolation("prefix-structure")
    # imbalance propagation is a count identity; check it at the new pair
    g_prev = k * beta - l * alpha
    w_prev = k * alpha + l * beta
    if k2 * beta - l2 * alpha != (L + 2 * s) * g_prev - s * w_prev:
        raise InvariantViolation("imbalance-recursion")

    shift = abs(t) * max(k, l)
    within = shift * shift < stage.eps       # shift < sqrt(eps), exactly
    if config.strict_bounds and not within:
        raise InvariantViolation(
            "perturbation-bound",
            f"stage {n}->{n + 1} shift {float(shift):.3e} is not below "
            f"sqrt(eps_{n}); rerun without strict bounds to record it")
    return TStage(n=n + 1, alpha=alpha, beta=beta, eps=eps_next, W=w_next,
                  N=N_next, k=k2, l=l2, L=L, s=s, V=v, t=t,
                  shift_sup=shift, shift_within_sqrt=within)


def build_stages(config: ThinConfig, n_stages: int) -> List[TStage]:
    """Run the tower and hard-check the accumulated drift of every
    earlier word at the final rotation pair."""
    if n_stages < 1:
        raise UsageError("need at least one stage")
    stages = [init_stage(config)]
    for _ in range(n_stages - 1):
        stages.append(advance(stages[-1], config))
    final = stages[-1]
    for st in stages[:-1]:
        val = mod1(st.k * final.alpha + st.l * final.beta)
        allowed = st.N * sum((s.shift_sup for s in stages[st.n + 1:]),
                             Fraction(0))
        if abs(lift_half(val - st.eps)) > allowed:
            raise InvariantViolation(
                "drift-budget",
                f"W_{st.n} moved beyond the triangle-inequality budget")
    return stages


def deleted_sets(stages: Sequence[TStage]) -> Dict[int, IndexSet]:
    """J_i = 1-based letter indices of the balancing block V_i, across
    the whole final word.  Pairwise disjoint by construction."""
    K = len(stages)
    out = {}
    for i in range(1, K):
        st = stages[i]                       # stage i+1 holds L_i, V_i
        layers = [(stages[j - 1].N, stages[j].L) for j in range(K - 1, i, -1)]
        out[i] = IndexSet.nested_blocks(origin=st.L * stages[i - 1].N,
                                        block_len=st.V.length,
                                        layers=layers)
    return out


def deleted_union(stages: Sequence[TStage], from_level: int) -> IndexSet:
    """Union of J_i for i >= from_level."""
    sets = deleted_sets(stages)
    return IndexSet.union(*(sets[i] for i in sorted(sets) if i >= from_level))


def _sample_menu(limit: int, cuts: int = 16) -> List[int]:
    """Small deterministic family of 0-based indices below limit:
    both edges plus evenly placed interior cuts."""
    if limit <= 0:
        return []
    vals = set(range(0, min(4, limit)))
    vals.update(range(max(0, limit - 3), limit))
    vals.update((limit * j) // cuts for j in range(1, cuts))
    return sorted(v for v in vals if 0 <= v < limit)


def restricted_covering(stages: Sequence[TStage], n0: int, *,
                        sample_budget: int = DEFAULT_SAMPLE_BUDGET,
                        seed: int = DEFAULT_SEED) -> dict:
    """Sample orbit times of the final word outside every balancing
    block of level >= n0, and box-count their values at scale
    2 sqrt(eps_n0).

    Every sampled value is computed twice: once directly from prefix
    counts, once through the level split (full-word multiplicities plus
    a W_n0 prefix); a mismatch raises.  The box-count and drift bounds
    are recorded in the returned report, never enforced.
    """
    K = len(stages)
    if not 1 <= n0 <= K:
        raise UsageError(f"n0 must be in [1, {K}]")
    if sample_budget < 1:
        raise UsageError("need a positive sample budget")
    final = stages[-1]
    base = stages[n0 - 1]
    horizon = final.N
    excluded = deleted_union(stages, n0)

    # scale 2 sqrt(eps_n0); fall back to a 64-bit lower bracket when the
    # square root is irrational (smaller cells, so counts only go up)
    root = exact_sqrt(base.eps)
    scale_exact = root is not None
    if root is None:
        root, _ = sqrt_bracket(base.eps)
    scale = 2 * root

    den = (final.alpha.denominator * final.beta.denominator //
           math.gcd(final.alpha.denominator, final.beta.denominator))
    a_int = final.alpha.numerator * (den // final.alpha.denominator)
    b_int = final.beta.numerator * (den // final.beta.denominator)
    word_val = {st.n: (st.k * a_int + st.l * b_int) % den for st in stages}
    level_len = {st.n: st.N for st in stages}
    level_reps = {stages[i].n: stages[i + 1].L for i in range(K - 1)}

    def split_eval(j: int):
        """Peel levels K-1 .. n0; returns (value_num, drift_num, r)."""
        p = j
        acc = 0
        for lev in range(K - 1, n0 - 1, -1):
            c, rem = divmod(p - 1, level_len[lev])
            if c >= level_reps[lev]:
                raise InvariantViolation("exclusion-leak",
                                         f"time {j} sits inside a level-{lev} block")
            acc = (acc + c * word_val[lev]) % den
            p = rem + 1
        cx, cy = prefix_counts(base.W, p)
        base_num = (cx * a_int + cy * b_int) % den
        return (acc + base_num) % den, acc, p

    def direct_eval(j: int) -> int:
        cx, cy = prefix_counts(final.W, j)
        return (cx * a_int + cy * b_int) % den

    def cell_of(num: int) -> int:
        return (num * scale.denominator) // (den * scale.numerator)

    rng = random.Random(seed)
    picked = []
    attempts = 0
    max_attempts = 50 * sample_budget + 1000
    while len(picked) < sample_budget and attempts < max_attempts:
        attempts += 1
        j = rng.randrange(1, horizon + 1)
        if j not in excluded:
            picked.append(j)

    det = set()
    menus = [_sample_menu(level_reps[lev]) for lev in range(K - 1, n0 - 1, -1)]
    offsets = [level_len[lev] for lev in range(K - 1, n0 - 1, -1)]
    base_menu = ([r + 1 for r in _sample_menu(base.N)]
                 if base.N > 64 else list(range(1, base.N + 1)))
    if n0 >= 2:
        sub = stages[n0 - 2].N
        base_menu.extend(c * sub for c in _sample_menu(stages[n0 - 1].L or 1)
                         if 1 <= c * sub <= base.N)

    def emit(j: int):
        for cand in (j - 1, j, j + 1):
            if 1 <= cand <= horizon and cand not in excluded:
                det.add(cand)

    def walk(depth: int, offset: int):
        if depth == len(menus):
            for r in base_menu:
                emit(offset + r)
            return
        for c in menus[depth]:
            walk(depth + 1, offset + c * offsets[depth])

    walk(0, 0)

    cells = set()
    max_drift_num = 0
    for j in list(det) + picked:
        val, drift_acc, _ = split_eval(j)
        if direct_eval(j) != val:
            raise InvariantViolation("split-eval-mismatch", f"time {j}")
        cells.add(cell_of(val))
        max_drift_num = max(max_drift_num, min(drift_acc, den - drift_acc))

    max_drift = Fraction(max_drift_num, den)
    drift_ok = max_drift * max_drift < base.eps     # drift < sqrt(eps_n0)

    rng2 = random.Random(f"{seed}-unrestricted")
    contrast_cells = set()
    for _ in range(len(picked)):
        contrast_cells.add(cell_of(direct_eval(rng2.randrange(1, horizon + 1))))

    return {
        "n0": n0,
        "horizon": horizon,
        "scale": scale,
        "scale_exact_sqrt": scale_exact,
        "samples_random": len(picked),
        "samples_deterministic": len(det),
        "cells_restricted": len(cells),
        "cell_bound_claimed": base.N,
        "cell_bound_ok": len(cells) <= base.N,
        "max_drift": max_drift,
        "drift_bound_ok": drift_ok,
        "cells_unrestricted": len(contrast_cells),
        "excluded_density": excluded.density_up_to(horizon),
        "seed": seed,
    }
