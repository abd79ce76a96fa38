"""Closed-form bounds and their empirical validators.

Counting arguments compare ``2^m`` labelings with an upper bound on the
number of realizable sign patterns; all such comparisons run in the log
domain with :mod:`mpmath` at 256-bit precision because the counts overflow
floats long before the crossover.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np

from . import core
from .core import HypothesisClass
from .errors import DomainError, UnsupportedClass
from .lpcore import separating_direction, zero_in_hull

PREC = 256
PREDICTOR_C = 320.0

EVEN = "lp_even"
ODD = "lp_odd"
CONSTANT_D = "lp_constant_d"
TREE = "tree"
ARBITRARY = "arbitrary"
CROSSOVER_KINDS = (EVEN, ODD, CONSTANT_D, TREE, ARBITRARY)


def _ctx():
    ctx = mpmath.mp.clone()
    ctx.prec = PREC
    return ctx


@dataclass(frozen=True)
class WarrenParams:
    m: int
    ell: int
    k: int

    def __post_init__(self):
        if self.ell < 2:
            raise DomainError(f"Warren's bound needs at least 2 variables, got {self.ell}")
        if self.m < self.ell:
            raise DomainError(f"Warren's bound needs m >= ell, got m={self.m} < ell={self.ell}")
        if self.k < 1:
            raise DomainError("polynomial degree must be at least 1")


def log2_warren(params: WarrenParams):
    """``log2((4 e k m / ell)^ell)`` as an mpf."""
    ctx = _ctx()
    m, ell, k = (ctx.mpf(v) for v in (params.m, params.ell, params.k))
    return ell * ctx.log(4 * ctx.e * k * m / ell, 2)


def warren_bound(params: WarrenParams):
    """Warren's bound ``(4 e k m / ell)^ell`` on the connected components of
    the nonzero set of ``m`` degree-``k`` polynomials in ``ell`` variables."""
    ctx = _ctx()
    return ctx.power(2, log2_warren(params))


# ---------------------------------------------------------------------------
# crossover


def _log2_patterns(kind: str, n: int, d: int, p: int, m: int):
    """log2 of the realizable sign-pattern count for ``m`` queries."""
    ctx = _ctx()
    if kind == EVEN:
        return log2_warren(WarrenParams(m, n * d, p))
    if kind == ODD:
        # (n!)^d per-coordinate orderings, bounded by n^{nd}
        return log2_warren(WarrenParams(m, n * d, p)) + n * d * ctx.log(n, 2)
    if kind == CONSTANT_D:
        return log2_warren(WarrenParams(2 ** (2 * d) * m, n * d, p))
    if kind == TREE:
        k = 2 * n - 1
        topo = 1 + (2 * n - 2) * ctx.log(2 * n, 2)
        return log2_warren(WarrenParams(m, k, 1)) + topo
    raise UnsupportedClass(f"no pattern count for {kind}")


def _min_m(kind, n, d):
    if kind == TREE:
        return 2 * n - 1
    if kind == CONSTANT_D:
        # Warren needs 2^{2d} m >= nd
        return max(1, -(-n * d // 2 ** (2 * d)))
    return n * d


def vc_upper_crossover(kind: str, n: int, d: int | None = None, p: int | None = None) -> int:
    """Smallest ``m`` with ``2^m`` above the sign-pattern count, so that no
    set of ``m`` queries is shattered.

    ``m - log2(count(m))`` is convex in ``m`` and negative at the smallest
    admissible ``m``, so doubling followed by bisection finds the first
    crossing.
    """
    if kind == ARBITRARY:
        return n * n
    if kind not in CROSSOVER_KINDS:
        raise UnsupportedClass(f"unknown crossover kind {kind!r}")
    if kind == TREE:
        d, p = 1, 1
    else:
        if d is None or p is None:
            raise DomainError(f"{kind} needs d and p")
        if kind == EVEN and p % 2:
            raise DomainError("lp_even needs an even p")
        if kind == ODD and not p % 2:
            raise DomainError("lp_odd needs an odd p")
    if n < 1 or d < 1 or p < 1:
        raise DomainError("n, d and p must be positive")
    if kind == TREE and n < 2:
        raise DomainError("tree crossover needs n >= 2")
    if kind != TREE and n * d < 2:
        raise DomainError("crossover needs n * d >= 2")

    def above(m):
        return m > _log2_patterns(kind, n, d, p, m)

    lo = _min_m(kind, n, d)
    if above(lo):
        return lo
    hi = lo
    while not above(hi):
        lo, hi = hi, hi * 2
    # invariant: not above(lo), above(hi)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if above(mid):
            hi = mid
        else:
            lo = mid
    return hi


def crossover_kind_for(hclass: HypothesisClass) -> str:
    if hclass.variant in (core.ARBITRARY, core.METRIC):
        return ARBITRARY
    if hclass.variant == core.TREE:
        return TREE
    if hclass.variant == core.LP:
        return EVEN if hclass.p % 2 == 0 else ODD
    if hclass.variant in (core.COSINE, core.SEPARATED_L2):
        return EVEN
    raise UnsupportedClass(f"no crossover for {hclass.variant}")


# ---------------------------------------------------------------------------
# sample complexity and the experimental predictor


@dataclass(frozen=True)
class SampleBound:
    value: float
    side: str
    agnostic: bool
    expression: str
    polylog_suppressed: bool = True

    def to_dict(self):
        return {"value": self.value, "side": self.side, "agnostic": self.agnostic,
                "expression": self.expression, "polylog_suppressed": self.polylog_suppressed,
                "suppressed_factor": "polylog(1/eps, 1/delta)"}


def sample_complexity(ndim: float, label_count: int, eps: float, delta: float,
                      agnostic: bool = False, side: str = "upper") -> SampleBound:
    """Leading-order sample count from the Natarajan dimension:
    ``ndim * log2|Y| / eps`` (``eps^2`` when agnostic) for the upper side,
    the same without ``log2|Y|`` for the lower side."""
    if not 0 < eps < 0.5:
        raise DomainError("eps must lie in (0, 1/2); 1/2 is achieved by guessing")
    if not 0 < delta < 1:
        raise DomainError("delta must lie in (0, 1)")
    if label_count < 2:
        raise DomainError("need at least two labels")
    if side not in ("upper", "lower"):
        raise DomainError(f"side must be 'upper' or 'lower', got {side!r}")
    power = 2 if agnostic else 1
    denom = eps ** power
    eps_txt = "eps^2" if agnostic else "eps"
    if side == "upper":
        return SampleBound(ndim * math.log2(label_count) / denom, side, agnostic,
                           f"Ndim * log2(|Y|) / {eps_txt}")
    return SampleBound(ndim / denom, side, agnostic, f"Ndim / {eps_txt}")


def predict_gap(n: int, m: float, k: int = 1, c: float = PREDICTOR_C) -> float:
    """``min(1/2, sqrt(n log2(k+1) / (c m)))``."""
    if n < 1 or k < 1:
        raise DomainError("n and k must be positive")
    if m <= 0:
        return 0.5
    return min(0.5, math.sqrt(n * math.log2(k + 1) / (c * m)))


# ---------------------------------------------------------------------------
# Johnson-Lindenstrauss


def jl_dimension(n: int, alpha: float) -> int:
    """``ceil(1000 ln n / alpha^2)`` (natural log)."""
    if n < 2 or not 0 < alpha < 1:
        raise DomainError("need n >= 2 and 0 < alpha < 1")
    return math.ceil(1000 * math.log(n) / alpha ** 2)


def jl_min_dimension(n: int, beta: float) -> int:
    """``ceil(15 ln n / beta^2)``, the target dimension for a
    ``(1 +- beta)`` distortion guarantee."""
    if n < 2 or not 0 < beta < 1:
        raise DomainError("need n >= 2 and 0 < beta < 1")
    return math.ceil(15 * math.log(n) / beta ** 2)


@dataclass(frozen=True)
class JLReport:
    d1: int
    min_ratio: float
    max_ratio: float
    distortion: float
    beta: float | None = None

    @property
    def within(self) -> bool | None:
        if self.beta is None:
            return None
        return 1 - self.beta <= self.min_ratio and self.max_ratio <= 1 + self.beta

    def to_dict(self):
        return {"d1": self.d1, "min_ratio": self.min_ratio, "max_ratio": self.max_ratio,
                "distortion": self.distortion, "beta": self.beta, "within": self.within,
                "log_base": "e"}


def jl_check(points, beta: float | None = None, d1: int | None = None, seed: int = 0,
             projection: str = "gaussian") -> JLReport:
    """Project ``points`` with a seeded Gaussian matrix scaled by
    ``1/sqrt(d1)`` and report the pairwise distance ratios.

    ``distortion`` is ``max(max_ratio, 1/min_ratio)``; 1 means isometric.
    ``projection="identity"`` skips the random map (needs ``d1`` equal to
    the input dimension, or unset).
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or len(pts) < 2:
        raise DomainError("need at least two points as rows of a matrix")
    if beta is not None and not 0 < beta < 1:
        raise DomainError("beta must lie in (0, 1)")
    n, dim = pts.shape
    if d1 is None:
        d1 = dim if projection == "identity" else jl_min_dimension(n, beta if beta else 0.5)
    if d1 < 1:
        raise DomainError("target dimension must be positive")
    if projection == "identity":
        if d1 != dim:
            raise DomainError("the identity map keeps the input dimension")
        proj = pts
    elif projection == "gaussian":
        rng = np.random.default_rng(seed)
        mat = rng.standard_normal((dim, d1)) / math.sqrt(d1)
        proj = pts @ mat
    else:
        raise DomainError(f"unknown projection {projection!r}")
    iu = np.triu_indices(n, 1)
    orig = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=2)[iu]
    new = np.linalg.norm(proj[:, None, :] - proj[None, :, :], axis=2)[iu]
    if np.any(orig == 0):
        raise DomainError("points must be distinct")
    ratio = new / orig
    lo, hi = float(ratio.min()), float(ratio.max())
    distortion = max(hi, 1 / lo) if lo > 0 else math.inf
    return JLReport(d1, lo, hi, distortion, beta)


# ---------------------------------------------------------------------------
# hemisphere probability


def hemisphere_bound(n: int, m: int) -> Fraction:
    """``2^{-(m-1)} sum_{k<n} C(m-1, k)``, clamped to 1: the chance that
    ``m`` randomly signed vectors in ``R^n`` miss the origin with their
    convex hull is at most this."""
    if n < 1 or m < 1:
        raise DomainError("need n >= 1 and m >= 1")
    total = sum(math.comb(m - 1, k) for k in range(n))
    return min(Fraction(1), Fraction(total, 2 ** (m - 1)))


@dataclass(frozen=True)
class MonteCarloResult:
    trials: int
    misses: int
    miss_probability: float
    half_width: float
    patterns_seen: int

    def to_dict(self):
        return {"trials": self.trials, "misses": self.misses,
                "miss_probability": self.miss_probability,
                "confidence_half_width": self.half_width, "sigma_multiplier": 3,
                "patterns_seen": self.patterns_seen}


BLOCK = 4096


def _pattern_misses(vectors, pattern, check_duality):
    signed = [tuple(v if (pattern >> i) & 1 == 0 else -v for v in vec)
              for i, vec in enumerate(vectors)]
    miss = not zero_in_hull(signed)
    if check_duality:
        # a separating direction exists exactly when the hull misses the origin
        if separating_direction(signed).feasible != miss:
            raise AssertionError(f"hull/separation disagreement on sign pattern {pattern}")
    return miss


def hemisphere_monte_carlo(vectors: Sequence[Sequence[float]], trials: int, seed: int = 0,
                           check_duality: bool = False) -> MonteCarloResult:
    """Draw uniform signs ``s``; a trial misses when ``0`` is outside the
    convex hull of ``{s_i v_i}``. The hull test depends only on the sign
    pattern, so each pattern is decided once (exactly) and cached.

    Trials are drawn in fixed blocks of 4096, block ``b`` seeded from
    ``(seed, b)``, so the result does not depend on how work is split.
    """
    if trials < 1:
        raise DomainError("need at least one trial")
    vecs = [tuple(Fraction(float(v)) for v in vec) for vec in vectors]
    m = len(vecs)
    if m < 1:
        raise DomainError("need at least one vector")
    if m > 62:
        raise DomainError("sign patterns are packed into 64-bit integers")
    weights = np.left_shift(np.int64(1), np.arange(m, dtype=np.int64))
    counts: dict[int, int] = {}
    done = 0
    block = 0
    while done < trials:
        size = min(BLOCK, trials - done)
        rng = np.random.default_rng([seed, block])
        bits = rng.integers(0, 2, size=(size, m), dtype=np.int64)
        patterns, freq = np.unique(bits @ weights, return_counts=True)
        for pat, f in zip(patterns.tolist(), freq.tolist()):
            counts[pat] = counts.get(pat, 0) + f
        done += size
        block += 1
    misses = sum(f for pat, f in counts.items() if _pattern_misses(vecs, pat, check_duality))
    prob = misses / trials
    half = 3 * math.sqrt(prob * (1 - prob) / trials)
    return MonteCarloResult(trials, misses, prob, half, len(counts))


# ---------------------------------------------------------------------------
# per-setting report


SETTINGS = ("arbitrary", "metric", "lp", "cosine", "tree", "class", "separated")


def _lp_lower(n, d):
    best = n // 3
    for dd in range(2, min(d, n - 1) + 1):
        best = max(best, (dd - 1) * (n - dd))
    return best


def separated_dimension(d: int, alpha: float) -> int:
    """Largest ``d' <= d`` in which the anchor construction stays
    ``(1 + alpha)``-separated: its worst squared-distance ratio is
    ``(d' - 3/4) / (d' - 7/4)``."""
    best = 1
    target = Fraction(1 + alpha) ** 2
    for dd in range(2, d + 1):
        if Fraction(4 * dd - 3, 4 * dd - 7) > target:
            best = dd
        else:
            break
    return best


@dataclass(frozen=True)
class BoundReport:
    setting: str
    params: dict
    vc_lower: int
    vc_upper_crossover: int
    natarajan_lower: int
    label_count: int
    sample_lower: dict
    sample_upper: dict
    notes: list = field(default_factory=list)

    def to_dict(self):
        return {"setting": self.setting, "params": self.params, "vc_lower": self.vc_lower,
                "vc_upper_crossover": self.vc_upper_crossover,
                "natarajan_lower": self.natarajan_lower, "label_count": self.label_count,
                "sample_lower": self.sample_lower, "sample_upper": self.sample_upper,
                "notes": self.notes}


def bound_report(setting: str, n: int, d: int | None = None, p: int | None = None, k: int = 1,
                 eps: float = 0.1, delta: float = 0.05, agnostic: bool = False,
                 alpha: float | None = None) -> BoundReport:
    """Dimension bounds for one setting plus the implied sample counts.

    With ``k`` negatives the Natarajan lower bound uses the construction on
    ``n - k + 1`` points and the upper bound is the triplet VC bound.
    """
    if setting not in SETTINGS:
        raise UnsupportedClass(f"unknown setting {setting!r}")
    if n < 3:
        raise DomainError("need n >= 3")
    if k < 1 or k > n - 2:
        raise DomainError("need 1 <= k <= n - 2")
    notes = ["log base e in JL dimensions", "polylog(1/eps, 1/delta) factors suppressed"]

    def lower(nn):
        if setting in ("arbitrary", "metric"):
            return (nn - 1) * (nn - 2) // 2
        if setting in ("lp", "cosine"):
            return _lp_lower(nn, d)
        if setting == "separated":
            return _lp_lower(nn, separated_dimension(d, alpha))
        return nn // 3

    if setting in ("lp", "cosine", "separated") and (d is None or d < 1):
        raise DomainError(f"{setting} needs d >= 1")
    if setting == "lp" and (p is None or p < 1):
        raise DomainError("lp needs p >= 1")
    if setting == "separated" and (alpha is None or not 0 < alpha < 1):
        raise DomainError("separated needs 0 < alpha < 1")

    if setting in ("arbitrary", "metric"):
        upper = vc_upper_crossover(ARBITRARY, n)
    elif setting == "tree":
        upper = vc_upper_crossover(TREE, n)
    elif setting == "class":
        upper = n
        notes.append("class upper bound: n same-class edges on n points contain a cycle")
    elif setting == "lp":
        kind = EVEN if p % 2 == 0 else ODD
        upper = min(vc_upper_crossover(kind, n, d, p), vc_upper_crossover(CONSTANT_D, n, d, p))
    elif setting == "cosine":
        upper = vc_upper_crossover(EVEN, n, d, 2)
    else:
        d_eff = min(d, jl_dimension(n, alpha))
        upper = vc_upper_crossover(EVEN, n, d_eff, 2)
        notes.append(f"separated upper bound uses dimension min(d, JL) = {d_eff}")
    upper = min(upper, n * n)
    vc_low = lower(n)
    nat_low = lower(n - k + 1)
    labels = k + 1
    s_low = sample_complexity(nat_low, labels, eps, delta, agnostic, "lower")
    s_up = sample_complexity(upper, labels, eps, delta, agnostic, "upper")
    params = {"n": n, "d": d, "p": p, "k": k, "eps": eps, "delta": delta,
              "agnostic": agnostic, "alpha": alpha}
    report = BoundReport(setting, params, vc_low, upper, nat_low, labels,
                         s_low.to_dict(), s_up.to_dict(), notes)
    assert report.vc_upper_crossover >= report.vc_lower
    return report
