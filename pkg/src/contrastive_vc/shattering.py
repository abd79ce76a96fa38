"""Shattering checks, a greedy dimension probe, and the explicit shattered
query families for each distance class."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import partial
from itertools import combinations
from typing import Callable, Sequence

import networkx as nx
import numpy as np

from . import core
from .core import (
    DEFAULT_CONFIG,
    KNEGATIVE,
    QUADRUPLET,
    TRIPLET,
    Config,
    DistanceModel,
    EmbeddingModel,
    HypothesisClass,
    LabelVector,
    MatrixModel,
    PartitionModel,
    QuerySet,
    Status,
)
from .errors import AbortedOnUnknown, CapExceeded, DimensionError, ValidationError
from .parallel import first_hit
from .realizability import realize

REFUTED = "refuted"
ABORT = "abort"


@dataclass(frozen=True)
class ShatterReport:
    queries: QuerySet
    shattered: bool
    refuter: LabelVector | None
    refuter_status: Status | None
    labelings_checked: int
    f_pairs: tuple[tuple[int, int], ...] | None = None

    def to_dict(self) -> dict:
        return {
            "n": self.queries.n,
            "kind": self.queries.kind,
            "queries": [list(q) for q in self.queries],
            "shattered": self.shattered,
            "refuter": None if self.refuter is None else list(self.refuter),
            "refuter_status": None if self.refuter_status is None else self.refuter_status.value,
            "labelings_checked": self.labelings_checked,
            "f_pairs": None if self.f_pairs is None else [list(f) for f in self.f_pairs],
        }


def may_be_unknown(hclass: HypothesisClass, exact_odd_p: bool = False) -> bool:
    """Whether :func:`realize` can answer UNKNOWN for this class."""
    if hclass.variant in (core.COSINE, core.SEPARATED_L2):
        return True
    if hclass.variant == core.LP:
        return hclass.d > 1 and not (exact_odd_p and hclass.p == 1)
    return False


def labeling(index: int, m: int, f_pairs=None) -> LabelVector:
    """Labeling number ``index`` in lexicographic order (first query is the
    most significant bit)."""
    bits = [(index >> (m - 1 - i)) & 1 for i in range(m)]
    if f_pairs is None:
        return tuple(bits)
    return tuple(f[b] for f, b in zip(f_pairs, bits))


def _check_labeling(index, qs, hclass, f_pairs, config, exact_odd_p):
    labels = labeling(index, len(qs), f_pairs)
    verdict = realize(qs, labels, hclass, config, exact_odd_p=exact_odd_p, workers=1)
    return None if verdict.sat else verdict.status


def is_shattered(qs: QuerySet, hclass: HypothesisClass, accept_unknown: str | None = None,
                 f_pairs: Sequence[tuple[int, int]] | None = None,
                 config: Config = DEFAULT_CONFIG, exact_odd_p: bool = False,
                 workers: int | None = None) -> ShatterReport:
    """Realize every labeling of ``qs``; shattered iff all are SAT.

    k-negative query sets are checked in Natarajan mode: per query the label
    is one of the pair ``f_pairs[i]`` (default: the first two candidates).
    ``accept_unknown`` must be ``"refuted"`` or ``"abort"`` for classes
    whose checker is numeric.
    """
    m = len(qs)
    if 2 ** m > config.shatter_cap:
        raise CapExceeded(f"2^{m} labelings exceed the cap {config.shatter_cap}")
    if accept_unknown not in (None, REFUTED, ABORT):
        raise ValidationError(f"unknown policy {accept_unknown!r}")
    if accept_unknown is None and may_be_unknown(hclass, exact_odd_p):
        raise ValidationError(f"{hclass.variant} uses a numeric checker; pass accept_unknown "
                              f"as {REFUTED!r} or {ABORT!r}")
    if qs.kind == KNEGATIVE:
        f_pairs = tuple((0, 1) for _ in range(m)) if f_pairs is None else \
            tuple((int(a), int(b)) for a, b in f_pairs)
        if len(f_pairs) != m:
            raise ValidationError("need one (f1, f2) pair per query")
        for a, b in f_pairs:
            if a == b or not (0 <= a < qs.n_options and 0 <= b < qs.n_options):
                raise ValidationError(f"bad label pair {(a, b)}")
    elif f_pairs is not None:
        raise ValidationError("label pairs apply to k-negative queries only")
    workers = config.workers if workers is None else workers
    fn = partial(_check_labeling, qs=qs, hclass=hclass, f_pairs=f_pairs, config=config,
                 exact_odd_p=exact_odd_p)
    hit = first_hit(fn, range(2 ** m), workers)
    if hit is None:
        return ShatterReport(qs, True, None, None, 2 ** m, f_pairs)
    index, status = hit
    if status == Status.UNKNOWN and accept_unknown == ABORT:
        raise AbortedOnUnknown(f"labeling {labeling(index, m, f_pairs)} came back UNKNOWN")
    return ShatterReport(qs, False, labeling(index, m, f_pairs), status, index + 1, f_pairs)


# ---------------------------------------------------------------------------
# greedy search


def candidate_queries(n: int, kind: str = TRIPLET) -> list[tuple[int, ...]]:
    """All queries on ``n`` points up to symmetries that leave the set of
    labelings unchanged (candidate order, pair orientation)."""
    if kind == TRIPLET:
        return [(x, a, b) for x in range(n) for a, b in combinations(range(n), 2) if x not in (a, b)]
    if kind == QUADRUPLET:
        pairs = list(combinations(range(n), 2))
        return [p + q for p, q in combinations(pairs, 2)]
    raise ValidationError(f"no candidate generator for {kind} queries")


@dataclass(frozen=True)
class SearchResult:
    queries: QuerySet
    size: int
    sets_checked: int

    def to_dict(self):
        return {"n": self.queries.n, "kind": self.queries.kind, "size": self.size,
                "queries": [list(q) for q in self.queries], "sets_checked": self.sets_checked,
                "bound": "lower"}


def vc_search(n: int, hclass: HypothesisClass, max_queries: int | None = None, budget: int = 4,
              seed: int = 0, kind: str = TRIPLET, config: Config = DEFAULT_CONFIG,
              max_n: int = 8, workers: int | None = None) -> SearchResult:
    """Greedy growth of a shattered set, restarted ``budget`` times on
    shuffled candidate orders (the first pass uses the natural order).

    The result is a shattered set, so its size is a lower bound on the
    dimension and nothing more. UNKNOWN verdicts count as refutations.
    """
    if n > max_n:
        raise CapExceeded(f"vc_search capped at n = {max_n}")
    cands = candidate_queries(n, kind)
    rng = np.random.default_rng(seed)
    limit = max_queries if max_queries is not None else len(cands)
    limit = min(limit, int(math.log2(config.shatter_cap)))
    policy = REFUTED if may_be_unknown(hclass) else None
    best: tuple[tuple[int, ...], ...] = ()
    checked = 0
    for restart in range(max(1, budget)):
        order = list(range(len(cands))) if restart == 0 else list(rng.permutation(len(cands)))
        current: tuple[tuple[int, ...], ...] = ()
        for idx in order:
            if len(current) >= limit:
                break
            trial = QuerySet(n, current + (cands[idx],), kind)
            checked += 1
            if is_shattered(trial, hclass, policy, config=config, workers=workers).shattered:
                current = trial.queries
        if len(current) > len(best):
            best = current
        if len(best) >= limit:
            break
    return SearchResult(QuerySet(n, best, kind), len(best), checked)


# ---------------------------------------------------------------------------
# explicit constructions


@dataclass(frozen=True)
class Construction:
    """A query family together with a map from labelings to witnesses."""

    family: str
    queries: QuerySet
    build: Callable[[Sequence[int]], DistanceModel]
    params: dict

    def verify(self, extra_check: Callable[[DistanceModel, LabelVector], None] | None = None) -> int:
        """Exactly re-check the witness of every labeling; returns the count."""
        m = len(self.queries)
        for index in range(2 ** m):
            labels = labeling(index, m)
            model = self.build(labels)
            got = core.induced_labels(model, self.queries)
            if got != labels:
                raise AssertionError(f"{self.family} witness for {labels} induces {got}")
            if extra_check is not None:
                extra_check(model, labels)
        return 2 ** m


def _check_dims(n, d):
    if not 1 < d < n:
        raise DimensionError(f"construction needs 1 < d < n, got n={n}, d={d}")


def _anchor_queries(n, d):
    # points 0..d-1 sit on the basis vectors, d..n-1 are anchors
    return tuple((x, 0, j) for x in range(d, n) for j in range(1, d))


def _anchor_coords(n, d, labels):
    half = Fraction(1, 2)
    pts = [[Fraction(int(i == j)) for j in range(d)] for i in range(d)]
    it = iter(labels)
    for _ in range(d, n):
        row = [half] + [Fraction(next(it)) for _ in range(1, d)]
        pts.append(row)
    return pts


def construct_lp(n: int, d: int, p: int) -> Construction:
    """``(d-1)(n-d)`` queries ``(x, v_1, v_j)`` shattered in l_p^d: ``v_j``
    sits on ``e_j``; anchor ``x`` has first coordinate 1/2 and ``j``-th
    coordinate 0 when ``v_1`` wins, 1 when ``v_j`` wins."""
    _check_dims(n, d)
    qs = QuerySet(n, _anchor_queries(n, d))

    def build(labels):
        return EmbeddingModel(tuple(map(tuple, _anchor_coords(n, d, labels))), p=p)

    return Construction("lp", qs, build, {"n": n, "d": d, "p": p})


def construct_cosine(n: int, d: int) -> Construction:
    """Same queries as :func:`construct_lp`; the anchor vectors are used as
    directions (cosine ignores their length)."""
    _check_dims(n, d)
    qs = QuerySet(n, _anchor_queries(n, d))

    def build(labels):
        return EmbeddingModel(tuple(map(tuple, _anchor_coords(n, d, labels))), metric="cosine")

    return Construction("cosine", qs, build, {"n": n, "d": d})


def sphere_cross_check(model: EmbeddingModel, qs: QuerySet, labels: Sequence[int]) -> None:
    """Normalise a cosine witness onto the unit sphere and confirm that l2
    distances there induce the same labels."""
    pts = np.array([[float(v) for v in row] for row in model.points])
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    l2 = EmbeddingModel(tuple(map(tuple, pts.tolist())), p=2)
    got = core.induced_labels(l2, qs)
    if got != tuple(labels):
        raise AssertionError(f"sphere l2 labels {got} differ from cosine labels {tuple(labels)}")


def construct_arbitrary(n: int) -> Construction:
    """Queries ``(v_i, v_j, v_{j+1})`` for ``i < j < n - 1``. Per anchor the
    labels orient a path, and its topological rank gives the distances
    ``rho(v_i, v_j) = n + rank``, all inside ``[n, 2n]``."""
    if n < 3:
        raise DimensionError("the arbitrary-distance construction needs n >= 3")
    queries = tuple((i, j, j + 1) for i in range(n) for j in range(i + 1, n - 1))
    qs = QuerySet(n, queries)

    def build(labels):
        lab = dict(zip(queries, labels))
        vals = [[0] * n for _ in range(n)]
        for i in range(n):
            path = nx.DiGraph()
            path.add_nodes_from(range(i + 1, n))
            for j in range(i + 1, n - 1):
                # edges point from the positive towards the negative
                path.add_edge(*((j, j + 1) if lab[(i, j, j + 1)] == 0 else (j + 1, j)))
            for rank, j in enumerate(nx.lexicographical_topological_sort(path), start=1):
                vals[i][j] = vals[j][i] = n + rank
        return MatrixModel(tuple(map(tuple, vals)))

    return Construction("arbitrary", qs, build, {"n": n})


def triangle_check(model: MatrixModel, labels=None) -> None:
    if not model.is_metric():
        raise AssertionError("witness violates the triangle inequality")


def construct_class(n: int) -> Construction:
    """``floor(n/3)`` disjoint triplets; the labeled positive joins its anchor
    in class 0, the negative goes to class 1."""
    if n < 3:
        raise DimensionError("the class construction needs n >= 3")
    queries = tuple((3 * t, 3 * t + 1, 3 * t + 2) for t in range(n // 3))
    qs = QuerySet(n, queries)

    def build(labels):
        classes = [0] * n
        for (x, a, b), lab in zip(queries, labels):
            classes[b if lab == 0 else a] = 1
        return PartitionModel(tuple(classes), 2)

    return Construction("class", qs, build, {"n": n})


def construct(family: str, n: int, d: int | None = None, p: int | None = None) -> Construction:
    if family == "lp":
        if d is None or p is None:
            raise ValidationError("the lp family needs d and p")
        return construct_lp(n, d, p)
    if family == "cosine":
        if d is None:
            raise ValidationError("the cosine family needs d")
        return construct_cosine(n, d)
    if family == "arbitrary":
        return construct_arbitrary(n)
    if family == "class":
        return construct_class(n)
    raise ValidationError(f"unknown construction family {family!r}")


def verify_construction(c: Construction) -> int:
    """Verify with the family's extra check (triangle inequality for the
    arbitrary family, the sphere l2 cross-check for cosine)."""
    if c.family == "arbitrary":
        return c.verify(triangle_check)
    if c.family == "cosine":
        return c.verify(lambda model, labels: sphere_cross_check(model, c.queries, labels))
    return c.verify()


def construction_hclass(c: Construction) -> HypothesisClass:
    if c.family == "lp":
        return HypothesisClass.lp(c.params["p"], c.params["d"])
    if c.family == "cosine":
        return HypothesisClass.cosine(c.params["d"])
    if c.family == "arbitrary":
        return HypothesisClass.metric()
    return HypothesisClass.class_partition()


def lift_knegative(qs: QuerySet, k: int) -> QuerySet:
    """Append ``k - 1`` fresh outlier points as extra negatives to every
    triplet; the lifted set is Natarajan-shattered with the default label
    pairs whenever ``qs`` is shattered."""
    if qs.kind != TRIPLET:
        raise ValidationError("only triplet sets can be lifted")
    outliers = tuple(range(qs.n, qs.n + k - 1))
    return QuerySet(qs.n + k - 1, tuple(q + outliers for q in qs), KNEGATIVE, k)
