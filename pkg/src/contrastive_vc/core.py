"""Domain types: query sets, labelings, hypothesis classes, distance models,
feasibility verdicts, and the JSON query-set file format.

Points are abstract indices ``0..n-1``. A label is the 0-based position of
the winning candidate inside a query:

* triplet ``(x, a, b)``: ``0`` means ``a`` is the positive (closer to ``x``),
  ``1`` means ``b`` is; :data:`EQUAL` marks an equality label (class
  partitions only).
* quadruplet ``(a, b, c, d)``: ``0`` means pair ``{a, b}`` is closer than
  ``{c, d}``, ``1`` the reverse.
* k-negative ``(x, x_1, ..., x_{k+1})``: ``i`` means ``x_{i+1}`` is the
  positive and every other candidate a negative.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Iterable, Sequence

from .errors import TieError, ValidationError

TRIPLET = "triplet"
QUADRUPLET = "quadruplet"
KNEGATIVE = "knegative"
KINDS = (TRIPLET, QUADRUPLET, KNEGATIVE)

EQUAL = -1

LabelVector = tuple[int, ...]


@dataclass(frozen=True)
class Config:
    """Numeric tolerances and enumeration caps shared by all checkers."""

    tie_tol: float = 1e-9
    recheck_margin: float = 1e-6
    hinge_margin: float = 1e-3
    restarts: int = 20
    max_iter: int = 400
    seed: int = 0
    line_cap: int = 8
    tree_cap: int = 6
    exact_odd_p_cap: int = 12
    branch_cap: int = 2**16
    shatter_cap: int = 2**20
    workers: int = 1


DEFAULT_CONFIG = Config()


# ---------------------------------------------------------------------------
# queries and labels


@dataclass(frozen=True)
class QuerySet:
    n: int
    queries: tuple[tuple[int, ...], ...]
    kind: str = TRIPLET
    k: int | None = None
    allow_duplicates: bool = False

    def __post_init__(self):
        try:
            queries = tuple(tuple(int(i) for i in q) for q in self.queries)
        except TypeError as exc:
            raise ValidationError(f"queries must be sequences of indices: {exc}") from None
        object.__setattr__(self, "queries", queries)
        if self.kind not in KINDS:
            raise ValidationError(f"unknown query kind {self.kind!r}")
        if not isinstance(self.n, int) or self.n < 1:
            raise ValidationError(f"n must be a positive integer, got {self.n!r}")
        if self.kind == KNEGATIVE:
            if not isinstance(self.k, int) or self.k < 1:
                raise ValidationError("k-negative queries need an integer k >= 1")
        elif self.k is not None:
            raise ValidationError(f"k is only meaningful for k-negative queries")
        width = self.width
        for q in queries:
            if len(q) != width:
                raise ValidationError(f"query {q} has {len(q)} entries, expected {width}")
            if any(i < 0 or i >= self.n for i in q):
                raise ValidationError(f"query {q} has an index outside 0..{self.n - 1}")
            if self.kind == QUADRUPLET:
                a, b, c, d = q
                if a == b or c == d:
                    raise ValidationError(f"quadruplet {q} pairs a point with itself")
                if {a, b} == {c, d}:
                    raise ValidationError(f"quadruplet {q} compares a pair with itself")
            elif len(set(q)) != len(q):
                raise ValidationError(f"query {q} repeats a point")
        if not self.allow_duplicates and len(set(queries)) != len(queries):
            raise ValidationError("duplicate queries (set allow_duplicates to permit)")

    @property
    def width(self) -> int:
        if self.kind == TRIPLET:
            return 3
        if self.kind == QUADRUPLET:
            return 4
        return self.k + 2

    @property
    def n_options(self) -> int:
        """Number of distinct non-equality labels per query."""
        return self.k + 1 if self.kind == KNEGATIVE else 2

    def __len__(self) -> int:
        return len(self.queries)

    def __iter__(self):
        return iter(self.queries)

    def pairs(self, query: Sequence[int]) -> list[tuple[int, int]]:
        """The point pairs whose distances the query compares, in candidate order."""
        if self.kind == QUADRUPLET:
            a, b, c, d = query
            return [_pair(a, b), _pair(c, d)]
        x = query[0]
        return [_pair(x, y) for y in query[1:]]

    def subset(self, indices: Iterable[int]) -> "QuerySet":
        return QuerySet(self.n, tuple(self.queries[i] for i in indices), self.kind,
                        self.k, self.allow_duplicates)

    def extended(self, query: Sequence[int]) -> "QuerySet":
        return QuerySet(self.n, self.queries + (tuple(query),), self.kind, self.k,
                        self.allow_duplicates)


def _pair(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


def validate_labels(qs: QuerySet, labels: Sequence[int], allow_equal: bool = False) -> LabelVector:
    labels = tuple(int(v) for v in labels)
    if len(labels) != len(qs):
        raise ValidationError(f"{len(labels)} labels for {len(qs)} queries")
    for v in labels:
        if v == EQUAL:
            if not allow_equal or qs.kind != TRIPLET:
                raise ValidationError("equality labels are only allowed for triplets "
                                      "under the class-partition hypothesis class")
        elif not 0 <= v < qs.n_options:
            raise ValidationError(f"label {v} out of range 0..{qs.n_options - 1}")
    return labels


# ---------------------------------------------------------------------------
# hypothesis classes

ARBITRARY = "arbitrary"
METRIC = "metric"
LP = "lp"
COSINE = "cosine"
TREE = "tree"
CLASS_PARTITION = "class_partition"
SEPARATED_L2 = "separated_l2"
VARIANTS = (ARBITRARY, METRIC, LP, COSINE, TREE, CLASS_PARTITION, SEPARATED_L2)


@dataclass(frozen=True)
class HypothesisClass:
    variant: str
    p: int | None = None
    d: int | None = None
    alpha: float | None = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValidationError(f"unknown hypothesis class {self.variant!r}")
        needs_d = self.variant in (LP, COSINE, SEPARATED_L2)
        if needs_d:
            if not isinstance(self.d, int) or self.d < 1:
                raise ValidationError(f"{self.variant} needs an integer dimension d >= 1")
        elif self.d is not None:
            raise ValidationError(f"{self.variant} takes no dimension")
        if self.variant == LP:
            if not isinstance(self.p, int) or self.p < 1:
                raise ValidationError("lp needs an integer p >= 1")
        elif self.p is not None and not (self.variant == SEPARATED_L2 and self.p == 2):
            raise ValidationError(f"{self.variant} takes no p")
        if self.variant == SEPARATED_L2:
            if self.alpha is None or not 0 < self.alpha < 1:
                raise ValidationError("separated_l2 needs 0 < alpha < 1")
        elif self.alpha is not None:
            raise ValidationError(f"{self.variant} takes no alpha")

    @classmethod
    def arbitrary(cls):
        return cls(ARBITRARY)

    @classmethod
    def metric(cls):
        return cls(METRIC)

    @classmethod
    def lp(cls, p: int, d: int):
        return cls(LP, p=p, d=d)

    @classmethod
    def cosine(cls, d: int):
        return cls(COSINE, d=d)

    @classmethod
    def tree(cls):
        return cls(TREE)

    @classmethod
    def class_partition(cls):
        return cls(CLASS_PARTITION)

    @classmethod
    def separated_l2(cls, d: int, alpha: float):
        return cls(SEPARATED_L2, d=d, alpha=alpha)

    @property
    def norm_p(self) -> int | None:
        if self.variant == LP:
            return self.p
        if self.variant in (COSINE, SEPARATED_L2):
            return 2
        return None

    def to_dict(self) -> dict:
        out: dict[str, Any] = {"variant": self.variant}
        if self.variant == LP:
            out["p"] = self.p
        if self.d is not None:
            out["d"] = self.d
        if self.alpha is not None:
            out["alpha"] = self.alpha
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "HypothesisClass":
        if not isinstance(data, dict):
            raise ValidationError("class must be an object")
        unknown = set(data) - {"variant", "p", "d", "alpha"}
        if unknown:
            raise ValidationError(f"unknown class fields: {sorted(unknown)}")
        if "variant" not in data:
            raise ValidationError("class needs a variant")
        return cls(data["variant"], data.get("p"), data.get("d"), data.get("alpha"))


# ---------------------------------------------------------------------------
# distance models


def _is_exact(value) -> bool:
    return isinstance(value, (int, Fraction)) and not isinstance(value, bool)


def _sign(value) -> int:
    return (value > 0) - (value < 0)


def _sign_sqrt_diff(p, q, r, s) -> int:
    """Exact sign of ``p / sqrt(q) - r / sqrt(s)`` for rationals, ``q, s > 0``."""
    sp, sr = _sign(p), _sign(r)
    if sp != sr:
        return _sign(sp - sr)
    # same sign: compare p^2 s with r^2 q, flipping when both negative
    return sp * _sign(p * p * s - r * r * q)


class DistanceModel:
    """Common interface: ``compare(pair1, pair2, tol)`` returns the sign of
    ``rho(pair1) - rho(pair2)``, with 0 meaning a tie (exact or inside the
    tolerance band for floating-point models)."""

    n: int
    exact: bool
    allows_ties = False

    def distance(self, u: int, v: int):
        raise NotImplementedError

    def _check(self, *points: int):
        for u in points:
            if not 0 <= u < self.n:
                raise IndexError(f"point {u} not covered by a model on {self.n} points")

    def compare(self, pair1, pair2, tol: float = DEFAULT_CONFIG.tie_tol) -> int:
        self._check(*pair1, *pair2)
        diff = self.distance(*pair1) - self.distance(*pair2)
        if self.exact:
            return _sign(diff)
        return 0 if abs(diff) <= tol else _sign(diff)

    def gap(self, pair1, pair2):
        """``rho(pair2) - rho(pair1)`` in the model's comparison units."""
        return self.distance(*pair2) - self.distance(*pair1)

    def to_dict(self) -> dict:
        raise NotImplementedError


def _num(v):
    if isinstance(v, Fraction):
        return str(v) if v.denominator != 1 else v.numerator
    return v


def _parse_num(v):
    if isinstance(v, str):
        return Fraction(v)
    return v


@dataclass(frozen=True)
class MatrixModel(DistanceModel):
    values: tuple[tuple[Any, ...], ...]

    def __post_init__(self):
        values = tuple(tuple(row) for row in self.values)
        object.__setattr__(self, "values", values)
        n = len(values)
        if any(len(row) != n for row in values):
            raise ValidationError("distance matrix must be square")
        for i in range(n):
            if values[i][i] != 0:
                raise ValidationError("distance matrix needs a zero diagonal")
            for j in range(n):
                if values[i][j] != values[j][i]:
                    raise ValidationError("distance matrix must be symmetric")
                if values[i][j] < 0:
                    raise ValidationError("distances must be nonnegative")

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def exact(self) -> bool:
        return all(_is_exact(v) for row in self.values for v in row)

    def distance(self, u, v):
        return self.values[u][v]

    def is_metric(self) -> bool:
        n = self.n
        vals = self.values
        return all(vals[i][j] <= vals[i][k] + vals[k][j]
                   for i in range(n) for j in range(n) for k in range(n))

    def to_dict(self):
        return {"type": "matrix", "values": [[_num(v) for v in row] for row in self.values]}


@dataclass(frozen=True)
class EmbeddingModel(DistanceModel):
    """Points in R^d compared by ``||f(x) - f(y)||_p`` or, with
    ``metric="cosine"``, by cosine similarity (larger cosine = closer)."""

    points: tuple[tuple[Any, ...], ...]
    p: int = 2
    metric: str = "lp"

    def __post_init__(self):
        pts = tuple(tuple(v.item() if hasattr(v, "item") else v for v in row) for row in self.points)
        object.__setattr__(self, "points", pts)
        if not pts:
            raise ValidationError("embedding needs at least one point")
        d = len(pts[0])
        if d < 1 or any(len(row) != d for row in pts):
            raise ValidationError("all embedded points need the same dimension >= 1")
        if self.metric not in ("lp", "cosine"):
            raise ValidationError(f"unknown embedding metric {self.metric!r}")
        if self.metric == "lp" and (not isinstance(self.p, int) or self.p < 1):
            raise ValidationError("embedding p must be an integer >= 1")
        if self.metric == "cosine" and any(all(v == 0 for v in row) for row in pts):
            raise ValidationError("cosine similarity is undefined for the zero vector")

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def dim(self) -> int:
        return len(self.points[0])

    @property
    def exact(self) -> bool:
        return all(_is_exact(v) for row in self.points for v in row)

    def _power_sum(self, u, v):
        p = self.p
        return sum(abs(a - b) ** p for a, b in zip(self.points[u], self.points[v]))

    def _cos_parts(self, u, v):
        x, y = self.points[u], self.points[v]
        dot = sum(a * b for a, b in zip(x, y))
        norms = sum(a * a for a in x) * sum(b * b for b in y)
        return dot, norms

    def distance(self, u, v):
        if self.metric == "cosine":
            dot, norms = self._cos_parts(u, v)
            return 1.0 - float(dot) / math.sqrt(float(norms))
        s = self._power_sum(u, v)
        return float(s) ** (1.0 / self.p)

    def compare(self, pair1, pair2, tol: float = DEFAULT_CONFIG.tie_tol) -> int:
        self._check(*pair1, *pair2)
        if self.exact:
            if self.metric == "cosine":
                # rho = 1 - cos, so the comparison flips
                p, q = self._cos_parts(*pair1)
                r, s = self._cos_parts(*pair2)
                return -_sign_sqrt_diff(p, q, r, s)
            return _sign(self._power_sum(*pair1) - self._power_sum(*pair2))
        diff = self.distance(*pair1) - self.distance(*pair2)
        return 0 if abs(diff) <= tol else _sign(diff)

    def gap(self, pair1, pair2):
        if self.exact and self.metric == "lp":
            return self._power_sum(*pair2) - self._power_sum(*pair1)
        return self.distance(*pair2) - self.distance(*pair1)

    def to_dict(self):
        return {"type": "embedding", "metric": self.metric, "p": self.p,
                "points": [[_num(v) for v in row] for row in self.points]}


@dataclass(frozen=True)
class TreeModel(DistanceModel):
    """Weighted tree on vertices ``0..n_vertices-1``; point ``i`` sits on
    leaf ``leaves[i]``."""

    n_vertices: int
    edges: tuple[tuple[int, int, Any], ...]
    leaves: tuple[int, ...]
    _dist: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        edges = tuple((int(u), int(v), w) for u, v, w in self.edges)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "leaves", tuple(self.leaves))
        nv = self.n_vertices
        if len(edges) != nv - 1:
            raise ValidationError("a tree on V vertices has exactly V - 1 edges")
        adj: dict[int, list[tuple[int, Any]]] = {v: [] for v in range(nv)}
        for u, v, w in edges:
            if not (0 <= u < nv and 0 <= v < nv) or u == v:
                raise ValidationError(f"bad tree edge {(u, v)}")
            if w < 0:
                raise ValidationError("tree edge weights must be nonnegative")
            adj[u].append((v, w))
            adj[v].append((u, w))
        if len(set(self.leaves)) != len(self.leaves):
            raise ValidationError("points must sit on distinct leaves")
        for leaf in self.leaves:
            if not 0 <= leaf < nv:
                raise ValidationError(f"leaf {leaf} is not a tree vertex")
            if nv > 1 and len(adj[leaf]) != 1:
                raise ValidationError(f"vertex {leaf} is not a leaf")
        dist = {}
        for src in set(self.leaves):
            seen = {src: 0}
            stack = [src]
            while stack:
                u = stack.pop()
                for v, w in adj[u]:
                    if v not in seen:
                        seen[v] = seen[u] + w
                        stack.append(v)
            if len(seen) != nv:
                raise ValidationError("tree is not connected")
            dist[src] = seen
        object.__setattr__(self, "_dist", dist)

    @property
    def n(self) -> int:
        return len(self.leaves)

    @property
    def exact(self) -> bool:
        return all(_is_exact(w) for _, _, w in self.edges)

    def distance(self, u, v):
        return self._dist[self.leaves[u]][self.leaves[v]]

    def to_dict(self):
        return {"type": "tree", "n_vertices": self.n_vertices,
                "edges": [[u, v, _num(w)] for u, v, w in self.edges],
                "leaves": list(self.leaves)}


@dataclass(frozen=True)
class PartitionModel(DistanceModel):
    """Class indicator distance: 0 inside a class, 1 across classes.
    ``n_classes`` may exceed the number of used ids (padding)."""

    classes: tuple[int, ...]
    n_classes: int | None = None

    allows_ties = True

    def __post_init__(self):
        classes = tuple(int(c) for c in self.classes)
        object.__setattr__(self, "classes", classes)
        if any(c < 0 for c in classes):
            raise ValidationError("class ids must be nonnegative")
        used = len(set(classes))
        if self.n_classes is None:
            object.__setattr__(self, "n_classes", used)
        elif self.n_classes < used:
            raise ValidationError("n_classes smaller than the number of used class ids")

    @property
    def n(self) -> int:
        return len(self.classes)

    exact = True

    def distance(self, u, v):
        return 0 if self.classes[u] == self.classes[v] else 1

    def to_dict(self):
        return {"type": "partition", "classes": list(self.classes), "n_classes": self.n_classes}


def model_from_dict(data: dict) -> DistanceModel:
    kind = data.get("type")
    if kind == "matrix":
        return MatrixModel(tuple(tuple(_parse_num(v) for v in row) for row in data["values"]))
    if kind == "embedding":
        pts = tuple(tuple(_parse_num(v) for v in row) for row in data["points"])
        return EmbeddingModel(pts, data.get("p", 2), data.get("metric", "lp"))
    if kind == "tree":
        return TreeModel(data["n_vertices"],
                         tuple((u, v, _parse_num(w)) for u, v, w in data["edges"]),
                         tuple(data["leaves"]))
    if kind == "partition":
        return PartitionModel(tuple(data["classes"]), data.get("n_classes"))
    raise ValidationError(f"unknown model type {kind!r}")


# ---------------------------------------------------------------------------
# labels induced by a model


def _infer_kind(query: Sequence[int], kind: str | None) -> str:
    if kind is not None:
        return kind
    if len(query) == 3:
        return TRIPLET
    raise ValidationError("kind must be given for queries that are not triplets")


def _query_pairs(query, kind):
    if kind == QUADRUPLET:
        a, b, c, d = query
        return [(a, b), (c, d)]
    x = query[0]
    return [(x, y) for y in query[1:]]


def evaluate_label(model: DistanceModel, query: Sequence[int], kind: str | None = None,
                   tol: float = DEFAULT_CONFIG.tie_tol) -> int:
    """Label that ``model`` induces on ``query``.

    Raises :class:`TieError` when the compared distances are equal (within
    ``tol`` for floating-point models), except that class partitions return
    :data:`EQUAL` for tied triplets.
    """
    kind = _infer_kind(query, kind)
    pairs = _query_pairs(query, kind)
    if kind in (TRIPLET, QUADRUPLET):
        s = model.compare(pairs[0], pairs[1], tol)
        if s == 0:
            if model.allows_ties and kind == TRIPLET:
                return EQUAL
            raise TieError(f"tied distances on query {tuple(query)}")
        return 0 if s < 0 else 1
    best = 0
    for i in range(1, len(pairs)):
        if model.compare(pairs[i], pairs[best], tol) < 0:
            best = i
    for i in range(len(pairs)):
        if i != best and model.compare(pairs[i], pairs[best], tol) == 0:
            raise TieError(f"no unique closest candidate on query {tuple(query)}")
    return best


def induced_labels(model: DistanceModel, qs: QuerySet, tol: float = DEFAULT_CONFIG.tie_tol) -> LabelVector:
    return tuple(evaluate_label(model, q, qs.kind, tol) for q in qs)


def label_margin(model: DistanceModel, query: Sequence[int], label: int, kind: str | None = None):
    """Slack of a labeled query under ``model``: the smallest gap between a
    negative distance and the positive distance (0 for equality labels).
    Negative when the model violates the label."""
    kind = _infer_kind(query, kind)
    pairs = _query_pairs(query, kind)
    if label == EQUAL:
        return -abs(model.gap(pairs[0], pairs[1]))
    pos = pairs[label]
    return min(model.gap(pos, other) for i, other in enumerate(pairs) if i != label)


def verdict_margin(model: DistanceModel, qs: QuerySet, labels: Sequence[int]):
    """Minimum slack over all labeled queries (``None`` for an empty set)."""
    margins = [label_margin(model, q, v, qs.kind) for q, v in zip(qs, labels) if v != EQUAL]
    return min(margins) if margins else None


# ---------------------------------------------------------------------------
# verdicts


class Status(str, Enum):
    SAT = "SAT"
    UNSAT = "UNSAT"
    UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class CycleCertificate:
    """Pairs ``p_0 -> p_1 -> ... -> p_0``: each pair must be strictly closer
    than the next, which no distance function satisfies."""

    pairs: tuple[tuple[int, int], ...]

    def to_dict(self):
        return {"type": "cycle", "pairs": [list(p) for p in self.pairs]}


@dataclass(frozen=True)
class UnionFindConflict:
    """``chain`` is a path of same-class constraints from ``different[0]``
    to ``different[1]``, which are also required to be in different classes."""

    chain: tuple[int, ...]
    different: tuple[int, int]
    branches: int = 1

    def to_dict(self):
        return {"type": "union_find_conflict", "chain": list(self.chain),
                "different": list(self.different), "branches": self.branches}


@dataclass(frozen=True)
class ExhaustedEnumeration:
    count: int
    what: str

    def to_dict(self):
        return {"type": "exhausted_enumeration", "count": self.count, "what": self.what}


@dataclass(frozen=True)
class FeasibilityVerdict:
    status: Status
    witness: DistanceModel | None = None
    certificate: Any = None
    margin: Any = None
    checker: str = ""

    def __post_init__(self):
        if self.status == Status.UNSAT and self.certificate is None:
            raise ValidationError("UNSAT verdicts need a certificate")
        if self.status == Status.UNKNOWN and (self.witness is not None or self.certificate is not None):
            raise ValidationError("UNKNOWN verdicts carry neither witness nor certificate")
        if self.status == Status.SAT and self.certificate is not None:
            raise ValidationError("SAT verdicts carry no certificate")

    @property
    def sat(self) -> bool:
        return self.status == Status.SAT

    def to_dict(self) -> dict:
        return {
            "status": self.status.value,
            "checker": self.checker,
            "witness": None if self.witness is None else self.witness.to_dict(),
            "certificate": None if self.certificate is None else self.certificate.to_dict(),
            "margin": None if self.margin is None else _num(self.margin),
        }


# ---------------------------------------------------------------------------
# JSON query-set file

_FILE_FIELDS = {"n", "kind", "k", "class", "queries", "labels", "allow_duplicates"}


@dataclass(frozen=True)
class QueryFile:
    queries: QuerySet
    hclass: HypothesisClass | None = None
    labels: LabelVector | None = None

    def to_dict(self) -> dict:
        qs = self.queries
        out: dict[str, Any] = {"n": qs.n, "kind": qs.kind}
        if qs.k is not None:
            out["k"] = qs.k
        if self.hclass is not None:
            out["class"] = self.hclass.to_dict()
        out["queries"] = [list(q) for q in qs]
        if self.labels is not None:
            out["labels"] = list(self.labels)
        if qs.allow_duplicates:
            out["allow_duplicates"] = True
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: Any) -> "QueryFile":
        if not isinstance(data, dict):
            raise ValidationError("query-set file must hold a JSON object")
        unknown = set(data) - _FILE_FIELDS
        if unknown:
            raise ValidationError(f"unknown fields in query-set file: {sorted(unknown)}")
        for key in ("n", "kind", "queries"):
            if key not in data:
                raise ValidationError(f"query-set file is missing {key!r}")
        if not isinstance(data["queries"], list):
            raise ValidationError("queries must be a list")
        qs = QuerySet(data["n"], tuple(tuple(q) for q in data["queries"]), data["kind"],
                      data.get("k"), bool(data.get("allow_duplicates", False)))
        hclass = HypothesisClass.from_dict(data["class"]) if "class" in data else None
        labels = None
        if "labels" in data:
            allow_equal = hclass is not None and hclass.variant == CLASS_PARTITION
            labels = validate_labels(qs, data["labels"], allow_equal)
        return cls(qs, hclass, labels)

    @classmethod
    def from_json(cls, text: str) -> "QueryFile":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"invalid JSON: {exc}") from None
        return cls.from_dict(data)
