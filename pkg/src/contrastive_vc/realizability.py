"""Is a labeling of a query set realizable inside a hypothesis class?

Exact checkers exist for arbitrary/metric distances (pair digraph), class
partitions (union-find), points on a line and tree metrics (ordering or
topology enumeration plus exact LP), and l1 in low dimension behind a flag.
Everything else goes to a numeric hinge-loss search that can only ever
answer SAT or UNKNOWN.
"""

from __future__ import annotations

from collections import deque
from fractions import Fraction
from functools import partial
from itertools import permutations, product
from typing import Sequence

import networkx as nx
import numpy as np
from scipy.optimize import minimize

from . import core
from .core import (
    DEFAULT_CONFIG,
    EQUAL,
    KNEGATIVE,
    QUADRUPLET,
    TRIPLET,
    Config,
    CycleCertificate,
    EmbeddingModel,
    ExhaustedEnumeration,
    FeasibilityVerdict,
    HypothesisClass,
    MatrixModel,
    PartitionModel,
    QuerySet,
    Status,
    TreeModel,
    UnionFindConflict,
    validate_labels,
    verdict_margin,
)
from .errors import BranchCapExceeded, CapExceeded, UnsupportedCombination, ValidationError
from .lpcore import LinearSystem, strict_feasible
from .parallel import first_hit
from .trees import topologies

Pair = tuple[int, int]


def constraints(qs: QuerySet, labels: Sequence[int]) -> list[tuple[Pair, Pair]]:
    """``(closer, farther)`` pair constraints implied by the labels
    (equality labels contribute nothing here)."""
    out = []
    for q, lab in zip(qs, labels):
        if lab == EQUAL:
            continue
        pairs = qs.pairs(q)
        win = pairs[lab]
        out.extend((win, other) for i, other in enumerate(pairs) if i != lab)
    return out


def lower_knegative(qs: QuerySet, labels: Sequence[int]) -> tuple[QuerySet, tuple[int, ...]]:
    """Replace each k-negative query ``(x, x_1..x_{k+1})`` with positive
    ``x_i`` by the triplets ``(x, x_i, x_j)``, ``j != i``, all labeled 0."""
    if qs.kind != KNEGATIVE:
        return qs, tuple(labels)
    trips, labs = [], []
    for q, lab in zip(qs, labels):
        x, cands = q[0], q[1:]
        for j, other in enumerate(cands):
            if j != lab:
                trips.append((x, cands[lab], other))
                labs.append(0)
    return QuerySet(qs.n, tuple(trips), TRIPLET, allow_duplicates=True), tuple(labs)


def _sat(witness, qs, labels, checker, tol=DEFAULT_CONFIG.tie_tol):
    # every SAT verdict re-derives its labels from the witness
    got = core.induced_labels(witness, qs, tol)
    if got != tuple(labels):
        raise AssertionError(f"{checker} produced a witness inducing {got}, expected {tuple(labels)}")
    return FeasibilityVerdict(Status.SAT, witness, margin=verdict_margin(witness, qs, labels),
                              checker=checker)


# ---------------------------------------------------------------------------
# arbitrary and metric distances


def pair_digraph(qs: QuerySet, labels: Sequence[int]) -> nx.DiGraph:
    g = nx.DiGraph()
    g.add_nodes_from((u, v) for u in range(qs.n) for v in range(u + 1, qs.n))
    g.add_edges_from(constraints(qs, labels))
    return g


def realize_arbitrary(qs: QuerySet, labels: Sequence[int], metric: bool = False) -> FeasibilityVerdict:
    """Realizable iff the pair digraph is acyclic. A topological rank ``r``
    of every pair gives ``rho = N + r`` with ``N`` the number of pairs; all
    values lie in ``[N + 1, 2N]`` so the triangle inequality holds too."""
    labels = validate_labels(qs, labels)
    g = pair_digraph(qs, labels)
    try:
        cycle = nx.find_cycle(g)
    except nx.NetworkXNoCycle:
        cycle = None
    if cycle is not None:
        cert = CycleCertificate(tuple(u for u, _ in cycle))
        return FeasibilityVerdict(Status.UNSAT, certificate=cert, checker="pair_digraph")
    n = qs.n
    big = g.number_of_nodes()
    vals = [[0] * n for _ in range(n)]
    # constrained pairs take the lowest ranks, ties broken lexicographically
    order = nx.lexicographical_topological_sort(g, key=lambda pr: (g.degree(pr) == 0, pr))
    for rank, (u, v) in enumerate(order, start=1):
        vals[u][v] = vals[v][u] = big + rank
    witness = MatrixModel(tuple(tuple(r) for r in vals))
    if metric:
        assert witness.is_metric()
    return _sat(witness, qs, labels, "pair_digraph")


# ---------------------------------------------------------------------------
# class partitions


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, a):
        root = a
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[a] != root:
            self.parent[a], a = root, self.parent[a]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def _same_path(n, same, src, dst):
    adj = {v: [] for v in range(n)}
    for a, b in same:
        adj[a].append(b)
        adj[b].append(a)
    prev = {src: None}
    queue = deque([src])
    while queue:
        a = queue.popleft()
        if a == dst:
            break
        for b in sorted(adj[a]):
            if b not in prev:
                prev[b] = a
                queue.append(b)
    path = [dst]
    while prev[path[-1]] is not None:
        path.append(prev[path[-1]])
    return tuple(reversed(path))


def _partition_branch(n, same, diff):
    uf = _UnionFind(n)
    for a, b in same:
        uf.union(a, b)
    for a, b in diff:
        if uf.find(a) == uf.find(b):
            return None, UnionFindConflict(_same_path(n, same, a, b), (a, b))
    roots = {}
    classes = []
    for v in range(n):
        classes.append(roots.setdefault(uf.find(v), len(roots)))
    return PartitionModel(tuple(classes), max(2, len(roots))), None


def realize_class_partition(qs: QuerySet, labels: Sequence[int],
                            config: Config = DEFAULT_CONFIG) -> FeasibilityVerdict:
    """Label ``(x, y+, z-)`` forces ``same(x, y)`` and ``different(x, z)``;
    an equality label forces both pairs same or both different, resolved by
    branching (first satisfiable branch wins, "same" tried first). Any
    number of classes is allowed, so "different" is checked only against
    the union-find closure of "same"."""
    if qs.kind != TRIPLET:
        raise UnsupportedCombination("class partitions take triplet queries")
    labels = validate_labels(qs, labels, allow_equal=True)
    same, diff, equal = [], [], []
    for (x, a, b), lab in zip(qs, labels):
        if lab == EQUAL:
            equal.append((x, a, b))
        else:
            pos, neg = (a, b) if lab == 0 else (b, a)
            same.append((x, pos))
            diff.append((x, neg))
    if 2 ** len(equal) > config.branch_cap:
        raise BranchCapExceeded(f"{2 ** len(equal)} equality branches exceed cap {config.branch_cap}")
    first_conflict = None
    branches = 0
    for choice in product((0, 1), repeat=len(equal)):
        branches += 1
        s, d = list(same), list(diff)
        for (x, a, b), c in zip(equal, choice):
            (s if c == 0 else d).extend([(x, a), (x, b)])
        witness, conflict = _partition_branch(qs.n, s, d)
        if witness is not None:
            return _sat(witness, qs, labels, "union_find")
        if first_conflict is None:
            first_conflict = conflict
    cert = UnionFindConflict(first_conflict.chain, first_conflict.different, branches)
    return FeasibilityVerdict(Status.UNSAT, certificate=cert, checker="union_find")


# ---------------------------------------------------------------------------
# exact ordering / topology enumeration


def _line_orderings(n):
    # reflecting a line preserves every distance, so keep one of each mirror pair
    return [perm for perm in permutations(range(n)) if n < 2 or perm[0] < perm[-1]]


def _gap_coefficients(rank, u, v, width, offset=0):
    lo, hi = sorted((rank[u], rank[v]))
    row = [0] * width
    for i in range(lo, hi):
        row[offset + i] = 1
    return row


def _ordering_system(orders, n, cons):
    """Strict system over per-coordinate gap variables for fixed orders."""
    gaps = n - 1
    width = gaps * len(orders)
    ranks = [{v: i for i, v in enumerate(order)} for order in orders]

    def coef(pair):
        row = [0] * width
        for c, rank in enumerate(ranks):
            part = _gap_coefficients(rank, pair[0], pair[1], gaps)
            row[c * gaps:(c + 1) * gaps] = part
        return row

    rows = [tuple(1 if j == i else 0 for j in range(width)) for i in range(width)]
    cache = {}
    for close, far in cons:
        a = cache.get(close) or cache.setdefault(close, coef(close))
        b = cache.get(far) or cache.setdefault(far, coef(far))
        rows.append(tuple(y - x for x, y in zip(a, b)))
    return LinearSystem(width, strict=tuple(rows), nonneg=(True,) * width)


def _solve_orders(orders, n, cons):
    res = strict_feasible(_ordering_system(orders, n, cons))
    if not res.feasible:
        return None
    gaps = n - 1
    coords = [[Fraction(0)] * len(orders) for _ in range(n)]
    for c, order in enumerate(orders):
        pos = Fraction(0)
        for i, v in enumerate(order):
            if i:
                pos += res.witness[c * gaps + i - 1]
            coords[v][c] = pos
    return coords


def _solve_line(order, n, cons):
    return _solve_orders((order,), n, cons)


def realize_line(qs: QuerySet, labels: Sequence[int], p: int = 1,
                 config: Config = DEFAULT_CONFIG, workers: int = 1) -> FeasibilityVerdict:
    """Points on a line. For a fixed order every distance is a sum of
    consecutive gaps, so each labeled query is a strict linear inequality on
    the gaps; the gaps themselves are required positive. On a line the
    order of ``|u - v|`` fixes the order of ``|u - v|^p``, so the answer
    is the same for every ``p``."""
    labels = validate_labels(qs, labels)
    n = qs.n
    if n > config.line_cap:
        raise CapExceeded(f"line enumeration capped at n = {config.line_cap}")
    cons = constraints(qs, labels)
    orders = _line_orderings(n)
    hit = first_hit(partial(_solve_line, n=n, cons=cons), orders, workers)
    if hit is None:
        cert = ExhaustedEnumeration(len(orders), "line orderings (up to reflection)")
        return FeasibilityVerdict(Status.UNSAT, certificate=cert, checker="line_orderings")
    coords = hit[1]
    witness = EmbeddingModel(tuple(tuple(c) for c in coords), p=p)
    return _sat(witness, qs, labels, "line_orderings")


def _solve_l1(orders, n, cons):
    return _solve_orders(orders, n, cons)


def realize_l1_exact(qs: QuerySet, labels: Sequence[int], d: int,
                     config: Config = DEFAULT_CONFIG, workers: int = 1) -> FeasibilityVerdict:
    """l1 in ``d`` dimensions by enumerating one order per coordinate: the
    l1 distance is then a sum of per-coordinate gap sums, still linear."""
    labels = validate_labels(qs, labels)
    n = qs.n
    if n * d > config.exact_odd_p_cap:
        raise CapExceeded(f"exact l1 enumeration capped at n*d = {config.exact_odd_p_cap}")
    cons = constraints(qs, labels)
    per_coord = _line_orderings(n)
    combos = list(product(per_coord, repeat=d))
    hit = first_hit(partial(_solve_l1, n=n, cons=cons), combos, workers)
    if hit is None:
        cert = ExhaustedEnumeration(len(combos), "per-coordinate orderings (up to reflection)")
        return FeasibilityVerdict(Status.UNSAT, certificate=cert, checker="l1_orderings")
    witness = EmbeddingModel(tuple(tuple(c) for c in hit[1]), p=1)
    return _sat(witness, qs, labels, "l1_orderings")


def _solve_topology(topo, cons):
    paths = topo.paths()
    ne = len(topo.edges)

    def coef(pair):
        edges = paths[pair]
        return [1 if e in edges else 0 for e in range(ne)]

    rows = [tuple(1 if j == i else 0 for j in range(ne)) for i in range(ne)]
    for close, far in cons:
        a, b = coef(close), coef(far)
        rows.append(tuple(y - x for x, y in zip(a, b)))
    res = strict_feasible(LinearSystem(ne, strict=tuple(rows), nonneg=(True,) * ne))
    if not res.feasible:
        return None
    return res.witness


def realize_tree(qs: QuerySet, labels: Sequence[int], config: Config = DEFAULT_CONFIG,
                 workers: int = 1) -> FeasibilityVerdict:
    """Tree metrics: for each topology (leaves = points, no degree-2
    vertices, positive edge weights) every distance is a sum of edge
    weights, so each labeled query is a strict linear inequality."""
    labels = validate_labels(qs, labels)
    n = qs.n
    if n > config.tree_cap:
        raise CapExceeded(f"tree topology enumeration capped at n = {config.tree_cap}")
    cons = constraints(qs, labels)
    topos = topologies(n)
    hit = first_hit(partial(_solve_topology, cons=cons), topos, workers)
    if hit is None:
        cert = ExhaustedEnumeration(len(topos), "tree topologies")
        return FeasibilityVerdict(Status.UNSAT, certificate=cert, checker="tree_topologies")
    topo = topos[hit[0]]
    weights = hit[1]
    witness = TreeModel(topo.n_vertices,
                        tuple((u, v, w) for (u, v), w in zip(topo.edges, weights)),
                        topo.leaves)
    return _sat(witness, qs, labels, "tree_topologies")


# ---------------------------------------------------------------------------
# numeric search


def _hinge_parts(theta, n, d, idx, p, scale, gamma, cosine):
    x = theta.reshape(n, d)
    if cosine:
        norms = np.linalg.norm(x, axis=1, keepdims=True)
        norms = np.maximum(norms, 1e-12)
        y = x / norms
    else:
        y = x
    a1, b1, a2, b2 = idx
    diff1 = y[a1] - y[b1]
    diff2 = y[a2] - y[b2]
    if p == 2:
        d1 = np.sum(diff1 ** 2, axis=1)
        d2 = np.sum(diff2 ** 2, axis=1)
        g1 = 2 * diff1
        g2 = 2 * diff2
    else:
        ad1, ad2 = np.abs(diff1), np.abs(diff2)
        d1 = np.sum(ad1 ** p, axis=1)
        d2 = np.sum(ad2 ** p, axis=1)
        g1 = p * ad1 ** (p - 1) * np.sign(diff1)
        g2 = p * ad2 ** (p - 1) * np.sign(diff2)
    h = gamma + scale * d1 - d2
    act = np.maximum(h, 0.0)
    loss = float(np.sum(act ** 2))
    w = (2 * act)[:, None]
    grad_y = np.zeros_like(y)
    np.add.at(grad_y, a1, w * scale * g1)
    np.add.at(grad_y, b1, -w * scale * g1)
    np.add.at(grad_y, a2, -w * g2)
    np.add.at(grad_y, b2, w * g2)
    if cosine:
        # d(x/|x|)/dx = (I - y y^T) / |x|
        radial = np.sum(grad_y * y, axis=1, keepdims=True)
        grad_x = (grad_y - radial * y) / norms
    else:
        grad_x = grad_y
    return loss, grad_x.ravel()


def realize_embedding_numeric(qs: QuerySet, labels: Sequence[int], hclass: HypothesisClass,
                              config: Config = DEFAULT_CONFIG) -> FeasibilityVerdict:
    """Minimise the squared hinge ``sum max(0, gamma + s * D+ - D-)^2`` over
    the coordinates (``D`` the p-th power distance; ``s = (1 + alpha)^2``
    for the separated class; cosine optimises on the unit sphere through
    ``x / |x|``). A restart counts only if the embedding, re-checked label
    by label, clears every constraint by ``config.recheck_margin``."""
    if hclass.variant not in (core.LP, core.COSINE, core.SEPARATED_L2):
        raise UnsupportedCombination(f"no numeric search for {hclass.variant}")
    labels = validate_labels(qs, labels)
    n, d = qs.n, hclass.d
    p = hclass.norm_p
    cosine = hclass.variant == core.COSINE
    alpha = hclass.alpha if hclass.variant == core.SEPARATED_L2 else 0.0
    scale = (1 + alpha) ** p
    cons = constraints(qs, labels)
    idx = tuple(np.array(v, dtype=int) for v in zip(*[(c[0], c[1], f[0], f[1]) for c, f in cons])) \
        if cons else None
    rng = np.random.default_rng(config.seed)
    for _ in range(config.restarts):
        theta0 = rng.uniform(0.0, 1.0, n * d)
        if idx is None:
            theta = theta0
        else:
            res = minimize(_hinge_parts, theta0, jac=True, method="L-BFGS-B",
                           args=(n, d, idx, p, scale, config.hinge_margin, cosine),
                           options={"maxiter": config.max_iter, "gtol": 1e-14, "ftol": 0.0})
            theta = res.x
        pts = theta.reshape(n, d)
        if cosine:
            pts = pts / np.linalg.norm(pts, axis=1, keepdims=True)
        witness = _recheck(pts, qs, labels, cons, p, cosine, alpha, config)
        if witness is not None:
            return witness
    return FeasibilityVerdict(Status.UNKNOWN, checker="numeric_hinge")


def _recheck(pts, qs, labels, cons, p, cosine, alpha, config):
    try:
        model = EmbeddingModel(tuple(map(tuple, pts.tolist())), p=p,
                               metric="cosine" if cosine else "lp")
    except ValidationError:
        return None
    margins = []
    for close, far in cons:
        dc, df = model.distance(*close), model.distance(*far)
        margins.append(df - (1 + alpha) * dc)
    if margins and min(margins) < config.recheck_margin:
        return None
    try:
        got = core.induced_labels(model, qs, config.tie_tol)
    except core.TieError:
        return None
    if got != tuple(labels):
        return None
    margin = min(margins) if margins else None
    return FeasibilityVerdict(Status.SAT, model, margin=margin, checker="numeric_hinge")


# ---------------------------------------------------------------------------
# dispatcher


def realize(qs: QuerySet, labels: Sequence[int], hclass: HypothesisClass,
            config: Config = DEFAULT_CONFIG, exact_odd_p: bool = False,
            workers: int | None = None) -> FeasibilityVerdict:
    """Route to the exact checker when one exists, else to the numeric
    search. k-negative queries are lowered to triplets first."""
    workers = config.workers if workers is None else workers
    allow_equal = hclass.variant == core.CLASS_PARTITION
    labels = validate_labels(qs, labels, allow_equal)
    qs, labels = lower_knegative(qs, labels)
    v = hclass.variant
    if v in (core.ARBITRARY, core.METRIC):
        return realize_arbitrary(qs, labels, metric=v == core.METRIC)
    if v == core.CLASS_PARTITION:
        if qs.kind != TRIPLET:
            raise UnsupportedCombination("class partitions take triplet or k-negative queries")
        return realize_class_partition(qs, labels, config)
    if v == core.TREE:
        return realize_tree(qs, labels, config, workers)
    if v == core.LP:
        if hclass.d == 1:
            return realize_line(qs, labels, hclass.p, config, workers)
        if exact_odd_p:
            if hclass.p != 1:
                raise UnsupportedCombination(
                    "exact per-coordinate enumeration is linear only for p = 1")
            return realize_l1_exact(qs, labels, hclass.d, config, workers)
        return realize_embedding_numeric(qs, labels, hclass, config)
    if v in (core.COSINE, core.SEPARATED_L2):
        return realize_embedding_numeric(qs, labels, hclass, config)
    raise UnsupportedCombination(f"cannot realize {v} on {qs.kind} queries")
