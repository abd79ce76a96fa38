"""Exact rational linear programming.

A dense two-phase tableau simplex over :class:`fractions.Fraction` with
Bland's rule, plus the two feasibility questions the rest of the package
asks of it: strict feasibility of a homogeneous system, and whether the
origin lies in the convex hull of a finite point set.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import MalformedSystem

Row = tuple[Fraction, ...]


def _frac_row(row, width: int) -> Row:
    row = tuple(Fraction(v) for v in row)
    if len(row) != width:
        raise MalformedSystem(f"row of width {len(row)} in a system with {width} variables")
    return row


@dataclass(frozen=True)
class LinearSystem:
    """Constraints over ``n_vars`` rational variables.

    ``strict`` rows mean ``a . x > 0``; ``geq`` entries ``(a, b)`` mean
    ``a . x >= b``; ``eq`` entries mean ``a . x == b``. ``nonneg[j]`` forces
    ``x_j >= 0``; by default every variable is free.
    """

    n_vars: int
    strict: tuple[Row, ...] = ()
    geq: tuple[tuple[Row, Fraction], ...] = ()
    eq: tuple[tuple[Row, Fraction], ...] = ()
    nonneg: tuple[bool, ...] | None = None

    def __post_init__(self):
        w = self.n_vars
        if not isinstance(w, int) or w < 0:
            raise MalformedSystem("n_vars must be a nonnegative integer")
        object.__setattr__(self, "strict", tuple(_frac_row(r, w) for r in self.strict))
        object.__setattr__(self, "geq", tuple((_frac_row(r, w), Fraction(b)) for r, b in self.geq))
        object.__setattr__(self, "eq", tuple((_frac_row(r, w), Fraction(b)) for r, b in self.eq))
        nonneg = (False,) * w if self.nonneg is None else tuple(bool(v) for v in self.nonneg)
        if len(nonneg) != w:
            raise MalformedSystem("nonneg mask width differs from the variable count")
        object.__setattr__(self, "nonneg", nonneg)


@dataclass(frozen=True)
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: tuple[Fraction, ...] | None = None
    value: Fraction | None = None


class _Tableau:
    """Rows ``T[i] . cols = rhs[i]`` with one basic column per row and an
    objective row of reduced costs (maximisation)."""

    def __init__(self, rows, rhs, basis):
        self.rows = rows
        self.rhs = rhs
        self.basis = basis

    def set_objective(self, cost):
        # reduced cost r_j = c_j - sum_i c_{B_i} T_ij
        ncols = len(cost)
        red = list(cost)
        val = Fraction(0)
        for row, b, j in zip(self.rows, self.rhs, self.basis):
            cb = cost[j]
            if cb:
                for c in range(ncols):
                    if row[c]:
                        red[c] -= cb * row[c]
                val += cb * b
        self.red = red
        self.value = val

    def pivot(self, r, c):
        row = self.rows[r]
        piv = row[c]
        if piv != 1:
            inv = 1 / piv
            row = [v * inv if v else v for v in row]
            self.rows[r] = row
            self.rhs[r] *= inv
        nz = [(j, v) for j, v in enumerate(row) if v]
        b = self.rhs[r]
        for i, other in enumerate(self.rows):
            if i == r:
                continue
            f = other[c]
            if f:
                for j, v in nz:
                    other[j] -= f * v
                self.rhs[i] -= f * b
        f = self.red[c]
        if f:
            for j, v in nz:
                self.red[j] -= f * v
            self.value += f * b
        self.basis[r] = c

    def run(self, allowed) -> str:
        """Bland's rule: lowest-index improving column, lowest-index basic
        variable among ratio-test ties."""
        while True:
            enter = next((j for j in allowed if self.red[j] > 0), None)
            if enter is None:
                return "optimal"
            best = None
            for i, row in enumerate(self.rows):
                a = row[enter]
                if a > 0:
                    ratio = self.rhs[i] / a
                    key = (ratio, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return "unbounded"
            self.pivot(best[1], enter)


def solve_lp(cost: Sequence, ub: Sequence[tuple[Sequence, object]] = (),
             eq: Sequence[tuple[Sequence, object]] = (),
             nonneg: Sequence[bool] | None = None) -> LPResult:
    """Maximise ``cost . x`` subject to ``a . x <= b`` for ``(a, b)`` in
    ``ub`` and ``a . x == b`` for ``(a, b)`` in ``eq``."""
    nv = len(cost)
    nonneg = [False] * nv if nonneg is None else list(nonneg)
    if len(nonneg) != nv:
        raise MalformedSystem("nonneg mask width differs from the variable count")
    # column layout: one column per nonneg var, two (pos/neg) per free var
    colmap = []
    ncols = 0
    for j in range(nv):
        if nonneg[j]:
            colmap.append((ncols, None))
            ncols += 1
        else:
            colmap.append((ncols, ncols + 1))
            ncols += 2
    nstruct = ncols

    def expand(a):
        a = _frac_row(a, nv)
        out = [Fraction(0)] * nstruct
        for j, v in enumerate(a):
            pos, neg = colmap[j]
            out[pos] = v
            if neg is not None:
                out[neg] = -v
        return out

    raw = [(expand(a), Fraction(b), True) for a, b in ub] + \
          [(expand(a), Fraction(b), False) for a, b in eq]
    nslack = sum(1 for _, _, is_ub in raw if is_ub)
    ncols = nstruct + nslack
    rows, rhs, basis, artificial = [], [], [], []
    slack = nstruct
    need_art = []
    for a, b, is_ub in raw:
        row = a + [Fraction(0)] * nslack
        scol = None
        if is_ub:
            row[slack] = Fraction(1)
            scol = slack
            slack += 1
        if b < 0:
            row = [-v for v in row]
            b = -b
        rows.append(row)
        rhs.append(b)
        if scol is not None and row[scol] == 1:
            basis.append(scol)
            need_art.append(False)
        else:
            basis.append(None)
            need_art.append(True)
    nart = sum(need_art)
    for i, row in enumerate(rows):
        row.extend([Fraction(0)] * nart)
    k = ncols
    for i, flag in enumerate(need_art):
        if flag:
            rows[i][k] = Fraction(1)
            basis[i] = k
            artificial.append(k)
            k += 1
    total = ncols + nart
    tab = _Tableau(rows, rhs, basis)

    if nart:
        tab.set_objective([Fraction(0)] * ncols + [Fraction(-1)] * nart)
        tab.run(range(total))
        if tab.value < 0:
            return LPResult("infeasible")
        # drive zero-level artificials out of the basis, dropping redundant rows
        art = set(artificial)
        i = 0
        while i < len(tab.rows):
            if tab.basis[i] in art:
                col = next((j for j in range(ncols) if tab.rows[i][j]), None)
                if col is None:
                    del tab.rows[i], tab.rhs[i], tab.basis[i]
                    continue
                tab.pivot(i, col)
            i += 1
        for row in tab.rows:
            del row[ncols:]

    full_cost = [Fraction(0)] * ncols
    for j, v in enumerate(cost):
        pos, neg = colmap[j]
        full_cost[pos] = Fraction(v)
        if neg is not None:
            full_cost[neg] = -Fraction(v)
    tab.set_objective(full_cost)
    status = tab.run(range(ncols))
    if status == "unbounded":
        return LPResult("unbounded")
    colval = [Fraction(0)] * ncols
    for b, j in zip(tab.rhs, tab.basis):
        colval[j] = b
    x = []
    for pos, neg in colmap:
        x.append(colval[pos] - (colval[neg] if neg is not None else 0))
    return LPResult("optimal", tuple(x), tab.value)


@dataclass(frozen=True)
class StrictResult:
    feasible: bool
    witness: tuple[Fraction, ...] | None = None
    margin: Fraction | None = None


def _trivially_infeasible(row: Row, nonneg) -> bool:
    # a . x > 0 cannot hold if every term is <= 0 for all admissible x
    return all(a == 0 or (a < 0 and nn) for a, nn in zip(row, nonneg))


def strict_feasible(system: LinearSystem) -> StrictResult:
    """Decide whether some ``x`` satisfies every strict row with ``a . x > 0``
    together with the side constraints.

    Maximises a margin ``t`` subject to ``a . x >= t`` and ``0 <= t <= 1``;
    the system is strictly feasible iff the optimum is positive. The witness
    satisfies every strict row with slack at least the returned margin.
    """
    w = system.n_vars
    for row in system.strict:
        if _trivially_infeasible(row, system.nonneg):
            return StrictResult(False)
    ub = []
    for row in system.strict:
        ub.append((tuple(-a for a in row) + (Fraction(1),), Fraction(0)))
    if system.strict:
        ub.append(((Fraction(0),) * w + (Fraction(1),), Fraction(1)))
    for row, b in system.geq:
        ub.append((tuple(-a for a in row) + (Fraction(0),), -b))
    eq = [(row + (Fraction(0),), b) for row, b in system.eq]
    cost = (Fraction(0),) * w + (Fraction(1) if system.strict else Fraction(0),)
    res = solve_lp(cost, ub, eq, system.nonneg + (True,))
    if res.status != "optimal":
        # t <= 1 bounds the objective, so anything else means infeasible
        return StrictResult(False)
    x = res.x[:w]
    if not system.strict:
        return StrictResult(True, x, None)
    t = res.x[w]
    if t <= 0:
        return StrictResult(False)
    margin = min(sum(a * v for a, v in zip(row, x)) for row in system.strict)
    assert margin >= t > 0
    return StrictResult(True, x, margin)


def zero_in_hull(vectors: Sequence[Sequence]) -> bool:
    """True iff the origin is a convex combination of ``vectors`` (exact)."""
    vectors = [tuple(Fraction(v) for v in vec) for vec in vectors]
    if not vectors:
        raise MalformedSystem("convex hull of an empty set")
    dim = len(vectors[0])
    if any(len(v) != dim for v in vectors):
        raise MalformedSystem("vectors of different widths")
    m = len(vectors)
    eq = [(tuple(v[r] for v in vectors), Fraction(0)) for r in range(dim)]
    eq.append(((Fraction(1),) * m, Fraction(1)))
    res = solve_lp((Fraction(0),) * m, (), eq, (True,) * m)
    return res.status == "optimal"


def separating_direction(vectors: Sequence[Sequence]) -> StrictResult:
    """Strict feasibility of ``{u : u . v > 0 for every v}`` -- the dual of
    :func:`zero_in_hull`."""
    vectors = [tuple(Fraction(v) for v in vec) for vec in vectors]
    dim = len(vectors[0])
    if any(len(v) != dim for v in vectors):
        raise MalformedSystem("vectors of different widths")
    return strict_feasible(LinearSystem(dim, strict=tuple(vectors)))
