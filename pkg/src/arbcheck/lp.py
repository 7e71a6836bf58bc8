"""Exact rational linear programming with self-verifying certificates.

Dense two-phase simplex over `fractions.Fraction`.  Every outcome carries a
certificate that an independent code path re-checks against the raw program
data before it is returned:

* optimal: primal point, dual multipliers, complementary slackness and the
  strong-duality value identity, all as exact equalities;
* unbounded: a feasible point plus an improving ray;
* infeasible: a Farkas vector aggregating the rows into an impossible
  relation over the variable bounds.

Pivot selection is deterministic (largest-coefficient with index tie-breaks,
falling back to Bland's rule after a degeneracy streak), so identical
programs always produce identical outcomes.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import InternalInvariantViolation, MalformedProgram
from .guard import Budget
from .rationals import ONE, Vec, ZERO, is_zero_vec, rat

LE, EQ, GE = "<=", "=", ">="
_RELS = (LE, EQ, GE)

Row = tuple[Vec, str, Fraction]

# optional plain-text dump of every solved program, installed by the CLI
DUMP = None


@dataclass(frozen=True)
class LinearProgram:
    """max/min of objective . x subject to rows and optional variable bounds."""

    objective: Vec
    rows: tuple[Row, ...]
    maximize: bool = True
    lower: tuple[Fraction | None, ...] = ()
    upper: tuple[Fraction | None, ...] = ()

    @property
    def n(self) -> int:
        return len(self.objective)


def linear_program(
    objective: Sequence[Fraction],
    rows: Sequence[tuple[Sequence[Fraction], str, Fraction]],
    *,
    maximize: bool = True,
    lower: Sequence[Fraction | None] | None = None,
    upper: Sequence[Fraction | None] | None = None,
) -> LinearProgram:
    obj = tuple(rat(c) for c in objective)
    n = len(obj)
    packed: list[Row] = []
    for coeffs, rel, rhs in rows:
        cv = tuple(rat(c) for c in coeffs)
        if len(cv) != n:
            raise MalformedProgram(f"row has {len(cv)} coefficients, expected {n}")
        if rel not in _RELS:
            raise MalformedProgram(f"unknown relation {rel!r}")
        packed.append((cv, rel, rat(rhs)))
    lo = tuple(None if b is None else rat(b) for b in lower) if lower is not None else (None,) * n
    hi = tuple(None if b is None else rat(b) for b in upper) if upper is not None else (None,) * n
    if len(lo) != n or len(hi) != n:
        raise MalformedProgram("bound vectors must match the variable count")
    return LinearProgram(obj, tuple(packed), maximize, lo, hi)


@dataclass(frozen=True)
class LpOutcome:
    status: str  # "optimal" | "unbounded" | "infeasible"
    x: Vec | None = None
    value: Fraction | None = None
    dual: Vec | None = None
    ray: Vec | None = None
    farkas: Vec | None = None


# --------------------------------------------------------------------------
# independent certificate verification
# --------------------------------------------------------------------------

def _row_value(coeffs: Vec, x: Vec) -> Fraction:
    return sum((c * v for c, v in zip(coeffs, x) if c), ZERO)


def _primal_feasible(lp: LinearProgram, x: Vec) -> bool:
    for coeffs, rel, rhs in lp.rows:
        lhs = _row_value(coeffs, x)
        if rel == LE and lhs > rhs:
            return False
        if rel == GE and lhs < rhs:
            return False
        if rel == EQ and lhs != rhs:
            return False
    for j, v in enumerate(x):
        if lp.lower[j] is not None and v < lp.lower[j]:
            return False
        if lp.upper[j] is not None and v > lp.upper[j]:
            return False
    return True


def verify_optimal(lp: LinearProgram, x: Vec, dual: Vec, value: Fraction) -> bool:
    """Primal and dual feasibility, complementary slackness, value identity."""
    if not _primal_feasible(lp, x):
        return False
    if _row_value(lp.objective, x) != value:
        return False
    sense = ONE if lp.maximize else -ONE
    if len(dual) != len(lp.rows):
        return False
    for (coeffs, rel, rhs), y in zip(lp.rows, dual):
        if rel == LE and sense * y < 0:
            return False
        if rel == GE and sense * y > 0:
            return False
        if y != 0 and _row_value(coeffs, x) != rhs:
            return False
    bound_part = ZERO
    for j in range(lp.n):
        d = lp.objective[j] - sum(
            (dual[i] * lp.rows[i][0][j] for i in range(len(lp.rows)) if lp.rows[i][0][j]),
            ZERO,
        )
        if d == 0:
            continue
        # a nonzero reduced cost pins the variable to one of its bounds
        if sense * d > 0:
            if lp.upper[j] is None or x[j] != lp.upper[j]:
                return False
            bound_part += d * lp.upper[j]
        else:
            if lp.lower[j] is None or x[j] != lp.lower[j]:
                return False
            bound_part += d * lp.lower[j]
    rhs_part = sum((y * row[2] for y, row in zip(dual, lp.rows) if y), ZERO)
    return value == rhs_part + bound_part


def verify_unbounded(lp: LinearProgram, x: Vec, ray: Vec) -> bool:
    if not _primal_feasible(lp, x):
        return False
    if is_zero_vec(ray):
        return False
    for coeffs, rel, _ in lp.rows:
        move = _row_value(coeffs, ray)
        if rel == LE and move > 0:
            return False
        if rel == GE and move < 0:
            return False
        if rel == EQ and move != 0:
            return False
    for j, r in enumerate(ray):
        if r < 0 and lp.lower[j] is not None:
            return False
        if r > 0 and lp.upper[j] is not None:
            return False
    gain = _row_value(lp.objective, ray)
    return gain > 0 if lp.maximize else gain < 0


def verify_infeasible(lp: LinearProgram, farkas: Vec) -> bool:
    """The aggregated row must exceed its best achievable value over the bounds.

    Sign rules: multipliers are >= 0 on "<=" rows and <= 0 on ">=" rows, so
    that any feasible x satisfies g . x <= beta where g aggregates the rows;
    the certificate is valid when even the box minimum of g . x is > beta.
    """
    if len(farkas) != len(lp.rows):
        return False
    for (_, rel, _), y in zip(lp.rows, farkas):
        if rel == LE and y < 0:
            return False
        if rel == GE and y > 0:
            return False
    g = [ZERO] * lp.n
    for (coeffs, _, _), y in zip(lp.rows, farkas):
        if y:
            for j, c in enumerate(coeffs):
                if c:
                    g[j] += y * c
    beta = sum((y * row[2] for y, row in zip(farkas, lp.rows) if y), ZERO)
    best = ZERO
    for j, gj in enumerate(g):
        if gj > 0:
            if lp.lower[j] is None:
                return False
            best += gj * lp.lower[j]
        elif gj < 0:
            if lp.upper[j] is None:
                return False
            best += gj * lp.upper[j]
    return best > beta


def verify_outcome(lp: LinearProgram, out: LpOutcome) -> bool:
    if out.status == "optimal":
        return verify_optimal(lp, out.x, out.dual, out.value)
    if out.status == "unbounded":
        return verify_unbounded(lp, out.x, out.ray)
    if out.status == "infeasible":
        return verify_infeasible(lp, out.farkas)
    return False


# --------------------------------------------------------------------------
# simplex core on min c.x, A x = b, x >= 0, b >= 0
# --------------------------------------------------------------------------

class _Simplex:
    def __init__(self, nvars: int):
        self.nvars = nvars
        self.cols: list[str] = ["x"] * nvars  # "x" | "slack" | "art"
        self.rows: list[list[Fraction]] = []
        self.rhs: list[Fraction] = []
        self.basis: list[int] = []
        self.row_ids: list[int] = []

    def add_row(self, coeffs: list[Fraction], rhs: Fraction) -> int:
        self.rows.append(list(coeffs))
        self.rhs.append(rhs)
        self.row_ids.append(len(self.rows) - 1)
        return len(self.rows) - 1

    def add_col(self, kind: str, entries: dict[int, Fraction]) -> int:
        idx = len(self.cols)
        self.cols.append(kind)
        for i, row in enumerate(self.rows):
            row.append(entries.get(i, ZERO))
        return idx

    def _pivot(self, r: int, c: int) -> None:
        rowr = self.rows[r]
        inv = 1 / rowr[c]
        if inv != 1:
            self.rows[r] = rowr = [a * inv for a in rowr]
            self.rhs[r] *= inv
        for i, row in enumerate(self.rows):
            if i == r:
                continue
            f = row[c]
            if f:
                self.rows[i] = [a - f * b for a, b in zip(row, rowr)]
                self.rhs[i] -= f * self.rhs[r]
        self.basis[r] = c

    def _reduced_costs(self, cost: list[Fraction]) -> list[Fraction]:
        d = list(cost)
        for i, b in enumerate(self.basis):
            cb = cost[b]
            if cb:
                row = self.rows[i]
                for j in range(len(d)):
                    if row[j]:
                        d[j] -= cb * row[j]
        return d

    def run(self, cost: list[Fraction], enterable, budget: Budget | None):
        """Minimize; returns ("optimal", d) or ("unbounded", entering column)."""
        d = self._reduced_costs(cost)
        ncols = len(self.cols)
        degenerate_streak = 0
        bland = False
        while True:
            if budget is not None:
                budget.charge()
            entering = -1
            if bland:
                for j in range(ncols):
                    if enterable[j] and j not in self.basis and d[j] < 0:
                        entering = j
                        break
            else:
                best = ZERO
                for j in range(ncols):
                    if enterable[j] and d[j] < best:
                        best = d[j]
                        entering = j
            if entering < 0:
                return "optimal", d
            ratio = None
            leave = -1
            for i, row in enumerate(self.rows):
                a = row[entering]
                if a > 0:
                    q = self.rhs[i] / a
                    if ratio is None or q < ratio or (q == ratio and self.basis[i] < self.basis[leave]):
                        ratio = q
                        leave = i
            if leave < 0:
                return "unbounded", entering
            if ratio == 0:
                degenerate_streak += 1
                if degenerate_streak > 2 * (len(self.rows) + ncols):
                    bland = True
            else:
                degenerate_streak = 0
            f = d[entering]
            self._pivot(leave, entering)
            if f:
                rowr = self.rows[leave]
                for j in range(ncols):
                    if rowr[j]:
                        d[j] -= f * rowr[j]

    def solution(self) -> list[Fraction]:
        x = [ZERO] * len(self.cols)
        for i, b in enumerate(self.basis):
            x[b] = self.rhs[i]
        return x

    def duals(self, cost: list[Fraction], d: list[Fraction], anchors: list[tuple[int, Fraction]]) -> list[Fraction]:
        """y_i = (c_j - d_j) / coef for an anchor column j that was e_i."""
        return [(cost[j] - d[j]) / coef for j, coef in anchors]


def _solve_core(
    nvars: int,
    rows: list[tuple[list[Fraction], str, Fraction]],
    cost: list[Fraction],
    budget: Budget | None,
):
    """Solve min cost.x over rows with x >= 0.

    Returns (status, x, duals, ray) where duals/ray live in the given row and
    variable spaces; duals are multipliers for the rows exactly as passed.
    """
    sx = _Simplex(nvars)
    signs: list[Fraction] = []
    work_rows: list[tuple[list[Fraction], str, Fraction]] = []
    for coeffs, rel, rhs in rows:
        if rhs < 0:
            coeffs = [-a for a in coeffs]
            rhs = -rhs
            rel = {LE: GE, GE: LE, EQ: EQ}[rel]
            signs.append(-ONE)
        else:
            signs.append(ONE)
        work_rows.append((coeffs, rel, rhs))
    anchors: list[tuple[int, Fraction]] = [(-1, ONE)] * len(rows)
    artificials: list[int] = []
    for i, (coeffs, rel, rhs) in enumerate(work_rows):
        sx.add_row(coeffs, rhs)
    sx.basis = [-1] * len(work_rows)
    for i, (coeffs, rel, rhs) in enumerate(work_rows):
        if rel == LE:
            c = sx.add_col("slack", {i: ONE})
            anchors[i] = (c, ONE)
            sx.basis[i] = c
        elif rel == GE:
            c = sx.add_col("slack", {i: -ONE})
            anchors[i] = (c, -ONE)
            a = sx.add_col("art", {i: ONE})
            artificials.append(a)
            sx.basis[i] = a
        else:
            a = sx.add_col("art", {i: ONE})
            anchors[i] = (a, ONE)
            artificials.append(a)
            sx.basis[i] = a

    ncols = len(sx.cols)
    full_cost = lambda base: base + [ZERO] * (ncols - len(base))

    if artificials:
        p1_cost = [ZERO] * ncols
        for a in artificials:
            p1_cost[a] = ONE
        enterable = [True] * ncols
        status, d = sx.run(p1_cost, enterable, budget)
        if status != "optimal":
            raise InternalInvariantViolation("phase 1 cannot be unbounded")
        p1_value = sum((sx.rhs[i] for i, b in enumerate(sx.basis) if sx.cols[b] == "art"), ZERO)
        if p1_value > 0:
            y = sx.duals(p1_cost, d, anchors)
            farkas = [signs[i] * y[i] for i in range(len(rows))]
            return "infeasible", None, farkas, None
        # drive leftover artificials out of the basis, dropping redundant rows
        for i in range(len(sx.rows) - 1, -1, -1):
            if sx.cols[sx.basis[i]] != "art":
                continue
            pivot_col = next(
                (j for j in range(ncols) if sx.cols[j] != "art" and sx.rows[i][j] != 0),
                None,
            )
            if pivot_col is None:
                del sx.rows[i], sx.rhs[i], sx.basis[i], sx.row_ids[i]
            else:
                sx._pivot(i, pivot_col)

    p2_cost = full_cost(list(cost))
    enterable = [sx.cols[j] != "art" for j in range(len(sx.cols))]
    status, d = sx.run(p2_cost, enterable, budget)
    x_full = sx.solution()
    if status == "unbounded":
        entering = d  # second slot carries the entering column here
        ray_full = [ZERO] * len(sx.cols)
        ray_full[entering] = ONE
        for i, b in enumerate(sx.basis):
            ray_full[b] = -sx.rows[i][entering]
        return "unbounded", x_full[:nvars], None, ray_full[:nvars]

    # multipliers: anchor columns are identity in their own row, so they read
    # off c_B B^-1; rows dropped as redundant take multiplier 0
    surviving = set(sx.row_ids)
    y = [ZERO] * len(rows)
    for i in surviving:
        col, coef = anchors[i]
        y[i] = (p2_cost[col] - d[col]) / coef
    duals = [signs[i] * y[i] for i in range(len(rows))]
    return "optimal", x_full[:nvars], duals, None


# --------------------------------------------------------------------------
# public solver with general rows, bounds, and certificate mapping
# --------------------------------------------------------------------------

def solve_lp(lp: LinearProgram, budget: Budget | None = None) -> LpOutcome:
    n = lp.n
    sense = ONE if lp.maximize else -ONE

    # per original variable: list of (internal column, factor), plus offset
    col_of: list[list[tuple[int, Fraction]]] = []
    offsets: list[Fraction] = []
    ncols = 0
    extra_rows: list[tuple[list[Fraction], str, Fraction]] = []  # over internal cols, filled later

    plan: list[tuple[str, Fraction]] = []
    for j in range(n):
        lo, hi = lp.lower[j], lp.upper[j]
        if lo is not None:
            plan.append(("shift", lo))
        elif hi is not None:
            plan.append(("mirror", hi))
        else:
            plan.append(("free", ZERO))
    for j in range(n):
        kind, off = plan[j]
        if kind == "free":
            col_of.append([(ncols, ONE), (ncols + 1, -ONE)])
            offsets.append(ZERO)
            ncols += 2
        elif kind == "shift":
            col_of.append([(ncols, ONE)])
            offsets.append(off)
            ncols += 1
        else:
            col_of.append([(ncols, -ONE)])
            offsets.append(off)
            ncols += 1

    def to_internal(coeffs: Vec) -> list[Fraction]:
        out = [ZERO] * ncols
        for j, c in enumerate(coeffs):
            if c:
                for col, f in col_of[j]:
                    out[col] += c * f
        return out

    internal_rows: list[tuple[list[Fraction], str, Fraction]] = []
    for coeffs, rel, rhs in lp.rows:
        shift = sum((coeffs[j] * offsets[j] for j in range(n) if coeffs[j]), ZERO)
        internal_rows.append((to_internal(coeffs), rel, rhs - shift))
    n_outer_rows = len(internal_rows)
    for j in range(n):
        lo, hi = lp.lower[j], lp.upper[j]
        if lo is not None and hi is not None:
            row = [ZERO] * ncols
            row[col_of[j][0][0]] = ONE
            internal_rows.append((row, LE, hi - lo))
    del extra_rows

    cost = [ZERO] * ncols
    for j, c in enumerate(lp.objective):
        if c:
            for col, f in col_of[j]:
                cost[col] += -sense * c * f  # internal form minimizes

    status, x_int, duals, ray_int = _solve_core(ncols, internal_rows, cost, budget)

    def to_outer(values: list[Fraction], with_offset: bool) -> Vec:
        out = []
        for j in range(n):
            v = offsets[j] if with_offset else ZERO
            for col, f in col_of[j]:
                v += f * values[col]
            out.append(v)
        return tuple(out)

    if status == "infeasible":
        farkas = tuple(-duals[i] for i in range(n_outer_rows))
        outcome = LpOutcome(status="infeasible", farkas=farkas)
    elif status == "unbounded":
        x = to_outer(x_int, True)
        ray = to_outer(ray_int, False)
        outcome = LpOutcome(status="unbounded", x=x, ray=ray)
    else:
        x = to_outer(x_int, True)
        value = _row_value(lp.objective, x)
        dual = tuple(-sense * duals[i] for i in range(n_outer_rows))
        outcome = LpOutcome(status="optimal", x=x, value=value, dual=dual)

    if not verify_outcome(lp, outcome):
        raise InternalInvariantViolation(
            f"lp certificate failed re-verification (status={outcome.status})"
        )
    if DUMP is not None:
        DUMP(lp, outcome)
    return outcome


# --------------------------------------------------------------------------
# strict feasibility of homogeneous systems
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class StrictResult:
    feasible: bool
    point: Vec | None = None
    gap: Fraction | None = None
    certificate: LpOutcome | None = None


def strict_feasibility(
    n: int,
    weak_rows: Sequence[Vec],
    strict_rows: Sequence[Vec],
    positive_vars: Sequence[int],
    norm_vars: Sequence[int],
    budget: Budget | None = None,
) -> StrictResult:
    """Decide {weak . z <= 0, strict . z < 0, z_i > 0 (i in positive_vars),
    sum over norm_vars = 1} by maximizing a single shared gap.

    The gap variable joins every strict row as `row . z <= -eps` and every
    positivity requirement as `z_i >= eps`; the system is strictly feasible
    exactly when the maximal gap is positive.
    """
    obj = [ZERO] * n + [ONE]
    rows: list[tuple[list[Fraction], str, Fraction]] = []
    for r in weak_rows:
        rows.append((list(r) + [ZERO], LE, ZERO))
    for r in strict_rows:
        rows.append((list(r) + [ONE], LE, ZERO))
    for i in positive_vars:
        coeffs = [ZERO] * (n + 1)
        coeffs[i] = ONE
        coeffs[n] = -ONE
        rows.append((coeffs, GE, ZERO))
    norm = [ZERO] * (n + 1)
    for i in norm_vars:
        norm[i] = ONE
    rows.append((norm, EQ, ONE))
    upper: list[Fraction | None] = [None] * n + [ONE]  # cap keeps the gap bounded
    lp = linear_program(obj, rows, maximize=True, upper=upper)
    out = solve_lp(lp, budget)
    if out.status == "infeasible":
        return StrictResult(False, certificate=out)
    if out.status != "optimal":
        raise InternalInvariantViolation("gap maximization cannot be unbounded")
    if out.value > 0:
        return StrictResult(True, point=out.x[:n], gap=out.value, certificate=out)
    return StrictResult(False, point=out.x[:n], gap=out.value, certificate=out)
