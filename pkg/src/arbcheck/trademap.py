"""Random trade maps: generator families, market constructors, axiom checks.

A trade map sends an order matrix eta (units of asset j acquired against
asset i, per ordered pair) to a portfolio increment in physical units.  It is
positively homogeneous and decomposes over elementary transfers, so it is
fully described by one generator vector per date, outcome, ordered pair and
direction.  Generators are stored per outcome and are deliberately NOT
required to be adapted to the trader's filtration: the data the trader acts
on may be unobservable.

Direction conventions, with u_k the k-th coordinate vector:

* buying one unit of j against i contributes gen_plus[(i, j)];
* selling one unit of j against i contributes gen_minus[(i, j)];
* disallowed directions keep an all-zero generator.

At build time each pair with both directions allowed must satisfy
gen_plus + gen_minus <= 0 componentwise: a round trip never creates wealth.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import (
    ConventionViolation,
    DiagonalNotOne,
    FrictionSignViolation,
    NegativeCost,
    NonPositiveBid,
    NonPositivePrice,
    NonPositiveRate,
    SignInfeasible,
    SpreadViolation,
    UnknownKind,
)
from .market import FiniteSpace, Filtration
from .rationals import ONE, Vec, ZERO, as_vec, is_zero_vec, rat, vadd, vzero

Pair = tuple[int, int]
Matrix = tuple[Vec, ...]


def ordered_pairs(dim: int) -> tuple[Pair, ...]:
    return tuple((i, j) for i in range(dim) for j in range(dim) if i != j)


@dataclass(frozen=True)
class ConeSpec:
    """Which elementary transfers are allowed, per ordered pair and sign."""

    dim: int
    plus: frozenset[Pair]
    minus: frozenset[Pair]

    @staticmethod
    def full(dim: int) -> "ConeSpec":
        pairs = frozenset(ordered_pairs(dim))
        return ConeSpec(dim, pairs, pairs)

    @staticmethod
    def nonneg(dim: int) -> "ConeSpec":
        return ConeSpec(dim, frozenset(ordered_pairs(dim)), frozenset())

    def allows(self, i: int, j: int, sign: int) -> bool:
        return (i, j) in (self.plus if sign > 0 else self.minus)

    def sign_feasible(self, eta: Matrix) -> bool:
        for i in range(self.dim):
            for j in range(self.dim):
                if i == j:
                    continue
                v = eta[i][j]
                if v > 0 and (i, j) not in self.plus:
                    return False
                if v < 0 and (i, j) not in self.minus:
                    return False
        return True


@dataclass(frozen=True)
class TradeMap:
    space: FiniteSpace
    filtration: Filtration
    cone: ConeSpec
    # indexed [t][omega][pair_index] with pairs in lexicographic order
    gen_plus: tuple[tuple[tuple[Vec, ...], ...], ...]
    gen_minus: tuple[tuple[tuple[Vec, ...], ...], ...]

    @property
    def dim(self) -> int:
        return self.cone.dim

    @property
    def horizon(self) -> int:
        return self.filtration.horizon

    @property
    def pairs(self) -> tuple[Pair, ...]:
        return ordered_pairs(self.cone.dim)

    def pair_index(self, i: int, j: int) -> int:
        return i * (self.cone.dim - 1) + (j if j < i else j - 1)

    def generator(self, t: int, omega: int, i: int, j: int, sign: int) -> Vec:
        table = self.gen_plus if sign > 0 else self.gen_minus
        return table[t][omega][self.pair_index(i, j)]


def build_trade_map(
    space: FiniteSpace,
    filtration: Filtration,
    cone: ConeSpec,
    gen_plus,
    gen_minus,
) -> TradeMap:
    """Validate and freeze generator tables given as [t][omega][i][j] vectors.

    Entries for disallowed directions may be omitted (None) or must be zero.
    """
    if filtration.space is not space:
        if filtration.space.outcomes != space.outcomes:
            raise ConventionViolation("filtration built on a different space")
    d = cone.dim
    horizon = filtration.horizon
    pairs = ordered_pairs(d)

    def read(table, t, w, i, j, allowed, name):
        raw = table[t][w][i][j]
        if raw is None:
            return vzero(d)
        v = as_vec(raw)
        if len(v) != d:
            raise ConventionViolation(f"{name}[{t}][{w}][{i}][{j}] has wrong dimension")
        if not allowed and not is_zero_vec(v):
            raise ConventionViolation(
                f"{name}[{t}][{w}][{i}][{j}] nonzero on a disallowed direction"
            )
        return v

    plus_out, minus_out = [], []
    for t in range(horizon + 1):
        plus_t, minus_t = [], []
        for w in range(space.size):
            row_p, row_m = [], []
            for (i, j) in pairs:
                gp = read(gen_plus, t, w, i, j, (i, j) in cone.plus, "gen_plus")
                gm = read(gen_minus, t, w, i, j, (i, j) in cone.minus, "gen_minus")
                if (i, j) in cone.plus and (i, j) in cone.minus:
                    for k in range(d):
                        if gp[k] + gm[k] > 0:
                            raise FrictionSignViolation(
                                f"gen_plus + gen_minus > 0 in component {k} "
                                f"at t={t}, omega={w}, pair=({i},{j})"
                            )
                row_p.append(gp)
                row_m.append(gm)
            plus_t.append(tuple(row_p))
            minus_t.append(tuple(row_m))
        plus_out.append(tuple(plus_t))
        minus_out.append(tuple(minus_t))
    return TradeMap(space, filtration, cone, tuple(plus_out), tuple(minus_out))


def evaluate(tm: TradeMap, t: int, omega: int, eta: Sequence[Sequence]) -> Vec:
    """Portfolio increment of the order matrix eta at (t, omega)."""
    d = tm.dim
    out = list(vzero(d))
    for i in range(d):
        for j in range(d):
            if i == j:
                continue
            v = rat(eta[i][j])
            if v == 0:
                continue
            if v > 0:
                if not tm.cone.allows(i, j, +1):
                    raise SignInfeasible(f"eta[{i}][{j}] > 0 but +e({i},{j}) is disallowed")
                g = tm.generator(t, omega, i, j, +1)
                for k in range(d):
                    out[k] += v * g[k]
            else:
                if not tm.cone.allows(i, j, -1):
                    raise SignInfeasible(f"eta[{i}][{j}] < 0 but -e({i},{j}) is disallowed")
                g = tm.generator(t, omega, i, j, -1)
                for k in range(d):
                    out[k] += (-v) * g[k]
    return tuple(out)


@dataclass(frozen=True)
class Strategy:
    """Adapted order matrices: one d x d matrix per date and atom."""

    filtration: Filtration
    entries: tuple[tuple[Matrix, ...], ...]

    def matrix_at(self, t: int, omega: int) -> Matrix:
        return self.entries[t][self.filtration.atom_index_of(t, omega)]


def strategy(filtration: Filtration, entries) -> Strategy:
    packed = []
    for t in range(filtration.horizon + 1):
        atoms = filtration.atoms(t)
        per_atom = []
        for a in range(len(atoms)):
            mat = tuple(as_vec(row) for row in entries[t][a])
            per_atom.append(mat)
        packed.append(tuple(per_atom))
    return Strategy(filtration, tuple(packed))


def zero_strategy(filtration: Filtration, dim: int) -> Strategy:
    zero = tuple(vzero(dim) for _ in range(dim))
    return Strategy(
        filtration,
        tuple(
            tuple(zero for _ in filtration.atoms(t))
            for t in range(filtration.horizon + 1)
        ),
    )


@dataclass(frozen=True)
class WealthPath:
    increments: tuple[tuple[Vec, ...], ...]  # [t][omega]
    values: tuple[tuple[Vec, ...], ...]      # [t][omega], running sums

    @property
    def terminal(self) -> tuple[Vec, ...]:
        return self.values[-1]


def wealth(tm: TradeMap, strat: Strategy) -> WealthPath:
    if strat.filtration.partitions != tm.filtration.partitions:
        raise SignInfeasible("strategy filtration does not match the trade map")
    n = tm.space.size
    increments, values = [], []
    running = [vzero(tm.dim)] * n
    for t in range(tm.horizon + 1):
        xi = tuple(evaluate(tm, t, w, strat.matrix_at(t, w)) for w in range(n))
        running = [vadd(r, x) for r, x in zip(running, xi)]
        increments.append(xi)
        values.append(tuple(running))
    return WealthPath(tuple(increments), tuple(values))


# --------------------------------------------------------------------------
# named market constructors
# --------------------------------------------------------------------------

def _unit(d: int, k: int, scale: Fraction = ONE) -> list[Fraction]:
    v = [ZERO] * d
    v[k] = scale
    return v


def security_market(space: FiniteSpace, filtration: Filtration, pi) -> TradeMap:
    """Trades only between the numeraire (asset 0) and each risky asset.

    pi[t][omega] is a d x d matrix: pi[k][0] units of asset 0 are received
    when selling one unit of asset k, and pi[0][k] are paid to buy one unit.
    """
    horizon = filtration.horizon
    d = len(pi[0][0])
    cone = ConeSpec.full(d)
    gp = [[[[None] * d for _ in range(d)] for _ in range(space.size)] for _ in range(horizon + 1)]
    gm = [[[[None] * d for _ in range(d)] for _ in range(space.size)] for _ in range(horizon + 1)]
    for t in range(horizon + 1):
        for w in range(space.size):
            mat = pi[t][w]
            for k in range(d):
                if rat(mat[k][k]) != 1:
                    raise DiagonalNotOne(f"pi[{t}][{w}][{k}][{k}] must be 1")
            for i in range(1, d):
                bid = rat(mat[i][0])
                ask = rat(mat[0][i])
                if bid <= 0:
                    raise NonPositiveBid(f"pi[{t}][{w}][{i}][0] = {bid}")
                if ask < bid:
                    raise SpreadViolation(
                        f"pi[{t}][{w}]: ask {ask} below bid {bid} for asset {i}"
                    )
                sell = _unit(d, 0, bid)
                sell[i] -= ONE
                buy = _unit(d, 0, -ask)
                buy[i] += ONE
                gp[t][w][0][i] = sell   # +e(0,i): sell one unit of asset i
                gm[t][w][0][i] = buy    # -e(0,i): buy one unit of asset i
    return build_trade_map(space, filtration, cone, gp, gm)


def _cost_matrix(raw, d: int) -> list[list[Fraction]]:
    mat = [[rat(raw[i][j]) for j in range(d)] for i in range(d)]
    for i in range(d):
        for j in range(d):
            if i != j and mat[i][j] < 0:
                raise NegativeCost(f"lambda[{i}][{j}] = {mat[i][j]} < 0")
    return mat


def currency_market_v1(space: FiniteSpace, filtration: Filtration, prices, costs) -> TradeMap:
    """All pairs tradable both ways; costs are paid in the sold asset.

    prices[t][omega] is the length-d price vector S; the exchange rate is
    tau[i][j] = S[j] / S[i] units of i per unit of j before costs.
    costs[t][omega] is the d x d proportional cost matrix.
    """
    horizon = filtration.horizon
    d = len(prices[0][0])
    rates = []
    for t in range(horizon + 1):
        per_w = []
        for w in range(space.size):
            s = [rat(v) for v in prices[t][w]]
            for k, v in enumerate(s):
                if v <= 0:
                    raise NonPositivePrice(f"S[{t}][{w}][{k}] = {v}")
            per_w.append([[s[j] / s[i] for j in range(d)] for i in range(d)])
        rates.append(per_w)
    return currency_market_v1_rates(space, filtration, rates, costs)


def currency_market_v1_rates(space: FiniteSpace, filtration: Filtration, tau, costs) -> TradeMap:
    """Variant of currency_market_v1 taking exchange rates directly."""
    horizon = filtration.horizon
    d = len(tau[0][0])
    cone = ConeSpec.full(d)
    gp = [[[[None] * d for _ in range(d)] for _ in range(space.size)] for _ in range(horizon + 1)]
    gm = [[[[None] * d for _ in range(d)] for _ in range(space.size)] for _ in range(horizon + 1)]
    for t in range(horizon + 1):
        for w in range(space.size):
            lam = _cost_matrix(costs[t][w], d)
            for i in range(d):
                for j in range(d):
                    if i == j:
                        continue
                    rate = rat(tau[t][w][i][j])
                    if rate <= 0:
                        raise NonPositivePrice(f"tau[{t}][{w}][{i}][{j}] = {rate}")
                    # buy one unit of j: pay rate * (1 + costs) in asset i
                    buy = _unit(d, j)
                    buy[i] -= rate * (1 + lam[i][j])
                    # sell one unit of j: receive rate in i, pay costs in j
                    sell = _unit(d, i, rate)
                    sell[j] -= 1 + lam[j][i]
                    gp[t][w][i][j] = buy
                    gm[t][w][i][j] = sell
    return build_trade_map(space, filtration, cone, gp, gm)


def currency_market_v2(space: FiniteSpace, filtration: Filtration, tau, costs) -> TradeMap:
    """Buy-only order book: the sale of j against i is the purchase of i.

    Only +e(i,j) transfers are allowed; each costs tau[i][j] * (1 + lambda[i][j])
    units of i per unit of j received.
    """
    horizon = filtration.horizon
    d = len(tau[0][0])
    cone = ConeSpec.nonneg(d)
    gp = [[[[None] * d for _ in range(d)] for _ in range(space.size)] for _ in range(horizon + 1)]
    gm = [[[[None] * d for _ in range(d)] for _ in range(space.size)] for _ in range(horizon + 1)]
    for t in range(horizon + 1):
        for w in range(space.size):
            lam = _cost_matrix(costs[t][w], d)
            for i in range(d):
                for j in range(d):
                    if i == j:
                        continue
                    rate = rat(tau[t][w][i][j])
                    if rate <= 0:
                        raise NonPositiveRate(f"tau[{t}][{w}][{i}][{j}] = {rate}")
                    buy = _unit(d, j)
                    buy[i] -= rate * (1 + lam[i][j])
                    gp[t][w][i][j] = buy
    return build_trade_map(space, filtration, cone, gp, gm)


# --------------------------------------------------------------------------
# sampled axiom validation and structural reversibility conditions
# --------------------------------------------------------------------------

def random_order_matrix(rng: random.Random, cone: ConeSpec) -> Matrix:
    rows = []
    for i in range(cone.dim):
        row = []
        for j in range(cone.dim):
            if i == j:
                row.append(ZERO)
                continue
            plus_ok = (i, j) in cone.plus
            minus_ok = (i, j) in cone.minus
            choices = [0]
            if plus_ok:
                choices.append(1)
            if minus_ok:
                choices.append(-1)
            sign = rng.choice(choices)
            if sign == 0:
                row.append(ZERO)
            else:
                row.append(Fraction(sign * rng.randint(1, 4), rng.randint(1, 3)))
        rows.append(tuple(row))
    return tuple(rows)


def random_strategy(rng: random.Random, tm: TradeMap) -> Strategy:
    entries = tuple(
        tuple(random_order_matrix(rng, tm.cone) for _ in tm.filtration.atoms(t))
        for t in range(tm.horizon + 1)
    )
    return Strategy(tm.filtration, entries)


@dataclass(frozen=True)
class AxiomReport:
    homogeneity_samples: int
    superadditivity_samples: int
    violations: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_axioms(tm: TradeMap, n_samples: int = 64, seed: int = 0) -> AxiomReport:
    """Sampled confirmation of positive homogeneity and superadditivity.

    Homogeneity holds by construction; superadditivity slack appears exactly
    when the two orders take opposite signs in the same pair, and is then
    -(gen_plus + gen_minus) scaled by the overlap, which build validation
    already forces to be nonnegative.  The sampler confirms both facts.
    """
    rng = random.Random(seed)
    violations: list[str] = []
    n = tm.space.size
    for _ in range(n_samples):
        t = rng.randrange(tm.horizon + 1)
        w = rng.randrange(n)
        eta = random_order_matrix(rng, tm.cone)
        lam = Fraction(rng.randint(0, 5), rng.randint(1, 3))
        scaled = tuple(tuple(lam * v for v in row) for row in eta)
        lhs = evaluate(tm, t, w, scaled)
        rhs = tuple(lam * v for v in evaluate(tm, t, w, eta))
        if lhs != rhs:
            violations.append(f"homogeneity failed at t={t}, omega={w}")
        other = random_order_matrix(rng, tm.cone)
        both = tuple(
            tuple(a + b for a, b in zip(ra, rb)) for ra, rb in zip(eta, other)
        )
        gap = [
            s - a - b
            for s, a, b in zip(
                evaluate(tm, t, w, both),
                evaluate(tm, t, w, eta),
                evaluate(tm, t, w, other),
            )
        ]
        if any(g < 0 for g in gap):
            violations.append(f"superadditivity failed at t={t}, omega={w}")
    return AxiomReport(n_samples, n_samples, tuple(violations))


@dataclass(frozen=True)
class Hn0Structural:
    verdict: str  # "holds" | "unknown"
    reason: str


def check_hn0_structural(kind: str, filtration: Filtration, pi=None, costs=None) -> Hn0Structural:
    """Sufficient conditions under which reversible trades are genuinely invertible.

    security: always (the spread precondition is enforced at construction).
    currency1: requires the costs' support to be symmetric at every outcome.
    currency2: requires, on every atom at every date, at least one outcome
    where the triangle inequality on compounded costs holds and every pair has
    positive total round-trip cost (then the only reversible trade is 0).
    """
    if kind == "security":
        return Hn0Structural("holds", "bid-ask spreads validated at construction")
    if kind == "currency1":
        if costs is None:
            raise UnknownKind("currency1 requires the cost matrices")
        d = len(costs[0][0])
        for t in range(filtration.horizon + 1):
            for w in range(filtration.space.size):
                lam = costs[t][w]
                for i in range(d):
                    for j in range(d):
                        if i != j and (rat(lam[i][j]) > 0) != (rat(lam[j][i]) > 0):
                            return Hn0Structural(
                                "unknown",
                                f"cost support asymmetric at t={t}, omega={w}, pair=({i},{j})",
                            )
        return Hn0Structural("holds", "cost supports are symmetric everywhere")
    if kind == "currency2":
        if costs is None:
            raise UnknownKind("currency2 requires the cost matrices")
        d = len(costs[0][0])

        def outcome_qualifies(lam) -> bool:
            for i in range(d):
                for j in range(d):
                    if i == j:
                        continue
                    if rat(lam[i][j]) + rat(lam[j][i]) <= 0:
                        return False
                    for k in range(d):
                        if k in (i, j):
                            continue
                        if (1 + rat(lam[i][j])) > (1 + rat(lam[i][k])) * (1 + rat(lam[k][j])):
                            return False
            return True

        for t in range(filtration.horizon + 1):
            for atom in filtration.atoms(t):
                if not any(outcome_qualifies(costs[t][w]) for w in atom):
                    return Hn0Structural(
                        "unknown",
                        f"no qualifying outcome in atom {atom} at date {t}",
                    )
        return Hn0Structural(
            "holds", "triangle and positive round-trip costs hold on every atom"
        )
    raise UnknownKind(f"unknown market kind {kind!r}")
