"""Dual-side reports: induced measure, projected market data, spread bounds.

Given a verified pricing kernel Z, the numeraire component induces an
equivalent measure Q, and conditional expectations weighted by Z project the
(possibly unobservable) market data onto the trader's filtration.  The
projected bid-ask bounds then sandwich the kernel ratios, strictly wherever
the friction classification demanded a strict dual row.  Every number in a
report is recomputed from the raw inputs, so the report doubles as an
independent verifier of the kernel.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .cones import check_ef, verify_cps
from .errors import EfNotEstablished, KernelMismatch
from .market import (
    AdaptedProcess,
    FiniteSpace,
    Filtration,
    MartingaleVerdict,
    RandomVector,
    change_measure,
    cond_expect,
    is_martingale,
    optional_projection,
    random_vector,
    scalar_random_vector,
)
from .rationals import ONE, ZERO, rat
from .trademap import currency_market_v1, currency_market_v2, security_market

from .cones import PricingKernel


@dataclass(frozen=True)
class ReportRow:
    t: int
    atom: int
    pair: tuple[int, int]
    label: str
    lhs: Fraction
    rhs: Fraction
    strict: bool
    ok: bool


@dataclass(frozen=True)
class MartingaleCheck:
    name: str
    verdict: MartingaleVerdict
    required: bool


@dataclass(frozen=True)
class ProjectionReport:
    kind: str
    q: FiniteSpace
    zbar: AdaptedProcess
    projections: dict[str, dict[tuple, Fraction]]
    rows: tuple[ReportRow, ...]
    martingale_checks: tuple[MartingaleCheck, ...]
    bayes_consistent: bool

    @property
    def all_ok(self) -> bool:
        return (
            self.bayes_consistent
            and all(r.ok for r in self.rows)
            and all(c.verdict.ok for c in self.martingale_checks if c.required)
        )


def _require_kernel(tm, kernel: PricingKernel) -> None:
    # positivity and the weak dual rows are hard preconditions; strictness
    # failures are the report's job to surface, row by row
    ver = verify_cps(tm, kernel.z)
    if not ver.positive or any(r.value > 0 for r in ver.rows):
        raise KernelMismatch("kernel does not verify against the constructed market")


def _numeraire_measure(space: FiniteSpace, z: RandomVector) -> FiniteSpace:
    density = scalar_random_vector(space, [z.values[w][0] for w in range(space.size)])
    return change_measure(space, density)


def _weighted_projection(space, filtration, z, t, component, values_by_outcome):
    """E[Z^component * value | H_t] / E[Z^component | H_t], one per atom."""
    weighted = scalar_random_vector(
        space,
        [z.values[w][component] * rat(values_by_outcome[w]) for w in range(space.size)],
    )
    base = scalar_random_vector(space, [z.values[w][component] for w in range(space.size)])
    num = cond_expect(weighted, filtration, t)
    den = cond_expect(base, filtration, t)
    return [n[0] / d[0] for n, d in zip(num, den)]


def report_security(
    pi, filtration: Filtration, kernel: PricingKernel
) -> ProjectionReport:
    """Projected bid-ask bounds around the kernel ratios, numeraire measure.

    Per asset and atom: zbar0 * pibar_bid <= zbar_i <= zbar0 * pibar_ask,
    strict exactly where the projected spread is open.  The kernel ratio
    process is checked to be a martingale under the induced measure, and the
    projected price of every globally frictionless asset must be one too.
    """
    space = filtration.space
    tm = security_market(space, filtration, pi)
    _require_kernel(tm, kernel)
    z = kernel.z
    d = tm.dim
    q = _numeraire_measure(space, z)

    pibar: dict[tuple, Fraction] = {}
    rows: list[ReportRow] = []
    bayes_ok = True
    for t in range(filtration.horizon + 1):
        zbar_t = kernel.zbar.values[t]
        for i in range(1, d):
            bid_bar = _weighted_projection(
                space, filtration, z, t, 0, [pi[t][w][i][0] for w in range(space.size)]
            )
            ask_bar = _weighted_projection(
                space, filtration, z, t, 0, [pi[t][w][0][i] for w in range(space.size)]
            )
            # same projection through the induced measure, independent path
            q_bid = cond_expect(
                scalar_random_vector(space, [pi[t][w][i][0] for w in range(space.size)]),
                filtration, t, q,
            )
            q_ask = cond_expect(
                scalar_random_vector(space, [pi[t][w][0][i] for w in range(space.size)]),
                filtration, t, q,
            )
            for a_idx in range(len(filtration.atoms(t))):
                if q_bid[a_idx][0] != bid_bar[a_idx] or q_ask[a_idx][0] != ask_bar[a_idx]:
                    bayes_ok = False
                pibar[(t, a_idx, i, 0)] = bid_bar[a_idx]
                pibar[(t, a_idx, 0, i)] = ask_bar[a_idx]
                strict = ask_bar[a_idx] > bid_bar[a_idx]
                zbar0 = zbar_t[a_idx][0]
                zbar_i = zbar_t[a_idx][i]
                lo = zbar0 * bid_bar[a_idx]
                hi = zbar0 * ask_bar[a_idx]
                rows.append(ReportRow(
                    t, a_idx, (i, 0), "bid_bound", lo, zbar_i, strict,
                    lo < zbar_i if strict else lo <= zbar_i,
                ))
                rows.append(ReportRow(
                    t, a_idx, (0, i), "ask_bound", zbar_i, hi, strict,
                    zbar_i < hi if strict else zbar_i <= hi,
                ))

    checks = [
        MartingaleCheck(
            "kernel_ratio_under_q",
            is_martingale(_ratio_process(kernel.zbar), q),
            True,
        )
    ]
    for i in range(1, d):
        frictionless = all(
            rat(pi[t][w][0][i]) == rat(pi[t][w][i][0])
            for t in range(filtration.horizon + 1)
            for w in range(space.size)
        )
        if frictionless:
            prices = [
                random_vector(space, [[pi[t][w][i][0]] for w in range(space.size)])
                for t in range(filtration.horizon + 1)
            ]
            checks.append(MartingaleCheck(
                f"projected_price_asset_{i}_under_q",
                is_martingale(optional_projection(prices, filtration, q), q),
                True,
            ))
    return ProjectionReport(
        "security", q, kernel.zbar, {"pibar": pibar}, tuple(rows), tuple(checks), bayes_ok
    )


def _ratio_process(zbar: AdaptedProcess) -> AdaptedProcess:
    values = tuple(
        tuple(tuple(v / vec[0] for v in vec) for vec in per_atom)
        for per_atom in zbar.values
    )
    return AdaptedProcess(zbar.filtration, values)


def report_currency1(
    prices, costs, filtration: Filtration, kernel: PricingKernel
) -> ProjectionReport:
    """Projected rate and cost bounds for the two-way market with costs in
    the sold asset.

    The upper bound per ordered pair is exactly the dual row of the buy
    transfer; the displayed lower bound uses the cost-weighted projected rate
    and coincides with the sell transfer's dual row whenever costs are
    deterministic on each atom.  Both are reported; the dual rows are the
    binding requirement.
    """
    space = filtration.space
    tm = currency_market_v1(space, filtration, prices, costs)
    _require_kernel(tm, kernel)
    z = kernel.z
    d = tm.dim
    q = _numeraire_measure(space, z)
    probs = space.probs

    taubar: dict[tuple, Fraction] = {}
    lambar: dict[tuple, Fraction] = {}
    rows: list[ReportRow] = []
    for t in range(filtration.horizon + 1):
        zbar_t = kernel.zbar.values[t]
        rate = [
            [
                [rat(prices[t][w][j]) / rat(prices[t][w][i]) for j in range(d)]
                for i in range(d)
            ]
            for w in range(space.size)
        ]
        for i in range(d):
            for j in range(d):
                if i == j:
                    continue
                lam_bar = _weighted_projection(
                    space, filtration, z, t, i,
                    [costs[t][w][i][j] for w in range(space.size)],
                )
                loaded = _weighted_projection(
                    space, filtration, z, t, i,
                    [rate[w][i][j] * (1 + rat(costs[t][w][i][j])) for w in range(space.size)],
                )
                for a_idx, atom in enumerate(filtration.atoms(t)):
                    lambar[(t, a_idx, i, j)] = lam_bar[a_idx]
                    tau_bar = loaded[a_idx] / (1 + lam_bar[a_idx])
                    taubar[(t, a_idx, i, j)] = tau_bar
        for i in range(d):
            for j in range(d):
                if i == j:
                    continue
                for a_idx, atom in enumerate(filtration.atoms(t)):
                    zbar_i = zbar_t[a_idx][i]
                    zbar_j = zbar_t[a_idx][j]
                    tji = taubar[(t, a_idx, j, i)]
                    lam_ji = lambar[(t, a_idx, j, i)]
                    lam_ij = lambar[(t, a_idx, i, j)]
                    upper = zbar_j * tji * (1 + lam_ji)
                    lower = zbar_j * tji / (1 + lam_ij)
                    strict = (1 + lam_ji) * (1 + lam_ij) > 1
                    rows.append(ReportRow(
                        t, a_idx, (j, i), "loaded_rate_upper", zbar_i, upper, strict,
                        zbar_i < upper if strict else zbar_i <= upper,
                    ))
                    rows.append(ReportRow(
                        t, a_idx, (j, i), "loaded_rate_lower", lower, zbar_i, strict,
                        lower < zbar_i if strict else lower <= zbar_i,
                    ))
                    # binding dual row of the sell transfer, exact in all cases
                    mass = sum((probs[w] for w in atom), ZERO)
                    sell_row = sum(
                        (
                            probs[w]
                            * (z.values[w][j] * rate[w][j][i]
                               - z.values[w][i] * (1 + rat(costs[t][w][i][j])))
                            for w in atom
                        ),
                        ZERO,
                    ) / mass
                    rows.append(ReportRow(
                        t, a_idx, (j, i), "sell_dual_row", sell_row, ZERO, strict,
                        sell_row < 0 if strict else sell_row <= 0,
                    ))

    checks = (
        MartingaleCheck(
            "kernel_ratio_under_q", is_martingale(_ratio_process(kernel.zbar), q), True
        ),
    )
    return ProjectionReport(
        "currency1", q, kernel.zbar,
        {"taubar": taubar, "lambar": lambar},
        tuple(rows), checks, True,
    )


def report_currency2(
    tau, costs, filtration: Filtration, kernel: PricingKernel
) -> ProjectionReport:
    """Strict projected bounds for the buy-only market.

    Requires efficient friction (no nonzero reversible increment), under
    which every allowed transfer must price strictly negatively: the kernel
    component of each asset stays strictly below the cost-loaded projected
    value of acquiring it through any other asset.
    """
    space = filtration.space
    tm = currency_market_v2(space, filtration, tau, costs)
    ef = check_ef(tm)
    if not ef.holds:
        raise EfNotEstablished(
            f"reversible increment exists at date {ef.t}; the strict report does not apply"
        )
    _require_kernel(tm, kernel)
    z = kernel.z
    d = tm.dim
    q = _numeraire_measure(space, z)

    composite: dict[tuple, Fraction] = {}
    rows: list[ReportRow] = []
    for t in range(filtration.horizon + 1):
        zbar_t = kernel.zbar.values[t]
        for i in range(d):
            for j in range(d):
                if i == j:
                    continue
                loaded = _weighted_projection(
                    space, filtration, z, t, j,
                    [
                        rat(tau[t][w][j][i]) * (1 + rat(costs[t][w][j][i]))
                        for w in range(space.size)
                    ],
                )
                for a_idx in range(len(filtration.atoms(t))):
                    zbar_i = zbar_t[a_idx][i]
                    zbar_j = zbar_t[a_idx][j]
                    bound = zbar_j * loaded[a_idx]
                    composite[(t, a_idx, j, i)] = loaded[a_idx]
                    rows.append(ReportRow(
                        t, a_idx, (j, i), "strict_loaded_bound",
                        zbar_i, bound, True, zbar_i < bound,
                    ))

    checks = (
        MartingaleCheck(
            "kernel_ratio_under_q", is_martingale(_ratio_process(kernel.zbar), q), True
        ),
    )
    return ProjectionReport(
        "currency2", q, kernel.zbar, {"loaded_rate": composite},
        tuple(rows), checks, True,
    )
