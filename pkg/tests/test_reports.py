from fractions import Fraction

import pytest

from arbcheck import adapted_process, build_filtration, build_space, is_martingale
from arbcheck.cones import PricingKernel, find_cps
from arbcheck.errors import EfNotEstablished, KernelMismatch
from arbcheck.market import AdaptedProcess, cond_expect
from arbcheck.reports import report_currency1, report_currency2, report_security
from arbcheck.trademap import currency_market_v1
from tests.conftest import DELAY1_S, delay1_pi

F = Fraction


def test_report_security_bin1(bin1):
    tm, pi = bin1
    kernel = find_cps(tm).kernel
    rep = report_security(pi, tm.filtration, kernel)
    assert rep.all_ok
    assert rep.q.probs == (F(1, 3), F(2, 3))
    assert any(c.name.startswith("projected_price") for c in rep.martingale_checks)
    # full information and no friction: the projection is the price itself
    assert rep.projections["pibar"][(1, 0, 1, 0)] == F(2)
    assert rep.projections["pibar"][(1, 1, 1, 0)] == F(1, 2)


def test_report_security_bin1_tc_strict(bin1_tc):
    tm, pi = bin1_tc
    kernel = find_cps(tm).kernel
    rep = report_security(pi, tm.filtration, kernel)
    assert rep.all_ok
    assert rep.rows
    assert all(r.strict for r in rep.rows)


def test_report_security_rejects_foreign_kernel(bin1, bin1_arb):
    kernel = find_cps(bin1[0]).kernel
    with pytest.raises(KernelMismatch):
        report_security(bin1_arb[1], bin1_arb[0].filtration, kernel)


def test_report_security_delay1(delay1_blind, delay1_full):
    tm, fil = delay1_blind
    kernel = find_cps(tm).kernel
    rep = report_security(delay1_pi(), fil, kernel)
    assert rep.all_ok
    # with nothing observed, the projected price at date 1 is the mean, 1
    assert rep.projections["pibar"][(1, 0, 1, 0)] == F(1)
    assert rep.projections["pibar"][(2, 0, 1, 0)] == F(3)  # discrete date-2 atoms
    # the raw price is not a martingale under Q in the full filtration
    _, full_fil = delay1_full
    raw = adapted_process(
        full_fil,
        [
            [[DELAY1_S[0][0]]],
            [[DELAY1_S[1][0]], [DELAY1_S[1][2]]],
            [[s] for s in DELAY1_S[2]],
        ],
    )
    assert not is_martingale(raw, rep.q).ok


def test_report_currency1_costless_collapses():
    sp = build_space(["u", "d"], ["1/2", "1/2"])
    fil = build_filtration(sp, [[[0, 1]], [[0], [1]]])
    prices = [[[1, 1], [1, 1]], [[1, 2], [1, F(1, 2)]]]
    zero_costs = [[[[0, 0], [0, 0]]] * 2] * 2
    tm = currency_market_v1(sp, fil, prices, zero_costs)
    kernel = find_cps(tm).kernel
    rep = report_currency1(prices, zero_costs, fil, kernel)
    assert rep.all_ok
    for r in rep.rows:
        assert not r.strict
        if r.label == "loaded_rate_upper":
            assert r.lhs == r.rhs  # equalities everywhere without costs


def test_report_currency1_with_costs_strict():
    sp = build_space(["u", "d"], ["1/2", "1/2"])
    fil = build_filtration(sp, [[[0, 1]], [[0], [1]]])
    prices = [[[1, 1], [1, 1]], [[1, 2], [1, F(1, 2)]]]
    lam = [[[0, F(1, 10)], [F(1, 10), 0]]]
    costs = [[lam[0]] * 2, [lam[0]] * 2]
    tm = currency_market_v1(sp, fil, prices, costs)
    res = find_cps(tm)
    assert res.found
    rep = report_currency1(prices, costs, fil, res.kernel)
    assert rep.all_ok
    assert all(r.strict for r in rep.rows)


def test_report_currency2(cur2):
    tm, tau, lam = cur2
    kernel = find_cps(tm).kernel
    rep = report_currency2(tau, lam, tm.filtration, kernel)
    assert rep.all_ok
    assert all(r.strict and r.ok for r in rep.rows)


def test_report_currency2_boundary_kernel_fails_rows(cur2):
    tm, tau, lam = cur2
    kernel = find_cps(tm).kernel
    # push one component onto the facet: z_i = (11/10) z_j at one outcome pair
    from arbcheck.market import RandomVector

    z = kernel.z
    vals = [list(v) for v in z.values]
    vals[0][0] = F(11, 10) * vals[0][1]
    vals[1][0] = F(11, 10) * vals[1][1]
    boundary = RandomVector(tm.space, tuple(tuple(v) for v in vals))
    zbar = AdaptedProcess(
        tm.filtration,
        tuple(cond_expect(boundary, tm.filtration, t) for t in range(tm.horizon + 1)),
    )
    bk = PricingKernel(boundary, zbar, F(0))
    rep = report_currency2(tau, lam, tm.filtration, bk)
    assert not rep.all_ok
    assert any(not r.ok for r in rep.rows)


def test_report_currency2_requires_efficient_friction():
    sp = build_space(["w"], [1])
    fil = build_filtration(sp, [[[0]]])
    # costless round trip at unit rates: reversible increments exist
    ones = [[1, 1], [1, 1]]
    tau = [[ones]]
    lam = [[[[0, 0], [0, 0]]]]
    from arbcheck.trademap import currency_market_v2

    tm = currency_market_v2(sp, fil, tau, lam)
    res = find_cps(tm)
    dummy = res.kernel if res.found else None
    if dummy is None:
        from arbcheck.market import RandomVector

        z = RandomVector(sp, ((F(1), F(1)),))
        zbar = AdaptedProcess(fil, (((F(1), F(1)),),))
        dummy = PricingKernel(z, zbar, F(0))
    with pytest.raises(EfNotEstablished):
        report_currency2(tau, lam, fil, dummy)
