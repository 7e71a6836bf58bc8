from fractions import Fraction

import pytest

from arbcheck import build_filtration, build_space
from arbcheck.errors import (
    ConventionViolation,
    FrictionSignViolation,
    SignInfeasible,
    SpreadViolation,
)
from arbcheck.trademap import (
    ConeSpec,
    Strategy,
    build_trade_map,
    check_hn0_structural,
    currency_market_v1,
    currency_market_v2,
    evaluate,
    security_market,
    strategy,
    validate_axioms,
    wealth,
    zero_strategy,
)

F = Fraction
Z = F(0)


def one_point():
    sp = build_space(["w"], [1])
    fil = build_filtration(sp, [[[0]]])
    return sp, fil


def table(d, fill=None):
    return [[[[fill] * d for _ in range(d)] for _ in range(1)] for _ in range(1)]


def set_gen(tab, t, w, i, j, vec):
    tab[t][w][i][j] = vec


def test_zero_map_valid():
    sp, fil = one_point()
    tm = build_trade_map(sp, fil, ConeSpec.full(2), table(2), table(2))
    assert evaluate(tm, 0, 0, [[0, 1], [0, 0]]) == (Z, Z)


def test_frictionless_pair_valid():
    sp, fil = one_point()
    gp, gm = table(2), table(2)
    set_gen(gp, 0, 0, 0, 1, [-1, 1])
    set_gen(gm, 0, 0, 0, 1, [1, -1])
    tm = build_trade_map(sp, fil, ConeSpec.full(2), gp, gm)
    assert tm.generator(0, 0, 0, 1, +1) == (F(-1), F(1))


def test_friction_sign_violation():
    sp, fil = one_point()
    gp, gm = table(2), table(2)
    set_gen(gp, 0, 0, 0, 1, [-1, 1])
    set_gen(gm, 0, 0, 0, 1, [2, -1])
    with pytest.raises(FrictionSignViolation):
        build_trade_map(sp, fil, ConeSpec.full(2), gp, gm)


def test_convention_violation_on_disallowed():
    sp, fil = one_point()
    gp, gm = table(2), table(2)
    set_gen(gp, 0, 0, 0, 1, [-1, 1])
    set_gen(gm, 0, 0, 0, 1, [1, -1])  # minus direction not in the cone
    with pytest.raises(ConventionViolation):
        build_trade_map(sp, fil, ConeSpec.nonneg(2), gp, gm)


def test_evaluate_decomposition():
    sp, fil = one_point()
    gp, gm = table(2), table(2)
    set_gen(gp, 0, 0, 0, 1, [-2, 1])
    set_gen(gm, 0, 0, 0, 1, [1, -1])
    set_gen(gp, 0, 0, 1, 0, [1, -3])
    set_gen(gm, 0, 0, 1, 0, [-1, 2])
    tm = build_trade_map(sp, fil, ConeSpec.full(2), gp, gm)
    assert evaluate(tm, 0, 0, [[0, 0], [0, 0]]) == (Z, Z)
    assert evaluate(tm, 0, 0, [[0, 1], [0, 0]]) == (F(-2), F(1))
    # 2 e(0,1) - 3 e(1,0): two buys of asset 1, three sales through (1,0)
    got = evaluate(tm, 0, 0, [[0, 2], [-3, 0]])
    expected = (2 * F(-2) + 3 * F(-1), 2 * F(1) + 3 * F(2))
    assert got == expected


def test_evaluate_sign_infeasible():
    sp, fil = one_point()
    tm = build_trade_map(sp, fil, ConeSpec.nonneg(2), table(2), table(2))
    with pytest.raises(SignInfeasible):
        evaluate(tm, 0, 0, [[0, -1], [0, 0]])


def test_wealth_zero_strategy(bin1):
    tm, _ = bin1
    path = wealth(tm, zero_strategy(tm.filtration, tm.dim))
    assert all(v == (Z, Z) for per_date in path.values for v in per_date)


def test_wealth_buy_then_sell(bin1):
    tm, _ = bin1
    strat = strategy(
        tm.filtration,
        [
            [[[0, -1], [0, 0]]],              # buy one unit of the risky asset
            [[[0, 1], [0, 0]], [[0, 1], [0, 0]]],  # sell it at date 1 in both atoms
        ],
    )
    path = wealth(tm, strat)
    assert path.values[1][0] == (F(1), Z)      # bought at 1, sold at 2 on u
    assert path.values[1][1] == (F(-1, 2), Z)  # sold at 1/2 on d


def test_wealth_single_buy_is_constant_after(bin1):
    tm, _ = bin1
    strat = strategy(
        tm.filtration,
        [[[[0, -1], [0, 0]]], [[[0, 0], [0, 0]], [[0, 0], [0, 0]]]],
    )
    path = wealth(tm, strat)
    assert path.values[1][0] == path.values[0][0] == (F(-1), F(1))


def test_security_market_generators():
    sp, fil = one_point()
    pi = [[[[1, 2], [1, 1]]]]  # ask 2, bid 1
    tm = security_market(sp, fil, pi)
    assert tm.generator(0, 0, 0, 1, +1) == (F(1), F(-1))
    assert tm.generator(0, 0, 0, 1, -1) == (F(-2), F(1))
    # frictionless case collapses to an exact mirror
    tm2 = security_market(sp, fil, [[[[1, 3], [3, 1]]]])
    gp = tm2.generator(0, 0, 0, 1, +1)
    gm = tm2.generator(0, 0, 0, 1, -1)
    assert tuple(a + b for a, b in zip(gp, gm)) == (Z, Z)


def test_security_market_spread_violation():
    sp, fil = one_point()
    with pytest.raises(SpreadViolation):
        security_market(sp, fil, [[[[1, 1], [2, 1]]]])


def test_currency_v1_generators():
    sp, fil = one_point()
    prices = [[[1, 2]]]
    lam = [[[[0, F(1, 10)], [F(1, 10), 0]]]]
    tm = currency_market_v1(sp, fil, prices, lam)
    assert tm.generator(0, 0, 0, 1, +1) == (F(-11, 5), F(1))
    # costless version is fully reversible
    tm0 = currency_market_v1(sp, fil, prices, [[[[0, 0], [0, 0]]]])
    for (i, j) in tm0.pairs:
        gp = tm0.generator(0, 0, i, j, +1)
        gm = tm0.generator(0, 0, i, j, -1)
        assert all(a + b == 0 for a, b in zip(gp, gm))


def test_currency_v2_generators(cur2):
    tm, _, _ = cur2
    assert tm.generator(0, 0, 0, 1, +1) == (F(-11, 10), F(1), Z)
    for (i, j) in tm.pairs:
        assert tm.generator(0, 0, i, j, -1) == (Z, Z, Z)


def test_validate_axioms(bin1_tc, cur2):
    for tm in (bin1_tc[0], cur2[0]):
        report = validate_axioms(tm, n_samples=48, seed=7)
        assert report.ok


def test_hn0_structural_security(bin1_tc):
    res = check_hn0_structural("security", bin1_tc[0].filtration)
    assert res.verdict == "holds"


def test_hn0_structural_currency1():
    sp = build_space(["w"], [1])
    fil = build_filtration(sp, [[[0]]])
    sym = [[[[0, F(1, 10)], [F(1, 10), 0]]]]
    asym = [[[[0, F(1, 10)], [0, 0]]]]
    assert check_hn0_structural("currency1", fil, costs=sym).verdict == "holds"
    assert check_hn0_structural("currency1", fil, costs=asym).verdict == "unknown"


def test_hn0_structural_currency2(cur2):
    tm, _, lam = cur2
    res = check_hn0_structural("currency2", tm.filtration, costs=lam)
    assert res.verdict == "holds"
    # zero costs on one pair break the positivity requirement
    bad = [[[[0, 0, F(1, 10)], [0, 0, F(1, 10)], [F(1, 10), F(1, 10), 0]]] * 2] * 2
    res2 = check_hn0_structural("currency2", tm.filtration, costs=bad)
    assert res2.verdict == "unknown"
