"""Shared market instances, each small enough to solve by hand."""

from fractions import Fraction

import pytest

from arbcheck import build_filtration, build_space
from arbcheck.trademap import currency_market_v2, security_market

F = Fraction


def frictionless_pi(price):
    return [[1, price], [price, 1]]


@pytest.fixture
def bin1():
    """Frictionless binomial: S0 = 1, S1 in {2, 1/2}, full information."""
    sp = build_space(["u", "d"], ["1/2", "1/2"])
    fil = build_filtration(sp, [[[0, 1]], [[0], [1]]])
    pi = [
        [frictionless_pi(F(1)), frictionless_pi(F(1))],
        [frictionless_pi(F(2)), frictionless_pi(F(1, 2))],
    ]
    return security_market(sp, fil, pi), pi


@pytest.fixture
def bin1_arb():
    """S1 in {2, 1}: buying at 0 and selling at 1 never loses, wins on u."""
    sp = build_space(["u", "d"], ["1/2", "1/2"])
    fil = build_filtration(sp, [[[0, 1]], [[0], [1]]])
    pi = [
        [frictionless_pi(F(1)), frictionless_pi(F(1))],
        [frictionless_pi(F(2)), frictionless_pi(F(1))],
    ]
    return security_market(sp, fil, pi), pi


def spread_pi(bid, ask):
    return [[1, ask], [bid, 1]]


@pytest.fixture
def bin1_tc():
    """Binomial with bid-ask spreads [1,2]; [3/2,5/2] on u, [1/2,3/2] on d."""
    sp = build_space(["u", "d"], ["1/2", "1/2"])
    fil = build_filtration(sp, [[[0, 1]], [[0], [1]]])
    pi = [
        [spread_pi(F(1), F(2)), spread_pi(F(1), F(2))],
        [spread_pi(F(3, 2), F(5, 2)), spread_pi(F(1, 2), F(3, 2))],
    ]
    return security_market(sp, fil, pi), pi


DELAY1_S = [
    [F(1), F(1), F(1), F(1)],
    [F(2), F(2), F(1, 2), F(1, 2)],
    [F(3), F(5, 2), F(1), F(1, 8)],
]


def delay1_space():
    return build_space(["uu", "ud", "du", "dd"], ["1/4"] * 4)


def delay1_pi():
    return [
        [frictionless_pi(DELAY1_S[t][w]) for w in range(4)] for t in range(3)
    ]


@pytest.fixture
def delay1_full():
    """Full information: the u-node price forces an arbitrage."""
    sp = delay1_space()
    fil = build_filtration(sp, [[[0, 1, 2, 3]], [[0, 1], [2, 3]], [[0], [1], [2], [3]]])
    return security_market(sp, fil, delay1_pi()), fil


@pytest.fixture
def delay1_blind():
    """Nothing observed before the horizon: no arbitrage remains."""
    sp = delay1_space()
    fil = build_filtration(sp, [[[0, 1, 2, 3]], [[0, 1, 2, 3]], [[0], [1], [2], [3]]])
    return security_market(sp, fil, delay1_pi()), fil


def cur2_costs(d, value):
    return [[value if i != j else 0 for j in range(d)] for i in range(d)]


@pytest.fixture
def cur2():
    """Buy-only three-currency market, unit rates, ten percent costs."""
    sp = build_space(["a", "b"], ["1/2", "1/2"])
    fil = build_filtration(sp, [[[0, 1]], [[0], [1]]])
    ones = [[1] * 3 for _ in range(3)]
    tau = [[ones, ones], [ones, ones]]
    lam_mat = cur2_costs(3, F(1, 10))
    lam = [[lam_mat, lam_mat], [lam_mat, lam_mat]]
    return currency_market_v2(sp, fil, tau, lam), tau, lam
