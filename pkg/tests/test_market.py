from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from arbcheck import (
    adapted_process,
    build_filtration,
    build_space,
    change_measure,
    cond_expect,
    is_martingale,
    optional_projection,
    random_vector,
    scalar_random_vector,
)
from arbcheck.errors import (
    DuplicateLabel,
    NotNormalized,
    NotRefining,
    ZeroDensity,
    ZeroProbability,
)
from arbcheck.rationals import rat

F = Fraction


def two_point():
    return build_space(["u", "d"], ["1/2", "1/2"])


def test_build_space_two_point():
    sp = two_point()
    assert sp.size == 2
    assert sp.probs == (F(1, 2), F(1, 2))


def test_build_space_degenerate():
    sp = build_space(["a"], [1])
    assert sp.size == 1


def test_build_space_rejects_bad_input():
    with pytest.raises(NotNormalized):
        build_space(["u", "d"], ["1/3", "1/3"])
    with pytest.raises(ZeroProbability):
        build_space(["u", "d"], [1, 0])
    with pytest.raises(DuplicateLabel):
        build_space(["u", "u"], ["1/2", "1/2"])
    with pytest.raises(ValueError):
        build_space(["u", "d"], ["0.5", "0.5"])  # decimals are not exact input


def test_build_filtration_variants():
    sp = two_point()
    full = build_filtration(sp, [[[0, 1]], [[0], [1]]])
    assert full.horizon == 1
    assert full.atoms(1) == ((0,), (1,))

    delayed = build_filtration(sp, [[[0, 1]], [[0, 1]]])
    assert delayed.atoms(1) == ((0, 1),)

    with pytest.raises(NotRefining):
        build_filtration(sp, [[[0], [1]], [[0, 1]]])


def test_cond_expect_examples():
    sp = two_point()
    fil = build_filtration(sp, [[[0, 1]]])
    x = scalar_random_vector(sp, [4, 2])
    assert cond_expect(x, fil, 0) == ((F(3),),)

    const = scalar_random_vector(sp, [7, 7])
    assert cond_expect(const, fil, 0) == ((F(7),),)

    skew = build_space(["u", "d"], ["1/3", "2/3"])
    filb = build_filtration(skew, [[[0, 1]]])
    y = scalar_random_vector(skew, [3, 1])
    assert cond_expect(y, filb, 0) == ((F(5, 3),),)


def test_change_measure_examples():
    sp = two_point()
    assert change_measure(sp, scalar_random_vector(sp, [1, 1])).probs == sp.probs
    assert change_measure(sp, scalar_random_vector(sp, [2, 1])).probs == (F(2, 3), F(1, 3))

    skew = build_space(["u", "d"], ["1/3", "2/3"])
    q = change_measure(skew, scalar_random_vector(skew, [3, "3/2"]))
    assert q.probs == (F(1, 2), F(1, 2))

    with pytest.raises(ZeroDensity):
        change_measure(sp, scalar_random_vector(sp, [1, 0]))


def test_optional_projection_of_adapted_process_is_itself():
    sp = two_point()
    fil = build_filtration(sp, [[[0, 1]], [[0], [1]]])
    xs = [scalar_random_vector(sp, [1, 1]), scalar_random_vector(sp, [2, "1/2"])]
    proj = optional_projection(xs, fil)
    assert proj.slice(0) == ((F(1),),)
    assert proj.slice(1) == ((F(2),), (F(1, 2),))


def test_optional_projection_delayed_information():
    sp = two_point()
    delayed = build_filtration(sp, [[[0, 1]], [[0, 1]]])
    xs = [scalar_random_vector(sp, [1, 1]), scalar_random_vector(sp, [2, "1/2"])]
    proj = optional_projection(xs, delayed)
    assert proj.slice(1) == ((F(5, 4),),)


def test_is_martingale_binomial():
    sp = two_point()
    fil = build_filtration(sp, [[[0, 1]], [[0], [1]]])
    proc = adapted_process(fil, [[[1]], [[2], ["1/2"]]])

    q_good = build_space(["u", "d"], ["1/3", "2/3"])
    assert is_martingale(proc, q_good).ok

    q_bad = build_space(["u", "d"], ["1/2", "1/2"])
    verdict = is_martingale(proc, q_bad)
    assert not verdict.ok
    assert verdict.failure == (0, 0)

    const = adapted_process(fil, [[[5]], [[5], [5]]])
    assert is_martingale(const).ok


# --- randomized property tests -------------------------------------------

def _positive_probs(draw, n):
    weights = [draw(st.integers(min_value=1, max_value=9)) for _ in range(n)]
    total = sum(weights)
    return [Fraction(w, total) for w in weights]


@st.composite
def space_filtration_vector(draw):
    n = draw(st.integers(min_value=1, max_value=5))
    sp = build_space([f"w{i}" for i in range(n)], _positive_probs(draw, n))
    horizon = draw(st.integers(min_value=1, max_value=3))
    parts = [[list(range(n))]]
    for _ in range(horizon):
        prev = parts[-1]
        nxt = []
        for atom in prev:
            if len(atom) > 1 and draw(st.booleans()):
                cut = draw(st.integers(min_value=1, max_value=len(atom) - 1))
                nxt.extend([atom[:cut], atom[cut:]])
            else:
                nxt.append(atom)
        parts.append(nxt)
    fil = build_filtration(sp, parts)
    values = [
        [draw(st.integers(min_value=-6, max_value=6)) for _ in range(2)] for _ in range(n)
    ]
    return sp, fil, random_vector(sp, [[rat(v) for v in row] for row in values])


@settings(max_examples=60, deadline=None)
@given(space_filtration_vector(), st.integers(0, 3), st.integers(0, 3))
def test_tower_property(data, s_raw, t_raw):
    sp, fil, x = data
    s, t = sorted((s_raw % (fil.horizon + 1), t_raw % (fil.horizon + 1)))
    inner = cond_expect(x, fil, t)
    lifted = random_vector(
        sp, [inner[fil.atom_index_of(t, w)] for w in range(sp.size)]
    )
    assert cond_expect(lifted, fil, s) == cond_expect(x, fil, s)


@settings(max_examples=60, deadline=None)
@given(space_filtration_vector(), st.integers(-5, 5), st.integers(-5, 5))
def test_linearity(data, a, b):
    sp, fil, x = data
    y = random_vector(sp, [[v + 1 for v in row] for row in x.values])
    combo = random_vector(
        sp,
        [
            [a * xv + b * yv for xv, yv in zip(xr, yr)]
            for xr, yr in zip(x.values, y.values)
        ],
    )
    for t in range(fil.horizon + 1):
        lhs = cond_expect(combo, fil, t)
        ex = cond_expect(x, fil, t)
        ey = cond_expect(y, fil, t)
        rhs = tuple(
            tuple(a * xe + b * ye for xe, ye in zip(xa, ya)) for xa, ya in zip(ex, ey)
        )
        assert lhs == rhs


@settings(max_examples=60, deadline=None)
@given(space_filtration_vector(), st.data())
def test_bayes_measure_change_consistency(data, aux):
    sp, fil, x = data
    dens_vals = [aux.draw(st.integers(min_value=1, max_value=7)) for _ in range(sp.size)]
    density = scalar_random_vector(sp, dens_vals)
    q = change_measure(sp, density)
    hx = random_vector(
        sp, [[dens_vals[w] * v for v in x.values[w]] for w in range(sp.size)]
    )
    for t in range(fil.horizon + 1):
        under_q = cond_expect(x, fil, t, q)
        num = cond_expect(hx, fil, t)
        den = cond_expect(density, fil, t)
        rhs = tuple(
            tuple(nv / dv[0] for nv in na) for na, dv in zip(num, den)
        )
        assert under_q == rhs
