from fractions import Fraction
from itertools import product

from hypothesis import given, settings
from hypothesis import strategies as st

from arbcheck.polyhedra import cover_space, dd_cone, h_form_of_generated, polar
from arbcheck.rationals import dot, primitive

F = Fraction


def v(*xs):
    return tuple(F(x) for x in xs)


def test_halfplane_has_lineality():
    form = dd_cone(2, [v(1, 0)])  # x <= 0
    assert len(form.lineality) == 1
    assert primitive(form.lineality[0]) in (v(0, 1), v(0, -1))
    assert form.rays == [v(-1, 0)]


def test_quadrant():
    form = dd_cone(2, [v(-1, 0), v(0, -1)])  # x >= 0, y >= 0
    assert form.lineality == []
    assert sorted(form.rays) == [v(0, 1), v(1, 0)]


def test_line_from_equality():
    form = dd_cone(2, [], eqs=[v(1, 1)])
    assert form.rays == []
    assert len(form.lineality) == 1
    assert dot(form.lineality[0], v(1, 1)) == 0


def test_pointed_3d_cone():
    # x,y,z >= 0 and x + y - z >= 0 keeps the octant cut
    form = dd_cone(3, [v(-1, 0, 0), v(0, -1, 0), v(0, 0, -1), v(-1, -1, 1)])
    assert form.lineality == []
    assert set(form.rays) == {v(1, 0, 0), v(0, 1, 0), v(1, 0, 1), v(0, 1, 1)}


def test_infeasible_strict_collapses_to_zero():
    form = dd_cone(2, [v(1, 0), v(-1, 0), v(0, 1), v(0, -1)])
    assert form.rays == []
    assert form.lineality == []


def test_polar_of_quadrant():
    po = polar(2, [v(1, 0), v(0, 1)])
    assert po.lineality == []
    assert sorted(po.rays) == [v(-1, 0), v(0, -1)]


def test_h_form_round_trip():
    gens = [v(1, 2), v(2, 1)]
    ineqs, eqs = h_form_of_generated(2, gens)
    assert not eqs
    back = dd_cone(2, list(ineqs))
    assert sorted(primitive(r) for r in back.rays) == sorted(primitive(g) for g in gens)


def test_cover_space_covered():
    # two halfplanes x <= 0 and x >= 0 cover the plane
    pieces = [([v(1, 0)], []), ([v(-1, 0)], [])]
    assert cover_space(2, pieces) is None


def test_cover_space_uncovered():
    # two opposite quadrants do not cover the plane
    q1 = ([v(-1, 0), v(0, -1)], [])
    q3 = ([v(1, 0), v(0, 1)], [])
    witness = cover_space(2, [q1, q3])
    assert witness is not None
    x, y = witness
    assert not (x >= 0 and y >= 0)
    assert not (x <= 0 and y <= 0)


def test_cover_space_line_pieces_do_not_cover():
    # the two axes do not cover the plane
    pieces = [([], [v(1, 0)]), ([], [v(0, 1)])]
    witness = cover_space(2, pieces)
    assert witness is not None
    assert witness[0] != 0 and witness[1] != 0


@st.composite
def random_hrep(draw):
    n = draw(st.integers(2, 3))
    m = draw(st.integers(1, 5))
    normals = []
    for _ in range(m):
        normals.append(tuple(F(draw(st.integers(-2, 2))) for _ in range(n)))
    return n, normals


def _in_generated_cone(gens, point):
    """LP feasibility: point = nonnegative combination of the generators."""
    from arbcheck.lp import EQ, linear_program, solve_lp

    n = len(point)
    if not gens:
        return all(x == 0 for x in point)
    rows = []
    for k in range(n):
        rows.append(([g[k] for g in gens], EQ, point[k]))
    lp = linear_program([F(0)] * len(gens), rows, lower=[F(0)] * len(gens))
    return solve_lp(lp).status == "optimal"


@settings(max_examples=80, deadline=None)
@given(random_hrep())
def test_dd_matches_lp_membership_on_grid(data):
    n, normals = data
    form = dd_cone(n, normals)
    for a in normals:
        for l in form.lineality:
            assert dot(a, l) == 0
        for r in form.rays:
            assert dot(a, r) <= 0
    # completeness and soundness on a small grid, LP as the oracle
    gens = form.generators()
    for point in product([-1, 0, 1, 2], repeat=n):
        p = tuple(F(x) for x in point)
        in_h = all(dot(a, p) <= 0 for a in normals)
        assert _in_generated_cone(gens, p) == in_h
