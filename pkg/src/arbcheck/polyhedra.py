"""Exact polyhedral cone computations: double description and coverings.

A cone is handled in one of two forms:

* H-form: {x : a . x <= 0 for each inequality normal a, e . x = 0 for each
  equality normal e};
* V-form: lineality basis plus extreme rays (the cone is the span of the
  lineality plus nonnegative combinations of the rays).

`dd_cone` converts H to V by incremental insertion (lineality pivoting first,
then the classic adjacent-pair combination step with the combinatorial
adjacency test).  `polar` converts a generator list to the H-form of its
cone, since the polar of cone(G) is exactly {a : g . a <= 0 for all g}.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import InternalInvariantViolation
from .guard import Budget
from .linalg import independent_subset
from .rationals import Vec, ZERO, dot, is_zero_vec, primitive, vneg


@dataclass
class VForm:
    lineality: list[Vec]
    rays: list[Vec]

    def generators(self) -> list[Vec]:
        out = list(self.rays)
        for l in self.lineality:
            out.append(l)
            out.append(vneg(l))
        return out

    @property
    def is_subspace(self) -> bool:
        return not self.rays


def _standard_basis(n: int) -> list[Vec]:
    basis = []
    for k in range(n):
        v = [ZERO] * n
        v[k] = Fraction(1)
        basis.append(tuple(v))
    return basis


def dd_cone(
    n: int,
    ineqs: list[Vec],
    eqs: list[Vec] = (),
    budget: Budget | None = None,
) -> VForm:
    """V-form of {x in Q^n : a.x <= 0 (a in ineqs), e.x = 0 (e in eqs)}."""
    constraints: list[Vec] = []
    for e in eqs:
        if not is_zero_vec(tuple(e)):
            constraints.append(tuple(e))
            constraints.append(vneg(tuple(e)))
    for a in ineqs:
        if not is_zero_vec(tuple(a)):
            constraints.append(tuple(a))

    # Pivot all lineality away before any combination step: a maximal
    # independent set of normals goes first, so once combinations start the
    # lineality is final and the adjacency test runs in the pointed quotient.
    lead = independent_subset(constraints)
    order = lead + [i for i in range(len(constraints)) if i not in set(lead)]
    constraints = [constraints[i] for i in order]

    lin: list[Vec] = _standard_basis(n)
    rays: list[tuple[Vec, frozenset[int]]] = []

    for idx, a in enumerate(constraints):
        if budget is not None:
            budget.charge()
        pivot = next((k for k, l in enumerate(lin) if dot(a, l) != 0), None)
        if pivot is not None:
            l0 = lin[pivot]
            al0 = dot(a, l0)
            new_lin = []
            for k, l in enumerate(lin):
                if k == pivot:
                    continue
                al = dot(a, l)
                new_lin.append(
                    tuple(x - (al / al0) * y for x, y in zip(l, l0)) if al else l
                )
            lin = new_lin
            adjusted = []
            for r, active in rays:
                ar = dot(a, r)
                if ar:
                    r = tuple(x - (ar / al0) * y for x, y in zip(r, l0))
                adjusted.append((primitive(r), active | {idx}))
            seed = vneg(l0) if al0 > 0 else l0
            adjusted.append((primitive(seed), frozenset(range(idx))))
            rays = adjusted
            continue
        plus, zero, minus = [], [], []
        for r, active in rays:
            v = dot(a, r)
            if v > 0:
                plus.append((r, active, v))
            elif v < 0:
                minus.append((r, active, v))
            else:
                zero.append((r, active | {idx}))
        if not plus:
            rays = [(m[0], m[1]) for m in minus] + zero
            continue
        combined: list[tuple[Vec, frozenset[int]]] = []
        all_current = rays
        for p, p_act, pv in plus:
            for m, m_act, mv in minus:
                if budget is not None:
                    budget.charge()
                common = p_act & m_act
                adjacent = True
                for r, r_act in all_current:
                    if r is p or r is m:
                        continue
                    if common <= r_act:
                        adjacent = False
                        break
                if not adjacent:
                    continue
                w = primitive(tuple(pv * mx - mv * px for px, mx in zip(p, m)))
                if is_zero_vec(w):
                    continue
                combined.append((w, common | {idx}))
        rays = [(m[0], m[1]) for m in minus] + zero + combined
        seen_rays: set[Vec] = set()
        dedup = []
        for r, act in rays:
            if r not in seen_rays:
                seen_rays.add(r)
                dedup.append((r, act))
        rays = dedup

    return VForm([primitive(l) for l in lin], sorted(r for r, _ in rays))


def polar(n: int, generators: list[Vec], budget: Budget | None = None) -> VForm:
    """V-form of the polar cone {a : g . a <= 0 for every generator g}."""
    return dd_cone(n, [tuple(g) for g in generators], budget=budget)


def h_form_of_generated(n: int, generators: list[Vec], budget: Budget | None = None):
    """H-form (ineqs, eqs) of cone(generators), via the double polar."""
    po = polar(n, generators, budget)
    return po.rays, po.lineality


def contains_point(ineqs: list[Vec], eqs: list[Vec], x: Vec) -> bool:
    return all(dot(a, x) <= 0 for a in ineqs) and all(dot(e, x) == 0 for e in eqs)


def cover_space(
    k: int,
    pieces: list[tuple[list[Vec], list[Vec]]],
    budget: Budget | None = None,
) -> Vec | None:
    """Is Q^k covered by the union of the H-form cones in `pieces`?

    Returns None when covered, else a witness point outside every piece.
    The search splits space along the pool of piece hyperplanes; a region is
    settled when its generators all fit one piece (containment in a convex
    cone is decided by its generators), and an unsplittable uncovered region
    yields its relative-interior point as the witness.
    """
    pool: list[Vec] = []
    seen: set[Vec] = set()
    for ineqs, eqs in pieces:
        for h in list(ineqs) + list(eqs):
            ph = primitive(h)
            if is_zero_vec(ph):
                continue
            if ph not in seen and vneg(ph) not in seen:
                seen.add(ph)
                pool.append(ph)

    def recurse(hlist: list[Vec]) -> Vec | None:
        if budget is not None:
            budget.charge()
        region = dd_cone(k, hlist, budget=budget)
        gens = region.generators()
        if not gens:
            return None  # region is {0}, inside every cone
        for ineqs, eqs in pieces:
            if all(contains_point(ineqs, eqs, g) for g in gens):
                return None
        for h in pool:
            strict_pos = any(dot(h, g) > 0 for g in gens)
            strict_neg = any(dot(h, g) < 0 for g in gens)
            if strict_pos and strict_neg:
                first = recurse(hlist + [h])
                if first is not None:
                    return first
                return recurse(hlist + [vneg(h)])
        if not region.rays:
            raise InternalInvariantViolation(
                "unsplittable subspace region outside every piece"
            )
        witness = region.rays[0]
        for r in region.rays[1:]:
            witness = tuple(a + b for a, b in zip(witness, r))
        return witness

    return recurse([])
