"""No-arbitrage conditions, pricing kernels and their certificates.

Everything here works on "slots": one elementary transfer per date, atom,
ordered pair and allowed direction, with its portfolio-increment vector
stacked over (outcome, asset).  The attainable-claim cone with free disposal
is generated by slot vectors and negative unit vectors, which makes the weak
no-arbitrage condition and super-hedging single exact LPs.

The dual side searches for a strictly positive state-price vector Z whose
pairing with every slot is nonpositive, and strictly negative exactly on the
slots that are not pointwise reversible on their atom (per the friction
classification below).  Such a Z certifies the weak, strict and robust
no-arbitrage conditions at once; its absence is certified by the LP dual.

The strict no-arbitrage checker is a genuine decision procedure: the set of
date-t claims that are both attainable and undoable is a polyhedral cone
containing every reversible increment, so if strict no-arbitrage holds that
cone must be a linear subspace (reversibility is symmetric) whose every
element is a reversible one-date increment.  Pointedness is read off the
double description, and the subspace case reduces to covering it, atom by
atom, with the per-branch value cones of one-date trades.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .errors import DimensionMismatch, InternalInvariantViolation, KernelMismatch
from .guard import Budget, unlimited
from .linalg import independent_subset
from .lp import EQ, GE, LE, LpOutcome, StrictResult, linear_program, solve_lp, strict_feasibility
from .market import AdaptedProcess, RandomVector, cond_expect
from .polyhedra import cover_space, dd_cone, h_form_of_generated
from .rationals import ONE, Vec, ZERO, dot, is_zero_vec, vneg, vzero
from .trademap import (
    Strategy,
    TradeMap,
    WealthPath,
    build_trade_map,
    random_order_matrix,
    random_strategy,
    wealth,
    zero_strategy,
)

FRICTIONLESS = "frictionless"
FRICTIONAL = "frictional"
ONE_SIDED_ACTIVE = "one_sided_active"
ONE_SIDED_ZERO = "one_sided_zero"
INACTIVE = "inactive"


# --------------------------------------------------------------------------
# slots
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Slot:
    t: int
    atom: int
    i: int
    j: int
    sign: int
    vec: Vec          # stacked over (omega, asset), zero off the atom
    zero: bool        # generator identically zero on the atom


def _stacked(tm: TradeMap, t: int, atom: tuple[int, ...], i: int, j: int, sign: int) -> Vec:
    d = tm.dim
    n = tm.space.size
    out = [ZERO] * (n * d)
    for w in atom:
        g = tm.generator(t, w, i, j, sign)
        for k in range(d):
            out[w * d + k] = g[k]
    return tuple(out)


def date_slots(tm: TradeMap, t: int) -> list[Slot]:
    """All allowed slots at date t, in (atom, i, j, sign) order."""
    slots: list[Slot] = []
    for a_idx, atom in enumerate(tm.filtration.atoms(t)):
        for (i, j) in tm.pairs:
            for sign in (+1, -1):
                if not tm.cone.allows(i, j, sign):
                    continue
                v = _stacked(tm, t, atom, i, j, sign)
                slots.append(Slot(t, a_idx, i, j, sign, v, is_zero_vec(v)))
    return slots


def all_slots(tm: TradeMap, up_to: int | None = None) -> list[Slot]:
    last = tm.horizon if up_to is None else up_to
    out: list[Slot] = []
    for t in range(last + 1):
        out.extend(date_slots(tm, t))
    return out


def _unstack(tm: TradeMap, stacked: Vec) -> RandomVector:
    d = tm.dim
    values = tuple(
        tuple(stacked[w * d + k] for k in range(d)) for w in range(tm.space.size)
    )
    return RandomVector(tm.space, values)


def _stack_rv(tm: TradeMap, v: RandomVector) -> Vec:
    return tuple(v.values[w][k] for w in range(tm.space.size) for k in range(tm.dim))


def _strategy_from_slot_weights(tm: TradeMap, weights: dict[Slot, Fraction]) -> Strategy:
    d = tm.dim
    entries = []
    for t in range(tm.horizon + 1):
        per_atom = []
        for a_idx in range(len(tm.filtration.atoms(t))):
            mat = [[ZERO] * d for _ in range(d)]
            per_atom.append(mat)
        entries.append(per_atom)
    for slot, x in weights.items():
        if x == 0:
            continue
        mat = entries[slot.t][slot.atom]
        mat[slot.i][slot.j] += x if slot.sign > 0 else -x
    frozen = tuple(
        tuple(tuple(tuple(row) for row in mat) for mat in per_atom)
        for per_atom in entries
    )
    return Strategy(tm.filtration, frozen)


# --------------------------------------------------------------------------
# friction classification
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class FrictionClass:
    """Per (date, atom index, ordered pair): how reversible the pair is there."""

    tags: dict[tuple[int, int, int, int], str]

    def tag(self, t: int, atom: int, i: int, j: int) -> str:
        return self.tags[(t, atom, i, j)]


def frictionality_classify(tm: TradeMap) -> FrictionClass:
    tags: dict[tuple[int, int, int, int], str] = {}
    for t in range(tm.horizon + 1):
        for a_idx, atom in enumerate(tm.filtration.atoms(t)):
            for (i, j) in tm.pairs:
                plus_ok = tm.cone.allows(i, j, +1)
                minus_ok = tm.cone.allows(i, j, -1)
                if plus_ok and minus_ok:
                    mirror = all(
                        tm.generator(t, w, i, j, +1) == vneg(tm.generator(t, w, i, j, -1))
                        for w in atom
                    )
                    tags[(t, a_idx, i, j)] = FRICTIONLESS if mirror else FRICTIONAL
                elif plus_ok or minus_ok:
                    sign = +1 if plus_ok else -1
                    active = any(
                        not is_zero_vec(tm.generator(t, w, i, j, sign)) for w in atom
                    )
                    tags[(t, a_idx, i, j)] = ONE_SIDED_ACTIVE if active else ONE_SIDED_ZERO
                else:
                    tags[(t, a_idx, i, j)] = INACTIVE
    return FrictionClass(tags)


def _slot_requires_strict(fc: FrictionClass, slot: Slot) -> bool:
    """Strict dual rows sit exactly on non-reversible slots with real content.

    A pair that is pointwise reversible on the atom may price to zero; a slot
    whose generator vanishes on the atom prices to zero identically.  Every
    other slot must be strictly negative for the kernel to reject it as a
    zero-priced non-reversible trade.
    """
    if slot.zero:
        return False
    return fc.tag(slot.t, slot.atom, slot.i, slot.j) in (FRICTIONAL, ONE_SIDED_ACTIVE)


# --------------------------------------------------------------------------
# weak no-arbitrage
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ArbitrageCertificate:
    strategy: Strategy
    path: WealthPath

    @property
    def terminal(self) -> tuple[Vec, ...]:
        return self.path.terminal


def verify_arbitrage(tm: TradeMap, cert: ArbitrageCertificate) -> bool:
    path = wealth(tm, cert.strategy)
    terminal = path.terminal
    nonneg = all(v >= 0 for vec in terminal for v in vec)
    return nonneg and any(v > 0 for vec in terminal for v in vec)


@dataclass(frozen=True)
class NawResult:
    arbitrage: bool
    certificate: ArbitrageCertificate | None = None
    weak_kernel: RandomVector | None = None

    @property
    def verdict(self) -> str:
        return "Arbitrage" if self.arbitrage else "NoArbitrage"


def check_naw(tm: TradeMap, budget: Budget | None = None) -> NawResult:
    """Maximize expected terminal wealth over normalized nonnegative trades.

    The attainable cone with free disposal is generated by the slot vectors,
    so an optimum of zero decides that no nonnegative nonzero terminal claim
    is attainable; the LP dual then yields a strictly positive vector with
    every slot priced nonpositively.
    """
    slots = [s for s in all_slots(tm) if not s.zero]
    n = tm.space.size
    d = tm.dim
    probs = tm.space.probs
    if not slots:
        return NawResult(False, weak_kernel=_unstack(tm, tuple(ONE for _ in range(n * d))))
    objective = [
        sum((probs[w] * s.vec[w * d + k] for w in range(n) for k in range(d)), ZERO)
        for s in slots
    ]
    rows = []
    for w in range(n):
        for k in range(d):
            rows.append(([s.vec[w * d + k] for s in slots], GE, ZERO))
    rows.append(([ONE] * len(slots), LE, ONE))
    lp = linear_program(objective, rows, maximize=True, lower=[ZERO] * len(slots))
    out = solve_lp(lp, budget)
    if out.status != "optimal":
        raise InternalInvariantViolation("weak no-arbitrage LP must be bounded")
    if out.value > 0:
        weights = dict(zip(slots, out.x))
        strat = _strategy_from_slot_weights(tm, weights)
        cert = ArbitrageCertificate(strat, wealth(tm, strat))
        if not verify_arbitrage(tm, cert):
            raise InternalInvariantViolation("arbitrage certificate failed re-check")
        return NawResult(True, certificate=cert)
    dual = out.dual
    zeta = []
    for w in range(n):
        for k in range(d):
            zeta.append(probs[w] - dual[w * d + k])
    kernel = _unstack(tm, tuple(z / probs[idx // d] for idx, z in enumerate(zeta)))
    return NawResult(False, weak_kernel=kernel)


# --------------------------------------------------------------------------
# pricing kernels (consistent price systems)
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class PricingKernel:
    z: RandomVector
    zbar: AdaptedProcess
    gap: Fraction


@dataclass(frozen=True)
class CpsRow:
    t: int
    atom: int
    i: int
    j: int
    sign: int
    value: Fraction          # conditional expectation of Z . generator
    strict: bool             # whether the row must be strictly negative
    ok: bool
    identity_ok: bool        # projected-pairing identity re-check


@dataclass(frozen=True)
class CpsVerification:
    rows: tuple[CpsRow, ...]
    positive: bool

    @property
    def all_ok(self) -> bool:
        return self.positive and all(r.ok and r.identity_ok for r in self.rows)


@dataclass(frozen=True)
class CpsResult:
    found: bool
    kernel: PricingKernel | None = None
    certificate: StrictResult | None = None


def _row_coefficients(tm: TradeMap, slot: Slot) -> Vec:
    n, d = tm.space.size, tm.dim
    probs = tm.space.probs
    return tuple(probs[idx // d] * slot.vec[idx] for idx in range(n * d))


def find_cps(tm: TradeMap, budget: Budget | None = None) -> CpsResult:
    """Search for a strictly positive kernel with the required strict rows.

    One shared gap is maximized across every strict row and every positivity
    constraint, so success certifies a point in the relative interior of the
    dual system; failure returns the exact LP certificate.
    """
    fc = frictionality_classify(tm)
    n = tm.space.size * tm.dim
    weak, strict = [], []
    for slot in all_slots(tm):
        if slot.zero:
            continue
        row = _row_coefficients(tm, slot)
        (strict if _slot_requires_strict(fc, slot) else weak).append(row)
    res = strict_feasibility(
        n, weak, strict, positive_vars=range(n), norm_vars=range(n), budget=budget
    )
    if not res.feasible:
        return CpsResult(False, certificate=res)
    z = _unstack(tm, res.point)
    zbar = AdaptedProcess(
        tm.filtration,
        tuple(cond_expect(z, tm.filtration, t) for t in range(tm.horizon + 1)),
    )
    kernel = PricingKernel(z, zbar, res.gap)
    check = verify_cps(tm, z)
    if not check.all_ok:
        raise InternalInvariantViolation("pricing kernel failed re-verification")
    return CpsResult(True, kernel=kernel)


def _cond_pairing(tm: TradeMap, z: RandomVector, t: int, atom: tuple[int, ...], i: int, j: int, sign: int) -> Fraction:
    probs = tm.space.probs
    mass = sum((probs[w] for w in atom), ZERO)
    total = ZERO
    for w in atom:
        total += probs[w] * dot(z.values[w], tm.generator(t, w, i, j, sign))
    return total / mass


def verify_cps(tm: TradeMap, z: RandomVector) -> CpsVerification:
    """Recompute every dual row and the projected-pairing identity from scratch."""
    if z.dim != tm.dim:
        raise DimensionMismatch(f"kernel dimension {z.dim} vs market dimension {tm.dim}")
    fc = frictionality_classify(tm)
    positive = all(v > 0 for vec in z.values for v in vec)
    probs = tm.space.probs
    rows: list[CpsRow] = []
    for t in range(tm.horizon + 1):
        zbar_t = cond_expect(z, tm.filtration, t)
        for a_idx, atom in enumerate(tm.filtration.atoms(t)):
            mass = sum((probs[w] for w in atom), ZERO)
            for (i, j) in tm.pairs:
                for sign in (+1, -1):
                    if not tm.cone.allows(i, j, sign):
                        continue
                    slot_zero = all(
                        is_zero_vec(tm.generator(t, w, i, j, sign)) for w in atom
                    )
                    value = _cond_pairing(tm, z, t, atom, i, j, sign)
                    strict = (not slot_zero) and fc.tag(t, a_idx, i, j) in (
                        FRICTIONAL,
                        ONE_SIDED_ACTIVE,
                    )
                    ok = value < 0 if strict else value <= 0
                    # identity: zbar . (projected generator) equals the pairing
                    if all(zb != 0 for zb in zbar_t[a_idx]):
                        projected = []
                        for k in range(tm.dim):
                            num = sum(
                                (probs[w] * z.values[w][k] * tm.generator(t, w, i, j, sign)[k] for w in atom),
                                ZERO,
                            ) / mass
                            projected.append(num / zbar_t[a_idx][k])
                        identity_ok = dot(zbar_t[a_idx], tuple(projected)) == value
                    else:
                        identity_ok = False
                    rows.append(CpsRow(t, a_idx, i, j, sign, value, strict, ok, identity_ok))
    return CpsVerification(tuple(rows), positive)


# --------------------------------------------------------------------------
# reversible-increment membership and efficient friction
# --------------------------------------------------------------------------

def _atom_coords(tm: TradeMap, atom: tuple[int, ...]) -> list[int]:
    d = tm.dim
    return [w * d + k for w in atom for k in range(d)]


def _restrict(vec: Vec, coords: list[int]) -> Vec:
    return tuple(vec[c] for c in coords)


def _atom_cells(tm: TradeMap, fc: FrictionClass, t: int, a_idx: int):
    """Split the atom's pairs into branch-free slots and frictional cells."""
    free: list[Slot] = []
    cells: list[tuple[Slot, Slot]] = []
    atom = tm.filtration.atoms(t)[a_idx]
    for (i, j) in tm.pairs:
        tag = fc.tag(t, a_idx, i, j)
        if tag == INACTIVE:
            continue
        slots_here = []
        for sign in (+1, -1):
            if tm.cone.allows(i, j, sign):
                v = _stacked(tm, t, atom, i, j, sign)
                slots_here.append(Slot(t, a_idx, i, j, sign, v, is_zero_vec(v)))
        if tag == FRICTIONAL:
            cells.append((slots_here[0], slots_here[1]))
        else:
            free.extend(s for s in slots_here if not s.zero)
    return free, cells


def _branch_choices(cells) -> list[tuple[Slot, ...]]:
    """All ways to keep one direction per frictional cell."""
    choices: list[tuple[Slot, ...]] = [()]
    for plus_slot, minus_slot in cells:
        nxt = []
        for base in choices:
            nxt.append(base + (plus_slot,))
            nxt.append(base + (minus_slot,))
        choices = nxt
    return choices


def _solve_combination(slots: list[Slot], coords: list[int], target: Vec, budget: Budget | None):
    """Nonnegative slot weights reproducing the target on the atom, or None."""
    usable = [s for s in slots if not s.zero]
    rows = []
    for pos, c in enumerate(coords):
        rows.append(([s.vec[c] for s in usable], EQ, target[pos]))
    if not usable:
        return {} if is_zero_vec(target) else None
    lp = linear_program([ZERO] * len(usable), rows, lower=[ZERO] * len(usable))
    out = solve_lp(lp, budget)
    if out.status != "optimal":
        return None
    return dict(zip(usable, out.x))


@dataclass(frozen=True)
class N0Result:
    member: bool
    eta: Strategy | None = None       # reproduces v as a date-t trade
    eta_rev: Strategy | None = None   # reproduces -v


def n0_membership(tm: TradeMap, t: int, v: RandomVector, budget: Budget | None = None) -> N0Result:
    """Is v a reversible one-date increment: v and -v both one-date trade values?

    Branch enumeration runs only over frictional pairs; one-sided and
    pointwise-reversible pairs never need the complementarity split.
    """
    budget = budget or unlimited()
    fc = frictionality_classify(tm)
    stacked = _stack_rv(tm, v)

    def side_weights(target_sign: int) -> dict[Slot, Fraction] | None:
        weights: dict[Slot, Fraction] = {}
        for a_idx, atom in enumerate(tm.filtration.atoms(t)):
            coords = _atom_coords(tm, atom)
            target = tuple(target_sign * stacked[c] for c in coords)
            if is_zero_vec(target):
                continue
            free, cells = _atom_cells(tm, fc, t, a_idx)
            found = None
            for branch in _branch_choices(cells):
                budget.charge()
                found = _solve_combination(free + list(branch), coords, target, budget)
                if found is not None:
                    break
            if found is None:
                return None
            weights.update(found)
        return weights

    forward = side_weights(+1)
    if forward is None:
        return N0Result(False)
    backward = side_weights(-1)
    if backward is None:
        return N0Result(False)
    return N0Result(
        True,
        eta=_strategy_from_slot_weights(tm, forward),
        eta_rev=_strategy_from_slot_weights(tm, backward),
    )


@dataclass(frozen=True)
class EfResult:
    holds: bool
    t: int | None = None
    witness: RandomVector | None = None
    eta: Strategy | None = None
    eta_rev: Strategy | None = None


def check_ef(tm: TradeMap, budget: Budget | None = None) -> EfResult:
    """Efficient friction: no nonzero reversible one-date increment anywhere.

    A nonzero reversible increment exists on an atom exactly when some
    nonnegative zero-valued combination of its slots touches a generator that
    is not identically zero: splitting such a cycle into two complementary
    halves manufactures the increment and its inverse.  One feasibility LP
    per (date, atom) therefore decides the condition.
    """
    budget = budget or unlimited()
    fc = frictionality_classify(tm)
    for t in range(tm.horizon + 1):
        for a_idx, atom in enumerate(tm.filtration.atoms(t)):
            free, cells = _atom_cells(tm, fc, t, a_idx)
            slots = free + [s for pair in cells for s in pair if not s.zero]
            if not slots:
                continue
            coords = _atom_coords(tm, atom)
            rows = []
            for c in coords:
                rows.append(([s.vec[c] for s in slots], EQ, ZERO))
            rows.append(([ONE] * len(slots), EQ, ONE))
            budget.charge()
            lp = linear_program([ZERO] * len(slots), rows, lower=[ZERO] * len(slots))
            out = solve_lp(lp, budget)
            if out.status != "optimal":
                continue
            cycle = dict(zip(slots, out.x))
            split = _nonzero_split(tm, fc, t, a_idx, cells, free, cycle)
            if split is None:
                raise InternalInvariantViolation(
                    "a unit cycle over nonzero generators must split into "
                    "a nonzero reversible increment"
                )
            v, eta_w, rev_w = split
            return EfResult(
                False,
                t=t,
                witness=_unstack(tm, v),
                eta=_strategy_from_slot_weights(tm, eta_w),
                eta_rev=_strategy_from_slot_weights(tm, rev_w),
            )
    return EfResult(True)


def _nonzero_split(tm, fc, t, a_idx, cells, free, cycle):
    """Split a zero-valued cycle into complementary halves with nonzero value.

    Candidate assignments: every frictional cell sends one direction to each
    half; every branch-free slot goes wholly to one half.  Trying the all-plus
    and all-minus assignments plus every single flip is enough: if all of
    those had zero value, every touched generator would vanish.
    """
    n = tm.space.size * tm.dim
    touched_cells = [
        (p, m) for (p, m) in cells if cycle.get(p, ZERO) or cycle.get(m, ZERO)
    ]
    touched_free = [s for s in free if cycle.get(s, ZERO)]

    def assemble(cell_choice: dict, free_side: dict):
        value = [ZERO] * n
        eta_w: dict[Slot, Fraction] = {}
        rev_w: dict[Slot, Fraction] = {}
        for (p, m) in touched_cells:
            first, second = (p, m) if cell_choice.get((p, m), True) else (m, p)
            wp, wm = cycle.get(first, ZERO), cycle.get(second, ZERO)
            if wp:
                eta_w[first] = eta_w.get(first, ZERO) + wp
                for c in range(n):
                    value[c] += wp * first.vec[c]
            if wm:
                rev_w[second] = rev_w.get(second, ZERO) + wm
        for s in touched_free:
            if free_side.get(s, False):
                eta_w[s] = eta_w.get(s, ZERO) + cycle[s]
                for c in range(n):
                    value[c] += cycle[s] * s.vec[c]
            else:
                rev_w[s] = rev_w.get(s, ZERO) + cycle[s]
        return tuple(value), eta_w, rev_w

    candidates = []
    candidates.append(({}, {}))                                  # plus side up
    candidates.append(({c: False for c in touched_cells}, {}))   # minus side up
    for c in touched_cells:
        candidates.append(({c: False}, {}))
    for s in touched_free:
        candidates.append(({}, {s: True}))
    for cell_choice, free_side in candidates:
        value, eta_w, rev_w = assemble(cell_choice, free_side)
        if not is_zero_vec(value):
            return value, eta_w, rev_w
    return None


# --------------------------------------------------------------------------
# strict no-arbitrage (direct decision)
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class NasResult:
    holds: bool
    t: int | None = None
    witness: RandomVector | None = None
    reason: str = ""


def check_nas_direct(tm: TradeMap, budget: Budget | None = None) -> NasResult:
    """Decide, date by date, whether every attainable-and-undoable claim is
    a reversible one-date increment.

    The candidate set S_t (attainable by date t, undoable by a date-t trade
    with disposal) is one polyhedral cone.  Reversible increments form a
    symmetric subset of S_t, so:

    * any extreme ray of S_t off its lineality is itself a violation, since
      its negative is not even in S_t;
    * otherwise S_t is a subspace, and the condition holds exactly when each
      atom's projection of it is covered by the per-branch one-date value
      cones, decided by exact region splitting.
    """
    budget = budget or unlimited()
    fc = frictionality_classify(tm)
    n = tm.space.size * tm.dim
    units = []
    for c in range(n):
        e = [ZERO] * n
        e[c] = ONE
        units.append(tuple(e))
    for t in range(tm.horizon + 1):
        attain = [s.vec for s in all_slots(tm, up_to=t) if not s.zero]
        attain += [vneg(u) for u in units]
        undo = [vneg(s.vec) for s in date_slots(tm, t) if not s.zero]
        undo += list(units)
        in1, eq1 = h_form_of_generated(n, attain, budget)
        in2, eq2 = h_form_of_generated(n, undo, budget)
        s_cone = dd_cone(n, list(in1) + list(in2), list(eq1) + list(eq2), budget)
        if s_cone.rays:
            witness = s_cone.rays[0]
            if n0_membership(tm, t, _unstack(tm, witness), budget).member:
                raise InternalInvariantViolation(
                    "an asymmetric direction cannot be reversible"
                )
            return NasResult(
                False, t=t, witness=_unstack(tm, witness),
                reason="attainable-undoable cone is not symmetric",
            )
        lineality = s_cone.lineality
        if not lineality:
            continue
        for a_idx, atom in enumerate(tm.filtration.atoms(t)):
            coords = _atom_coords(tm, atom)
            restricted = [_restrict(l, coords) for l in lineality]
            chosen = independent_subset(restricted)
            if not chosen:
                continue
            basis_restricted = [restricted[c] for c in chosen]
            basis_full = [lineality[c] for c in chosen]
            k = len(chosen)
            free, cells = _atom_cells(tm, fc, t, a_idx)
            pieces = []
            for branch in _branch_choices(cells):
                gens = [_restrict(s.vec, coords) for s in free + list(branch) if not s.zero]
                ineqs, eqs = h_form_of_generated(len(coords), gens, budget)
                to_coords = lambda row: tuple(dot(row, b) for b in basis_restricted)
                pieces.append((
                    [to_coords(r) for r in ineqs],
                    [to_coords(e) for e in eqs],
                ))
            witness_c = cover_space(k, pieces, budget)
            if witness_c is not None:
                full = [ZERO] * n
                for ci, b in zip(witness_c, basis_full):
                    if ci:
                        for idx in range(n):
                            full[idx] += ci * b[idx]
                v = _unstack(tm, tuple(full))
                if n0_membership(tm, t, v, budget).member:
                    raise InternalInvariantViolation(
                        "cover witness re-verified as reversible"
                    )
                return NasResult(
                    False, t=t, witness=v,
                    reason=f"subspace direction not a one-date trade value on atom {a_idx}",
                )
    return NasResult(True)


# --------------------------------------------------------------------------
# robust no-arbitrage: the shrunken-friction perturbation
# --------------------------------------------------------------------------

def build_robust_perturbation(tm: TradeMap, kernel: PricingKernel) -> TradeMap:
    """Dominating trade map with the kernel's dual slack folded back in.

    Each generator component is raised by (per-atom slack) / (dim * zbar),
    capped so that every pair still prices a round trip nonpositively; caps
    disappear for directions outside the cone.
    """
    check = verify_cps(tm, kernel.z)
    if not check.all_ok:
        raise KernelMismatch("kernel does not verify against this trade map")
    d = tm.dim
    nouts = tm.space.size
    gp = [[[[None] * d for _ in range(d)] for _ in range(nouts)] for _ in range(tm.horizon + 1)]
    gm = [[[[None] * d for _ in range(d)] for _ in range(nouts)] for _ in range(tm.horizon + 1)]
    for t in range(tm.horizon + 1):
        for a_idx, atom in enumerate(tm.filtration.atoms(t)):
            zbar_atom = kernel.zbar.values[t][a_idx]
            for (i, j) in tm.pairs:
                plus_ok = tm.cone.allows(i, j, +1)
                minus_ok = tm.cone.allows(i, j, -1)
                delta_plus = -_cond_pairing(tm, kernel.z, t, atom, i, j, +1) if plus_ok else None
                delta_minus = -_cond_pairing(tm, kernel.z, t, atom, i, j, -1) if minus_ok else None
                for w in atom:
                    if plus_ok:
                        g = tm.generator(t, w, i, j, +1)
                        raised = []
                        for k in range(d):
                            lift = g[k] + delta_plus / (d * zbar_atom[k])
                            if minus_ok:
                                cap = -tm.generator(t, w, i, j, -1)[k]
                                lift = min(lift, cap)
                            raised.append(lift)
                        gp[t][w][i][j] = tuple(raised)
                    if minus_ok:
                        g = tm.generator(t, w, i, j, -1)
                        raised = []
                        for k in range(d):
                            lift = g[k] + delta_minus / (d * zbar_atom[k])
                            if plus_ok:
                                cap = -gp[t][w][i][j][k]
                                lift = min(lift, cap)
                            raised.append(lift)
                        gm[t][w][i][j] = tuple(raised)
    return build_trade_map(tm.space, tm.filtration, tm.cone, gp, gm)


@dataclass(frozen=True)
class NarResult:
    holds: bool
    kernel: PricingKernel | None = None
    perturbation: TradeMap | None = None
    improvements: tuple[tuple[int, int, int, int, int], ...] = ()  # (t, atom, i, j, sign)
    certificate: StrictResult | None = None
    conditional_on_reversibility_axiom: bool = False

    @property
    def verdict(self) -> str:
        return "Holds" if self.holds else "Fails"


def check_nar(tm: TradeMap, budget: Budget | None = None) -> NarResult:
    """Robust no-arbitrage via the explicit dominating perturbation.

    With a kernel in hand, the perturbation dominates the map, strictly
    improves every slot that carried a strict dual row, and stays free of
    weak arbitrage; without one, the refusal certificate refutes the robust
    condition whenever reversible trades are genuinely invertible (the
    refutation is reported as conditional on that).
    """
    cps = find_cps(tm, budget)
    if not cps.found:
        return NarResult(
            False, certificate=cps.certificate, conditional_on_reversibility_axiom=True
        )
    g_map = build_robust_perturbation(tm, cps.kernel)
    fc = frictionality_classify(tm)
    improvements: list[tuple[int, int, int, int, int]] = []
    for slot in all_slots(tm):
        strict = _slot_requires_strict(fc, slot)
        atom = tm.filtration.atoms(slot.t)[slot.atom]
        improved = False
        for w in atom:
            f_gen = tm.generator(slot.t, w, slot.i, slot.j, slot.sign)
            g_gen = g_map.generator(slot.t, w, slot.i, slot.j, slot.sign)
            for k in range(tm.dim):
                if g_gen[k] < f_gen[k]:
                    raise InternalInvariantViolation("perturbation fails dominance")
                if g_gen[k] > f_gen[k]:
                    improved = True
        if strict:
            if not improved:
                raise InternalInvariantViolation(
                    "strict slot gained no improvement in the perturbation"
                )
            improvements.append((slot.t, slot.atom, slot.i, slot.j, slot.sign))
    if check_naw(g_map, budget).arbitrage:
        raise InternalInvariantViolation("perturbed map admits weak arbitrage")
    return NarResult(
        True, kernel=cps.kernel, perturbation=g_map, improvements=tuple(improvements)
    )


# --------------------------------------------------------------------------
# super-hedging
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class HedgeResult:
    attainable: bool
    strategy: Strategy | None = None
    disposal: tuple[Vec, ...] | None = None
    certificate: LpOutcome | None = None


def superhedge_membership(tm: TradeMap, claim: RandomVector, budget: Budget | None = None) -> HedgeResult:
    """Can trading from zero endowment dominate the claim in every outcome?"""
    slots = [s for s in all_slots(tm) if not s.zero]
    target = _stack_rv(tm, claim)
    n = len(target)
    rows = []
    for c in range(n):
        rows.append(([s.vec[c] for s in slots], GE, target[c]))
    lp = linear_program(
        [ONE] * len(slots), rows, maximize=False, lower=[ZERO] * len(slots)
    )
    out = solve_lp(lp, budget)
    if out.status == "infeasible":
        return HedgeResult(False, certificate=out)
    if out.status != "optimal":
        raise InternalInvariantViolation("hedging LP cannot be unbounded below")
    strat = _strategy_from_slot_weights(tm, dict(zip(slots, out.x)))
    path = wealth(tm, strat)
    disposal = []
    for w in range(tm.space.size):
        diff = tuple(a - b for a, b in zip(path.terminal[w], claim.values[w]))
        if any(x < 0 for x in diff):
            raise InternalInvariantViolation("hedge fails to dominate the claim")
        disposal.append(diff)
    return HedgeResult(True, strategy=strat, disposal=tuple(disposal))


# --------------------------------------------------------------------------
# sampled diagnostics
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class KpViolation:
    kind: str
    t: int | None
    detail: str


@dataclass(frozen=True)
class KpResult:
    violation: KpViolation | None
    pairs_checked: int

    @property
    def ok(self) -> bool:
        return self.violation is None


def _negate_strategy(strat: Strategy) -> Strategy:
    return Strategy(
        strat.filtration,
        tuple(
            tuple(tuple(tuple(-v for v in row) for row in mat) for mat in per_atom)
            for per_atom in strat.entries
        ),
    )


def _strategy_sign_feasible(tm: TradeMap, strat: Strategy) -> bool:
    return all(
        tm.cone.sign_feasible(mat) for per_atom in strat.entries for mat in per_atom
    )


def kp_sample_test(
    tm: TradeMap,
    n_samples: int = 32,
    seed: int = 0,
    candidates: tuple[tuple[Strategy, Strategy], ...] = (),
    budget: Budget | None = None,
) -> KpResult:
    """Sampled cancellation property: two trades whose combined terminal
    wealth is nonnegative must cancel exactly and be reversible date by date.
    """
    budget = budget or unlimited()
    rng = random.Random(seed)
    zero = zero_strategy(tm.filtration, tm.dim)
    pairs: list[tuple[Strategy, Strategy]] = [(zero, zero)]
    pairs.extend(candidates)
    for _ in range(n_samples):
        eta = random_strategy(rng, tm)
        mirror = _negate_strategy(eta)
        if _strategy_sign_feasible(tm, mirror) and rng.random() < 0.5:
            pairs.append((eta, mirror))
        else:
            pairs.append((eta, random_strategy(rng, tm)))
    checked = 0
    for eta, eta2 in pairs:
        checked += 1
        w1, w2 = wealth(tm, eta), wealth(tm, eta2)
        total = [
            tuple(a + b for a, b in zip(w1.terminal[w], w2.terminal[w]))
            for w in range(tm.space.size)
        ]
        if any(v < 0 for vec in total for v in vec):
            continue  # precondition not met
        if any(v > 0 for vec in total for v in vec):
            return KpResult(
                KpViolation("nonzero_sum", None, "combined terminal wealth is not zero"),
                checked,
            )
        for t in range(tm.horizon + 1):
            for path, name in ((w1, "first"), (w2, "second")):
                v = RandomVector(tm.space, path.increments[t])
                if not n0_membership(tm, t, v, budget).member:
                    return KpResult(
                        KpViolation(
                            "irreversible_increment", t,
                            f"{name} trade's date-{t} increment is not reversible",
                        ),
                        checked,
                    )
    return KpResult(None, checked)


@dataclass(frozen=True)
class Hn0SampleResult:
    counterexample: tuple[int, Strategy] | None
    samples: int

    @property
    def ok(self) -> bool:
        return self.counterexample is None


def check_hn0_sampled(
    tm: TradeMap, n_samples: int = 32, seed: int = 0, budget: Budget | None = None
) -> Hn0SampleResult:
    """Sampled check that reversible values come from sign-invertible orders."""
    budget = budget or unlimited()
    rng = random.Random(seed)
    for _ in range(n_samples):
        t = rng.randrange(tm.horizon + 1)
        mats = tuple(random_order_matrix(rng, tm.cone) for _ in tm.filtration.atoms(t))
        strat_entries = []
        for u in range(tm.horizon + 1):
            if u == t:
                strat_entries.append(mats)
            else:
                d = tm.dim
                zero = tuple(vzero(d) for _ in range(d))
                strat_entries.append(tuple(zero for _ in tm.filtration.atoms(u)))
        strat = Strategy(tm.filtration, tuple(strat_entries))
        path = wealth(tm, strat)
        v = RandomVector(tm.space, path.increments[t])
        if not n0_membership(tm, t, v, budget).member:
            continue
        mirror = _negate_strategy(strat)
        if not _strategy_sign_feasible(tm, mirror):
            return Hn0SampleResult((t, strat), n_samples)
        mirror_path = wealth(tm, mirror)
        flipped = all(
            mirror_path.increments[t][w] == vneg(path.increments[t][w])
            for w in range(tm.space.size)
        )
        if not flipped:
            return Hn0SampleResult((t, strat), n_samples)
    return Hn0SampleResult(None, n_samples)
