"""Finite probability spaces, partition filtrations and exact conditional expectations.

A scenario set carries strictly positive rational probabilities that sum to
exactly 1.  Information over dates 0..T is a refining chain of partitions of
the outcome indices; the final partition is allowed to be coarser than the
discrete one, so market data need not be observable even at the horizon.
All operations are exact: conditional expectations, measure changes and
martingale checks decide equalities, never approximate them.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

from .errors import (
    DuplicateLabel,
    NotAPartition,
    NotNormalized,
    NotRefining,
    ZeroDensity,
    ZeroProbability,
)
from .rationals import ONE, Vec, ZERO, as_vec, rat

Atom = tuple[int, ...]
Partition = tuple[Atom, ...]


@dataclass(frozen=True)
class FiniteSpace:
    """Scenario labels with strictly positive probabilities summing to 1."""

    outcomes: tuple[str, ...]
    probs: tuple[Fraction, ...]

    @property
    def size(self) -> int:
        return len(self.outcomes)

    def prob_of(self, atom: Sequence[int]) -> Fraction:
        return sum((self.probs[w] for w in atom), ZERO)

    def index(self, label: str) -> int:
        return self.outcomes.index(label)


def build_space(labels: Sequence[str], probs: Sequence[Fraction | int | str]) -> FiniteSpace:
    if not labels:
        raise NotAPartition("a space needs at least one outcome")
    if len(set(labels)) != len(labels):
        raise DuplicateLabel(f"outcome labels are not unique: {list(labels)}")
    if len(probs) != len(labels):
        raise NotNormalized("labels and probs must have the same length")
    values = tuple(rat(p) for p in probs)
    for label, p in zip(labels, values):
        if p <= 0:
            raise ZeroProbability(f"P({label}) = {p} is not strictly positive")
    total = sum(values, ZERO)
    if total != 1:
        raise NotNormalized(f"probabilities sum to {total}, not 1")
    return FiniteSpace(tuple(labels), values)


def _canonical_partition(atoms: Sequence[Sequence[int]]) -> Partition:
    canon = tuple(sorted((tuple(sorted(set(a))) for a in atoms), key=lambda a: a[0]))
    return canon


@dataclass(frozen=True)
class Filtration:
    """A refining chain of partitions of the outcome indices, dates 0..T."""

    space: FiniteSpace
    partitions: tuple[Partition, ...]

    @property
    def horizon(self) -> int:
        return len(self.partitions) - 1

    def atoms(self, t: int) -> Partition:
        return self.partitions[t]

    def atom_index_of(self, t: int, omega: int) -> int:
        for k, atom in enumerate(self.partitions[t]):
            if omega in atom:
                return k
        raise NotAPartition(f"outcome {omega} missing from date-{t} partition")


def build_filtration(space: FiniteSpace, partitions: Sequence[Sequence[Sequence[int]]]) -> Filtration:
    if not partitions:
        raise NotAPartition("a filtration needs at least the date-0 partition")
    canon: list[Partition] = []
    universe = set(range(space.size))
    for t, raw in enumerate(partitions):
        part = _canonical_partition(raw)
        if any(not atom for atom in part):
            raise NotAPartition(f"date {t}: empty atom")
        seen: set[int] = set()
        for atom in part:
            if any(w in seen for w in atom):
                raise NotAPartition(f"date {t}: atoms overlap")
            if any(w not in universe for w in atom):
                raise NotAPartition(f"date {t}: outcome index out of range")
            seen.update(atom)
        if seen != universe:
            raise NotAPartition(f"date {t}: atoms do not cover all outcomes")
        canon.append(part)
    for t in range(len(canon) - 1):
        coarse = canon[t]
        for atom in canon[t + 1]:
            parents = {next(k for k, c in enumerate(coarse) if w in c) for w in atom}
            if len(parents) > 1:
                raise NotRefining(
                    f"date {t + 1} atom {atom} straddles several date-{t} atoms"
                )
    return Filtration(space, tuple(canon))


def full_information_filtration(space: FiniteSpace, horizon: int) -> Filtration:
    """Trivial at date 0, discrete from date 1 on (a convenience, not required)."""
    parts: list[list[list[int]]] = [[list(range(space.size))]]
    for _ in range(horizon):
        parts.append([[w] for w in range(space.size)])
    return build_filtration(space, parts)


@dataclass(frozen=True)
class RandomVector:
    """One vector of rationals per outcome, fixed dimension."""

    space: FiniteSpace
    values: tuple[Vec, ...]

    @property
    def dim(self) -> int:
        return len(self.values[0])

    def at(self, omega: int) -> Vec:
        return self.values[omega]


def random_vector(space: FiniteSpace, values) -> RandomVector:
    vecs = tuple(as_vec(v) for v in values)
    if len(vecs) != space.size:
        raise NotAPartition("one vector per outcome required")
    dims = {len(v) for v in vecs}
    if len(dims) != 1:
        raise NotAPartition("all outcome vectors must share one dimension")
    return RandomVector(space, vecs)


def scalar_random_vector(space: FiniteSpace, values) -> RandomVector:
    return random_vector(space, [[v] for v in values])


@dataclass(frozen=True)
class AdaptedProcess:
    """Per date, one vector per atom of that date's partition."""

    filtration: Filtration
    values: tuple[tuple[Vec, ...], ...]

    @property
    def dim(self) -> int:
        return len(self.values[0][0])

    def at(self, t: int, omega: int) -> Vec:
        return self.values[t][self.filtration.atom_index_of(t, omega)]

    def slice(self, t: int) -> tuple[Vec, ...]:
        return self.values[t]


def adapted_process(filtration: Filtration, values) -> AdaptedProcess:
    data = []
    for t, per_atom in enumerate(values):
        atoms = filtration.atoms(t)
        vecs = tuple(as_vec(v) for v in per_atom)
        if len(vecs) != len(atoms):
            raise NotAPartition(f"date {t}: expected {len(atoms)} atom values")
        data.append(vecs)
    return AdaptedProcess(filtration, tuple(data))


def cond_expect(
    x: RandomVector, filtration: Filtration, t: int, measure: FiniteSpace | None = None
) -> tuple[Vec, ...]:
    """E[X | H_t] under `measure` (default: the filtration's own space).

    Returns one vector per atom of the date-t partition, exactly
    (sum of q_w X(w) over the atom) / (atom mass).
    """
    q = (measure or filtration.space).probs
    out: list[Vec] = []
    for atom in filtration.atoms(t):
        mass = sum((q[w] for w in atom), ZERO)
        sums = [ZERO] * x.dim
        for w in atom:
            for k, v in enumerate(x.values[w]):
                sums[k] += q[w] * v
        out.append(tuple(s / mass for s in sums))
    return tuple(out)


def change_measure(space: FiniteSpace, density: RandomVector) -> FiniteSpace:
    """New measure with dQ/dP proportional to the (strictly positive) density."""
    if density.dim != 1:
        raise ZeroDensity("density must be scalar valued")
    h = [density.values[w][0] for w in range(space.size)]
    if any(v <= 0 for v in h):
        raise ZeroDensity("density must be strictly positive at every outcome")
    weighted = [space.probs[w] * h[w] for w in range(space.size)]
    total = sum(weighted, ZERO)
    return FiniteSpace(space.outcomes, tuple(w / total for w in weighted))


def optional_projection(
    xs: Sequence[RandomVector], filtration: Filtration, measure: FiniteSpace | None = None
) -> AdaptedProcess:
    """The adapted process t -> E_measure[X_t | H_t], one X per date 0..T."""
    if len(xs) != filtration.horizon + 1:
        raise NotAPartition("one random vector per date 0..T required")
    slices = tuple(cond_expect(x, filtration, t, measure) for t, x in enumerate(xs))
    return AdaptedProcess(filtration, slices)


class MartingaleVerdict(NamedTuple):
    ok: bool
    failure: tuple[int, int] | None  # (date, atom index) of the first failure

    def __bool__(self) -> bool:
        return self.ok


def is_martingale(process: AdaptedProcess, measure: FiniteSpace | None = None) -> MartingaleVerdict:
    """Exact one-step martingale check under `measure`, over the process filtration."""
    filtration = process.filtration
    q = (measure or filtration.space).probs
    for t in range(filtration.horizon):
        for a_idx, atom in enumerate(filtration.atoms(t)):
            mass = sum((q[w] for w in atom), ZERO)
            sums = [ZERO] * process.dim
            for w in atom:
                child = filtration.atom_index_of(t + 1, w)
                for k, v in enumerate(process.values[t + 1][child]):
                    sums[k] += q[w] * v
            expected = tuple(s / mass for s in sums)
            if expected != process.values[t][a_idx]:
                return MartingaleVerdict(False, (t, a_idx))
    return MartingaleVerdict(True, None)
