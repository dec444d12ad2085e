"""Finite measurable spaces.

A sigma-algebra on a finite universe is stored as its partition into
atoms: a set is measurable exactly when it is a union of atoms.  All
constructions in this package (generated sigma-algebras, R-closed
sub-sigma-algebras, inseparability relations) reduce to manipulating
that partition, which keeps everything exact and canonical.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .errors import DomainError, PreconditionError

StateSet = frozenset[str]
Pair = tuple[str, str]


@dataclass(frozen=True)
class Universe:
    """A finite ordered set of state identifiers."""

    states: tuple[str, ...]

    def __post_init__(self):
        if not self.states:
            raise DomainError("universe must be non-empty")
        if len(set(self.states)) != len(self.states):
            raise DomainError("universe contains duplicate state identifiers")

    def __contains__(self, s: str) -> bool:
        return s in self.states

    def __iter__(self):
        return iter(self.states)

    def __len__(self) -> int:
        return len(self.states)

    def index(self, s: str) -> int:
        try:
            return self.states.index(s)
        except ValueError:
            raise DomainError(f"unknown state {s!r}") from None

    def check_subset(self, q: Iterable[str]) -> StateSet:
        q = frozenset(q)
        for s in q:
            if s not in self.states:
                raise DomainError(f"state {s!r} is not in the universe")
        return q

    def sort(self, q: Iterable[str]) -> list[str]:
        return sorted(q, key=self.index)


def _canonical_atoms(universe: Universe, atoms: Iterable[frozenset[str]]) -> tuple[StateSet, ...]:
    return tuple(sorted((frozenset(a) for a in atoms), key=lambda a: min(universe.index(s) for s in a)))


@dataclass(frozen=True)
class SigmaAlgebra:
    """A finite sigma-algebra, represented by its atom partition."""

    universe: Universe
    atoms: tuple[StateSet, ...]

    def __post_init__(self):
        seen: set[str] = set()
        for a in self.atoms:
            if not a:
                raise DomainError("sigma-algebra atoms must be non-empty")
            if a & seen:
                raise DomainError("sigma-algebra atoms must be disjoint")
            seen |= a
        if seen != set(self.universe.states):
            raise DomainError("sigma-algebra atoms must cover the universe")
        object.__setattr__(self, "atoms", _canonical_atoms(self.universe, self.atoms))

    @classmethod
    def powerset(cls, universe: Universe) -> "SigmaAlgebra":
        return cls(universe, tuple(frozenset([s]) for s in universe))

    @classmethod
    def trivial(cls, universe: Universe) -> "SigmaAlgebra":
        return cls(universe, (frozenset(universe.states),))

    @property
    def is_powerset(self) -> bool:
        return all(len(a) == 1 for a in self.atoms)

    def atom_of(self, s: str) -> StateSet:
        for a in self.atoms:
            if s in a:
                return a
        raise DomainError(f"unknown state {s!r}")

    def atom_index(self, s: str) -> int:
        for i, a in enumerate(self.atoms):
            if s in a:
                return i
        raise DomainError(f"unknown state {s!r}")

    def is_measurable(self, q: Iterable[str]) -> bool:
        """True iff q is a union of atoms."""
        q = self.universe.check_subset(q)
        return all(a <= q or not (a & q) for a in self.atoms)

    def measurable_sets(self) -> list[StateSet]:
        """All measurable sets, i.e. all unions of atoms (2^len(atoms) sets)."""
        sets: list[StateSet] = [frozenset()]
        for a in self.atoms:
            sets += [q | a for q in sets]
        return sets

    def __le__(self, other: "SigmaAlgebra") -> bool:
        return sigma_is_sub(self, other)


@dataclass(frozen=True)
class Relation:
    """A binary relation on a universe, as a set of ordered pairs."""

    universe: Universe
    pairs: frozenset[Pair]

    def __post_init__(self):
        for s, t in self.pairs:
            if s not in self.universe or t not in self.universe:
                raise DomainError(f"relation pair ({s!r}, {t!r}) leaves the universe")

    @classmethod
    def from_pairs(cls, universe: Universe, pairs: Iterable[Pair]) -> "Relation":
        return cls(universe, frozenset(pairs))

    @classmethod
    def identity(cls, universe: Universe) -> "Relation":
        return cls(universe, frozenset((s, s) for s in universe))

    @classmethod
    def total(cls, universe: Universe) -> "Relation":
        return cls(universe, frozenset((s, t) for s in universe for t in universe))

    @classmethod
    def from_partition(cls, universe: Universe, blocks: Iterable[Iterable[str]]) -> "Relation":
        """The equivalence relation whose classes are the given blocks."""
        pairs = set()
        for block in blocks:
            block = list(block)
            for s in block:
                for t in block:
                    pairs.add((s, t))
        return cls(universe, frozenset(pairs))

    @property
    def is_symmetric(self) -> bool:
        return all((t, s) in self.pairs for s, t in self.pairs)

    @property
    def is_reflexive(self) -> bool:
        return all((s, s) in self.pairs for s in self.universe)

    @property
    def is_equivalence(self) -> bool:
        if not (self.is_reflexive and self.is_symmetric):
            return False
        # With reflexivity and symmetry, transitivity is equivalent to the
        # pairs being exactly the union of squares of the greedy blocks.
        blocks = self._greedy_blocks()
        square = frozenset((s, t) for b in blocks for s in b for t in b)
        return square == self.pairs

    def symmetric_closure(self) -> "Relation":
        return Relation(self.universe, self.pairs | frozenset((t, s) for s, t in self.pairs))

    def image(self, q: Iterable[str]) -> StateSet:
        q = self.universe.check_subset(q)
        return frozenset(t for s, t in self.pairs if s in q)

    def _greedy_blocks(self) -> list[set[str]]:
        blocks: list[set[str]] = []
        for s in self.universe:
            for b in blocks:
                if (s, next(iter(b))) in self.pairs:
                    b.add(s)
                    break
            else:
                blocks.append({s})
        return blocks

    def classes(self) -> tuple[StateSet, ...]:
        """Equivalence classes, canonically ordered; requires an equivalence."""
        if not self.is_equivalence:
            raise PreconditionError("classes() requires an equivalence relation")
        return _canonical_atoms(self.universe, (frozenset(b) for b in self._greedy_blocks()))

    def __contains__(self, pair: Pair) -> bool:
        return pair in self.pairs

    def __le__(self, other: "Relation") -> bool:
        return self.pairs <= other.pairs

    def union(self, other: "Relation") -> "Relation":
        return Relation(self.universe, self.pairs | other.pairs)

    def compose(self, other: "Relation") -> "Relation":
        pairs = frozenset(
            (s, v) for s, t in self.pairs for u, v in other.pairs if t == u
        )
        return Relation(self.universe, pairs)


def sigma_generate(universe: Universe, generators: Iterable[Iterable[str]]) -> SigmaAlgebra:
    """Smallest sigma-algebra containing every generator set.

    Two states end up in the same atom exactly when no generator
    separates them; closure under complement and union then falls out of
    the atom representation.
    """
    gens = [universe.check_subset(g) for g in generators]
    signature: dict[tuple[bool, ...], set[str]] = {}
    for s in universe:
        sig = tuple(s in g for g in gens)
        signature.setdefault(sig, set()).add(s)
    return SigmaAlgebra(universe, tuple(frozenset(b) for b in signature.values()))


def is_measurable(sigma: SigmaAlgebra, q: Iterable[str]) -> bool:
    return sigma.is_measurable(q)


def is_r_closed(r: Relation, q: Iterable[str]) -> bool:
    """True iff the image of q under r stays inside q."""
    q = r.universe.check_subset(q)
    return r.image(q) <= q


def sigma_of_relation(sigma: SigmaAlgebra, r: Relation) -> SigmaAlgebra:
    """Sub-sigma-algebra of all r-closed measurable sets.

    For symmetric r, a union of atoms is r-closed iff it is a union of
    connected components of the atom graph with an edge whenever some
    related pair straddles two atoms, so the components are the atoms of
    the result.
    """
    if sigma.universe != r.universe:
        raise DomainError("sigma-algebra and relation live on different universes")
    if not r.is_symmetric:
        raise PreconditionError("sigma_of_relation requires a symmetric relation")
    parent = list(range(len(sigma.atoms)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for s, t in r.pairs:
        i, j = find(sigma.atom_index(s)), find(sigma.atom_index(t))
        if i != j:
            parent[j] = i
    merged: dict[int, set[str]] = {}
    for i, a in enumerate(sigma.atoms):
        merged.setdefault(find(i), set()).update(a)
    return SigmaAlgebra(sigma.universe, tuple(frozenset(b) for b in merged.values()))


def relation_of_sigma(lam: SigmaAlgebra) -> Relation:
    """Inseparability by lam-measurable sets: the equivalence whose
    classes are exactly lam's atoms."""
    return Relation.from_partition(lam.universe, lam.atoms)


def sigma_is_sub(lam: SigmaAlgebra, sigma: SigmaAlgebra) -> bool:
    """True iff every lam-measurable set is sigma-measurable, i.e. sigma's
    atoms refine lam's."""
    if lam.universe != sigma.universe:
        raise DomainError("sigma-algebras live on different universes")
    return all(any(a <= b for b in lam.atoms) for a in sigma.atoms)
