"""Exact-rational probability measures on a finite sigma-algebra.

A measure is a vector of Fraction weights, one per atom.  Its behavior
on a sub-sigma-algebra is captured by its profile there (the vector of
values on the coarser atoms); two measures agree on every set of the
sub-sigma-algebra iff their profiles are equal.  The measurable sets of
measures used elsewhere in the package are never materialized: only
their trace on a model's finite pool matters, and that trace is always
a union of profile classes.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import DomainError, PreconditionError
from .measurable import SigmaAlgebra, StateSet, sigma_is_sub

ZERO = Fraction(0)
ONE = Fraction(1)

Profile = tuple[Fraction, ...]


@dataclass(frozen=True)
class Measure:
    """A probability measure, stored as one weight per atom of sigma."""

    sigma: SigmaAlgebra
    weights: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.weights) != len(self.sigma.atoms):
            raise DomainError("need exactly one weight per atom")
        object.__setattr__(self, "weights", tuple(Fraction(w) for w in self.weights))
        for w in self.weights:
            if w < ZERO or w > ONE:
                raise DomainError(f"atom weight {w} outside [0, 1]")
        if sum(self.weights) != ONE:
            raise DomainError(f"atom weights sum to {sum(self.weights)}, expected 1")

    @classmethod
    def from_atom_weights(cls, sigma: SigmaAlgebra, by_atom: Mapping[StateSet, Fraction]) -> "Measure":
        return cls(sigma, tuple(Fraction(by_atom.get(a, ZERO)) for a in sigma.atoms))

    @classmethod
    def from_state_weights(cls, sigma: SigmaAlgebra, by_state: Mapping[str, Fraction]) -> "Measure":
        """Weights given on states are accumulated into their atoms; a
        measure on a coarse sigma-algebra cannot see finer detail."""
        totals = [ZERO] * len(sigma.atoms)
        for s, w in by_state.items():
            totals[sigma.atom_index(s)] += Fraction(w)
        return cls(sigma, tuple(totals))

    def value(self, q: Iterable[str]) -> Fraction:
        """Measure of a measurable set: the sum of its atoms' weights."""
        q = self.sigma.universe.check_subset(q)
        if not self.sigma.is_measurable(q):
            raise DomainError(f"set {sorted(q)} is not measurable")
        return sum((w for a, w in zip(self.sigma.atoms, self.weights) if a <= q), ZERO)

    @property
    def dirac_atom(self) -> StateSet | None:
        """The single atom carrying weight 1, if any."""
        for a, w in zip(self.sigma.atoms, self.weights):
            if w == ONE:
                return a
        return None

    @property
    def is_dirac(self) -> bool:
        return self.dirac_atom is not None


def measure_eval(mu: Measure, q: Iterable[str]) -> Fraction:
    return mu.value(q)


def dirac(sigma: SigmaAlgebra, s: str) -> Measure:
    """Point mass at s: value 1 on exactly the measurable sets containing s."""
    if s not in sigma.universe:
        raise DomainError(f"unknown state {s!r}")
    i = sigma.atom_index(s)
    return Measure(sigma, tuple(ONE if j == i else ZERO for j in range(len(sigma.atoms))))


@dataclass(frozen=True)
class BoundSpec:
    """A probability bound: one of >=, >, <, <= a threshold, or an open
    interval (lo, hi).  Thresholds are rationals in [0, 1]."""

    kind: str  # "ge" | "gt" | "lt" | "le" | "interval"
    lo: Fraction
    hi: Fraction | None = None

    def __post_init__(self):
        if self.kind not in ("ge", "gt", "lt", "le", "interval"):
            raise DomainError(f"unknown bound kind {self.kind!r}")
        object.__setattr__(self, "lo", Fraction(self.lo))
        if self.kind == "interval":
            if self.hi is None:
                raise DomainError("interval bound needs an upper threshold")
            object.__setattr__(self, "hi", Fraction(self.hi))
            if self.lo > self.hi:
                raise DomainError("interval bounds out of order")
        elif self.hi is not None:
            raise DomainError("only interval bounds take two thresholds")
        for q in (self.lo,) if self.hi is None else (self.lo, self.hi):
            if q < ZERO or q > ONE:
                raise DomainError(f"threshold {q} outside [0, 1]")

    @classmethod
    def at_least(cls, q) -> "BoundSpec":
        return cls("ge", Fraction(q))

    @classmethod
    def greater(cls, q) -> "BoundSpec":
        return cls("gt", Fraction(q))

    @classmethod
    def less(cls, q) -> "BoundSpec":
        return cls("lt", Fraction(q))

    @classmethod
    def at_most(cls, q) -> "BoundSpec":
        return cls("le", Fraction(q))

    @classmethod
    def open_interval(cls, lo, hi) -> "BoundSpec":
        return cls("interval", Fraction(lo), Fraction(hi))

    def contains(self, v: Fraction) -> bool:
        if self.kind == "ge":
            return v >= self.lo
        if self.kind == "gt":
            return v > self.lo
        if self.kind == "lt":
            return v < self.lo
        if self.kind == "le":
            return v <= self.lo
        return self.lo < v < self.hi


def in_delta_set(mu: Measure, q: Iterable[str], b: BoundSpec) -> bool:
    """Membership of mu in the set of measures whose value on q meets b."""
    return b.contains(mu.value(q))


def profile(mu: Measure, lam: SigmaAlgebra) -> Profile:
    """mu's values on lam's atoms, in canonical atom order.

    Requires lam to be a sub-sigma-algebra of mu's.  Two measures have
    equal profiles over lam iff they agree on every lam-measurable set.
    """
    if not sigma_is_sub(lam, mu.sigma):
        raise PreconditionError("profile requires a sub-sigma-algebra of the measure's")
    return tuple(
        sum((w for a, w in zip(mu.sigma.atoms, mu.weights) if a <= lam_atom), ZERO)
        for lam_atom in lam.atoms
    )


def measures_related(mu: Measure, nu: Measure, sigma_r: SigmaAlgebra) -> bool:
    """The lifted relation: mu and nu agree on every sigma_r-measurable set."""
    return profile(mu, sigma_r) == profile(nu, sigma_r)


def build_pool(measures: Iterable[Measure]) -> tuple[Measure, ...]:
    """Deduplicate by exact equality, preserving first-seen order."""
    seen: dict[Measure, None] = {}
    for mu in measures:
        seen.setdefault(mu)
    return tuple(seen)


def trace_classes(pool: Sequence[Measure], lam: SigmaAlgebra) -> tuple[tuple[Measure, ...], ...]:
    """Partition of the pool by equal profile over lam.

    The unions of these classes are exactly the traces on the pool of
    the measurable sets of measures generated by lam (see the design
    notes in the README); everything that quantifies over such sets can
    therefore quantify over unions of classes instead.
    """
    groups: dict[Profile, list[Measure]] = {}
    for mu in pool:
        groups.setdefault(profile(mu, lam), []).append(mu)
    return tuple(tuple(g) for g in groups.values())
