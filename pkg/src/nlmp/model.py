"""Finite nondeterministic labeled Markov processes and their
deterministic (single-kernel) special case.

A model maps each (state, label) to a finite set of probability
measures on its own sigma-algebra.  Validity means measurability of the
transition map: every "hit" preimage of a measurable set of measures
must itself be measurable.  On a finite model the candidate sets of
measures are exactly the unions of profile classes of the transition
pool, and because hit preimages distribute over unions it is enough to
check each class on its own.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import DomainError, PreconditionError
from .measurable import SigmaAlgebra, StateSet, Universe
from .measures import Measure, build_pool, trace_classes

Row = tuple[Measure, ...]


def _canonical_row(measures: Iterable[Measure]) -> Row:
    uniq = {mu: None for mu in measures}
    return tuple(sorted(uniq, key=lambda mu: mu.weights))


class Nlmp:
    """States with, per label, a finite set of target probability measures."""

    def __init__(
        self,
        sigma: SigmaAlgebra,
        labels: Sequence[str],
        transitions: Mapping[tuple[str, str], Iterable[Measure]],
    ):
        self.sigma = sigma
        self.labels = tuple(labels)
        if len(set(self.labels)) != len(self.labels):
            raise DomainError("duplicate labels")
        rows: dict[tuple[str, str], Row] = {}
        for (s, a), measures in transitions.items():
            if s not in sigma.universe:
                raise DomainError(f"unknown state {s!r} in transitions")
            if a not in self.labels:
                raise DomainError(f"unknown label {a!r} in transitions")
            row = _canonical_row(measures)
            for mu in row:
                if mu.sigma != sigma:
                    raise DomainError(
                        f"transition measure at ({s!r}, {a!r}) is not over the model's sigma-algebra"
                    )
            if row:
                rows[(s, a)] = row
        self._rows = rows
        self._pool: tuple[Measure, ...] | None = None

    @property
    def universe(self) -> Universe:
        return self.sigma.universe

    @property
    def states(self) -> tuple[str, ...]:
        return self.universe.states

    def row(self, s: str, a: str) -> Row:
        if s not in self.universe:
            raise DomainError(f"unknown state {s!r}")
        if a not in self.labels:
            raise DomainError(f"unknown label {a!r}")
        return self._rows.get((s, a), ())

    @property
    def pool(self) -> tuple[Measure, ...]:
        """All distinct measures appearing in some transition, in
        first-seen order over (state, label) in canonical order."""
        if self._pool is None:
            self._pool = build_pool(
                mu for s in self.states for a in self.labels for mu in self.row(s, a)
            )
        return self._pool

    def transition_items(self) -> list[tuple[tuple[str, str], Row]]:
        return [
            ((s, a), self._rows[(s, a)])
            for s in self.states
            for a in self.labels
            if (s, a) in self._rows
        ]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Nlmp)
            and self.sigma == other.sigma
            and self.labels == other.labels
            and self._rows == other._rows
        )

    __hash__ = None


class Lmp:
    """The deterministic special case: exactly one kernel measure per
    (state, label)."""

    def __init__(
        self,
        sigma: SigmaAlgebra,
        labels: Sequence[str],
        kernels: Mapping[tuple[str, str], Measure],
    ):
        self.sigma = sigma
        self.labels = tuple(labels)
        if len(set(self.labels)) != len(self.labels):
            raise DomainError("duplicate labels")
        for s in sigma.universe:
            for a in self.labels:
                if (s, a) not in kernels:
                    raise DomainError(f"missing kernel for ({s!r}, {a!r}): kernels must be total")
        self._kernels: dict[tuple[str, str], Measure] = {}
        for (s, a), mu in kernels.items():
            if s not in sigma.universe or a not in self.labels:
                raise DomainError(f"unknown state or label in kernel ({s!r}, {a!r})")
            if mu.sigma != sigma:
                raise DomainError(f"kernel at ({s!r}, {a!r}) is not over the model's sigma-algebra")
            self._kernels[(s, a)] = mu

    @property
    def universe(self) -> Universe:
        return self.sigma.universe

    @property
    def states(self) -> tuple[str, ...]:
        return self.universe.states

    def kernel(self, s: str, a: str) -> Measure:
        if s not in self.universe:
            raise DomainError(f"unknown state {s!r}")
        if a not in self.labels:
            raise DomainError(f"unknown label {a!r}")
        return self._kernels[(s, a)]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Lmp)
            and self.sigma == other.sigma
            and self.labels == other.labels
            and self._kernels == other._kernels
        )

    __hash__ = None


@dataclass(frozen=True)
class Finding:
    severity: str  # "error" | "warning"
    message: str
    label: str | None = None
    state: str | None = None
    xi: tuple[Measure, ...] | None = None
    witness_set: StateSet | None = None


@dataclass(frozen=True)
class ValidationReport:
    findings: tuple[Finding, ...] = ()

    @property
    def valid(self) -> bool:
        return not any(f.severity == "error" for f in self.findings)

    @property
    def errors(self) -> tuple[Finding, ...]:
        return tuple(f for f in self.findings if f.severity == "error")


def nlmp_validate(m: Nlmp) -> ValidationReport:
    """Check well-formedness and measurability of the transition map.

    Measurability quantifies over unions of profile classes of the pool
    (the traces of the measurable sets of measures); since the hit
    preimage of a union is the union of the hit preimages and measurable
    sets are closed under union, checking the single classes decides all
    unions.  The first failing class is reported as the witness.
    """
    findings: list[Finding] = []
    for (s, a), row in m.transition_items():
        for mu in row:
            if sum(mu.weights) != 1:
                findings.append(
                    Finding("error", "transition weight vector does not sum to 1", label=a, state=s)
                )
    classes = trace_classes(m.pool, m.sigma)
    for a in m.labels:
        for cls in classes:
            pre = hit_preimage(m, a, cls)
            if not m.sigma.is_measurable(pre):
                findings.append(
                    Finding(
                        "error",
                        "hit preimage of a measurable set of measures is not measurable",
                        label=a,
                        xi=cls,
                        witness_set=pre,
                    )
                )
    return ValidationReport(tuple(findings))


def lmp_validate(l: Lmp) -> ValidationReport:
    """Curried measurability of the kernels: for every label and
    measurable set, the per-state value map must have measurable level
    sets."""
    findings: list[Finding] = []
    for a in l.labels:
        for q in l.sigma.measurable_sets():
            by_value: dict = {}
            for s in l.states:
                by_value.setdefault(l.kernel(s, a).value(q), set()).add(s)
            for v, level in sorted(by_value.items()):
                if not l.sigma.is_measurable(level):
                    findings.append(
                        Finding(
                            "error",
                            f"kernel value map on {sorted(q)} has a non-measurable level set at {v}",
                            label=a,
                            witness_set=frozenset(level),
                        )
                    )
    return ValidationReport(tuple(findings))


def lmp_embed(l: Lmp, validate: bool = True) -> Nlmp:
    """Wrap each kernel into a singleton transition set.

    The embedding preserves validation verdicts in both directions, so
    callers that need that equivalence on invalid inputs can pass
    validate=False.
    """
    if validate and not lmp_validate(l).valid:
        raise PreconditionError("cannot embed an invalid deterministic model")
    transitions = {
        (s, a): (l.kernel(s, a),) for s in l.states for a in l.labels
    }
    return Nlmp(l.sigma, l.labels, transitions)


def is_non_probabilistic(m: Nlmp) -> bool:
    """True iff every transition measure is a point mass (weight 1 on a
    single atom)."""
    return all(mu.is_dirac for _, row in m.transition_items() for mu in row)


def hit_preimage(m: Nlmp, a: str, xi: Iterable[Measure]) -> StateSet:
    """States whose transition set under a intersects xi."""
    if a not in m.labels:
        raise DomainError(f"unknown label {a!r}")
    xi = frozenset(xi)
    pool = frozenset(m.pool)
    for mu in xi:
        if mu not in pool:
            raise DomainError("xi contains a measure outside the model's pool")
    return frozenset(s for s in m.states if set(m.row(s, a)) & xi)


def diamond(m: Nlmp, a: str, q: Iterable[str]) -> StateSet:
    """States with some point-mass transition under a into q.

    Only defined on non-probabilistic models, where each transition
    measure is a point mass on an atom; the measure hits q exactly when
    that atom meets q.
    """
    if not is_non_probabilistic(m):
        raise PreconditionError("diamond is only defined on non-probabilistic models")
    if a not in m.labels:
        raise DomainError(f"unknown label {a!r}")
    q = m.universe.check_subset(q)
    hit = set()
    for s in m.states:
        for mu in m.row(s, a):
            atom = mu.dirac_atom
            if atom is not None and atom & q:
                hit.add(s)
                break
    return frozenset(hit)
