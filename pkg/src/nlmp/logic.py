"""Two-level probabilistic modal logic: exact semantics, logical
equivalence, and distinguishing-formula synthesis.

State formulas denote sets of states; measure formulas denote sets of
probability measures, realized here as subsets of a model's transition
pool.  The diamond modality existentially quantifies over the
nondeterministic transition set, and the multi-constraint diamond
requires one and the same transition measure to satisfy several
probability bounds at once; a single bound per modality is strictly
weaker on nondeterministic models.

Synthesis walks the bisimulation refinement: whenever two states split,
one unmatched transition measure is pinned down against every measure
on the other side by already-synthesized formulas, with a rational
midpoint threshold for each, and the bounds are packed into one
multi-constraint diamond.  Every synthesized formula is re-checked by
the evaluator before it is handed out.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError, InternalCheckError, PreconditionError, UnsupportedModelError
from .measurable import Relation, StateSet, sigma_of_relation
from .measures import Measure, ZERO, profile
from .model import Nlmp, hit_preimage, nlmp_validate

Partition = tuple[StateSet, ...]


# ---------------------------------------------------------------------------
# Abstract syntax


class StateFormula:
    """Base class; denotes a set of states."""

    __slots__ = ()


class MeasureFormula:
    """Base class; denotes a set of measures (a pool subset)."""

    __slots__ = ()


@dataclass(frozen=True)
class Top(StateFormula):
    pass


@dataclass(frozen=True)
class And(StateFormula):
    left: StateFormula
    right: StateFormula


@dataclass(frozen=True)
class Diamond(StateFormula):
    label: str
    body: MeasureFormula


@dataclass(frozen=True)
class Constraint:
    """One probability bound of a multi-constraint diamond."""

    op: str  # ">" | "<"
    threshold: Fraction
    phi: StateFormula

    def __post_init__(self):
        if self.op not in (">", "<"):
            raise DomainError(f"constraint operator must be > or <, got {self.op!r}")
        object.__setattr__(self, "threshold", Fraction(self.threshold))
        if not 0 <= self.threshold <= 1:
            raise DomainError(f"constraint threshold {self.threshold} outside [0, 1]")


@dataclass(frozen=True)
class DiamondMulti(StateFormula):
    """All listed bounds must hold for a single transition measure."""

    label: str
    constraints: tuple[Constraint, ...]

    def __post_init__(self):
        if not self.constraints:
            raise DomainError("multi-constraint diamond needs at least one constraint")


@dataclass(frozen=True)
class MOr(MeasureFormula):
    items: tuple[MeasureFormula, ...]


@dataclass(frozen=True)
class MNot(MeasureFormula):
    item: MeasureFormula


def _check_threshold(q: Fraction) -> Fraction:
    q = Fraction(q)
    if not 0 <= q <= 1:
        raise DomainError(f"threshold {q} outside [0, 1]")
    return q


@dataclass(frozen=True)
class AtLeast(MeasureFormula):
    phi: StateFormula
    q: Fraction

    def __post_init__(self):
        object.__setattr__(self, "q", _check_threshold(self.q))


@dataclass(frozen=True)
class GreaterThan(MeasureFormula):
    """Sugar for the countable disjunction of AtLeast above the
    threshold; on a finite pool it is the exact strict test."""

    phi: StateFormula
    q: Fraction

    def __post_init__(self):
        object.__setattr__(self, "q", _check_threshold(self.q))


@dataclass(frozen=True)
class LessThan(MeasureFormula):
    """Sugar for the complement of AtLeast."""

    phi: StateFormula
    q: Fraction

    def __post_init__(self):
        object.__setattr__(self, "q", _check_threshold(self.q))


@dataclass(frozen=True)
class AtMost(MeasureFormula):
    """Sugar for the complement of GreaterThan."""

    phi: StateFormula
    q: Fraction

    def __post_init__(self):
        object.__setattr__(self, "q", _check_threshold(self.q))


# ---------------------------------------------------------------------------
# Concrete syntax rendering (the parser lives in nlmp.parser)


def formula_to_text(f: StateFormula | MeasureFormula) -> str:
    if isinstance(f, Top):
        return "T"
    if isinstance(f, And):
        right = formula_to_text(f.right)
        if isinstance(f.right, And):
            right = f"({right})"
        return f"{formula_to_text(f.left)} & {right}"
    if isinstance(f, Diamond):
        return f"<{f.label}> {formula_to_text(f.body)}"
    if isinstance(f, DiamondMulti):
        parts = ", ".join(
            f"{c.op}{c.threshold} {formula_to_text(c.phi)}" for c in f.constraints
        )
        return f"<{f.label}>[ {parts} ]"
    if isinstance(f, MOr):
        if not f.items:
            return "![T]>=0"  # empty disjunction: the empty set of measures
        if len(f.items) == 1:
            return formula_to_text(f.items[0])
        parts = [
            f"({formula_to_text(i)})" if isinstance(i, MOr) else formula_to_text(i)
            for i in f.items
        ]
        return " \\/ ".join(parts)
    if isinstance(f, MNot):
        inner = formula_to_text(f.item)
        if isinstance(f.item, MOr):
            inner = f"({inner})"
        return f"!{inner}"
    if isinstance(f, AtLeast):
        return f"[{formula_to_text(f.phi)}]>={f.q}"
    if isinstance(f, GreaterThan):
        return f"[{formula_to_text(f.phi)}]>{f.q}"
    if isinstance(f, LessThan):
        return f"[{formula_to_text(f.phi)}]<{f.q}"
    if isinstance(f, AtMost):
        return f"[{formula_to_text(f.phi)}]<={f.q}"
    raise TypeError(f"not a formula: {f!r}")


def formula_labels(f: StateFormula | MeasureFormula) -> frozenset[str]:
    if isinstance(f, (Top,)):
        return frozenset()
    if isinstance(f, And):
        return formula_labels(f.left) | formula_labels(f.right)
    if isinstance(f, Diamond):
        return frozenset([f.label]) | formula_labels(f.body)
    if isinstance(f, DiamondMulti):
        out = frozenset([f.label])
        for c in f.constraints:
            out |= formula_labels(c.phi)
        return out
    if isinstance(f, MOr):
        out = frozenset()
        for i in f.items:
            out |= formula_labels(i)
        return out
    if isinstance(f, MNot):
        return formula_labels(f.item)
    if isinstance(f, (AtLeast, GreaterThan, LessThan, AtMost)):
        return formula_labels(f.phi)
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# Semantics


def eval_state(m: Nlmp, phi: StateFormula) -> StateSet:
    """The set of states satisfying phi.

    The result is always measurable in the model's sigma-algebra; this
    is asserted after every modality, and can only fail when the model
    itself fails validation.
    """
    if isinstance(phi, Top):
        return frozenset(m.states)
    if isinstance(phi, And):
        return eval_state(m, phi.left) & eval_state(m, phi.right)
    if isinstance(phi, Diamond):
        xi = eval_measure(m, phi.body)
        result = hit_preimage(m, phi.label, xi)
        _assert_measurable(m, result)
        return result
    if isinstance(phi, DiamondMulti):
        if phi.label not in m.labels:
            raise DomainError(f"unknown label {phi.label!r}")
        bounds = [(c, eval_state(m, c.phi)) for c in phi.constraints]
        result = frozenset(
            s
            for s in m.states
            if any(
                all(_bound_holds(mu.value(ext), c) for c, ext in bounds)
                for mu in m.row(s, phi.label)
            )
        )
        _assert_measurable(m, result)
        return result
    raise TypeError(f"not a state formula: {phi!r}")


def _bound_holds(v: Fraction, c: Constraint) -> bool:
    return v > c.threshold if c.op == ">" else v < c.threshold


def _assert_measurable(m: Nlmp, q: StateSet) -> None:
    if not m.sigma.is_measurable(q):
        raise InternalCheckError(
            "formula denotes a non-measurable state set; the model does not "
            "pass measurability validation"
        )


def eval_measure(m: Nlmp, psi: MeasureFormula) -> frozenset[Measure]:
    """The set of pool measures satisfying psi.

    Negation complements within the pool: only the trace of the
    denoted measure set on the model's finitely many transition
    measures is ever needed.
    """
    if isinstance(psi, MOr):
        out: frozenset[Measure] = frozenset()
        for item in psi.items:
            out |= eval_measure(m, item)
        return out
    if isinstance(psi, MNot):
        return frozenset(m.pool) - eval_measure(m, psi.item)
    if isinstance(psi, (AtLeast, GreaterThan, LessThan, AtMost)):
        ext = eval_state(m, psi.phi)
        if isinstance(psi, AtLeast):
            keep = lambda v: v >= psi.q
        elif isinstance(psi, GreaterThan):
            keep = lambda v: v > psi.q
        elif isinstance(psi, LessThan):
            keep = lambda v: v < psi.q
        else:
            keep = lambda v: v <= psi.q
        return frozenset(mu for mu in m.pool if keep(mu.value(ext)))
    raise TypeError(f"not a measure formula: {psi!r}")


def satisfies(m: Nlmp, s: str, phi: StateFormula) -> bool:
    if s not in m.universe:
        raise DomainError(f"unknown state {s!r}")
    return s in eval_state(m, phi)


# ---------------------------------------------------------------------------
# Definitional expansions (used by coherence tests and documentation)


def expand_multi(phi: DiamondMulti) -> Diamond:
    """The multi-constraint diamond as a plain diamond over a measure
    level conjunction (made of negation and disjunction)."""
    bounds: list[MeasureFormula] = [
        GreaterThan(c.phi, c.threshold) if c.op == ">" else LessThan(c.phi, c.threshold)
        for c in phi.constraints
    ]
    conjunction = MNot(MOr(tuple(MNot(b) for b in bounds)))
    return Diamond(phi.label, conjunction)


def expand_greater(m: Nlmp, phi: StateFormula, q: Fraction) -> MOr:
    """The strict bound as a finite disjunction of inclusive bounds over
    the pool-relevant thresholds (the values model measures actually
    take on phi's extension)."""
    ext = eval_state(m, phi)
    values = sorted({mu.value(ext) for mu in m.pool if mu.value(ext) > q})
    return MOr(tuple(AtLeast(phi, v) for v in values))


# ---------------------------------------------------------------------------
# Logical equivalence and synthesis


@dataclass(frozen=True)
class EquivalenceReport:
    fragment: str  # "L" | "Lf"
    relation: Relation
    partition: Partition
    formulas: dict[tuple[str, str], StateFormula]


def logical_equivalence(m: Nlmp, fragment: str = "Lf") -> EquivalenceReport:
    """States indistinguishable by the chosen fragment.

    fragment="L" (the full logic, with measure-level negation and
    disjunction) coincides with event bisimilarity: it is computed as
    the inseparability relation of the smallest stable sigma-algebra,
    and no per-pair formulas are produced.

    fragment="Lf" (the finitary sublogic built from the multi-constraint
    diamond) runs the bisimulation refinement and synthesizes a
    distinguishing formula for every pair of states it separates.
    """
    if fragment == "L":
        from .bisim import smallest_stable_sigma

        rep = smallest_stable_sigma(m)
        return EquivalenceReport("L", rep.relation, rep.partition, {})
    if fragment != "Lf":
        raise ValueError(f"unknown fragment {fragment!r}")
    if not nlmp_validate(m).valid:
        raise PreconditionError("model fails measurability validation")
    partition, formulas = _lf_refinement(m)
    relation = Relation.from_partition(m.universe, partition)
    for (s, t), psi in formulas.items():
        if satisfies(m, s, psi) == satisfies(m, t, psi):
            raise InternalCheckError(f"synthesized formula fails to separate {s!r} and {t!r}")
    return EquivalenceReport("Lf", relation, partition, formulas)


def distinguish(m: Nlmp, s: str, t: str) -> StateFormula | None:
    """A verified formula of the finitary sublogic separating s and t,
    or None when the two states are bisimilar.

    Only full powerset models are supported: on them the sublogic is
    known to pin down bisimilarity exactly, while on coarser
    sigma-algebras no such guarantee is available and the operation
    refuses to guess.
    """
    if s not in m.universe:
        raise DomainError(f"unknown state {s!r}")
    if t not in m.universe:
        raise DomainError(f"unknown state {t!r}")
    if not m.sigma.is_powerset:
        raise UnsupportedModelError(
            "distinguishing formulas are only synthesized on full powerset models"
        )
    report = logical_equivalence(m, "Lf")
    if (s, t) in report.relation:
        return None
    psi = report.formulas[(s, t)]
    if satisfies(m, s, psi) == satisfies(m, t, psi):
        raise InternalCheckError("distinguishing formula failed re-verification")
    return psi


def _lf_refinement(m: Nlmp) -> tuple[Partition, dict[tuple[str, str], StateFormula]]:
    """Partition refinement with formula synthesis.

    Invariant: after every round the current partition is exactly the
    indistinguishability relation of the formulas synthesized so far
    (kept, with their extensions, in a family closed under conjunction,
    so that any two measures differing on a set built from the current
    round's closed sets already differ on a recorded extension).
    """
    universe = m.universe
    family: dict[StateSet, StateFormula] = {frozenset(m.states): Top()}
    formulas: dict[tuple[str, str], StateFormula] = {}
    partition: Partition = (frozenset(m.states),)

    def family_add(ext: StateSet, phi: StateFormula) -> None:
        queue = [(ext, phi)]
        while queue:
            e, f = queue.pop()
            if e in family:
                continue
            family[e] = f
            queue.extend((e & e2, And(f, f2)) for e2, f2 in list(family.items()))

    def separator(mu: Measure, nu: Measure) -> tuple[StateSet, StateFormula]:
        for ext in sorted(family, key=lambda e: (len(e), sorted(universe.index(x) for x in e))):
            if mu.value(ext) != nu.value(ext):
                return ext, family[ext]
        raise InternalCheckError("no recorded formula separates two distinct measures")

    def synthesize(s: str, t: str, label: str, mu: Measure) -> StateFormula:
        # mu leaves s under label and is unmatched in t's row.
        opponents = m.row(t, label)
        constraints: list[Constraint] = []
        if not opponents:
            constraints.append(Constraint(">", ZERO, Top()))
        else:
            for nu in opponents:
                ext, phi = separator(mu, nu)
                a_val, b_val = mu.value(ext), nu.value(ext)
                op = ">" if a_val > b_val else "<"
                c = Constraint(op, (a_val + b_val) / 2, phi)
                if c not in constraints:
                    constraints.append(c)
        return DiamondMulti(label, tuple(constraints))

    while True:
        sig_r = sigma_of_relation(m.sigma, Relation.from_partition(universe, partition))
        prof = {mu: profile(mu, sig_r) for mu in m.pool}

        def hit(s: str, a: str) -> frozenset:
            return frozenset(prof[mu] for mu in m.row(s, a))

        new_blocks: list[list[str]] = []
        split_pairs: list[tuple[str, str]] = []
        for block in partition:
            groups: dict[tuple, list[str]] = {}
            for s in universe.sort(block):
                groups.setdefault(tuple(hit(s, a) for a in m.labels), []).append(s)
            subs = list(groups.values())
            new_blocks += subs
            for i, left in enumerate(subs):
                for right in subs[i + 1 :]:
                    split_pairs += [(s, t) for s in left for t in right]
        if not split_pairs:
            break
        for s, t in split_pairs:
            for a in m.labels:
                only_s = hit(s, a) - hit(t, a)
                if only_s:
                    mu = next(x for x in m.row(s, a) if prof[x] in only_s)
                    psi = synthesize(s, t, a, mu)
                    break
                only_t = hit(t, a) - hit(s, a)
                if only_t:
                    nu = next(x for x in m.row(t, a) if prof[x] in only_t)
                    psi = synthesize(t, s, a, nu)
                    break
            else:
                raise InternalCheckError("split without a hit-class mismatch")
            formulas[(s, t)] = psi
            formulas[(t, s)] = psi
            family_add(eval_state(m, psi), psi)
        partition = tuple(
            sorted(
                (frozenset(b) for b in new_blocks),
                key=lambda b: min(universe.index(x) for x in b),
            )
        )
    return partition, formulas
