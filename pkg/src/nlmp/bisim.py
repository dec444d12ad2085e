"""Bisimulation checkers and greatest-fixpoint computers.

Three notions are implemented, each with an independent code path:

* traditional: related states match transition measures one against one,
  modulo agreement on all r-closed measurable sets;
* state: related states hit exactly the same measurable sets of
  measures built from r-closed sets (realized as unions of profile
  classes of the pool);
* event: a sub-sigma-algebra on which the model is still a model, i.e.
  all hit preimages of its measure sets stay inside it.

The fixpoint computers start from the total relation (resp. the trivial
sigma-algebra) and iterate a monotone operator; the inclusion order on
relations transfers inversely to the induced sigma-algebras, which makes
each step shrink (resp. grow) toward the greatest bisimilarity
(smallest stable sigma-algebra).  Determinism everywhere comes from
canonical state, label, and atom ordering.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .errors import InternalCheckError, PreconditionError
from .measurable import (
    Relation,
    SigmaAlgebra,
    StateSet,
    relation_of_sigma,
    sigma_generate,
    sigma_is_sub,
    sigma_of_relation,
)
from .measures import Measure, Profile, profile, trace_classes
from .model import Nlmp, diamond, hit_preimage, is_non_probabilistic, nlmp_validate

Partition = tuple[StateSet, ...]


@dataclass(frozen=True)
class TraditionalWitness:
    """A measure of one related state with no counterpart on the other side."""

    s: str
    t: str
    label: str
    measure: Measure


@dataclass(frozen=True)
class StateWitness:
    """A set of pool measures hit by one related state but not the other."""

    s: str
    t: str
    label: str
    xi: tuple[Measure, ...]


@dataclass(frozen=True)
class EventWitness:
    """A measure set whose hit preimage escapes the candidate sigma-algebra."""

    label: str
    xi: tuple[Measure, ...]
    preimage: StateSet


@dataclass(frozen=True)
class DiamondWitness:
    """A measurable target set reachable from one related state only."""

    s: str
    t: str
    label: str
    q: StateSet


@dataclass(frozen=True)
class CheckResult:
    holds: bool
    witness: object | None = None

    def __bool__(self) -> bool:
        return self.holds


@dataclass(frozen=True)
class BisimReport:
    kind: str  # "traditional" | "state" | "event"
    relation: Relation
    partition: Partition
    trace: tuple[Partition, ...]
    sigma: SigmaAlgebra | None = None


@dataclass(frozen=True)
class ComparisonReport:
    traditional: BisimReport
    state: BisimReport
    event: BisimReport
    chain_holds: bool
    traditional_eq_state: bool
    state_eq_event: bool
    all_equal: bool
    sigma_is_powerset: bool


def _require_symmetric(r: Relation) -> None:
    if not r.is_symmetric:
        raise PreconditionError("bisimulation candidates must be symmetric")


def _require_valid(m: Nlmp) -> None:
    if not nlmp_validate(m).valid:
        raise PreconditionError("model fails measurability validation")


def _ordered_pairs(r: Relation) -> list[tuple[str, str]]:
    idx = r.universe.index
    return sorted(r.pairs, key=lambda p: (idx(p[0]), idx(p[1])))


def _profiles(measures: Iterable[Measure], lam: SigmaAlgebra) -> dict[Measure, Profile]:
    return {mu: profile(mu, lam) for mu in measures}


def is_traditional_bisim(m: Nlmp, r: Relation) -> CheckResult:
    """One-against-one matching of transition measures.

    For every related (s, t) and label, every measure leaving s must
    agree with some measure leaving t on all r-closed measurable sets,
    and symmetrically (covered because r itself is symmetric).
    """
    _require_symmetric(r)
    sig_r = sigma_of_relation(m.sigma, r)
    prof = _profiles(m.pool, sig_r)
    for s, t in _ordered_pairs(r):
        for a in m.labels:
            targets = {prof[nu] for nu in m.row(t, a)}
            for mu in m.row(s, a):
                if prof[mu] not in targets:
                    return CheckResult(False, TraditionalWitness(s, t, a, mu))
    return CheckResult(True)


def is_state_bisim(m: Nlmp, r: Relation, method: str = "profile") -> CheckResult:
    """Hit-set comparison of related states.

    method="profile" compares, per label, the sets of pool profile
    classes (over the r-closed sub-sigma-algebra) that each state's
    transition set intersects.  method="direct" literally quantifies
    over every union of those classes and compares hit-preimage
    membership; it is exponential in the number of classes and exists to
    cross-check the profile route.
    """
    _require_symmetric(r)
    sig_r = sigma_of_relation(m.sigma, r)
    classes = trace_classes(m.pool, sig_r)
    class_sets = [frozenset(c) for c in classes]

    def hit_indices(s: str, a: str) -> frozenset[int]:
        row = set(m.row(s, a))
        return frozenset(i for i, c in enumerate(class_sets) if row & c)

    if method == "profile":
        for s, t in _ordered_pairs(r):
            for a in m.labels:
                hs, ht = hit_indices(s, a), hit_indices(t, a)
                if hs != ht:
                    i = min(hs ^ ht)
                    return CheckResult(False, StateWitness(s, t, a, classes[i]))
        return CheckResult(True)
    if method == "direct":
        n = len(classes)
        for mask in range(2 ** n):
            xi = tuple(mu for i in range(n) if mask >> i & 1 for mu in classes[i])
            for a in m.labels:
                pre = hit_preimage(m, a, xi)
                for s, t in _ordered_pairs(r):
                    if (s in pre) != (t in pre):
                        return CheckResult(False, StateWitness(s, t, a, xi))
        return CheckResult(True)
    raise ValueError(f"unknown method {method!r}")


def is_event_bisim(m: Nlmp, lam: SigmaAlgebra, method: str = "classes") -> CheckResult:
    """Stability of a sub-sigma-algebra under hit preimages.

    Quantification over all unions of the pool's lam-profile classes
    reduces to the single classes: the preimage of a union is the union
    of the preimages, and lam is closed under union.  method="direct"
    keeps the literal union enumeration for cross-checks.
    """
    if not sigma_is_sub(lam, m.sigma):
        raise PreconditionError("candidate must be a sub-sigma-algebra of the model's")
    classes = trace_classes(m.pool, lam)
    if method == "classes":
        for a in m.labels:
            for cls in classes:
                pre = hit_preimage(m, a, cls)
                if not lam.is_measurable(pre):
                    return CheckResult(False, EventWitness(a, cls, pre))
        return CheckResult(True)
    if method == "direct":
        n = len(classes)
        for a in m.labels:
            for mask in range(2 ** n):
                xi = tuple(mu for i in range(n) if mask >> i & 1 for mu in classes[i])
                pre = hit_preimage(m, a, xi)
                if not lam.is_measurable(pre):
                    return CheckResult(False, EventWitness(a, xi, pre))
        return CheckResult(True)
    raise ValueError(f"unknown method {method!r}")


def _partition_of(blocks: Iterable[Iterable[str]], m: Nlmp) -> Partition:
    idx = m.universe.index
    return tuple(sorted((frozenset(b) for b in blocks), key=lambda b: min(idx(s) for s in b)))


def largest_traditional(m: Nlmp) -> BisimReport:
    """Greatest fixpoint of the one-against-one matching operator.

    Starts from the total relation; each round recomputes the r-closed
    sub-sigma-algebra and keeps a pair only if both rows still match
    measure against measure.  Monotonicity of the lifting (a smaller
    relation closes more sets, hence relates fewer measures) makes the
    limit the largest relation accepted by is_traditional_bisim.
    """
    _require_valid(m)
    partition: Partition = (frozenset(m.states),)
    trace = [partition]
    while True:
        sig_r = sigma_of_relation(m.sigma, Relation.from_partition(m.universe, partition))
        prof = _profiles(m.pool, sig_r)

        def covers(row_a: tuple[Measure, ...], row_b: tuple[Measure, ...]) -> bool:
            return all(any(prof[mu] == prof[nu] for nu in row_b) for mu in row_a)

        def rows_match(s: str, t: str) -> bool:
            for a in m.labels:
                rs, rt = m.row(s, a), m.row(t, a)
                if not (covers(rs, rt) and covers(rt, rs)):
                    return False
            return True

        new_blocks: list[list[str]] = []
        for block in partition:
            subs: list[list[str]] = []
            for s in m.universe.sort(block):
                for sub in subs:
                    if rows_match(s, sub[0]):
                        sub.append(s)
                        break
                else:
                    subs.append([s])
            new_blocks += subs
        new_partition = _partition_of(new_blocks, m)
        if new_partition == partition:
            break
        partition = new_partition
        trace.append(partition)
    return BisimReport(
        "traditional",
        Relation.from_partition(m.universe, partition),
        partition,
        tuple(trace),
    )


def largest_state(m: Nlmp) -> BisimReport:
    """Greatest fixpoint of the hit-class operator: states stay together
    while, for every label, their transition sets intersect exactly the
    same profile classes over the current r-closed sub-sigma-algebra."""
    _require_valid(m)
    partition: Partition = (frozenset(m.states),)
    trace = [partition]
    while True:
        sig_r = sigma_of_relation(m.sigma, Relation.from_partition(m.universe, partition))
        classes = trace_classes(m.pool, sig_r)
        class_sets = [frozenset(c) for c in classes]

        def signature(s: str) -> tuple:
            return tuple(
                frozenset(i for i, c in enumerate(class_sets) if set(m.row(s, a)) & c)
                for a in m.labels
            )

        new_blocks: list[list[str]] = []
        for block in partition:
            groups: dict[tuple, list[str]] = {}
            for s in m.universe.sort(block):
                groups.setdefault(signature(s), []).append(s)
            new_blocks += list(groups.values())
        new_partition = _partition_of(new_blocks, m)
        if new_partition == partition:
            break
        partition = new_partition
        trace.append(partition)
    return BisimReport(
        "state",
        Relation.from_partition(m.universe, partition),
        partition,
        tuple(trace),
    )


def smallest_stable_sigma(m: Nlmp) -> BisimReport:
    """Least fixpoint, from the trivial sigma-algebra, of adding every
    hit preimage of a measure set of the current stage.

    The limit is the smallest sub-sigma-algebra on which the model is
    still a model; its inseparability relation is event bisimilarity.
    """
    _require_valid(m)
    lam = SigmaAlgebra.trivial(m.universe)
    trace = [lam.atoms]
    while True:
        gens: list[StateSet] = list(lam.atoms)
        for a in m.labels:
            for cls in trace_classes(m.pool, lam):
                gens.append(hit_preimage(m, a, cls))
        new_lam = sigma_generate(m.universe, gens)
        if new_lam == lam:
            break
        lam = new_lam
        trace.append(lam.atoms)
    if not sigma_is_sub(lam, m.sigma):
        raise InternalCheckError("stable sigma-algebra escaped the model's sigma-algebra")
    return BisimReport(
        "event",
        relation_of_sigma(lam),
        lam.atoms,
        tuple(trace),
        sigma=lam,
    )


def compare_bisims(m: Nlmp) -> ComparisonReport:
    """Compute all three bisimilarities and check the inclusion chain
    traditional <= state <= event.

    The chain must hold on every valid model and the three relations
    must coincide on full powerset models; a violation of either is an
    implementation bug and raises InternalCheckError.  On coarse
    sigma-algebras, equality of state and event bisimilarity is reported
    but never asserted.
    """
    rt = largest_traditional(m)
    rs = largest_state(m)
    re = smallest_stable_sigma(m)
    chain = rt.relation <= rs.relation and rs.relation <= re.relation
    if not chain:
        raise InternalCheckError("bisimilarity inclusion chain violated")
    t_eq_s = rt.relation.pairs == rs.relation.pairs
    s_eq_e = rs.relation.pairs == re.relation.pairs
    powerset = m.sigma.is_powerset
    if powerset and not (t_eq_s and s_eq_e):
        raise InternalCheckError("bisimilarities differ on a full powerset model")
    return ComparisonReport(
        traditional=rt,
        state=rs,
        event=re,
        chain_holds=chain,
        traditional_eq_state=t_eq_s,
        state_eq_event=s_eq_e,
        all_equal=t_eq_s and s_eq_e,
        sigma_is_powerset=powerset,
    )


def np_traditional_check(m: Nlmp, r: Relation) -> CheckResult:
    """Point-mass specialization of the traditional check: a target u of
    s must be matched by a target v of t that no r-closed measurable set
    separates from u."""
    if not is_non_probabilistic(m):
        raise PreconditionError("np_traditional_check needs a non-probabilistic model")
    _require_symmetric(r)
    sig_r = sigma_of_relation(m.sigma, r)

    def block_of(mu: Measure) -> StateSet:
        return sig_r.atom_of(next(iter(mu.dirac_atom)))

    for s, t in _ordered_pairs(r):
        for a in m.labels:
            target_blocks = {block_of(nu) for nu in m.row(t, a)}
            for mu in m.row(s, a):
                if block_of(mu) not in target_blocks:
                    return CheckResult(False, TraditionalWitness(s, t, a, mu))
    return CheckResult(True)


def np_state_check(m: Nlmp, r: Relation) -> CheckResult:
    """Reachability specialization of the state check: related states
    must reach exactly the same r-closed measurable sets."""
    if not is_non_probabilistic(m):
        raise PreconditionError("np_state_check needs a non-probabilistic model")
    _require_symmetric(r)
    sig_r = sigma_of_relation(m.sigma, r)
    pairs = _ordered_pairs(r)
    for q in sorted(sig_r.measurable_sets(), key=lambda q: (len(q), sorted(q))):
        for a in m.labels:
            reach = diamond(m, a, q)
            for s, t in pairs:
                if (s in reach) != (t in reach):
                    return CheckResult(False, DiamondWitness(s, t, a, q))
    return CheckResult(True)
