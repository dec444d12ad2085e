"""Shared generators, fixed models, and brute-force oracles for the
test suite.  The oracles deliberately avoid the code paths they check:
closures are computed set by set, bisimilarity on deterministic models
by its own fixpoint, and families of measure sets by literal closure of
their generator traces."""

from __future__ import annotations

import random
from fractions import Fraction

from nlmp import (
    And,
    AtLeast,
    AtMost,
    Constraint,
    Diamond,
    DiamondMulti,
    GreaterThan,
    LessThan,
    Lmp,
    MNot,
    MOr,
    Measure,
    Nlmp,
    Relation,
    SigmaAlgebra,
    Top,
    Universe,
    dirac,
    is_r_closed,
)

F = Fraction


# ---------------------------------------------------------------------------
# Fixed models


def two_bounds_model() -> Nlmp:
    """Five states; s carries one more a-measure than t, lying weakly
    between the two shared ones on every target set, so only a
    two-bound modality separates s from t."""
    u = Universe(("s", "t", "x", "y", "z"))
    sig = SigmaAlgebra.powerset(u)
    mu1 = dirac(sig, "x")
    mu2 = Measure.from_state_weights(sig, {"y": F(1, 2), "z": F(1, 2)})
    mu3 = Measure.from_state_weights(sig, {"x": F(1, 2), "y": F(1, 4), "z": F(1, 4)})
    return Nlmp(
        sig,
        ("a", "b", "c", "d"),
        {
            ("s", "a"): (mu1, mu2, mu3),
            ("t", "a"): (mu1, mu2),
            ("x", "b"): (dirac(sig, "x"),),
            ("y", "c"): (dirac(sig, "y"),),
            ("z", "d"): (dirac(sig, "z"),),
        },
    )


def two_bounds_measures(m: Nlmp) -> tuple[Measure, Measure, Measure]:
    sig = m.sigma
    mu1 = dirac(sig, "x")
    mu2 = Measure.from_state_weights(sig, {"y": F(1, 2), "z": F(1, 2)})
    mu3 = Measure.from_state_weights(sig, {"x": F(1, 2), "y": F(1, 4), "z": F(1, 4)})
    return mu1, mu2, mu3


def np_reach_model(equal_continuations: bool) -> Nlmp:
    u = Universe(("s", "t", "u", "v"))
    sig = SigmaAlgebra.powerset(u)
    rows = {
        ("s", "a"): (dirac(sig, "u"),),
        ("t", "a"): (dirac(sig, "v"),),
        ("u", "b"): (dirac(sig, "u"),),
    }
    if equal_continuations:
        rows[("v", "b")] = (dirac(sig, "v"),)
    return Nlmp(sig, ("a", "b"), rows)


def uniform_rows_model() -> Nlmp:
    u = Universe(("p", "q", "r"))
    sig = SigmaAlgebra.powerset(u)
    mix = Measure.from_state_weights(sig, {"p": F(1, 3), "q": F(1, 3), "r": F(1, 3)})
    return Nlmp(sig, ("a",), {(s, "a"): (mix,) for s in u})


def atom_split_model(repaired: bool) -> Nlmp:
    u = Universe(("s", "t", "x"))
    if repaired:
        sig = SigmaAlgebra.powerset(u)
    else:
        sig = SigmaAlgebra(u, (frozenset({"s", "t"}), frozenset({"x"})))
    return Nlmp(sig, ("a",), {("s", "a"): (dirac(sig, "x"),)})


def coarse_valid_model() -> Nlmp:
    u = Universe(("s", "t", "x"))
    sig = SigmaAlgebra(u, (frozenset({"s", "t"}), frozenset({"x"})))
    return Nlmp(sig, ("a",), {("s", "a"): (dirac(sig, "x"),), ("t", "a"): (dirac(sig, "x"),)})


# ---------------------------------------------------------------------------
# Random generators (all seeded by the caller)


def rand_universe(rng: random.Random, max_states: int = 5) -> Universe:
    n = rng.randint(1, max_states)
    return Universe(tuple(f"s{i}" for i in range(n)))


def rand_partition(rng: random.Random, items: list) -> list[set]:
    """A uniform-ish random partition: each item joins an existing block
    or starts a new one."""
    blocks: list[set] = []
    for item in items:
        i = rng.randint(0, len(blocks))
        if i == len(blocks):
            blocks.append({item})
        else:
            blocks[i].add(item)
    return blocks


def rand_sigma(rng: random.Random, universe: Universe, coarse: bool) -> SigmaAlgebra:
    if not coarse:
        return SigmaAlgebra.powerset(universe)
    blocks = rand_partition(rng, list(universe))
    return SigmaAlgebra(universe, tuple(frozenset(b) for b in blocks))


def rand_measure(rng: random.Random, sigma: SigmaAlgebra, max_weight: int = 4) -> Measure:
    n = len(sigma.atoms)
    support = rng.sample(range(n), rng.randint(1, n))
    raw = [rng.randint(1, max_weight) for _ in support]
    total = sum(raw)
    weights = [F(0)] * n
    for i, w in zip(support, raw):
        weights[i] = F(w, total)
    return Measure(sigma, tuple(weights))


def rand_valid_nlmp(
    rng: random.Random,
    max_states: int = 5,
    max_labels: int = 3,
    max_row: int = 3,
    coarse: bool = False,
    dirac_only: bool = False,
) -> Nlmp:
    """A model passing measurability validation by construction: rows
    are assigned per atom, so every hit preimage is a union of atoms."""
    universe = rand_universe(rng, max_states)
    sigma = rand_sigma(rng, universe, coarse)
    labels = tuple(chr(ord("a") + i) for i in range(rng.randint(1, max_labels)))
    rows: dict[tuple[str, str], tuple[Measure, ...]] = {}
    for atom in sigma.atoms:
        for a in labels:
            k = rng.randint(0, max_row)
            if dirac_only:
                row = tuple(dirac(sigma, rng.choice(universe.states)) for _ in range(k))
            else:
                row = tuple(rand_measure(rng, sigma) for _ in range(k))
            for s in atom:
                rows[(s, a)] = row
    return Nlmp(sigma, labels, rows)


def rand_any_nlmp(
    rng: random.Random,
    max_states: int = 5,
    max_labels: int = 3,
    max_row: int = 3,
) -> Nlmp:
    """Rows assigned per state over a possibly coarse sigma-algebra, so
    validation may fail."""
    universe = rand_universe(rng, max_states)
    sigma = rand_sigma(rng, universe, coarse=rng.random() < 0.5)
    labels = tuple(chr(ord("a") + i) for i in range(rng.randint(1, max_labels)))
    rows = {}
    for s in universe:
        for a in labels:
            k = rng.randint(0, max_row)
            rows[(s, a)] = tuple(rand_measure(rng, sigma) for _ in range(k))
    return Nlmp(sigma, labels, rows)


def rand_lmp(rng: random.Random, max_states: int = 4, coarse: bool = False, per_state: bool = False) -> Lmp:
    universe = rand_universe(rng, max_states)
    sigma = rand_sigma(rng, universe, coarse)
    labels = tuple(chr(ord("a") + i) for i in range(rng.randint(1, 2)))
    kernels: dict[tuple[str, str], Measure] = {}
    if per_state:
        for s in universe:
            for a in labels:
                kernels[(s, a)] = rand_measure(rng, sigma)
    else:
        for atom in sigma.atoms:
            for a in labels:
                mu = rand_measure(rng, sigma)
                for s in atom:
                    kernels[(s, a)] = mu
    return Lmp(sigma, labels, kernels)


def rand_symmetric_relation(rng: random.Random, universe: Universe, density: float = 0.3) -> Relation:
    pairs = set()
    states = list(universe)
    for s in states:
        for t in states:
            if rng.random() < density:
                pairs.add((s, t))
                pairs.add((t, s))
    return Relation(universe, frozenset(pairs))


def rand_state_formula(rng: random.Random, labels: tuple[str, ...], depth: int):
    choices = ["top"]
    if depth > 0 and labels:
        choices += ["and", "diamond", "multi", "multi"]
    kind = rng.choice(choices)
    if kind == "top":
        return Top()
    if kind == "and":
        return And(
            rand_state_formula(rng, labels, depth - 1),
            rand_state_formula(rng, labels, depth - 1),
        )
    if kind == "diamond":
        return Diamond(rng.choice(labels), rand_measure_formula(rng, labels, depth - 1))
    constraints = tuple(
        Constraint(rng.choice("><"), rand_threshold(rng), rand_state_formula(rng, labels, depth - 1))
        for _ in range(rng.randint(1, 2))
    )
    return DiamondMulti(rng.choice(labels), constraints)


def rand_measure_formula(rng: random.Random, labels: tuple[str, ...], depth: int):
    kind = rng.choice(["atleast", "greater", "less", "atmost", "or", "not"] if depth > 0 else ["atleast"])
    if kind == "or":
        return MOr(
            tuple(rand_measure_formula(rng, labels, depth - 1) for _ in range(rng.randint(2, 3)))
        )
    if kind == "not":
        return MNot(rand_measure_formula(rng, labels, depth - 1))
    phi = rand_state_formula(rng, labels, depth - 1) if depth > 0 else Top()
    q = rand_threshold(rng)
    return {"atleast": AtLeast, "greater": GreaterThan, "less": LessThan, "atmost": AtMost}[kind](phi, q)


def rand_threshold(rng: random.Random) -> Fraction:
    den = rng.randint(1, 4)
    return F(rng.randint(0, den), den)


# ---------------------------------------------------------------------------
# Brute-force oracles


def closure_family(universe: Universe, generators) -> frozenset[frozenset[str]]:
    """Literal closure of the generators under complement and pairwise
    union (enough on a finite universe)."""
    full = frozenset(universe.states)
    family = {frozenset(), full} | {frozenset(g) for g in generators}
    while True:
        new = set(family)
        for q in family:
            new.add(full - q)
        for q1 in family:
            for q2 in family:
                new.add(q1 | q2)
        if new == family:
            return frozenset(family)
        family = new


def family_atoms(family, universe: Universe) -> frozenset[frozenset[str]]:
    """Minimal non-empty members: intersect every member containing each
    state (the family must be closed, so intersections stay inside)."""
    atoms = set()
    for s in universe:
        atom = frozenset(universe.states)
        for q in family:
            if s in q:
                atom &= q
        atoms.add(atom)
    return frozenset(atoms)


def measurable_family(sigma: SigmaAlgebra) -> frozenset[frozenset[str]]:
    return frozenset(sigma.measurable_sets())


def rclosed_family(sigma: SigmaAlgebra, r: Relation) -> frozenset[frozenset[str]]:
    return frozenset(q for q in sigma.measurable_sets() if is_r_closed(r, q))


def all_set_partitions(items):
    """Every partition of a finite collection (Bell-number many)."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in all_set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [part[i] | {first}] + part[i + 1 :]
        yield [{first}] + part


def all_equivalences(universe: Universe):
    for part in all_set_partitions(universe.states):
        yield Relation.from_partition(universe, part)


def subalgebras(sigma: SigmaAlgebra) -> list[SigmaAlgebra]:
    """All sub-sigma-algebras, i.e. all coarsenings of the atom partition."""
    out = []
    for part in all_set_partitions(range(len(sigma.atoms))):
        atoms = tuple(
            frozenset().union(*(sigma.atoms[i] for i in block)) for block in part
        )
        out.append(SigmaAlgebra(sigma.universe, atoms))
    return out


def lmp_bisimilarity(l: Lmp) -> Relation:
    """Deterministic-model bisimilarity by its own greatest fixpoint:
    keep a pair while the kernels agree on every measurable set closed
    under the current relation.  Shares nothing with the production
    fixpoints."""
    pairs = {(s, t) for s in l.states for t in l.states}
    while True:
        closed = [
            q
            for q in l.sigma.measurable_sets()
            if all((s in q) == (t in q) for s, t in pairs)
        ]
        new = {
            (s, t)
            for s, t in pairs
            if all(
                l.kernel(s, a).value(q) == l.kernel(t, a).value(q)
                for a in l.labels
                for q in closed
            )
        }
        if new == pairs:
            return Relation(l.universe, frozenset(pairs))
        pairs = new


def delta_trace_family(pool, lam: SigmaAlgebra) -> frozenset[frozenset[Measure]]:
    """Traces on the pool of the measure sets generated by lam: closure
    under union, intersection, and complement (within the pool) of the
    inclusive threshold sets over lam-measurable targets, with
    thresholds ranging over the values pool measures actually take."""
    pool = frozenset(pool)
    gens = {pool, frozenset()}
    for q in lam.measurable_sets():
        values = {mu.value(q) for mu in pool}
        for v in values:
            gens.add(frozenset(mu for mu in pool if mu.value(q) >= v))
    family = set(gens)
    while True:
        new = set(family)
        for x in family:
            new.add(pool - x)
            for y in family:
                new.add(x | y)
                new.add(x & y)
        if new == family:
            return frozenset(family)
        family = new


def relevant_thresholds(pool, ext) -> list[Fraction]:
    """Values the pool measures take on ext, their consecutive
    midpoints, and the endpoints 0 and 1."""
    values = sorted({mu.value(ext) for mu in pool} | {F(0), F(1)})
    mids = [(a + b) / 2 for a, b in zip(values, values[1:])]
    return sorted(set(values) | set(mids))


def sublogic_extensions(m: Nlmp, depth: int) -> set[frozenset[str]]:
    """Extensions of every finitary-sublogic formula of modal depth at
    most `depth`, computed semantically.

    A modality's extension only depends on which pool measures satisfy
    all its bounds, and those measure sets are exactly the intersections
    of the single-bound measure sets, so closing the latter under
    intersection enumerates every reachable extension without touching
    the (unbounded) syntax.
    """
    exts: set[frozenset[str]] = {frozenset(m.states)}
    for _ in range(depth):
        new = set(exts)
        for a in m.labels:
            base: set[frozenset] = set()
            for ext in exts:
                for q in relevant_thresholds(m.pool, ext):
                    base.add(frozenset(mu for mu in m.pool if mu.value(ext) > q))
                    base.add(frozenset(mu for mu in m.pool if mu.value(ext) < q))
            filters = {frozenset(m.pool)} | base
            while True:
                more = set(filters)
                for f1 in filters:
                    for f2 in base:
                        more.add(f1 & f2)
                if more == filters:
                    break
                filters = more
            for f in filters:
                new.add(frozenset(s for s in m.states if set(m.row(s, a)) & f))
        while True:
            more = set(new)
            for e1 in new:
                for e2 in new:
                    more.add(e1 & e2)
            if more == new:
                break
            new = more
        exts = new
    return exts


def single_bound_separates(m: Nlmp, s: str, t: str, depth: int = 2) -> bool:
    """Exhaustive search over modalities with one probability bound,
    the bound's state formula ranging over all depth-limited sublogic
    extensions and the threshold over the pool-relevant rationals."""
    for ext in sublogic_extensions(m, depth):
        for a in m.labels:
            for q in relevant_thresholds(m.pool, ext):
                for op in (">", "<"):
                    sat = frozenset(
                        w
                        for w in m.states
                        if any(
                            (mu.value(ext) > q if op == ">" else mu.value(ext) < q)
                            for mu in m.row(w, a)
                        )
                    )
                    if (s in sat) != (t in sat):
                        return True
    return False


def row_constant_on_atoms(m: Nlmp) -> bool:
    """Independent characterization of measurability on finite models:
    transition rows must be constant within sigma-algebra atoms."""
    for atom in m.sigma.atoms:
        states = sorted(atom)
        for a in m.labels:
            rows = {frozenset(m.row(s, a)) for s in states}
            if len(rows) > 1:
                return False
    return True


def relation_pairs_subset(r1: Relation, r2: Relation) -> bool:
    return r1.pairs <= r2.pairs
