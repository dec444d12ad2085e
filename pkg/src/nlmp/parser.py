"""Text formats: the model language and the formula language.

Model files (.nlmp), line oriented, `#` comments:

    nlmp                        optional header (default); `lmp` switches to
                                exactly one measure per state and label
    states s t x                state identifiers, in display order
    labels a b                  transition labels
    sigma powerset              default when omitted
    sigma gen {s t} {x}         sigma-algebra generated by the given sets
    trans s a x:1/2 y:1/2       one measure (weights on states) added to the
                                transition set of state s under label a
    trans s a -> x              point-mass shorthand

Weights are exact rationals and must sum to 1; weights placed on states
of one atom accumulate into that atom, since a measure on a coarse
sigma-algebra cannot see finer detail.

Formulas, whitespace insensitive, `&` left associative, parentheses
allowed:

    state level    T | phi & phi | <a> psi | <a>[ >1/4 phi , <3/4 phi ]
    measure level  psi \\/ psi | !psi | [phi]>=q | [phi]>q | [phi]<q | [phi]<=q

with rational thresholds written p/q, 0 or 1.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError, ModelSyntaxError
from .logic import (
    And,
    AtLeast,
    AtMost,
    Constraint,
    Diamond,
    DiamondMulti,
    GreaterThan,
    LessThan,
    MNot,
    MOr,
    MeasureFormula,
    StateFormula,
    Top,
)
from .measurable import SigmaAlgebra, Universe, sigma_generate
from .measures import Measure, dirac
from .model import Lmp, Nlmp, lmp_embed


@dataclass
class ModelDocument:
    kind: str  # "nlmp" | "lmp"
    nlmp: Nlmp
    lmp: Lmp | None
    source: str

    @property
    def digest(self) -> str:
        return hashlib.sha256(serialize_model(self).encode("utf-8")).hexdigest()


# ---------------------------------------------------------------------------
# Model parsing

_LINE_TOKEN = re.compile(r"\{|\}|[^\s{}]+")


def _parse_rational(text: str, line_no: int) -> Fraction:
    m = re.fullmatch(r"(\d+)(?:/(\d+))?", text)
    if not m:
        raise ModelSyntaxError(f"expected a rational number, got {text!r}", line_no)
    num, den = int(m.group(1)), int(m.group(2) or 1)
    if den == 0:
        raise ModelSyntaxError("zero denominator", line_no)
    return Fraction(num, den)


def parse_model(text: str, source: str = "<string>") -> ModelDocument:
    kind = "nlmp"
    states: list[str] | None = None
    labels: list[str] | None = None
    sigma_spec: list[list[str]] | str | None = None
    trans_lines: list[tuple[int, list[str]]] = []

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        tokens = _LINE_TOKEN.findall(line)
        if not tokens:
            continue
        head, rest = tokens[0], tokens[1:]
        if head in ("nlmp", "lmp"):
            if rest:
                raise ModelSyntaxError(f"unexpected tokens after {head!r} header", line_no)
            if states is not None or trans_lines:
                raise ModelSyntaxError("header must come first", line_no)
            kind = head
        elif head == "states":
            if states is not None:
                raise ModelSyntaxError("duplicate states line", line_no)
            if not rest:
                raise ModelSyntaxError("states line needs at least one state", line_no)
            states = rest
        elif head == "labels":
            if labels is not None:
                raise ModelSyntaxError("duplicate labels line", line_no)
            labels = rest
        elif head == "sigma":
            if states is None:
                raise ModelSyntaxError("sigma line must come after the states line", line_no)
            if sigma_spec is not None:
                raise ModelSyntaxError("duplicate sigma line", line_no)
            if rest == ["powerset"]:
                sigma_spec = "powerset"
            elif rest and rest[0] == "gen":
                sigma_spec = _parse_generators(rest[1:], line_no)
            else:
                raise ModelSyntaxError("expected 'sigma powerset' or 'sigma gen {..} ..'", line_no)
        elif head == "trans":
            trans_lines.append((line_no, rest))
        else:
            raise ModelSyntaxError(f"unknown directive {head!r}", line_no)

    if states is None:
        raise ModelSyntaxError("missing states line", len(text.splitlines()) or 1)
    if labels is None:
        raise ModelSyntaxError("missing labels line", len(text.splitlines()) or 1)
    try:
        universe = Universe(tuple(states))
        if sigma_spec is None or sigma_spec == "powerset":
            sigma = SigmaAlgebra.powerset(universe)
        else:
            sigma = sigma_generate(universe, [frozenset(g) for g in sigma_spec])
    except DomainError as exc:
        raise ModelSyntaxError(str(exc)) from exc

    rows: dict[tuple[str, str], list[Measure]] = {}
    for line_no, rest in trans_lines:
        s, a, mu = _parse_trans(rest, universe, sigma, set(labels), line_no)
        rows.setdefault((s, a), []).append(mu)

    try:
        if kind == "lmp":
            kernels: dict[tuple[str, str], Measure] = {}
            for (s, a), measures in rows.items():
                if len(measures) > 1:
                    raise ModelSyntaxError(
                        f"deterministic model has several transitions for ({s}, {a})"
                    )
                kernels[(s, a)] = measures[0]
            for s in universe:
                for a in labels:
                    if (s, a) not in kernels:
                        raise ModelSyntaxError(
                            f"deterministic model is missing the transition for ({s}, {a})"
                        )
            lmp = Lmp(sigma, labels, kernels)
            return ModelDocument("lmp", lmp_embed(lmp, validate=False), lmp, source)
        nlmp = Nlmp(sigma, labels, {k: tuple(v) for k, v in rows.items()})
        return ModelDocument("nlmp", nlmp, None, source)
    except DomainError as exc:
        raise ModelSyntaxError(str(exc)) from exc


def _parse_generators(tokens: list[str], line_no: int) -> list[list[str]]:
    gens: list[list[str]] = []
    current: list[str] | None = None
    for tok in tokens:
        if tok == "{":
            if current is not None:
                raise ModelSyntaxError("nested '{' in sigma generators", line_no)
            current = []
        elif tok == "}":
            if current is None:
                raise ModelSyntaxError("unmatched '}' in sigma generators", line_no)
            gens.append(current)
            current = None
        else:
            if current is None:
                raise ModelSyntaxError("generator states must be inside {..}", line_no)
            current.append(tok)
    if current is not None:
        raise ModelSyntaxError("unclosed '{' in sigma generators", line_no)
    return gens


def _parse_trans(
    tokens: list[str],
    universe: Universe,
    sigma: SigmaAlgebra,
    labels: set[str],
    line_no: int,
) -> tuple[str, str, Measure]:
    if len(tokens) < 3:
        raise ModelSyntaxError("trans line needs a state, a label and a target measure", line_no)
    s, a = tokens[0], tokens[1]
    if s not in universe:
        raise ModelSyntaxError(f"unknown state {s!r}", line_no)
    if a not in labels:
        raise ModelSyntaxError(f"unknown label {a!r}", line_no)
    body = tokens[2:]
    if body[0] == "->":
        if len(body) != 2:
            raise ModelSyntaxError("point-mass shorthand is 'trans s a -> target'", line_no)
        target = body[1]
        if target not in universe:
            raise ModelSyntaxError(f"unknown state {target!r}", line_no)
        return s, a, dirac(sigma, target)
    weights: dict[str, Fraction] = {}
    for item in body:
        if ":" not in item:
            raise ModelSyntaxError(f"expected 'state:weight', got {item!r}", line_no)
        target, _, w = item.partition(":")
        if target not in universe:
            raise ModelSyntaxError(f"unknown state {target!r}", line_no)
        if target in weights:
            raise ModelSyntaxError(f"duplicate weight for state {target!r}", line_no)
        weights[target] = _parse_rational(w, line_no)
    total = sum(weights.values())
    if total != 1:
        raise ModelSyntaxError(f"weights sum to {total}, expected 1", line_no)
    try:
        return s, a, Measure.from_state_weights(sigma, weights)
    except DomainError as exc:
        raise ModelSyntaxError(str(exc), line_no) from exc


# ---------------------------------------------------------------------------
# Model serialization


def _measure_text(mu: Measure) -> str:
    atom = mu.dirac_atom
    if atom is not None:
        return "-> " + min(atom, key=mu.sigma.universe.index)
    parts = []
    for a, w in zip(mu.sigma.atoms, mu.weights):
        if w:
            parts.append(f"{min(a, key=mu.sigma.universe.index)}:{w}")
    return " ".join(parts)


def serialize_model(doc: ModelDocument) -> str:
    model = doc.nlmp
    lines = [doc.kind]
    lines.append("states " + " ".join(model.states))
    lines.append("labels " + " ".join(model.labels))
    if model.sigma.is_powerset:
        lines.append("sigma powerset")
    else:
        blocks = " ".join(
            "{" + " ".join(model.universe.sort(a)) + "}" for a in model.sigma.atoms
        )
        lines.append(f"sigma gen {blocks}")
    if doc.kind == "lmp":
        assert doc.lmp is not None
        for s in model.states:
            for a in model.labels:
                lines.append(f"trans {s} {a} {_measure_text(doc.lmp.kernel(s, a))}")
    else:
        for (s, a), row in model.transition_items():
            for mu in row:
                lines.append(f"trans {s} {a} {_measure_text(mu)}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Formula parsing

_FORMULA_TOKEN = re.compile(
    r"\s*(?:(?P<or>\\/)|(?P<cmp>>=|<=)|(?P<sym>[&!,\[\]()<>/])|(?P<int>\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*))"
)


def _tokenize_formula(text: str) -> list[tuple[str, str, int]]:
    tokens: list[tuple[str, str, int]] = []
    pos = 0
    while pos < len(text):
        m = _FORMULA_TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip():
                raise ModelSyntaxError(f"unexpected character {text[pos]!r}", None, pos + 1)
            break
        pos = m.end()
        if m.group("or"):
            tokens.append(("or", "\\/", m.start("or") + 1))
        elif m.group("cmp"):
            tokens.append(("cmp", m.group("cmp"), m.start("cmp") + 1))
        elif m.group("sym"):
            tokens.append(("sym", m.group("sym"), m.start("sym") + 1))
        elif m.group("int"):
            tokens.append(("int", m.group("int"), m.start("int") + 1))
        else:
            tokens.append(("ident", m.group("ident"), m.start("ident") + 1))
    return tokens


class _FormulaParser:
    def __init__(self, text: str):
        self.tokens = _tokenize_formula(text)
        self.pos = 0

    def peek(self, ahead: int = 0) -> tuple[str, str, int] | None:
        i = self.pos + ahead
        return self.tokens[i] if i < len(self.tokens) else None

    def take(self) -> tuple[str, str, int]:
        tok = self.peek()
        if tok is None:
            raise ModelSyntaxError("unexpected end of formula")
        self.pos += 1
        return tok

    def expect(self, value: str) -> None:
        tok = self.take()
        if tok[1] != value:
            raise ModelSyntaxError(f"expected {value!r}, got {tok[1]!r}", None, tok[2])

    def done(self) -> bool:
        return self.pos >= len(self.tokens)

    # state level ----------------------------------------------------------

    def state_formula(self) -> StateFormula:
        phi = self.state_atom()
        while not self.done() and self.peek()[1] == "&":
            self.take()
            phi = And(phi, self.state_atom())
        return phi

    def state_atom(self) -> StateFormula:
        tok = self.take()
        if tok[1] == "T":
            return Top()
        if tok[1] == "(":
            phi = self.state_formula()
            self.expect(")")
            return phi
        if tok[1] == "<":
            label_tok = self.take()
            if label_tok[0] not in ("ident", "int"):
                raise ModelSyntaxError("expected a label name", None, label_tok[2])
            self.expect(">")
            nxt = self.peek()
            if nxt is not None and nxt[1] == "[":
                after = self.peek(1)
                if after is not None and after[1] in (">", "<"):
                    # Could still be a measure bracket whose state formula
                    # starts with a diamond; try the multi form first.
                    saved = self.pos
                    try:
                        return self.diamond_multi(label_tok[1])
                    except ModelSyntaxError:
                        self.pos = saved
            return Diamond(label_tok[1], self.measure_formula())
        raise ModelSyntaxError(f"unexpected token {tok[1]!r} in state formula", None, tok[2])

    def diamond_multi(self, label: str) -> DiamondMulti:
        self.expect("[")
        constraints = [self.constraint()]
        while self.peek() is not None and self.peek()[1] == ",":
            self.take()
            constraints.append(self.constraint())
        self.expect("]")
        return DiamondMulti(label, tuple(constraints))

    def constraint(self) -> Constraint:
        tok = self.take()
        if tok[1] not in (">", "<"):
            raise ModelSyntaxError("constraint must start with > or <", None, tok[2])
        q = self.rational()
        phi = self.state_formula()
        return Constraint(tok[1], q, phi)

    # measure level ----------------------------------------------------------

    def measure_formula(self) -> MeasureFormula:
        items = [self.measure_term()]
        while not self.done() and self.peek()[1] == "\\/":
            self.take()
            items.append(self.measure_term())
        return items[0] if len(items) == 1 else MOr(tuple(items))

    def measure_term(self) -> MeasureFormula:
        tok = self.peek()
        if tok is None:
            raise ModelSyntaxError("unexpected end of formula")
        if tok[1] == "!":
            self.take()
            return MNot(self.measure_term())
        if tok[1] == "(":
            self.take()
            psi = self.measure_formula()
            self.expect(")")
            return psi
        if tok[1] == "[":
            self.take()
            phi = self.state_formula()
            self.expect("]")
            cmp_tok = self.take()
            q = self.rational()
            if cmp_tok[1] == ">=":
                return AtLeast(phi, q)
            if cmp_tok[1] == ">":
                return GreaterThan(phi, q)
            if cmp_tok[1] == "<":
                return LessThan(phi, q)
            if cmp_tok[1] == "<=":
                return AtMost(phi, q)
            raise ModelSyntaxError(f"unknown comparison {cmp_tok[1]!r}", None, cmp_tok[2])
        raise ModelSyntaxError(f"unexpected token {tok[1]!r} in measure formula", None, tok[2])

    def rational(self) -> Fraction:
        tok = self.take()
        if tok[0] != "int":
            raise ModelSyntaxError("expected a rational number", None, tok[2])
        num = int(tok[1])
        nxt = self.peek()
        if nxt is not None and nxt[1] == "/":
            self.take()
            den_tok = self.take()
            if den_tok[0] != "int" or int(den_tok[1]) == 0:
                raise ModelSyntaxError("expected a nonzero denominator", None, den_tok[2])
            return Fraction(num, int(den_tok[1]))
        return Fraction(num)


def parse_state_formula(text: str) -> StateFormula:
    parser = _FormulaParser(text)
    phi = parser.state_formula()
    if not parser.done():
        tok = parser.peek()
        raise ModelSyntaxError(f"trailing input {tok[1]!r}", None, tok[2])
    return phi


def parse_measure_formula(text: str) -> MeasureFormula:
    parser = _FormulaParser(text)
    psi = parser.measure_formula()
    if not parser.done():
        tok = parser.peek()
        raise ModelSyntaxError(f"trailing input {tok[1]!r}", None, tok[2])
    return psi
