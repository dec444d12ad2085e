import random
from fractions import Fraction as F

import pytest

from nlmp import (
    And,
    AtLeast,
    AtMost,
    Constraint,
    Diamond,
    DiamondMulti,
    DomainError,
    GreaterThan,
    LessThan,
    MNot,
    MOr,
    ModelDocument,
    ModelSyntaxError,
    Top,
    corpus_dir,
    dirac,
    formula_to_text,
    nlmp_validate,
    parse_measure_formula,
    parse_model,
    parse_state_formula,
    serialize_model,
)
from support import (
    rand_measure_formula,
    rand_state_formula,
    rand_valid_nlmp,
    two_bounds_model,
)

CORPUS_FILES = sorted(p.name for p in corpus_dir().glob("*.nlmp"))


def read_corpus(name: str) -> str:
    return (corpus_dir() / name).read_text(encoding="utf-8")


class TestModelParsing:
    def test_minimal_model(self):
        doc = parse_model("states only\nlabels a\n")
        assert doc.kind == "nlmp"
        assert doc.nlmp.sigma.is_powerset
        assert doc.nlmp.row("only", "a") == ()
        assert nlmp_validate(doc.nlmp).valid

    def test_flagship_corpus_file_matches_canonical_model(self):
        doc = parse_model(read_corpus("two_bounds_needed.nlmp"))
        assert doc.nlmp == two_bounds_model()

    def test_weight_sum_error_reports_the_sum(self):
        text = "states s x y\nlabels a\ntrans s a x:1/2 y:1/3\n"
        with pytest.raises(ModelSyntaxError, match="5/6"):
            parse_model(text)

    def test_unknown_state_and_label_rejected(self):
        with pytest.raises(ModelSyntaxError, match="unknown state"):
            parse_model("states s\nlabels a\ntrans s a -> ghost\n")
        with pytest.raises(ModelSyntaxError, match="unknown label"):
            parse_model("states s\nlabels a\ntrans s b -> s\n")

    def test_duplicate_weight_rejected(self):
        with pytest.raises(ModelSyntaxError, match="duplicate weight"):
            parse_model("states s\nlabels a\ntrans s a s:1/2 s:1/2\n")

    def test_line_numbers_in_errors(self):
        text = "states s\nlabels a\n# fine\ntrans s a s:1/2\n"
        with pytest.raises(ModelSyntaxError, match="line 4"):
            parse_model(text)

    def test_structure_errors(self):
        with pytest.raises(ModelSyntaxError, match="missing states"):
            parse_model("labels a\n")
        with pytest.raises(ModelSyntaxError, match="missing labels"):
            parse_model("states s\n")
        with pytest.raises(ModelSyntaxError, match="after the states"):
            parse_model("sigma powerset\nstates s\nlabels a\n")
        with pytest.raises(ModelSyntaxError, match="duplicate states"):
            parse_model("states s\nstates t\nlabels a\n")
        with pytest.raises(ModelSyntaxError, match="unknown directive"):
            parse_model("states s\nlabels a\nbogus\n")
        with pytest.raises(ModelSyntaxError, match="unclosed"):
            parse_model("states s t\nlabels a\nsigma gen {s\n")

    def test_weights_accumulate_within_atoms(self):
        text = (
            "states s t x\nlabels a\nsigma gen {s t} {x}\n"
            "trans x a s:1/4 t:1/4 x:1/2\n"
        )
        doc = parse_model(text)
        (mu,) = doc.nlmp.row("x", "a")
        assert mu.value({"s", "t"}) == F(1, 2)
        assert mu.value({"x"}) == F(1, 2)

    def test_point_mass_shorthand_equals_explicit_weight(self):
        doc1 = parse_model("states s x\nlabels a\ntrans s a -> x\n")
        doc2 = parse_model("states s x\nlabels a\ntrans s a x:1\n")
        assert doc1.nlmp == doc2.nlmp
        assert doc1.nlmp.row("s", "a") == (dirac(doc1.nlmp.sigma, "x"),)

    def test_lmp_requires_exactly_one_kernel_each(self):
        base = "lmp\nstates s t\nlabels a\n"
        with pytest.raises(ModelSyntaxError, match="missing the transition"):
            parse_model(base + "trans s a -> t\n")
        with pytest.raises(ModelSyntaxError, match="several transitions"):
            parse_model(base + "trans s a -> t\ntrans s a -> s\ntrans t a -> t\n")
        doc = parse_model(base + "trans s a -> t\ntrans t a -> t\n")
        assert doc.kind == "lmp"
        assert doc.lmp is not None
        assert len(doc.nlmp.row("s", "a")) == 1


class TestRoundTrip:
    @pytest.mark.parametrize("name", CORPUS_FILES)
    def test_corpus_files_round_trip(self, name):
        doc = parse_model(read_corpus(name), source=name)
        again = parse_model(serialize_model(doc), source=name)
        assert again.kind == doc.kind
        assert again.nlmp == doc.nlmp
        if doc.kind == "lmp":
            assert again.lmp == doc.lmp

    def test_random_models_round_trip(self):
        rng = random.Random(601)
        for _ in range(60):
            m = rand_valid_nlmp(rng, coarse=rng.random() < 0.5)
            doc = ModelDocument("nlmp", m, None, "<generated>")
            again = parse_model(serialize_model(doc))
            assert again.nlmp == m

    def test_digest_is_deterministic_and_content_sensitive(self):
        doc1 = parse_model(read_corpus("two_bounds_needed.nlmp"))
        doc2 = parse_model(read_corpus("two_bounds_needed.nlmp"))
        doc3 = parse_model(read_corpus("uniform_rows.nlmp"))
        assert doc1.digest == doc2.digest
        assert doc1.digest != doc3.digest


class TestFormulaParsing:
    def test_grammar_examples(self):
        assert parse_state_formula("T") == Top()
        assert parse_state_formula("T & T") == And(Top(), Top())
        assert parse_state_formula("<a> [T]>=1/2") == Diamond("a", AtLeast(Top(), F(1, 2)))
        assert parse_state_formula("<a>[ >1/4 T , <3/4 T ]") == DiamondMulti(
            "a", (Constraint(">", F(1, 4), Top()), Constraint("<", F(3, 4), Top()))
        )
        assert parse_measure_formula("[T]>=1/2 \\/ ![T]>1/2") == MOr(
            (AtLeast(Top(), F(1, 2)), MNot(GreaterThan(Top(), F(1, 2))))
        )
        assert parse_measure_formula("[T]<1/2") == LessThan(Top(), F(1, 2))
        assert parse_measure_formula("[T]<=1/2") == AtMost(Top(), F(1, 2))

    def test_integers_zero_and_one(self):
        assert parse_measure_formula("[T]>=1") == AtLeast(Top(), F(1))
        assert parse_measure_formula("[T]>0") == GreaterThan(Top(), F(0))

    def test_conjunction_is_left_associative(self):
        phi = parse_state_formula("T & T & T")
        assert phi == And(And(Top(), Top()), Top())

    def test_whitespace_insensitive(self):
        tight = parse_state_formula("<a>[>1/4T,<3/4T]")
        spaced = parse_state_formula("<a>[ >1/4 T , <3/4 T ]")
        assert tight == spaced

    def test_parentheses(self):
        phi = parse_state_formula("(T & T) & (T)")
        assert phi == And(And(Top(), Top()), Top())
        psi = parse_measure_formula("!([T]>=1 \\/ [T]<1)")
        assert psi == MNot(MOr((AtLeast(Top(), F(1)), LessThan(Top(), F(1)))))

    def test_bracketed_diamond_inside_measure_bound(self):
        # the [< sequence must backtrack into a measure bracket
        psi = parse_state_formula("<a>[<b>[T]>=1]>=1")
        assert psi == Diamond("a", AtLeast(Diamond("b", AtLeast(Top(), F(1))), F(1)))

    def test_nested_flagship_formula(self):
        phi = parse_state_formula("<a>[ >1/4 <b>[T]>=1 , <3/4 <b>[T]>=1 ]")
        sub = Diamond("b", AtLeast(Top(), F(1)))
        assert phi == DiamondMulti(
            "a", (Constraint(">", F(1, 4), sub), Constraint("<", F(3, 4), sub))
        )

    def test_syntax_errors(self):
        for bad in ("", "T &", "<a>", "[T]>=", "T T", "<a>[ ]", "(T", "[T]>=1/0"):
            with pytest.raises(ModelSyntaxError):
                parse_state_formula(bad)

    def test_threshold_range_enforced(self):
        with pytest.raises(DomainError):
            parse_measure_formula("[T]>=3/2")

    def test_rendering_round_trips(self):
        rng = random.Random(602)
        labels = ("a", "b")
        for _ in range(120):
            phi = rand_state_formula(rng, labels, 3)
            text = formula_to_text(phi)
            parsed = parse_state_formula(text)
            assert formula_to_text(parsed) == text
            assert parse_state_formula(formula_to_text(parsed)) == parsed
        for _ in range(120):
            psi = rand_measure_formula(rng, labels, 3)
            text = formula_to_text(psi)
            parsed = parse_measure_formula(text)
            assert formula_to_text(parsed) == text
            assert parse_measure_formula(formula_to_text(parsed)) == parsed
