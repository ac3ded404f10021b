import itertools

import pytest

from grad.algebra import GradeVector, linearity, naturals
from grad.contexts import PlainCtx, UsageCtx
from grad.corpus import CORPUS, get_program
from grad.exceptions import ContextError, TypeCheckError
from grad.parser import parse_term
from grad.simple_checker import SimpleChecker, SimpleJudgement, check_simple, infer_simple
from grad.syntax import Arrow, BoxType, Sum, Tensor, Unit, Var, subst

A = Var("A")


def _term(text, semiring=None):
    return parse_term(text, semiring or linearity())


def _plain(**types) -> PlainCtx:
    plain = PlainCtx()
    for name, text in types.items():
        plain = plain.extend(name, _term(text))
    return plain


class TestInfer:
    def test_irrelevant_application(self):
        plain = _plain(f="A -0> A -1> A", x="A")
        type_, usage = infer_simple(plain, _term("f x"), linearity())
        assert type_ == Arrow("1", A, A)
        assert usage.entries == ("1", "0")

    def test_pair(self):
        plain = _plain(x="A")
        type_, usage = infer_simple(plain, _term("(x, x)"), linearity())
        assert type_ == Tensor(A, A)
        assert usage.entries == ("w",)

    def test_box_scales_usage(self):
        plain = _plain(x="A")
        type_, usage = infer_simple(plain, _term("box w x"), linearity())
        assert type_ == BoxType("w", A)
        assert usage.entries == ("w",)

    def test_let_box(self):
        plain = _plain(b="Box w A")
        type_, usage = infer_simple(plain, _term("let box y = b in (y, y)"), linearity())
        assert type_ == Tensor(A, A)
        assert usage.entries == ("1",)

    def test_nat_counts_uses(self):
        plain = _plain(x="A")
        _, usage = infer_simple(plain, _term("(x, (x, x))", naturals()), naturals())
        assert usage.entries == (3,)

    def test_case_joins_branches(self):
        plain = _plain(x="A", v="A + A")
        type_, usage = infer_simple(
            plain, _term("case w v of (\\z :w A. x) ; (\\z :w A. z)"), linearity()
        )
        assert type_ == A
        assert usage.entries == ("w", "w")

    def test_annotation(self):
        type_, usage = infer_simple(PlainCtx(), _term("(inj1 unit : Unit + A)"), linearity())
        assert type_ == Sum(Unit(), A)
        assert usage.entries == ()

    def test_shadowing(self):
        plain = _plain(x="A")
        type_, usage = infer_simple(plain, _term("\\x :1 Unit. x"), linearity())
        assert type_ == Arrow("1", Unit(), Unit())
        assert usage.entries == ("0",)


@pytest.mark.parametrize(
    "text,kind",
    (
        ("\\x :1 A. (x, x)", "declared-usage-insufficient"),
        ("\\x :0 A. x", "declared-usage-insufficient"),
        ("\\x :1 A. unit", "declared-usage-insufficient"),
        ("y", "unbound-variable"),
        ("inj1 unit", "cannot-infer"),
        ("\\x :0 Type. x", "non-simple"),
        ("unit unit", "type-mismatch"),
        ("case 0 (inj1 unit : Unit + Unit) of (\\z :0 Unit. z) ; (\\z :0 Unit. z)", "case-annotation"),
        ("let (a, b) = unit in a", "type-mismatch"),
        ("let box a = unit in a", "type-mismatch"),
        ("(unit : Unit * Unit)", "type-mismatch"),
    ),
)
def test_rejected(text, kind):
    with pytest.raises(TypeCheckError) as exc:
        SimpleChecker(linearity()).infer(_term(text))
    assert exc.value.kind == kind


def test_unrestricted_binder():
    type_, _ = infer_simple(PlainCtx(), _term("\\x :w A. (x, x)"), linearity())
    assert type_ == Arrow("w", A, Tensor(A, A))


def test_check_against_arrow_grade():
    checker = SimpleChecker(linearity())
    with pytest.raises(TypeCheckError):
        checker.check(_term("\\x :w A. x"), Arrow("1", A, A))


class TestJudgement:
    def test_declared_usage(self):
        plain = _plain(x="A")
        declared = UsageCtx.from_plain(plain, GradeVector(linearity(), ("w",)))
        usage = check_simple(SimpleJudgement(plain, declared, _term("(x, x)"), Tensor(A, A)))
        assert usage.entries == ("w",)

    def test_declared_usage_insufficient(self):
        plain = _plain(x="A")
        declared = UsageCtx.from_plain(plain, GradeVector(linearity(), ("1",)))
        with pytest.raises(TypeCheckError) as exc:
            check_simple(SimpleJudgement(plain, declared, _term("(x, x)"), Tensor(A, A)))
        assert exc.value.kind == "declared-usage-insufficient"

    def test_erasure_must_match(self):
        plain = _plain(x="A")
        with pytest.raises(ContextError):
            SimpleJudgement(plain, UsageCtx(linearity()), _term("x"), A)


def _raised(s, usage):
    """Every vector pointwise at or above usage."""
    above = [[q for q in s.elements if s.leq(g, q)] for g in usage]
    return [GradeVector(s, grades) for grades in itertools.product(*above)]


class TestMetatheory:
    @pytest.mark.parametrize("name", [p.name for p in CORPUS if p.system == "simple"])
    def test_larger_declared_usage_still_checks(self, name):
        loaded = get_program(name).load()
        usage = loaded.main_usage.grades()
        for declared in _raised(loaded.semiring, usage):
            judgement = SimpleJudgement(
                loaded.plain,
                UsageCtx.from_plain(loaded.plain, declared),
                loaded.main,
                loaded.main_type,
            )
            assert check_simple(judgement) == usage

    @pytest.mark.parametrize(
        "z_type,body,value",
        (
            ("A", "(z, (z, y))", "x"),
            ("A * A", "let (p, r) = z in (p, (r, y))", "(x, y)"),
            ("Box 2 A", "let box k = z in (k, k)", "box 2 x"),
            ("A -2> (A * A)", "z y", "\\k :2 A. (k, k)"),
        ),
    )
    def test_substitution(self, z_type, body, value):
        s = naturals()

        def parse(text):
            return parse_term(text, s)

        plain = PlainCtx().extend("x", A).extend("y", A)
        body_type, u_body = infer_simple(plain.extend("z", parse(z_type)), parse(body), s)
        checker = SimpleChecker(s, plain)
        u_value = checker.check(parse(value), parse(z_type))
        u_result = checker.check(subst(parse(body), parse(value), "z"), body_type)
        assert u_result == u_body.truncate(2) + u_value.scale(u_body[2])
