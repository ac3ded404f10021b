import pytest
from hypothesis import given
from hypothesis import strategies as st

from grad.algebra import GradeVector, boolean, linearity, naturals, vec_affine
from grad.contexts import (
    PlainCtx,
    UsageCtx,
    ctx_add,
    ctx_scale,
    flatten_defs,
    grades_of,
    join_usage,
    subusage,
)
from grad.exceptions import ContextError, TypeCheckError
from grad.syntax import Pair, Tensor, Unit, UnitVal, Var


@pytest.fixture
def plain() -> PlainCtx:
    return PlainCtx().extend("x", Unit(), UnitVal()).extend("y", Tensor(Unit(), Unit()))


def _usage(plain, *grades, semiring=None) -> UsageCtx:
    return UsageCtx.from_plain(plain, GradeVector(semiring or linearity(), grades))


class TestPlainCtx:
    def test_lookup(self, plain):
        assert plain.names == ("x", "y")
        assert plain.index("y") == 1
        assert plain.index("z") is None
        assert plain.lookup("x").definition == UnitVal()
        assert len(plain.prefix(1)) == 1

    def test_duplicate_names(self, plain):
        with pytest.raises(ContextError):
            plain.extend("x", Unit())

    def test_str(self, plain):
        assert str(plain) == "x = unit : Unit, y : Unit * Unit"


class TestUsageCtx:
    def test_erase(self, plain):
        usage = _usage(plain, "1", "w")
        assert usage.erase() == plain
        assert usage.grades().entries == ("1", "w")
        assert usage.lookup("y").grade == "w"
        assert str(usage) == "x = unit :1 Unit, y :w Unit * Unit"

    def test_grade_count_mismatch(self, plain):
        with pytest.raises(ContextError):
            _usage(plain, "1")

    def test_zero(self, plain):
        assert UsageCtx.zero(naturals(), plain).grades().entries == (0, 0)

    def test_scale_and_add(self, plain):
        g1 = _usage(plain, "1", "0")
        g2 = _usage(plain, "1", "1")
        assert ctx_add(g1, g2).grades().entries == ("w", "1")
        assert ctx_scale("0", g2).grades().entries == ("0", "0")
        assert ctx_scale("w", g1).grades().entries == ("w", "0")

    def test_grades_of_is_additive(self, plain):
        g1 = _usage(plain, 2, 0, semiring=naturals())
        g2 = _usage(plain, 1, 3, semiring=naturals())
        assert grades_of(ctx_add(g1, g2)) == vec_affine(grades_of(g1), 1, grades_of(g2))
        assert grades_of(ctx_scale(2, g2)).entries == (2, 6)

    def test_add_needs_same_erasure(self, plain):
        other = PlainCtx().extend("x", Unit()).extend("y", Unit())
        with pytest.raises(ContextError):
            ctx_add(_usage(plain, "1", "1"), _usage(other, "1", "1"))

    def test_subusage(self, plain):
        assert subusage(_usage(plain, "0", "1"), _usage(plain, "w", "1"))
        assert not subusage(_usage(plain, "0", "1"), _usage(plain, "1", "1"))


def test_flatten_defs():
    defs = PlainCtx().extend("x", Unit(), UnitVal()).extend("y", None, Pair(Var("x"), Var("x")))
    assert flatten_defs(Var("y"), defs) == Pair(UnitVal(), UnitVal())
    assert flatten_defs(Var("z"), defs) == Var("z")


class TestJoinUsage:
    def test_equal(self):
        v = GradeVector(boolean(), ("1", "0"))
        assert join_usage(v, v) == v

    def test_lub(self):
        s = linearity()
        joined = join_usage(GradeVector(s, ("0", "1")), GradeVector(s, ("1", "1")))
        assert joined.entries == ("w", "1")

    def test_no_lub(self):
        s = boolean()
        with pytest.raises(TypeCheckError) as exc:
            join_usage(GradeVector(s, ("0",)), GradeVector(s, ("1",)))
        assert exc.value.kind == "branch-join"


PLAIN = PlainCtx().extend("x", Unit(), UnitVal()).extend("y", Tensor(Unit(), Unit()))
SEMIRINGS = {"linearity": linearity(), "nat": naturals()}


def _grade(name):
    if name == "nat":
        return st.integers(min_value=0, max_value=20)
    return st.sampled_from(("0", "1", "w"))


@pytest.mark.parametrize("name", sorted(SEMIRINGS))
class TestContextAlgebra:
    def _context(self, data, name):
        grades = tuple(data.draw(_grade(name)) for _ in PLAIN)
        return _usage(PLAIN, *grades, semiring=SEMIRINGS[name])

    @given(data=st.data())
    def test_scale_distributes(self, name, data):
        s = SEMIRINGS[name]
        g1, g2 = self._context(data, name), self._context(data, name)
        q, r = data.draw(_grade(name)), data.draw(_grade(name))
        assert ctx_scale(q, ctx_add(g1, g2)) == ctx_add(ctx_scale(q, g1), ctx_scale(q, g2))
        assert ctx_scale(s.add(q, r), g1) == ctx_add(ctx_scale(q, g1), ctx_scale(r, g1))
        assert ctx_scale(s.mul(q, r), g1) == ctx_scale(q, ctx_scale(r, g1))

    @given(data=st.data())
    def test_grades_of_is_a_homomorphism(self, name, data):
        g1, g2 = self._context(data, name), self._context(data, name)
        q = data.draw(_grade(name))
        assert grades_of(ctx_add(g1, g2)) == grades_of(g1) + grades_of(g2)
        assert grades_of(ctx_scale(q, g1)) == grades_of(g1).scale(q)
        assert ctx_add(g1, g2).erase() == PLAIN
