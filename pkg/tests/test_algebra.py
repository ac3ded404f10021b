import pytest
from hypothesis import given
from hypothesis import strategies as st

from grad.algebra import (
    BUILTIN_SEMIRINGS,
    FiniteSemiring,
    GradeMatrix,
    GradeVector,
    boolean,
    boolean_ordered,
    classify,
    decrement,
    five_point,
    get_semiring,
    grade_add,
    grade_leq,
    grade_mul,
    linearity,
    mat_mul,
    naturals,
    security,
    trivial,
    vec_affine,
    vec_mat_mul,
)
from grad.exceptions import CarrierTooLarge, GradeError, SemiringConfigError

FINITE = ("trivial", "boolean", "boolean-ordered", "linearity", "five-point", "security")


@pytest.mark.parametrize("name", FINITE)
def test_finite_semiring_laws(name):
    semiring = get_semiring(name)
    assert isinstance(semiring, FiniteSemiring)
    assert semiring.check_laws() == []


@pytest.mark.parametrize(
    "q1,q2,total,product",
    (
        ("0", "1", "1", "0"),
        ("1", "1", "w", "1"),
        ("1", "w", "w", "w"),
        ("w", "0", "w", "0"),
        ("w", "w", "w", "w"),
    ),
)
def test_linearity_tables(q1, q2, total, product):
    s = linearity()
    assert grade_add(s, q1, q2) == total
    assert grade_mul(s, q1, q2) == product


@pytest.mark.parametrize(
    "q1,q2,expected",
    (
        ("0", "w", True),
        ("1", "w", True),
        ("0", "1", False),
        ("1", "0", False),
        ("w", "1", False),
    ),
)
def test_linearity_order(q1, q2, expected):
    assert grade_leq(linearity(), q1, q2) == expected


@pytest.mark.parametrize(
    "q,r,expected",
    (("w", "1", "w"), ("1", "1", "0"), ("0", "1", None), ("1", "0", "1"), ("w", "w", "w")),
)
def test_linearity_decrement(q, r, expected):
    assert decrement(linearity(), q, r) == expected


@pytest.mark.parametrize("q,r,expected", ((3, 1, 2), (1, 1, 0), (0, 1, None), (2, 0, 2)))
def test_nat_decrement(q, r, expected):
    assert decrement(naturals(), q, r) == expected


def test_nat_order_is_discrete():
    s = naturals()
    assert s.leq(2, 2)
    assert not s.leq(1, 2)
    assert s.lub(1, 3) == 3


def test_five_point_intervals():
    s = five_point()
    assert s.add("1", "1") == "Rel"
    assert s.add("Aff", "1") == "Rel"
    assert s.mul("Aff", "Rel") == "w"
    assert s.leq("1", "Aff")
    assert not s.leq("Aff", "Rel")
    assert s.parse_grade("ω") == "w"


@pytest.mark.parametrize(
    "name,flags",
    (
        (
            "linearity",
            dict(zero_unusable=True, one_linear=True, zerosumfree=True, entire=True, linear=True, has_lub=True),
        ),
        (
            "nat",
            dict(zero_unusable=True, one_linear=True, zerosumfree=True, entire=True, linear=True, has_lub=True),
        ),
        ("boolean", dict(zero_unusable=True, one_linear=False, linear=False, has_lub=False)),
        ("boolean-ordered", dict(one_linear=False, has_lub=True, one_minimal=False)),
        ("trivial", dict(zero_unusable=False)),
        ("security", dict(zero_unusable=True, one_linear=False)),
    ),
)
def test_classify(name, flags):
    result = classify(get_semiring(name)).as_dict()
    for flag, value in flags.items():
        assert result[flag] == value, flag


def test_lattice_literals():
    s = security()
    assert s.parse_grade("0") == "Private"
    assert s.parse_grade("1") == "Public"
    assert s.add("Private", "Public") == "Public"
    assert s.mul("Private", "Public") == "Private"


@pytest.mark.parametrize(
    "name,text",
    (("linearity", "2"), ("boolean", "w"), ("nat", "w"), ("nat", "-1")),
)
def test_parse_grade_invalid(name, text):
    with pytest.raises(GradeError):
        get_semiring(name).parse_grade(text)


def test_grade_not_in_semiring():
    with pytest.raises(GradeError):
        linearity().add("1", "Aff")
    with pytest.raises(GradeError):
        naturals().add(1, "1")


def test_unknown_semiring():
    with pytest.raises(SemiringConfigError):
        get_semiring("tropical")


def test_builtin_names():
    for name, factory in BUILTIN_SEMIRINGS.items():
        assert str(factory()) == name


def test_carrier_too_large():
    elements = [str(i) for i in range(70)]
    semiring = FiniteSemiring(
        "big",
        elements,
        add=lambda a, b: a if b == "0" else b,
        mul=lambda a, b: "0",
        leq=lambda a, b: a == b,
        zero="0",
        one="1",
    )
    with pytest.raises(CarrierTooLarge):
        semiring.classify()


def test_trivial_one_is_zero():
    s = trivial()
    assert s.one == s.zero
    assert s.is_usable(s.zero)


def test_relevant_grades():
    assert linearity().relevant_grades() == ("1", "w")
    assert boolean_ordered().relevant_grades() == ("1",)
    assert naturals().relevant_grades() == (1, 2, 3)


class TestGradeVector:
    def test_affine(self):
        s = linearity()
        v0 = GradeVector(s, ("0", "1", "w"))
        v1 = GradeVector(s, ("1", "1", "0"))
        assert vec_affine(v0, "1", v1).entries == ("1", "w", "w")
        assert vec_affine(v0, "0", v1) == v0

    def test_length_mismatch(self):
        s = naturals()
        with pytest.raises(GradeError):
            GradeVector(s, (1,)) + GradeVector(s, (1, 2))

    def test_leq(self):
        s = linearity()
        assert GradeVector(s, ("0", "1")).leq(GradeVector(s, ("w", "1")))
        assert not GradeVector(s, ("0", "1")).leq(GradeVector(s, ("1", "1")))
        assert not GradeVector(s, ("0",)).leq(GradeVector(s, ("0", "0")))

    def test_single_extend_truncate(self):
        s = naturals()
        v = GradeVector.single(s, 3, 1, 4)
        assert v.entries == (0, 4, 0)
        assert v.extend(5).entries == (0, 4, 0, 0, 0)
        assert v.truncate(2).entries == (0, 4)
        assert str(v) == "(0, 4, 0)"

    def test_invalid_entry(self):
        with pytest.raises(GradeError):
            GradeVector(linearity(), ("2",))


class TestGradeMatrix:
    def test_vec_mat_mul(self):
        s = naturals()
        m = GradeMatrix(s, ((0, 0, 0), (2, 0, 0), (1, 2, 0)))
        v = GradeVector(s, (0, 1, 1))
        assert vec_mat_mul(v, m).entries == (3, 2, 0)

    def test_identity(self):
        s = naturals()
        m = GradeMatrix(s, ((0, 0), (3, 0)))
        assert mat_mul(m, GradeMatrix.identity(s, 2)) == m
        assert (m @ m) == GradeMatrix.zero(s, 2)

    def test_lower_triangular(self):
        s = naturals()
        assert GradeMatrix(s, ((0, 0), (1, 0))).is_strictly_lower_triangular
        assert not GradeMatrix.identity(s, 2).is_strictly_lower_triangular

    def test_square(self):
        with pytest.raises(GradeError):
            GradeMatrix(naturals(), ((0, 0),))


nat_grades = st.integers(min_value=0, max_value=50)
linearity_grades = st.sampled_from(("0", "1", "w"))


@given(nat_grades, nat_grades, nat_grades)
def test_nat_distributes(a, b, c):
    s = naturals()
    assert s.mul(a, s.add(b, c)) == s.add(s.mul(a, b), s.mul(a, c))


@given(linearity_grades, linearity_grades)
def test_linearity_decrement_is_sound(q, r):
    s = linearity()
    result = s.decrement(q, r)
    if result is not None:
        assert s.leq(s.add(result, r), q)


@given(st.lists(nat_grades, min_size=3, max_size=3), st.lists(nat_grades, min_size=3, max_size=3))
def test_vector_addition_commutes(v1, v2):
    s = naturals()
    a, b = GradeVector(s, tuple(v1)), GradeVector(s, tuple(v2))
    assert a + b == b + a


def test_boolean_is_discrete():
    s = boolean()
    assert not s.leq("0", "1")
    assert s.lub("0", "1") is None


SEMIMODULES = FINITE + ("nat",)


def _grades(s):
    if isinstance(s, FiniteSemiring):
        return st.sampled_from(s.elements)
    return nat_grades


def _below(s, q):
    if isinstance(s, FiniteSemiring):
        return st.sampled_from([a for a in s.elements if s.leq(a, q)])
    return st.just(q)


def _vector(data, s, length=3):
    return GradeVector(s, tuple(data.draw(_grades(s)) for _ in range(length)))


def _matrix(data, s, size=3):
    return GradeMatrix(
        s, tuple(tuple(data.draw(_grades(s)) for _ in range(size)) for _ in range(size))
    )


@pytest.mark.parametrize("name", SEMIMODULES)
class TestVectorLaws:
    @given(data=st.data())
    def test_scaling(self, name, data):
        s = get_semiring(name)
        v, w = _vector(data, s), _vector(data, s)
        q, r = data.draw(_grades(s)), data.draw(_grades(s))
        assert v.scale(s.mul(q, r)) == v.scale(r).scale(q)
        assert v.scale(s.add(q, r)) == v.scale(q) + v.scale(r)
        assert (v + w).scale(q) == v.scale(q) + w.scale(q)
        assert v.scale(s.one) == v
        assert v.scale(s.zero) == GradeVector.zeros(s, 3)

    @given(data=st.data())
    def test_affine_is_add_and_scale(self, name, data):
        s = get_semiring(name)
        u, v = _vector(data, s), _vector(data, s)
        q = data.draw(_grades(s))
        assert vec_affine(u, q, v) == u + v.scale(q)

    @given(data=st.data())
    def test_monotone(self, name, data):
        s = get_semiring(name)
        upper, other = _vector(data, s), _vector(data, s)
        lower = GradeVector(s, tuple(data.draw(_below(s, b)) for b in upper))
        assert lower.leq(upper)
        assert (lower + other).leq(upper + other)
        q = data.draw(_grades(s))
        p = data.draw(_below(s, q))
        assert lower.scale(p).leq(upper.scale(q))

    @given(data=st.data())
    def test_matrix_product_associates(self, name, data):
        s = get_semiring(name)
        a, b, c = _matrix(data, s), _matrix(data, s), _matrix(data, s)
        assert mat_mul(mat_mul(a, b), c) == mat_mul(a, mat_mul(b, c))
        v = _vector(data, s)
        assert vec_mat_mul(vec_mat_mul(v, a), b) == vec_mat_mul(v, a @ b)
        assert vec_mat_mul(v, GradeMatrix.identity(s, 3)) == v
