"""Norms, conjugation, products and support truncation."""
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lpfactor import (
    INFINITE,
    Exponent,
    MeasureSpace,
    SimpleFunction,
    conjugate,
    norm,
    pointwise_product,
    truncate_support,
)


def sf(measures, coeffs):
    return SimpleFunction(MeasureSpace.from_measures(measures), tuple(coeffs))


# ---------------------------------------------------------------------------
# norm
# ---------------------------------------------------------------------------
class TestNorm:
    def test_zero_function(self):
        f = sf([1.0, INFINITE, 0.0], [0, 0, 0])
        for p in (1, 2, 3.5, INFINITE):
            assert norm(f, p) == 0.0

    def test_two_atom_example(self):
        # direct evaluation: measures (2, 3), f = (1, -1)
        f = sf([2, 3], [1, -1])
        assert norm(f, 1) == 5.0
        assert norm(f, 2) == pytest.approx(math.sqrt(5.0), rel=1e-15)
        assert norm(f, INFINITE) == 1.0

    def test_esssup_ignores_null_atoms(self):
        f = sf([0.0, 1.0], [100.0, 1.0])
        assert norm(f, INFINITE) == 1.0

    def test_infinite_atom_with_mass(self):
        f = sf([INFINITE, 1.0], [0.5, 1.0])
        assert math.isinf(norm(f, 1))
        assert math.isinf(norm(f, 2))
        # but the essential sup stays finite
        assert norm(f, INFINITE) == 1.0

    def test_zero_times_infinite_is_zero(self):
        f = sf([INFINITE, 2.0], [0.0, 3.0])
        assert norm(f, 1) == 6.0

    def test_counting_measure_is_sequence_norm(self):
        space = MeasureSpace.counting(3)
        f = SimpleFunction(space, (3.0, -4.0, 0.0))
        assert norm(f, 1) == 7.0
        assert norm(f, 2) == 5.0
        assert norm(f, INFINITE) == 4.0


# ---------------------------------------------------------------------------
# conjugate exponents
# ---------------------------------------------------------------------------
class TestConjugate:
    def test_self_conjugate(self):
        assert conjugate(2).value == 2

    def test_one_and_infinity(self):
        assert conjugate(1).is_infinite
        assert conjugate(INFINITE).value == 1

    def test_four_thirds(self):
        assert conjugate(4).value == Fraction(4, 3)

    def test_involution_exact(self):
        for p in (1, 1.5, 2, 3, 7.25, INFINITE, Fraction(11, 10)):
            assert conjugate(conjugate(p)) == Exponent(p)

    @given(st.floats(min_value=1.0000001, max_value=1e6))
    def test_involution_exact_on_floats(self, p):
        assert conjugate(conjugate(p)).value == Exponent(p).value

    def test_rejects_below_one(self):
        with pytest.raises(ValueError):
            Exponent(0.5)


# ---------------------------------------------------------------------------
# pointwise product
# ---------------------------------------------------------------------------
class TestPointwiseProduct:
    def test_componentwise(self):
        f = sf([1, 1], [2, 3])
        g = SimpleFunction(f.space, (1, 0))
        assert pointwise_product(f, g).coefficients == (2.0, 0.0)

    def test_identity_element(self):
        f = sf([1, 2, 3], [0.5, -1.25, 7])
        ones = SimpleFunction(f.space, (1, 1, 1))
        assert pointwise_product(f, ones).coefficients == f.coefficients

    def test_squaring(self):
        f = sf([1, 1], [-1, 2])
        assert pointwise_product(f, f).coefficients == (1.0, 4.0)

    def test_mismatched_spaces_rejected(self):
        f = sf([1, 1], [1, 1])
        g = sf([1, 2], [1, 1])
        with pytest.raises(ValueError):
            pointwise_product(f, g)


# ---------------------------------------------------------------------------
# truncation
# ---------------------------------------------------------------------------
def oracle_truncation_level(coeffs, measures, eps):
    """Brute force: try k = 1, 2, ... and return the first admissible one.

    Membership 1/k <= |c| <= k is evaluated in exact rational arithmetic,
    matching the set definition rather than any rounding of 1/k.
    """
    from fractions import Fraction

    for k in range(1, 10**7):
        kept = [
            i
            for i, c in enumerate(coeffs)
            if c != 0 and Fraction(1, k) <= Fraction(abs(c)) <= k
        ]
        tail = math.fsum(
            abs(c) * m
            for i, (c, m) in enumerate(zip(coeffs, measures))
            if i not in kept and m > 0
        )
        if tail < eps:
            return k, sorted(kept), tail
    raise AssertionError("oracle found no level")


class TestTruncateSupport:
    def test_three_atom_example(self):
        coeffs, measures, eps = (10.0, 0.5, 0.001), (1.0, 1.0, 1.0), 0.01
        k, kept, tail = oracle_truncation_level(coeffs, measures, eps)
        assert (k, kept, tail) == (10, [0, 1], 0.001)  # oracle-frozen
        res = truncate_support(sf(measures, coeffs), eps)
        assert res.level == k
        assert list(res.kept_indices) == kept
        assert res.kept_atoms == ("a0", "a1")
        assert res.tail_value == pytest.approx(tail)
        assert res.sup_on_A == 10.0

    def test_zero_function(self):
        res = truncate_support(sf([1, 2], [0, 0]), 0.5)
        assert res.kept_atoms == ()
        assert res.tail_value == 0.0

    def test_infinite_atom_excluded_when_zero_there(self):
        res = truncate_support(sf([INFINITE, 1.0], [0.0, 5.0]), 0.5)
        assert res.kept_atoms == ("a1",)
        assert res.tail_value == 0.0
        assert res.level == 5

    def test_rejects_non_l1(self):
        with pytest.raises(ValueError):
            truncate_support(sf([INFINITE, 1.0], [1.0, 0.0]), 0.5)

    def test_level_one_keeps_unit_atoms(self):
        res = truncate_support(sf([1.0, 1.0], [1.0, 1.0]), 3.0)
        assert res.level == 1
        assert res.kept_atoms == ("a0", "a1")

    @given(
        coeffs=st.lists(
            st.one_of(
                st.just(0.0),
                st.floats(0.02, 50),
                st.floats(-50, -0.02),
            ),
            min_size=12,
            max_size=12,
        ),
        measures=st.lists(
            st.one_of(st.just(0.0), st.floats(0.01, 10)), min_size=12, max_size=12
        ),
        eps=st.floats(0.001, 5.0),
    )
    @settings(max_examples=150)
    def test_postconditions_match_oracle(self, coeffs, measures, eps):
        # Oracle-friendly magnitudes: entry levels stay small enough to
        # enumerate k = 1, 2, ... directly.
        f = sf(measures, coeffs)
        res = truncate_support(f, eps)
        k, kept, tail = oracle_truncation_level(coeffs, measures, eps)
        assert res.level == k
        assert list(res.kept_indices) == kept
        assert res.tail_value == pytest.approx(tail, abs=1e-12)
        assert res.tail_value < eps
        kept_measure = math.fsum(measures[i] for i in res.kept_indices)
        assert math.isfinite(kept_measure)
        assert math.isfinite(res.sup_on_A)

    def test_extreme_magnitudes_meet_postconditions(self):
        # Entry levels around 2^40 are out of the oracle's reach but still
        # exactly predictable: both outliers enter at level 2^40 together.
        f = sf([1.0, 1.0, 1.0], [2.0**40, 2.0**-40, 1.0])
        res = truncate_support(f, 0.5)
        assert res.kept_indices == (0, 1, 2)
        assert res.tail_value == 0.0
        assert res.sup_on_A == 2.0**40
        assert res.level == 2**40


# ---------------------------------------------------------------------------
# property tests
# ---------------------------------------------------------------------------
_coeff = st.floats(-20, 20, allow_nan=False, allow_infinity=False)


@st.composite
def space_and_two_functions(draw, max_atoms=10):
    n = draw(st.integers(1, max_atoms))
    measures = draw(
        st.lists(
            st.one_of(st.just(0.0), st.floats(0.0, 10.0)), min_size=n, max_size=n
        )
    )
    space = MeasureSpace.from_measures(measures)
    f = SimpleFunction(space, tuple(draw(st.lists(_coeff, min_size=n, max_size=n))))
    g = SimpleFunction(space, tuple(draw(st.lists(_coeff, min_size=n, max_size=n))))
    return f, g


@given(
    fg=space_and_two_functions(),
    p=st.sampled_from([1, 1.5, 2, 3, 7, INFINITE]),
)
@settings(max_examples=200)
def test_hoelder_inequality(fg, p):
    f, g = fg
    q = conjugate(p)
    lhs = norm(pointwise_product(f, g), 1)
    rhs = norm(f, p) * norm(g, q)
    assert lhs <= rhs * (1 + 1e-9) + 1e-12


@given(
    fg=space_and_two_functions(),
    p=st.sampled_from([1, 1.5, 2, 3, INFINITE]),
)
@settings(max_examples=200)
def test_triangle_inequality(fg, p):
    f, g = fg
    s = SimpleFunction(
        f.space, tuple(a + b for a, b in zip(f.coefficients, g.coefficients))
    )
    assert norm(s, p) <= (norm(f, p) + norm(g, p)) * (1 + 1e-9) + 1e-12


@given(
    fg=space_and_two_functions(),
    p=st.sampled_from([1, 2, 3, INFINITE]),
    c=st.floats(-100, 100, allow_nan=False),
)
@settings(max_examples=200)
def test_absolute_homogeneity(fg, p, c):
    f, _ = fg
    scaled = SimpleFunction(f.space, tuple(c * a for a in f.coefficients))
    assert norm(scaled, p) == pytest.approx(abs(c) * norm(f, p), rel=1e-9, abs=1e-12)


@given(fg=space_and_two_functions(), bump=st.floats(-1e6, 1e6, allow_nan=False))
@settings(max_examples=100)
def test_esssup_blind_to_null_atoms(fg, bump):
    f, _ = fg
    nulls = [i for i, m in enumerate(f.space.measures) if m == 0.0]
    if not nulls:
        return
    before = norm(f, INFINITE)
    coeffs = list(f.coefficients)
    coeffs[nulls[0]] = bump
    assert norm(SimpleFunction(f.space, tuple(coeffs)), INFINITE) == before
