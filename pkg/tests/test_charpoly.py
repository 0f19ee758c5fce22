import random
from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import charpoly_bruteforce, det_bruteforce
from padic_perron import (
    INF,
    CharPoly,
    FieldContext,
    HypothesisError,
    RationalMatrix,
    char_poly,
    check_coeff_bounds,
    check_det_bound,
    newton_polygon,
    root_valuations,
)
from padic_perron.verify import sample_matrix

ROOTS_5_9 = RationalMatrix(((4, -5), (1, 10)))
IRRATIONAL = RationalMatrix(((8, 1), (1, 1)))
CUBIC = RationalMatrix(((6, 1, -4), (1, -4, 6), (-4, 6, 1)))
SHARED_VAL = RationalMatrix(((Fraction(5, 3), 1), (1, Fraction(7, 3))))


@pytest.mark.parametrize(
    "A, text",
    [
        (ROOTS_5_9, "x^2 - 14x + 45"),
        (IRRATIONAL, "x^2 - 9x + 7"),
        (CUBIC, "x^3 - 3x^2 - 75x + 225"),
        (SHARED_VAL, "x^2 - 4x + 26/9"),
    ],
)
def test_known_characteristic_polynomials(A, text):
    assert str(char_poly(A)) == text


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_identity(n):
    ident = RationalMatrix(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))
    expected = tuple((-1) ** (n - k) * comb(n, k) for k in range(n))
    assert char_poly(ident).coeffs == expected


def test_polygon_of_shared_valuation():
    pg = newton_polygon(char_poly(SHARED_VAL), FieldContext.padic(2, 20))
    assert pg.points == ((0, 1), (1, 2), (2, 0))
    assert [(str(s), h) for s, h in pg.segments] == [("-1/2", 2)]
    assert root_valuations(pg) == ((Fraction(1, 2), 2),)


def test_polygon_of_roots_5_9():
    pg = newton_polygon(char_poly(ROOTS_5_9), FieldContext.padic(3, 20))
    assert pg.segments == ((-2, 1), (0, 1))


def test_polygon_of_cubic():
    pg = newton_polygon(char_poly(CUBIC), FieldContext.padic(5, 20))
    assert sorted(root_valuations(pg)) == [(0, 1), (1, 2)]


def test_polygon_of_pure_power():
    pg = newton_polygon(CharPoly((0, 0, 0)), FieldContext.padic(3, 10))
    assert pg.segments == ()
    assert pg.vertices == ((3, 0),)
    assert pg.points[0] == (0, INF)


def test_counterexample_polygon_p2_n2():
    A = RationalMatrix(((5, 1), (1, 1)))
    f = char_poly(A)
    assert str(f) == "x^2 - 6x + 4"
    assert root_valuations(newton_polygon(f, FieldContext.padic(2, 20))) == ((1, 2),)


def test_det_bound_examples():
    ctx = FieldContext.padic(3, 20)
    cert = check_det_bound(ROOTS_5_9, ctx, 1)
    assert (cert.required, cert.observed, cert.holds) == (1, 2, True)
    ones = RationalMatrix(((1, 1, 1),) * 3)
    assert check_det_bound(ones, ctx, 5).observed is INF
    assert check_det_bound(RationalMatrix(((4,),)), ctx, 1).required == 0
    with pytest.raises(HypothesisError):
        check_det_bound(ROOTS_5_9, ctx, 2)


def test_coefficient_bound_examples():
    certs = check_coeff_bounds(char_poly(ROOTS_5_9), FieldContext.padic(3, 20), 1, 2)
    assert [(c.claim, c.observed, c.holds) for c in certs] == [
        ("coeff-bound(0)", 2, True),
        ("coeff-bound(1)", 0, True),
        ("trace-identity", 0, True),
    ]
    certs = check_coeff_bounds(char_poly(RationalMatrix(((5, 1), (1, 1)))), FieldContext.padic(2, 20), 2, 2)
    assert certs[-1].claim == "trace-identity" and certs[-1].observed == 1 and certs[-1].holds
    one = check_coeff_bounds(CharPoly((-4,)), FieldContext.padic(3, 20), 1, 1)
    assert one[0].required == 0 and one[0].holds


def test_bound_certificate_json():
    cert = check_det_bound(RationalMatrix(((1, 1), (1, 1))), FieldContext.padic(3, 20), 2)
    assert cert.to_json() == {"claim": "det-bound", "required": 2, "observed": "inf", "relation": ">=", "holds": True}


# properties

fractions = st.builds(Fraction, st.integers(-199, 199), st.integers(1, 12))


def square(n):
    return st.lists(st.lists(fractions, min_size=n, max_size=n), min_size=n, max_size=n)


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 4).flatmap(square))
def test_matches_permutation_expansion(rows):
    A = RationalMatrix(rows)
    f = char_poly(A)
    assert f.coeffs == charpoly_bruteforce(rows)
    assert f.det == det_bruteforce(rows)
    assert f.trace == sum(rows[i][i] for i in range(len(rows)))


@settings(max_examples=80, deadline=None)
@given(st.sampled_from([2, 3, 5, 7]), st.integers(1, 6).flatmap(square))
def test_polygon_invariants(p, rows):
    f = char_poly(RationalMatrix(rows))
    pg = newton_polygon(f, FieldContext.padic(p, 10))
    slopes = [s for s, _ in pg.segments]
    assert all(a < b for a, b in zip(slopes, slopes[1:]))
    for (x0, y0), (s, _) in zip(pg.vertices, pg.segments):
        for x, y in pg.points:
            if y is not INF:
                assert y >= y0 + s * (x - x0)
    zero_roots = next(i for i, v in enumerate(pg.points) if v[1] is not INF)
    assert sum(c for _, c in root_valuations(pg)) == len(rows) - zero_roots


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([2, 3, 5, 7]), st.integers(1, 6), st.integers(0, 2**32))
def test_bounds_hold_on_hypothesis_satisfying_matrices(p, n, seed):
    rng = random.Random(seed)
    ctx = FieldContext.padic(p, 24)
    ell = 2 * ctx.int_ord(n) + 1 + rng.randrange(3)
    A = sample_matrix(ctx, n, ell, rng)
    assert check_det_bound(A, ctx, ell).holds
    assert all(c.holds for c in check_coeff_bounds(char_poly(A), ctx, ell, n))
