import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import element_residue, nullspace, power_iteration_root, residue
from padic_perron import (
    CharPoly,
    ConvergenceError,
    FieldContext,
    HenselError,
    RationalMatrix,
    ValMatrix,
    Verdict,
    analyze,
    certify_strict_max,
    char_poly,
    check_hypothesis,
    check_rescaled_hypothesis,
    dominant_eigenvector,
    lift_lambda_max,
    newton_polygon,
    projection_limit,
)
from padic_perron.perron import guard_digits
from padic_perron.verify import sample_matrix, theorem_failures

ROOTS_5_9 = RationalMatrix(((4, -5), (1, 10)))
IRRATIONAL = RationalMatrix(((8, 1), (1, 1)))
CUBIC = RationalMatrix(((6, 1, -4), (1, -4, 6), (-4, 6, 1)))
SHARED_VAL = RationalMatrix(((Fraction(5, 3), 1), (1, Fraction(7, 3))))
SHARP = RationalMatrix(((5, 1), (1, 1)))


def congruent(a, q, k):
    """a == q mod p^k, via integer residues."""
    return element_residue(a, k) == residue(q, a.ctx.p, k)


# hypothesis and strict maximality


@pytest.mark.parametrize(
    "A, p, ell, ord_n, satisfied, margin",
    [(ROOTS_5_9, 3, 1, 0, True, 1), (SHARED_VAL, 2, 1, 1, False, -1), (SHARP, 2, 2, 1, False, 0)],
)
def test_hypothesis_examples(A, p, ell, ord_n, satisfied, margin):
    h = check_hypothesis(A, FieldContext.padic(p, 20))
    assert (h.ell, h.ord_n, h.satisfied, h.margin) == (ell, ord_n, satisfied, margin)


def test_hypothesis_fails_far_from_one():
    h = check_hypothesis(RationalMatrix(((2, 1), (1, 1))), FieldContext.padic(3, 20))
    assert h.ell is None and not h.satisfied and h.margin is None


def test_rescaled_hypothesis_uses_first_entry():
    ctx = FieldContext.padic(3, 20)
    h = check_rescaled_hypothesis(ROOTS_5_9.scaled(Fraction(9, 2)), ctx)
    assert h.alpha == 18 and h.satisfied and h.ell == 1


@pytest.mark.parametrize("A, p, holds", [(ROOTS_5_9, 3, True), (SHARED_VAL, 2, False), (SHARP, 2, False), (CUBIC, 5, True)])
def test_strict_max_examples(A, p, holds):
    ctx = FieldContext.padic(p, 20)
    cert = certify_strict_max(newton_polygon(char_poly(A), ctx), ctx)
    assert cert.holds is holds
    if not holds:
        assert cert.explanation.startswith("no strictly maximal eigenvalue")


def test_strict_max_of_pure_power():
    ctx = FieldContext.padic(3, 20)
    assert not certify_strict_max(newton_polygon(CharPoly((0, 0)), ctx), ctx).holds


# lifting


def test_lift_roots_5_9():
    ctx = FieldContext.padic(3, 20)
    me = lift_lambda_max(char_poly(ROOTS_5_9), ctx, ell=1)
    assert congruent(me.lambda_max, 5, 20)
    assert me.disc_certificate is Verdict.TRUE
    assert me.hensel_history == (1, 2, 4, 8, 16)


def test_lift_irrational_root():
    ctx = FieldContext.padic(7, 30)
    f = char_poly(IRRATIONAL)
    me = lift_lambda_max(f, ctx, ell=1)
    assert element_residue(me.lambda_max, 1) == 2
    lam = element_residue(me.lambda_max, 30)
    assert (lam * lam - 9 * lam + 7) % 7**30 == 0


def test_lift_cubic():
    me = lift_lambda_max(char_poly(CUBIC), FieldContext.padic(5, 20), ell=1)
    assert congruent(me.lambda_max, 3, 20)


def test_lift_rejects_non_contracting_start():
    # x^2 - 2 over Q_7 from x0 = 0: f(0) = -2, f'(0) = 0
    with pytest.raises(HenselError):
        lift_lambda_max(CharPoly((-2, 0)), FieldContext.padic(7, 10), start=1)


# eigenvector and projection


def _pipeline(A, p, N, ell):
    ctx = FieldContext.padic(p, N)
    me = lift_lambda_max(char_poly(A), ctx, ell=ell)
    Av = ValMatrix.from_rational(A, ctx)
    return ctx, me, Av


def test_eigenvector_roots_5_9():
    ctx, me, A = _pipeline(ROOTS_5_9, 3, 20, 1)
    vec = dominant_eigenvector(A, me, 1, expected_sum_ord=0)
    assert all(v is Verdict.TRUE for v in vec.disc_certificates)
    # x is on the line of (-5, 1), scaled so that its coordinates sum to lambda
    assert (vec.x[0] + vec.x[1] * 5).is_zero()
    assert congruent(vec.x[0] + vec.x[1], 5, 20)
    assert congruent(vec.x[0], Fraction(25, 4), 20)


def test_eigenvector_cubic():
    ctx, me, A = _pipeline(CUBIC, 5, 20, 1)
    vec = dominant_eigenvector(A, me, 1, expected_sum_ord=0)
    shifted = [[CUBIC[i, j] - (3 if i == j else 0) for j in range(3)] for i in range(3)]
    (line,) = nullspace(shifted)
    for xi, li in zip(vec.x, line):
        assert congruent(xi, li, 20)
        assert element_residue(xi, 1) == 1


def test_one_by_one():
    report = analyze(RationalMatrix(((Fraction(7),),)), FieldContext.padic(3, 12))
    assert report.succeeded
    assert congruent(report.max_eigen.lambda_max, 7, 12)
    # x = (lambda / v) v with v = (1): the single coordinate is lambda itself
    assert congruent(report.eigenvector.x[0], 7, 12)
    assert report.eigenvector.disc_certificates == (Verdict.TRUE,)
    assert congruent(report.projection.P[0, 0], 1, 12)


def test_projection_roots_5_9():
    ctx, me, A = _pipeline(ROOTS_5_9, 3, 40, 1)
    res = projection_limit(A, me)
    expected = [[Fraction(5, 4), Fraction(5, 4)], [Fraction(-1, 4), Fraction(-1, 4)]]
    for i in range(2):
        for j in range(2):
            assert congruent(res.P[i, j], expected[i][j], res.certified_precision)
    assert res.diagnostics.holds


def test_projection_of_rank_one_matrix_is_immediate():
    # lambda^-1 A is already idempotent
    A = RationalMatrix(((1, 1), (1, 1)))
    ctx, me, Av = _pipeline(A, 3, 20, None)
    res = projection_limit(Av, me)
    assert res.iterations == 1


def test_projection_irrational_root_diagnostics():
    ctx, me, A = _pipeline(IRRATIONAL, 7, 30, 1)
    res = projection_limit(A, me)
    d = res.diagnostics
    assert d.holds and res.certified_precision >= 25
    assert (d.trace_value - 1).is_zero()
    # independent check: P (A - lambda) vanishes
    shifted = A - ValMatrix.identity(ctx, 2).scale(me.lambda_max)
    assert (res.P @ shifted).all_zero()


def test_projection_cap_is_reported():
    ctx, me, A = _pipeline(IRRATIONAL, 7, 30, 1)
    with pytest.raises(ConvergenceError):
        projection_limit(A, me, max_squarings=2)


def test_guard_digits_scale_with_the_norm_gap():
    ctx = FieldContext.padic(2, 20)
    A = RationalMatrix(((1, 1), (1, 1)))
    assert guard_digits(A, ctx, 0, 10) == 0
    assert guard_digits(A, ctx, 1, 10) == 2 * (10 + 2)


# analyze


def test_analyze_roots_5_9():
    report = analyze(ROOTS_5_9, FieldContext.padic(3, 20))
    assert report.finding == "strictly maximal eigenvalue certified"
    assert report.flags == ()
    assert report.projection.certified_precision >= 16


def test_analyze_irrational_root_reports_no_rational_guess():
    report = analyze(IRRATIONAL, FieldContext.padic(7, 30))
    assert report.succeeded
    assert report.to_json()["lambda_max"]["rational_guess"] is None


def test_analyze_shared_valuation_is_a_finding():
    report = analyze(SHARED_VAL, FieldContext.padic(2, 20))
    assert not report.hypothesis.satisfied
    assert report.finding == "no strictly maximal eigenvalue"
    assert report.root_valuations == ((Fraction(1, 2), 2),)
    assert report.max_eigen is None


def test_analyze_polygon_only_certificate():
    # not near 1 in any disc, but the polygon still isolates a unit root
    A = RationalMatrix(((1, 3), (3, 0)))
    report = analyze(A, FieldContext.padic(3, 16))
    assert report.succeeded
    assert "polygon certificate only" in report.flags[0]


def test_analyze_is_deterministic():
    a = analyze(CUBIC, FieldContext.padic(5, 20)).to_json()
    b = analyze(CUBIC, FieldContext.padic(5, 20)).to_json()
    assert a == b


def test_analyze_laurent_instance():
    ctx = FieldContext.laurent(3, 16)
    t = ctx.parse_scalar("t")
    A = RationalMatrix(((1 + t, 1 + 2 * t * t), (1 + t * t * t, 1 + t)))
    report = analyze(A, ctx)
    assert report.succeeded and theorem_failures(report) == []
    lam = report.max_eigen.lambda_max
    assert lam.valuation == 0 and lam.unit[0] == 2


# properties


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([2, 3, 5, 7]), st.integers(2, 5), st.integers(0, 2**32))
def test_theorem_conclusions_on_random_matrices(p, n, seed):
    rng = random.Random(seed)
    ctx = FieldContext.padic(p, 24)
    ell = 2 * ctx.int_ord(n) + 1 + rng.randrange(2)
    A = sample_matrix(ctx, n, ell, rng)
    report = analyze(A, ctx)
    assert theorem_failures(report) == []
    assert report.max_eigen.valuation == ctx.int_ord(n)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([3, 5, 7]), st.integers(2, 4), st.integers(0, 2**32))
def test_power_iteration_agrees_with_hensel(p, n, seed):
    rng = random.Random(seed)
    ctx = FieldContext.padic(p, 20)
    ell = 2 * ctx.int_ord(n) + 1
    A = sample_matrix(ctx, n, ell, rng)
    if ctx.int_ord(n):
        return  # lambda is not a unit; the integer oracle needs a unit ratio
    me = analyze(A, ctx).max_eigen
    rows = [[int(x) for x in row] for row in A]
    k = min(me.lambda_max.absprec, 16)
    assert power_iteration_root(rows, p, k, 40) == element_residue(me.lambda_max, k)


@settings(max_examples=20, deadline=None)
@given(st.sampled_from([3, 5, 7]), st.integers(2, 4), st.integers(0, 2**32))
def test_scale_equivariance(p, n, seed):
    rng = random.Random(seed)
    ctx = FieldContext.padic(p, 20)
    A = sample_matrix(ctx, n, 2 * ctx.int_ord(n) + 1, rng)
    alpha = Fraction(rng.choice([1, -1]) * rng.randint(1, 50) * p ** rng.randint(0, 2), rng.randint(1, 9))
    base, scaled = analyze(A, ctx), analyze(A.scaled(alpha), ctx)
    assert scaled.succeeded
    k = min(base.projection.certified_precision, scaled.projection.certified_precision)
    lam_a = ctx.embed(alpha) * base.max_eigen.lambda_max
    assert (lam_a - scaled.max_eigen.lambda_max).absprec >= min(lam_a.absprec, scaled.max_eigen.lambda_max.absprec)
    assert (lam_a - scaled.max_eigen.lambda_max).is_zero()
    for x, y in zip(base.projection.P.entries(), scaled.projection.P.entries()):
        assert (x - y).is_zero() and (x - y).absprec >= k
