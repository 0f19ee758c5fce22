"""Dominant eigenvalue, eigenvector and limit projection for matrices near 1.

The pipeline: read the hypothesis (entries in D(1, |pi|^l) with
l > 2 ord(n)), certify a simple strictly maximal root on the Newton polygon
of the exact characteristic polynomial, Newton-lift that root starting
from n, normalize a kernel vector of A - lambda I so its coordinates sit
near 1, and square lambda^-1 A until it stops moving.
"""

import math
from dataclasses import dataclass, field, replace
from typing import Optional

from .charpoly import (
    char_poly,
    check_coeff_bounds,
    check_det_bound,
    entries_near_one,
    newton_polygon,
    root_valuations,
)
from .errors import CertificationError, ConvergenceError, HenselError, PrecisionError
from .field import INF, Disc, Verdict, in_disc, ord_pi, rational_guess, render, valuation_json
from .linalg import ValMatrix, ValVector, common_disc_radius, solve_kernel

DEFAULT_MAX_SQUARINGS = 64
GUESS_HEIGHT = 10**6


@dataclass(frozen=True)
class HypothesisReport:
    """Where the entries sit relative to a center ``alpha`` (1 unless rescaled).

    ``ell`` is the largest l with every entry in D(alpha, |alpha| |pi|^l),
    or None when some entry is outside D(alpha, |alpha| |pi|).
    """

    ell: object
    ord_n: object
    satisfied: bool
    margin: object
    alpha: object = 1

    def to_json(self):
        return {
            "ell": None if self.ell is None else valuation_json(self.ell),
            "ord_n": valuation_json(self.ord_n),
            "satisfied": self.satisfied,
            "margin": None if self.margin is None else valuation_json(self.margin),
            "alpha": str(self.alpha),
        }


def _hypothesis(ell, ord_n, alpha):
    if ell is not None and ell < 1:
        ell = None
    satisfied = ell is not None and ell > 2 * ord_n
    if ell is None or ord_n is INF:
        margin = None
    else:
        margin = ell - 2 * ord_n
    return HypothesisReport(ell, ord_n, satisfied, margin, alpha)


def check_hypothesis(A, ctx):
    """Read l = min ord(a_ij - 1) and compare it with 2 ord(n)."""
    return _hypothesis(entries_near_one(A, ctx), ctx.int_ord(A.n), 1)


def check_rescaled_hypothesis(A, ctx, alpha=None):
    """Hypothesis for alpha^-1 A, with alpha the first nonzero entry by default.

    Returns None if every entry is zero.
    """
    if alpha is None:
        alpha = next((x for row in A for x in row if x), None)
        if alpha is None:
            return None
    alpha = ctx.exact(alpha)
    return _hypothesis(common_disc_radius(A, alpha, ctx), ctx.int_ord(A.n), alpha)


@dataclass(frozen=True)
class StrictMaxCertificate:
    holds: bool
    explanation: str
    top_valuation: object = None  # valuation of the certified root

    def to_json(self):
        return {
            "holds": self.holds,
            "explanation": self.explanation,
            "top_valuation": None if self.top_valuation is None else str(self.top_valuation),
        }


def certify_strict_max(pg, ctx, ell=None, n=None):
    """Decide from the polygon whether f has a simple root strictly larger than all others.

    That happens exactly when the rightmost segment has length 1, i.e. when
    every point (i, ord c_i), i <= n-2, lies strictly above the line through
    (n-1, ord c_{n-1}) and (n, 0).
    """
    if not pg.segments:
        return StrictMaxCertificate(False, "no segments: every root is 0")
    slopes = [s for s, _ in pg.segments]
    slope, length = pg.segments[-1]
    listing = " < ".join(str(s) for s in slopes)
    if length != 1:
        return StrictMaxCertificate(
            False,
            f"no strictly maximal eigenvalue: slopes {listing}; the rightmost segment has "
            f"length {length}, so {length} roots share valuation {-slope}",
        )
    deg = pg.degree
    top = pg.points[deg - 1][1]
    below = [
        i for i, v in pg.points[: deg - 1] if v is not INF and not v > top * (deg - i)
    ]
    if below:
        return StrictMaxCertificate(
            False, f"points {below} are on or below the line y = {top}*({deg} - x)"
        )
    text = (
        f"slopes {listing}; the rightmost segment has length 1 and slope {slope}; "
        f"every point left of x = {deg - 1} lies strictly above y = {top}*({deg} - x)"
    )
    if ell is not None and n is not None:
        ord_n = ctx.int_ord(n)
        if ell > 2 * ord_n:
            text += f"; ord(n) = {ord_n} < l/2 = {ell}/2 as required"
    return StrictMaxCertificate(True, text, -slope)


@dataclass(frozen=True)
class MaxEigen:
    lambda_max: object
    certified_simple: bool
    valuation: int
    residual: object  # Valuation of f(lambda_max)
    disc: Optional[Disc] = None
    disc_certificate: Optional[Verdict] = None
    hensel_history: tuple = ()

    def to_json(self):
        out = self.lambda_max.to_json()
        out.update(
            {
                "disc_certified": self.disc_certificate is Verdict.TRUE,
                "disc_verdict": None if self.disc_certificate is None else self.disc_certificate.value,
                "residual_ord": self.residual.to_json(),
                "digits": render(self.lambda_max, "digits"),
                "rational_guess": _guess(self.lambda_max),
                "hensel_history": list(self.hensel_history),
            }
        )
        return out


def _guess(x):
    q = rational_guess(x, GUESS_HEIGHT)
    return None if q is None else str(q)


def _horner(coeffs, x):
    acc = coeffs[-1]
    for c in reversed(coeffs[:-1]):
        acc = acc * x + c
    return acc


def lift_lambda_max(f, ctx, *, start=None, ell=None, alpha=1, max_steps=256):
    """Newton-lift the strictly maximal root of f, starting from ``start`` (default alpha*n).

    Each step must strictly increase ord f(x); otherwise HenselError.  The
    returned root is truncated to the precision the final residual certifies:
    ord(lambda - x) >= ord f(x) - ord f'(x).
    """
    n = f.degree
    if start is None:
        start = ctx.exact(alpha) * n
    coeffs = [ctx.embed(c) for c in f.all_coeffs()]
    dcoeffs = [ctx.embed(c) for c in f.derivative_coeffs()]
    x = ctx.embed(start)
    x0 = x
    history = []
    for _ in range(max_steps):
        fx = _horner(coeffs, x)
        if fx.unit is None:
            break
        history.append(fx.valuation)
        if len(history) >= 2 and history[-1] <= history[-2]:
            raise HenselError(
                f"Newton iteration is not contracting: ord f(x_k) = {history}; "
                f"ord f(x0) = {ord_pi(_horner(coeffs, x0))}, ord f'(x0) = {ord_pi(_horner(dcoeffs, x0))}"
            )
        dfx = _horner(dcoeffs, x)
        if dfx.unit is None:
            raise HenselError(f"f'(x) vanishes at precision after {len(history)} steps")
        x = x - fx / dfx
    else:
        raise PrecisionError(f"Newton iteration did not reach working precision in {max_steps} steps")
    dfx = _horner(dcoeffs, x)
    if dfx.unit is None:
        raise HenselError("f'(lambda) vanishes at precision: root is not certified simple")
    certified = min(x.absprec, fx.absprec - dfx.valuation)
    lam = x.truncate(certified)
    if lam.unit is None:
        raise PrecisionError("precision exhausted: the lifted root is zero at its certified precision")
    disc = verdict = None
    if ell is not None:
        disc = eigenvalue_disc(ctx, n, ell, alpha)
        if disc is not None:
            verdict = in_disc(lam, Disc(ctx.embed(disc.center), disc.radius))
    return MaxEigen(lam, True, lam.valuation, ord_pi(fx), disc, verdict, tuple(history))


def eigenvalue_disc(ctx, n, ell, alpha=1):
    """D(alpha n, |alpha| |pi|^l / |n|) as a Disc, or None when ord(n) is infinite."""
    ord_n = ctx.int_ord(n)
    if ord_n is INF:
        return None
    alpha = ctx.exact(alpha)
    return Disc(alpha * n, ctx.exact_ord(alpha) + ell - ord_n)


@dataclass(frozen=True)
class PerronEigenvector:
    x: ValVector
    kernel_vector: ValVector
    coordinate_sum: object
    factor: object
    disc_certificates: Optional[tuple] = None
    residual: object = None

    def to_json(self):
        return {
            "x": self.x.to_json(),
            "kernel_vector": self.kernel_vector.to_json(),
            "coordinate_sum": self.coordinate_sum.to_json(),
            "factor": self.factor.to_json(),
            "disc_certified": None
            if self.disc_certificates is None
            else all(v is Verdict.TRUE for v in self.disc_certificates),
            "disc_verdicts": None
            if self.disc_certificates is None
            else [v.value for v in self.disc_certificates],
            "residual_ord": self.residual.to_json(),
        }


def dominant_eigenvector(A, me, ell=None, *, alpha=1, expected_sum_ord=None):
    """lambda_max-eigenvector x = (lambda_max / (alpha v)) v with v a normalized kernel vector.

    ``v`` has its first max-abs coordinate equal to 1 and ``v`` in the formula
    is the sum of its coordinates.  When ``ell`` is given every x_i is tested
    against D(1, |pi|^l / |n|).  ``expected_sum_ord`` (ord n under the
    hypothesis) is enforced: a mismatch raises CertificationError.
    """
    ctx = A.ctx
    n = A.n
    lam = me.lambda_max
    M = A - ValMatrix.identity(ctx, n).scale(lam)
    v = solve_kernel(M)
    total = ctx.zero()
    for vi in v:
        total = total + vi
    if total.unit is None:
        raise CertificationError(f"eigenvector coordinates sum to zero at precision ({render(total)})")
    if expected_sum_ord is not None and total.valuation != expected_sum_ord:
        raise CertificationError(
            f"|sum of eigenvector coordinates| has ord {total.valuation}, expected ord(n) = {expected_sum_ord}"
        )
    factor = lam / (ctx.embed(alpha) * total)
    x = v.scale(factor)
    return _certify_eigenvector(A, lam, x, v, total, factor, ell)


def _certify_eigenvector(A, lam, x, v, total, factor, ell):
    ctx = A.ctx
    verdicts = None
    if ell is not None:
        ord_n = ctx.int_ord(A.n)
        if ord_n is not INF:
            disc = Disc(ctx.one, ell - ord_n)
            verdicts = tuple(in_disc(xi, disc) for xi in x)
    residual = (A @ x - x.scale(lam)).norm()
    if residual.exact and residual.value is not INF:
        raise CertificationError(f"A x - lambda x has a nonzero entry of valuation {residual.value}")
    return PerronEigenvector(x, v, total, factor, verdicts, residual)


@dataclass(frozen=True)
class ProjectionDiagnostics:
    idempotency: object  # Valuation of P^2 - P
    eigen: object  # Valuation of A P - lambda P
    trace: object  # Valuation of trace(P) - 1
    trace_value: object
    certified_precision: object
    holds: bool

    def to_json(self):
        return {
            "idempotency_defect_ord": self.idempotency.to_json(),
            "eigen_defect_ord": self.eigen.to_json(),
            "trace_defect_ord": self.trace.to_json(),
            "trace": self.trace_value.to_json(),
            "certified_precision": valuation_json(self.certified_precision),
            "holds": self.holds,
        }


@dataclass(frozen=True)
class ProjectionResult:
    P: ValMatrix
    iterations: int
    certified_precision: object
    diagnostics: ProjectionDiagnostics
    defect_history: tuple = field(default=())

    def to_json(self):
        return {
            "entries": self.P.to_json(),
            "iterations": self.iterations,
            "certified_precision": valuation_json(self.certified_precision),
            "diagnostics": self.diagnostics.to_json(),
            "defect_history": [str(v) for v in self.defect_history],
        }


def projection_diagnostics(A, lam, P):
    """Check P^2 = P, A P = lambda P and trace P = 1 at the precision arithmetic can certify.

    Each defect is computed with tracked precision.  A defect that is zero
    at precision contributes its bound to the certified precision; a defect
    with a genuine nonzero digit makes ``holds`` false.
    """
    idem = (P @ P - P).norm()
    eig = (A @ P - P.scale(lam)).norm()
    tr = P.trace()
    tr_defect = ord_pi(tr - 1)
    defects = (idem, eig, tr_defect)
    holds = all(not (d.exact and d.value is not INF) for d in defects)
    certified = min([P.min_absprec()] + [d.value for d in defects if not d.exact])
    return ProjectionDiagnostics(idem, eig, tr_defect, tr, certified, holds)


def projection_limit(A, me, max_squarings=DEFAULT_MAX_SQUARINGS):
    """lim (lambda^-1 A)^k by repeated squaring, stopping once S^2 = S at precision."""
    lam = me.lambda_max
    S = A.scale(lam.inverse())
    history = []
    for k in range(1, max_squarings + 1):
        S2 = S @ S
        D = S2 - S
        history.append(D.norm())
        S = S2
        if D.all_zero():
            break
    else:
        raise ConvergenceError(
            f"(lambda^-1 A)^(2^k) did not stabilize within {max_squarings} squarings; "
            f"defect valuations {[str(v) for v in history]}"
        )
    diag = projection_diagnostics(A, lam, S)
    return ProjectionResult(S, k, diag.certified_precision, diag, tuple(history))


def guard_digits(A, ctx, top_valuation, max_squarings=DEFAULT_MAX_SQUARINGS):
    """Extra working digits so squaring lambda^-1 A keeps N certified digits.

    ``lambda^-1 A`` has norm |pi|^-s with s = ord(lambda) - ord ||A||, and each
    squaring may cost up to 2 s digits; the Newton lift and the elimination
    lose at most about (n-1) s more.
    """
    norm = min(ctx.exact_ord(x) for row in A for x in row)
    if norm is INF:
        return 0
    s = max(0, top_valuation - norm)
    return math.ceil(2 * s * (max_squarings + A.n))


@dataclass(frozen=True)
class PerronReport:
    ctx: object
    matrix: object
    hypothesis: HypothesisReport
    rescaled: Optional[HypothesisReport]
    charpoly: object
    polygon: object
    root_valuations: tuple
    strict_max: StrictMaxCertificate
    certificates: tuple
    max_eigen: Optional[MaxEigen] = None
    eigenvector: Optional[PerronEigenvector] = None
    projection: Optional[ProjectionResult] = None
    finding: str = ""
    flags: tuple = ()

    @property
    def succeeded(self):
        return self.max_eigen is not None

    def to_json(self):
        ctx = self.ctx
        return {
            "field": {"kind": ctx.kind, "p": ctx.p, "precision": ctx.precision, "name": ctx.name},
            "matrix": self.matrix.to_json(),
            "finding": self.finding,
            "flags": list(self.flags),
            "hypothesis": self.hypothesis.to_json(),
            "rescaled_hypothesis": None if self.rescaled is None else self.rescaled.to_json(),
            "charpoly": self.charpoly.to_json(),
            "charpoly_text": str(self.charpoly),
            "polygon": self.polygon.to_json(),
            "root_valuations": [{"valuation": str(v), "count": c} for v, c in self.root_valuations],
            "strict_max": self.strict_max.to_json(),
            "lambda_max": None if self.max_eigen is None else self.max_eigen.to_json(),
            "eigenvector": None if self.eigenvector is None else self.eigenvector.to_json(),
            "projection": None if self.projection is None else self.projection.to_json(),
            "certificates": [c.to_json() for c in self.certificates],
        }


def analyze(A, ctx, max_squarings=DEFAULT_MAX_SQUARINGS):
    """Run the whole pipeline on an exact matrix.  Failure to find a dominant
    eigenvalue is a finding in the report, not an exception."""
    n = A.n
    hyp = check_hypothesis(A, ctx)
    f = char_poly(A)
    pg = newton_polygon(f, ctx)
    roots = root_valuations(pg)
    certs = ()
    if hyp.ell is not None:
        certs = (check_det_bound(A, ctx, hyp.ell), *check_coeff_bounds(f, ctx, hyp.ell, n))

    active = hyp if hyp.satisfied else None
    rescaled = None
    if active is None:
        rescaled = check_rescaled_hypothesis(A, ctx)
        if rescaled is not None and rescaled.satisfied:
            active = rescaled
    strict = certify_strict_max(pg, ctx, None if active is None else active.ell, n)
    report = PerronReport(ctx, A, hyp, rescaled, f, pg, roots, strict, certs)
    if not strict.holds:
        return replace(report, finding="no strictly maximal eigenvalue")

    flags = []
    if active is None:
        flags.append("theorem hypothesis not satisfied; polygon certificate only")
        alpha, ell, start, expected = 1, None, -f.coeffs[-1], None
    else:
        if active is rescaled:
            flags.append(f"theorem hypothesis satisfied after rescaling by {active.alpha}")
        alpha, ell, start, expected = active.alpha, active.ell, None, active.ord_n

    work = ctx.with_precision(ctx.precision + guard_digits(A, ctx, strict.top_valuation, max_squarings))
    me_w = lift_lambda_max(f, work, start=start, ell=ell, alpha=alpha)
    A_w = ValMatrix.from_rational(A, work)
    vec_w = dominant_eigenvector(A_w, me_w, ell, alpha=alpha, expected_sum_ord=expected)
    proj_w = projection_limit(A_w, me_w, max_squarings)

    # report everything at the caller's precision, re-certified there
    A_n = ValMatrix.from_rational(A, ctx)
    lam = me_w.lambda_max.reduce_to(ctx)
    verdict = None
    if me_w.disc is not None:
        verdict = in_disc(lam, Disc(ctx.embed(me_w.disc.center), me_w.disc.radius))
    me = replace(me_w, lambda_max=lam, disc_certificate=verdict)
    vec = _certify_eigenvector(
        A_n,
        lam,
        vec_w.x.reduce_to(ctx),
        vec_w.kernel_vector.reduce_to(ctx),
        vec_w.coordinate_sum.reduce_to(ctx),
        vec_w.factor.reduce_to(ctx),
        ell,
    )
    P = proj_w.P.reduce_to(ctx)
    diag = projection_diagnostics(A_n, lam, P)
    proj = ProjectionResult(P, proj_w.iterations, diag.certified_precision, diag, proj_w.defect_history)
    return replace(
        report,
        max_eigen=me,
        eigenvector=vec,
        projection=proj,
        finding="strictly maximal eigenvalue certified",
        flags=tuple(flags),
    )
