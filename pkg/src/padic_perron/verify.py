"""The sharpness family at l = 2 ord(n), and randomized verification campaigns."""

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from .charpoly import (
    CharPoly,
    char_poly,
    check_coeff_bounds,
    check_det_bound,
    entries_near_one,
    newton_polygon,
    root_valuations,
)
from .errors import InputError, PerronError
from .field import INF, LAURENT, PADIC, FieldContext, Verdict, int_ord, is_prime
from .laurent import RationalFunction
from .linalg import RationalMatrix, det_exact
from .perron import DEFAULT_MAX_SQUARINGS, analyze, certify_strict_max, check_hypothesis


@dataclass(frozen=True)
class CounterexampleSpec:
    """All-ones n x n matrix over Q_p with 1 + p^l in the corner, l = 2 ord_p(n)."""

    p: int
    n: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise InputError(f"{self.p} is not prime")
        if not isinstance(self.n, int) or self.n < 1 or self.n % self.p:
            raise InputError(f"the family needs p | n; got p={self.p}, n={self.n}")

    @property
    def ell(self):
        return 2 * int_ord(self.n, self.p)

    @property
    def expected_c_top(self):
        return -(self.n + self.p**self.ell)

    @property
    def expected_c_next(self):
        return (self.n - 1) * self.p**self.ell

    @property
    def expected_root_ord(self):
        return Fraction(self.ell, 2)


def build_counterexample(spec):
    n, corner = spec.n, 1 + spec.p**spec.ell
    return RationalMatrix(
        tuple(tuple(Fraction(corner if i == j == 0 else 1) for j in range(n)) for i in range(n))
    )


@dataclass(frozen=True)
class CounterexampleReport:
    spec: CounterexampleSpec
    charpoly: CharPoly
    checks: dict
    root_valuations: tuple

    @property
    def ok(self):
        return all(self.checks.values())

    def to_json(self):
        return {
            "p": self.spec.p,
            "n": self.spec.n,
            "ell": self.spec.ell,
            "charpoly": self.charpoly.to_json(),
            "charpoly_text": str(self.charpoly),
            "expected_c_top": str(self.spec.expected_c_top),
            "expected_c_next": str(self.spec.expected_c_next),
            "quadratic_root_valuations": [
                {"valuation": str(v), "count": c} for v, c in self.root_valuations
            ],
            "checks": dict(self.checks),
            "ok": self.ok,
        }


def verify_counterexample(spec, precision=32):
    ctx = FieldContext.padic(spec.p, precision)
    A = build_counterexample(spec)
    n = spec.n
    f = char_poly(A)
    c = f.coeffs
    checks = {}
    checks["entries_in_disc_exactly_ell"] = entries_near_one(A, ctx) == spec.ell
    checks["c_top_matches"] = c[n - 1] == spec.expected_c_top
    checks["c_next_matches"] = n < 2 or c[n - 2] == spec.expected_c_next
    checks["lower_coefficients_zero"] = all(x == 0 for x in c[: max(n - 2, 0)])
    roots = ()
    if n >= 2:
        g = CharPoly((c[n - 2], c[n - 1]))
        roots = root_valuations(newton_polygon(g, ctx))
        checks["quadratic_roots_share_valuation"] = roots == ((spec.expected_root_ord, 2),)
        checks["quadratic_roots_distinct"] = c[n - 1] ** 2 - 4 * c[n - 2] != 0
    checks["strict_max_refuted"] = not certify_strict_max(newton_polygon(f, ctx), ctx).holds
    hyp = check_hypothesis(A, ctx)
    checks["hypothesis_margin_zero"] = hyp.margin == 0 and not hyp.satisfied
    return CounterexampleReport(spec, f, checks, roots)


ELL_POLICIES = ("minimal", "minimal-plus-one", "random-in-range")


@dataclass(frozen=True)
class CampaignConfig:
    primes: tuple = (3, 5, 7)
    max_dimension: int = 6
    trials: int = 100
    seed: int = 42
    ell_policy: str = "minimal"
    precision: int = 32
    min_dimension: int = 2
    field: str = PADIC
    max_squarings: int = DEFAULT_MAX_SQUARINGS
    workers: int = 1

    def __post_init__(self):
        if self.ell_policy not in ELL_POLICIES:
            raise InputError(f"unknown l-policy {self.ell_policy!r}; choose from {ELL_POLICIES}")
        if self.trials < 0:
            raise InputError("trials must be >= 0")
        if not self.primes or not all(is_prime(p) for p in self.primes):
            raise InputError(f"primes must be a nonempty list of primes: {self.primes}")
        if self.min_dimension < 1 or self.max_dimension < self.min_dimension:
            raise InputError("need 1 <= min_dimension <= max_dimension")

    def to_json(self):
        out = asdict(self)
        out["primes"] = list(self.primes)
        return out


def choose_ell(policy, ord_n, rng):
    """Smallest admissible l is 2 ord(n) + 1."""
    base = 2 * ord_n + 1
    if policy == "minimal":
        return base
    if policy == "minimal-plus-one":
        return base + 1
    return rng.randint(base, base + 3)


def sample_matrix(ctx, n, ell, rng):
    """Entries 1 + pi^l a with a uniform among residues mod pi^(N - l)."""
    ord_n = ctx.int_ord(n)
    if not ell > 2 * ord_n:
        raise InputError(f"l = {ell} violates l > 2 ord(n) = {2 * ord_n}")
    p = ctx.p
    digits = max(ctx.precision - ell, 1)
    if ctx.kind == PADIC:
        scale, bound = p**ell, p**digits
        return RationalMatrix(
            tuple(tuple(Fraction(1 + scale * rng.randrange(bound)) for _ in range(n)) for _ in range(n))
        )
    head = (1,) + (0,) * (ell - 1)
    return RationalMatrix(
        tuple(
            tuple(RationalFunction(p, head + tuple(rng.randrange(p) for _ in range(digits))) for _ in range(n))
            for _ in range(n)
        )
    )


def lemma_failures(A, ctx, ell, f=None):
    """Names of failed bound certificates (det bound, coefficient bounds, trace identity)."""
    f = f or char_poly(A)
    certs = [check_det_bound(A, ctx, ell), *check_coeff_bounds(f, ctx, ell, A.n)]
    return [c.claim for c in certs if not c.holds]


def theorem_failures(report):
    """Names of failed conclusions for a report whose input satisfies the hypothesis."""
    failed = []
    A, ctx = report.matrix, report.ctx
    f = report.charpoly
    if det_exact(A) != f.det:
        failed.append("det-equals-signed-c0")
    if sum(A[i, i] for i in range(A.n)) != f.trace:
        failed.append("trace-equals-minus-c_top")
    if not report.hypothesis.satisfied:
        failed.append("hypothesis")
    failed.extend(c.claim for c in report.certificates if not c.holds)
    if not report.strict_max.holds or report.max_eigen is None:
        failed.append("strict-max")
        return failed
    me, vec, proj = report.max_eigen, report.eigenvector, report.projection
    if me.valuation != report.hypothesis.ord_n:
        failed.append("lambda-valuation")
    if me.disc_certificate is not Verdict.TRUE:
        failed.append("lambda-in-disc")
    if vec.disc_certificates is None or not all(v is Verdict.TRUE for v in vec.disc_certificates):
        failed.append("eigenvector-in-disc")
    if vec.residual.exact and vec.residual.value is not INF:
        failed.append("eigen-equation")
    d = proj.diagnostics
    cert = proj.certified_precision
    for name, val in (("idempotent", d.idempotency), ("AP=lambdaP", d.eigen), ("trace=1", d.trace)):
        if val.exact and val.value is not INF or val.value < cert:
            failed.append(name)
    if cert <= 0:
        failed.append("certified-precision")
    return failed


@dataclass
class CampaignReport:
    config: CampaignConfig
    passes: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.failures

    def to_json(self):
        return {"config": self.config.to_json(), "passes": self.passes, "failures": list(self.failures)}


def _trial_plan(cfg):
    rng = random.Random(cfg.seed)
    plan = []
    for index in range(cfg.trials):
        p = rng.choice(cfg.primes)
        dims = list(range(cfg.min_dimension, cfg.max_dimension + 1))
        if cfg.field == LAURENT:
            dims = [d for d in dims if d % p] or [1]
        n = rng.choice(dims)
        plan.append((index, p, n, rng.getrandbits(64)))
    return plan


def run_trial(cfg, index, p, n, seed):
    """One campaign trial; returns None on success or a failure record."""
    rng = random.Random(seed)
    ctx = FieldContext(cfg.field, p, cfg.precision)
    ell = choose_ell(cfg.ell_policy, ctx.int_ord(n), rng)
    A = sample_matrix(ctx, n, ell, rng)
    try:
        report = analyze(A, ctx, cfg.max_squarings)
        failed = lemma_failures(A, ctx, ell, report.charpoly) + theorem_failures(report)
    except PerronError as exc:
        failed = [f"{type(exc).__name__}: {exc}"]
    if not failed:
        return None
    return {
        "trial": index,
        "seed": seed,
        "p": p,
        "n": n,
        "ell": ell,
        "matrix": A.to_json(),
        "failed_check": ", ".join(dict.fromkeys(failed)),
    }


def _run_packed(args):
    return run_trial(*args)


def run_campaign(cfg):
    """Sample hypothesis-satisfying matrices and check every certified conclusion.

    Deterministic in ``cfg.seed``; results are ordered by trial index
    whether or not trials run in parallel.
    """
    plan = _trial_plan(cfg)
    jobs = [(cfg, *item) for item in plan]
    if cfg.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_run_packed, jobs, chunksize=8))
    else:
        results = [_run_packed(job) for job in jobs]
    report = CampaignReport(cfg)
    for res in results:
        if res is None:
            report.passes += 1
        else:
            report.failures.append(res)
    return report
