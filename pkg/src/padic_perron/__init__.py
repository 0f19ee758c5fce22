"""Perron-Frobenius certificates for matrices near the all-ones matrix over Q_p and F_p((t))."""

from .charpoly import (
    BoundCertificate,
    CharPoly,
    NewtonPolygon,
    char_poly,
    check_coeff_bounds,
    check_det_bound,
    newton_polygon,
    root_valuations,
)
from .errors import (
    CertificationError,
    ContextError,
    ConvergenceError,
    HenselError,
    HypothesisError,
    InexactZeroError,
    InputError,
    PerronError,
    PrecisionError,
)
from .field import (
    INF,
    LAURENT,
    PADIC,
    Disc,
    FieldContext,
    Valuation,
    ValuedElement,
    Verdict,
    embed_rational,
    in_disc,
    ord_pi,
    rational_guess,
    render,
)
from .laurent import RationalFunction, parse_rational_function
from .linalg import RationalMatrix, ValMatrix, ValVector, parse_matrix, rescale_to_unit_disc, solve_kernel
from .perron import (
    PerronReport,
    analyze,
    certify_strict_max,
    check_hypothesis,
    check_rescaled_hypothesis,
    dominant_eigenvector,
    lift_lambda_max,
    projection_limit,
)
from .verify import (
    CampaignConfig,
    CounterexampleSpec,
    build_counterexample,
    run_campaign,
    verify_counterexample,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
