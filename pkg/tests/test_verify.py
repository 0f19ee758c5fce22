import random

import pytest

from padic_perron import (
    CampaignConfig,
    CounterexampleSpec,
    FieldContext,
    InputError,
    build_counterexample,
    char_poly,
    run_campaign,
    verify_counterexample,
)
from padic_perron.charpoly import entries_near_one
from padic_perron.verify import choose_ell, sample_matrix


def test_build_examples():
    assert build_counterexample(CounterexampleSpec(2, 2)).entries == ((5, 1), (1, 1))
    A = build_counterexample(CounterexampleSpec(3, 3))
    assert A[0, 0] == 10 and all(A[i, j] == 1 for i in range(3) for j in range(3) if (i, j) != (0, 0))


@pytest.mark.parametrize("p, n", [(2, 3), (3, 4), (4, 4), (5, 0)])
def test_invalid_specs(p, n):
    with pytest.raises(InputError):
        CounterexampleSpec(p, n)


@pytest.mark.parametrize(
    "p, n, c_top, c_next",
    [(2, 2, -6, 4), (2, 4, -20, 48), (3, 3, -12, 18)],
)
def test_closed_forms(p, n, c_top, c_next):
    spec = CounterexampleSpec(p, n)
    f = char_poly(build_counterexample(spec))
    assert (f.coeffs[-1], f.coeffs[-2]) == (c_top, c_next)
    report = verify_counterexample(spec)
    assert report.ok, report.checks


def test_family_for_small_primes_and_dimensions():
    for p in (2, 3, 5, 7):
        for n in range(p, 9, p):
            spec = CounterexampleSpec(p, n)
            A = build_counterexample(spec)
            assert entries_near_one(A, FieldContext.padic(p, 20)) == spec.ell
            f = char_poly(A)
            assert f.coeffs[-1] == -(n + p**spec.ell)
            assert f.coeffs[-2] == (n - 1) * p**spec.ell
            assert verify_counterexample(spec).ok


def test_choose_ell_policies():
    rng = random.Random(0)
    assert choose_ell("minimal", 1, rng) == 3
    assert choose_ell("minimal-plus-one", 1, rng) == 4
    assert all(3 <= choose_ell("random-in-range", 1, rng) <= 6 for _ in range(50))


def test_sampler_rejects_hypothesis_violations():
    ctx = FieldContext.padic(2, 32)
    with pytest.raises(InputError):
        sample_matrix(ctx, 2, 2, random.Random(0))
    A = sample_matrix(ctx, 2, 3, random.Random(0))
    assert entries_near_one(A, ctx) >= 3


def test_campaign_default_example():
    report = run_campaign(CampaignConfig(primes=(3, 5, 7), max_dimension=6, trials=100, seed=42))
    assert report.passes == 100 and report.failures == []


def test_empty_campaign():
    report = run_campaign(CampaignConfig(trials=0))
    assert report.ok and report.passes == 0
    assert report.to_json()["failures"] == []


def test_campaign_p2_n2_minimal():
    cfg = CampaignConfig(primes=(2,), min_dimension=2, max_dimension=2, trials=20, ell_policy="minimal")
    assert run_campaign(cfg).passes == 20


def test_campaign_is_deterministic_and_parallel_safe():
    cfg = CampaignConfig(primes=(2, 3), trials=30, seed=7, ell_policy="random-in-range")
    a = run_campaign(cfg).to_json()
    b = run_campaign(cfg).to_json()
    c = run_campaign(CampaignConfig(primes=(2, 3), trials=30, seed=7, ell_policy="random-in-range", workers=2))
    assert a == b
    assert a["passes"] == c.passes and a["failures"] == c.failures


def test_campaign_over_laurent_series():
    cfg = CampaignConfig(primes=(3,), max_dimension=4, trials=20, precision=16, field="laurent-series")
    assert run_campaign(cfg).ok


@pytest.mark.parametrize(
    "kwargs",
    [{"ell_policy": "huge"}, {"trials": -1}, {"primes": (4,)}, {"primes": ()}, {"min_dimension": 5, "max_dimension": 3}],
)
def test_config_validation(kwargs):
    with pytest.raises(InputError):
        CampaignConfig(**kwargs)
