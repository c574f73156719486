"""Verification checks and the spectral-regime classifier."""

import json
import math

import numpy as np
import pytest

from lieb_spectra.arithmetic import Flux
from lieb_spectra.operators import GeneralParams, LiebParams, build_lieb_2d_torus
from lieb_spectra.verify import (
    Regime,
    check_gap_bound,
    check_mapping,
    check_mapping_round_trip,
    check_reduction_identity,
    check_symmetry,
    classify_regime,
    reports_to_json,
    weyl_zero_residual,
)

GOLDEN = Flux.named("golden")


def test_reduction_identity_passes():
    r = check_reduction_identity(LiebParams(alpha=GOLDEN, theta=0.13, t=0.5), 50)
    assert r.passed and r.measured <= 1e-13
    r0 = check_reduction_identity(
        LiebParams(alpha=Flux.rational(0, 1), theta=0.0, t=1.0), 10
    )
    assert r0.passed and r0.measured <= 1e-14
    # the truncated first row documents the boundary correction
    assert r0.details["boundary_row_diff"] == pytest.approx(1.0, abs=1e-12)


def test_symmetry_exact_everywhere():
    assert check_symmetry(LiebParams(alpha=GOLDEN, theta=0.3, t=0.9), 25).passed
    assert check_symmetry(
        GeneralParams(alpha=GOLDEN, theta=0.1, t2=0.7, t3=1.3, t4=0.9), 25
    ).passed
    torus = build_lieb_2d_torus(1, 3, 1.1, 3, 3)
    r = check_symmetry(torus)
    assert r.passed and r.measured == 0.0


def test_weyl_residual_examples():
    params = LiebParams(alpha=GOLDEN, theta=0.0, t=1.0)
    r = weyl_zero_residual(params, 10)
    assert r.passed and r.measured < 0.1
    assert r.details["m"] == 17
    half = weyl_zero_residual(LiebParams(alpha=GOLDEN, theta=0.5, t=1.0), 7)
    assert half.details["m"] == 0
    assert half.measured < 1e-15


def test_weyl_residual_minimal_and_decreasing():
    from lieb_spectra.arithmetic import torus_norm

    params = LiebParams(alpha=GOLDEN, theta=0.0, t=1.0)
    a = GOLDEN.float_value()
    residuals = []
    for k in (10, 100, 1000):
        r = weyl_zero_residual(params, k)
        assert r.passed
        m, eps = r.details["m"], r.details["eps"]
        # minimality: no smaller site reaches the near-half target
        for j in range(m):
            assert torus_norm(j * a - 0.5) >= eps
        residuals.append(r.measured)
    assert residuals[0] > residuals[1] > residuals[2]


def test_mapping_checks():
    r = check_mapping(1, 2, 1.0)
    assert r.passed and r.measured <= 1e-9
    assert check_mapping(2, 5, 0.8, grid=48).passed


def test_mapping_round_trip():
    energies = np.linspace(-5.1, 5.1, 31)
    r = check_mapping_round_trip(0.8, energies)
    assert r.passed and r.measured <= 1e-12


def test_gap_bound_examples():
    r = check_gap_bound(1, 2, 1.0)
    assert r.passed
    assert r.measured == pytest.approx(4 - 2 * math.sqrt(2), abs=1e-9)
    r0 = check_gap_bound(0, 1, 2.0)
    assert r0.passed and r0.measured == pytest.approx(0.0, abs=1e-9)
    assert check_gap_bound(1, 3, 4.0).passed


def test_classifier_truth_table():
    sc_flux = Flux.from_quotients([1] * 8 + [int(np.round(np.exp(102.0)))])
    cases = [
        (GOLDEN, 0.0, LiebParams(alpha=GOLDEN, theta=0.0, t=0.5), Regime.LOCALIZED),
        (sc_flux, 0.0, LiebParams(alpha=sc_flux, theta=0.0, t=0.5), Regime.SINGULAR_CONTINUOUS),
        (Flux.named("silver"), 0.2, LiebParams(alpha=Flux.named("silver"), theta=0.2, t=2.0),
         Regime.ABSOLUTELY_CONTINUOUS),
        (Flux.named("e2"), 0.3, LiebParams(alpha=Flux.named("e2"), theta=0.3, t=1.0),
         Regime.CRITICAL),
        (GOLDEN, 0.0, GeneralParams(alpha=GOLDEN, theta=0.0, t2=0.7, t3=1.3, t4=0.9),
         Regime.ABSOLUTELY_CONTINUOUS),
        (GOLDEN, 0.0, GeneralParams(alpha=GOLDEN, theta=0.0, t2=0.8, t3=1.25, t4=1.0),
         Regime.CRITICAL),
    ]
    for alpha, theta, model, expected in cases:
        assert classify_regime(alpha, theta, model).regime is expected


def test_classifier_rational_flux():
    label = classify_regime(
        Flux.rational(1, 3), 0.0, LiebParams(alpha=Flux.rational(1, 3), theta=0.0, t=0.5)
    )
    assert label.regime is Regime.FLAT_BAND_ONLY
    assert "band" in label.note


def test_classifier_resonant_phase_singular():
    flux = Flux.named("e2")
    a5 = (5 * flux.float_value()) % 1.0
    theta = (1.0 - a5) / 2.0
    label = classify_regime(flux, theta, LiebParams(alpha=flux, theta=theta, t=0.5))
    assert label.regime is Regime.SINGULAR_CONTINUOUS
    assert math.isinf(label.gamma_hat)


def test_classifier_phase_sign_invariance():
    for theta in (0.17, 0.31):
        a = classify_regime(GOLDEN, theta, LiebParams(alpha=GOLDEN, theta=theta, t=0.5))
        b = classify_regime(GOLDEN, -theta, LiebParams(alpha=GOLDEN, theta=-theta, t=0.5))
        assert a.regime is b.regime
        assert a.gamma_hat == pytest.approx(b.gamma_hat, rel=1e-12)


def test_reports_reproducible_and_serializable():
    params = LiebParams(alpha=GOLDEN, theta=0.13, t=0.5)
    r1 = check_reduction_identity(params, 30)
    r2 = check_reduction_identity(params, 30)
    assert r1.measured == r2.measured
    payload = json.loads(reports_to_json([r1, check_gap_bound(1, 2, 1.0)]))
    assert {entry["check"] for entry in payload} == {"reduction_identity", "gap_bound"}
    assert all(set(e) == {"check", "params", "measured", "threshold", "pass", "seconds"}
               for e in payload)
