"""Executable checks of the model's exact identities and the regime classifier.

Each check measures a residual against a pinned threshold and returns a
serializable :class:`CheckReport`.  The classifier compares the arithmetic
indices of (flux, phase) against the coupling threshold and refuses to guess
near the transition lines.
"""

from __future__ import annotations

import cmath
import json
import math
import time
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .arithmetic import Flux, beta_estimate, find_near_half, gamma_estimate
from .operators import (
    GeneralParams,
    HermitianMatrix,
    LiebParams,
    build_amo,
    build_factor_product,
    build_general_1d,
    build_lieb_1d,
    sign_flip_A,
)
from .spectra import (
    amo_bands_rational,
    g_of_energy,
    hausdorff_distance,
    lieb_bands_rational,
)


@dataclass(frozen=True)
class CheckReport:
    """Outcome of one verification: measured value vs threshold."""

    check: str
    params: dict
    measured: float
    threshold: float
    passed: bool
    seconds: float
    details: dict = field(default_factory=dict, compare=False)

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "params": {k: (v.item() if hasattr(v, "item") else v) for k, v in self.params.items()},
            "measured": float(self.measured),
            "threshold": float(self.threshold),
            "pass": bool(self.passed),
            "seconds": float(self.seconds),
        }


def reports_to_json(reports) -> str:
    return json.dumps([r.to_dict() for r in reports], indent=2, sort_keys=True)


class Regime(Enum):
    LOCALIZED = "Localized"
    SINGULAR_CONTINUOUS = "SingularContinuous"
    ABSOLUTELY_CONTINUOUS = "AbsolutelyContinuous"
    CRITICAL = "Critical"
    TRANSITION_LINE = "TransitionLine"
    FLAT_BAND_ONLY = "FlatBandOnly"
    INDETERMINATE = "Indeterminate"


@dataclass(frozen=True)
class RegimeLabel:
    """Classification outcome together with the comparisons that produced it."""

    regime: Regime
    threshold: float
    beta_hat: float | None = None
    beta_unc: float | None = None
    gamma_hat: float | None = None
    gamma_unc: float | None = None
    note: str = ""

    def __str__(self):
        return self.regime.value


def _describe_params(params) -> dict:
    if isinstance(params, GeneralParams):
        return {
            "model": "general",
            "alpha": params.alpha.describe(),
            "theta": params.theta,
            "t2": params.t2,
            "t3": params.t3,
            "t4": params.t4,
        }
    return {
        "model": "lieb",
        "alpha": params.alpha.describe(),
        "theta": params.theta,
        "t": params.t,
    }


def check_reduction_identity(params: LiebParams, N: int, threshold: float = 1e-12) -> CheckReport:
    """Interior rows of the factor product equal t^2 (AMO + (2 + 2 t^-2) I)."""
    if N < 10:
        raise ValueError("N must be >= 10")
    t0 = time.perf_counter()
    t = params.t
    product = build_factor_product(params, N).matrix
    amo = build_amo(params.alpha, params.theta, params.amo_coupling, N).matrix
    reference = t * t * (amo + (2.0 + 2.0 / (t * t)) * np.eye(N))
    interior = slice(2, N - 2)
    measured = float(np.abs(product[interior] - reference[interior]).max())
    boundary_diff = float(np.abs(product[0] - reference[0]).max())
    return CheckReport(
        check="reduction_identity",
        params={**_describe_params(params), "N": N},
        measured=measured,
        threshold=threshold,
        passed=measured <= threshold,
        seconds=time.perf_counter() - t0,
        details={"boundary_row_diff": boundary_diff},
    )


def check_symmetry(params_or_matrix, N: int | None = None) -> CheckReport:
    """Conjugation by the A-sign unitary negates the matrix exactly.

    Accepts model parameters (a 1D operator of size N is built) or any
    prebuilt labeled matrix (e.g. a torus operator).
    """
    t0 = time.perf_counter()
    if isinstance(params_or_matrix, HermitianMatrix):
        M = params_or_matrix
        params_desc = {"prebuilt": True, "n": M.n}
    elif isinstance(params_or_matrix, GeneralParams):
        M = build_general_1d(params_or_matrix, N or 20)
        params_desc = {**_describe_params(params_or_matrix), "N": N or 20}
    else:
        M = build_lieb_1d(params_or_matrix, N or 20)
        params_desc = {**_describe_params(params_or_matrix), "N": N or 20}
    flipped = sign_flip_A(M)
    entry_dev = float(np.abs(flipped.matrix + M.matrix).max())
    eigs = np.sort(M.eigenvalues())
    eig_dev = float(np.abs(eigs + eigs[::-1]).max())
    passed = entry_dev == 0.0 and eig_dev <= 1e-12
    return CheckReport(
        check="symmetry",
        params=params_desc,
        measured=entry_dev,
        threshold=0.0,
        passed=passed,
        seconds=time.perf_counter() - t0,
        details={"eigenvalue_negation_dev": eig_dev},
    )


def weyl_zero_residual(params: LiebParams, k: int) -> CheckReport:
    """Single-site trial vector at the near-resonant cell: residual < 1/k.

    The site m_k is the smallest index where the phase orbit comes within
    eps_k = arcsin(1/(2k))/pi of 1/2; placing u^B there makes the operator
    act with the single coefficient whose modulus is the residual.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    t0 = time.perf_counter()
    eps_k = math.asin(1.0 / (2.0 * k)) / math.pi
    m = find_near_half(params.alpha, params.theta, eps_k)
    a = params.alpha.float_value()
    x = params.theta + m * a
    residual = abs(1.0 + cmath.exp(2j * math.pi * x))
    return CheckReport(
        check="weyl_zero_residual",
        params={**_describe_params(params), "k": k},
        measured=residual,
        threshold=1.0 / k,
        passed=residual < 1.0 / k,
        seconds=time.perf_counter() - t0,
        details={"m": m, "eps": eps_k},
    )


def check_mapping(p: int, q: int, t: float, grid: int = 64, threshold: float = 1e-6) -> CheckReport:
    """Hausdorff distance between the mapped and directly swept Lieb bands."""
    t0 = time.perf_counter()
    mapped = lieb_bands_rational(p, q, t, method="Mapped")
    direct = lieb_bands_rational(p, q, t, method="Direct", n_grid=grid)
    d = hausdorff_distance(mapped, direct)
    return CheckReport(
        check="mapping",
        params={"p": p, "q": q, "t": t, "grid": grid},
        measured=d,
        threshold=threshold,
        passed=d <= threshold,
        seconds=time.perf_counter() - t0,
    )


def check_gap_bound(p: int, q: int, lam: float) -> CheckReport:
    """Measured clearance c = (2 + 2 lam) - max |band edge|; positive off integer flux."""
    t0 = time.perf_counter()
    bands = amo_bands_rational(p, q, lam)
    edge = max(max(abs(lo), abs(hi)) for lo, hi in bands.intervals)
    c = (2.0 + 2.0 * lam) - edge
    integer_flux = q == 1
    passed = (abs(c) <= 1e-9) if integer_flux else (c > 0)
    return CheckReport(
        check="gap_bound",
        params={"p": p, "q": q, "lam": lam},
        measured=c,
        threshold=0.0,
        passed=passed,
        seconds=time.perf_counter() - t0,
        details={"integer_flux": integer_flux},
    )


def check_mapping_round_trip(t: float, energies, threshold: float = 1e-12) -> CheckReport:
    """g(map(e)) = e on the mapped domain."""
    from .spectra import map_amo_energy

    t0 = time.perf_counter()
    worst = 0.0
    for e in energies:
        _, E = map_amo_energy(e, t)
        worst = max(worst, abs(g_of_energy(E, t) - e))
    return CheckReport(
        check="mapping_round_trip",
        params={"t": t, "n_energies": len(list(energies))},
        measured=worst,
        threshold=threshold,
        passed=worst <= threshold,
        seconds=time.perf_counter() - t0,
    )


def classify_regime(alpha: Flux, theta: float, model, scan_depth: int = 32) -> RegimeLabel:
    """Spectral-regime label from the coupling threshold and arithmetic indices.

    The threshold is L = ln(t^-2) for the single-coupling model and
    L = ln(t4 / (t2 t3)) for general couplings.  Negative L means absolutely
    continuous bulk; L = 0 is the critical line; for positive L the flux
    index (and, when that is small, the phase index) decides between
    localization and singular continuous spectrum.  Estimates within their
    scan uncertainty of L give TransitionLine; estimates within twice the
    uncertainty give Indeterminate rather than a guess.  Rational flux gives
    FlatBandOnly: the theorems concern irrational flux only, and the band
    data lives in the rational-flux band computations.
    """
    if isinstance(model, GeneralParams):
        L = math.log(model.t4 / (model.t2 * model.t3))
    elif isinstance(model, LiebParams):
        L = math.log(model.t**-2)
    else:
        raise TypeError(f"expected LiebParams or GeneralParams, got {type(model)!r}")

    if alpha.is_rational:
        return RegimeLabel(
            regime=Regime.FLAT_BAND_ONLY,
            threshold=L,
            note=(
                f"rational flux {alpha.describe()}: band spectrum plus flat band; "
                "see the rational-flux band set for this model"
            ),
        )

    if L < 0.0:
        return RegimeLabel(regime=Regime.ABSOLUTELY_CONTINUOUS, threshold=L)
    if L == 0.0:
        return RegimeLabel(
            regime=Regime.CRITICAL,
            threshold=L,
            note="critical coupling: purely singular continuous bulk spectrum",
        )

    depth = min(scan_depth, alpha.cf.depth - 1)
    if depth < 2:
        return RegimeLabel(
            regime=Regime.INDETERMINATE, threshold=L, note="expansion too short to scan"
        )
    beta_hat = beta_estimate(alpha, depth)
    beta_prev = beta_estimate(alpha, depth - 1)
    q_depth = alpha.cf.convergents[depth][1]
    beta_unc = max(beta_hat - beta_prev, 1.0 / float(min(q_depth, 10**18)))

    def decide(est, unc, regime_above):
        if math.isinf(est):
            return regime_above, None
        if abs(est - L) <= unc:
            return Regime.TRANSITION_LINE, None
        if abs(est - L) <= 2 * unc:
            return Regime.INDETERMINATE, None
        return None, est > L

    verdict, above = decide(beta_hat, beta_unc, Regime.SINGULAR_CONTINUOUS)
    if verdict is not None:
        return RegimeLabel(
            regime=verdict, threshold=L, beta_hat=beta_hat, beta_unc=beta_unc
        )
    if above:
        return RegimeLabel(
            regime=Regime.SINGULAR_CONTINUOUS, threshold=L, beta_hat=beta_hat, beta_unc=beta_unc
        )

    n_max = max(10**4, scan_depth)
    gamma_hat = gamma_estimate(alpha, theta, n_max)
    gamma_prev = gamma_estimate(alpha, theta, max(n_max - 1, 1))
    gamma_unc = max(gamma_hat - gamma_prev, 1.0 / n_max)
    verdict, above = decide(gamma_hat, gamma_unc, Regime.SINGULAR_CONTINUOUS)
    if verdict is not None:
        return RegimeLabel(
            regime=verdict,
            threshold=L,
            beta_hat=beta_hat,
            beta_unc=beta_unc,
            gamma_hat=gamma_hat,
            gamma_unc=gamma_unc,
        )
    regime = Regime.SINGULAR_CONTINUOUS if above else Regime.LOCALIZED
    return RegimeLabel(
        regime=regime,
        threshold=L,
        beta_hat=beta_hat,
        beta_unc=beta_unc,
        gamma_hat=gamma_hat,
        gamma_unc=gamma_unc,
    )
