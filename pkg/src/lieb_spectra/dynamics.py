"""Transfer-matrix cocycles, Lyapunov exponents, and localization diagnostics.

The Lyapunov estimator renormalizes after every 2x2 step, so products never
overflow; eigenvector diagnostics fit exponential decay on the A-sublattice
profile (the B and C components are slaved to A away from the flat band) and
report inverse participation ratios.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .arithmetic import Flux
from .operators import GeneralParams, HermitianMatrix, LiebParams, build_general_1d, build_lieb_1d


@dataclass(frozen=True)
class TransferStep:
    """One cocycle step [[E - 2 lam cos(2 pi x), -1], [1, 0]] tagged by its inputs."""

    E: float
    lam: float
    x: float

    @property
    def matrix(self) -> np.ndarray:
        return np.array(
            [[self.E - 2.0 * self.lam * math.cos(2.0 * math.pi * self.x), -1.0], [1.0, 0.0]]
        )

    def det(self) -> float:
        m = self.matrix
        return m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]


@dataclass(frozen=True)
class DecayFit:
    """Exponential decay fit of an eigenvector profile around its center."""

    center: int
    rate: float
    residual: float
    window: tuple[int, int]


def _alpha_float(alpha) -> float:
    if isinstance(alpha, Flux):
        return alpha.float_value()
    return float(alpha)


def lyapunov(E: float, lam: float, alpha, theta: float, n_steps: int) -> float:
    """Top Lyapunov exponent of the almost Mathieu cocycle at energy E.

    Vector iteration with per-step norm renormalization; deterministic for
    fixed inputs.  Values are nonnegative up to O(1/N) fluctuation.
    """
    if n_steps < 1000:
        raise ValueError("n_steps must be >= 1000")
    a = _alpha_float(alpha)
    v = 2.0 * lam * np.cos(2.0 * np.pi * (theta + a * np.arange(n_steps)))
    u1, u0 = 1.0, 0.0
    total = 0.0
    for m in range(n_steps):
        u1, u0 = (E - v[m]) * u1 - u0, u1
        r = abs(u1) + abs(u0)
        if not math.isfinite(r) or r == 0.0:
            raise FloatingPointError(f"cocycle iteration degenerated at step {m}")
        u1 /= r
        u0 /= r
        total += math.log(r)
    return total / n_steps


def inverse_participation_ratio(u: np.ndarray) -> float:
    """Sum of |u|^4 for a normalized vector: 1 for a delta, ~1/N extended."""
    return float(np.sum(np.abs(u) ** 4))


def _per_cell_amplitudes(M: HermitianMatrix, u: np.ndarray):
    """(number of cells, per-cell norms, A-sublattice amplitudes or None)."""
    if M.labels is not None and len(M.labels) % 3 == 0 and M.labels[0][1] == "A":
        n_cells = len(M.labels) // 3
        cell = np.abs(u.reshape(n_cells, 3))
        return n_cells, np.linalg.norm(cell, axis=1), cell[:, 0]
    return u.size, np.abs(u), None


def fit_decay(M: HermitianMatrix, u: np.ndarray, margin_frac: float = 0.05,
              noise_floor: float = 1e-14) -> DecayFit:
    """Least-squares exponential decay rate of one normalized eigenvector.

    The fit uses the A amplitudes per cell for labeled Lieb matrices (plain
    amplitudes otherwise) against |m - m0|, excluding a boundary margin of
    ``margin_frac`` of the cells on each side and everything below the
    eigensolver noise floor (far tails of localized states are numerical
    noise, not signal, and would flatten the slope).
    """
    n_cells, cell_norm, a_amp = _per_cell_amplitudes(M, u)
    amp = a_amp if a_amp is not None else cell_norm
    m0 = int(np.argmax(cell_norm))
    margin = max(1, int(margin_frac * n_cells))
    idx = np.arange(n_cells)
    mask = (idx >= margin) & (idx < n_cells - margin) & (amp > noise_floor * amp.max())
    x = np.abs(idx[mask] - m0).astype(float)
    y = np.log(amp[mask])
    if x.size < 3 or np.ptp(x) == 0:
        return DecayFit(center=m0, rate=0.0, residual=math.inf, window=(margin, n_cells - margin))
    coeffs, res, *_ = np.polyfit(x, y, 1, full=True)[:2]
    rss = float(res[0]) if len(res) else 0.0
    return DecayFit(
        center=m0,
        rate=float(-coeffs[0]),
        residual=math.sqrt(rss / x.size),
        window=(margin, n_cells - margin),
    )


def eig_localization_profile(M: HermitianMatrix, window: tuple[float, float]):
    """All eigenpairs of M with eigenvalue in ``window``: (energy, DecayFit, ipr).

    The inverse participation ratio sums |u|^4 over every component of the
    normalized eigenvector (all three sublattices for Lieb matrices).
    An empty window yields an empty list.
    """
    lo, hi = window
    if hi < lo:
        raise ValueError("window must satisfy lo <= hi")
    w, V = sla.eigh(M.matrix, subset_by_value=(lo, hi))
    out = []
    for i in range(w.size):
        u = V[:, i]
        out.append((float(w[i]), fit_decay(M, u), inverse_participation_ratio(u)))
    return out


def slaving_residual(params: LiebParams, energy: float, u: np.ndarray,
                     signal_cutoff: float = 1e-6) -> float:
    """Worst relative deviation of the B, C components from their A-slaved values.

    For an eigenvector at energy E != 0 the components obey
    u^B_m = E^-1 conj(K_m) u^A_m and u^C_m = E^-1 t (u^A_m + u^A_{m+1}) on
    interior cells.  Cells whose norm is below ``signal_cutoff`` times the
    peak cell norm carry only eigensolver noise and are skipped.
    """
    import cmath

    if energy == 0.0:
        raise ValueError("slaving relations require a nonzero energy")
    a = params.alpha.float_value()
    t = params.t
    n_cells = u.size // 3
    cell = u.reshape(n_cells, 3)
    norms = np.linalg.norm(cell, axis=1)
    floor = signal_cutoff * norms.max()
    worst = 0.0
    for m in range(1, n_cells - 2):
        if norms[m] < floor:
            continue
        K = cmath.exp(1j * math.pi * m * a) * (
            1 + cmath.exp(-2j * math.pi * (params.theta + m * a))
        )
        slaved_b = K.conjugate() * cell[m, 0] / energy
        slaved_c = t * (cell[m, 0] + cell[m + 1, 0]) / energy
        worst = max(
            worst,
            abs(slaved_b - cell[m, 1]) / norms[m],
            abs(slaved_c - cell[m, 2]) / norms[m],
        )
    return worst


def zero_mode_kernel(params, N: int, tol: float = 1e-10):
    """Numerical kernel of the open 3N x 3N truncation: (dimension, basis).

    Basis columns are the right singular vectors with singular value below
    ``tol``; for generic parameters they are supported on the B, C
    sublattices (the A components vanish).  A warning flags singular values
    within a factor 10 of the threshold.
    """
    if isinstance(params, GeneralParams):
        M = build_general_1d(params, N)
    elif isinstance(params, LiebParams):
        M = build_lieb_1d(params, N)
    else:
        raise TypeError(f"expected LiebParams or GeneralParams, got {type(params)!r}")
    _, s, vh = np.linalg.svd(M.matrix)
    in_kernel = s < tol
    shady = (s >= tol) & (s < 10 * tol)
    if np.any(shady):
        warnings.warn(
            f"{int(shady.sum())} singular values within 10x of the kernel threshold {tol}",
            RuntimeWarning,
            stacklevel=2,
        )
    basis = vh[in_kernel].conj().T
    return int(in_kernel.sum()), basis


LOCALIZATION_CSV_FIELDS = [
    "model",
    "alpha_desc",
    "theta",
    "t",
    "N",
    "eigenvalue",
    "ipr",
    "decay_rate",
    "fit_residual",
]


def write_localization_csv(records, path_or_file) -> None:
    """Write localization diagnostics rows (dicts with the documented keys)."""
    import csv

    own = isinstance(path_or_file, (str, bytes))
    fh = open(path_or_file, "w", newline="") if own else path_or_file
    try:
        writer = csv.DictWriter(fh, fieldnames=LOCALIZATION_CSV_FIELDS, lineterminator="\n")
        writer.writeheader()
        for rec in records:
            writer.writerow({k: rec[k] for k in LOCALIZATION_CSV_FIELDS})
    finally:
        if own:
            fh.close()
