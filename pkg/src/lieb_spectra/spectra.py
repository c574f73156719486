"""Band sets at rational flux: discriminant bands, spectral mapping, fractal probes.

The almost Mathieu band set at flux p/q is the sublevel set |D(E)| <= 2 + 2 lam^q
of the q-step transfer discriminant D.  Its 2q edges are located from the
periodic/antiperiodic Bloch matrices at the extremal phases and polished by
bracketed root finding on D.  Lieb-family band sets come either from mapping
the almost Mathieu set through the exact spectral substitution or from a
direct Bloch sweep over phase and quasimomentum; the two routes are
independent and agree to tolerance.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize

from .arithmetic import Flux
from .operators import (
    GeneralParams,
    LiebParams,
    build_general_bloch,
    build_lieb_1d,
    build_lieb_bloch,
    build_lieb_2d_torus,
)

MERGE_TOL = 1e-10
EDGE_TOL = 1e-10


class BracketingError(RuntimeError):
    """Root bracketing failed while polishing a band edge."""


@dataclass(frozen=True)
class BandSet:
    """Finite union of disjoint closed intervals, sorted and merged.

    ``touching`` records interval pairs that met within the merge tolerance
    and were fused (index into the merged interval list).
    """

    intervals: tuple[tuple[float, float], ...]
    metadata: dict = field(default_factory=dict, compare=False)
    touching: tuple[int, ...] = ()

    @classmethod
    def from_intervals(cls, raw, metadata=None, merge=True, merge_tol=MERGE_TOL) -> "BandSet":
        iv = sorted((float(lo), float(hi)) for lo, hi in raw)
        for lo, hi in iv:
            if not (math.isfinite(lo) and math.isfinite(hi)) or hi < lo - merge_tol:
                raise ValueError(f"bad interval [{lo}, {hi}]")
        merged: list[list[float]] = []
        touching = []
        for lo, hi in iv:
            hi = max(hi, lo)
            fuse = (
                merged and lo <= merged[-1][1] + merge_tol
                if merge
                else merged and lo < merged[-1][1]  # strict: touching stays split
            )
            if fuse:
                if merge and lo >= merged[-1][1] - merge_tol:
                    touching.append(len(merged) - 1)
                merged[-1][1] = max(merged[-1][1], hi)
            else:
                merged.append([lo, hi])
        return cls(
            intervals=tuple((lo, hi) for lo, hi in merged),
            metadata=dict(metadata or {}),
            touching=tuple(touching),
        )

    def __iter__(self):
        return iter(self.intervals)

    def __len__(self):
        return len(self.intervals)

    @property
    def endpoints(self) -> np.ndarray:
        return np.array(self.intervals, dtype=float).reshape(-1, 2)

    def hull(self) -> tuple[float, float]:
        return self.intervals[0][0], self.intervals[-1][1]

    def contains(self, e: float, tol: float = 0.0) -> bool:
        return any(lo - tol <= e <= hi + tol for lo, hi in self.intervals)

    def negated(self) -> "BandSet":
        return BandSet.from_intervals(
            [(-hi, -lo) for lo, hi in self.intervals], metadata=self.metadata
        )

    def distance(self, e: float) -> float:
        """Distance from the point ``e`` to the set."""
        best = math.inf
        for lo, hi in self.intervals:
            if lo <= e <= hi:
                return 0.0
            best = min(best, abs(e - lo), abs(e - hi))
        return best


def measure(bands: BandSet) -> float:
    """Total Lebesgue measure of the band set."""
    return float(sum(hi - lo for lo, hi in bands.intervals))


def gap_set(bands: BandSet, hull: tuple[float, float] | None = None) -> BandSet:
    """Open gaps of the band set inside ``hull`` (default: its own hull)."""
    if len(bands) == 0:
        raise ValueError("empty band set")
    lo_h, hi_h = hull if hull is not None else bands.hull()
    gaps = []
    prev = lo_h
    for lo, hi in bands.intervals:
        if lo > prev:
            gaps.append((prev, lo))
        prev = max(prev, hi)
    if hi_h > prev:
        gaps.append((prev, hi_h))
    gaps = [(a, b) for a, b in gaps if b - a > MERGE_TOL]
    return BandSet.from_intervals(gaps, metadata={"kind": "gaps"}, merge=False)


def min_abs_energy(bands: BandSet, zero_tol: float = 1e-12) -> float:
    """Distance from 0 to the bands once the degenerate flat-band point is removed."""
    nonzero = [
        (lo, hi)
        for lo, hi in bands.intervals
        if not (abs(lo) <= zero_tol and abs(hi) <= zero_tol)
    ]
    if not nonzero:
        raise ValueError("band set has no nondegenerate intervals")
    return BandSet.from_intervals(nonzero).distance(0.0)


def hausdorff_distance(a: BandSet, b: BandSet) -> float:
    """Hausdorff distance between two finite unions of closed intervals."""

    def one_sided(x: BandSet, y: BandSet) -> float:
        pts = [p for iv in x.intervals for p in iv]
        # interior maxima of dist(., y) sit at midpoints of y's gaps
        ys = y.intervals
        for i in range(len(ys) - 1):
            mid = 0.5 * (ys[i][1] + ys[i + 1][0])
            if x.contains(mid):
                pts.append(mid)
        return max(y.distance(p) for p in pts)

    return max(one_sided(a, b), one_sided(b, a))


# -- almost Mathieu discriminant ----------------------------------------------

@dataclass
class DiscriminantPoly:
    """Trace of the q-step transfer product at the reference phase 1/(4q).

    At that phase the 2 lam^q cos(2 pi q theta) term of the trace vanishes,
    so D(E) is the theta-independent part: a monic degree-q polynomial whose
    sublevel set |D| <= 2 + 2 lam^q is the union-over-phases band set.
    """

    p: int
    q: int
    lam: float
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.q < 1 or math.gcd(self.p, self.q) != 1:
            raise ValueError(f"need gcd(p, q) = 1, got {self.p}/{self.q}")
        if self.lam <= 0:
            raise ValueError("lam must be positive")
        theta = 1.0 / (4.0 * self.q)
        self._diag = 2.0 * self.lam * np.cos(
            2.0 * np.pi * (theta + (self.p / self.q) * np.arange(self.q))
        )

    @property
    def threshold(self) -> float:
        """2 + 2 lam^q, evaluated in log space to survive extreme q."""
        return 2.0 * (1.0 + math.exp(self.q * math.log(self.lam)))

    def log_threshold(self) -> float:
        x = self.q * math.log(self.lam)
        # log(2 (1 + e^x)) stable for both signs of x
        return math.log(2.0) + (x + math.log1p(math.exp(-x)) if x > 0 else math.log1p(math.exp(x)))

    def __call__(self, E: float) -> float:
        val, s = self.eval_scaled(E)
        if s == 0.0:
            return val
        try:
            return val * math.exp(s)
        except OverflowError:
            return math.copysign(math.inf, val)

    def eval_scaled(self, E: float) -> tuple[float, float]:
        """Return (D(E) / e^s, s): trace with the accumulated log scale split off."""
        key = float(E)
        if key in self._cache:
            return self._cache[key]
        a11, a12, a21, a22 = 1.0, 0.0, 0.0, 1.0
        s = 0.0
        for v in self._diag:
            c = E - v
            b11, b12 = c * a11 - a21, c * a12 - a22
            a21, a22 = a11, a12
            a11, a12 = b11, b12
            norm = abs(a11) + abs(a12) + abs(a21) + abs(a22)
            if norm > 1e150:
                a11 /= norm; a12 /= norm; a21 /= norm; a22 /= norm
                s += math.log(norm)
        out = (a11 + a22, s)
        self._cache[key] = out
        return out

    def log_abs(self, E: float) -> tuple[float, float]:
        """(log |D(E)|, sign of D(E))."""
        val, s = self.eval_scaled(E)
        if val == 0.0:
            return -math.inf, 0.0
        return math.log(abs(val)) + s, math.copysign(1.0, val)

    def noise_log(self, E: float) -> float:
        """Log of the roundoff noise level of D(E).

        A step error of size eps ||prefix_j|| injected after factor j is
        amplified by the remaining suffix product, so the noise is of order
        eps * max_j ||suffix_{j+1}|| ||prefix_j||; both norm profiles come
        from one forward and one backward renormalized pass.
        """

        def log_norms(diag) -> list[float]:
            a11, a12, a21, a22 = 1.0, 0.0, 0.0, 1.0
            s = 0.0
            out = [0.0]
            for v in diag:
                c = E - v
                b11, b12 = c * a11 - a21, c * a12 - a22
                a21, a22 = a11, a12
                a11, a12 = b11, b12
                norm = abs(a11) + abs(a12) + abs(a21) + abs(a22)
                if norm == 0.0:
                    out.append(-math.inf)
                    continue
                out.append(s + math.log(norm))
                if norm > 1e150:
                    a11 /= norm; a12 /= norm; a21 /= norm; a22 /= norm
                    s += math.log(norm)
            return out

        prefix = log_norms(self._diag)
        # ||T_{q-1}...T_j||: transposing each cocycle factor conjugates it by
        # diag(1,-1), so the suffix norm equals the norm of the ascending
        # product T_j...T_{q-1}, which the same pass over the reversed
        # factor sequence produces (entrywise norms are transpose invariant)
        suffix_rev = log_norms(self._diag[::-1])
        q = len(self._diag)
        worst = max(prefix[j] + suffix_rev[q - j] for j in range(q + 1))
        return math.log(2.3e-16) + worst


def _amo_bloch_matrix(p: int, q: int, lam: float, theta: float, antiperiodic: bool) -> np.ndarray:
    diag = 2.0 * lam * np.cos(2.0 * np.pi * (theta + (p / q) * np.arange(q)))
    if q == 1:
        return np.array([[diag[0] + (-2.0 if antiperiodic else 2.0)]])
    H = np.diag(diag)
    for m in range(q - 1):
        H[m, m + 1] += 1.0
        H[m + 1, m] += 1.0
    corner = -1.0 if antiperiodic else 1.0
    H[q - 1, 0] += corner
    H[0, q - 1] += corner
    return H


def _polish_edge(disc: DiscriminantPoly, seed: float, target_sign: float, scale: float) -> float:
    """Refine a band edge: root of |D(E)| = threshold with D of the given sign.

    The eigensolve seed locates the edge to machine precision in energy;
    brentq runs on log|D| - log(threshold) inside the smallest bracket that
    straddles the root (smallest first, so a bracket never spans a whole
    exponentially narrow band and lands on the far edge).
    """
    logT = disc.log_threshold()
    if disc.noise_log(seed) > logT - 7.0:
        # the double-precision discriminant has no usable digits this close
        # to threshold (cancellation from huge intermediates); the eigensolve
        # seed is exact to machine precision in energy, so keep it
        return seed

    def f(E: float) -> float:
        la, sgn = disc.log_abs(E)
        val = la - logT
        # wrong-signed trace means we crossed into the opposite family; keep
        # the function continuous by reporting the (negative) sublevel value
        return val if sgn == target_sign or sgn == 0.0 else -abs(val) - 1.0

    fseed = f(seed)
    if fseed == 0.0:
        return seed
    for exponent in range(-13, -3):
        delta = max(10.0**exponent * scale, 5e-14)
        lo, hi = seed - delta, seed + delta
        flo, fhi = f(lo), f(hi)
        if flo == 0.0:
            return lo
        if fhi == 0.0:
            return hi
        if flo * fhi < 0:
            return brentq(f, lo, hi, xtol=EDGE_TOL * max(1.0, scale) * 1e-3, rtol=8.9e-16)
    # No sign change at any bracket: a tangency (touching bands make |D| = T
    # a double root) or an exponentially narrow band where the transfer
    # product's double-precision noise floor (~1e-3 relative near such
    # edges; the seed itself is exact to ~1e-15 against a high-precision
    # evaluation) swamps the signal.  The eigensolve seed is the best
    # available edge in both cases; only gross inconsistency is an error.
    if abs(fseed) < 0.05:
        return seed
    raise BracketingError(
        f"no bracket for edge near E={seed!r} (flux {disc.p}/{disc.q}, lam={disc.lam}): "
        f"log-residual {abs(fseed):.3e}"
    )


def amo_bands_rational(p: int, q: int, lam: float, polish: bool = True) -> BandSet:
    """Almost Mathieu band set (union over phases) at flux p/q, coupling lam.

    Edges are the eigenvalues of the periodic Bloch matrix at phase 0
    (discriminant +threshold) and the antiperiodic one at phase 1/(2q)
    (-threshold), optionally polished by bracketed root finding on the
    discriminant; bands are the 2q sorted edges paired in order.
    """
    p = p % q
    if math.gcd(p, q) != 1:
        raise ValueError(f"need gcd(p, q) = 1, got {p}/{q}")
    disc = DiscriminantPoly(p, q, lam)
    plus = np.linalg.eigvalsh(_amo_bloch_matrix(p, q, lam, 0.0, antiperiodic=False))
    minus = np.linalg.eigvalsh(_amo_bloch_matrix(p, q, lam, 1.0 / (2 * q), antiperiodic=True))
    scale = 2.0 + 2.0 * max(lam, 1.0)
    edges = []
    if polish and q > 1:
        for e in plus:
            edges.append(_polish_edge(disc, float(e), +1.0, scale))
        for e in minus:
            edges.append(_polish_edge(disc, float(e), -1.0, scale))
    else:
        edges = [float(e) for e in np.concatenate([plus, minus])]
    edges.sort()
    intervals = [(edges[2 * i], edges[2 * i + 1]) for i in range(q)]
    return BandSet.from_intervals(
        intervals,
        metadata={"model": "amo", "p": p, "q": q, "alpha": p / q, "coupling": lam},
    )


# -- spectral mapping ----------------------------------------------------------

def map_amo_energy(e: float, t: float) -> tuple[float, float]:
    """Map an almost Mathieu energy (coupling t^-2) to the symmetric Lieb pair.

    Returns -+sqrt(t^2 e + 2 + 2 t^2); tiny negative radicands (within 1e-12)
    are clamped to zero, anything lower is a domain error.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    r = t * t * e + 2.0 + 2.0 * t * t
    if r < -1e-12:
        raise ValueError(f"energy {e} is outside the mapped range for t={t} (radicand {r:.3e})")
    root = math.sqrt(max(r, 0.0))
    return (-root, root)


def g_of_energy(E: float, t: float) -> float:
    """Inverse substitution: the almost Mathieu energy mapped from a Lieb energy."""
    return E * E / (t * t) - 2.0 / (t * t) - 2.0


def general_map_energy(e: float, params: GeneralParams) -> tuple[float, float]:
    """General-coupling analogue: -+sqrt(t2 t3 e + 1 + t2^2 + t3^2 + t4^2)."""
    r = params.energy_scale * e + params.energy_offset
    if r < -1e-12:
        raise ValueError(f"energy {e} is outside the mapped range (radicand {r:.3e})")
    root = math.sqrt(max(r, 0.0))
    return (-root, root)


def _mapped_bands(amo: BandSet, fwd, metadata) -> BandSet:
    intervals = [(0.0, 0.0)]
    for lo, hi in amo.intervals:
        _, e_lo = fwd(lo)
        _, e_hi = fwd(hi)
        intervals.append((e_lo, e_hi))
        intervals.append((-e_hi, -e_lo))
    return BandSet.from_intervals(intervals, metadata=metadata)


def _direct_bands(bloch_builder, dim: int, n_grid: int, metadata) -> BandSet:
    """Sweep (theta, k), collect sorted Bloch eigenvalues, refine band extrema.

    Each sorted-eigenvalue branch is continuous on the (theta, k) torus, so
    its range is an interval and the union of ranges is the spectrum.
    """
    thetas = np.arange(n_grid) / n_grid
    ks = 2.0 * np.pi * np.arange(n_grid) / n_grid
    levels = np.empty((n_grid, n_grid, dim))
    for i, th in enumerate(thetas):
        for j, k in enumerate(ks):
            levels[i, j] = np.linalg.eigvalsh(bloch_builder(th, k).matrix)

    def band_extremum(band: int, i0: int, j0: int, sign: float) -> float:
        """Refined band value: sign=+1 locates the minimum, -1 the maximum."""

        def obj(x):
            w = np.linalg.eigvalsh(bloch_builder(x[0], x[1]).matrix)
            return sign * w[band]

        res = minimize(
            obj,
            x0=[thetas[i0], ks[j0]],
            method="Nelder-Mead",
            options={"xatol": 1e-10, "fatol": 1e-13, "maxiter": 400},
        )
        return sign * res.fun

    intervals = []
    for band in range(dim):
        sheet = levels[:, :, band]
        imin, jmin = np.unravel_index(np.argmin(sheet), sheet.shape)
        imax, jmax = np.unravel_index(np.argmax(sheet), sheet.shape)
        lo = min(band_extremum(band, imin, jmin, +1.0), sheet[imin, jmin])
        hi = max(band_extremum(band, imax, jmax, -1.0), sheet[imax, jmax])
        intervals.append((lo, hi))
    coarse = any(
        intervals[b + 1][0] - intervals[b][1] < 4.0 / (n_grid * n_grid)
        for b in range(dim - 1)
        if intervals[b + 1][0] > intervals[b][1]
    )
    md = dict(metadata)
    if coarse:
        md["grid_warning"] = "grid may be too coarse to separate nearby bands"
    return BandSet.from_intervals(intervals, metadata=md)


def lieb_bands_rational(p: int, q: int, t: float, method: str = "Mapped", n_grid: int = 64) -> BandSet:
    """Band set of the single-coupling Lieb model at flux p/q.

    ``Mapped`` sends the almost Mathieu bands (coupling t^-2) through the
    exact square-root substitution and appends the flat-band point [0, 0];
    ``Direct`` sweeps the magnetic Bloch matrices on an n_grid x n_grid
    (theta, k) grid with local extremization of the band edges.
    """
    metadata = {"model": "lieb", "p": p % q, "q": q, "alpha": (p % q) / q, "coupling": t}
    if method == "Mapped":
        amo = amo_bands_rational(p, q, t**-2)
        return _mapped_bands(amo, lambda e: map_amo_energy(e, t), metadata)
    if method == "Direct":
        return _direct_bands(
            lambda th, k: build_lieb_bloch(p, q, t, th, k), 3 * q, n_grid, metadata
        )
    raise ValueError(f"unknown method {method!r}")


def general_bands_rational(p: int, q: int, params: GeneralParams, method: str = "Mapped", n_grid: int = 64) -> BandSet:
    """General-coupling band set at flux p/q (same two routes as the t model)."""
    metadata = {
        "model": "general",
        "p": p % q,
        "q": q,
        "alpha": (p % q) / q,
        "coupling": params.amo_coupling,
    }
    if method == "Mapped":
        amo = amo_bands_rational(p, q, params.amo_coupling)
        return _mapped_bands(amo, lambda e: general_map_energy(e, params), metadata)
    if method == "Direct":
        return _direct_bands(
            lambda th, k: build_general_bloch(p, q, params, th, k), 3 * q, n_grid, metadata
        )
    raise ValueError(f"unknown method {method!r}")


# -- fractal probes ------------------------------------------------------------

def box_count(bands: BandSet, eps: float) -> int:
    """Number of grid-aligned eps boxes meeting the band set."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    ranges = sorted(
        (math.floor(lo / eps), math.floor(hi / eps)) for lo, hi in bands.intervals
    )
    count = 0
    cur_lo, cur_hi = None, None
    for lo, hi in ranges:
        if cur_lo is None:
            cur_lo, cur_hi = lo, hi
        elif lo <= cur_hi + 1:
            cur_hi = max(cur_hi, hi)
        else:
            count += cur_hi - cur_lo + 1
            cur_lo, cur_hi = lo, hi
    if cur_lo is not None:
        count += cur_hi - cur_lo + 1
    return count


def box_dimension_estimate(bands_at_scales, scales) -> float:
    """Least-squares box-counting dimension over paired (band set, scale) data.

    Pass the same band set at every scale for a plain estimate, or one
    approximant per scale for a sharpened fractal probe.  Needs >= 4 scales
    and at least two distinct covering counts.
    """
    scales = [float(s) for s in scales]
    if len(scales) < 4:
        raise ValueError("need at least 4 scales")
    if len(bands_at_scales) != len(scales):
        raise ValueError("bands_at_scales and scales must pair up")
    counts = [box_count(b, eps) for b, eps in zip(bands_at_scales, scales)]
    if any(c <= 0 for c in counts):
        raise ValueError("covering counts must be strictly positive")
    if len(set(counts)) < 2:
        raise ValueError(f"degenerate fit: covering counts {counts} are all equal")
    x = np.log(1.0 / np.asarray(scales))
    y = np.log(np.asarray(counts, dtype=float))
    slope = np.polyfit(x, y, 1)[0]
    return float(slope)


# -- 2D / 1D consistency -------------------------------------------------------

def spectrum_2d_check(p: int, q: int, t: float, Lx: int, Ly: int, tol: float = 1e-10) -> float:
    """Max sorted-eigenvalue distance between the torus operator and the
    union over theta_j = j/Ly of periodic 1D spectra.  Raises on size mismatch."""
    torus = build_lieb_2d_torus(p, q, t, Lx, Ly)
    ev2 = np.sort(torus.eigenvalues())
    ev1 = []
    flux = Flux.rational(p, q)
    for j in range(Ly):
        m = build_lieb_1d(
            LiebParams(alpha=flux, theta=j / Ly, t=t), Lx, boundary="periodic"
        )
        ev1.append(m.eigenvalues())
    ev1 = np.sort(np.concatenate(ev1))
    if ev1.shape != ev2.shape:
        raise RuntimeError(f"multiset size mismatch: {ev1.shape} vs {ev2.shape}")
    dist = float(np.abs(ev1 - ev2).max())
    return dist


# -- serialization ---------------------------------------------------------------

CSV_HEADER = "# lieb-spectra bands v1"
CSV_FIELDS = ["model", "p", "q", "alpha", "t_or_lambda", "band_index", "e_lo", "e_hi"]


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def bands_to_csv_rows(bands: BandSet) -> list[list[str]]:
    md = bands.metadata
    intervals = list(bands.intervals)
    if md.get("model") in ("lieb", "general"):
        # the flat band is part of every Lieb-family spectrum; at integer
        # flux it merges into the bulk interval, but the CSV contract keeps
        # one explicit zero-width row per fraction
        if not any(lo == 0.0 and hi == 0.0 for lo, hi in intervals):
            intervals.append((0.0, 0.0))
            intervals.sort(key=lambda iv: (iv[0], iv[1]))
    rows = []
    for i, (lo, hi) in enumerate(intervals):
        rows.append(
            [
                str(md.get("model", "?")),
                str(md.get("p", "")),
                str(md.get("q", "")),
                _fmt(md.get("alpha", math.nan)),
                _fmt(md.get("coupling", math.nan)),
                str(i),
                _fmt(lo),
                _fmt(hi),
            ]
        )
    return rows


def write_bands_csv(band_sets, path_or_file) -> None:
    own = isinstance(path_or_file, (str, bytes))
    fh = open(path_or_file, "w", newline="") if own else path_or_file
    try:
        fh.write(CSV_HEADER + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_FIELDS)
        for b in band_sets:
            writer.writerows(bands_to_csv_rows(b))
    finally:
        if own:
            fh.close()


def read_bands_csv(path_or_file) -> list[dict]:
    """Parse rows of the band CSV schema back into plain dicts."""
    own = isinstance(path_or_file, (str, bytes))
    fh = open(path_or_file, newline="") if own else path_or_file
    try:
        first = fh.readline().strip()
        if first != CSV_HEADER:
            raise ValueError(f"bad band CSV header: {first!r}")
        reader = csv.DictReader(fh, fieldnames=None)
        rows = []
        for rec in reader:
            rows.append(
                {
                    "model": rec["model"],
                    "p": int(rec["p"]),
                    "q": int(rec["q"]),
                    "alpha": float(rec["alpha"]),
                    "t_or_lambda": float(rec["t_or_lambda"]),
                    "band_index": int(rec["band_index"]),
                    "e_lo": float(rec["e_lo"]),
                    "e_hi": float(rec["e_hi"]),
                }
            )
        return rows
    finally:
        if own:
            fh.close()


def bands_to_json(band_sets) -> str:
    out = []
    for b in band_sets:
        out.append(
            {
                "params": dict(b.metadata),
                "bands": [{"e_lo": lo, "e_hi": hi} for lo, hi in b.intervals],
            }
        )
    return json.dumps(out, indent=2, sort_keys=True)
