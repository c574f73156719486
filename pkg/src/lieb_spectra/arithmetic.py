"""Continued fractions, torus distances, and the arithmetic flux/phase indices.

The two indices computed here drive the spectral-regime classifier: the
rational-approximability exponent of the flux (estimated along continued
fraction denominators) and the resonance exponent of the phase relative to
the flux orbit (estimated by a direct scan).  Unbounded values are reported
as ``math.inf`` so that callers can branch on them exactly.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from mpmath import mp

# Working precision for stored continued-fraction values (decimal digits).
# 120 digits ~ 400 bits, comfortably above the 80-bit requirement and enough
# to expand the named fluxes to depth ~64.
CF_DPS = 120


class NoSolutionError(ValueError):
    """Raised when a requested orbit target is unreachable (rational flux)."""


def _mpf_to_fraction(x) -> Fraction:
    """Exact Fraction of an mpf (mantissa * 2**exponent)."""
    sign, man, exp, _ = mp.mpf(x)._mpf_
    man = int(man)
    if sign:
        man = -man
    if exp >= 0:
        return Fraction(man << exp, 1)
    return Fraction(man, 1 << (-exp))


def torus_norm(x) -> float:
    """Distance from ``x`` to the nearest integer, in [0, 1/2].

    Accepts floats or mpf values; the return type follows the input.
    """
    if isinstance(x, mp.mpf):
        if not mp.isfinite(x):
            raise ValueError(f"torus_norm requires finite input, got {x}")
        return abs(x - mp.nint(x))
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"torus_norm requires finite input, got {x}")
    return abs(x - round(x))


@dataclass(frozen=True)
class ContinuedFraction:
    """A real number in (0, 1) together with its continued fraction expansion.

    ``quotients`` holds the partial quotients a_1, a_2, ... (a_0 is always 0
    here), ``convergents`` the exact (p_k, q_k) pairs starting from
    p_0/q_0 = 0/1, and ``value`` a high-precision mpf of the number.

    ``rational`` is set (to the reduced (p, q)) when the input was rational
    to working precision, in which case the expansion is exact and finite.
    ``truncated`` marks an expansion stopped early because the precision of
    the input was exhausted before the requested depth.
    """

    a0: int
    quotients: tuple[int, ...]
    value: object  # mpf; kept generic so frozen dataclass hashing works
    convergents: tuple[tuple[int, int], ...] = field(repr=False)
    rational: tuple[int, int] | None = None
    truncated: bool = False

    def __post_init__(self):
        if any(a < 1 for a in self.quotients):
            raise ValueError("partial quotients must be >= 1")

    @property
    def depth(self) -> int:
        return len(self.quotients)

    def convergent(self, k: int) -> tuple[int, int]:
        """Exact convergent p_k/q_k (k = 0 gives a0/1)."""
        return self.convergents[k]

    def float_value(self) -> float:
        return float(self.value)


def _convergents_from_quotients(a0: int, quotients) -> list[tuple[int, int]]:
    pk_1, qk_1 = 1, 0
    pk, qk = a0, 1
    out = [(pk, qk)]
    for a in quotients:
        pk_1, pk = pk, a * pk + pk_1
        qk_1, qk = qk, a * qk + qk_1
        out.append((pk, qk))
    return out


def cf_expand(x, depth: int, rel_precision: float | None = None) -> ContinuedFraction:
    """Continued fraction expansion of ``x`` in (0, 1) to ``depth`` quotients.

    The expansion runs on the exact binary value of the input and stops early
    in two cases: the input is rational to working precision (the result then
    carries the reduced fraction in ``rational``), or the representation runs
    out of precision before ``depth`` (``truncated`` is set).

    Parameters
    ----------
    x : float or mpf
        Value in (0, 1).
    depth : int
        Number of partial quotients requested (>= 1).
    rel_precision : float, optional
        Relative precision of the input; defaults to machine epsilon for
        floats and 10**-dps for mpf inputs.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if isinstance(x, mp.mpf):
        frac = _mpf_to_fraction(x)
        u = mp.mpf(10) ** (-mp.dps) if rel_precision is None else rel_precision
        u = float(u)
        value = mp.mpf(x)
    else:
        x = float(x)
        if not math.isfinite(x):
            raise ValueError("x must be finite")
        frac = Fraction(x)
        u = np.finfo(float).eps if rel_precision is None else rel_precision
        value = mp.mpf(x)
    if not (0 < frac < 1):
        raise ValueError(f"x must lie in (0, 1), got {x}")

    horizon = 1.0 / u  # q_k * q_{k+1} beyond this is representation noise
    quotients: list[int] = []
    pk_1, qk_1, pk, qk = 1, 0, 0, 1  # (p_{-1}, q_{-1}), (p_0, q_0)
    y = frac
    rational = None
    truncated = False
    while len(quotients) < depth:
        if y == 0:
            rational = (pk, qk)
            break
        a = int(1 / y)  # floor for positive Fraction
        y = 1 / y - a
        p_next, q_next = a * pk + pk_1, a * qk + qk_1
        if qk * q_next > horizon:
            # the convergent matches the input to working precision; decide
            # between "input was rational" and "precision exhausted"
            if q_next > 100 * qk * qk:
                rational = (pk, qk)
            else:
                quotients.append(a)
                pk_1, qk_1, pk, qk = pk, qk, p_next, q_next
                truncated = True
            break
        quotients.append(a)
        pk_1, qk_1, pk, qk = pk, qk, p_next, q_next
    convergents = _convergents_from_quotients(0, quotients)
    return ContinuedFraction(
        a0=0,
        quotients=tuple(quotients),
        value=value,
        convergents=tuple(convergents),
        rational=rational,
        truncated=truncated,
    )


_NAMED_FLUXES = {
    "golden": lambda: (mp.sqrt(5) - 1) / 2,
    "silver": lambda: mp.sqrt(2) - 1,
    "e2": lambda: mp.e - 2,
}


@dataclass(frozen=True)
class Flux:
    """Magnetic flux per unit cell, reduced mod 1.

    Either an exact rational p/q (0 <= p < q, gcd = 1) or an irrational
    carried as a high-precision value plus continued fraction expansion.
    """

    p: int | None = None
    q: int | None = None
    cf: ContinuedFraction | None = None

    def __post_init__(self):
        if (self.cf is None) == (self.p is None):
            raise ValueError("flux must be exactly one of rational or irrational")
        if self.cf is None:
            if self.q is None or self.q < 1 or math.gcd(self.p, self.q) != 1:
                raise ValueError(f"rational flux must be reduced, got {self.p}/{self.q}")
            if not (0 <= self.p < self.q) and not (self.p == 0 and self.q == 1):
                raise ValueError(f"rational flux must satisfy 0 <= p < q, got {self.p}/{self.q}")

    # -- constructors ------------------------------------------------------

    @classmethod
    def rational(cls, p: int, q: int) -> "Flux":
        if q < 1:
            raise ValueError("q must be positive")
        g = math.gcd(p, q)
        p, q = p // g, q // g
        return cls(p=p % q, q=q)

    @classmethod
    def irrational(cls, cf: ContinuedFraction) -> "Flux":
        if cf.rational is not None:
            raise ValueError("continued fraction carries a rational flag")
        return cls(cf=cf)

    @classmethod
    def from_value(cls, x, depth: int = 48) -> "Flux":
        """Classify a numeric flux: exact rational if detected, else irrational."""
        with mp.workdps(CF_DPS):
            x = mp.mpf(x) if isinstance(x, mp.mpf) else float(x) % 1.0
            cf = cf_expand(x, depth)
        if cf.rational is not None:
            return cls.rational(*cf.rational)
        return cls(cf=cf)

    @classmethod
    def named(cls, name: str, depth: int = 48) -> "Flux":
        """Named irrational fluxes: ``golden`` (sqrt(5)-1)/2, ``silver`` sqrt(2)-1, ``e2`` e-2."""
        try:
            maker = _NAMED_FLUXES[name]
        except KeyError:
            raise ValueError(f"unknown flux name {name!r}; choose from {sorted(_NAMED_FLUXES)}")
        with mp.workdps(CF_DPS):
            return cls(cf=cf_expand(maker(), depth))

    @classmethod
    def from_quotients(cls, quotients, depth: int = 48) -> "Flux":
        """Irrational flux whose expansion starts with the given quotients.

        The expansion is completed with an infinite tail of 1s (so the value
        is well defined and genuinely irrational); the stored quotient list
        is padded with that tail out to ``depth`` entries so index scans see
        past the constructed prefix.
        """
        quotients = [int(a) for a in quotients]
        if not quotients or any(a < 1 for a in quotients):
            raise ValueError("quotients must be positive integers")
        stored = quotients + [1] * max(0, depth - len(quotients))
        with mp.workdps(CF_DPS):
            tail = (mp.sqrt(5) - 1) / 2  # value of the all-ones tail
            x = tail
            for a in reversed(quotients):
                x = 1 / (a + x)
            convergents = _convergents_from_quotients(0, stored)
            cf = ContinuedFraction(
                a0=0,
                quotients=tuple(stored),
                value=x,
                convergents=tuple(convergents),
            )
        return cls(cf=cf)

    # -- views -------------------------------------------------------------

    @property
    def is_rational(self) -> bool:
        return self.cf is None

    def float_value(self) -> float:
        if self.is_rational:
            return self.p / self.q
        return float(self.cf.value)

    def mp_value(self):
        if self.is_rational:
            return mp.mpf(self.p) / self.q
        return self.cf.value

    def describe(self) -> str:
        if self.is_rational:
            return f"{self.p}/{self.q}"
        return f"irrational({self.float_value():.12f})"


def _cf_of(alpha) -> ContinuedFraction:
    if isinstance(alpha, ContinuedFraction):
        return alpha
    if isinstance(alpha, Flux):
        if alpha.is_rational:
            raise TypeError("rational flux has no continued fraction expansion")
        return alpha.cf
    raise TypeError(f"expected Flux or ContinuedFraction, got {type(alpha)!r}")


def beta_estimate(alpha, depth: int) -> float:
    """Approximability exponent of the flux, scanned along convergents.

    Returns max over 1 <= k <= depth of ln(q_{k+1}) / q_k, the standard
    denominator form of the limsup; rational fluxes return ``math.inf``
    (with a warning) since the torus distance vanishes along multiples of q.
    """
    if isinstance(alpha, Flux) and alpha.is_rational:
        warnings.warn(
            f"beta is +inf for rational flux {alpha.describe()}", RuntimeWarning, stacklevel=2
        )
        return math.inf
    cf = _cf_of(alpha)
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if depth > cf.depth - 1:
        raise ValueError(
            f"depth {depth} needs q_{depth + 1}; expansion stores only {cf.depth} quotients"
        )
    best = 0.0
    for k in range(1, depth + 1):
        qk = cf.convergents[k][1]
        qk1 = cf.convergents[k + 1][1]
        # exact integer log via mpmath to survive huge denominators
        val = float(mp.log(qk1)) / qk
        best = max(best, val)
    return best


def gamma_estimate(alpha, theta: float, n_max: int) -> float:
    """Resonance exponent of the phase: max over 1 <= |n| <= n_max of
    -ln||2*theta + n*alpha|| / |n|.

    Exact resonances (distance 0 at working precision) give ``math.inf``.
    Rational fluxes give ``math.inf`` with a warning.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    if isinstance(alpha, Flux) and alpha.is_rational:
        warnings.warn(
            f"gamma is reported as +inf for rational flux {alpha.describe()}",
            RuntimeWarning,
            stacklevel=2,
        )
        return math.inf
    a = alpha.float_value() if isinstance(alpha, Flux) else float(_cf_of(alpha).value)
    n = np.arange(1, n_max + 1, dtype=float)
    best = 0.0
    needs_mp = []  # (n_signed, float distance)
    for sign in (1.0, -1.0):
        x = 2.0 * theta + sign * n * a
        d = np.abs(x - np.round(x))
        if np.any(d == 0.0):
            return math.inf
        vals = -np.log(d) / n
        i = int(np.argmax(vals))
        best = max(best, float(vals[i]))
        tiny = np.nonzero(d < 1e-12)[0]
        needs_mp.extend(int(sign * (j + 1)) for j in tiny)
    if needs_mp:
        # re-evaluate near-resonant points at high precision to avoid float
        # cancellation inflating (or deflating) the exponent
        with mp.workdps(CF_DPS):
            am = alpha.mp_value() if isinstance(alpha, Flux) else mp.mpf(a)
            tm = mp.mpf(theta)
            for ns in needs_mp:
                dm = torus_norm(2 * tm + ns * am)
                if dm == 0:
                    return math.inf
                best = max(best, float(-mp.log(dm)) / abs(ns))
    return best


def find_near_half(alpha, theta: float, eps: float, m_cap: int | None = None) -> int:
    """Smallest m >= 0 with ||theta + m*alpha - 1/2|| < eps.

    For rational flux the orbit is finite; if no orbit point comes within
    ``eps`` of 1/2 a :class:`NoSolutionError` is raised.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if isinstance(alpha, Flux):
        if alpha.is_rational:
            q = alpha.q
            a = alpha.p / alpha.q
            x = theta + a * np.arange(q) - 0.5
            d = np.abs(x - np.round(x))
            hits = np.nonzero(d < eps)[0]
            if hits.size == 0:
                raise NoSolutionError(
                    f"orbit of {alpha.describe()} never comes within {eps} of 1/2 "
                    f"(closest {d.min():.3e})"
                )
            return int(hits[0])
        a = alpha.float_value()
    else:
        a = float(alpha)
    if m_cap is None:
        m_cap = int(max(1e6, 50.0 / eps))
    chunk = 65536
    start = 0
    while start <= m_cap:
        m = np.arange(start, min(start + chunk, m_cap + 1), dtype=float)
        x = theta + m * a - 0.5
        d = np.abs(x - np.round(x))
        hits = np.nonzero(d < eps)[0]
        if hits.size:
            return int(start + hits[0])
        start += chunk
    raise NoSolutionError(f"no m <= {m_cap} with orbit within {eps} of 1/2")
