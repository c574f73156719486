"""Finite Hermitian realizations of the magnetic Lieb-lattice Hamiltonians.

Builders for the one-dimensional three-site-per-cell operator, its
rectangular factor product, the almost Mathieu operator, magnetic Bloch
matrices at rational flux, the general-coupling variant, and the
two-dimensional torus operator.  All builders are pure and return immutable
dense matrices with optional site labels.

Phase conventions: the 1D builder keeps the bare per-cell phase
e^{i pi m alpha} on the A-B coupling; the Bloch builders gauge it away
(each B site has a single bond, so its phase never affects eigenvalues).
The two conventions agree at the spectral level only.
"""

from __future__ import annotations

import cmath
import io
import math
from dataclasses import dataclass

import numpy as np

from .arithmetic import Flux

HERMITICITY_RTOL = 1e-14


class ConfigurationError(ValueError):
    """Incompatible builder options (e.g. periodic cell count vs flux)."""


@dataclass(frozen=True)
class LiebParams:
    """Parameters of the single-coupling model: flux, phase, x-hopping t (y-hopping 1)."""

    alpha: Flux
    theta: float
    t: float

    def __post_init__(self):
        if self.t <= 0:
            raise ValueError("t must be positive")
        object.__setattr__(self, "theta", self.theta % 1.0)

    @property
    def amo_coupling(self) -> float:
        return self.t**-2


@dataclass(frozen=True)
class GeneralParams:
    """General hoppings (t1=1 fixed): t2, t3 along x, t4 the second y bond."""

    alpha: Flux
    theta: float
    t2: float
    t3: float
    t4: float

    def __post_init__(self):
        if min(self.t2, self.t3, self.t4) <= 0:
            raise ValueError("all couplings must be positive")
        object.__setattr__(self, "theta", self.theta % 1.0)

    @property
    def amo_coupling(self) -> float:
        return self.t4 / (self.t2 * self.t3)

    @property
    def energy_offset(self) -> float:
        return 1.0 + self.t2**2 + self.t3**2 + self.t4**2

    @property
    def energy_scale(self) -> float:
        return self.t2 * self.t3


@dataclass(frozen=True)
class HermitianMatrix:
    """Dense Hermitian matrix with optional lattice site labels.

    ``labels`` holds one (cell, sublattice) pair per row for lattice
    operators (cell is an int in 1D, an (m, n) pair on the torus) and is
    None for plain tridiagonal matrices.  ``boundary`` is "open" or
    "periodic"; periodic matrices record the quasimomentum ``k``.
    """

    matrix: np.ndarray
    labels: tuple | None = None
    boundary: str = "open"
    k: float = 0.0

    def __post_init__(self):
        m = self.matrix
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("matrix must be square")
        m.setflags(write=False)
        scale = np.abs(m).max() if m.size else 0.0
        dev = np.abs(m - m.conj().T).max()
        if dev > HERMITICITY_RTOL * max(scale, 1.0):
            raise ValueError(f"matrix is not Hermitian (deviation {dev:.3e})")

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def eigensystem(self):
        return np.linalg.eigh(self.matrix)

    def boundary_tag(self) -> str:
        if self.boundary == "open":
            return "open"
        return f"periodic:k={self.k!r}"


def _alpha_value(alpha: Flux) -> float:
    return alpha.float_value()


def _check_periodic(alpha: Flux, N: int, boundary: str):
    if boundary not in ("open", "periodic"):
        raise ConfigurationError(f"unknown boundary {boundary!r}")
    if boundary == "periodic":
        if alpha.is_rational:
            if N % alpha.q != 0:
                raise ConfigurationError(
                    f"periodic boundary needs q | N, got q={alpha.q}, N={N}"
                )
        else:
            raise ConfigurationError("periodic boundary requires rational flux")


def kappa(m: int, x: float, alpha_val: float) -> complex:
    """A-B coupling of cell m at phase x: e^{i pi m alpha} (1 + e^{-2 pi i x})."""
    return cmath.exp(1j * math.pi * m * alpha_val) * (1 + cmath.exp(-2j * math.pi * x))


def build_lieb_1d(params: LiebParams, N: int, boundary: str = "open", k: float = 0.0) -> HermitianMatrix:
    """3N x 3N single-coupling operator on N cells, basis (A_m, B_m, C_m).

    Open boundary is the principal (Dirichlet) truncation; periodic wraps
    the single inter-cell bond C_{N-1} - A_0 with phase e^{ik} and requires
    rational flux p/q with q | N.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    _check_periodic(params.alpha, N, boundary)
    a = _alpha_value(params.alpha)
    t = params.t
    H = np.zeros((3 * N, 3 * N), dtype=complex)
    for m in range(N):
        A, B, C = 3 * m, 3 * m + 1, 3 * m + 2
        K = kappa(m, params.theta + m * a, a)
        H[A, B] = K
        H[B, A] = K.conjugate()
        H[A, C] = t
        H[C, A] = t
        if m >= 1:
            Cprev = 3 * (m - 1) + 2
            H[A, Cprev] = t
            H[Cprev, A] = t
    if boundary == "periodic":
        phase = cmath.exp(1j * k)
        H[3 * (N - 1) + 2, 0] = t * phase  # C_{N-1} -> A_0 wrap
        H[0, 3 * (N - 1) + 2] = t * phase.conjugate()
    labels = tuple((m, s) for m in range(N) for s in "ABC")
    return HermitianMatrix(H, labels=labels, boundary=boundary, k=k)


def build_general_1d(params: GeneralParams, N: int, boundary: str = "open", k: float = 0.0) -> HermitianMatrix:
    """General-coupling analogue of :func:`build_lieb_1d`.

    A-B coupling of cell m is e^{-i pi m alpha} (1 + t4 e^{2 pi i (theta + m alpha)});
    A-C couplings are t2 (same cell) and t3 (cell to the left).
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    _check_periodic(params.alpha, N, boundary)
    a = _alpha_value(params.alpha)
    t2, t3, t4 = params.t2, params.t3, params.t4
    H = np.zeros((3 * N, 3 * N), dtype=complex)
    for m in range(N):
        A, B, C = 3 * m, 3 * m + 1, 3 * m + 2
        K = cmath.exp(-1j * math.pi * m * a) * (
            1 + t4 * cmath.exp(2j * math.pi * (params.theta + m * a))
        )
        H[A, B] = K
        H[B, A] = K.conjugate()
        H[A, C] = t2
        H[C, A] = t2
        if m >= 1:
            Cprev = 3 * (m - 1) + 2
            H[A, Cprev] = t3
            H[Cprev, A] = t3
    if boundary == "periodic":
        phase = cmath.exp(1j * k)
        H[3 * (N - 1) + 2, 0] = t3 * phase
        H[0, 3 * (N - 1) + 2] = t3 * phase.conjugate()
    labels = tuple((m, s) for m in range(N) for s in "ABC")
    return HermitianMatrix(H, labels=labels, boundary=boundary, k=k)


def build_amo(alpha: Flux, theta: float, lam: float, N: int, boundary: str = "open", k: float = 0.0) -> HermitianMatrix:
    """N x N almost Mathieu matrix: hopping 1, diagonal 2 lam cos(2 pi (theta + m alpha))."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if lam <= 0:
        raise ValueError("lam must be positive")
    _check_periodic(alpha, N, boundary)
    a = _alpha_value(alpha)
    diag = 2.0 * lam * np.cos(2.0 * np.pi * (theta + a * np.arange(N)))
    if boundary == "periodic" and k != 0.0:
        H = np.zeros((N, N), dtype=complex)
    else:
        H = np.zeros((N, N), dtype=float)
    H[np.arange(N), np.arange(N)] = diag
    for m in range(N - 1):
        H[m, m + 1] += 1.0
        H[m + 1, m] += 1.0
    if boundary == "periodic":
        if N == 1:
            H[0, 0] += 2.0 * math.cos(k)
        else:
            H[N - 1, 0] += cmath.exp(1j * k) if np.iscomplexobj(H) else 1.0
            H[0, N - 1] += cmath.exp(-1j * k) if np.iscomplexobj(H) else 1.0
    return HermitianMatrix(H, labels=None, boundary=boundary, k=k)


def _factor_matrix(params, N: int) -> np.ndarray:
    """Rectangular map from the (B, C) sector to the A sector, open truncation.

    Columns 0..N-1 are B_0..B_{N-1}, columns N..2N-1 are C_0..C_{N-1}.
    """
    a = _alpha_value(params.alpha)
    F = np.zeros((N, 2 * N), dtype=complex)
    if isinstance(params, GeneralParams):
        tC_same, tC_prev = params.t2, params.t3
        for m in range(N):
            F[m, m] = cmath.exp(-1j * math.pi * m * a) * (
                1 + params.t4 * cmath.exp(2j * math.pi * (params.theta + m * a))
            )
            F[m, N + m] = tC_same
            if m >= 1:
                F[m, N + m - 1] = tC_prev
    else:
        for m in range(N):
            F[m, m] = kappa(m, params.theta + m * a, a)
            F[m, N + m] = params.t
            if m >= 1:
                F[m, N + m - 1] = params.t
    return F


def build_factor_product(params, N: int) -> HermitianMatrix:
    """The A-sector product of the two rectangular factor maps, open truncation.

    Interior rows reproduce t^2 (AMO + (2 + 2 t^-2) I) exactly; the first row
    misses one t^2 from the truncated left C bond.
    """
    if N < 3:
        raise ValueError("N must be >= 3")
    F = _factor_matrix(params, N)
    P = F @ F.conj().T
    # diagonal |K_m|^2, off-diagonals products of real hoppings: the product
    # is real; drop the roundoff-sized imaginary part and symmetrize
    M = (P.real + P.real.T) / 2.0
    return HermitianMatrix(np.ascontiguousarray(M), labels=None, boundary="open")


def build_lieb_bloch(p: int, q: int, t: float, theta: float, k: float) -> HermitianMatrix:
    """3q x 3q magnetic Bloch matrix of the single-coupling model at flux p/q.

    Gauged so the A-B coupling of cell m is 1 + e^{-2 pi i (theta + m p/q)};
    the C_{q-1} -> A_0 hopping wraps with phase e^{ik}.
    """
    if q < 1 or math.gcd(p, q) != 1:
        raise ValueError(f"need gcd(p, q) = 1, got {p}/{q}")
    H = np.zeros((3 * q, 3 * q), dtype=complex)
    for m in range(q):
        A, B, C = 3 * m, 3 * m + 1, 3 * m + 2
        K = 1 + cmath.exp(-2j * math.pi * (theta + m * p / q))
        H[A, B] = K
        H[B, A] = K.conjugate()
        H[A, C] += t
        H[C, A] += t
        Cprev = 3 * ((m - 1) % q) + 2
        phase = cmath.exp(-1j * k) if m == 0 else 1.0
        H[A, Cprev] += t * phase
        H[Cprev, A] += t * phase.conjugate()
    labels = tuple((m, s) for m in range(q) for s in "ABC")
    return HermitianMatrix(H, labels=labels, boundary="periodic", k=k)


def build_general_bloch(p: int, q: int, params: GeneralParams, theta: float, k: float) -> HermitianMatrix:
    """General-coupling magnetic Bloch matrix at flux p/q (same gauge as above)."""
    if q < 1 or math.gcd(p, q) != 1:
        raise ValueError(f"need gcd(p, q) = 1, got {p}/{q}")
    t2, t3, t4 = params.t2, params.t3, params.t4
    H = np.zeros((3 * q, 3 * q), dtype=complex)
    for m in range(q):
        A, B, C = 3 * m, 3 * m + 1, 3 * m + 2
        K = 1 + t4 * cmath.exp(2j * math.pi * (theta + m * p / q))
        H[A, B] = K
        H[B, A] = K.conjugate()
        H[A, C] += t2
        H[C, A] += t2
        Cprev = 3 * ((m - 1) % q) + 2
        phase = cmath.exp(-1j * k) if m == 0 else 1.0
        H[A, Cprev] += t3 * phase
        H[Cprev, A] += t3 * phase.conjugate()
    labels = tuple((m, s) for m in range(q) for s in "ABC")
    return HermitianMatrix(H, labels=labels, boundary="periodic", k=k)


def build_lieb_2d_torus(p: int, q: int, t: float, Lx: int, Ly: int) -> HermitianMatrix:
    """Torus operator on Lx x Ly magnetic unit cells (3 Lx Ly sites).

    The y bonds of column m carry phases e^{+-i pi m p/q}; both directions
    wrap periodically.  Requires q | Lx so a whole number of magnetic cells
    fits in the x direction.
    """
    if q < 1 or math.gcd(p, q) != 1:
        raise ValueError(f"need gcd(p, q) = 1, got {p}/{q}")
    if Lx % q != 0:
        raise ConfigurationError(f"torus needs q | Lx, got q={q}, Lx={Lx}")
    if Ly < 1:
        raise ValueError("Ly must be >= 1")
    a = p / q
    n_sites = 3 * Lx * Ly

    def idx(m, n, s):
        return 3 * ((m % Lx) * Ly + (n % Ly)) + s

    H = np.zeros((n_sites, n_sites), dtype=complex)
    for m in range(Lx):
        ph = cmath.exp(1j * math.pi * m * a)
        for n in range(Ly):
            A = idx(m, n, 0)
            H[A, idx(m, n, 1)] += ph            # B_{m,n}
            H[idx(m, n, 1), A] += ph.conjugate()
            H[A, idx(m, n - 1, 1)] += ph.conjugate()  # B_{m,n-1}
            H[idx(m, n - 1, 1), A] += ph
            H[A, idx(m, n, 2)] += t
            H[idx(m, n, 2), A] += t
            H[A, idx(m - 1, n, 2)] += t
            H[idx(m - 1, n, 2), A] += t
    labels = tuple(((m, n), s) for m in range(Lx) for n in range(Ly) for s in "ABC")
    return HermitianMatrix(H, labels=labels, boundary="periodic", k=0.0)


def sign_flip_A(M: HermitianMatrix) -> HermitianMatrix:
    """Conjugate by the unitary that negates the A components.

    For any bipartite Lieb-family matrix the result equals -M entrywise
    (exactly: only sign flips are performed).
    """
    if M.labels is None:
        raise ValueError("sign_flip_A needs a matrix with sublattice labels")
    signs = np.array([-1.0 if s == "A" else 1.0 for (_, s) in M.labels])
    flipped = signs[:, None] * M.matrix * signs[None, :]
    return HermitianMatrix(flipped, labels=M.labels, boundary=M.boundary, k=M.k)


# -- matrix dump format ------------------------------------------------------

def dump_matrix(M: HermitianMatrix, path_or_file) -> None:
    """Write nonzero entries as ``i j re im`` triplets under a v1 header."""
    own = isinstance(path_or_file, (str, bytes))
    fh = open(path_or_file, "w") if own else path_or_file
    try:
        fh.write(f"# lieb-matrix v1 n={M.n} boundary={M.boundary_tag()}\n")
        rows, cols = np.nonzero(M.matrix)
        for i, j in zip(rows.tolist(), cols.tolist()):
            z = complex(M.matrix[i, j])
            fh.write(f"{i} {j} {z.real!r} {z.imag!r}\n")
    finally:
        if own:
            fh.close()


def load_matrix(path_or_file) -> HermitianMatrix:
    """Read a matrix written by :func:`dump_matrix` (labels are not stored)."""
    own = isinstance(path_or_file, (str, bytes))
    fh = open(path_or_file) if own else path_or_file
    try:
        header = fh.readline().split()
        if header[:3] != ["#", "lieb-matrix", "v1"]:
            raise ValueError(f"bad matrix header: {' '.join(header)}")
        fields = dict(part.split("=", 1) for part in header[3:])
        n = int(fields["n"])
        tag = fields["boundary"]
        if tag.startswith("periodic"):
            boundary = "periodic"
            k = float(tag.split("k=", 1)[1]) if "k=" in tag else 0.0
        else:
            boundary, k = "open", 0.0
        H = np.zeros((n, n), dtype=complex)
        for line in fh:
            if not line.strip():
                continue
            i, j, re_part, im_part = line.split()
            H[int(i), int(j)] = float(re_part) + 1j * float(im_part)
    finally:
        if own:
            fh.close()
    return HermitianMatrix(H, labels=None, boundary=boundary, k=k)


def dump_matrix_str(M: HermitianMatrix) -> str:
    buf = io.StringIO()
    dump_matrix(M, buf)
    return buf.getvalue()
