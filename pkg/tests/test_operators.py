"""Hamiltonian builders: closed forms, structure, symmetry, consistency."""

import io
import math

import numpy as np
import pytest

from lieb_spectra.arithmetic import Flux
from lieb_spectra.operators import (
    ConfigurationError,
    GeneralParams,
    HermitianMatrix,
    LiebParams,
    build_amo,
    build_factor_product,
    build_general_1d,
    build_general_bloch,
    build_lieb_1d,
    build_lieb_2d_torus,
    build_lieb_bloch,
    dump_matrix_str,
    load_matrix,
    sign_flip_A,
)

GOLDEN = Flux.named("golden")
ZERO_FLUX = Flux.rational(0, 1)


def lieb(alpha=GOLDEN, theta=0.0, t=1.0):
    return LiebParams(alpha=alpha, theta=theta, t=t)


def test_lieb_1d_single_cell_closed_form():
    # characteristic polynomial x^3 = (|K|^2 + t^2) x with K_0(0) = 2
    eigs = np.sort(build_lieb_1d(lieb(ZERO_FLUX), 1).eigenvalues())
    assert eigs == pytest.approx([-math.sqrt(5), 0.0, math.sqrt(5)], abs=1e-12)


def test_lieb_1d_half_phase_decouples_b():
    eigs = np.sort(build_lieb_1d(lieb(ZERO_FLUX, theta=0.5, t=0.7), 1).eigenvalues())
    assert eigs == pytest.approx([-0.7, 0.0, 0.7], abs=1e-12)


@pytest.mark.parametrize(
    "build",
    [
        lambda: build_lieb_1d(lieb(theta=0.37, t=0.8), 9),
        lambda: build_general_1d(
            GeneralParams(alpha=GOLDEN, theta=0.21, t2=0.7, t3=1.3, t4=0.9), 7
        ),
        lambda: build_lieb_bloch(2, 5, 1.2, 0.13, 0.7),
        lambda: build_lieb_2d_torus(1, 3, 0.9, 3, 2),
    ],
)
def test_zero_diagonal_and_bipartite(build):
    M = build()
    mat, labels = M.matrix, M.labels
    assert np.abs(np.diag(mat)).max() == 0.0
    for i in range(M.n):
        for j in range(M.n):
            if mat[i, j] != 0:
                si, sj = labels[i][1], labels[j][1]
                assert (si == "A") != (sj == "A"), "coupling must join A to B or C"


def test_periodic_requires_commensurate_cells():
    with pytest.raises(ConfigurationError):
        build_lieb_1d(lieb(Flux.rational(1, 3)), 4, boundary="periodic")
    with pytest.raises(ConfigurationError):
        build_lieb_1d(lieb(GOLDEN), 5, boundary="periodic")
    build_lieb_1d(lieb(Flux.rational(1, 3)), 6, boundary="periodic")


def test_amo_examples():
    M = build_amo(ZERO_FLUX, 0.0, 1.0, 2)
    assert np.array_equal(M.matrix, np.array([[2.0, 1.0], [1.0, 2.0]]))
    assert np.sort(M.eigenvalues()) == pytest.approx([1.0, 3.0], abs=1e-12)
    M3 = build_amo(ZERO_FLUX, 0.25, 1.7, 3)
    assert np.abs(np.diag(M3.matrix)).max() < 1e-15


def test_factor_product_interior_identity():
    for t in (0.5, 1.0, 2.0):
        params = lieb(theta=0.13, t=t)
        N = 40
        product = build_factor_product(params, N).matrix
        amo = build_amo(GOLDEN, 0.13, t**-2, N).matrix
        ref = t * t * (amo + (2 + 2 * t**-2) * np.eye(N))
        assert np.abs(product[2 : N - 2] - ref[2 : N - 2]).max() <= 1e-13
        # first row misses exactly one t^2 from the truncated left C bond
        assert product[0, 0] == pytest.approx(ref[0, 0] - t * t, abs=1e-12)


def test_factor_product_center_diagonal_n3():
    # t=1, theta=0, alpha=0: center diagonal |K|^2 + 2 t^2 = 6
    P = build_factor_product(lieb(ZERO_FLUX), 3).matrix
    assert P[1, 1] == pytest.approx(6.0, abs=1e-13)


def test_bloch_q1_closed_form():
    eigs = np.sort(build_lieb_bloch(0, 1, 1.0, 0.0, 0.0).eigenvalues())
    assert eigs == pytest.approx([-math.sqrt(8), 0.0, math.sqrt(8)], abs=1e-12)


@pytest.mark.parametrize("p,q,t", [(1, 2, 1.0), (1, 3, 0.8), (2, 5, 1.4)])
def test_bloch_flat_band_and_symmetry(p, q, t):
    for theta in (0.0, 0.31, 0.77):
        for k in (0.0, 1.1, math.pi):
            eigs = np.sort(build_lieb_bloch(p, q, t, theta, k).eigenvalues())
            assert min(abs(e) for e in eigs) < 1e-12  # flat band
            assert np.abs(eigs + eigs[::-1]).max() < 1e-12  # symmetric spectrum


def test_general_reduces_to_single_coupling():
    t = 0.8
    g = GeneralParams(alpha=GOLDEN, theta=0.13, t2=t, t3=t, t4=1.0)
    e_gen = np.sort(build_general_1d(g, 50).eigenvalues())
    e_lieb = np.sort(build_lieb_1d(lieb(theta=0.13, t=t), 50).eigenvalues())
    assert np.abs(e_gen - e_lieb).max() < 1e-12


def test_general_single_cell_kill_b():
    g = GeneralParams(alpha=ZERO_FLUX, theta=0.5, t2=0.6, t3=1.1, t4=1.0)
    eigs = np.sort(build_general_1d(g, 1).eigenvalues())
    assert eigs == pytest.approx([-0.6, 0.0, 0.6], abs=1e-12)


def test_general_flat_band_everywhere():
    g = GeneralParams(alpha=GOLDEN, theta=0.29, t2=0.7, t3=1.3, t4=0.9)
    for builder in (build_general_1d(g, 11), build_general_bloch(1, 4, g, 0.3, 0.9)):
        assert min(abs(e) for e in builder.eigenvalues()) < 1e-12


def test_torus_matches_theta_union():
    T = build_lieb_2d_torus(1, 3, 1.0, 3, 4)
    ev2 = np.sort(T.eigenvalues())
    ev1 = np.sort(
        np.concatenate(
            [
                build_lieb_1d(
                    lieb(Flux.rational(1, 3), theta=j / 4), 3, boundary="periodic"
                ).eigenvalues()
                for j in range(4)
            ]
        )
    )
    assert np.abs(ev2 - ev1).max() < 1e-12


def test_torus_zero_flux_closed_form():
    # alpha=0: torus eigenvalues equal the q=1 Bloch eigenvalues over the
    # discrete momentum grid theta_j = j/2, k_l in {0, pi}
    ev2 = np.sort(build_lieb_2d_torus(0, 1, 1.0, 2, 2).eigenvalues())
    evb = np.sort(
        np.concatenate(
            [
                build_lieb_bloch(0, 1, 1.0, th, k).eigenvalues()
                for th in (0.0, 0.5)
                for k in (0.0, math.pi)
            ]
        )
    )
    assert np.abs(ev2 - evb).max() < 1e-12


def test_torus_requires_commensurate_lx():
    with pytest.raises(ConfigurationError):
        build_lieb_2d_torus(1, 3, 1.0, 4, 2)


def test_sign_flip_negates_exactly():
    M = build_lieb_1d(lieb(theta=0.37, t=0.8), 12)
    assert np.array_equal(sign_flip_A(M).matrix, -M.matrix)
    G = build_general_1d(GeneralParams(alpha=GOLDEN, theta=0.2, t2=0.7, t3=1.3, t4=0.9), 20)
    assert np.array_equal(sign_flip_A(G).matrix, -G.matrix)
    T = build_lieb_2d_torus(1, 2, 1.1, 2, 2)
    assert np.array_equal(sign_flip_A(T).matrix, -T.matrix)


def test_sign_flip_zero_matrix():
    labels = tuple((m, s) for m in range(2) for s in "ABC")
    Z = HermitianMatrix(np.zeros((6, 6), dtype=complex), labels=labels)
    assert np.array_equal(sign_flip_A(Z).matrix, np.zeros((6, 6)))


def test_sign_flip_requires_labels():
    with pytest.raises(ValueError):
        sign_flip_A(build_amo(GOLDEN, 0.1, 1.0, 5))


def test_gauge_covariance_phase_shift():
    # theta -> theta + 1/q leaves the periodic eigenvalue multiset invariant
    for q, N in [(2, 2), (3, 3), (3, 6), (5, 10)]:
        p1 = lieb(Flux.rational(1, q), theta=0.21)
        p2 = lieb(Flux.rational(1, q), theta=0.21 + 1 / q)
        e1 = np.sort(build_lieb_1d(p1, N, boundary="periodic").eigenvalues())
        e2 = np.sort(build_lieb_1d(p2, N, boundary="periodic").eigenvalues())
        assert np.abs(e1 - e2).max() < 1e-12


def test_hermiticity_enforced():
    bad = np.array([[0.0, 1.0], [2.0, 0.0]])
    with pytest.raises(ValueError):
        HermitianMatrix(bad)


def test_dump_load_round_trip():
    M = build_lieb_1d(lieb(Flux.rational(1, 2), theta=0.4, t=1.3), 4, boundary="periodic")
    text = dump_matrix_str(M)
    assert text.startswith("# lieb-matrix v1 n=12 boundary=periodic:k=0.0")
    M2 = load_matrix(io.StringIO(text))
    assert np.abs(M2.matrix - M.matrix).max() == 0.0
    assert M2.boundary == "periodic"
