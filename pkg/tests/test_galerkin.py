import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import kp_gap_oracle
from hillgaps.galerkin import (ANTIPERIODIC, PERIODIC, InterlacingError, SectorMatrix,
                               SpectrumResult, TruncationCapError, band_edges, band_edges_fixed,
                               build_matrix, check_interlacing, gaps, hermitian_eigenvalues)
from hillgaps.potential import (delta_comb, make_potential, mathieu, power_decay, reflect, shift,
                                translate, zero)

FOUR_PI2 = 4 * np.pi ** 2


def test_free_matrices():
    m = build_matrix(zero(), PERIODIC, 1)
    assert np.array_equal(m.entries, np.diag([FOUR_PI2, 0, FOUR_PI2]))
    assert np.array_equal(m.modes, [-1, 0, 1])
    m = build_matrix(zero(), ANTIPERIODIC, 1)
    assert np.allclose(m.entries, np.diag([np.pi ** 2, np.pi ** 2]), rtol=1e-15)
    assert np.array_equal(m.modes, [-1, 0])


def test_mathieu_matrix():
    c = 0.05
    A = build_matrix(mathieu(c), PERIODIC, 1).entries
    assert np.array_equal(np.diag(A).real, [FOUR_PI2, 0, FOUR_PI2])
    assert np.all(np.diag(A, 1) == c) and np.all(np.diag(A, -1) == c)
    assert A[0, 2] == 0 and np.allclose(A, A.conj().T)


def test_entries_are_qhat_of_index_difference():
    q = power_decay(2, 5)
    m = build_matrix(q, ANTIPERIODIC, 6)
    j, k = np.meshgrid(np.arange(12), np.arange(12), indexing="ij")
    off = j != k
    assert np.array_equal(m.entries[off], q.coeff((j - k)[off]))


def test_eigen_examples():
    m = SectorMatrix(PERIODIC, 1, np.diag([FOUR_PI2, 0, FOUR_PI2]).astype(complex))
    assert np.array_equal(hermitian_eigenvalues(m), [0, FOUR_PI2, FOUR_PI2])
    c = -0.3
    m = SectorMatrix(ANTIPERIODIC, 1, np.array([[0, c], [c, 0]], dtype=complex))
    assert np.allclose(hermitian_eigenvalues(m), [-abs(c), abs(c)], atol=1e-16)


def test_eigen_against_numpy():
    m = build_matrix(power_decay(1, 2), PERIODIC, 40)
    ref = np.linalg.eigvalsh(m.entries)
    assert np.allclose(hermitian_eigenvalues(m), ref, rtol=1e-12, atol=1e-9)
    assert np.allclose(hermitian_eigenvalues(m, 7), ref[:7], rtol=1e-12, atol=1e-9)


def test_mathieu_ground_state_perturbation():
    q = mathieu(0.05)
    k = np.arange(-32, 33)
    k = k[k != 0]
    second_order = np.sum(np.abs(q.coeff(k)) ** 2 / (0 - (2 * np.pi * k) ** 2))
    mu0 = hermitian_eigenvalues(build_matrix(q, PERIODIC, 32), 1)[0]
    assert mu0 == pytest.approx(second_order, abs=1e-8)
    assert mu0 == pytest.approx(-1.2665e-4, rel=1e-3)


def test_free_band_edges():
    res = band_edges(zero(), 5)
    assert res.lambda0 == 0
    n = np.arange(1, 6)
    assert np.allclose(res.pairs, np.c_[(n * np.pi) ** 2, (n * np.pi) ** 2], rtol=1e-14)
    assert np.all(gaps(res).gamma == 0)


@pytest.mark.parametrize("N", [5, 17, 64])
def test_free_exact_for_any_N(N):
    res = band_edges_fixed(zero(), 5, N)
    n = np.arange(1, 6)
    assert np.allclose(res.pairs.ravel(), np.repeat((n * np.pi) ** 2, 2), rtol=1e-14)


def test_mathieu_gaps():
    g = gaps(band_edges(mathieu(0.05), 3))
    assert g[1] == pytest.approx(0.1, rel=0.05)
    assert g[2] < 0.01 and g[3] < 0.01


def test_delta_comb_gaps_vs_closed_form():
    g = gaps(band_edges_fixed(delta_comb(1), 10, 512))
    exact = np.array([kp_gap_oracle(1.0, n) for n in range(1, 11)])
    assert np.allclose(g.gamma, exact, rtol=0.03)
    assert np.all(np.diff(exact) > 0) and np.all(exact < 2)


def test_gaps_subtraction_and_clamp():
    res = SpectrumResult(0.0, np.array([[9.0, 9.5], [40.0, 40.0 - 1e-13]]), np.array([1e-12] * 3))
    g = gaps(res)
    assert g[1] == 0.5 and g[2] == 0.0
    bad = SpectrumResult(0.0, np.array([[9.0, 8.0]]), np.array([1e-12, 1e-12]))
    with pytest.raises(InterlacingError):
        gaps(bad)


def test_interlacing_detects_disorder():
    with pytest.raises(InterlacingError):
        check_interlacing(SpectrumResult(1.0, np.array([[0.5, 2.0]]), np.zeros(2)))
    with pytest.raises(InterlacingError):
        check_interlacing(SpectrumResult(0.0, np.array([[2.0, 3.0], [2.5, 4.0]]), np.zeros(3)))


def test_cap_reached():
    with pytest.raises(TruncationCapError):
        band_edges(delta_comb(1), 4, tol=1e-8, N_cap=64)


def test_err_est_is_honest():
    q = power_decay(2, 1)
    res = band_edges(q, 8, tol=1e-9)
    ref = band_edges_fixed(q, 8, 256)
    assert np.all(np.abs(res.pairs - ref.pairs).max(axis=1) <= res.err_est[1:] + ref.err_est[1:])
    assert res.N_used[PERIODIC] == res.N_used[ANTIPERIODIC]


def test_increments_shrink_for_power_decay():
    q = power_decay(1, 0)
    edges = [band_edges_fixed(q, 6, N).edges() for N in (24, 48, 96, 192)]
    inc = [np.max(np.abs(b - a)) for a, b in zip(edges, edges[1:])]
    assert inc[1] < inc[0] and inc[2] < inc[1]


def test_shift_invariance_matrix_level():
    q = power_decay(2, 4)
    for sector in (PERIODIC, ANTIPERIODIC):
        a = hermitian_eigenvalues(build_matrix(q, sector, 20))
        b = hermitian_eigenvalues(build_matrix(shift(q, 3.5), sector, 20))
        assert np.allclose(b, a + 3.5, atol=1e-11)


@settings(max_examples=8, deadline=None)
@given(st.floats(-1, 1), st.integers(0, 1000))
def test_translation_and_reflection_invariance(a, seed):
    q = power_decay(2.5, seed)
    base = band_edges_fixed(q, 6, 48).edges()
    for other in (translate(q, a), reflect(q)):
        assert np.allclose(band_edges_fixed(other, 6, 48).edges(), base, atol=1e-10)


@settings(max_examples=15, deadline=None)
@given(st.lists(st.tuples(st.integers(1, 6), st.floats(-2, 2)), max_size=4, unique_by=lambda t: t[0]))
def test_interlacing_for_trig_polynomials(pairs):
    res = band_edges(make_potential(pairs), 6)
    check_interlacing(res)
    assert np.all(gaps(res).gamma >= 0)
