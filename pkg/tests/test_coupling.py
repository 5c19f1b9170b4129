import numpy as np
import pytest

from conftest import random_lattice
from subradiance.coupling import assemble, gauge_strip, pair_couplings
from subradiance.errors import DomainError
from subradiance.geometry import build_lattice, separation
from subradiance.hilbert import HilbertSpace, enumerate_configs, sort_pair
from subradiance.kernel import eval_f, eval_g, kernel_matrices
from subradiance.spectral import match_spectra


def brute_force_matrix(space, lat):
    """Entry-by-entry assembly straight from the sort function; slow but independent."""
    configs = enumerate_configs(space.N, space.M)
    A = np.zeros((space.dim, space.dim), dtype=complex)
    for n, a in enumerate(configs):
        for m, b in enumerate(configs):
            if n == m:
                A[n, m] = -space.M / 2
                continue
            s1, s2 = sort_pair(a, b)
            if (s1, s2) == (0, 0):
                continue
            xi, r_hat, r_vec = separation(lat, s1, s2)
            c = float(lat.d_hat @ r_hat)
            A[n, m] = (-eval_f(xi, c) / 2 + 1j * eval_g(xi, c)) * np.exp(-1j * lat.k_vec @ r_vec)
    return A


@pytest.mark.parametrize(
    "dims, M, spacing",
    [((1, 1, 4), 2, 0.25), ((1, 1, 5), 3, 0.1), ((2, 2, 1), 2, 0.3), ((1, 2, 3), 3, 0.2), ((1, 1, 6), 1, 0.15)],
)
def test_assembly_matches_brute_force(dims, M, spacing):
    lat = build_lattice(dims, spacing, d_hat=(1, 0.2, 0.1), k_hat=(0.3, 0.1, 1))
    space = HilbertSpace(lat.N, M)
    np.testing.assert_allclose(assemble(space, lat).matrix, brute_force_matrix(space, lat), atol=1e-14)


def test_single_atom():
    A = assemble(HilbertSpace(1, 1), build_lattice((1, 1, 1), 0.25))
    np.testing.assert_array_equal(A.matrix, [[-0.5]])


def test_paper_zero_entries():
    A = assemble(HilbertSpace(4, 2), build_lattice((1, 1, 4), 0.25)).matrix
    assert A[0, 5] == 0 and A[1, 4] == 0
    assert A[5, 0] == 0 and A[4, 1] == 0


def test_equal_separation_equal_magnitude():
    # (1,2)->(1,3) moves 2<->3 and (2,3)->(2,4) moves 3<->4: both nearest neighbours
    A = assemble(HilbertSpace(4, 2), build_lattice((1, 1, 4), 0.2)).matrix
    assert abs(A[0, 1]) == pytest.approx(abs(A[3, 4]), rel=1e-14)
    assert abs(A[0, 1]) > 0


def test_dimension_mismatch():
    with pytest.raises(DomainError):
        assemble(HilbertSpace(5, 2), build_lattice((1, 1, 4), 0.25))


@pytest.mark.parametrize("N, M", [(6, 1), (6, 2), (7, 3), (8, 4)])
def test_structure(N, M):
    space = HilbertSpace(N, M)
    A = assemble(space, build_lattice((1, 1, N), 0.23, d_hat=(1, 0, 1)))
    m = A.matrix
    assert np.all(np.diag(m) == -M / 2)
    assert np.trace(m) == -space.dim * M / 2
    off = m.copy()
    np.fill_diagonal(off, 0)
    assert np.all(np.count_nonzero(off, axis=1) == M * (N - M)) and A.nonzeros_per_row == M * (N - M)
    cfgs = enumerate_configs(N, M)
    for n in range(space.dim):
        for k in range(space.dim):
            if n != k and sort_pair(cfgs[n], cfgs[k]) == (0, 0):
                assert m[n, k] == 0


def test_gauge_strip_identity_when_k_zero():
    lat = build_lattice((1, 1, 5), 0.25, k_mag=0.0)
    A = assemble(HilbertSpace(5, 2), lat)
    np.testing.assert_array_equal(gauge_strip(A).matrix, A.matrix)


def test_gauge_strip_gives_bare_couplings(rng):
    for _ in range(5):
        lat = random_lattice(rng, 8)
        space = HilbertSpace(lat.N, min(2, lat.N))
        B = gauge_strip(assemble(space, lat)).matrix
        np.testing.assert_allclose(B, B.T, atol=1e-14)
        F, G = kernel_matrices(lat)
        K0 = -F / 2 + 1j * G
        A0 = assemble(space, build_lattice(lat.dims, lat.spacing, lat.d_hat, lat.k_hat, k_mag=0.0)).matrix
        np.testing.assert_allclose(B, A0, atol=1e-14)
        assert np.allclose(pair_couplings(build_lattice(lat.dims, lat.spacing, lat.d_hat, lat.k_hat, k_mag=0.0)),
                           K0 - np.diag(np.diag(K0)))


def test_gauge_strip_n3_m1_spectrum():
    A = assemble(HilbertSpace(3, 1), build_lattice((1, 1, 3), 0.25))
    B = gauge_strip(A)
    match_spectra(np.linalg.eigvals(A.matrix), np.linalg.eigvals(B.matrix), tol=1e-12)


@pytest.mark.parametrize("k_hat, k_mag", [((1, 0, 0), 2 * np.pi), ((0, 1, 1), 2 * np.pi), ((0, 0, 1), 1.3), ((1, 2, 3), 0.0)])
def test_spectrum_independent_of_k(k_hat, k_mag):
    space = HilbertSpace(7, 2)
    ref = np.linalg.eigvals(assemble(space, build_lattice((1, 1, 7), 0.2)).matrix)
    other = np.linalg.eigvals(assemble(space, build_lattice((1, 1, 7), 0.2, k_hat=k_hat, k_mag=k_mag)).matrix)
    match_spectra(ref, other, tol=1e-10)


@pytest.mark.parametrize(
    "dims, M, spacing", [((1, 1, 16), 2, 0.1), ((1, 1, 8), 3, 0.25), ((2, 2, 2), 2, 0.15), ((2, 3, 1), 3, 0.3)]
)
def test_dissipative(dims, M, spacing):
    lat = build_lattice(dims, spacing)
    space = HilbertSpace(lat.N, M)
    A = assemble(space, lat)
    assert np.linalg.eigvals(A.matrix).real.max() <= 1e-10
    B = gauge_strip(A).matrix
    herm = np.linalg.eigvalsh((B + B.conj().T) / 2)
    F, _ = kernel_matrices(lat)
    assert herm.max() <= 1e-10
    assert herm.min() >= -M * np.linalg.eigvalsh(F).max() / 2 - 1e-10


def test_csv_dump(tmp_path):
    A = assemble(HilbertSpace(4, 2), build_lattice((1, 1, 4), 0.25))
    path = A.to_csv(tmp_path / "A.csv")
    lines = path.read_text().splitlines()
    assert lines[0] == "row,col,re,im"
    assert len(lines) - 1 == np.count_nonzero(A.matrix) == 6 + 6 * 4
    rows = [l.split(",") for l in lines[1:]]
    for r, c, re, im in rows:
        z = A.matrix[int(r) - 1, int(c) - 1]
        assert float(re) == pytest.approx(z.real, rel=1e-11, abs=1e-14)
        assert float(im) == pytest.approx(z.imag, rel=1e-11, abs=1e-14)


def test_sparse_view():
    A = assemble(HilbertSpace(8, 3), build_lattice((1, 1, 8), 0.25))
    S = A.as_sparse()
    assert S.nnz == np.count_nonzero(A.matrix)
    assert not A.prefers_sparse
