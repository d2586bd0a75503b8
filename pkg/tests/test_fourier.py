import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hbvm.fourier import (
    FFT,
    FULL,
    MATRIX,
    ZERO_MEAN,
    SpectralBasis,
    basis_matrix,
    default_m,
    delta_h0_diagnostic,
    e0_diagnostic,
    fine_grid,
    project,
    reconstruct,
)
from hbvm.models import WaveModel
from hbvm.problems import kdv_problem, nls_problem, sine_gordon_problem


def gram(basis):
    B = basis_matrix(basis)
    return B.T @ (basis.weight * B)


# -- basis and differentiation -------------------------------------------------

def test_basis_matrix_examples():
    b = SpectralBasis(3, -2.0, 5.0)
    np.testing.assert_allclose(basis_matrix(b)[:, 0], 1 / math.sqrt(7.0), rtol=1e-15)
    b1 = SpectralBasis(1, 0.0, 1.0)
    assert basis_matrix(b1)[0, 2] == pytest.approx(math.sqrt(2.0), abs=1e-15)
    bz = SpectralBasis(1, 0.0, 1.0, ZERO_MEAN)
    assert basis_matrix(bz)[0, 0] == pytest.approx(math.sqrt(2.0), abs=1e-15)


@pytest.mark.parametrize("layout", [FULL, ZERO_MEAN])
def test_gram_identity(layout):
    b = SpectralBasis(8, 0.0, 3.0, layout, m=20)
    assert np.max(np.abs(gram(b) - np.eye(b.size))) <= 1e-12


def test_d_entries():
    L = 4.0
    b = SpectralBasis(3, 0.0, L)
    np.testing.assert_allclose(b.d, np.array([0, 1, 1, 2, 2, 3, 3]) * 2 * math.pi / L)
    bz = SpectralBasis(3, 0.0, L, ZERO_MEAN)
    np.testing.assert_allclose(bz.d, np.array([1, 2, 3]) * 2 * math.pi / L)


def test_dbar_properties():
    b = SpectralBasis(5, -1.0, 2.0)
    Db = b.Dbar
    assert np.array_equal(Db, -Db.T)
    np.testing.assert_allclose(Db @ Db.T, b.D @ b.D, atol=1e-13)
    v = np.random.default_rng(0).standard_normal(b.size)
    np.testing.assert_allclose(b.dbar_apply(v), Db @ v, atol=1e-14)
    with pytest.raises(ValueError):
        SpectralBasis(2, 0.0, 1.0, ZERO_MEAN).Dbar


def test_dbar_differentiates_basis():
    b = SpectralBasis(4, 0.0, 2.0)
    x = np.linspace(0.0, 2.0, 17)
    h = 1e-6
    fd = (b.evaluate(x + h) - b.evaluate(x - h)) / (2 * h)
    np.testing.assert_allclose(fd, b.evaluate(x) @ b.Dbar.T, atol=1e-7)


def test_default_m_and_validation():
    assert default_m(10, FULL) == 40 and default_m(10, ZERO_MEAN) == 31
    assert SpectralBasis(10, 0, 1).m == 40
    with pytest.raises(ValueError):
        SpectralBasis(4, 0.0, 1.0, m=8)
    with pytest.raises(ValueError):
        SpectralBasis(4, 1.0, 1.0)
    with pytest.raises(ValueError):
        SpectralBasis(0, 0.0, 1.0)
    with pytest.raises(ValueError):
        SpectralBasis(4, 0.0, 1.0, layout="odd")
    with pytest.raises(ValueError):
        SpectralBasis(4, 0.0, 1.0, transform="dct")


def test_grid_excludes_right_endpoint():
    b = SpectralBasis(3, -1.0, 1.0, m=8)
    np.testing.assert_allclose(b.grid, -1.0 + 0.25 * np.arange(8))
    assert b.weight == 0.25


def test_with_N_keeps_settings():
    b = SpectralBasis(5, 0.0, 2.0, ZERO_MEAN, transform=MATRIX)
    c = b.with_N(7)
    assert (c.N, c.layout, c.transform, c.m) == (7, ZERO_MEAN, MATRIX, default_m(7, ZERO_MEAN))
    assert SpectralBasis(5, 0.0, 2.0, m=40).with_N(7).m == 40


# -- projection and reconstruction -------------------------------------------------

def test_project_constant():
    b = SpectralBasis(6, 1.0, 5.0)
    q = project(b, lambda x: np.ones_like(x))
    expected = np.zeros(b.size)
    expected[0] = 2.0
    np.testing.assert_allclose(q, expected, atol=1e-14)


def test_project_unit_vector():
    b = SpectralBasis(6, 0.0, 3.0)
    c2 = lambda x: math.sqrt(2 / 3) * np.cos(2 * 2 * np.pi * x / 3)
    q = project(b, c2)
    e = np.zeros(b.size)
    e[4] = 1.0
    assert np.max(np.abs(q - e)) <= 1e-13


def test_project_product_to_sum():
    a, bb = -1.0, 2.0
    L = bb - a
    b = SpectralBasis(5, a, bb)
    arg = lambda x: 2 * np.pi * (x - a) / L
    q = project(b, lambda x: np.sin(arg(x)) * np.cos(arg(x)))
    e = np.zeros(b.size)
    e[3] = 0.5 * math.sqrt(L / 2)
    assert np.max(np.abs(q - e)) <= 1e-14


def test_project_zero_mean_returns_mean():
    b = SpectralBasis(4, 0.0, 2.0, ZERO_MEAN)
    q, mean = project(b, lambda x: 3.0 + np.sin(np.pi * x))
    assert mean == pytest.approx(3.0, abs=1e-14)
    e = np.zeros(8)
    e[4] = 1.0  # sin(2 pi x / L) normalised is sin(pi x), amplitude sqrt(2/L) = 1
    np.testing.assert_allclose(q, e, atol=1e-14)


def test_project_accepts_samples():
    b = SpectralBasis(3, 0.0, 1.0)
    f = lambda x: np.cos(2 * np.pi * x)
    np.testing.assert_array_equal(project(b, f(b.grid)), project(b, f))
    with pytest.raises(ValueError):
        project(b, np.zeros(b.m + 1))


def test_reconstruct_zero_and_mismatch():
    b = SpectralBasis(3, 0.0, 1.0, ZERO_MEAN)
    np.testing.assert_array_equal(reconstruct(b, np.zeros(6), u_hat0=1.5), np.full(b.m, 1.5))
    with pytest.raises(ValueError):
        reconstruct(b, np.zeros(7))


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), layout=st.sampled_from([FULL, ZERO_MEAN]))
def test_round_trip_on_span(seed, layout):
    rng = np.random.default_rng(seed)
    N = int(rng.integers(1, 12))
    b = SpectralBasis(N, -1.0, 2.5, layout)
    q = rng.standard_normal(b.size)
    x = rng.uniform(-1.0, 2.5, 13)
    f = lambda pts: b.evaluate(pts) @ q
    back = project(b, f)
    q2 = back[0] if layout == ZERO_MEAN else back
    np.testing.assert_allclose(q2, q, atol=1e-12)
    np.testing.assert_allclose(reconstruct(b, q2, x), f(x), atol=1e-12)


def test_sech_round_trip_sine_gordon_interval():
    b = SpectralBasis(250, -50.0, 50.0)
    v0 = lambda x: 4 / 1.5 / np.cosh(x / 1.5)
    q = project(b, v0)
    x = fine_grid(b, 3)
    assert np.max(np.abs(reconstruct(b, q, x) - v0(x))) <= 1e-11


# -- FFT and matrix transforms -------------------------------------------------------

@pytest.mark.parametrize("layout", [FULL, ZERO_MEAN])
@pytest.mark.parametrize("m", [None, 25, 26])
def test_fft_matches_matrix(layout, m):
    rng = np.random.default_rng(7)
    bf = SpectralBasis(12, -3.0, 4.0, layout, m=m, transform=FFT)
    bm = SpectralBasis(12, -3.0, 4.0, layout, m=m, transform=MATRIX)
    c = rng.standard_normal((3, bf.size))
    v = rng.standard_normal((3, bf.m))
    np.testing.assert_allclose(bf.synthesize(c), bm.synthesize(c), atol=1e-13)
    np.testing.assert_allclose(bf.analyze(v), bm.analyze(v), atol=1e-13)


# -- quadrature exactness and Parseval --------------------------------------------------

def test_pair_products_exact():
    b = SpectralBasis(7, 0.0, 1.0, m=16)
    assert np.max(np.abs(gram(b) - np.eye(b.size))) <= 1e-13


def test_triple_products_exact():
    N = 6
    coarse = SpectralBasis(N, 0.0, 2.0, ZERO_MEAN, m=3 * N + 1)
    fine = SpectralBasis(N, 0.0, 2.0, ZERO_MEAN, m=12 * N)

    def triples(b):
        B = basis_matrix(b)
        return np.einsum("xi,xj,xk->ijk", B, B, B) * b.weight

    assert np.max(np.abs(triples(coarse) - triples(fine))) <= 1e-13


@pytest.mark.parametrize("layout", [FULL, ZERO_MEAN])
def test_parseval(layout):
    rng = np.random.default_rng(11)
    b = SpectralBasis(9, -2.0, 3.0, layout)
    q = rng.standard_normal(b.size)
    mean = 0.7 if layout == ZERO_MEAN else 0.0
    u = reconstruct(b, q, u_hat0=mean)
    expected = q @ q + b.L * mean ** 2
    assert b.weight * np.sum(u * u) == pytest.approx(expected, abs=1e-12 * max(1.0, expected))


def test_derivative_consistency():
    rng = np.random.default_rng(2)
    b = SpectralBasis(20, -1.0, 1.0)
    q = rng.standard_normal(b.size)
    x = np.linspace(-1.0, 1.0, 50)
    j = np.arange(1, b.N + 1) * 2 * np.pi / b.L
    arg = np.multiply.outer(x + 1.0, j)
    amp = math.sqrt(2 / b.L)
    exact = amp * ((np.cos(arg) * j) @ q[1::2] - (np.sin(arg) * j) @ q[2::2])
    got = reconstruct(b, b.Dbar.T @ q, x)
    assert np.max(np.abs(got - exact)) <= 1e-10 * np.linalg.norm(q) * b.N


# -- diagnostics -----------------------------------------------------------------------

def test_e0_in_span():
    b = SpectralBasis(5, 0.0, 1.0)
    u = lambda x: 1 + np.sin(2 * np.pi * x) - 0.3 * np.cos(6 * np.pi * x)
    assert e0_diagnostic(b, u, project(b, u)) <= 1e-13
    bz = SpectralBasis(5, 0.0, 1.0, ZERO_MEAN)
    q, mean = project(bz, u)
    assert e0_diagnostic(bz, u, q, u_hat0=mean) <= 1e-13


def test_delta_h0_polynomial_in_span():
    factory = lambda n: WaveModel(SpectralBasis(n, 0.0, 1.0), lambda u: u, lambda u: 0.5 * u * u)
    u0 = lambda x: np.cos(2 * np.pi * x)
    v0 = lambda x: 0.5 + np.sin(4 * np.pi * x)
    assert delta_h0_diagnostic(factory, 20, u0, v0) <= 1e-13
    with pytest.raises(ValueError):
        delta_h0_diagnostic(factory, 1, u0, v0)


@pytest.mark.parametrize("make", [sine_gordon_problem, nls_problem, kdv_problem])
def test_paper_resolutions_are_adequate(make):
    prob = make()
    assert prob.e0() <= 1e-11
    if make is not kdv_problem:
        assert prob.delta_h0() <= 1e-11
