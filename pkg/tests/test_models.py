import math

import numpy as np
import pytest
import scipy.special
from hypothesis import given, settings
from hypothesis import strategies as st

from hbvm.elliptic import elliptic_k, jacobi_cn, jacobi_ellipj, jacobi_sn
from hbvm.fourier import FULL, MATRIX, ZERO_MEAN, SpectralBasis
from hbvm.models import (
    CnoidalParams,
    KdvModel,
    NlsModel,
    WaveModel,
    reference_kdv,
    reference_nls,
    reference_sine_gordon,
    reference_sine_gordon_t,
    sech,
)
from hbvm.problems import kdv_problem, nls_problem, sine_gordon_problem

RNG = np.random.default_rng(1234)


def fd_gradient(H, y, h=1e-6):
    g = np.empty_like(y)
    for i in range(y.size):
        e = np.zeros_like(y)
        e[i] = h
        g[i] = (H(y + e) - H(y - e)) / (2 * h)
    return g


def fd_weights(deriv, offsets):
    """Finite-difference weights for ``deriv`` on the integer ``offsets``."""
    offsets = np.asarray(offsets, dtype=float)
    V = np.vander(offsets, increasing=True).T
    rhs = np.zeros(len(offsets))
    rhs[deriv] = math.factorial(deriv)
    return np.linalg.solve(V, rhs)


STENCIL = np.arange(-4, 5)


def fd(f, x, deriv, h):
    w = fd_weights(deriv, STENCIL)
    return sum(wi * f(x + k * h) for wi, k in zip(w, STENCIL)) / h ** deriv


def wave_model(N=8, transform="fft"):
    return WaveModel(SpectralBasis(N, -3.0, 4.0, FULL, transform=transform), np.sin,
                     lambda u: 1 - np.cos(u))


def nls_model(N=8, transform="fft"):
    return NlsModel(SpectralBasis(N, -3.0, 4.0, FULL, transform=transform), lambda r: 2 * r,
                    lambda r: r * r)


def kdv_model(N=8, alpha=-0.01, beta=-1.0, u_hat0=0.4, m=None, transform="fft"):
    return KdvModel(SpectralBasis(N, 0.0, 1.0, ZERO_MEAN, m=m, transform=transform), alpha, beta, u_hat0)


# -- gradient structure --------------------------------------------------------------

@pytest.mark.parametrize("transform", ["fft", MATRIX])
def test_wave_rhs_is_minus_gradient(transform):
    model = wave_model(transform=transform)
    q = 0.5 * RNG.standard_normal(model.n)
    p = RNG.standard_normal(model.n)
    g = fd_gradient(lambda qq: model.hamiltonian(np.concatenate([qq, p])), q)
    rhs = model.rhs(q)
    assert np.max(np.abs(rhs + g)) <= 1e-6 * np.max(np.abs(rhs))


@pytest.mark.parametrize("transform", ["fft", MATRIX])
def test_nls_rhs_is_canonical(transform):
    model = nls_model(transform=transform)
    y = 0.5 * RNG.standard_normal(2 * model.n)
    g = fd_gradient(model.hamiltonian, y)
    J = np.concatenate([g[model.n:], -g[:model.n]])
    rhs = model.rhs(y)
    assert np.max(np.abs(rhs - J)) <= 1e-6 * np.max(np.abs(rhs))


@pytest.mark.parametrize("transform", ["fft", MATRIX])
def test_kdv_rhs_is_poisson(transform):
    model = kdv_model(transform=transform)
    N = model.N
    y = 0.3 * RNG.standard_normal(2 * N)
    g = fd_gradient(model.hamiltonian, y)
    expected = np.concatenate([model.d * g[N:], -model.d * g[:N]])
    rhs = model.rhs(y)
    assert np.max(np.abs(rhs - expected)) <= 1e-6 * np.max(np.abs(rhs))


def test_rhs_accepts_stacked_states():
    for model, size in ((nls_model(), 34), (kdv_model(), 16)):
        Y = RNG.standard_normal((3, size))
        np.testing.assert_allclose(model.rhs(Y), np.stack([model.rhs(y) for y in Y]), atol=1e-13)
    w = wave_model()
    Q = RNG.standard_normal((3, w.n))
    np.testing.assert_allclose(w.rhs(Q), np.stack([w.rhs(q) for q in Q]), atol=1e-13)


# -- zero states and degenerate cases ---------------------------------------------------

def test_zero_states():
    w = wave_model()
    assert np.all(w.rhs(np.zeros(w.n)) == 0) and w.hamiltonian(np.zeros(2 * w.n)) == 0
    n = nls_model()
    assert np.all(n.rhs(np.zeros(2 * n.n)) == 0)
    assert n.invariants(np.zeros(2 * n.n)) == (0.0, 0.0, 0.0)
    k = kdv_model(u_hat0=0.0)
    assert np.all(k.rhs(np.zeros(16)) == 0) and k.hamiltonian(np.zeros(16)) == 0


def test_linear_cases():
    b = SpectralBasis(6, 0.0, 2.0)
    q = RNG.standard_normal(b.size)
    w = WaveModel(b, lambda u: np.zeros_like(u), lambda u: np.zeros_like(u))
    np.testing.assert_allclose(w.rhs(q), -(b.d ** 2) * q, atol=1e-14)

    n = NlsModel(b, lambda r: np.zeros_like(r), lambda r: np.zeros_like(r))
    y = RNG.standard_normal(2 * b.size)
    d2 = b.d ** 2
    np.testing.assert_allclose(n.rhs(y), np.concatenate([d2 * y[b.size:], -d2 * y[:b.size]]), atol=1e-13)

    # beta = 0: q' = -alpha D^3 p, p' = alpha D^3 q
    k = kdv_model(alpha=0.3, beta=0.0)
    y = RNG.standard_normal(16)
    d3 = k.d ** 3
    np.testing.assert_allclose(k.rhs(y), np.concatenate([-0.3 * d3 * y[8:], 0.3 * d3 * y[:8]]), rtol=1e-13)


def test_kdv_linear_part_is_jacobian_at_zero():
    k = kdv_model(u_hat0=0.7)
    J = np.stack([(k.rhs(e) - k.rhs(-e)) / 2 for e in 1e-6 * np.eye(16)], axis=1) / 1e-6
    np.testing.assert_allclose(J, k.linear_part().dense(), atol=1e-6 * np.max(np.abs(J)))


def test_nls_linear_part_is_jacobian_at_zero():
    n = nls_model()
    J = np.stack([n.rhs(e) for e in 1e-5 * np.eye(2 * n.n)], axis=1) / 1e-5
    np.testing.assert_allclose(J, n.system().linear_part.dense(), atol=1e-8)


def test_layout_checks():
    with pytest.raises(ValueError):
        WaveModel(SpectralBasis(4, 0, 1, ZERO_MEAN), np.sin, np.cos)
    with pytest.raises(ValueError):
        NlsModel(SpectralBasis(4, 0, 1, ZERO_MEAN), np.sin, np.cos)
    with pytest.raises(ValueError):
        KdvModel(SpectralBasis(4, 0, 1, FULL), 1.0, 1.0, 0.0)


@pytest.mark.filterwarnings("ignore:invalid value")
def test_non_finite_nonlinearity_rejected():
    w = WaveModel(SpectralBasis(4, 0, 1), lambda u: np.log(u - 10), lambda u: u)
    with pytest.raises(FloatingPointError):
        w.rhs(np.zeros(w.n))


def test_kdv_state_has_no_mean_coordinate():
    k = kdv_model(N=5, u_hat0=2.0)
    assert k.system().dim == 10
    np.testing.assert_allclose(k.field(np.zeros(10)), 2.0)


# -- initial data values ---------------------------------------------------------------

def test_sine_gordon_initial_energy():
    prob = sine_gordon_problem()
    assert prob.system.hamiltonian(prob.state0) == pytest.approx(16 / 1.5, abs=1e-3)


def test_nls_initial_mass():
    prob = nls_problem()
    _, M1, M2 = prob.model.invariants(prob.state0)
    assert M1 == pytest.approx(2.0, abs=1e-6)
    # int u v_x for sech(x) e^{2ix} is the wavenumber times half the mass
    assert abs(M2) == pytest.approx(2.0, abs=1e-6)


def test_kdv_hamiltonian_quadrature_exact():
    prob = kdv_problem(N=50, m=151)
    y = prob.state0
    coarse = kdv_model(N=50, u_hat0=prob.model.u_hat0, m=151)
    fine = kdv_model(N=50, u_hat0=prob.model.u_hat0, m=301)
    assert abs(coarse.hamiltonian(y) - fine.hamiltonian(y)) <= 1e-13


def test_kdv_mean_matches_cnoidal_average():
    prob = kdv_problem()
    x = np.linspace(0, 1, 20001)[:-1]
    assert prob.model.u_hat0 == pytest.approx(np.mean(reference_kdv(CnoidalParams(), x, 0.0)), abs=1e-12)


# -- reference solutions -------------------------------------------------------------------

def test_sine_gordon_reference_values():
    g = 1.5
    x = RNG.uniform(-10, 10, 5)
    assert np.all(reference_sine_gordon(g, x, 0.0) == 0)
    assert abs(reference_sine_gordon(g, 1e3, 1.0)) < 1e-100
    w = math.sqrt(1 - g ** -2)
    assert reference_sine_gordon(g, 0.0, math.pi / (2 * w)) == pytest.approx(
        4 * math.atan(1 / math.sqrt(1.25)), abs=1e-14)
    with pytest.raises(ValueError):
        reference_sine_gordon(1.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        reference_sine_gordon_t(0.5, 0.0, 0.0)


def test_sine_gordon_pde_residual():
    g, h = 1.5, 1e-3
    u = lambda x, t: reference_sine_gordon(g, x, t)
    for x, t in zip(RNG.uniform(-10, 10, 20), RNG.uniform(0, 20, 20)):
        u_tt = fd(lambda tt: u(x, tt), t, 2, h)
        u_xx = fd(lambda xx: u(xx, t), x, 2, h)
        assert abs(u_tt - u_xx + math.sin(u(x, t))) <= 1e-5
        assert reference_sine_gordon_t(g, x, t) == pytest.approx(fd(lambda tt: u(x, tt), t, 1, h), abs=1e-8)


def test_nls_reference_values_and_residual():
    assert reference_nls(0.0, 0.0) == (1.0, 0.0)
    x, t = RNG.uniform(-20, 20, 20), RNG.uniform(0, 5, 20)
    u, v = reference_nls(x, t)
    np.testing.assert_allclose(u * u + v * v, sech(x - 4 * t) ** 2, atol=1e-15)
    h = 1e-3
    for xi, ti in zip(x, t):
        U = lambda xx, tt: reference_nls(xx, tt)[0]
        V = lambda xx, tt: reference_nls(xx, tt)[1]
        r2 = U(xi, ti) ** 2 + V(xi, ti) ** 2
        ru = fd(lambda tt: U(xi, tt), ti, 1, h) + fd(lambda xx: V(xx, ti), xi, 2, h) + 2 * r2 * V(xi, ti)
        rv = fd(lambda tt: V(xi, tt), ti, 1, h) - fd(lambda xx: U(xx, ti), xi, 2, h) - 2 * r2 * U(xi, ti)
        assert max(abs(ru), abs(rv)) <= 1e-5


def test_kdv_reference_values_and_residual():
    p = CnoidalParams()
    assert reference_kdv(p, p.x0, 0.0) == pytest.approx(p.amplitude, rel=1e-15)
    np.testing.assert_allclose(reference_kdv(p, np.array([0.1, 0.3]), 0.2),
                               reference_kdv(p, np.array([1.1, 2.3]), 0.2), rtol=1e-12)
    h = 1e-3
    u = lambda x, t: reference_kdv(p, x, t)
    for x, t in zip(RNG.uniform(0, 1, 20), RNG.uniform(0, 10, 20)):
        terms = (fd(lambda tt: u(x, tt), t, 1, h), p.eps * fd(lambda xx: u(xx, t), x, 3, h),
                 u(x, t) * fd(lambda xx: u(xx, t), x, 1, h))
        scale = max(abs(v) for v in terms)
        # derivatives reach 1e3 times the amplitude, so compare against the largest term
        assert abs(sum(terms)) <= 1e-5 * scale


# -- elliptic functions ------------------------------------------------------------------

def test_elliptic_k_values():
    assert elliptic_k(0.0) == pytest.approx(math.pi / 2, abs=1e-15)
    assert elliptic_k(0.9) == pytest.approx(2.5780921133481732, rel=1e-15)
    for m in (0.1, 0.5, 0.99, 0.999999):
        assert elliptic_k(m) == pytest.approx(scipy.special.ellipk(m), rel=1e-14)


def test_jacobi_degenerate_modulus():
    z = np.linspace(-10, 10, 101)
    np.testing.assert_allclose(jacobi_cn(z, 0.0), np.cos(z), atol=1e-14)
    assert jacobi_cn(0.0, 0.9) == 1.0


@settings(max_examples=30, deadline=None)
@given(z=st.floats(-50, 50), m=st.floats(0.0, 0.999))
def test_jacobi_against_scipy_and_pythagoras(z, m):
    sn, cn, dn = jacobi_ellipj(z, m)
    assert sn * sn + cn * cn == pytest.approx(1.0, abs=1e-13)
    ref = scipy.special.ellipj(z, m)
    assert sn == pytest.approx(ref[0], abs=1e-12)
    assert cn == pytest.approx(ref[1], abs=1e-12)
    assert dn == pytest.approx(ref[2], abs=1e-12)
    assert abs(cn) <= 1.0


def test_jacobi_period():
    m = 0.9
    K = elliptic_k(m)
    z = np.linspace(0, 3, 7)
    np.testing.assert_allclose(jacobi_cn(z + 4 * K, m), jacobi_cn(z, m), atol=1e-13)
    assert jacobi_sn(K, m) == pytest.approx(1.0, abs=1e-14)


@pytest.mark.parametrize("m", [1.0, 1.5, -0.1])
def test_elliptic_rejects_bad_parameter(m):
    with pytest.raises(ValueError):
        elliptic_k(m)
    with pytest.raises(ValueError):
        jacobi_cn(0.3, m)
