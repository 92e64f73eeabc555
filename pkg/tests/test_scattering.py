"""Tests for the direct scattering layer.

Oracles used here are independent of the implementation under test:
trapezoid quadrature of the first-order (Born) integral, re-integration at a
tighter tolerance, scipy adaptive quadrature for the phase integral, dense
eigenvalue checks for the jump matrix, and closed forms where they exist.
"""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from satsuma.errors import (
    ConfigError,
    DecayError,
    QuadratureError,
    SpectralSingularityError,
)
from satsuma.scattering import (
    InitialProfile,
    ReflectionTable,
    ScatteringMatrix,
    build_jump,
    chi_of,
    default_k_grid,
    det_delta,
    load_profile_csv,
    load_reflection_csv,
    nu_of,
    reflection,
    reflection_table,
    save_profile_csv,
    save_reflection_csv,
    scattering_invariant_defects,
    scattering_matrices,
    scattering_matrix,
)

SWAP12 = np.array([[0, 1, 0], [1, 0, 0], [0, 0, 1]], dtype=float)


def gaussian_profile(amp, n=1601, half_width=12.0):
    return InitialProfile.from_callable(
        lambda x: amp * np.exp(-(x**2)), -half_width, half_width, n
    )


@pytest.fixture(scope="module")
def prof08():
    return gaussian_profile(0.8)


@pytest.fixture(scope="module")
def table03():
    # Moderate-amplitude table used by the phase-integral and jump tests.
    prof = gaussian_profile(0.3, n=1201, half_width=10.0)
    kgrid = np.linspace(-0.6, 0.6, 121)
    return reflection_table(prof, kgrid, tol=1e-10)


# ---------------------------------------------------------------------------
# profile validation
# ---------------------------------------------------------------------------


def test_profile_rejects_bad_geometry():
    with pytest.raises(ValueError):
        InitialProfile(x_min=1.0, x_max=-1.0, n=64, u0=np.zeros(64, complex))
    with pytest.raises(ValueError):
        InitialProfile(x_min=-1.0, x_max=1.0, n=8, u0=np.zeros(8, complex))
    with pytest.raises(ValueError):
        InitialProfile(x_min=-1.0, x_max=1.0, n=64, u0=np.zeros(32, complex))


def test_profile_rejects_undecayed_boundary():
    x = np.linspace(-5, 5, 256)
    with pytest.raises(DecayError):
        InitialProfile(x_min=-5.0, x_max=5.0, n=256, u0=np.cos(x) + 0j)


def test_profile_csv_roundtrip(tmp_path):
    prof = gaussian_profile(0.5, n=64, half_width=6.0)
    path = tmp_path / "prof.csv"
    save_profile_csv(prof, path)
    header = path.read_text().splitlines()[0]
    assert header == "x,re_u0,im_u0"
    back = load_profile_csv(path)
    assert back.n == prof.n
    assert back.x_min == pytest.approx(prof.x_min, abs=0, rel=1e-15)
    np.testing.assert_allclose(back.u0, prof.u0, rtol=1e-15, atol=1e-300)


# ---------------------------------------------------------------------------
# transition matrices
# ---------------------------------------------------------------------------


def test_zero_potential_gives_identity():
    prof = InitialProfile(x_min=-4.0, x_max=4.0, n=64, u0=np.zeros(64, complex))
    for k in (-1.3, 0.0, 0.8, 2.5):
        sm = scattering_matrix(prof, k, tol=1e-10)
        assert np.max(np.abs(sm.s - np.eye(3))) < 1e-12


def test_born_regime_matches_quadrature():
    # First-order oracle: substituting the identity for the eigenfunction
    # inside the integral representation leaves plain Fourier-type integrals
    #   s31 ~= -int conj(u0) e^{-2ikx} dx,  s32 ~= -int u0 e^{-2ikx} dx,
    # with the leftover second-order term bounded well under 5e-6 at eps=1e-3.
    eps = 1e-3
    prof = gaussian_profile(eps)
    xf = np.linspace(prof.x_min, prof.x_max, 8193)
    u0f = eps * np.exp(-(xf**2))
    for k in (0.3, 0.7, 1.3):
        sm = scattering_matrix(prof, k, tol=1e-10)
        born31 = -np.trapezoid(np.conj(u0f) * np.exp(-2j * k * xf), xf)
        born32 = -np.trapezoid(u0f * np.exp(-2j * k * xf), xf)
        assert abs(sm.s[2, 0] - born31) < 5e-6
        assert abs(sm.s[2, 1] - born32) < 5e-6
        assert abs(sm.s[2, 2] - 1.0) < 5e-6
        # first-row entries carry the adjoint data
        assert abs(sm.s[0, 2] + np.conj(born31)) < 5e-6


def test_tolerance_refinement_agreement(prof08):
    tol = 1e-9
    a = scattering_matrix(prof08, 1.0, tol=tol)
    b = scattering_matrix(prof08, 1.0, tol=tol / 32.0)
    assert np.max(np.abs(a.s - b.s)) < 10 * tol


def test_matrix_invariants_on_grid(prof08):
    tol = 1e-10
    kgrid = np.linspace(-2.0, 2.0, 21)
    smats = scattering_matrices(prof08, kgrid, tol=tol)
    defects = scattering_invariant_defects(kgrid, smats)
    assert defects["det"] <= 10 * tol
    assert defects["unitarity"] <= 10 * tol
    assert defects["conjugation"] <= 10 * tol


def test_real_data_has_paired_columns(prof08):
    # For real-valued data the coefficient matrix is invariant under the
    # simultaneous (1,2) row/column swap, so the transition matrix must be too.
    sm = scattering_matrix(prof08, 0.6, tol=1e-10)
    assert np.max(np.abs(sm.s - SWAP12 @ sm.s @ SWAP12)) < 1e-9


def test_det_and_unitarity_single(prof08):
    sm = scattering_matrix(prof08, 0.35, tol=1e-10)
    assert abs(np.linalg.det(sm.s) - 1.0) < 1e-9
    assert np.max(np.abs(sm.s.conj().T @ sm.s - np.eye(3))) < 1e-9


# ---------------------------------------------------------------------------
# reflection data
# ---------------------------------------------------------------------------


def test_reflection_identity_and_guard():
    sm = ScatteringMatrix(k=0.0, s=np.eye(3, dtype=complex))
    np.testing.assert_array_equal(reflection(sm), np.zeros(2, complex))
    bad = np.eye(3, dtype=complex)
    bad[2, 2] = 1e-9
    with pytest.raises(SpectralSingularityError):
        reflection(ScatteringMatrix(k=0.4, s=bad))


def test_reflection_symmetry_on_table(table03):
    k = table03.k_nodes
    sym = k + k[::-1]
    assert np.max(np.abs(sym)) < 1e-14  # grid symmetric about 0
    flipped = np.conj(table03.rho[::-1, ::-1])
    assert np.max(np.abs(table03.rho - flipped)) < 1e-8
    assert np.all(table03.rho_norm_sq >= 0)


def test_reflection_table_csv_roundtrip(tmp_path, table03):
    path = tmp_path / "table.csv"
    save_reflection_csv(table03, path)
    header = path.read_text().splitlines()[0]
    assert header == "k,re_rho1,im_rho1,re_rho2,im_rho2,rho_norm_sq"
    back = load_reflection_csv(path)
    np.testing.assert_allclose(back.k_nodes, table03.k_nodes, rtol=1e-15)
    np.testing.assert_allclose(back.rho, table03.rho, rtol=1e-14, atol=1e-300)


def test_table_consistency_enforced():
    k = np.linspace(-1, 1, 17)
    rho = np.zeros((17, 2), complex)
    bad_norm = np.ones(17)
    with pytest.raises(ValueError):
        ReflectionTable(k_nodes=k, rho=rho, rho_norm_sq=bad_norm)


def test_default_k_grid():
    g = default_k_grid(0.5)
    assert g.shape == (801,)
    assert g[0] == pytest.approx(-2.5)
    assert g[-1] == pytest.approx(2.5)


# ---------------------------------------------------------------------------
# nu
# ---------------------------------------------------------------------------


def test_nu_closed_forms():
    assert nu_of(np.zeros(2, complex)) == 0.0
    r = math.sqrt(math.e**(2 * math.pi) - 1.0)
    assert nu_of(np.array([r, 0.0], complex)) == pytest.approx(1.0, rel=1e-12)
    assert nu_of(np.array([1.0, 0.0], complex)) == pytest.approx(
        math.log(2.0) / (2 * math.pi), rel=1e-12
    )


def test_nu_monotone():
    vals = [nu_of(np.array([a, 0.5j * a], complex)) for a in np.linspace(0, 2, 9)]
    assert all(b > a for a, b in zip(vals, vals[1:]))


# ---------------------------------------------------------------------------
# phase integral chi and det delta
# ---------------------------------------------------------------------------


def make_constant_table(c, k0=0.5):
    k = np.linspace(-2 * k0, 2 * k0, 81)
    rho = np.full((81, 2), c, dtype=complex)
    nsq = np.full(81, 2 * abs(c) ** 2)
    return ReflectionTable(k_nodes=k, rho=rho, rho_norm_sq=nsq)


def test_chi_vanishes_for_constant_modulus():
    table = make_constant_table(0.4 + 0.1j)
    for at in (0.5, -0.5):
        assert abs(chi_of(table, 0.5, at)) < 1e-14


def test_chi_purely_imaginary(table03):
    for at in (0.5, -0.5):
        c = chi_of(table03, 0.5, at)
        assert abs(c.real) < 1e-12


def test_chi_antisymmetric(table03):
    cp = chi_of(table03, 0.5, 0.5)
    cm = chi_of(table03, 0.5, -0.5)
    assert abs(cp + cm) < 1e-8


def test_chi_against_adaptive_quadrature(table03):
    # Independent oracle: scipy's adaptive quadrature on the same interpolated
    # integrand, split at the removable endpoint.
    from scipy.interpolate import CubicSpline

    k0 = 0.5
    w = CubicSpline(table03.k_nodes, np.log1p(table03.rho_norm_sq))
    wk0 = float(w(k0))

    def integrand(xi):
        return (float(w(xi)) - wk0) / (xi - k0)

    ref, err = quad(integrand, -k0, k0, epsabs=1e-12, epsrel=1e-12, limit=400,
                    points=[k0 - 1e-9])
    assert err < 1e-9
    mine = chi_of(table03, k0, k0)
    assert abs(mine - ref / (2j * math.pi)) < 1e-8


def test_chi_double_resolution(table03):
    prof = gaussian_profile(0.3, n=1201, half_width=10.0)
    fine = reflection_table(prof, np.linspace(-0.6, 0.6, 241), tol=1e-10)
    assert abs(chi_of(table03, 0.5, 0.5) - chi_of(fine, 0.5, 0.5)) < 1e-8


def test_chi_requires_coverage(table03):
    with pytest.raises(QuadratureError):
        chi_of(table03, 0.9, 0.9)  # table only covers [-0.6, 0.6]


def test_det_delta_trivial_for_zero_reflection():
    table = make_constant_table(0.0)
    for k in (0.9, -2.0, 1.0 + 0.7j):
        assert det_delta(table, 0.5, k) == pytest.approx(1.0, abs=1e-13)


def test_det_delta_far_field(table03):
    d1 = det_delta(table03, 0.5, 60.0)
    d2 = det_delta(table03, 0.5, 600.0)
    assert abs(d1 - 1.0) < 0.05
    # 1/k decay of the defect
    assert abs(d2 - 1.0) < 0.2 * abs(d1 - 1.0)


def test_det_delta_endpoint_cutoff(table03):
    with pytest.raises(QuadratureError):
        det_delta(table03, 0.5, 0.5 + 1e-9)


def richardson_to_zero(eps, vals):
    # Neville extrapolation of vals(eps) to eps = 0
    tab = [complex(v) for v in vals]
    n = len(tab)
    for level in range(1, n):
        for i in range(n - level):
            e_lo, e_hi = eps[i], eps[i + level]
            tab[i] = (e_lo * tab[i + 1] - e_hi * tab[i]) / (e_lo - e_hi)
    return tab[0]


def test_det_delta_plemelj_ratio(table03):
    # Boundary-jump oracle: the two-sided limits of det delta across the
    # spectral interval must differ by the factor 1 + |rho|^2 at that node.
    k0 = 0.5
    k1 = 0.2
    idx = np.argmin(np.abs(table03.k_nodes - k1))
    assert abs(table03.k_nodes[idx] - k1) < 1e-12
    target = 1.0 + table03.rho_norm_sq[idx]
    eps = [0.02, 0.01, 0.005, 0.0025]
    ratios = [
        det_delta(table03, k0, k1 + 1j * e) / det_delta(table03, k0, k1 - 1j * e)
        for e in eps
    ]
    extrap = richardson_to_zero(eps, ratios)
    assert abs(extrap - target) < 1e-6


# ---------------------------------------------------------------------------
# jump matrix
# ---------------------------------------------------------------------------


def test_build_jump_identity_for_zero_rho():
    j = build_jump(np.zeros(2, complex), x=1.0, t=2.0, k=0.3, zeta=0.5)
    np.testing.assert_array_equal(j, np.eye(3, dtype=complex))


def test_build_jump_hermitian_real_k():
    rng = np.random.default_rng(11)
    for _ in range(8):
        rho = rng.normal(size=2) + 1j * rng.normal(size=2)
        t = rng.uniform(0.5, 5.0)
        zeta = rng.uniform(0.2, 2.0)
        k = rng.uniform(-2, 2)
        j = build_jump(rho, x=zeta * t, t=t, k=k, zeta=zeta)
        assert np.array_equal(j, j.conj().T)


def test_build_jump_positive_definite():
    rho = np.array([0.3, 0.4j], complex)
    j = build_jump(rho, x=2.0, t=2.0, k=0.5, zeta=1.0)
    evals = np.linalg.eigvalsh(j)
    assert evals.min() > 0


def test_build_jump_consistency_guard():
    with pytest.raises(ConfigError):
        build_jump(np.zeros(2, complex), x=3.0, t=2.0, k=0.5, zeta=1.0)


# ---------------------------------------------------------------------------
# backend equivalence
# ---------------------------------------------------------------------------


def test_pure_python_backend_matches(monkeypatch, prof08):
    from satsuma import _integrate

    kgrid = np.array([-1.1, -0.3, 0.0, 0.7, 1.9])
    fast = scattering_matrices(prof08, kgrid, tol=1e-10)
    monkeypatch.setenv("SATSUMA_PURE_PYTHON", "1")
    assert _integrate.backend_name() == "numpy"
    slow = scattering_matrices(prof08, kgrid, tol=1e-10)
    assert np.max(np.abs(fast - slow)) < 1e-9


def test_compiled_backend_present():
    from satsuma import _integrate

    assert _integrate.backend_name() == "compiled"
