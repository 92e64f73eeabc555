"""Tests for the leading-order long-time evaluation.

The route-equivalence check inside u_leading compares the explicit
closed-form expression against the factorized phase/amplitude assembly; the
tests here pin both against independent evaluations (modulus identities for
the gamma factor, direct phase accumulation, sign formula for the phase
real part).
"""

import cmath
import math

import numpy as np
import pytest

from satsuma.asymptotics import (
    AsymptoticContext,
    LeadingOrder,
    beta_factors,
    eta_factors,
    phase,
    save_asymptotic_csv,
    signature_sample,
    stationary_points,
    u_leading,
)
from satsuma.errors import ConfigError
from satsuma.scattering import InitialProfile, ReflectionTable, reflection_table


def rho_with_nu(nu, angle1=0.3, angle2=1.1, split=0.7):
    """A reflection row whose squared modulus matches the exponent nu."""
    total = math.e ** (2 * math.pi * nu) - 1.0
    r1 = math.sqrt(split * total)
    r2 = math.sqrt((1 - split) * total)
    return np.array([r1 * cmath.exp(1j * angle1), r2 * cmath.exp(1j * angle2)])


def make_context(zeta=3.0, t=40.0, nu=0.4, chi_im=0.17, **kw):
    rho_p = rho_with_nu(nu)
    args = dict(zeta=zeta, t=t, nu=nu, chi_plus=1j * chi_im,
                chi_minus=-1j * chi_im, rho_plus=rho_p,
                rho_minus=np.conj(rho_p[::-1]))
    args.update(kw)
    return AsymptoticContext(**args)


def test_stationary_points_closed_forms():
    assert stationary_points(12.0) == (-1.0, 1.0)
    assert stationary_points(3.0) == (-0.5, 0.5)
    assert stationary_points(0.75) == (-0.25, 0.25)
    with pytest.raises(ValueError):
        stationary_points(0.0)
    with pytest.raises(ValueError):
        stationary_points(-2.0)


def test_stationary_point_scaling():
    rng = np.random.default_rng(2)
    for zeta in rng.uniform(0.1, 2.0, 6):
        _, k0 = stationary_points(zeta)
        _, k0q = stationary_points(4 * zeta)
        assert k0q == pytest.approx(2 * k0, rel=1e-14)


def test_phase_closed_forms():
    assert phase(12.0, 1.0) == 16j
    assert phase(7.3, 0.0) == 0
    assert phase(12.0, 1j) == -32
    # purely imaginary on the real axis
    for k in (-1.7, 0.4, 2.2):
        assert phase(5.0, k).real == 0.0


def test_signature_samples():
    assert signature_sample(12.0, 1j) == -1
    assert signature_sample(12.0, 1.0) == 0
    assert signature_sample(12.0, 2 + 0.1j) == 1


def test_signature_against_sign_formula():
    # Re Phi = -k_i (2 zeta - 24 k_r^2 + 8 k_i^2), checked on random points.
    rng = np.random.default_rng(8)
    for _ in range(200):
        zeta = rng.uniform(0.2, 15.0)
        k = complex(rng.uniform(-2.5, 2.5), rng.uniform(-2.0, 2.0))
        expected = -k.imag * (2 * zeta - 24 * k.real**2 + 8 * k.imag**2)
        if abs(expected) < 1e-12:
            continue
        assert signature_sample(zeta, k) == (1 if expected > 0 else -1)


# ---------------------------------------------------------------------------
# context validation
# ---------------------------------------------------------------------------


def test_context_recomputes_k0():
    ctx = make_context(zeta=3.0)
    assert ctx.k0 == 0.5
    assert ctx.k0**2 == pytest.approx(ctx.zeta / 12.0, rel=0, abs=1e-16)


def test_context_rejects_bad_exponent():
    rho_p = rho_with_nu(0.4)
    with pytest.raises(ConfigError):
        AsymptoticContext(zeta=3.0, t=10.0, nu=0.9, chi_plus=0j, chi_minus=0j,
                          rho_plus=rho_p, rho_minus=np.conj(rho_p[::-1]))


def test_context_rejects_real_chi():
    with pytest.raises(ConfigError):
        make_context(chi_im=0.0, chi_plus=0.3 + 0.1j)


def test_context_rejects_broken_row_symmetry():
    rho_p = rho_with_nu(0.4)
    with pytest.raises(ConfigError):
        AsymptoticContext(zeta=3.0, t=10.0, nu=0.4, chi_plus=0j, chi_minus=0j,
                          rho_plus=rho_p, rho_minus=rho_p)


def test_context_rejects_out_of_range_zeta():
    with pytest.raises(ConfigError):
        make_context(zeta=-1.0)
    with pytest.raises(ConfigError):
        make_context(zeta=25.0)  # beyond the default admissible ceiling
    make_context(zeta=25.0, max_zeta=30.0)  # widened ceiling is fine


# ---------------------------------------------------------------------------
# eta and beta factors
# ---------------------------------------------------------------------------


def test_eta_unit_modulus():
    for nu in (0.05, 0.4, 1.3):
        ctx = make_context(nu=nu, chi_im=0.29)
        eta, eta_hat = eta_factors(ctx)
        assert abs(abs(eta) - 1.0) < 1e-12
        assert abs(abs(eta_hat) - 1.0) < 1e-12


def test_eta_phase_accumulation():
    # zeta = 12 puts the stationary point at 1, so the phase of eta is
    # nu/2 * ln(192 t) + 8 t + Im chi_plus, here with t = 1, nu = 1.
    ctx = make_context(zeta=12.0, t=1.0, nu=1.0, chi_im=0.3, max_zeta=12.0)
    eta, _ = eta_factors(ctx)
    expected = 0.5 * math.log(192.0) + 8.0 + 0.3
    diff = (cmath.phase(eta) - expected) % (2 * math.pi)
    assert min(diff, 2 * math.pi - diff) < 1e-12


def test_beta_zero_reflection():
    ctx = AsymptoticContext(zeta=3.0, t=10.0, nu=0.0, chi_plus=0j, chi_minus=0j,
                            rho_plus=np.zeros(2, complex),
                            rho_minus=np.zeros(2, complex))
    bx, by = beta_factors(ctx)
    assert not bx.any() and not by.any()


def test_beta_modulus_identity():
    # |beta|^2 collapses to nu: |Gamma(i nu)|^2 = pi/(nu sinh(pi nu)) and
    # 1 + |rho|^2 = e^{2 pi nu} cancel against the explicit prefactors.
    for nu in (0.05, 0.1, 0.5, 1.0, 2.0):
        ctx = make_context(nu=nu)
        bx, by = beta_factors(ctx)
        assert abs(np.vdot(bx, bx).real - nu) < 1e-12
        assert abs(np.vdot(by, by).real - nu) < 1e-12


def test_beta_proportional_to_rho():
    from satsuma.specfun import gamma_complex

    ctx = make_context(nu=0.7)
    bx, _ = beta_factors(ctx)
    rho = ctx.rho_plus
    # componentwise proportionality
    assert abs(bx[0] * rho[1] - bx[1] * rho[0]) < 1e-14 * np.abs(bx).max()
    lam = bx[0] / rho[0]
    gam = gamma_complex(1j * ctx.nu)
    aligned = lam * cmath.exp(-1j * (math.pi / 4 - cmath.phase(gam)))
    assert abs(aligned.imag) < 1e-13 * abs(aligned)
    assert aligned.real > 0


def test_beta_pair_is_conjugate_swap():
    ctx = make_context(nu=0.9)
    bx, by = beta_factors(ctx)
    np.testing.assert_allclose(by, np.conj(bx[::-1]), rtol=0, atol=1e-16)


# ---------------------------------------------------------------------------
# leading order
# ---------------------------------------------------------------------------


def test_u_leading_zero_reflection():
    ctx = AsymptoticContext(zeta=3.0, t=10.0, nu=0.0, chi_plus=0j, chi_minus=0j,
                            rho_plus=np.zeros(2, complex),
                            rho_minus=np.zeros(2, complex))
    lead = u_leading(ctx)
    assert lead.u_as == 0
    assert lead.u_as_over_sqrt_t == 0


def test_u_leading_randomized_contexts():
    # The operation itself enforces 1e-10 route agreement; this sweep makes
    # sure it holds across the admissible parameter space and that the
    # modulus obeys the triangle bound with |Gamma| evaluated independently.
    rng = np.random.default_rng(21)
    for _ in range(40):
        nu = rng.uniform(0.02, 2.2)
        ctx = make_context(
            zeta=rng.uniform(0.2, 9.5), t=rng.uniform(2.0, 500.0), nu=nu,
            chi_im=rng.uniform(-0.8, 0.8))
        lead = u_leading(ctx)
        gam_mod = math.sqrt(math.pi / (nu * math.sinh(math.pi * nu)))
        bound = (nu * math.e ** (-math.pi * nu / 2)
                 / math.sqrt(24 * math.pi * ctx.k0)) * gam_mod \
            * (abs(ctx.rho_plus[0]) + abs(ctx.rho_plus[1]))
        assert abs(lead.u_as) <= bound * (1 + 1e-12)
        assert abs(lead.u_as_over_sqrt_t) == pytest.approx(
            abs(lead.u_as) / math.sqrt(ctx.t), rel=1e-14)
        assert lead.error_scale == pytest.approx(
            math.log(ctx.t) / ctx.t, rel=1e-15)


def test_u_leading_envelope():
    # The two stationary-point contributions have t-independent moduli A
    # and B, so |u_as| must live in [|A - B|, A + B] while the relative
    # phase rotates with t; both edges should be approached over a sweep.
    nu = 0.35
    rho = rho_with_nu(nu)
    gam_mod = math.sqrt(math.pi / (nu * math.sinh(math.pi * nu)))
    pref = nu * math.e ** (-math.pi * nu / 2) / math.sqrt(24 * math.pi * 0.5)
    a_mod = pref * gam_mod * abs(rho[1])
    b_mod = pref * gam_mod * abs(rho[0])
    vals = []
    for t in np.linspace(20.0, 500.0, 120):
        ctx = make_context(zeta=3.0, t=float(t), nu=nu)
        vals.append(abs(u_leading(ctx).u_as))
    vals = np.array(vals)
    lo, hi = abs(a_mod - b_mod), a_mod + b_mod
    assert vals.min() >= lo - 1e-12
    assert vals.max() <= hi + 1e-12
    assert vals.max() - vals.min() > 1.5 * min(a_mod, b_mod)


# ---------------------------------------------------------------------------
# table-driven construction
# ---------------------------------------------------------------------------


@pytest.fixture(scope="module")
def table03():
    prof = InitialProfile.from_callable(
        lambda x: 0.3 * np.exp(-(x**2)), -10.0, 10.0, 1201)
    kgrid = np.linspace(-0.8, 0.8, 161)
    return reflection_table(prof, kgrid, tol=1e-10)


def test_from_table_roundtrip(table03):
    ctx = AsymptoticContext.from_table(table03, zeta=3.0, t=60.0)
    assert ctx.k0 == pytest.approx(0.5)
    assert ctx.nu > 0
    assert abs(ctx.chi_plus.real) < 1e-12
    assert abs(ctx.chi_minus.real) < 1e-12
    lead = u_leading(ctx)
    assert 0 < abs(lead.u_as) < 1.0


def test_from_table_rejects_asymmetric_rows(table03):
    # an even-in-k phase twist breaks rho(-k) = swap(conj(rho(k)))
    broken = ReflectionTable(
        k_nodes=table03.k_nodes,
        rho=table03.rho * np.exp(0.3j * table03.k_nodes**2 + 0.2j)[:, None],
        rho_norm_sq=table03.rho_norm_sq)
    with pytest.raises(ConfigError):
        AsymptoticContext.from_table(broken, zeta=3.0, t=60.0)


def test_asymptotic_csv(tmp_path):
    rows = []
    for t in (20.0, 40.0):
        ctx = make_context(zeta=3.0, t=t, nu=0.4)
        rows.append((t, ctx.zeta * t, ctx.zeta, u_leading(ctx)))
    path = tmp_path / "curve.csv"
    save_asymptotic_csv(path, rows, meta={"nu": 0.4})
    lines = path.read_text().splitlines()
    assert lines[0].startswith("#")
    header_idx = next(i for i, ln in enumerate(lines) if not ln.startswith("#"))
    assert lines[header_idx] == "t,x,zeta,re_u_as,im_u_as,abs_u_leading"
    data = np.loadtxt(path, delimiter=",", skiprows=header_idx + 1)
    assert data.shape == (2, 6)
    lead0 = rows[0][3]
    assert data[0, 5] == pytest.approx(abs(lead0.u_as_over_sqrt_t), rel=1e-15)
