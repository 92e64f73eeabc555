"""Leading-order long-time evaluation along rays x = zeta * t.

The dispersion relation puts a pair of real stationary points at
+-k0 = +-sqrt(zeta/12) for zeta > 0.  The modulated-decay leading term is
assembled here along two independent routes: (a) the explicit closed-form
expression in the scattering data at k0, and (b) the factorized form built
from unit-modulus phase factors (eta, eta_hat) and amplitude rows
(beta_x, beta_y).  Both are evaluated on every call and must agree to a
relative tolerance; a disagreement raises instead of returning a value,
which turns branch-cut and phase-wiring mistakes into hard failures.

All fractional powers use the principal logarithm; the arguments are
positive reals (192 t k0^3), so no cut is ever crossed.
"""

from __future__ import annotations

import cmath
import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import ConfigError, RouteMismatchError
from .scattering import ReflectionTable, chi_of
from .specfun import gamma_complex

DEFAULT_MAX_ZETA = 10.0

_TWO_PI = 2.0 * math.pi


def stationary_points(zeta: float) -> tuple[float, float]:
    """Real stationary points (-k0, k0) of the ray phase, k0 = sqrt(zeta/12)."""
    if not zeta > 0:
        raise ValueError(f"stationary points require zeta > 0, got {zeta}")
    k0 = math.sqrt(zeta / 12.0)
    return (-k0, k0)


def phase(zeta: float, k: complex) -> complex:
    """Ray phase 2i*zeta*k - 8i*k^3 (purely imaginary for real k)."""
    k = complex(k)
    return 2j * zeta * k - 8j * k**3


def signature_sample(zeta: float, k: complex) -> int:
    """Sign (-1, 0, +1) of the real part of the ray phase at k."""
    re = phase(zeta, k).real
    return (re > 0) - (re < 0)


@dataclass(eq=False)
class AsymptoticContext:
    """Frozen spectral inputs for one ray (zeta) and one time (t).

    k0 is always recomputed from zeta.  Construction cross-checks every
    redundant field: the decay exponent nu against the reflection row at k0,
    the phase corrections chi against pure imaginarity, and the row at -k0
    against the conjugate-swap symmetry of the row at +k0.
    """

    zeta: float
    t: float
    nu: float
    chi_plus: complex
    chi_minus: complex
    rho_plus: np.ndarray
    rho_minus: np.ndarray
    max_zeta: float = DEFAULT_MAX_ZETA
    consistency_tol: float = 1e-8
    k0: float = field(init=False)

    def __post_init__(self):
        if not 0 < self.zeta <= self.max_zeta:
            raise ConfigError(
                f"zeta = {self.zeta} outside the admissible range "
                f"(0, {self.max_zeta}]")
        if not self.t > 0:
            raise ConfigError(f"t must be positive, got {self.t}")
        self.k0 = math.sqrt(self.zeta / 12.0)
        self.rho_plus = np.ascontiguousarray(self.rho_plus, dtype=complex)
        self.rho_minus = np.ascontiguousarray(self.rho_minus, dtype=complex)
        for name, row in (("rho_plus", self.rho_plus),
                          ("rho_minus", self.rho_minus)):
            if row.shape != (2,):
                raise ConfigError(f"{name} must have shape (2,), got {row.shape}")
        nsq = float(np.vdot(self.rho_plus, self.rho_plus).real)
        nu_expected = math.log1p(nsq) / _TWO_PI
        if abs(self.nu - nu_expected) > self.consistency_tol:
            raise ConfigError(
                f"nu = {self.nu} inconsistent with the reflection row at k0 "
                f"(expected {nu_expected})")
        for name, chi in (("chi_plus", self.chi_plus),
                          ("chi_minus", self.chi_minus)):
            if abs(complex(chi).real) > self.consistency_tol:
                raise ConfigError(
                    f"{name} must be purely imaginary, got {chi}")
        expected_minus = np.conj(self.rho_plus[::-1])
        defect = float(np.max(np.abs(self.rho_minus - expected_minus)))
        scale = 1.0 + float(np.max(np.abs(self.rho_plus)))
        if defect > self.consistency_tol * scale:
            raise ConfigError(
                "rho_minus violates the conjugate-swap symmetry with rho_plus "
                f"(defect {defect:.3e})")

    @classmethod
    def from_table(cls, table: ReflectionTable, zeta: float, t: float, *,
                   quad_tol: float = 1e-9, sym_tol: float = 1e-6,
                   max_zeta: float = DEFAULT_MAX_ZETA) -> "AsymptoticContext":
        """Build the context for ray zeta at time t from a reflection table.

        The row at -k0 is derived from the row at +k0 via the conjugate-swap
        symmetry; the independently interpolated value is only used for a
        consistency check (tolerance sym_tol).
        """
        if not 0 < zeta <= max_zeta:
            raise ConfigError(
                f"zeta = {zeta} outside the admissible range (0, {max_zeta}]")
        k0 = math.sqrt(zeta / 12.0)
        spline = CubicSpline(table.k_nodes, table.rho, axis=0)
        rho_plus = np.asarray(spline(k0), dtype=complex)
        rho_minus_direct = np.asarray(spline(-k0), dtype=complex)
        expected_minus = np.conj(rho_plus[::-1])
        defect = float(np.max(np.abs(rho_minus_direct - expected_minus)))
        scale = 1.0 + float(np.max(np.abs(rho_plus)))
        if defect > sym_tol * scale:
            raise ConfigError(
                "reflection table violates the conjugate-swap symmetry at "
                f"+-k0 (defect {defect:.3e}); refusing to build the context")
        nsq = float(np.vdot(rho_plus, rho_plus).real)
        nu = math.log1p(nsq) / _TWO_PI
        chi_plus = chi_of(table, k0, k0, quad_tol=quad_tol)
        chi_minus = chi_of(table, k0, -k0, quad_tol=quad_tol)
        return cls(zeta=zeta, t=t, nu=nu, chi_plus=chi_plus,
                   chi_minus=chi_minus, rho_plus=rho_plus,
                   rho_minus=expected_minus, max_zeta=max_zeta)


@dataclass(frozen=True)
class LeadingOrder:
    """Leading term along the ray: value, value scaled by sqrt(t), error scale."""

    u_as_over_sqrt_t: complex
    u_as: complex
    error_scale: float


def eta_factors(ctx: AsymptoticContext) -> tuple[complex, complex]:
    """Unit-modulus phase factors (eta, eta_hat) for the two stationary points.

    eta carries half the oscillatory power (192 t k0^3)^{i nu / 2}, the fast
    phase 8 t k0^3, and the slow correction chi at +k0; eta_hat is its
    counterpart at -k0 built from the independent chi_minus value.
    """
    lb = math.log(192.0 * ctx.t * ctx.k0**3)
    fast = 8.0 * ctx.t * ctx.k0**3
    eta = cmath.exp(0.5j * ctx.nu * lb + 1j * fast + ctx.chi_plus)
    eta_hat = cmath.exp(-0.5j * ctx.nu * lb - 1j * fast + ctx.chi_minus)
    return eta, eta_hat


def scaled_reflection_row(nu: float, rho: np.ndarray) -> np.ndarray:
    """The reflection row scaled by nu Gamma(-i nu) e^{i pi/4 - pi nu/2} / sqrt(2 pi).

    This is the single shared definition of the amplitude row; for a row
    whose squared modulus is e^{2 pi nu} - 1 the result satisfies
    row row^dagger = nu exactly.  nu = 0 returns the zero row (the product
    nu Gamma(-i nu) stays bounded but the admissible row vanishes).
    """
    if nu == 0.0:
        return np.zeros(2, dtype=complex)
    pref = (nu * gamma_complex(-1j * nu)
            * cmath.exp(1j * math.pi / 4 - math.pi * nu / 2)
            / math.sqrt(_TWO_PI))
    return pref * np.ascontiguousarray(rho, dtype=complex)


def beta_factors(ctx: AsymptoticContext) -> tuple[np.ndarray, np.ndarray]:
    """Amplitude rows (beta_x, beta_y); beta_x beta_x^dagger = nu exactly.

    beta_x is scaled_reflection_row applied to the row at +k0; beta_y is
    its conjugate swap.  nu = 0 forces both rows to zero.
    """
    beta_x = scaled_reflection_row(ctx.nu, ctx.rho_plus)
    beta_y = np.conj(beta_x[::-1])
    return beta_x, beta_y


def u_leading(ctx: AsymptoticContext, *, route_rtol: float = 1e-10) -> LeadingOrder:
    """Leading-order value on the ray at time ctx.t, via two agreeing routes.

    Route (a) is the closed-form expression in the reflection row at k0
    with explicit gamma factors and phases.  Route (b) rebuilds the same
    value from eta_factors and beta_factors and additionally checks that
    the two components of the assembled row are conjugates.  Disagreement
    beyond route_rtol (relative) raises RouteMismatchError.  Returns
    route (a).
    """
    err_scale = math.log(ctx.t) / ctx.t
    if ctx.nu == 0.0:
        return LeadingOrder(u_as_over_sqrt_t=0j, u_as=0j, error_scale=err_scale)

    k0, t, nu = ctx.k0, ctx.t, ctx.nu
    lb = math.log(192.0 * t * k0**3)
    fast = 16.0 * t * k0**3
    pref = nu * math.exp(-math.pi * nu / 2) / math.sqrt(24.0 * math.pi * k0)
    term_plus = (cmath.exp(1j * nu * lb + 1j * fast + 2 * ctx.chi_plus
                           + 1j * math.pi / 4)
                 * gamma_complex(-1j * nu) * ctx.rho_plus[1])
    term_minus = (cmath.exp(-1j * nu * lb - 1j * fast + 2 * ctx.chi_minus
                            - 1j * math.pi / 4)
                  * gamma_complex(1j * nu) * np.conj(ctx.rho_plus[0]))
    u_a = pref * (term_plus + term_minus)
    u_a_over = u_a / math.sqrt(t)

    eta, eta_hat = eta_factors(ctx)
    beta_x, beta_y = beta_factors(ctx)
    row = 2j * (-1j * eta**2 * beta_x - 1j * eta_hat**2 * beta_y) \
        / math.sqrt(48.0 * t * k0)
    u_b_over = complex(row[1])

    scale = max(abs(u_a_over), abs(u_b_over), 1e-300)
    if abs(u_a_over - u_b_over) > route_rtol * scale:
        raise RouteMismatchError(
            "leading-order routes disagree: closed form gives "
            f"{u_a_over}, factorized assembly gives {u_b_over}")
    if abs(complex(row[0]) - u_b_over.conjugate()) > route_rtol * scale:
        raise RouteMismatchError(
            "factorized assembly lost the conjugate pairing of its "
            f"components: {row[0]} vs conj({row[1]})")
    return LeadingOrder(u_as_over_sqrt_t=u_a_over, u_as=u_a,
                        error_scale=err_scale)


def save_asymptotic_csv(path, rows, meta: dict | None = None) -> None:
    """Write (t, x, zeta, LeadingOrder) rows as CSV.

    Columns: t,x,zeta,re_u_as,im_u_as,abs_u_leading where abs_u_leading is
    the modulus of the sqrt(t)-scaled value.  Optional metadata is written
    as '# key = value' comment lines before the header.
    """
    with open(path, "w", newline="") as fh:
        if meta:
            for key, value in meta.items():
                fh.write(f"# {key} = {value}\n")
        writer = csv.writer(fh)
        writer.writerow(["t", "x", "zeta", "re_u_as", "im_u_as",
                        "abs_u_leading"])
        for t, x, zeta, lead in rows:
            writer.writerow([
                f"{t:.17g}", f"{x:.17g}", f"{zeta:.17g}",
                f"{lead.u_as.real:.17g}", f"{lead.u_as.imag:.17g}",
                f"{abs(lead.u_as_over_sqrt_t):.17g}"])
