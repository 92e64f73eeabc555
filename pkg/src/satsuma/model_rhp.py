"""Sector-wise parabolic-cylinder solution of the local model problem.

After conjugating out the power and exponential growth, the piecewise
analytic model matrix satisfies a constant-coefficient first-order system
d(Psi)/dz = (i z / 2 sigma + beta) Psi with an off-diagonal constant block
beta.  The bottom row and last column close into scalar second-order
(Weber) equations, so the written combinations

    psi22              (scalar)
    beta21 psi11       (1x2 row)
    psi21              (1x2 row)
    beta21 psi12       (scalar)

are explicit parabolic-cylinder expressions in the two sectors adjacent to
the ray arg z = -pi/4.  This module evaluates those combinations, checks
the first-order system and the scalar Weber equation by central
differences, and verifies the jump relation across the ray, which is
numerically equivalent to the classical connection formula for D once the
closed-form beta21 row is inserted.

Conventions: a = -i nu; all fractional powers use the principal branch;
beta12 = -beta21^dagger (enforced, which makes beta21 beta12 = -nu).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .asymptotics import scaled_reflection_row
from .errors import ConfigError
from .specfun import pcf_d

_TWO_PI = 2.0 * math.pi

_SECTORS = {
    "lower": (-0.75 * math.pi, -0.25 * math.pi),
    "lower_right": (-0.25 * math.pi, 0.25 * math.pi),
}


@dataclass(eq=False)
class ModelParameters:
    """Decay exponent nu, reflection row rho0 at the stationary point.

    nu and rho0 are independent inputs; when they violate the modulus
    relation nu = log1p(|rho0|^2) / (2 pi) the instance is still usable
    (the jump identity holds for any pair) but `consistent` is False.
    nu = 0 is admitted for the reflectionless degenerate case.
    """

    nu: float
    rho0: np.ndarray
    consistency_tol: float = 1e-8
    consistent: bool = field(init=False)

    def __post_init__(self):
        if not self.nu >= 0:
            raise ConfigError(f"nu must be nonnegative, got {self.nu}")
        self.rho0 = np.ascontiguousarray(self.rho0, dtype=complex)
        if self.rho0.shape != (2,):
            raise ConfigError(
                f"rho0 must have shape (2,), got {self.rho0.shape}")
        nsq = float(np.vdot(self.rho0, self.rho0).real)
        nu_expected = math.log1p(nsq) / _TWO_PI
        self.consistent = abs(self.nu - nu_expected) <= self.consistency_tol

    @property
    def a(self) -> complex:
        """Parabolic-cylinder order parameter a = -i nu."""
        return -1j * self.nu

    @classmethod
    def with_consistent_rho(cls, nu: float,
                            direction=(1.0, 0.0)) -> "ModelParameters":
        """Scale `direction` so the modulus relation holds exactly for nu."""
        if not nu >= 0:
            raise ConfigError(f"nu must be nonnegative, got {nu}")
        vec = np.ascontiguousarray(direction, dtype=complex)
        if vec.shape != (2,):
            raise ConfigError(f"direction must have shape (2,), got {vec.shape}")
        norm = float(np.vdot(vec, vec).real)
        if nu > 0 and norm == 0.0:
            raise ConfigError("direction must be nonzero when nu > 0")
        target = math.expm1(_TWO_PI * nu)
        rho0 = vec * math.sqrt(target / norm) if nu > 0 else np.zeros(2, complex)
        return cls(nu=nu, rho0=rho0)


def beta21_of(params: ModelParameters) -> np.ndarray:
    """Closed-form constant row beta21 = nu Gamma(-i nu) e^{i pi/4 - pi nu/2} rho0 / sqrt(2 pi).

    Shares its implementation with the asymptotics amplitude row, so the
    two agree bit for bit on identical inputs.
    """
    return scaled_reflection_row(params.nu, params.rho0)


@dataclass(frozen=True)
class PsiEntries:
    """The four written combinations of the model matrix at one point."""

    psi22: complex
    beta21_psi11: np.ndarray
    psi21: np.ndarray
    beta21_psi12: complex


def _require_sector(z: complex, sector: str) -> None:
    if sector not in _SECTORS:
        raise ValueError(
            f"unknown sector {sector!r}; expected one of {sorted(_SECTORS)}")
    lo, hi = _SECTORS[sector]
    th = cmath.phase(complex(z))
    if not lo < th < hi:
        raise ValueError(
            f"arg z = {th:.6f} is outside the open sector {sector!r} "
            f"({lo:.6f}, {hi:.6f}); on a boundary ray use jump_residual_ray")


def psi_entries(params: ModelParameters, z: complex, sector: str) -> PsiEntries:
    """Evaluate the four written combinations in the named open sector.

    psi22 and beta21 psi12 share one expression across both sectors; the
    row combinations switch between rotations e^{3 i pi/4} z and
    e^{-i pi/4} z of the parabolic-cylinder argument with matching real
    exponential prefactors.
    """
    _require_sector(z, sector)
    z = complex(z)
    nu = params.nu
    a = params.a
    b21 = beta21_of(params)
    rot_p = cmath.exp(0.25j * math.pi) * z
    psi22 = math.exp(-0.25 * math.pi * nu) * pcf_d(a, rot_p)
    b21_psi12 = cmath.exp(0.25 * math.pi * (1j - nu)) * a * pcf_d(a - 1, rot_p)
    if sector == "lower":
        rot = cmath.exp(0.75j * math.pi) * z
        row_scale = math.exp(0.75 * math.pi * nu)
        col_scale = cmath.exp(0.25 * math.pi * (1j + 3 * nu))
    else:
        rot = cmath.exp(-0.25j * math.pi) * z
        row_scale = math.exp(-0.25 * math.pi * nu)
        col_scale = cmath.exp(-0.25 * math.pi * (3j + nu))
    b21_psi11 = b21 * (row_scale * pcf_d(-a, rot))
    psi21 = b21 * (col_scale * pcf_d(-a - 1, rot))
    return PsiEntries(psi22=psi22, beta21_psi11=b21_psi11, psi21=psi21,
                      beta21_psi12=b21_psi12)


def ode_residual(params: ModelParameters, z: complex, sector: str,
                 h: float = 1e-3) -> float:
    """Central-difference residual of the first-order system on the quadruple.

    The four closed equations (beta12 = -beta21^dagger, so
    beta21 beta12 = -nu):

        psi22'          = -(i z / 2) psi22          + beta21 psi12
        (beta21 psi12)' =  (i z / 2) beta21 psi12   - nu psi22
        psi21'          = -(i z / 2) psi21          + beta21 psi11
        (beta21 psi11)' =  (i z / 2) beta21 psi11   - nu psi21

    Returns the max-abs residual over all components.
    """
    z = complex(z)
    mid = psi_entries(params, z, sector)
    fwd = psi_entries(params, z + h, sector)
    bwd = psi_entries(params, z - h, sector)
    inv2h = 1.0 / (2.0 * h)
    half_iz = 0.5j * z
    nu = params.nu
    res = [
        (fwd.psi22 - bwd.psi22) * inv2h + half_iz * mid.psi22
        - mid.beta21_psi12,
        (fwd.beta21_psi12 - bwd.beta21_psi12) * inv2h
        - half_iz * mid.beta21_psi12 + nu * mid.psi22,
        np.max(np.abs((fwd.psi21 - bwd.psi21) * inv2h
                      + half_iz * mid.psi21 - mid.beta21_psi11)),
        np.max(np.abs((fwd.beta21_psi11 - bwd.beta21_psi11) * inv2h
                      - half_iz * mid.beta21_psi11 + nu * mid.psi21)),
    ]
    return float(max(abs(complex(r)) for r in res))


def psi22_weber_residual(params: ModelParameters, z: complex, sector: str,
                         h: float = 1e-3) -> float:
    """Central-difference residual of psi22'' = (-i/2 - z^2/4 - nu) psi22."""
    z = complex(z)
    mid = psi_entries(params, z, sector).psi22
    fwd = psi_entries(params, z + h, sector).psi22
    bwd = psi_entries(params, z - h, sector).psi22
    second = (fwd - 2.0 * mid + bwd) / (h * h)
    return abs(second - (-0.5j - z * z / 4.0 - params.nu) * mid)


def jump_residual_ray(params: ModelParameters, r: float) -> float:
    """Absolute residual of the jump relation at z = r e^{-i pi/4}.

    The limit of the beta21 psi11 row from the lower sector must equal its
    limit from the lower-right sector minus (beta21 psi12) rho0.  The
    rotated arguments are exactly i r, -i r, and r, so both sides reduce
    to parabolic-cylinder values on the axes; with the closed-form beta21
    the identity is the connection formula for D, and the returned value
    measures how far the implementation is from it.
    """
    if not r > 0:
        raise ValueError(f"r must be positive, got {r}")
    nu = params.nu
    a = params.a
    b21 = beta21_of(params)
    lhs = b21 * (math.exp(0.75 * math.pi * nu) * pcf_d(-a, 1j * r))
    rhs = b21 * (math.exp(-0.25 * math.pi * nu) * pcf_d(-a, -1j * r)) \
        - (cmath.exp(0.25 * math.pi * (1j - nu)) * a * pcf_d(a - 1, complex(r))
           ) * params.rho0
    return float(np.max(np.abs(lhs - rhs)))
