"""Direct scattering transform for the coupled third-order wave model.

Computes the 3x3 transition matrix s(k) of the spatial spectral problem from
sampled decaying initial data, the reflection row rho(k) = (s31/s33,
s32/s33), and the derived modulation quantities: the exponent
nu = ln(1 + |rho(k0)|^2)/(2 pi), the boundary phase integral chi, and the
explicit scalar factor det delta(k) with its jump across the spectral
interval [-k0, k0].

The spectral ODE is integrated in the oscillatory gauge Y = e^{ikx sigma^} M,
whose coefficient matrix vanishes with the potential; Y(x_min) = I and
Y(x_max) is s(k) up to tail truncation, which the decay requirement on the
profile keeps below the integration tolerance.  See _integrate for the
stepping scheme and backend selection.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.interpolate import CubicSpline

from . import _integrate
from .errors import (
    ConfigError,
    DecayError,
    QuadratureError,
    SpectralSingularityError,
)

__all__ = [
    "InitialProfile",
    "ScatteringMatrix",
    "ReflectionTable",
    "scattering_matrix",
    "scattering_matrices",
    "scattering_invariant_defects",
    "reflection",
    "reflection_table",
    "default_k_grid",
    "nu_of",
    "chi_of",
    "det_delta",
    "build_jump",
    "load_profile_csv",
    "save_profile_csv",
    "load_reflection_csv",
    "save_reflection_csv",
]

_SWAP12 = np.array([[0, 1, 0], [1, 0, 0], [0, 0, 1]], dtype=float)


@dataclass(eq=False)
class InitialProfile:
    """Uniformly sampled decaying initial datum on [x_min, x_max]."""

    x_min: float
    x_max: float
    n: int
    u0: np.ndarray
    decay_tol: float = 1e-12

    def __post_init__(self):
        self.u0 = np.asarray(self.u0, dtype=complex)
        if not self.x_min < self.x_max:
            raise ValueError("x_min must be smaller than x_max")
        if self.n < 16:
            raise ValueError("need at least 16 samples")
        if self.u0.shape != (self.n,):
            raise ValueError(f"u0 must have shape ({self.n},)")
        b = max(abs(self.u0[0]), abs(self.u0[-1]))
        if b > self.decay_tol:
            raise DecayError(
                f"boundary samples reach {b:.3e} > decay_tol {self.decay_tol:.1e}; "
                "widen the window")

    @classmethod
    def from_callable(cls, f, x_min, x_max, n, decay_tol=1e-12):
        x = np.linspace(x_min, x_max, n)
        return cls(x_min=float(x_min), x_max=float(x_max), n=int(n),
                   u0=np.asarray(f(x), dtype=complex), decay_tol=decay_tol)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n)

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.n - 1)

    def spline_coefficients(self):
        """Per-segment cubic coefficients (highest degree first)."""
        cs = CubicSpline(self.x, self.u0)
        return tuple(np.ascontiguousarray(cs.c[i], dtype=complex) for i in range(4))


@dataclass(eq=False)
class ScatteringMatrix:
    """Transition matrix of the spectral problem at one real node k."""

    k: float
    s: np.ndarray

    def __post_init__(self):
        self.s = np.asarray(self.s, dtype=complex)
        if self.s.shape != (3, 3):
            raise ValueError("s must be 3x3")

    def det_defect(self) -> float:
        return abs(np.linalg.det(self.s) - 1.0)

    def unitarity_defect(self) -> float:
        return float(np.max(np.abs(self.s.conj().T @ self.s - np.eye(3))))


@dataclass(eq=False)
class ReflectionTable:
    """Reflection row and its squared modulus over a k-grid."""

    k_nodes: np.ndarray
    rho: np.ndarray
    rho_norm_sq: np.ndarray

    def __post_init__(self):
        self.k_nodes = np.asarray(self.k_nodes, dtype=float)
        self.rho = np.asarray(self.rho, dtype=complex)
        self.rho_norm_sq = np.asarray(self.rho_norm_sq, dtype=float)
        nk = self.k_nodes.shape[0]
        if self.k_nodes.ndim != 1 or nk < 2:
            raise ValueError("k_nodes must be a 1-D grid with >= 2 nodes")
        if np.any(np.diff(self.k_nodes) <= 0):
            raise ValueError("k_nodes must be strictly increasing")
        if self.rho.shape != (nk, 2) or self.rho_norm_sq.shape != (nk,):
            raise ValueError("rho must be (n, 2) and rho_norm_sq (n,)")
        expected = np.abs(self.rho[:, 0]) ** 2 + np.abs(self.rho[:, 1]) ** 2
        if np.any(self.rho_norm_sq < 0) or np.any(
                np.abs(self.rho_norm_sq - expected) > 1e-12 * (1.0 + expected)):
            raise ValueError("rho_norm_sq inconsistent with rho")


def scattering_matrices(profile: InitialProfile, kgrid, tol: float = 1e-10,
                        hmin: float = 1e-12) -> np.ndarray:
    """Batch transition matrices, shape (len(kgrid), 3, 3)."""
    kgrid = np.asarray(kgrid, dtype=float)
    if not np.all(np.isfinite(kgrid)):
        raise ConfigError("k nodes must be finite")
    c0, c1, c2, c3 = profile.spline_coefficients()
    smat, _, _ = _integrate.propagate(
        c0, c1, c2, c3, profile.x_min, profile.dx,
        profile.x_min, profile.x_max, kgrid, tol, hmin=hmin)
    return smat


def scattering_matrix(profile: InitialProfile, k: float,
                      tol: float = 1e-10) -> ScatteringMatrix:
    """Transition matrix at a single real node."""
    smat = scattering_matrices(profile, np.array([float(k)]), tol=tol)
    return ScatteringMatrix(k=float(k), s=smat[0])


def scattering_invariant_defects(kgrid, smats) -> dict:
    """Worst-case unimodularity, unitarity, and conjugation-symmetry defects.

    The conjugation check pairs each node with its negative, so the grid must
    be symmetric about k = 0.
    """
    kgrid = np.asarray(kgrid, dtype=float)
    smats = np.asarray(smats, dtype=complex)
    scale = max(1.0, float(np.max(np.abs(kgrid))))
    if np.max(np.abs(kgrid + kgrid[::-1])) > 1e-12 * scale:
        raise ConfigError("conjugation check needs a grid symmetric about 0")
    dets = np.linalg.det(smats)
    unit = smats.conj().transpose(0, 2, 1) @ smats - np.eye(3)
    paired = _SWAP12 @ np.conj(smats[::-1]) @ _SWAP12
    return {
        "det": float(np.max(np.abs(dets - 1.0))),
        "unitarity": float(np.max(np.abs(unit))),
        "conjugation": float(np.max(np.abs(smats - paired))),
    }


def reflection(sm: ScatteringMatrix, zero_threshold: float = 1e-6) -> np.ndarray:
    """Reflection row (s31/s33, s32/s33)."""
    s33 = sm.s[2, 2]
    if abs(s33) < zero_threshold:
        raise SpectralSingularityError(sm.k, abs(s33))
    return np.array([sm.s[2, 0] / s33, sm.s[2, 1] / s33])


def reflection_table(profile: InitialProfile, k_nodes, tol: float = 1e-10,
                     zero_threshold: float = 1e-6) -> ReflectionTable:
    k_nodes = np.asarray(k_nodes, dtype=float)
    smats = scattering_matrices(profile, k_nodes, tol=tol)
    s33 = smats[:, 2, 2]
    small = np.abs(s33) < zero_threshold
    if np.any(small):
        i = int(np.argmax(small))
        raise SpectralSingularityError(float(k_nodes[i]), float(np.abs(s33[i])))
    rho = smats[:, 2, :2] / s33[:, None]
    nsq = np.abs(rho[:, 0]) ** 2 + np.abs(rho[:, 1]) ** 2
    return ReflectionTable(k_nodes=k_nodes, rho=rho, rho_norm_sq=nsq)


def default_k_grid(k0: float, n: int = 801) -> np.ndarray:
    """Uniform grid on [-3 k0 - 1, 3 k0 + 1]."""
    half = 3.0 * k0 + 1.0
    return np.linspace(-half, half, n)


def nu_of(rho_k0) -> float:
    """Modulation exponent ln(1 + |rho|^2) / (2 pi)."""
    rho_k0 = np.asarray(rho_k0, dtype=complex)
    nsq = float(np.abs(rho_k0[0]) ** 2 + np.abs(rho_k0[1]) ** 2)
    return math.log1p(nsq) / (2.0 * math.pi)


# ---------------------------------------------------------------------------
# phase integral and det delta
# ---------------------------------------------------------------------------

_GL_NODES, _GL_WEIGHTS = leggauss(16)
_MAX_PANELS = 1 << 15


def _log_modulus_spline(table: ReflectionTable):
    return CubicSpline(table.k_nodes, np.log1p(table.rho_norm_sq))


def _require_coverage(table: ReflectionTable, k0: float):
    pad = 1e-12 * max(1.0, k0)
    if table.k_nodes[0] > -k0 + pad or table.k_nodes[-1] < k0 - pad:
        raise QuadratureError(
            f"reflection table covers [{table.k_nodes[0]:g}, "
            f"{table.k_nodes[-1]:g}] but the phase integral needs "
            f"[-{k0:g}, {k0:g}]")


def _refined_panels(f, a, b, quad_tol):
    """Composite 16-point Gauss-Legendre with panel doubling."""
    prev = None
    npanels = 8
    while npanels <= _MAX_PANELS:
        edges = np.linspace(a, b, npanels + 1)
        mid = 0.5 * (edges[:-1] + edges[1:])
        halfw = 0.5 * (edges[1] - edges[0])
        xi = (mid[:, None] + halfw * _GL_NODES[None, :]).ravel()
        vals = f(xi).reshape(npanels, -1)
        total = halfw * np.sum(vals @ _GL_WEIGHTS)
        if prev is not None and abs(total - prev) <= quad_tol:
            return total
        prev = total
        npanels *= 2
    raise QuadratureError(
        f"panel refinement stalled at {_MAX_PANELS} panels "
        f"(last delta {abs(total - prev):.2e})")


def chi_of(table: ReflectionTable, k0: float, at: float,
           quad_tol: float = 1e-9, max_node_spacing: float | None = None) -> complex:
    """Boundary phase integral at at = +k0 or -k0.

    The integrand (w(xi) - w(at)) / (xi - at), w = ln(1 + |rho|^2), has a
    removable singularity at the chosen endpoint; it is filled with the limit
    w'(at), so no principal value is involved.  The result is purely
    imaginary by construction (real integrand divided by 2 pi i).
    """
    k0 = float(k0)
    if k0 <= 0:
        raise ConfigError("k0 must be positive")
    at = float(at)
    if abs(abs(at) - k0) > 1e-12 * k0:
        raise ConfigError(f"evaluation point must be +-k0, got {at:g}")
    _require_coverage(table, k0)
    if max_node_spacing is not None:
        inside = (table.k_nodes >= -k0) & (table.k_nodes <= k0)
        if np.max(np.diff(table.k_nodes[inside])) > max_node_spacing:
            raise QuadratureError(
                f"node spacing on [-k0, k0] exceeds {max_node_spacing:g}")
    w = _log_modulus_spline(table)
    wat = float(w(at))
    wslope = float(w.derivative()(at))

    def f(xi):
        d = xi - at
        out = np.empty_like(xi)
        tiny = np.abs(d) < 1e-12
        out[~tiny] = (w(xi[~tiny]) - wat) / d[~tiny]
        out[tiny] = wslope
        return out

    integral = _refined_panels(f, -k0, k0, quad_tol)
    return integral / (2j * math.pi)


def _chi_general(table: ReflectionTable, k0: float, k: complex,
                 quad_tol: float) -> complex:
    """Phase integral (with the w(k0) reference level) continued off [-k0, k0].

    Re-centering the subtraction at the clamped real part keeps the integrand
    bounded when k approaches the interval; the shift between the two
    reference levels integrates to a logarithm.
    """
    w = _log_modulus_spline(table)
    xistar = min(max(k.real, -k0), k0)
    wstar = float(w(xistar))
    wk0 = float(w(k0))

    def f(xi):
        return (w(xi) - wstar) / (xi - k)

    integral = _refined_panels(f, -k0, k0, quad_tol)
    remainder = (wstar - wk0) * np.log((k - k0) / (k + k0))
    return (integral + remainder) / (2j * math.pi)


def det_delta(table: ReflectionTable, k0: float, k,
              quad_tol: float = 1e-9, endpoint_cutoff: float = 1e-3) -> complex:
    """Scalar factor ((k-k0)/(k+k0))^{-i nu} e^{chi(k)} off the interval."""
    k0 = float(k0)
    if k0 <= 0:
        raise ConfigError("k0 must be positive")
    k = complex(k)
    if min(abs(k - k0), abs(k + k0)) < endpoint_cutoff:
        raise QuadratureError(
            f"evaluation point {k} within {endpoint_cutoff:g} of an endpoint")
    if k.imag == 0.0 and abs(k.real) <= k0:
        raise QuadratureError("det delta is discontinuous on [-k0, k0]; "
                              "evaluate off the interval")
    _require_coverage(table, k0)
    w = _log_modulus_spline(table)
    nu = float(w(k0)) / (2.0 * math.pi)
    chi = _chi_general(table, k0, k, quad_tol)
    ratio = (k - k0) / (k + k0)
    return complex(np.exp(-1j * nu * np.log(ratio) + chi))


def build_jump(rho_k, x: float, t: float, k: float, zeta: float) -> np.ndarray:
    """Block jump matrix [[I, rho^H e^{-t Phi}], [rho e^{t Phi}, 1 + |rho|^2]].

    Phi = 2 i zeta k - 8 i k^3 is purely imaginary for real k, which makes
    the result Hermitian (and positive definite: its eigenvalues are 1 and
    the two roots of (lam - 1)(lam - 1 - |rho|^2) = |rho|^2).
    """
    rho_k = np.asarray(rho_k, dtype=complex)
    if rho_k.shape != (2,):
        raise ValueError("rho_k must be a length-2 row")
    if t != 0.0 and abs(x - zeta * t) > 1e-9 * max(1.0, abs(x), abs(zeta * t)):
        raise ConfigError(f"inconsistent ray: x = {x:g} but zeta t = {zeta * t:g}")
    phase = t * (2j * zeta * k - 8j * k**3)
    e_plus = np.exp(phase)
    e_minus = np.exp(-phase)
    j = np.eye(3, dtype=complex)
    j[0, 2] = np.conj(rho_k[0]) * e_minus
    j[1, 2] = np.conj(rho_k[1]) * e_minus
    j[2, 0] = rho_k[0] * e_plus
    j[2, 1] = rho_k[1] * e_plus
    j[2, 2] = 1.0 + abs(rho_k[0]) ** 2 + abs(rho_k[1]) ** 2
    return j


# ---------------------------------------------------------------------------
# CSV interfaces
# ---------------------------------------------------------------------------


def save_profile_csv(profile: InitialProfile, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "re_u0", "im_u0"])
        for xv, uv in zip(profile.x, profile.u0):
            writer.writerow([f"{xv:.17g}", f"{uv.real:.17g}", f"{uv.imag:.17g}"])


def load_profile_csv(path, decay_tol: float = 1e-12) -> InitialProfile:
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    if data.ndim != 2 or data.shape[1] != 3:
        raise ConfigError("profile CSV must have columns x,re_u0,im_u0")
    x = data[:, 0]
    steps = np.diff(x)
    if np.any(steps <= 0):
        raise ConfigError("profile x column must be strictly increasing")
    if np.max(np.abs(steps - steps.mean())) > 1e-9 * steps.mean():
        raise ConfigError("profile grid must be uniform")
    return InitialProfile(x_min=float(x[0]), x_max=float(x[-1]), n=len(x),
                          u0=data[:, 1] + 1j * data[:, 2], decay_tol=decay_tol)


def save_reflection_csv(table: ReflectionTable, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "re_rho1", "im_rho1", "re_rho2", "im_rho2",
                         "rho_norm_sq"])
        for kv, row, nsq in zip(table.k_nodes, table.rho, table.rho_norm_sq):
            writer.writerow([f"{kv:.17g}",
                             f"{row[0].real:.17g}", f"{row[0].imag:.17g}",
                             f"{row[1].real:.17g}", f"{row[1].imag:.17g}",
                             f"{nsq:.17g}"])


def load_reflection_csv(path) -> ReflectionTable:
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    if data.ndim != 2 or data.shape[1] != 6:
        raise ConfigError("reflection CSV must have six columns")
    rho = np.stack([data[:, 1] + 1j * data[:, 2],
                    data[:, 3] + 1j * data[:, 4]], axis=1)
    return ReflectionTable(k_nodes=data[:, 0], rho=rho, rho_norm_sq=data[:, 5])
