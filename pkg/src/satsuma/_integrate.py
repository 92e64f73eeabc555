"""Backend dispatch for the transfer-matrix sweep.

The compiled extension integrates each spectral node independently with its
own adaptive step sequence.  The fallback marches the whole batch of nodes in
lockstep, controlling the shared step by the worst error in the batch; both
use the same Dormand-Prince 5(4) tableau and the same per-unit-step accept
rule (local error at most tol * h / span), so accumulated error over the
window is ~tol regardless of step count.

Set SATSUMA_PURE_PYTHON=1 to force the fallback even when the extension is
available.
"""

from __future__ import annotations

import os

import numpy as np

from .errors import IntegrationError

try:
    from . import _core
except ImportError:  # extension not built; fallback only
    _core = None

__all__ = ["backend_name", "propagate"]


def backend_name() -> str:
    if _core is not None and not os.environ.get("SATSUMA_PURE_PYTHON"):
        return "compiled"
    return "numpy"


def propagate(c0, c1, c2, c3, x0, dx, xmin, xmax, kgrid, tol,
              hmin=1e-12, max_steps=2_000_000):
    """Transition matrices over kgrid; returns (smat, accepted, rejected)."""
    args = (np.ascontiguousarray(c0), np.ascontiguousarray(c1),
            np.ascontiguousarray(c2), np.ascontiguousarray(c3),
            float(x0), float(dx), float(xmin), float(xmax),
            np.ascontiguousarray(kgrid, dtype=float), float(tol),
            float(hmin), int(max_steps))
    if backend_name() == "compiled":
        try:
            return _core.propagate(*args)
        except RuntimeError as exc:
            raise IntegrationError(str(exc)) from exc
    return _propagate_numpy(*args)


# Dormand-Prince 5(4) tableau (identical constants in the extension)
_A = (
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
)
_C = (1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0)
_B = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84)
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525,
      -1 / 40)


def _propagate_numpy(c0, c1, c2, c3, x0, dx, xmin, xmax, kgrid, tol,
                     hmin, max_steps):
    nseg = c0.shape[0]
    nk = kgrid.shape[0]

    def u_at(x):
        i = int(np.floor((x - x0) / dx))
        i = 0 if i < 0 else (nseg - 1 if i >= nseg else i)
        t = x - (x0 + i * dx)
        return ((c0[i] * t + c1[i]) * t + c2[i]) * t + c3[i]

    def rhs(x, y):
        u = u_at(x)
        e = np.exp(2j * kgrid * x)
        em = np.conj(e)
        f = np.empty_like(y)
        f[:, 0, :] = (u * e)[:, None] * y[:, 2, :]
        f[:, 1, :] = (np.conj(u) * e)[:, None] * y[:, 2, :]
        f[:, 2, :] = (-(np.conj(u) * em))[:, None] * y[:, 0, :] \
            + (-(u * em))[:, None] * y[:, 1, :]
        return f

    y = np.broadcast_to(np.eye(3, dtype=complex), (nk, 3, 3)).copy()
    span = xmax - xmin
    x = xmin
    h = span * 1e-4
    accepted = rejected = 0
    stages = [None] * 7
    stages[0] = rhs(x, y)

    for _ in range(max_steps):
        if x >= xmax:
            break
        clamped = h > xmax - x
        if clamped:
            h = xmax - x
        for i, (arow, ci) in enumerate(zip(_A, _C[:5])):
            incr = sum(a * stages[j] for j, a in enumerate(arow) if a)
            stages[i + 1] = rhs(x + ci * h, y + h * incr)
        ynew = y + h * sum(b * stages[j] for j, b in enumerate(_B) if b)
        stages[6] = rhs(x + h, ynew)
        errarr = h * sum(e * stages[j] for j, e in enumerate(_E) if e)
        err = float(np.max(np.abs(errarr)))
        tol_step = tol * h / span
        if err <= tol_step:
            accepted += 1
            x += h
            y = ynew
            stages[0] = stages[6]
            fac = 5.0 if err == 0.0 else min(0.9 * (tol_step / err) ** 0.2, 5.0)
            h *= fac
        else:
            rejected += 1
            h *= max(0.9 * (tol_step / err) ** 0.2, 0.2)
            if h < hmin and not clamped:
                raise IntegrationError(
                    f"step size collapsed below {hmin:g} (batched sweep)")
    else:
        raise IntegrationError("step budget exhausted (batched sweep)")

    acc = np.full(nk, accepted, dtype=np.int64)
    rej = np.full(nk, rejected, dtype=np.int64)
    return y, acc, rej
