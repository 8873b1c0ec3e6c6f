"""Vectorised adaptive Gauss-Kronrod (G7/K15) panel quadrature.

Many integrals can be advanced at once: every active panel of every integral is
evaluated in a single call of the integrand, so per-integral Python overhead
stays flat even for tens of thousands of small integrals.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "QuadratureError",
    "integrate",
    "integrate_many",
    "DEFAULT_EPSREL",
    "DEFAULT_EPSABS",
    "MAX_PANELS",
]

DEFAULT_EPSREL = 1e-11
DEFAULT_EPSABS = 1e-14
MAX_PANELS = 1_000_000

# Kronrod abscissae on [0, 1) (QUADPACK qk15); odd positions are the Gauss-7 nodes.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

NODES = np.concatenate([-_XGK[:-1], [0.0], _XGK[-2::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], [_WGK[-1]], _WGK[-2::-1]])
GAUSS_WEIGHTS = np.zeros(15)
GAUSS_WEIGHTS[[1, 3, 5]] = _WG[:3]
GAUSS_WEIGHTS[7] = _WG[3]
GAUSS_WEIGHTS[[13, 11, 9]] = _WG[:3]

_EPS = np.finfo(float).eps
_CHUNK = 100_000


class QuadratureError(RuntimeError):
    """Raised when an integral cannot be resolved within the panel budget."""


def _gk15(func, lo, hi, owner):
    centre = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    x = centre[:, None] + half[:, None] * NODES[None, :]
    fx = np.asarray(func(x, owner[:, None]), dtype=float)
    if fx.shape != x.shape:
        fx = np.broadcast_to(fx, x.shape)
    if not np.all(np.isfinite(fx)):
        bad = np.argwhere(~np.isfinite(fx))[0]
        raise QuadratureError(f"integrand is not finite at x={x[tuple(bad)]!r}")
    kron = fx @ KRONROD_WEIGHTS
    gauss = fx @ GAUSS_WEIGHTS
    resabs = np.abs(fx) @ KRONROD_WEIGHTS
    mean = kron / 2.0
    resasc = np.abs(fx - mean[:, None]) @ KRONROD_WEIGHTS
    # QUADPACK error scaling, including its roundoff floor.
    raw = np.abs(kron - gauss)
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = np.where(resasc > 0, resasc * np.minimum(1.0, (200.0 * raw / resasc) ** 1.5), raw)
    err = np.maximum(scaled, 50.0 * _EPS * resabs) * half
    return kron * half, err, resabs * half


def _initial_panels(a, b, omega, points, max_panels):
    lo_list, hi_list, own_list = [], [], []
    for i, (ai, bi) in enumerate(zip(a, b)):
        if bi == ai:
            continue
        edges = [ai, bi]
        if points is not None and points[i] is not None:
            inner = [p for p in points[i] if ai < p < bi]
            edges = sorted({ai, bi, *inner})
        for left, right in zip(edges[:-1], edges[1:]):
            # Panels no wider than half an oscillation period of cos(omega x).
            n = 1
            if omega[i] > 0:
                n = max(1, math.ceil((right - left) * omega[i] / math.pi))
            if n > max_panels:
                raise QuadratureError(f"oscillation requires {n} panels (> cap {max_panels})")
            grid = np.linspace(left, right, n + 1)
            lo_list.append(grid[:-1])
            hi_list.append(grid[1:])
            own_list.append(np.full(n, i, dtype=np.int64))
    if not lo_list:
        empty = np.empty(0)
        return empty, empty, np.empty(0, dtype=np.int64)
    return np.concatenate(lo_list), np.concatenate(hi_list), np.concatenate(own_list)


def integrate_many(
    func: Callable[[np.ndarray, np.ndarray], np.ndarray],
    a: Sequence[float] | np.ndarray,
    b: Sequence[float] | np.ndarray,
    *,
    omega: float | Sequence[float] | np.ndarray = 0.0,
    points: Sequence[Sequence[float] | None] | None = None,
    epsrel: float = DEFAULT_EPSREL,
    epsabs: float = DEFAULT_EPSABS,
    max_panels: int = MAX_PANELS,
) -> tuple[np.ndarray, np.ndarray]:
    """Integrate ``func(x, idx)`` over ``[a[idx], b[idx]]`` for every ``idx``.

    ``func`` receives an array of abscissae of shape ``(P, 15)`` and an integer
    array ``idx`` of shape ``(P, 1)`` naming the integral each row belongs to;
    it must return values with the shape of ``x``.

    ``omega`` is the largest angular frequency present in each integrand. The
    initial panels are no wider than ``pi / omega``. A panel is accepted when
    its error estimate is below its length share of
    ``tol = max(epsabs, epsrel * |I|)`` plus ``tol / max_panels`` (or when it
    is roundoff limited), otherwise it is bisected; the summed error estimate
    therefore stays below ``2 * tol``. An integral needing more than ``max_panels`` panels raises
    :class:`QuadratureError`.

    Returns ``(values, error_estimates)``.
    """
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    if a.shape != b.shape:
        raise ValueError("a and b must have the same shape")
    n = a.size
    omega = np.broadcast_to(np.abs(np.asarray(omega, dtype=float)), (n,))
    sign = np.where(b < a, -1.0, 1.0)
    lo_b, hi_b = np.minimum(a, b), np.maximum(a, b)
    length = hi_b - lo_b

    lo, hi, owner = _initial_panels(lo_b, hi_b, omega, points, max_panels)
    used = np.bincount(owner, minlength=n)
    if used.max(initial=0) > max_panels:
        raise QuadratureError(f"oscillation requires {used.max()} panels (> cap {max_panels})")

    done_val = np.zeros(n)
    done_err = np.zeros(n)
    while lo.size:
        val = np.empty(lo.size)
        err = np.empty(lo.size)
        rabs = np.empty(lo.size)
        for s in range(0, lo.size, _CHUNK):
            sl = slice(s, s + _CHUNK)
            val[sl], err[sl], rabs[sl] = _gk15(func, lo[sl], hi[sl], owner[sl])

        estimate = done_val + np.bincount(owner, weights=val, minlength=n)
        tol = np.maximum(epsabs, epsrel * np.abs(estimate))
        # Length share plus a floor of tol / max_panels; as no integral may
        # exceed max_panels panels, the accepted errors add up to <= 2 tol.
        local_tol = tol[owner] * ((hi - lo) / length[owner] + 1.0 / max_panels)
        roundoff = np.abs(err) <= 100.0 * _EPS * rabs
        ok = (err <= local_tol) | roundoff

        width = hi - lo
        stuck = ~ok & (width <= 64 * _EPS * np.maximum(np.abs(lo), np.abs(hi)))
        if np.any(stuck):
            j = np.flatnonzero(stuck)[0]
            raise QuadratureError(
                f"cannot resolve integrand near x={lo[j]!r}: panel width at machine resolution"
            )

        done_val += np.bincount(owner[ok], weights=val[ok], minlength=n)
        done_err += np.bincount(owner[ok], weights=err[ok], minlength=n)
        keep = ~ok
        used += np.bincount(owner[keep], minlength=n)
        if used.max(initial=0) > max_panels:
            raise QuadratureError(f"panel cap {max_panels} exceeded before reaching tolerance")

        mid = 0.5 * (lo[keep] + hi[keep])
        lo = np.concatenate([lo[keep], mid])
        hi = np.concatenate([mid, hi[keep]])
        owner = np.concatenate([owner[keep], owner[keep]])

    return sign * done_val, done_err


def integrate(
    func: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    *,
    omega: float = 0.0,
    points: Sequence[float] | None = None,
    epsrel: float = DEFAULT_EPSREL,
    epsabs: float = DEFAULT_EPSABS,
    max_panels: int = MAX_PANELS,
) -> float:
    """Integrate a vectorised scalar function ``func(x)`` over ``[a, b]``."""
    vals, _ = integrate_many(
        lambda x, _idx: func(x),
        [a],
        [b],
        omega=omega,
        points=[points] if points is not None else None,
        epsrel=epsrel,
        epsabs=epsabs,
        max_panels=max_panels,
    )
    return float(vals[0])
