"""Geodesic-side kernels of the trace-formula decomposition.

    F(x)   = fhat(x/L) cos(tau x) / sinh(x/2)
    H_L(x) = (x/L) sum_{k>=1} F(kx)
    G_L(x) = (x/L) sup|fhat| sum_{k>=1} 1[kx <= beta L] / sinh(kx/2)      (majorant of |H_L|)

Because ``fhat`` is supported in ``[-beta, beta]`` the k-series stop at
``K = floor(beta L / x)``. For small ``x`` this is a long sum; past
``DIRECT_TERMS`` terms the remainder is taken from the Euler-Maclaurin formula
(integral + endpoint corrections), provided the summand is well resolved on
the lattice (``x * tau <= EM_RESOLUTION``). Otherwise the sum is done term by
term.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fourier_pairs import TestFunctionPair
from .quadrature import integrate

__all__ = [
    "KernelParams",
    "EVALUATION_FLOOR",
    "NONSIMPLE_MIN_LENGTH",
    "csch_half",
    "sinh_ratio",
    "eval_F",
    "eval_HL",
    "eval_GL",
    "sinh_ratio_bound_check",
    "collar_partner_min_length",
    "support_count",
]

EVALUATION_FLOOR = 1e-12
DIRECT_TERMS = 20_000
EM_RESOLUTION = 0.01
_BATCH = 4_000_000

# Shortest possible non-simple closed geodesic on any hyperbolic surface.
NONSIMPLE_MIN_LENGTH = 4.0 * math.asinh(1.0)


@dataclass(frozen=True)
class KernelParams:
    L: float
    tau: float = 0.0
    pair: TestFunctionPair = TestFunctionPair()

    def __post_init__(self):
        if not self.L > 0:
            raise ValueError("L must be positive")
        if not self.tau >= 0:
            raise ValueError("tau must be non-negative")

    @property
    def cutoff(self) -> float:
        """Largest geodesic length seen by the window, beta * L."""
        return self.pair.beta * self.L


def csch_half(t):
    """1/sinh(t/2) for t > 0, as 2 e^{-t/2} / (1 - e^{-t}) (no overflow)."""
    t = np.asarray(t, dtype=float)
    return 2.0 * np.exp(-0.5 * t) / -np.expm1(-t)


def sinh_ratio(y, k):
    """sinh(y) / sinh(k y) for y > 0, k >= 1, evaluated without overflow."""
    y = np.asarray(y, dtype=float)
    k = np.asarray(k, dtype=float)
    return np.exp(-(k - 1.0) * y) * np.expm1(-2.0 * y) / np.expm1(-2.0 * k * y)


def support_count(cutoff: float, x: float) -> int:
    """Number of k >= 1 with k x <= cutoff."""
    k = math.floor(cutoff / x)
    while (k + 1) * x <= cutoff:
        k += 1
    while k > 0 and k * x > cutoff:
        k -= 1
    return k


def _check_positive(x, floor=0.0):
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise ValueError("kernel argument must be positive")
    if floor and np.any(x < floor):
        raise ValueError(f"kernel argument below evaluation floor {floor:g}")
    return x


def eval_F(p: KernelParams, x):
    """F(x) = fhat(x/L) cos(x tau) / sinh(x/2); exactly 0 for x > beta L."""
    x = _check_positive(x)
    out = p.pair.fhat(x / p.L) * np.cos(x * p.tau) * csch_half(x)
    return out if np.ndim(out) else float(out)


def _derivative(g, t, h, backward=False):
    if backward:
        return (3.0 * g(t) - 4.0 * g(t - h) + g(t - 2.0 * h)) / (2.0 * h)
    return (g(t + h) - g(t - h)) / (2.0 * h)


def _lattice_sum(g, x: float, n_terms: int, omega: float) -> float:
    """sum_{k=1}^{n_terms} g(k x) for a vectorised summand g."""
    if n_terms <= 0:
        return 0.0
    if n_terms <= DIRECT_TERMS or x * omega > EM_RESOLUTION:
        total = 0.0
        for start in range(1, n_terms + 1, _BATCH):
            k = np.arange(start, min(n_terms, start + _BATCH - 1) + 1, dtype=float)
            total += float(np.sum(g(k * x)))
        return total
    head = float(np.sum(g(np.arange(1, DIRECT_TERMS + 1, dtype=float) * x)))
    lo = (DIRECT_TERMS + 1) * x
    hi = n_terms * x
    if n_terms == DIRECT_TERMS + 1:
        return head + float(g(np.array([lo]))[0])
    # Euler-Maclaurin on k in [DIRECT_TERMS + 1, n_terms]; next correction is
    # O((x/t)^4) relative at t = lo and negligible.
    geo = [lo * 10.0**j for j in range(1, 20) if lo * 10.0**j < hi]
    integral = integrate(g, lo, hi, omega=omega, points=geo, epsrel=1e-13, epsabs=0.0)
    ends = 0.5 * float(g(np.array([lo]))[0] + g(np.array([hi]))[0])
    dlo = _derivative(lambda t: g(np.array([t]))[0], lo, 1e-3 * lo)
    h_hi = min(1e-3 * hi, 0.25 * (hi - lo))
    dhi = _derivative(lambda t: g(np.array([t]))[0], hi, h_hi, backward=True)
    return head + integral / x + ends + x / 12.0 * (dhi - dlo)


def _kernel_sum(x, cutoff, g, omega, n_terms=None, small_block=256):
    """Vectorised over x: sum_{k <= K(x)} g(k x), K(x) = n_terms or support_count."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    flat = x.ravel()
    out = np.empty(flat.size)
    counts = np.array(
        [n_terms if n_terms is not None else support_count(cutoff, xi) for xi in flat],
        dtype=np.int64,
    )
    small = counts <= small_block
    if np.any(small):
        idx = np.flatnonzero(small)
        kmax = int(counts[idx].max(initial=0))
        if kmax == 0:
            out[idx] = 0.0
        else:
            k = np.arange(1, kmax + 1, dtype=float)
            step = max(1, 2_000_000 // kmax)
            for s in range(0, idx.size, step):
                sel = idx[s:s + step]
                t = flat[sel, None] * k[None, :]
                mask = k[None, :] <= counts[sel, None]
                vals = np.where(mask, g(np.where(mask, t, 1.0)), 0.0)
                out[sel] = vals.sum(axis=1)
    for i in np.flatnonzero(~small):
        out[i] = _lattice_sum(g, float(flat[i]), int(counts[i]), omega)
    return out.reshape(x.shape)


def eval_HL(p: KernelParams, x, n_terms: int | None = None):
    """H_L(x) = (x/L) sum_{k=1}^{K} F(kx), K = floor(beta L / x) unless ``n_terms`` is given.

    Raises ``ValueError`` for x <= 0 and for x below ``EVALUATION_FLOOR``.
    """
    scalar = np.ndim(x) == 0
    x = _check_positive(x, EVALUATION_FLOOR)
    pair, L, tau = p.pair, p.L, p.tau

    def g(t):
        return pair.fhat(t / L) * np.cos(tau * t) * csch_half(t)

    out = x / L * _kernel_sum(x, p.cutoff, g, tau, n_terms)
    return float(out.reshape(-1)[0]) if scalar else out


def eval_GL(p: KernelParams, x):
    """Majorant G_L(x) = (x/L) sup|fhat| sum_{kx <= beta L} 1/sinh(kx/2) >= |H_L(x)|."""
    scalar = np.ndim(x) == 0
    x = _check_positive(x, EVALUATION_FLOOR)
    sup = p.pair.fhat_sup
    out = x / p.L * sup * _kernel_sum(x, p.cutoff, csch_half, 0.0)
    return float(out.reshape(-1)[0]) if scalar else out


def sinh_ratio_bound_check(k: int, y: float) -> bool:
    """True iff sinh(y)/sinh(ky) < 2 e^{-(k-1) y}."""
    if k < 1 or not y > 0:
        raise ValueError("need k >= 1 and y > 0")
    # Compare in scaled form: ratio * e^{(k-1)y} = (1 - e^{-2y}) / (1 - e^{-2ky}).
    scaled = math.expm1(-2.0 * y) / math.expm1(-2.0 * k * y)
    return scaled < 2.0


def collar_partner_min_length(ell):
    """Lower bound on the length of a closed geodesic crossing a simple one of length ell.

    From sinh(ell/2) sinh(ell'/2) > 1: ell' > 2 arcsinh(1 / sinh(ell/2)).
    """
    ell = np.asarray(ell, dtype=float)
    out = 2.0 * np.arcsinh(1.0 / np.sinh(0.5 * ell))
    return out if np.ndim(out) else float(out)
