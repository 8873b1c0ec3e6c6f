"""Band-limited test functions ``f`` together with their Fourier transforms.

Convention: ``fhat(x) = (1/2pi) int f(y) exp(-ixy) dy`` so that
``f(y) = int fhat(x) exp(ixy) dx``. Every family is built from a profile
``phi`` on ``[-1, 1]``::

    fhat(x) = normalization * phi(x / beta)
    f(y)    = normalization * beta * Phi(beta * y),   Phi(z) = int_{-1}^{1} phi(s) e^{isz} ds

``Phi`` is entire (Paley-Wiener), so ``f`` is evaluated at complex arguments
too. Arguments are accepted on the strip ``|Im(beta * y)| <= STRIP_HALF_WIDTH``.

Families
--------
fejer      phi(s) = (1 - |s|)_+          Phi(z) = (sin(z/2) / (z/2))**2      C^0
hann       phi(s) = cos(pi s / 2)**2     closed form via three sincs         C^1
cinf_bump  phi(s) = exp(-1 / (1 - s^2))  Phi by adaptive quadrature          C^infinity
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .quadrature import integrate_many

__all__ = [
    "FAMILIES",
    "STRIP_HALF_WIDTH",
    "TestFunctionPair",
    "eval_fhat",
    "eval_f",
    "scale_support",
]

FAMILIES = ("fejer", "cinf_bump", "hann")
STRIP_HALF_WIDTH = 200.0

_PROFILE_SUP = {"fejer": 1.0, "hann": 1.0, "cinf_bump": math.exp(-1.0)}


def _sinc(z):
    """sin(z)/z for real or complex arrays, with a series near 0."""
    z = np.asarray(z)
    small = np.abs(z) < 1e-4
    safe = np.where(small, 1.0, z)
    z2 = z * z
    return np.where(small, 1.0 - z2 / 6.0 + z2 * z2 / 120.0, np.sin(safe) / safe)


def _profile(family: str, s):
    s = np.abs(np.asarray(s, dtype=float))
    inside = s < 1.0
    if family == "fejer":
        return np.where(inside, 1.0 - s, 0.0)
    if family == "hann":
        return np.where(s <= 1.0, np.cos(0.5 * np.pi * s) ** 2, 0.0)
    # phi(+-1) := 0; the exponent is only formed strictly inside.
    t = np.where(inside, s, 0.0)
    return np.where(inside, np.exp(-1.0 / (1.0 - t * t)), 0.0)


def _profile_deficit(family: str, s):
    """phi(0) - phi(s) without cancellation near s = 0."""
    s = np.abs(np.asarray(s, dtype=float))
    inside = s < 1.0
    if family == "fejer":
        return np.where(inside, s, 1.0)
    if family == "hann":
        return np.where(s <= 1.0, np.sin(0.5 * np.pi * s) ** 2, 1.0)
    t = np.where(inside, s, 0.0)
    return np.where(inside, -math.exp(-1.0) * np.expm1(-t * t / (1.0 - t * t)), math.exp(-1.0))


def _bump_transform(z: np.ndarray) -> np.ndarray:
    """Phi(z) = 2 int_0^1 phi(s) cos(sz) ds for the C^infinity bump, batched."""
    z = np.asarray(z, dtype=complex).ravel()
    re, im = z.real.copy(), z.imag.copy()
    n = z.size
    zeros, ones = np.zeros(n), np.ones(n)

    def real_part(x, idx):
        return _profile("cinf_bump", x) * np.cos(x * re[idx]) * np.cosh(x * im[idx])

    vr, _ = integrate_many(real_part, zeros, ones, omega=np.abs(re))
    out = 2.0 * vr.astype(complex)
    needs_imag = (im != 0.0) & (re != 0.0)
    if np.any(needs_imag):
        sel = np.flatnonzero(needs_imag)
        re_s, im_s = re[sel], im[sel]
        vi, _ = integrate_many(
            lambda x, idx: -_profile("cinf_bump", x) * np.sin(x * re_s[idx]) * np.sinh(x * im_s[idx]),
            zeros[sel], ones[sel], omega=np.abs(re_s),
        )
        out[sel] += 2j * vi
    return out


@dataclass(frozen=True)
class TestFunctionPair:
    """An admissible pair ``(f, fhat)``: ``fhat`` even, supported in ``[-beta, beta]``."""

    family: str = "fejer"
    beta: float = 1.0
    normalization: float = 1.0

    __test__ = False  # not a pytest class

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if not self.beta > 0:
            raise ValueError("beta must be positive")
        # normalization 0 is allowed: it gives the zero pair.
        if not self.normalization >= 0:
            raise ValueError("normalization must be non-negative")

    @property
    def fhat_sup(self) -> float:
        """max |fhat|."""
        return self.normalization * _PROFILE_SUP[self.family]

    @property
    def f_integral(self) -> float:
        """int f(y) dy = 2 pi fhat(0)."""
        return 2.0 * math.pi * self.fhat(0.0)

    def fhat(self, x):
        out = self.normalization * _profile(self.family, np.asarray(x, dtype=float) / self.beta)
        return out if np.ndim(out) else float(out)

    def fhat_deficit(self, x):
        """fhat(0) - fhat(x), accurate for small x."""
        out = self.normalization * _profile_deficit(self.family, np.asarray(x, dtype=float) / self.beta)
        return out if np.ndim(out) else float(out)

    def f(self, y):
        """Evaluate ``f``; real input gives real output, complex input complex output."""
        y_arr = np.asarray(y)
        is_complex = np.iscomplexobj(y_arr)
        z = self.beta * y_arr.astype(complex)
        if np.any(np.abs(z.imag) > STRIP_HALF_WIDTH):
            raise ValueError(
                f"|Im(beta*y)| exceeds the validated strip {STRIP_HALF_WIDTH}"
            )
        if self.family == "fejer":
            vals = _sinc(0.5 * z) ** 2
        elif self.family == "hann":
            vals = _sinc(z) + 0.5 * (_sinc(z + np.pi) + _sinc(z - np.pi))
        else:
            vals = _bump_transform(z).reshape(z.shape)
        vals = self.normalization * self.beta * vals
        if not is_complex:
            resid = np.max(np.abs(vals.imag), initial=0.0)
            assert resid <= 1e-12 * max(1.0, float(np.max(np.abs(vals.real), initial=0.0))), resid
            vals = vals.real
        return vals if np.ndim(vals) else vals.item()

    def scaled(self, c: float) -> "TestFunctionPair":
        return scale_support(self, c)


def eval_fhat(pair: TestFunctionPair, x):
    return pair.fhat(x)


def eval_f(pair: TestFunctionPair, y):
    return pair.f(y)


def scale_support(pair: TestFunctionPair, c: float) -> TestFunctionPair:
    """``fhat_c(x) = fhat(x/c)/c`` and ``f_c(y) = f(cy)``; support grows to ``c*beta``."""
    if not c > 0:
        raise ValueError("scale factor must be positive")
    return replace(pair, beta=pair.beta * c, normalization=pair.normalization / c)
