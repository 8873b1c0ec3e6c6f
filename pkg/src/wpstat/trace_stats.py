"""Both sides of the trace-formula decomposition N = Nbar + N^osc.

The smooth side is the Weyl integral. The oscillatory side is a sum over a
supplied length spectrum. The statistic itself can be evaluated from a
supplied list of Laplace eigenvalues.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .kernels import KernelParams, csch_half, eval_HL
from .quadrature import integrate

__all__ = [
    "CLASSES",
    "SpectrumEntry",
    "LengthSpectrum",
    "EigenvalueList",
    "weyl_main_term",
    "n_osc_from_spectrum",
    "n_osc_oriented_sum",
    "n_osc_by_class",
    "statistic_from_eigenvalues",
]

CLASSES = ("sns", "ssep", "nonsimple", "unknown")

class SpectrumEntry(NamedTuple):
    length: float
    multiplicity: int
    cls: str = "unknown"


@dataclass(frozen=True)
class LengthSpectrum:
    """Primitive closed geodesics of one surface, sorted by length.

    ``oriented=False`` (default) means multiplicities count geodesics without
    orientation, so each entry stands for two oriented geodesics.
    """

    genus: int
    entries: tuple = ()
    oriented: bool = False

    def __post_init__(self):
        if int(self.genus) != self.genus or self.genus < 2:
            raise ValueError("genus must be an integer >= 2")
        entries = tuple(SpectrumEntry(float(e[0]), e[1], *e[2:]) for e in self.entries)
        prev = 0.0
        for i, e in enumerate(entries):
            if not (math.isfinite(e.length) and e.length > 0):
                raise ValueError(f"entry {i}: length must be positive, got {e.length!r}")
            if e.length <= prev:
                raise ValueError(f"entry {i}: lengths must be strictly increasing ({e.length!r} after {prev!r})")
            if int(e.multiplicity) != e.multiplicity or e.multiplicity < 1:
                raise ValueError(f"entry {i}: multiplicity must be a positive integer, got {e.multiplicity!r}")
            if e.cls not in CLASSES:
                raise ValueError(f"entry {i}: unknown class {e.cls!r}; expected one of {CLASSES}")
            prev = e.length
        object.__setattr__(self, "entries", tuple(
            SpectrumEntry(e.length, int(e.multiplicity), e.cls) for e in entries))

    def systole(self) -> float:
        if not self.entries:
            return math.inf
        return self.entries[0].length

    def restrict(self, cls: str) -> "LengthSpectrum":
        """Sub-spectrum of the entries labelled ``cls``."""
        if cls not in CLASSES:
            raise ValueError(f"unknown class {cls!r}")
        return LengthSpectrum(self.genus, tuple(e for e in self.entries if e.cls == cls), self.oriented)

    def union(self, other: "LengthSpectrum") -> "LengthSpectrum":
        """Disjoint union; lengths of the two spectra must not coincide."""
        if other.genus != self.genus or other.oriented != self.oriented:
            raise ValueError("can only merge spectra with equal genus and orientation convention")
        merged = sorted(self.entries + other.entries, key=lambda e: e.length)
        return LengthSpectrum(self.genus, tuple(merged), self.oriented)


@dataclass(frozen=True)
class EigenvalueList:
    genus: int
    values: tuple

    def __post_init__(self):
        if int(self.genus) != self.genus or self.genus < 2:
            raise ValueError("genus must be an integer >= 2")
        vals = tuple(float(v) for v in self.values)
        if not vals:
            raise ValueError("eigenvalue list is empty")
        if any(v < 0 or not math.isfinite(v) for v in vals):
            raise ValueError("eigenvalues must be finite and >= 0")
        if vals[0] != 0.0:
            raise ValueError("first eigenvalue must be 0")
        for i in range(1, len(vals)):
            if vals[i] < vals[i - 1]:
                raise ValueError(f"eigenvalue {i} ({vals[i]!r}) is smaller than its predecessor")
        object.__setattr__(self, "values", vals)

    def spectral_parameters(self) -> np.ndarray:
        """r_j with lambda_j = 1/4 + r_j^2; imaginary for lambda_j < 1/4."""
        lam = np.asarray(self.values)
        return np.sqrt((lam - 0.25).astype(complex))


def _abs_moment(p: KernelParams) -> float:
    """int (f(L(r-tau)) + f(L(r+tau))) |r| dr, computed on the Fourier side.

    With a = L tau the y-integrals collapse to
        (8/L^2) [ int_0^beta (fhat(0) - fhat(x) cos(a x)) / x^2 dx + fhat(0)/beta ],
    which converges when fhat(x) - fhat(0) = O(x^2).
    """
    pair, L = p.pair, p.L
    a = L * p.tau
    f0 = pair.fhat(0.0)

    def integrand(x):
        # f0 - fhat cos = (f0 - fhat) + 2 fhat sin^2(a x / 2), both free of cancellation.
        return (pair.fhat_deficit(x) + 2.0 * pair.fhat(x) * np.sin(0.5 * a * x) ** 2) / (x * x)

    val = integrate(integrand, 0.0, pair.beta, omega=a, epsrel=1e-13, epsabs=1e-16)
    return 8.0 / (L * L) * (val + f0 / pair.beta)


def _tanh_kernel_transform(x):
    """int |r| (1 - tanh(pi |r|)) cos(x r) dr = cosh(x/2) / (2 sinh(x/2)^2) - 2/x^2."""
    x = np.abs(np.asarray(x, dtype=float))
    small = x < 1e-2
    xs = np.where(small, 1.0, x)
    big = 0.5 * np.cosh(0.5 * xs) * csch_half(xs) ** 2 - 2.0 / (xs * xs)
    x2 = x * x
    return np.where(small, 1.0 / 12.0 - 7.0 * x2 / 960.0 + 31.0 * x2 * x2 / 96768.0, big)


def _tanh_correction(p: KernelParams) -> float:
    """int h(r) |r| (1 - tanh(pi |r|)) dr, via the transform of the weight.

    h(r) = (2/L) int fhat(x/L) cos(tau x) cos(x r) dx.
    """
    pair, L, tau = p.pair, p.L, p.tau

    def integrand(x):
        return pair.fhat(x / L) * np.cos(tau * x) * _tanh_kernel_transform(x)

    return 4.0 / L * integrate(integrand, 0.0, p.cutoff, omega=tau, epsrel=1e-13, epsabs=1e-17)


def weyl_main_term(p: KernelParams, genus: int, tau0: bool = False) -> float:
    """Nbar = (g-1) int h(r) r tanh(pi r) dr over the real line.

    h(r) = f(L(r - tau)) + f(L(r + tau)), or h(r) = f(L r) when ``tau0`` is set
    (then ``p.tau`` is ignored). Computed as int h |r| dr (Fourier side, exact
    up to quadrature) minus a rapidly convergent tanh correction.

    Raises ``ValueError`` for the Fejer family, whose f ~ 1/y^2 makes the
    integral diverge logarithmically.
    """
    if int(genus) != genus or genus < 2:
        raise ValueError("genus must be an integer >= 2")
    if p.pair.family == "fejer":
        raise ValueError("Weyl integral diverges for the fejer family (f decays only like 1/y^2)")
    if tau0:
        # f(L r) is half of f(L(r - 0)) + f(L(r + 0)).
        return 0.5 * weyl_main_term(KernelParams(p.L, 0.0, p.pair), genus)
    return (genus - 1) * (_abs_moment(p) - _tanh_correction(p))


def _entry_weights(spec: LengthSpectrum) -> np.ndarray:
    return np.array([e.multiplicity for e in spec.entries], dtype=float)


def _per_entry_hl(p: KernelParams, spec: LengthSpectrum) -> list[float]:
    # One scalar evaluation per entry, so an entry's contribution does not
    # depend on which other entries are present.
    return [eval_HL(p, e.length) for e in spec.entries]


def n_osc_by_class(p: KernelParams, spec: LengthSpectrum, tau0: bool = False) -> dict[str, float]:
    """N^osc restricted to each class label, in the fixed order of ``CLASSES``."""
    if tau0:
        p = KernelParams(p.L, 0.0, p.pair)
    # Per non-oriented geodesic: 2 H_L in general, H_L at tau = 0.
    factor = 1.0 if tau0 else 2.0
    if spec.oriented:
        factor *= 0.5
    hl = _per_entry_hl(p, spec)
    out = {}
    for cls in CLASSES:
        terms = [factor * e.multiplicity * h for e, h in zip(spec.entries, hl) if e.cls == cls]
        out[cls] = math.fsum(terms)
    return out


def n_osc_from_spectrum(p: KernelParams, spec: LengthSpectrum, tau0: bool = False) -> float:
    """N^osc = 2 sum_gamma H_L(l_gamma) over non-oriented primitive geodesics.

    With ``spec.oriented`` the factor 2 is already in the multiplicities. With
    ``tau0`` the tau = 0 normalisation of the statistic sum_j f(L r_j) is used,
    which halves N^osc.
    """
    parts = n_osc_by_class(p, spec, tau0)
    total = 0.0
    for cls in CLASSES:
        total += parts[cls]
    return total


def n_osc_oriented_sum(p: KernelParams, spec: LengthSpectrum) -> float:
    """N^osc as the explicit double sum over oriented geodesics and k:

        (1/L) sum_{gamma oriented} sum_k l fhat(k l / L) cos(tau k l) / sinh(k l / 2)

    Summed term by term, independently of the kernel module's H_L.
    """
    pair, L, tau = p.pair, p.L, p.tau
    oriented_mult = _entry_weights(spec) * (1.0 if spec.oriented else 2.0)
    terms = []
    for e, m in zip(spec.entries, oriented_mult):
        kmax = int(math.floor(pair.beta * L / e.length)) + 1
        k = np.arange(1, kmax + 1, dtype=float)
        kl = k * e.length
        t = e.length * pair.fhat(kl / L) * np.cos(tau * kl) * csch_half(kl)
        terms.append(m * math.fsum(t) / L)
    return math.fsum(terms)


def statistic_from_eigenvalues(p: KernelParams, ev: EigenvalueList | Sequence[float],
                               genus: int | None = None, tau0: bool = False) -> float:
    """N_{f,L,tau} = sum_j f(L(r_j - tau)) + f(L(r_j + tau)), or sum_j f(L r_j) with ``tau0``.

    Small eigenvalues (lambda < 1/4) give imaginary r_j and are evaluated with
    the entire extension of f; the total is real.
    """
    if not isinstance(ev, EigenvalueList):
        vals = [float(v) for v in ev]
        if any(v < 0 for v in vals):
            raise ValueError("eigenvalues must be >= 0")
        ev = EigenvalueList(genus if genus is not None else 2, tuple(vals))
    r = ev.spectral_parameters()
    L, tau, pair = p.L, p.tau, p.pair
    if tau0:
        vals = pair.f(L * r)
    else:
        vals = pair.f(L * (r - tau)) + pair.f(L * (r + tau))
    vals = np.atleast_1d(vals)
    total_re = math.fsum(vals.real)
    total_im = math.fsum(vals.imag)
    assert abs(total_im) <= 1e-10 * max(1.0, abs(total_re)), total_im
    return total_re
