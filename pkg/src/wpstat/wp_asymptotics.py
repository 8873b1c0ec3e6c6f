"""Large-genus Weil-Petersson limits of the mean and variance of the statistic.

In the limit g -> oo only simple non-separating geodesics survive, with the
volume ratio V_{g-1,2}(l,l)/V_g replaced by the sinh weight

    R(l) = (sinh(l/2) / (l/2))^2.

Mean:        I_f(L,tau) = int_0^oo H_L(l) R(l) l dl
                        = (4/L) sum_k int_0^{beta L/k} fhat(kx/L) sinh^2(x/2)/sinh(kx/2) cos(k tau x) dx
Diagonal:    I_L(k1,k2) = (1/L^2) int_0^oo l^2 F(k1 l) F(k2 l) R(l) l dl
Second moment (tau > 0):  lim E[(N^osc)^2] = 2 sum_{k1,k2} I_L(k1,k2) + I_f^2

Every asymptotic ``O(.)`` is replaced by an exactly computed part plus an
explicit majorant for what was not computed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .fourier_pairs import TestFunctionPair
from .goe_reference import sigma2_goe_closed_form
from .kernels import EVALUATION_FLOOR, KernelParams, eval_HL, sinh_ratio
from .quadrature import integrate, integrate_many

__all__ = [
    "sinh_weight",
    "ExpectationTerms",
    "expectation_terms",
    "I_f",
    "expectation_k_tail_bound",
    "expectation_sns_finite_g",
    "I_L_pair",
    "I_L_pairs",
    "pair_majorant",
    "pair_bound_small_k",
    "pair_bound_large_k",
    "diagonal_tail_bound",
    "VarianceBreakdown",
    "limiting_variance",
    "variance_tau0",
    "DecayStudy",
    "decay_study_If",
    "hl_weighted_integral",
]

IF_RTOL = 1e-10
IF_ATOL = 1e-14


def sinh_weight(ell):
    """R(l) = (sinh(l/2)/(l/2))^2, with R(0) = 1."""
    ell = np.asarray(ell, dtype=float)
    h = 0.5 * ell
    small = np.abs(h) < 1e-3
    safe = np.where(small, 1.0, h)
    h2 = h * h
    out = np.where(small, (1.0 + h2 / 6.0 + h2 * h2 / 120.0) ** 2, (np.sinh(safe) / safe) ** 2)
    return out if np.ndim(out) else float(out)


def _sinh2_over_sinh(x, k):
    """sinh^2(x/2) / sinh(kx/2), finite at x = 0 and for large x."""
    em = -np.expm1(-x)
    return np.exp((1.0 - 0.5 * k) * x) * em * em / (2.0 * -np.expm1(-k * x))


# ---------------------------------------------------------------------------
# Expectation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExpectationTerms:
    """I_f split by k, with the truncation certificate.

    ``oscillating`` is J_1 + J_2, the part that decays in tau; ``floor`` is
    sum_{k>=3} J_k, bounded by O(1/L) uniformly in tau.
    """

    value: float
    k1_term: float
    k2_term: float
    floor: float
    remainder_bound: float
    direct_terms: int
    moments: int

    @property
    def oscillating(self) -> float:
        return self.k1_term + self.k2_term


def expectation_terms(p: KernelParams, rtol: float = IF_RTOL, atol: float = IF_ATOL) -> ExpectationTerms:
    """Evaluate I_f(L, tau) as sum_k J_k.

    J_k for k <= K (K ~ beta L) is integrated directly. For k > K each term is
    written in the variable u = kx,

        J_k = (4/(L k)) int_0^{beta L} fhat(u/L) sinh^2(u/2k)/sinh(u/2) cos(tau u) du,

    and sinh^2 is expanded in powers of u/2k, which turns the k-tail into
    sum_m a_m M_m zeta(2m+1, K+1) with moments M_m independent of k. The
    expansion is truncated once its remainder majorant drops below
    ``rtol * |I_f| + atol``.
    """
    pair, L, tau = p.pair, p.L, p.tau
    cutoff = p.cutoff
    K = max(3, math.ceil(cutoff))
    ks = np.arange(1, K + 1, dtype=float)

    def direct(x, idx):
        k = ks[idx]
        return pair.fhat(k * x / L) * _sinh2_over_sinh(x, k) * np.cos(k * tau * x)

    jk, _ = integrate_many(direct, np.zeros(K), cutoff / ks, omega=ks * tau)
    jk *= 4.0 / L

    sup = pair.fhat_sup
    z = cutoff / K
    n_mom = 40
    ms = np.arange(1, n_mom + 1, dtype=float)
    # Remainder majorant after m moments: (4 sup / L) sum_{m'>m} z^{2m'} / (2m' (2m')!).
    term_major = 4.0 * sup / L * np.exp(2 * ms * math.log(z) - np.log(2 * ms) - special.gammaln(2 * ms + 1))
    tail_after = np.cumsum(term_major[::-1])[::-1]
    tail_after = np.append(tail_after[1:], 0.0)

    def moment(u, idx):
        m = ms[idx]
        return pair.fhat(u / L) * np.exp(2 * m * np.log(0.5 * u)) * _csch_half(u) * np.cos(tau * u)

    mom, _ = integrate_many(moment, np.zeros(n_mom), np.full(n_mom, cutoff), omega=tau)
    coeff = 4.0 / L * np.exp((2 * ms - 1) * math.log(2.0) - special.gammaln(2 * ms + 1))
    tail_terms = coeff * mom * special.zeta(2 * ms + 1, K + 1)

    head = math.fsum(jk)
    used = n_mom
    for m in range(1, n_mom + 1):
        partial = head + math.fsum(tail_terms[:m])
        if tail_after[m - 1] <= rtol * abs(partial) + atol:
            used = m
            break
    tail = math.fsum(tail_terms[:used])
    value = head + tail
    return ExpectationTerms(
        value=value,
        k1_term=float(jk[0]),
        k2_term=float(jk[1]),
        floor=math.fsum(jk[2:]) + tail,
        remainder_bound=float(tail_after[used - 1]),
        direct_terms=K,
        moments=used,
    )


def _csch_half(u):
    return 2.0 * np.exp(-0.5 * u) / -np.expm1(-u)


def I_f(p: KernelParams) -> float:
    """Large-genus limit of E(N^osc): I_f(L, tau)."""
    return expectation_terms(p).value


def expectation_k_tail_bound(p: KernelParams, K: int) -> float:
    """Majorant of sum_{k > K} |J_k| from the sinh-ratio inequalities.

    Per term the smaller of
      sinh^2(z)/sinh(kz) < (1/2) sinh(z) e^{-(k-1) z}     (k > 2)
      sinh^2(z)/sinh(kz) <= sinh(z) / k
    is integrated in closed form over [0, beta L / k].
    """
    if K < 2:
        raise ValueError("K must be >= 2")
    c = p.cutoff
    sup = p.pair.fhat_sup
    far = max(10 * K, 100_000)
    k = np.arange(K + 1, far + 1, dtype=float)
    X = c / k
    b_exp = 0.5 * (-np.expm1(-(k - 2) * X / 2) / (k - 2) + np.expm1(-k * X / 2) / k)
    b_inv = 2.0 / k * (np.cosh(X / 2) - 1.0)
    near = math.fsum(np.minimum(b_exp, b_inv))
    # k > far: (cosh y - 1) <= y^2 cosh(y) / 2 and sum_{k>N} k^-3 <= 1/(2N^2).
    rest = c * c * math.cosh(c / (2 * far)) / 4.0 / (2.0 * far * far)
    return 4.0 * sup / p.L * (near + rest)


def hl_weighted_integral(p: KernelParams, power: int, absolute: bool = False,
                         square: bool = False, lower: float = 1e-10,
                         epsrel: float = 1e-10) -> float:
    """int H_L(l)^s R(l) l^power dl over (lower, beta L], s = 1 or 2 (``square``).

    Breakpoints at beta L / k mark the kinks of H_L. Used for the finite-genus
    envelope and as an independent route to I_f and to the diagonal sum.
    """
    lower = max(lower, EVALUATION_FLOOR)
    c = p.cutoff
    kinks = [c / k for k in range(1, 400) if c / k > lower]

    def integrand(ell):
        h = eval_HL(p, ell)
        if square:
            h = h * h
        elif absolute:
            h = np.abs(h)
        return h * sinh_weight(ell) * ell**power

    return integrate(integrand, lower, c, omega=p.tau, points=kinks, epsrel=epsrel, epsabs=1e-15)


def expectation_sns_finite_g(p: KernelParams, genus: int, envelope_c: float = 1.0) -> tuple[float, float]:
    """Central value and half-width of the finite-genus band for E(N_sns).

    central    = int H_L(l) R(l) l dl  (= I_f)
    half-width = envelope_c * int |H_L(l)| R(l) l^4 dl / g

    The band reflects the 1 + O(l^3/g) volume-ratio error with an assumed
    constant ``envelope_c``; it is not a computation of the finite-g value.
    """
    if genus <= 2:
        raise ValueError("finite-genus band needs genus > 2 (the g = 2 constants differ)")
    central = I_f(p)
    if envelope_c == 0:
        return central, 0.0
    if envelope_c < 0:
        raise ValueError("envelope_c must be non-negative")
    half = envelope_c * hl_weighted_integral(p, 4, absolute=True) / genus
    return central, half


# ---------------------------------------------------------------------------
# Diagonal pairs
# ---------------------------------------------------------------------------

def I_L_pairs(p: KernelParams, k1, k2, epsrel: float = 1e-11, epsabs: float = 1e-15) -> np.ndarray:
    """Vectorised I_L(k1, k2); arguments are put in (min, max) order first."""
    a = np.atleast_1d(np.asarray(k1, dtype=float))
    b = np.atleast_1d(np.asarray(k2, dtype=float))
    a, b = np.broadcast_arrays(a, b)
    lo_k, hi_k = np.minimum(a, b).ravel(), np.maximum(a, b).ravel()
    if np.any(lo_k < 1):
        raise ValueError("k1, k2 must be >= 1")
    pair, L, tau = p.pair, p.L, p.tau

    def integrand(ell, idx):
        ka, kb = lo_k[idx], hi_k[idx]
        half = 0.5 * ell
        return (ell * pair.fhat(ka * ell / L) * pair.fhat(kb * ell / L)
                * sinh_ratio(half, ka) * sinh_ratio(half, kb)
                * np.cos(tau * ka * ell) * np.cos(tau * kb * ell))

    vals, _ = integrate_many(integrand, np.zeros(lo_k.size), p.cutoff / hi_k,
                             omega=(lo_k + hi_k) * tau, epsrel=epsrel, epsabs=epsabs)
    return (4.0 / (L * L) * vals).reshape(a.shape)


def I_L_pair(p: KernelParams, k1: int, k2: int) -> float:
    """I_L(k1, k2), symmetric in its arguments."""
    return float(I_L_pairs(p, k1, k2)[0])


def pair_majorant(L: float, k1: int, k2: int, beta: float = 1.0) -> float:
    """int_0^{beta/k2} x sinh^2(xL/2) / (sinh(k1 xL/2) sinh(k2 xL/2)) dx, k2 >= k1."""
    k1, k2 = min(k1, k2), max(k1, k2)

    def integrand(x):
        y = 0.5 * x * L
        return x * sinh_ratio(y, k1) * sinh_ratio(y, k2)

    return integrate(integrand, 0.0, beta / k2)


def pair_bound_small_k(p: KernelParams, k1, k2):
    """|I_L(k1,k2)| <= 64 sup^2 / ((k1+k2-2)^2 L^2), from sinh(y)/sinh(ky) < 2 e^{-(k-1)y}."""
    m = np.asarray(k1, dtype=float) + np.asarray(k2, dtype=float)
    return 64.0 * p.pair.fhat_sup**2 / ((m - 2.0) ** 2 * p.L**2)


def pair_bound_large_k(p: KernelParams, k1, k2):
    """|I_L(k1,k2)| <= 2 sup^2 beta^2 / (min k * max k^3), from sinh(y)/sinh(ky) <= 1/k."""
    a = np.asarray(k1, dtype=float)
    b = np.asarray(k2, dtype=float)
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    return 2.0 * (p.pair.fhat_sup * p.pair.beta) ** 2 / (lo * hi**3)


def diagonal_tail_bound(p: KernelParams, k_budget: int) -> float:
    """Majorant of sum |I_L(k1,k2)| over ordered pairs with k1 + k2 > k_budget.

    Each pair takes the smaller of the two pair bounds; sums m = k1 + k2 up to
    a far cut are evaluated term by term, beyond it only the large-k bound is
    used and summed in closed form.
    """
    far = max(4 * k_budget, 4000)
    total = 0.0
    for m in range(k_budget + 1, far + 1):
        j = np.arange(1, m, dtype=float)
        b1 = pair_bound_small_k(p, j, m - j)
        b2 = pair_bound_large_k(p, j, m - j)
        total += float(np.sum(np.minimum(b1, b2)))
    # m > far: sum_j 1/(min max^3) <= (8/m^3) * 2 (1 + ln m); integral comparison.
    c = 2.0 * (p.pair.fhat_sup * p.pair.beta) ** 2
    lnf = math.log(far)
    total += c * 16.0 * ((1.0 + lnf) / (2.0 * far * far) + 1.0 / (4.0 * far * far))
    return total


@dataclass(frozen=True)
class VarianceBreakdown:
    """Limit second moment split into its pieces; ``total`` is their sum.

    For the tau > 0 pipeline ``total`` is lim E[(N^osc)^2] and ``variance`` is
    ``total - offdiag_term``. For the tau = 0 pipeline the off-diagonal pairs
    cancel the squared mean exactly, ``offdiag_term`` is 0 and ``total`` is
    the variance itself.
    """

    goe_term: float
    diag_correction: float
    offdiag_term: float
    tail_bound: float
    total: float
    L: float
    tau: float
    k_budget: int
    pairs_summed: int
    normalization: str = "standard"

    @property
    def variance(self) -> float:
        return self.total - self.offdiag_term


def _pair_grid(k_budget: int):
    k1, k2 = [], []
    for m in range(3, k_budget + 1):
        j = np.arange(1, m // 2 + 1)
        k1.append(j)
        k2.append(m - j)
    if not k1:
        return np.empty(0), np.empty(0)
    return np.concatenate(k1).astype(float), np.concatenate(k2).astype(float)


def _diagonal_sum(p: KernelParams, k_budget: int) -> tuple[float, int]:
    """sum over ordered pairs with 3 <= k1 + k2 <= k_budget of I_L(k1,k2)."""
    a, b = _pair_grid(k_budget)
    if a.size == 0:
        return 0.0, 0
    vals = I_L_pairs(p, a, b)
    mult = np.where(a == b, 1.0, 2.0)
    # Fixed order of summation: by m, then by k1.
    return math.fsum(mult * vals), int(mult.sum())


def _oscillatory_11(p: KernelParams) -> float:
    """2 int_0^beta x fhat(x)^2 cos(2 tau L x) dx: the tau-dependent half of I_L(1,1)."""
    pair = p.pair
    w = 2.0 * p.tau * p.L
    return 2.0 * integrate(lambda x: x * pair.fhat(x) ** 2 * np.cos(w * x), 0.0, pair.beta, omega=w)


def limiting_variance(p: KernelParams, k_budget: int) -> VarianceBreakdown:
    """lim_{g->oo} E[(N^osc)^2] = 2 sum I_L(k1,k2) + I_f^2, with certified k-tail.

    goe_term        the tau-independent half of 2 I_L(1,1), i.e. Sigma2_GOE(f)
    diag_correction 2 x (tau-oscillating half of I_L(1,1)) + 2 sum_{3<=k1+k2<=k_budget} I_L
    offdiag_term    I_f(L, tau)^2
    tail_bound      2 x majorant of the pairs with k1 + k2 > k_budget
    """
    if k_budget < 2:
        raise ValueError("k_budget must be >= 2")
    goe = sigma2_goe_closed_form(p.pair)
    diag_sum, n_pairs = _diagonal_sum(p, k_budget)
    diag = 2.0 * _oscillatory_11(p) + 2.0 * diag_sum
    off = I_f(p) ** 2
    return VarianceBreakdown(
        goe_term=goe,
        diag_correction=diag,
        offdiag_term=off,
        tail_bound=2.0 * diagonal_tail_bound(p, k_budget),
        total=goe + diag + off,
        L=p.L,
        tau=p.tau,
        k_budget=k_budget,
        pairs_summed=n_pairs + 1,
    )


def variance_tau0(pair: TestFunctionPair, L: float, k_budget: int) -> VarianceBreakdown:
    """Limit variance of sum_j f(L r_j) (the statistic centred at tau = 0).

    Here N^osc = sum over non-oriented geodesics of H_L (no factor 2), so the
    diagonal carries weight 1/2 instead of 2 and, at tau = 0, I_L(1,1) equals
    Sigma2_GOE(f) in full. The limit is therefore Sigma2_GOE(f)/2 plus the
    k1 + k2 >= 3 corrections.

    goe_term        I_L(1,1) / 2 = Sigma2_GOE(f) / 2 (closed form)
    diag_correction (quadrature I_L(1,1) - closed form)/2 + (1/2) sum_{3<=k1+k2<=k_budget} I_L
    offdiag_term    0
    """
    if k_budget < 2:
        raise ValueError("k_budget must be >= 2")
    p = KernelParams(L, 0.0, pair)
    sigma2 = sigma2_goe_closed_form(pair)
    i11 = I_L_pair(p, 1, 1)
    diag_sum, n_pairs = _diagonal_sum(p, k_budget)
    goe = 0.5 * sigma2
    diag = 0.5 * (i11 - sigma2) + 0.5 * diag_sum
    return VarianceBreakdown(
        goe_term=goe,
        diag_correction=diag,
        offdiag_term=0.0,
        tail_bound=0.5 * diagonal_tail_bound(p, k_budget),
        total=goe + diag,
        L=float(L),
        tau=0.0,
        k_budget=k_budget,
        pairs_summed=n_pairs + 1,
        normalization="tau0",
    )


# ---------------------------------------------------------------------------
# Decay of the expectation in tau
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DecayStudy:
    L: float
    rows: tuple  # (tau, I_f, oscillating, floor) per tau
    slope: float | None


def decay_study_If(pair: TestFunctionPair, L: float, taus) -> DecayStudy:
    """Tabulate I_f over tau and fit the log-log slope of its tau-decaying part.

    The fitted component is J_1 + J_2 (J_1 carries the e^{L/2}); the floor
    sum_{k>=3} J_k is subtracted before fitting.
    """
    taus = [float(t) for t in taus]
    if any(t < 1 for t in taus):
        raise ValueError("decay study needs tau >= 1")
    rows = []
    for t in taus:
        terms = expectation_terms(KernelParams(L, t, pair))
        rows.append((t, terms.value, terms.oscillating, terms.floor))
    slope = None
    if len(taus) >= 2:
        x = np.log([r[0] for r in rows])
        y = np.log(np.abs([r[2] for r in rows]))
        slope = float(np.polyfit(x, y, 1)[0])
    return DecayStudy(L=float(L), rows=tuple(rows), slope=slope)
