"""Constants fitted once against the families fejer, hann, cinf_bump and frozen.

Each is about twice the largest ratio observed on the fitting grid
(L in {6, 10, 20, 40}, tau in {0, 1}). Bump FIXTURE_VERSION when refitting.
"""

FIXTURE_VERSION = "1"

# |H_L(x)| <= (HL_LOG_CONST / L) log(1/x) on (1e-8, 1/2); observed max 7.59.
HL_LOG_CONST = 16.0
# |H_L(x)| <= (HL_EXP_CONST / L) x e^{-x/2} on [1, L]; observed max 6.40.
HL_EXP_CONST = 13.0
# |I_L(k1,k2)| <= PAIR_SMALL_K_CONST / ((k1+k2-2)^2 L^2), L in {10, 20, 40}; observed max 12.29.
PAIR_SMALL_K_CONST = 25.0
# sum_{3<=k1+k2} |I_L(k1,k2)| <= DIAG_SUM_CONST log L / L^2, L in {10, 20, 40}; observed max 12.32.
DIAG_SUM_CONST = 25.0
# fejer, tau = 0: |variance - Sigma2/2| <= TAU0_CONVERGENCE_CONST log L / L^2, L in {10,...,80}; observed max 5.32.
TAU0_CONVERGENCE_CONST = 11.0
# |I_f(L, tau)| <= EXP_COEF e^{L/2} / tau + FLOOR_COEF / L for tau >= 1.
EXPECTATION_EXP_COEF = 1.0
EXPECTATION_FLOOR_COEF = 10.0


def as_dict() -> dict:
    return {
        "version": FIXTURE_VERSION,
        "hl_log_const": HL_LOG_CONST,
        "hl_exp_const": HL_EXP_CONST,
        "pair_small_k_const": PAIR_SMALL_K_CONST,
        "diag_sum_const": DIAG_SUM_CONST,
        "tau0_convergence_const": TAU0_CONVERGENCE_CONST,
        "expectation_exp_coef": EXPECTATION_EXP_COEF,
        "expectation_floor_coef": EXPECTATION_FLOOR_COEF,
    }
