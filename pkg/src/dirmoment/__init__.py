"""Numerical experiments on the fourth moment of Dirichlet L-functions.

Exact character groups via CRT decomposition, a smoothed approximate
functional equation for the central values, two independent pipelines
for the primitive-character fourth moment, and checks of the main-term
asymptotics and supporting lemma-scale bounds.
"""

from .arith import (Factorization, coprime_iter, divisor_count, divisors,
                    euler_phi, euler_phi_sieve, factorize, mobius,
                    mobius_sieve, omega, omega_sieve, phi_star, prime_sieve,
                    two_pow_omega)
from .chargroup import (CharacterGroup, CharacterLabel, build_group,
                        char_eval, classify, exact_primitive_char_sum,
                        exact_root_of_unity_sum, gauss_sum, primitive_count,
                        primitive_sum_lemma1, root_of_unity,
                        signed_sum_eq21)
from .kernel import (KernelAccuracyError, KernelConfig, clear_kernel_cache,
                     w_eval, w_eval_batch, w_series)
from .lfunc import (CentralValue, KernelWeights, abc_values, hurwitz_zeta,
                    kernel_weights, l_half_oracle, truncation_bound)
from .spectra import (CharacterSpectrum, MomentReport, ResidueWeightTable,
                      all_char_sums, bc_moments, compute_spectrum,
                      fourth_moment, parity_flat, primitive_flat,
                      weight_table)
from .asymptotics import (ErrorSumResult, Lemma3Result, Lemma4Result,
                          Lemma5Result, MainTermBreakdown, error_sum_E,
                          lemma3_count, lemma4_check, lemma5_sums,
                          m_direct, m_reparametrized, main_term_breakdown,
                          theorem_main_term)
from .numerics import EULER_GAMMA, ZETA2, KahanSum, fmt_float

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # arith
    "Factorization", "factorize", "mobius", "euler_phi", "omega",
    "divisor_count", "two_pow_omega", "phi_star", "divisors", "coprime_iter",
    "prime_sieve", "omega_sieve", "mobius_sieve", "euler_phi_sieve",
    # chargroup
    "CharacterGroup", "CharacterLabel", "build_group", "char_eval",
    "classify", "root_of_unity", "gauss_sum", "primitive_sum_lemma1",
    "signed_sum_eq21", "exact_root_of_unity_sum",
    "exact_primitive_char_sum", "primitive_count",
    # kernel
    "KernelConfig", "KernelAccuracyError", "w_eval", "w_eval_batch",
    "w_series", "clear_kernel_cache",
    # lfunc
    "hurwitz_zeta", "l_half_oracle", "KernelWeights", "kernel_weights",
    "truncation_bound", "CentralValue", "abc_values",
    # spectra
    "ResidueWeightTable", "weight_table", "all_char_sums", "parity_flat",
    "primitive_flat", "CharacterSpectrum", "compute_spectrum",
    "MomentReport", "fourth_moment", "bc_moments",
    # asymptotics
    "theorem_main_term", "m_direct", "m_reparametrized",
    "MainTermBreakdown", "main_term_breakdown", "Lemma3Result",
    "lemma3_count", "Lemma4Result", "lemma4_check", "Lemma5Result",
    "lemma5_sums", "ErrorSumResult", "error_sum_E",
    # numerics
    "EULER_GAMMA", "ZETA2", "KahanSum", "fmt_float",
]
