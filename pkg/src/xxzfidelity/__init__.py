"""Exact bipartite fidelity and correlation length of the infinite
antiferromagnetic XXZ chain, from multi-base q-Pochhammer products, with an
elliptic/modular toolbox, asymptotic-scaling extraction, and a finite-chain
exact-diagonalization cross-check.
"""
from .backends import DEFAULT_BACKEND, FloatBackend, MPMathBackend
from .ed_oracle import (ConvergenceRow, GroundState, Pinning, SpinChainSpec,
                        bipartite_fidelity_finite, build_hamiltonian,
                        convergence_study, ground_state, split_product_state)
from .elliptic import (EllipticModuli, ModelPoint, correlation_length,
                       dual_point, log_correlation_length, moduli, modulus_k,
                       modulus_kprime)
from .errors import (DomainError, InvalidSpec, NoConvergence, NonConvergent,
                     Overflow, SectorMismatch, SingularSystem, SizeLimit,
                     Underflow, XXZFidelityError)
from .fidelity import (FidelityResult, GFactor, Path, fidelity,
                       fidelity_modular, fidelity_raw, fidelity_simplified,
                       g_decomposition_residual, g_product, ln_g_series,
                       short_theta_identity_residual)
from .qseries import (QProductSpec, Tolerance, log_multibase_product,
                      minus_one_peel_residual, qproduct_direct, qproduct_log,
                      verify_qcalc_identities)
from .scaling import (CENTRAL_CHARGE, AsymptoticFit, collect_ln_xi,
                      collect_minus_ln_f, conjecture_ratio, fit_asymptote,
                      ln_xi_reference, log_spaced, minus_ln_f_reference)

__version__ = "0.1.0"

__all__ = [
    "AsymptoticFit", "CENTRAL_CHARGE", "ConvergenceRow", "DEFAULT_BACKEND",
    "DomainError", "EllipticModuli", "FidelityResult", "FloatBackend",
    "GFactor", "GroundState", "InvalidSpec", "MPMathBackend", "ModelPoint",
    "NoConvergence", "NonConvergent", "Overflow", "Path", "Pinning",
    "QProductSpec", "SectorMismatch", "SingularSystem", "SizeLimit",
    "SpinChainSpec", "Tolerance", "Underflow", "XXZFidelityError",
    "bipartite_fidelity_finite", "build_hamiltonian", "collect_ln_xi",
    "collect_minus_ln_f", "conjecture_ratio", "convergence_study",
    "correlation_length", "dual_point", "fidelity", "fidelity_modular",
    "fidelity_raw", "fidelity_simplified", "fit_asymptote",
    "g_decomposition_residual", "g_product", "ground_state", "ln_g_series",
    "ln_xi_reference", "log_correlation_length", "log_multibase_product",
    "log_spaced", "minus_ln_f_reference", "minus_one_peel_residual",
    "moduli", "modulus_k", "modulus_kprime", "qproduct_direct",
    "qproduct_log", "short_theta_identity_residual", "split_product_state",
    "verify_qcalc_identities",
]
