"""cvqec: continuous-variable error-correction channel simulation.

EPR entanglement distributed through loss, distilled by a heralded quantum
scissor with imperfect sources and detectors, consumed by gain-tuned CV
teleportation; channel quality scored by Gaussian entanglement of formation.
"""

__version__ = "0.1.0"

from .analytic import (BetaAveragedMoments, HeraldedQubitBlock, ProtocolParams,
                       moments_beta_averaged, rho_out, success_probability)
from .channel import (EffectiveChannel, NonlinearChannelError, InvalidCovarianceError,
                      bona_fide_defect, characterize, corrected_covariance,
                      deterministic_bound, ideal_nla_reference, loss_baseline)
from .entanglement import (GEOFResult, OptimizerError, geof_from_cov, geof_of_r,
                           r0_lossy_tmsv)
from .fock import (CutoffWarning, FockState, InvalidParameterError,
                   apply_beamsplitter, apply_gain_operator, apply_loss,
                   coherent_state, default_cutoff, herald_pattern, make_tmsv,
                   number_state, project_dual_homodyne, quadrature_moments,
                   trace_out, vacuum)
from .gain import GainOptimum, optimize_lambda

__all__ = [
    "BetaAveragedMoments", "HeraldedQubitBlock", "ProtocolParams",
    "moments_beta_averaged", "rho_out", "success_probability",
    "EffectiveChannel", "NonlinearChannelError", "InvalidCovarianceError",
    "bona_fide_defect", "characterize", "corrected_covariance",
    "deterministic_bound", "ideal_nla_reference", "loss_baseline",
    "GEOFResult", "OptimizerError", "geof_from_cov", "geof_of_r", "r0_lossy_tmsv",
    "CutoffWarning", "FockState", "InvalidParameterError",
    "apply_beamsplitter", "apply_gain_operator", "apply_loss",
    "coherent_state", "default_cutoff", "herald_pattern", "make_tmsv",
    "number_state", "project_dual_homodyne", "quadrature_moments",
    "trace_out", "vacuum",
    "GainOptimum", "optimize_lambda",
    "__version__",
]
