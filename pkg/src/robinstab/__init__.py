"""Robust instability analysis of unstable SISO rational systems.

Core objects: :class:`Polynomial` and :class:`RationalTF` for system
algebra, peak analysis of |g(jw)|, maximal-PCR all-pass synthesis, and the
instability-radius verdict engine, plus factories for the cyclic-network,
magnetic-levitation, and delayed-repressilator case studies.
"""

from ._version import __version__
from .allpass import (
    AllPassForm,
    AllPassPerturbation,
    marginal_perturbation,
    optimal_allpass,
    pcr_upper_bound,
    principal_phase,
)
from .errors import (
    AnalysisError,
    ConfigError,
    HiddenModeError,
    InfeasiblePhaseError,
    InfiniteNormError,
    PoleOnAxisError,
    RobinstabError,
    SimulationError,
)
from .lti import (
    ClassTag,
    PeakShape,
    RationalTF,
    classify,
    pip_check,
    positive_feedback,
)
from .models import (
    ControllerVariant,
    CyclicSpec,
    MaglevSpec,
    MaglevVariant,
    RepressilatorSpec,
    cyclic_network,
    maglev,
    maglev_compensator,
    maglev_epsilon_controller,
    pade_delay,
    repressilator,
    repressilator_perturbation,
)
from .peaks import (
    PeakAttribution,
    PeakInfo,
    PeakList,
    linf_norm,
    local_peaks,
    peak_pole_attribution,
)
from .poly import (
    Polynomial,
    StabilityKind,
    StabilityVerdict,
    routh_hurwitz,
    stability_from_roots,
)
from .report import (
    AnalysisConfig,
    AnalysisOptions,
    AnalysisReport,
    run_analysis,
    run_sweep,
)
from .rir import (
    MarginalEvidence,
    PcrCheck,
    PerturbationTrial,
    RirStatus,
    RirVerdict,
    pcr_condition,
    rir_verdict,
    verify_marginal_stabilization,
)
from .simulate import TimeSeries, closed_loop, simulate_linear

__all__ = [
    "__version__",
    "AllPassForm",
    "AllPassPerturbation",
    "AnalysisConfig",
    "AnalysisError",
    "AnalysisOptions",
    "AnalysisReport",
    "ClassTag",
    "ConfigError",
    "ControllerVariant",
    "CyclicSpec",
    "HiddenModeError",
    "InfeasiblePhaseError",
    "InfiniteNormError",
    "MaglevSpec",
    "MaglevVariant",
    "MarginalEvidence",
    "PcrCheck",
    "PeakAttribution",
    "PeakInfo",
    "PeakList",
    "PeakShape",
    "PerturbationTrial",
    "PoleOnAxisError",
    "Polynomial",
    "RationalTF",
    "RepressilatorSpec",
    "RirStatus",
    "RirVerdict",
    "RobinstabError",
    "SimulationError",
    "StabilityKind",
    "StabilityVerdict",
    "TimeSeries",
    "classify",
    "closed_loop",
    "cyclic_network",
    "linf_norm",
    "local_peaks",
    "maglev",
    "maglev_compensator",
    "maglev_epsilon_controller",
    "marginal_perturbation",
    "optimal_allpass",
    "pade_delay",
    "pcr_condition",
    "pcr_upper_bound",
    "peak_pole_attribution",
    "pip_check",
    "positive_feedback",
    "principal_phase",
    "repressilator",
    "repressilator_perturbation",
    "rir_verdict",
    "routh_hurwitz",
    "run_analysis",
    "run_sweep",
    "simulate_linear",
    "stability_from_roots",
    "verify_marginal_stabilization",
]
