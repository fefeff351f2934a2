"""Max-entropy inference of entropy production for finite quantum systems."""

from .channels import (
    KrausChannel,
    amplitude_damping,
    bit_flip,
    coarse_graining_channel,
    dephasing_channel,
    depolarizing,
    named_one_to_one,
    phase_flip,
    stinespring_dilation,
)
from .entropy import (
    classical_mutual_information,
    diagonal_entropy,
    mutual_information,
    observational_entropy,
    relative_entropy,
    von_neumann_entropy,
)
from .errors import (
    ConvergenceError,
    InconsistentInputError,
    InfeasibleError,
    InvalidInputError,
    PreconditionError,
    QMaxEntError,
    UnsupportedError,
)
from .linalg import CoarseGraining, JointOutcomeTable, partial_trace, tensor
from .maxent import ConstraintSet, MaxEntSolution, SolverOptions, entropy_production, solve_beta, solve_mes
from .scenarios import REGISTRY, EvolutionSpec, ScenarioReport, propagate

__version__ = "0.1.0"

__all__ = [
    "CoarseGraining",
    "ConstraintSet",
    "ConvergenceError",
    "EvolutionSpec",
    "InconsistentInputError",
    "InfeasibleError",
    "InvalidInputError",
    "JointOutcomeTable",
    "KrausChannel",
    "MaxEntSolution",
    "PreconditionError",
    "QMaxEntError",
    "REGISTRY",
    "ScenarioReport",
    "SolverOptions",
    "UnsupportedError",
    "amplitude_damping",
    "bit_flip",
    "classical_mutual_information",
    "coarse_graining_channel",
    "dephasing_channel",
    "depolarizing",
    "diagonal_entropy",
    "entropy_production",
    "mutual_information",
    "named_one_to_one",
    "observational_entropy",
    "partial_trace",
    "phase_flip",
    "propagate",
    "relative_entropy",
    "solve_beta",
    "solve_mes",
    "stinespring_dilation",
    "tensor",
    "von_neumann_entropy",
]
