"""Multi-object trajectory recovery from anonymous angle tracks.

A candidate set of initial orbits is scored against a campaign of
time-stamped, unlabeled (elevation, azimuth) measurements by solving one
optimal measurement-to-object assignment per date; a repulsive particle
swarm minimizes the summed assignment cost over the search box.
"""

from .assignment import Assignment, CostMatrix, brute_force_solve, solve
from .fitness import (
    CampaignEvaluator,
    Candidate,
    EvaluationError,
    FitnessReport,
    ObservationSet,
    build_cost_matrix,
    candidate_from_vector,
    candidate_to_vector,
    evaluate,
    pseudo_measurements,
)
from .observation import (
    GroundStation,
    Measurement,
    UncertaintyProfile,
    assignment_cost,
    observe,
    station_state_inertial,
    weighted_norm,
)
from .orbits import (
    EARTH_EQUATORIAL_RADIUS_KM,
    MU_EARTH,
    GravityModel,
    KeplerConvergenceError,
    OrbitalElements,
    StateVector,
    elements_to_state,
    propagate,
    solve_kepler,
    state_to_elements,
)
from .scenario import (
    CampaignFormatError,
    LabeledObservationSet,
    ScenarioConfig,
    ScenarioError,
    ScoreSummary,
    default_truth,
    generate,
    read_campaign,
    schedule,
    score_assignments,
    write_campaign,
)
from .swarm import (
    ConvergenceTrace,
    OptimizeResult,
    Particle,
    SearchBounds,
    SwarmConfig,
    optimize,
)

__version__ = "0.1.0"

__all__ = [
    "Assignment",
    "CampaignEvaluator",
    "CampaignFormatError",
    "Candidate",
    "ConvergenceTrace",
    "CostMatrix",
    "EARTH_EQUATORIAL_RADIUS_KM",
    "EvaluationError",
    "FitnessReport",
    "GravityModel",
    "GroundStation",
    "KeplerConvergenceError",
    "LabeledObservationSet",
    "MU_EARTH",
    "Measurement",
    "ObservationSet",
    "OptimizeResult",
    "OrbitalElements",
    "Particle",
    "ScenarioConfig",
    "ScenarioError",
    "ScoreSummary",
    "SearchBounds",
    "StateVector",
    "SwarmConfig",
    "SwarmTrajectoryEstimator",
    "UncertaintyProfile",
    "assignment_cost",
    "brute_force_solve",
    "build_cost_matrix",
    "candidate_from_vector",
    "candidate_to_vector",
    "default_truth",
    "elements_to_state",
    "evaluate",
    "generate",
    "observe",
    "optimize",
    "propagate",
    "pseudo_measurements",
    "read_campaign",
    "schedule",
    "score_assignments",
    "solve",
    "solve_kepler",
    "state_to_elements",
    "station_state_inertial",
    "weighted_norm",
    "write_campaign",
]


def __getattr__(name: str):
    # The estimator pulls in scikit-learn; import it only on first use.
    if name == "SwarmTrajectoryEstimator":
        from .estimator import SwarmTrajectoryEstimator

        return SwarmTrajectoryEstimator
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
