"""Scikit-learn style front door for the trajectory recovery pipeline."""

from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .fitness import (
    CampaignEvaluator,
    Candidate,
    ObservationSet,
    candidate_from_vector,
    evaluate,
    pseudo_angle_grid,
)
from .scenario import LabeledObservationSet, score_assignments
from .swarm import SearchBounds, SwarmConfig, optimize

__all__ = ["SwarmTrajectoryEstimator"]


def _as_observation_set(X) -> tuple[ObservationSet, LabeledObservationSet | None]:
    if isinstance(X, LabeledObservationSet):
        return X.observations, X
    if isinstance(X, ObservationSet):
        return X, None
    raise TypeError(
        "X must be an ObservationSet or LabeledObservationSet, got "
        f"{type(X).__name__}"
    )


class SwarmTrajectoryEstimator(BaseEstimator):
    """Recover per-object initial orbits from an anonymous angle campaign.

    ``fit`` runs the repulsive particle swarm against the campaign fitness
    (one optimal measurement assignment per date); ``predict`` returns the
    fitted objects' (elevation, azimuth) tracks at requested epochs.

    Parameters
    ----------
    n_objects : int, optional
        Number of trajectories to recover. Defaults to the smallest batch
        size in the campaign, the most conservative hypothesis.
    a_bounds, e_bounds : (low, high)
        Search ranges for semi-major axis (km) and eccentricity.
    inc_bounds_deg, raan_bounds_deg, theta_bounds_deg : (low, high)
        Search ranges for the angular elements, degrees.
    particles, iterations, eval_budget, neighborhood_size, topology,
    local_search_steps, worst_reset_count, inertia, cognitive, social,
    repulsion, v_max_frac, v_init_frac, seed :
        Swarm settings; see :class:`~swarmtraj.swarm.SwarmConfig`.
    workers : int
        Worker processes for fitness evaluation; any value gives the same
        result.

    Attributes
    ----------
    elements_ : tuple of OrbitalElements
        Recovered initial conditions, one per object.
    fitness_ : float
        Fitness of the recovered set (sum of optimal assignment costs).
    report_ : FitnessReport
        Full per-date/per-object accounting for the recovered set.
    trace_ : ConvergenceTrace
        Best/mean fitness and evaluation counts per iteration.
    score_summary_ : ScoreSummary or None
        Assignment purity and permutation consistency when fit on a labeled
        campaign, else None.
    """

    def __init__(self, n_objects=None,
                 a_bounds=(42164.0 - 200.0, 42164.0 + 200.0),
                 e_bounds=(0.0, 0.1),
                 inc_bounds_deg=(0.0, 1.5),
                 raan_bounds_deg=(-180.0, 180.0),
                 theta_bounds_deg=(-180.0, 180.0),
                 particles=100, iterations=400, eval_budget=None,
                 neighborhood_size=10, topology="closest",
                 local_search_steps=2, worst_reset_count=2,
                 inertia=0.72, cognitive=1.49, social=1.49,
                 repulsion=SwarmConfig.repulsion,
                 v_max_frac=0.5, v_init_frac=0.1, seed=0, workers=1):
        self.n_objects = n_objects
        self.a_bounds = a_bounds
        self.e_bounds = e_bounds
        self.inc_bounds_deg = inc_bounds_deg
        self.raan_bounds_deg = raan_bounds_deg
        self.theta_bounds_deg = theta_bounds_deg
        self.particles = particles
        self.iterations = iterations
        self.eval_budget = eval_budget
        self.neighborhood_size = neighborhood_size
        self.topology = topology
        self.local_search_steps = local_search_steps
        self.worst_reset_count = worst_reset_count
        self.inertia = inertia
        self.cognitive = cognitive
        self.social = social
        self.repulsion = repulsion
        self.v_max_frac = v_max_frac
        self.v_init_frac = v_init_frac
        self.seed = seed
        self.workers = workers

    def _bounds(self, n_objects: int) -> SearchBounds:
        return SearchBounds.for_objects(
            n_objects,
            a_range=tuple(self.a_bounds),
            e_range=tuple(self.e_bounds),
            inc_range=tuple(math.radians(v) for v in self.inc_bounds_deg),
            raan_range=tuple(math.radians(v) for v in self.raan_bounds_deg),
            theta_range=tuple(math.radians(v) for v in self.theta_bounds_deg),
        )

    def _swarm_config(self, n_objects: int) -> SwarmConfig:
        return SwarmConfig(
            particle_count=self.particles,
            iteration_count=self.iterations,
            eval_budget=self.eval_budget,
            neighborhood_size=self.neighborhood_size,
            topology=self.topology,
            local_search_steps=self.local_search_steps,
            worst_reset_count=self.worst_reset_count,
            inertia=self.inertia,
            cognitive=self.cognitive,
            social=self.social,
            repulsion=self.repulsion,
            v_max_frac=self.v_max_frac,
            v_init_frac=self.v_init_frac,
            symmetry_blocks=n_objects,
            seed=self.seed,
        )

    def fit(self, X, y=None):
        """Run the swarm against a campaign; X is an (optionally labeled)
        observation set and y is ignored."""
        obs, labeled = _as_observation_set(X)
        n = self.n_objects if self.n_objects is not None else obs.min_batch
        if not (1 <= n <= obs.min_batch):
            raise ValueError(
                f"n_objects={n} outside [1, {obs.min_batch}] "
                f"(smallest measurement batch)"
            )
        evaluator = CampaignEvaluator(obs)
        result = optimize(evaluator, self._bounds(n), self._swarm_config(n),
                          workers=self.workers)
        self.n_objects_ = n
        self.result_ = result
        self.trace_ = result.trace
        self.fitness_ = result.best_fitness
        self.report_ = result.report
        self.elements_ = candidate_from_vector(result.best_position).elements
        self.station_ = obs.station
        self.score_summary_ = None
        if labeled is not None and labeled.truth_candidate.n == n:
            self.score_summary_ = score_assignments(result.report,
                                                    labeled.truth_labels)
        return self

    def predict(self, epochs) -> np.ndarray:
        """(elevation, azimuth) of each fitted object at the given epochs.

        Returns an array of shape (len(epochs), n_objects, 2), radians.
        """
        check_is_fitted(self, "elements_")
        epochs = np.atleast_1d(np.asarray(epochs, dtype=float))
        y_el, y_az = pseudo_angle_grid(Candidate(self.elements_), epochs,
                                       self.station_)
        return np.stack([y_el, y_az], axis=-1)

    def score(self, X, y=None) -> float:
        """Negative fitness of the fitted elements on a campaign (higher is
        better, 0 is a perfect match)."""
        check_is_fitted(self, "elements_")
        obs, _ = _as_observation_set(X)
        return -evaluate(Candidate(self.elements_), obs).fitness
