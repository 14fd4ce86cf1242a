"""Campaign fitness: propagate, observe, assign, and sum the optimal costs.

For a candidate set of n initial orbits and an observation campaign of M
dates, each date contributes the cost of the optimal injective
measurement-to-object assignment; the fitness is the sum over dates, equal
by regrouping to the sum of per-object final residuals.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .assignment import Assignment, CostMatrix, solve_lists
from .observation import (
    GroundStation,
    Measurement,
    UncertaintyProfile,
    angles_from_enu,
    assignment_cost,
    station_bases,
)
from .orbits import (
    GravityModel,
    KeplerConvergenceError,
    OrbitalElements,
    _wrap_fast,
    propagate_positions,
)

__all__ = [
    "Candidate",
    "ObservationSet",
    "FitnessReport",
    "EvaluationError",
    "CampaignEvaluator",
    "candidate_to_vector",
    "candidate_from_vector",
    "pseudo_measurements",
    "build_cost_matrix",
    "evaluate",
]

ELEMENTS_PER_OBJECT = 5  # (a, e, inc, raan, theta)

DUAL_ACCOUNTING_RTOL = 1e-9


class EvaluationError(RuntimeError):
    """A candidate could not be scored (propagation or geometry failure)."""


@dataclass(frozen=True)
class Candidate:
    """The decision vector: one set of initial elements per object."""

    elements: tuple[OrbitalElements, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "elements", tuple(self.elements))
        if len(self.elements) < 1:
            raise ValueError("candidate needs at least one object")

    @property
    def n(self) -> int:
        return len(self.elements)


def candidate_to_vector(c: Candidate) -> np.ndarray:
    """Flatten to (n*5,) in per-object (a, e, inc, raan, theta) order."""
    out = np.empty(c.n * ELEMENTS_PER_OBJECT)
    for i, el in enumerate(c.elements):
        out[i * 5:i * 5 + 5] = (el.a, el.e, el.inc, el.raan, el.theta)
    return out


def candidate_from_vector(vec, epoch: float = 0.0) -> Candidate:
    vec = np.asarray(vec, dtype=float)
    if vec.ndim != 1 or vec.size == 0 or vec.size % ELEMENTS_PER_OBJECT:
        raise ValueError(
            f"candidate vector length must be a positive multiple of "
            f"{ELEMENTS_PER_OBJECT}, got shape {vec.shape}"
        )
    return Candidate(tuple(
        OrbitalElements(a=float(vec[k]), e=float(vec[k + 1]), inc=float(vec[k + 2]),
                        raan=float(vec[k + 3]), theta=float(vec[k + 4]), epoch=epoch)
        for k in range(0, vec.size, ELEMENTS_PER_OBJECT)
    ))


@dataclass(frozen=True)
class ObservationSet:
    """A full campaign: per-date measurement batches plus the site model.

    ``batches[j]`` holds the m_j anonymous measurements taken at ``dates[j]``
    (all sharing that epoch); ``sigmas[j]`` the per-component uncertainties.
    ``night_membership`` tags each date with its observation night, used only
    for reporting.
    """

    dates: tuple[float, ...]
    batches: tuple[tuple[Measurement, ...], ...]
    sigmas: tuple[UncertaintyProfile, ...]
    station: GroundStation
    night_membership: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        dates = tuple(float(t) for t in self.dates)
        batches = tuple(tuple(b) for b in self.batches)
        sigmas = tuple(self.sigmas)
        if not dates:
            raise ValueError("campaign needs at least one date")
        if any(t2 <= t1 for t1, t2 in zip(dates, dates[1:])):
            raise ValueError("dates must be strictly increasing")
        if len(batches) != len(dates) or len(sigmas) != len(dates):
            raise ValueError("dates, batches and sigmas must have equal length")
        nights = self.night_membership
        nights = tuple(int(g) for g in nights) if nights is not None \
            else (0,) * len(dates)
        if len(nights) != len(dates):
            raise ValueError("night_membership must have one entry per date")
        for j, (t, batch) in enumerate(zip(dates, batches)):
            if not batch:
                raise ValueError(f"date {j} has an empty batch")
            for z in batch:
                if z.epoch != t:
                    raise ValueError(
                        f"measurement at date {j} carries epoch {z.epoch}, "
                        f"expected {t}"
                    )
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "batches", batches)
        object.__setattr__(self, "sigmas", sigmas)
        object.__setattr__(self, "night_membership", nights)

    @property
    def n_dates(self) -> int:
        return len(self.dates)

    @property
    def batch_sizes(self) -> tuple[int, ...]:
        return tuple(len(b) for b in self.batches)

    @property
    def min_batch(self) -> int:
        return min(self.batch_sizes)


@dataclass(frozen=True)
class FitnessReport:
    """Fitness plus the per-date and per-object accounting behind it.

    ``per_date_costs[j]`` is the optimal assignment cost at date j;
    ``residual_history[j, i]`` the running residual of object i after date j;
    ``assignments[j]`` maps each object to its chosen measurement row.
    """

    fitness: float
    per_date_costs: np.ndarray
    residual_history: np.ndarray
    assignments: tuple[Assignment, ...]

    def __post_init__(self) -> None:
        k_sum = 0.0
        for k in self.per_date_costs.tolist():
            k_sum += k
        r_sum = 0.0
        for r in self.residual_history[-1].tolist():
            r_sum += r
        scale = max(self.fitness, 1.0e-30)
        if abs(self.fitness - k_sum) > DUAL_ACCOUNTING_RTOL * scale or \
           abs(self.fitness - r_sum) > DUAL_ACCOUNTING_RTOL * scale:
            raise AssertionError(
                f"dual accounting violated: F={self.fitness}, "
                f"sum K={k_sum}, sum R={r_sum}"
            )

    @property
    def final_residuals(self) -> np.ndarray:
        return self.residual_history[-1]


def _elements_arrays(c: Candidate):
    n = c.n
    a = np.empty(n)
    e = np.empty(n)
    inc = np.empty(n)
    raan = np.empty(n)
    theta = np.empty(n)
    epoch = np.empty(n)
    for i, el in enumerate(c.elements):
        a[i], e[i], inc[i] = el.a, el.e, el.inc
        raan[i], theta[i], epoch[i] = el.raan, el.theta, el.epoch
    return a, e, inc, raan, theta, epoch


def _grid_angles(arrays, dates, bases, gravity):
    """(elevation, azimuth) grids of shape (M, n) for the given orbits.

    The single pipeline behind both campaign generation and candidate
    scoring, so identical inputs give bit-identical angles.
    """
    a, e, inc, raan, theta, epoch = arrays
    pos = propagate_positions(a, e, inc, raan, theta, epoch, dates, gravity)
    sta_pos, east, north, up = bases
    dx = pos[..., 0] - sta_pos[:, None, 0]
    dy = pos[..., 1] - sta_pos[:, None, 1]
    dz = pos[..., 2] - sta_pos[:, None, 2]
    de = dx * east[:, None, 0] + dy * east[:, None, 1] + dz * east[:, None, 2]
    dn = dx * north[:, None, 0] + dy * north[:, None, 1] + dz * north[:, None, 2]
    du = dx * up[:, None, 0] + dy * up[:, None, 1] + dz * up[:, None, 2]
    return angles_from_enu(de, dn, du)


def pseudo_angle_grid(c: Candidate, dates, station: GroundStation,
                      gravity: GravityModel = GravityModel()):
    """Elevation/azimuth grids (M, n) of a candidate over arbitrary dates."""
    dates = np.atleast_1d(np.asarray(dates, dtype=float))
    return _grid_angles(_elements_arrays(c), dates,
                        station_bases(station, dates), gravity)


_ENUMERATION_CAP = 360  # injective maps per date below which brute force wins


class CampaignEvaluator:
    """Prepared fitness function over one immutable campaign.

    Instances are pure functions of their input vector, safe to call
    concurrently and picklable, so they can be shipped to worker processes.
    Calling the evaluator returns the scalar fitness (+inf if the candidate
    cannot be scored); :meth:`report` returns the full accounting.
    """

    def __init__(self, obs: ObservationSet, gravity: GravityModel = GravityModel(),
                 vector_epoch: float = 0.0):
        if obs.dates[0] < vector_epoch:
            raise ValueError(
                f"first date {obs.dates[0]} precedes the candidate epoch "
                f"{vector_epoch}"
            )
        self.observations = obs
        self.gravity = gravity
        self.vector_epoch = vector_epoch
        self._dates = np.asarray(obs.dates)
        self._bases = station_bases(obs.station, self._dates)
        self._m = np.asarray(obs.batch_sizes)
        m_max = int(self._m.max())
        big_m = obs.n_dates
        self._z_el = np.full((big_m, m_max), np.nan)
        self._z_az = np.full((big_m, m_max), np.nan)
        for j, batch in enumerate(obs.batches):
            for k, z in enumerate(batch):
                self._z_el[j, k] = z.elevation
                self._z_az[j, k] = z.azimuth
        self._sig_el = np.array([s.sigma_elevation for s in obs.sigmas])
        self._sig_az = np.array([s.sigma_azimuth for s in obs.sigmas])
        self._combos: dict[int, np.ndarray] = {}
        self._m_groups: dict[int, np.ndarray] = {
            int(m): np.flatnonzero(self._m == m) for m in np.unique(self._m)
        }

    def _combo_table(self, m: int, n: int) -> np.ndarray | None:
        """Lexicographic injective maps as an index array, or None if large.

        Enumerating all maps vectorizes the per-date optimum for the small
        batches typical here; totals match the Hungarian path because both
        sum the selected entries in object order.
        """
        count = 1
        for v in range(m, m - n, -1):
            count *= v
        if count > _ENUMERATION_CAP:
            return None
        key = m * 64 + n
        if key not in self._combos:
            self._combos[key] = np.array(
                list(itertools.permutations(range(m), n)), dtype=np.intp)
        return self._combos[key]

    # -- shared pipeline -------------------------------------------------

    def _pseudo_angles(self, arrays):
        return _grid_angles(arrays, self._dates, self._bases, self.gravity)

    def _cost_tensor(self, y_el, y_az):
        """Padded (M, m_max, n) tensor of assignment costs (NaN past m_j).

        Residual wrapping uses the nearest-turn form: identical to the
        canonical wrap for all magnitudes below a half turn (in particular
        exact zeros stay exact zeros), and the half-turn sign ambiguity is
        squared away.
        """
        d_el = _wrap_fast(self._z_el[:, :, None] - y_el[:, None, :])
        d_az = _wrap_fast(self._z_az[:, :, None] - y_az[:, None, :])
        return (d_el / self._sig_el[:, None, None]) ** 2 \
            + (d_az / self._sig_az[:, None, None]) ** 2

    def _solve_dates(self, cost):
        """Per-date optimal assignments from the padded cost tensor.

        Dates sharing a batch size are solved in one vectorized enumeration
        pass when the injective-map count is small; larger batches fall back
        to the Kuhn-Munkres core per date.
        """
        n = cost.shape[2]
        cols = np.arange(n)
        row_of_all = np.empty((cost.shape[0], n), dtype=np.intp)
        for m_j, dates_idx in self._m_groups.items():
            combos = self._combo_table(m_j, n)
            if combos is not None:
                blocks = cost[dates_idx][:, :m_j, :]
                totals = blocks[:, combos, cols].sum(axis=2)
                row_of_all[dates_idx] = combos[np.argmin(totals, axis=1)]
            else:
                for j in dates_idx:
                    row_of_all[j] = solve_lists(
                        cost[j, :m_j, :].T.tolist(), m_j, n)
        picked = cost[np.arange(cost.shape[0])[:, None], row_of_all,
                      cols[None, :]]
        picked_rows = picked.tolist()
        row_of_rows = row_of_all.tolist()
        results = []
        for entries, row_of in zip(picked_rows, row_of_rows):
            k_j = 0.0
            for entry in entries:
                k_j += entry
            results.append((row_of, k_j, entries))
        return results

    def _arrays_for_vector(self, x):
        x = np.asarray(x, dtype=float)
        if x.ndim != 1 or x.size % ELEMENTS_PER_OBJECT or x.size == 0:
            raise ValueError(f"bad candidate vector shape {x.shape}")
        return (x[0::5], x[1::5], x[2::5], x[3::5], x[4::5], self.vector_epoch)

    # -- public surface --------------------------------------------------

    def __call__(self, x) -> float:
        """Scalar fitness of a flattened candidate; +inf when unscorable."""
        try:
            arrays = self._arrays_for_vector(x)
            if arrays[0].size > int(self._m.min()):
                raise EvaluationError(
                    f"candidate has {arrays[0].size} objects but the smallest "
                    f"batch has {int(self._m.min())} measurements"
                )
            y_el, y_az = self._pseudo_angles(arrays)
            cost = self._cost_tensor(y_el, y_az)
            total = 0.0
            for _, k_j, _ in self._solve_dates(cost):
                total += k_j
            return total
        except (EvaluationError, KeplerConvergenceError, ValueError,
                FloatingPointError):
            return math.inf

    def report(self, candidate) -> FitnessReport:
        """Full evaluation of a :class:`Candidate` or flattened vector.

        Raises :class:`EvaluationError` with context instead of returning
        +inf, so callers can distinguish a bad candidate from a high one.
        """
        if isinstance(candidate, Candidate):
            arrays = _elements_arrays(candidate)
        else:
            arrays = self._arrays_for_vector(candidate)
        n = arrays[0].size
        obs = self.observations
        if obs.min_batch < n:
            raise EvaluationError(
                f"candidate has {n} objects but the smallest batch has "
                f"{obs.min_batch} measurements"
            )
        if np.any(np.asarray(arrays[5]) > obs.dates[0]):
            raise EvaluationError("candidate epoch is after the first date")
        try:
            y_el, y_az = self._pseudo_angles(arrays)
        except (KeplerConvergenceError, ValueError) as exc:
            raise EvaluationError(f"propagation failed: {exc}") from exc
        cost = self._cost_tensor(y_el, y_az)
        solved = self._solve_dates(cost)

        big_m = obs.n_dates
        per_date = np.empty(big_m)
        history = np.empty((big_m, n))
        running = [0.0] * n
        assignments = []
        fitness = 0.0
        for j, (row_of, k_j, picked) in enumerate(solved):
            per_date[j] = k_j
            fitness += k_j
            for i in range(n):
                running[i] += picked[i]
            history[j] = running
            assignments.append(Assignment(tuple(row_of), k_j))
        per_date.setflags(write=False)
        history.setflags(write=False)
        return FitnessReport(fitness, per_date, history, tuple(assignments))


def pseudo_measurements(c: Candidate, obs: ObservationSet, date_index: int,
                        gravity: GravityModel = GravityModel()) -> tuple[Measurement, ...]:
    """The n pseudo-measurements the candidate produces at one date."""
    if not (0 <= date_index < obs.n_dates):
        raise ValueError(f"date index {date_index} out of range")
    t = obs.dates[date_index]
    for i, el in enumerate(c.elements):
        if el.epoch > t:
            raise EvaluationError(
                f"object {i} epoch {el.epoch} is after date {date_index} ({t})"
            )
    try:
        y_el, y_az = pseudo_angle_grid(c, (t,), obs.station, gravity)
    except (KeplerConvergenceError, ValueError) as exc:
        raise EvaluationError(
            f"propagation failed at date {date_index}: {exc}"
        ) from exc
    return tuple(Measurement(float(y_el[0, i]), float(y_az[0, i]), t)
                 for i in range(c.n))


def build_cost_matrix(pseudo, measured, sigma: UncertaintyProfile,
                      date_index: int | None = None) -> CostMatrix:
    """Entry (k, i): weighted deviation of measurement k from pseudo-measurement i."""
    n = len(pseudo)
    m = len(measured)
    if m < n:
        where = "" if date_index is None else f" at date {date_index}"
        raise ValueError(
            f"{m} measurements cannot cover {n} objects{where}"
        )
    entries = np.empty((m, n))
    for k, z in enumerate(measured):
        for i, y in enumerate(pseudo):
            entries[k, i] = assignment_cost(z, y, sigma)
    return CostMatrix(entries)


def evaluate(c: Candidate, obs: ObservationSet,
             gravity: GravityModel = GravityModel()) -> FitnessReport:
    """Score a candidate against a campaign; see :class:`FitnessReport`."""
    return CampaignEvaluator(obs, gravity,
                             vector_epoch=min(el.epoch for el in c.elements)
                             ).report(c)
