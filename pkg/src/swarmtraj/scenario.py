"""Synthetic near-geostationary observation campaigns with ground truth.

Ten reference objects on slightly eccentric, slightly inclined orbits near
the geostationary ring are photographed from a mid-latitude station on a
fixed schedule; a few fictitious rows are mixed into some batches and row
order is shuffled, while the true source of every row is kept as a label.

Campaign file grammar (one whitespace-separated record per line, ``#``
comments and blank lines ignored, all floats round-trippable via repr)::

    version 1
    station <lon_deg> <lat_deg> <earth_radius_km> <rot_rate_rad_s> <epoch_angle_deg>
    truth <a_km> <e> <inc_deg> <raan_deg> <theta_deg>      # optional, n lines
    date <epoch_s> <night> <m> <sigma_el_deg> <sigma_az_deg>
    meas <elevation_deg> <azimuth_deg>                     # m lines per date
    labels <l_1> ... <l_m>                                 # optional, -1 = fictitious

``truth`` and ``labels`` travel together: files carrying both parse to a
:class:`LabeledObservationSet`, files carrying neither to a plain
:class:`~swarmtraj.fitness.ObservationSet`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .assignment import solve
from .fitness import (
    Candidate,
    FitnessReport,
    ObservationSet,
    pseudo_angle_grid,
)
from .observation import GroundStation, Measurement, UncertaintyProfile
from .orbits import GravityModel, OrbitalElements, wrap_angle

__all__ = [
    "GEO_RADIUS_KM",
    "TABLE_OF_TRUTH",
    "ScenarioConfig",
    "ScenarioError",
    "CampaignFormatError",
    "LabeledObservationSet",
    "ScoreSummary",
    "default_truth",
    "schedule",
    "generate",
    "score_assignments",
    "write_campaign",
    "read_campaign",
]

GEO_RADIUS_KM = 42164.0

# Reference truth set: (a_km, e, inc_deg, raan_deg, theta_deg) per object.
TABLE_OF_TRUTH = (
    (GEO_RADIUS_KM - 100.0, 0.02, 0.5, 0.0, -40.0),
    (GEO_RADIUS_KM + 100.0, 0.04, 1.0, 10.0, -52.0),
    (GEO_RADIUS_KM - 50.0, 0.06, 0.6, 20.0, -64.0),
    (GEO_RADIUS_KM + 50.0, 0.08, 1.1, 0.0, -46.0),
    (GEO_RADIUS_KM - 20.0, 0.03, 0.7, 10.0, -58.0),
    (GEO_RADIUS_KM + 20.0, 0.05, 1.2, 20.0, -70.0),
    (GEO_RADIUS_KM - 80.0, 0.02, 0.8, 0.0, -42.0),
    (GEO_RADIUS_KM + 80.0, 0.04, 1.3, 10.0, -54.0),
    (GEO_RADIUS_KM - 40.0, 0.06, 0.9, 20.0, -66.0),
    (GEO_RADIUS_KM + 40.0, 0.08, 1.4, 0.0, -48.0),
)

# Start-of-night offset (seconds into each day) pinned by the seeded
# visibility search (min_truth_elevation_deg swept over offsets at 1800 s
# resolution): it maximizes the worst-case truth elevation over the 30
# default photograph dates (24.1 deg, comfortably above the 10 deg floor).
DEFAULT_NIGHT_START = 27000.0

SECONDS_PER_DAY = 86400.0

DEFAULT_SIGMA = UncertaintyProfile(math.radians(0.01), math.radians(0.01))

DEFAULT_STATION = GroundStation(longitude=0.0, latitude=math.radians(45.0))


class ScenarioError(RuntimeError):
    """Campaign generation failed (e.g. a truth object below the horizon)."""


class CampaignFormatError(ValueError):
    """A campaign file did not match the documented grammar."""


def default_truth() -> tuple[OrbitalElements, ...]:
    """The ten reference objects, epoch 0."""
    return tuple(
        OrbitalElements(a=a, e=e, inc=math.radians(inc), raan=math.radians(raan),
                        theta=math.radians(theta), epoch=0.0)
        for a, e, inc, raan, theta in TABLE_OF_TRUTH
    )


@dataclass(frozen=True)
class ScenarioConfig:
    """Knobs of the synthetic campaign; defaults reproduce the reference run.

    ``fictitious_counts`` gives the number of extra rows per date; None draws
    each count uniformly from {0, 1, 2} with the scenario seed.
    ``measurement_noise_sigma`` (rad) adds Gaussian noise to the stored true
    rows; the default 0 keeps the campaign exactly consistent with the truth.
    """

    truth_elements: tuple[OrbitalElements, ...] = field(default_factory=default_truth)
    nights: int = 3
    photos_per_night: int = 10
    photo_interval: float = 1800.0
    night_start_offsets: tuple[float, ...] | None = None
    station: GroundStation = DEFAULT_STATION
    sigma: UncertaintyProfile = DEFAULT_SIGMA
    fictitious_counts: tuple[int, ...] | None = None
    fictitious_margin: float = math.radians(0.5)
    measurement_noise_sigma: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "truth_elements", tuple(self.truth_elements))
        if not self.truth_elements:
            raise ValueError("need at least one truth object")
        if self.nights < 1:
            raise ValueError(f"nights must be >= 1, got {self.nights}")
        if self.photos_per_night < 1:
            raise ValueError(
                f"photos_per_night must be >= 1, got {self.photos_per_night}"
            )
        if not (self.photo_interval > 0):
            raise ValueError(
                f"photo_interval must be > 0, got {self.photo_interval}"
            )
        if self.night_start_offsets is not None:
            offs = tuple(float(t) for t in self.night_start_offsets)
            if len(offs) != self.nights:
                raise ValueError(
                    f"expected {self.nights} night offsets, got {len(offs)}"
                )
            object.__setattr__(self, "night_start_offsets", offs)
        if self.fictitious_counts is not None:
            counts = tuple(int(c) for c in self.fictitious_counts)
            if len(counts) != self.nights * self.photos_per_night:
                raise ValueError(
                    f"expected {self.nights * self.photos_per_night} fictitious "
                    f"counts, got {len(counts)}"
                )
            if any(c < 0 for c in counts):
                raise ValueError("fictitious counts must be >= 0")
            object.__setattr__(self, "fictitious_counts", counts)
        if self.measurement_noise_sigma < 0:
            raise ValueError("measurement_noise_sigma must be >= 0")

    @property
    def n_objects(self) -> int:
        return len(self.truth_elements)

    @property
    def offsets(self) -> tuple[float, ...]:
        if self.night_start_offsets is not None:
            return self.night_start_offsets
        return tuple(g * SECONDS_PER_DAY + DEFAULT_NIGHT_START
                     for g in range(self.nights))


@dataclass(frozen=True)
class LabeledObservationSet:
    """A campaign plus the per-row ground truth used to score assignments."""

    observations: ObservationSet
    truth_labels: tuple[np.ndarray, ...]
    truth_candidate: Candidate

    def __post_init__(self) -> None:
        labels = tuple(np.asarray(lab, dtype=int) for lab in self.truth_labels)
        obs = self.observations
        if len(labels) != obs.n_dates:
            raise ValueError("one label array per date required")
        n = self.truth_candidate.n
        for j, (lab, m_j) in enumerate(zip(labels, obs.batch_sizes)):
            if lab.shape != (m_j,):
                raise ValueError(
                    f"date {j}: {m_j} rows but {lab.size} labels"
                )
            objects = lab[lab >= 0]
            if len(set(objects.tolist())) != objects.size or \
                    (objects >= n).any():
                raise ValueError(f"date {j}: object labels must be injective "
                                 f"and < {n}")
        for lab in labels:
            lab.setflags(write=False)
        object.__setattr__(self, "truth_labels", labels)


def schedule(config: ScenarioConfig) -> tuple[tuple[float, ...], tuple[int, ...]]:
    """Photograph epochs and their night indices.

    Within night g, photo p happens at ``offsets[g] + p * photo_interval``.
    Overlapping or out-of-order nights are rejected.
    """
    offsets = config.offsets
    span = (config.photos_per_night - 1) * config.photo_interval
    for g in range(config.nights - 1):
        if offsets[g] + span >= offsets[g + 1]:
            raise ValueError(
                f"night {g} (ending {offsets[g] + span}) overlaps night "
                f"{g + 1} (starting {offsets[g + 1]})"
            )
    dates = []
    nights = []
    for g in range(config.nights):
        for p in range(config.photos_per_night):
            dates.append(offsets[g] + p * config.photo_interval)
            nights.append(g)
    return tuple(dates), tuple(nights)


def generate(config: ScenarioConfig,
             gravity: GravityModel = GravityModel()) -> LabeledObservationSet:
    """Build the labeled campaign for a scenario configuration.

    Deterministic for a given seed; random draws happen in a pinned order:
    fictitious counts for all dates first, then per date (ascending) the
    optional measurement noise, the fictitious rows (elevations then
    azimuths), and the row shuffle.
    """
    dates, nights = schedule(config)
    truth = Candidate(config.truth_elements)
    n = truth.n
    late = [i for i, el in enumerate(truth.elements) if el.epoch > dates[0]]
    if late:
        raise ScenarioError(
            f"truth objects {late} have epochs after the first photograph "
            f"({dates[0]})"
        )
    y_el, y_az = pseudo_angle_grid(truth, dates, config.station, gravity)

    below = np.argwhere(y_el < 0.0)
    if below.size:
        culprits = ", ".join(
            f"object {int(i)} at date {int(j)} (t={dates[int(j)]})"
            for j, i in below[:5]
        )
        raise ScenarioError(f"truth objects below the horizon: {culprits}")

    rng = np.random.default_rng(config.seed)
    big_m = len(dates)
    if config.fictitious_counts is not None:
        counts = config.fictitious_counts
    else:
        counts = tuple(int(c) for c in rng.integers(0, 3, size=big_m))

    margin = config.fictitious_margin
    noise = config.measurement_noise_sigma
    batches = []
    labels = []
    for j, t in enumerate(dates):
        el = y_el[j].copy()
        az = y_az[j].copy()
        if noise > 0.0:
            el = np.clip(el + rng.normal(0.0, noise, n), -math.pi / 2, math.pi / 2)
            az = wrap_angle(az + rng.normal(0.0, noise, n))
        extra = counts[j]
        if extra:
            # Uniform draws inside the batch bounding box inflated by the
            # margin; azimuths are boxed around their circular mean so a
            # batch straddling the +-pi seam still gets a sane box.
            ref = math.atan2(float(np.sin(az).sum()), float(np.cos(az).sum()))
            d_az = wrap_angle(az - ref)
            f_el = rng.uniform(float(el.min()) - margin,
                               float(el.max()) + margin, extra)
            f_el = np.clip(f_el, -math.pi / 2, math.pi / 2)
            f_az = wrap_angle(ref + rng.uniform(float(d_az.min()) - margin,
                                                float(d_az.max()) + margin,
                                                extra))
            el = np.concatenate([el, f_el])
            az = np.concatenate([az, f_az])
        m_j = n + extra
        perm = rng.permutation(m_j)
        lab = np.concatenate([np.arange(n), np.full(extra, -1, dtype=int)])[perm]
        el = el[perm]
        az = az[perm]
        batches.append(tuple(Measurement(float(el[k]), float(az[k]), t)
                             for k in range(m_j)))
        labels.append(lab)

    obs = ObservationSet(dates=dates, batches=tuple(batches),
                         sigmas=(config.sigma,) * big_m,
                         station=config.station, night_membership=nights)
    return LabeledObservationSet(obs, tuple(labels), truth)


def min_truth_elevation_deg(config: ScenarioConfig,
                            gravity: GravityModel = GravityModel()) -> float:
    """Worst elevation of any truth object over the schedule, in degrees.

    The seeded search that pinned DEFAULT_NIGHT_START maximized this value;
    it stays available for validating custom schedules.
    """
    dates, _ = schedule(config)
    y_el, _ = pseudo_angle_grid(Candidate(config.truth_elements), dates,
                                config.station, gravity)
    return math.degrees(float(y_el.min()))


@dataclass(frozen=True)
class ScoreSummary:
    """Assignment accuracy of a fitness report against the truth labels.

    ``purity`` is the fraction of assignments landing on true (non-
    fictitious) rows; ``permutation_consistency`` the best single-relabeling
    agreement between assignments and truth labels across all dates.
    """

    purity: float
    per_date_purity: tuple[float, ...]
    permutation_consistency: float
    permutation: tuple[int, ...]


def score_assignments(report: FitnessReport, truth_labels) -> ScoreSummary:
    """Score a report's measurement choices against the ground truth."""
    labels = [np.asarray(lab, dtype=int) for lab in truth_labels]
    big_m = len(report.assignments)
    if len(labels) != big_m:
        raise ValueError(
            f"report covers {big_m} dates but labels cover {len(labels)}"
        )
    n = report.residual_history.shape[1]
    n_truth = 0
    for lab in labels:
        if lab.size and lab.max() >= n_truth:
            n_truth = int(lab.max()) + 1
    if n_truth != n:
        raise ValueError(
            f"report tracks {n} objects but labels name {n_truth}"
        )

    hits = np.zeros((n, n), dtype=int)  # candidate object x truth object
    true_rows = 0
    per_date = []
    for j, (assignment, lab) in enumerate(zip(report.assignments, labels)):
        date_true = 0
        for i, k in enumerate(assignment.row_of):
            if k >= lab.size:
                raise ValueError(
                    f"date {j}: assignment row {k} outside batch of {lab.size}"
                )
            source = int(lab[k])
            if source >= 0:
                hits[i, source] += 1
                date_true += 1
        true_rows += date_true
        per_date.append(date_true / n)
    purity = true_rows / (n * big_m)

    # Best single relabeling = assignment problem on missed counts; the
    # transpose puts truth objects on rows so row_of[i] names the truth
    # object matched to candidate object i.
    relabel = solve(np.asarray((big_m - hits).T, dtype=float))
    permutation = tuple(int(o) for o in relabel.row_of)
    agreement = sum(int(hits[i, o]) for i, o in enumerate(permutation))
    consistency = agreement / (n * big_m)
    return ScoreSummary(purity=purity, per_date_purity=tuple(per_date),
                        permutation_consistency=consistency,
                        permutation=permutation)


# -- campaign files ---------------------------------------------------------

def _fmt(x: float) -> str:
    return repr(float(x))


def write_campaign(path, data) -> None:
    """Serialize a campaign (labeled or not) using the documented grammar."""
    labeled = isinstance(data, LabeledObservationSet)
    obs = data.observations if labeled else data
    st = obs.station
    lines = ["# swarmtraj campaign", "version 1"]
    lines.append(
        "station "
        f"{_fmt(math.degrees(st.longitude))} {_fmt(math.degrees(st.latitude))} "
        f"{_fmt(st.earth_radius)} {_fmt(st.earth_rotation_rate)} "
        f"{_fmt(math.degrees(st.rotation_epoch_angle))}"
    )
    if labeled:
        for el in data.truth_candidate.elements:
            lines.append(
                "truth "
                f"{_fmt(el.a)} {_fmt(el.e)} {_fmt(math.degrees(el.inc))} "
                f"{_fmt(math.degrees(el.raan))} {_fmt(math.degrees(el.theta))}"
            )
    for j, t in enumerate(obs.dates):
        sig = obs.sigmas[j]
        batch = obs.batches[j]
        lines.append(
            f"date {_fmt(t)} {obs.night_membership[j]} {len(batch)} "
            f"{_fmt(math.degrees(sig.sigma_elevation))} "
            f"{_fmt(math.degrees(sig.sigma_azimuth))}"
        )
        for z in batch:
            lines.append(
                f"meas {_fmt(math.degrees(z.elevation))} "
                f"{_fmt(math.degrees(z.azimuth))}"
            )
        if labeled:
            lines.append("labels " + " ".join(str(int(v))
                                              for v in data.truth_labels[j]))
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def _parse_floats(parts, count, lineno, what):
    if len(parts) != count:
        raise CampaignFormatError(
            f"line {lineno}: {what} needs {count} fields, got {len(parts)}"
        )
    try:
        return [float(p) for p in parts]
    except ValueError as exc:
        raise CampaignFormatError(f"line {lineno}: {exc}") from exc


def read_campaign(path):
    """Parse a campaign file; labeled files return a LabeledObservationSet."""
    station = None
    truth_rows: list[tuple[float, ...]] = []
    dates: list[float] = []
    nights: list[int] = []
    sigmas: list[UncertaintyProfile] = []
    batches: list[list[Measurement]] = []
    labels: list[np.ndarray | None] = []
    expecting = 0  # measurement rows still owed to the open date block

    with open(path, "r", encoding="ascii") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            tag, *parts = line.split()
            if tag == "version":
                if parts != ["1"]:
                    raise CampaignFormatError(
                        f"line {lineno}: unsupported version {parts}"
                    )
            elif tag == "station":
                lon, lat, radius, rate, epoch_angle = _parse_floats(
                    parts, 5, lineno, "station")
                try:
                    station = GroundStation(
                        longitude=math.radians(lon), latitude=math.radians(lat),
                        earth_radius=radius, earth_rotation_rate=rate,
                        rotation_epoch_angle=math.radians(epoch_angle))
                except ValueError as exc:
                    raise CampaignFormatError(f"line {lineno}: {exc}") from exc
            elif tag == "truth":
                truth_rows.append(tuple(_parse_floats(parts, 5, lineno, "truth")))
            elif tag == "date":
                if expecting:
                    raise CampaignFormatError(
                        f"line {lineno}: previous date block is short "
                        f"{expecting} measurement rows"
                    )
                t, night, m, sig_el, sig_az = _parse_floats(parts, 5, lineno,
                                                            "date")
                if m != int(m) or int(m) < 1:
                    raise CampaignFormatError(
                        f"line {lineno}: row count must be a positive integer"
                    )
                try:
                    sigmas.append(UncertaintyProfile(math.radians(sig_el),
                                                     math.radians(sig_az)))
                except ValueError as exc:
                    raise CampaignFormatError(f"line {lineno}: {exc}") from exc
                dates.append(t)
                nights.append(int(night))
                batches.append([])
                labels.append(None)
                expecting = int(m)
            elif tag == "meas":
                if not expecting:
                    raise CampaignFormatError(
                        f"line {lineno}: measurement outside a date block"
                    )
                el, az = _parse_floats(parts, 2, lineno, "meas")
                try:
                    batches[-1].append(Measurement(math.radians(el),
                                                   math.radians(az), dates[-1]))
                except ValueError as exc:
                    raise CampaignFormatError(f"line {lineno}: {exc}") from exc
                expecting -= 1
            elif tag == "labels":
                if expecting or not batches:
                    raise CampaignFormatError(
                        f"line {lineno}: labels before the date block is complete"
                    )
                try:
                    lab = np.array([int(p) for p in parts], dtype=int)
                except ValueError as exc:
                    raise CampaignFormatError(f"line {lineno}: {exc}") from exc
                if lab.size != len(batches[-1]):
                    raise CampaignFormatError(
                        f"line {lineno}: {lab.size} labels for "
                        f"{len(batches[-1])} rows"
                    )
                labels[-1] = lab
            else:
                raise CampaignFormatError(f"line {lineno}: unknown record {tag!r}")

    if expecting:
        raise CampaignFormatError(
            f"end of file: last date block is short {expecting} rows"
        )
    if station is None:
        raise CampaignFormatError("end of file: missing station record")
    if not dates:
        raise CampaignFormatError("end of file: no date blocks")

    obs = ObservationSet(dates=tuple(dates),
                         batches=tuple(tuple(b) for b in batches),
                         sigmas=tuple(sigmas), station=station,
                         night_membership=tuple(nights))
    labeled_count = sum(lab is not None for lab in labels)
    if truth_rows and labeled_count == len(dates):
        truth = Candidate(tuple(
            OrbitalElements(a=a, e=e, inc=math.radians(inc),
                            raan=math.radians(raan),
                            theta=math.radians(theta), epoch=0.0)
            for a, e, inc, raan, theta in truth_rows
        ))
        return LabeledObservationSet(obs, tuple(labels), truth)
    if truth_rows or labeled_count:
        raise CampaignFormatError(
            "truth and labels must both be present (on every date) or absent"
        )
    return obs
