"""Ground-telescope measurement model: states to (elevation, azimuth).

The station sits on a rotating spherical Earth; the look direction is
decomposed in the local East-North-Up frame. Deviations between measurements
are scored by the uncertainty-weighted sum of squared components, with angle
residuals wrapped to (-pi, pi] first.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .orbits import EARTH_EQUATORIAL_RADIUS_KM, StateVector, wrap_angle

__all__ = [
    "EARTH_ROTATION_RATE",
    "GroundStation",
    "Measurement",
    "UncertaintyProfile",
    "station_state_inertial",
    "observe",
    "weighted_norm",
    "assignment_cost",
]

EARTH_ROTATION_RATE = 7.2921159e-5  # rad/s, sidereal

_ZENITH_TOL = 1e-12


@dataclass(frozen=True)
class GroundStation:
    """Telescope site on a spherical rotating Earth.

    ``rotation_epoch_angle`` ties the frames together: it is the inertial
    longitude of the Earth-fixed x-axis at t = 0 (default 0, frames aligned).
    """

    longitude: float  # rad, east-positive
    latitude: float  # rad, north-positive, geocentric
    earth_radius: float = EARTH_EQUATORIAL_RADIUS_KM
    earth_rotation_rate: float = EARTH_ROTATION_RATE
    rotation_epoch_angle: float = 0.0

    def __post_init__(self) -> None:
        if not (abs(self.latitude) <= math.pi / 2):
            raise ValueError(f"latitude must be within +-pi/2, got {self.latitude}")
        if not (self.earth_radius > 0.0):
            raise ValueError(f"earth radius must be > 0, got {self.earth_radius}")


@dataclass(frozen=True)
class Measurement:
    """One (elevation, azimuth) pair in radians at a given epoch.

    Azimuth is measured from North, positive eastwards, in (-pi, pi].
    """

    elevation: float
    azimuth: float
    epoch: float

    def __post_init__(self) -> None:
        if not (-math.pi / 2 <= self.elevation <= math.pi / 2):
            raise ValueError(f"elevation must be within +-pi/2, got {self.elevation}")
        object.__setattr__(self, "azimuth", wrap_angle(float(self.azimuth)))


@dataclass(frozen=True)
class UncertaintyProfile:
    """Per-component 1-sigma measurement uncertainties, radians."""

    sigma_elevation: float
    sigma_azimuth: float

    def __post_init__(self) -> None:
        if not (self.sigma_elevation > 0.0 and self.sigma_azimuth > 0.0):
            raise ValueError(
                "uncertainties must be > 0, got "
                f"({self.sigma_elevation}, {self.sigma_azimuth})"
            )


def _station_inertial_longitude(st: GroundStation, t) -> np.ndarray:
    return np.asarray(st.longitude + st.rotation_epoch_angle
                      + st.earth_rotation_rate * np.asarray(t, dtype=float))


def station_state_inertial(st: GroundStation, t: float) -> np.ndarray:
    """Inertial station position (km) at time t on the rotating sphere."""
    lon = _station_inertial_longitude(st, float(t))
    cos_lat = np.cos(st.latitude)
    return np.array([
        float(st.earth_radius * cos_lat * np.cos(lon)),
        float(st.earth_radius * cos_lat * np.sin(lon)),
        float(st.earth_radius * np.sin(st.latitude)),
    ])


def station_bases(st: GroundStation, times) -> tuple[np.ndarray, ...]:
    """Station positions and East/North/Up unit vectors at each time.

    Returns (pos, east, north, up), each of shape (T, 3). Elementwise only,
    so values match the scalar helpers bit for bit.
    """
    times = np.atleast_1d(np.asarray(times, dtype=float))
    lon = _station_inertial_longitude(st, times)
    cos_lon, sin_lon = np.cos(lon), np.sin(lon)
    cos_lat = np.cos(st.latitude)
    sin_lat = np.sin(st.latitude)
    ones = np.ones_like(lon)
    pos = np.stack([st.earth_radius * cos_lat * cos_lon,
                    st.earth_radius * cos_lat * sin_lon,
                    st.earth_radius * sin_lat * ones], axis=-1)
    east = np.stack([-sin_lon, cos_lon, 0.0 * ones], axis=-1)
    north = np.stack([-sin_lat * cos_lon, -sin_lat * sin_lon, cos_lat * ones], axis=-1)
    up = np.stack([cos_lat * cos_lon, cos_lat * sin_lon, sin_lat * ones], axis=-1)
    return pos, east, north, up


def angles_from_enu(de, dn, du):
    """(elevation, azimuth) from East/North/Up look-vector components."""
    rng = np.sqrt(de * de + dn * dn + du * du)
    elevation = np.arcsin(np.clip(du / rng, -1.0, 1.0))
    azimuth = np.arctan2(de, dn)
    return elevation, azimuth


def observe(s: StateVector, st: GroundStation) -> Measurement:
    """Elevation/azimuth of an object state as seen from the station.

    At the exact zenith the azimuth is undefined; it is returned as 0 with a
    RuntimeWarning.
    """
    pos, east, north, up = station_bases(st, s.epoch)
    d = s.position - pos[0]
    de = d[0] * east[0, 0] + d[1] * east[0, 1] + d[2] * east[0, 2]
    dn = d[0] * north[0, 0] + d[1] * north[0, 1] + d[2] * north[0, 2]
    du = d[0] * up[0, 0] + d[1] * up[0, 1] + d[2] * up[0, 2]
    if de == 0.0 and dn == 0.0 and du == 0.0:
        raise ValueError("object position coincides with the station")
    elevation, azimuth = angles_from_enu(de, dn, du)
    elevation = float(elevation)
    azimuth = float(azimuth)
    if abs(elevation - math.pi / 2) < _ZENITH_TOL:
        warnings.warn("object at zenith: azimuth undefined, returning 0",
                      RuntimeWarning, stacklevel=2)
        azimuth = 0.0
    return Measurement(elevation, azimuth, s.epoch)


def weighted_norm(u, sigma: UncertaintyProfile) -> float:
    """Sum of squared sigma-normalized components (no square root).

    ``u`` is an (elevation, azimuth) residual pair; both components are
    wrapped to (-pi, pi] before the division.
    """
    d_el = wrap_angle(float(u[0]))
    d_az = wrap_angle(float(u[1]))
    return (d_el / sigma.sigma_elevation) ** 2 + (d_az / sigma.sigma_azimuth) ** 2


def assignment_cost(z: Measurement, y: Measurement, sigma: UncertaintyProfile) -> float:
    """Weighted squared deviation between a measurement and a pseudo-measurement."""
    if z.epoch != y.epoch:
        raise ValueError(
            f"measurements from different epochs: {z.epoch} vs {y.epoch}"
        )
    return weighted_norm((z.elevation - y.elevation, z.azimuth - y.azimuth), sigma)
