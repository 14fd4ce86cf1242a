import math
import warnings

import numpy as np
import pytest

from swarmtraj.observation import (
    EARTH_ROTATION_RATE,
    GroundStation,
    Measurement,
    UncertaintyProfile,
    assignment_cost,
    observe,
    station_state_inertial,
    weighted_norm,
)
from swarmtraj.orbits import EARTH_EQUATORIAL_RADIUS_KM, StateVector

R_E = EARTH_EQUATORIAL_RADIUS_KM

STATION_45N = GroundStation(longitude=0.0, latitude=math.radians(45.0))


def sez_oracle(obj_pos, station):
    """Independent az/el computation through South-East-Zenith matrices.

    Rotates the slant vector into the SEZ frame with explicit rotation
    matrices (a different construction from the ENU dot products under test)
    and reads the angles off the SEZ components.
    """
    lat = station.latitude
    lon = station.longitude + station.rotation_epoch_angle
    site = station.earth_radius * np.array([
        math.cos(lat) * math.cos(lon),
        math.cos(lat) * math.sin(lon),
        math.sin(lat),
    ])
    rho = np.asarray(obj_pos) - site
    c, s = math.cos(lon), math.sin(lon)
    rot3 = np.array([[c, s, 0.0], [-s, c, 0.0], [0.0, 0.0, 1.0]])
    ang = math.pi / 2 - lat
    c2, s2 = math.cos(ang), math.sin(ang)
    rot2 = np.array([[c2, 0.0, -s2], [0.0, 1.0, 0.0], [s2, 0.0, c2]])
    sez = rot2 @ rot3 @ rho
    rng = float(np.linalg.norm(sez))
    elevation = math.asin(sez[2] / rng)
    azimuth = math.atan2(sez[1], -sez[0])
    return elevation, azimuth


class TestStation:
    def test_rejects_bad_latitude(self):
        with pytest.raises(ValueError, match="latitude"):
            GroundStation(longitude=0.0, latitude=2.0)

    def test_equator_prime_meridian_t0(self):
        st = GroundStation(longitude=0.0, latitude=0.0)
        assert station_state_inertial(st, 0.0) == pytest.approx(
            [R_E, 0.0, 0.0])

    def test_full_rotation_returns(self):
        st = GroundStation(longitude=1.0, latitude=0.5)
        p0 = station_state_inertial(st, 0.0)
        p1 = station_state_inertial(st, 2 * math.pi / EARTH_ROTATION_RATE)
        assert np.linalg.norm(p1 - p0) < 1e-9

    def test_latitude_z_component(self):
        p = station_state_inertial(STATION_45N, 0.0)
        assert p[2] == pytest.approx(R_E * math.sin(math.radians(45.0)))


class TestObserve:
    def test_zenith_flagged(self):
        st = GroundStation(longitude=0.0, latitude=0.0)
        s = StateVector(np.array([42164.0, 0.0, 0.0]), np.zeros(3), 0.0)
        with pytest.warns(RuntimeWarning, match="zenith"):
            z = observe(s, st)
        assert z.elevation == pytest.approx(math.pi / 2)
        assert z.azimuth == 0.0

    def test_due_south_equatorial_object(self):
        s = StateVector(np.array([42164.0, 0.0, 0.0]), np.zeros(3), 0.0)
        z = observe(s, STATION_45N)
        # Elevation by direct right-triangle geometry in the meridian plane.
        lat = math.radians(45.0)
        up = 42164.0 * math.cos(lat) - R_E
        south = 42164.0 * math.sin(lat)
        assert z.azimuth == pytest.approx(math.pi, abs=1e-12)
        assert z.elevation == pytest.approx(math.atan2(up, south), abs=1e-12)
        el_o, az_o = sez_oracle(s.position, STATION_45N)
        assert z.elevation == pytest.approx(el_o, abs=1e-12)
        assert abs(z.azimuth) == pytest.approx(abs(az_o), abs=1e-12)

    def test_below_horizon_negative_elevation(self):
        s = StateVector(np.array([-42164.0, 0.0, 0.0]), np.zeros(3), 0.0)
        z = observe(s, STATION_45N)
        assert z.elevation < 0.0

    def test_matches_sez_oracle_random(self):
        rng = np.random.default_rng(17)
        for _ in range(100):
            st = GroundStation(longitude=float(rng.uniform(-math.pi, math.pi)),
                               latitude=float(rng.uniform(-1.3, 1.3)))
            pos = rng.uniform(-1.0, 1.0, 3)
            pos = pos / np.linalg.norm(pos) * rng.uniform(7000.0, 45000.0)
            z = observe(StateVector(pos, np.zeros(3), 0.0), st)
            el_o, az_o = sez_oracle(pos, st)
            assert z.elevation == pytest.approx(el_o, abs=1e-12)
            diff = (z.azimuth - az_o + math.pi) % (2 * math.pi) - math.pi
            assert abs(diff) < 1e-12

    def test_rotation_consistency(self):
        rng = np.random.default_rng(23)
        for _ in range(50):
            delta = float(rng.uniform(-math.pi, math.pi))
            pos = rng.uniform(-1.0, 1.0, 3)
            pos = pos / np.linalg.norm(pos) * 42000.0
            c, s = math.cos(delta), math.sin(delta)
            rotated = np.array([c * pos[0] - s * pos[1],
                                s * pos[0] + c * pos[1], pos[2]])
            st1 = GroundStation(longitude=0.3, latitude=0.6)
            st2 = GroundStation(longitude=0.3, latitude=0.6,
                                rotation_epoch_angle=delta)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                z1 = observe(StateVector(pos, np.zeros(3), 0.0), st1)
                z2 = observe(StateVector(rotated, np.zeros(3), 0.0), st2)
            assert z2.elevation == pytest.approx(z1.elevation, abs=1e-12)
            diff = (z2.azimuth - z1.azimuth + math.pi) % (2 * math.pi) - math.pi
            assert abs(diff) < 1e-12


class TestWeightedNorm:
    SIGMA = UncertaintyProfile(math.radians(0.01), math.radians(0.01))

    def test_zero(self):
        assert weighted_norm((0.0, 0.0), self.SIGMA) == 0.0

    def test_unit_sigma_deviations(self):
        u = (self.SIGMA.sigma_elevation, self.SIGMA.sigma_azimuth)
        assert weighted_norm(u, self.SIGMA) == pytest.approx(2.0, rel=1e-12)

    def test_one_degree_at_hundredth_sigma(self):
        # The squared form: a 1 deg deviation against sigma = 0.01 deg
        # contributes (100)^2.
        u = (math.radians(1.0), 0.0)
        assert weighted_norm(u, self.SIGMA) == pytest.approx(10000.0,
                                                             rel=1e-12)

    def test_wraps_before_division(self):
        sigma = UncertaintyProfile(1.0, 1.0)
        a = weighted_norm((0.0, math.radians(179.0)), sigma)
        b = weighted_norm((0.0, math.radians(-179.0)), sigma)
        full = weighted_norm((0.0, math.radians(358.0)), sigma)
        assert full == pytest.approx(
            math.radians(2.0) ** 2, rel=1e-9)
        assert a == pytest.approx(b, rel=1e-12)

    def test_positive_unless_wrapped_zero(self):
        sigma = UncertaintyProfile(1.0, 1.0)
        assert weighted_norm((2 * math.pi, 0.0), sigma) == pytest.approx(
            0.0, abs=1e-25)
        assert weighted_norm((0.1, 0.0), sigma) > 0.0


class TestAssignmentCost:
    SIGMA = UncertaintyProfile(math.radians(0.01), math.radians(0.01))

    def test_identical_measurements(self):
        z = Measurement(0.3, 1.2, 100.0)
        assert assignment_cost(z, z, self.SIGMA) == 0.0

    def test_symmetry(self):
        z = Measurement(0.31, 1.18, 5.0)
        y = Measurement(0.30, 1.21, 5.0)
        assert assignment_cost(z, y, self.SIGMA) == pytest.approx(
            assignment_cost(y, z, self.SIGMA), rel=1e-15)

    def test_hand_value(self):
        z = Measurement(math.radians(10.02), math.radians(49.99), 0.0)
        y = Measurement(math.radians(10.00), math.radians(50.00), 0.0)
        assert assignment_cost(z, y, self.SIGMA) == pytest.approx(5.0,
                                                                  rel=1e-9)

    def test_epoch_mismatch_rejected(self):
        z = Measurement(0.1, 0.2, 1.0)
        y = Measurement(0.1, 0.2, 2.0)
        with pytest.raises(ValueError, match="epoch"):
            assignment_cost(z, y, self.SIGMA)


class TestMeasurementType:
    def test_azimuth_normalized(self):
        z = Measurement(0.0, math.radians(350.0), 0.0)
        assert z.azimuth == pytest.approx(math.radians(-10.0))

    def test_elevation_range_enforced(self):
        with pytest.raises(ValueError, match="elevation"):
            Measurement(2.0, 0.0, 0.0)

    def test_uncertainty_positive(self):
        with pytest.raises(ValueError):
            UncertaintyProfile(0.0, 0.1)
