"""Unperturbed two-body propagation from five-element initial conditions.

An orbit is described by (a, e, inc, raan, theta) with the perigee placed at
the ascending node, so ``theta`` is both the true anomaly and the angular
position measured from the node. Propagation is closed-form Keplerian:
theta -> eccentric -> mean anomaly, advance at the mean motion, invert.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

__all__ = [
    "MU_EARTH",
    "EARTH_EQUATORIAL_RADIUS_KM",
    "GravityModel",
    "OrbitalElements",
    "StateVector",
    "KeplerConvergenceError",
    "wrap_angle",
    "solve_kepler",
    "elements_to_state",
    "state_to_elements",
    "propagate",
    "mean_motion",
    "orbital_period",
]

MU_EARTH = 398600.4418  # km^3/s^2, WGS-84
EARTH_EQUATORIAL_RADIUS_KM = 6378.137

_TWO_PI = 2.0 * math.pi

# Below this the node direction is numerically meaningless and
# state_to_elements switches to the total-longitude convention. Near-circular
# orbits need no analogous branch: theta is referenced to the node, not the
# (possibly undefined) perigee.
NEAR_EQUATORIAL_INC = 1e-9  # rad


class KeplerConvergenceError(RuntimeError):
    """Newton iteration on Kepler's equation failed to converge."""


def wrap_angle(x):
    """Wrap an angle (scalar or array) to (-pi, pi].

    Values already in range pass through unchanged (bit for bit), so
    wrapping is idempotent.
    """
    if np.ndim(x) == 0:
        x = float(x)
        if -math.pi < x <= math.pi:
            return x
        return float(math.pi - (math.pi - x) % _TWO_PI)
    arr = np.asarray(x)
    in_range = (arr > -math.pi) & (arr <= math.pi)
    return np.where(in_range, arr, math.pi - np.mod(math.pi - arr, _TWO_PI))


def _wrap_fast(arr: np.ndarray) -> np.ndarray:
    """Wrap to [-pi, pi] with round-to-nearest-turn; in-range values pass
    through bitwise (round of a sub-half magnitude is 0). The half-turn
    boundary may land on either sign, which callers squaring or feeding a
    symmetric solver do not distinguish."""
    return arr - _TWO_PI * np.round(arr * (1.0 / _TWO_PI))


@dataclass(frozen=True)
class GravityModel:
    """Central gravity field, characterized by its mu in km^3/s^2."""

    mu: float = MU_EARTH

    def __post_init__(self) -> None:
        if not (self.mu > 0.0):
            raise ValueError(f"gravitational parameter must be > 0, got {self.mu}")


@dataclass(frozen=True)
class OrbitalElements:
    """One object's initial condition.

    a: semi-major axis, km. e: eccentricity. inc: inclination, rad.
    raan: right ascension of the ascending node, rad. theta: angular position
    from the ascending node, rad (equal to the true anomaly under the
    perigee-at-node convention). epoch: seconds on the scenario timeline.
    """

    a: float
    e: float
    inc: float
    raan: float
    theta: float
    epoch: float = 0.0

    def __post_init__(self) -> None:
        if not (self.a > 0.0):
            raise ValueError(f"semi-major axis must be > 0, got {self.a}")
        if not (0.0 <= self.e < 1.0):
            raise ValueError(f"eccentricity must be in [0, 1), got {self.e}")
        if not (0.0 <= self.inc <= math.pi):
            raise ValueError(f"inclination must be in [0, pi], got {self.inc}")
        object.__setattr__(self, "raan", wrap_angle(float(self.raan)))
        object.__setattr__(self, "theta", wrap_angle(float(self.theta)))

    @property
    def total_longitude(self) -> float:
        """raan + theta wrapped to (-pi, pi]; well defined as inc -> 0."""
        return wrap_angle(self.raan + self.theta)


@dataclass(frozen=True)
class StateVector:
    """Inertial Earth-centered position (km) and velocity (km/s) at an epoch."""

    position: np.ndarray
    velocity: np.ndarray
    epoch: float

    def __post_init__(self) -> None:
        for name in ("position", "velocity"):
            vec = np.asarray(getattr(self, name), dtype=float)
            if vec.shape != (3,):
                raise ValueError(f"{name} must be a 3-vector, got shape {vec.shape}")
            object.__setattr__(self, name, vec)


def mean_motion(a: float, g: GravityModel) -> float:
    return math.sqrt(g.mu / a**3)


def orbital_period(a: float, g: GravityModel) -> float:
    return _TWO_PI * math.sqrt(a**3 / g.mu)


def solve_kepler(mean_anomaly: float, e: float, tol: float = 1e-12,
                 max_iter: int = 50) -> float:
    """Solve E - e*sin(E) = M for E by Newton-Raphson started at E = M."""
    if not (0.0 <= e < 1.0):
        raise ValueError(f"eccentricity must be in [0, 1), got {e}")
    m = float(mean_anomaly)
    ecc = float(e)
    big_e = m
    for _ in range(max_iter):
        residual = big_e - ecc * math.sin(big_e) - m
        if abs(residual) < tol:
            return big_e
        big_e -= residual / (1.0 - ecc * math.cos(big_e))
    raise KeplerConvergenceError(
        f"Kepler solver did not converge in {max_iter} steps (M={m}, e={ecc})"
    )


def _solve_kepler_masked(mean_anomaly: np.ndarray, e: np.ndarray,
                         tol: float = 1e-12, max_iter: int = 50) -> np.ndarray:
    """Vectorized Newton with per-element freezing once converged.

    Every update is elementwise and each element follows exactly the update
    sequence it would follow alone, so results do not depend on the batch
    shape. The first sweeps run unconditionally (wrapped anomalies with
    e <= ~0.66 converge within them); stragglers then iterate under a mask.
    """
    m = np.asarray(mean_anomaly, dtype=float)
    ecc = np.broadcast_to(np.asarray(e, dtype=float), m.shape)
    big_e = m.copy()
    for _ in range(4):
        residual = big_e - ecc * np.sin(big_e) - m
        big_e = np.where(np.abs(residual) < tol, big_e,
                         big_e - residual / (1.0 - ecc * np.cos(big_e)))
    for _ in range(max_iter - 4):
        residual = big_e - ecc * np.sin(big_e) - m
        active = np.abs(residual) >= tol
        if not active.any():
            return big_e
        big_e[active] -= residual[active] / (1.0 - ecc[active] * np.cos(big_e[active]))
    residual = big_e - ecc * np.sin(big_e) - m
    if np.all(np.abs(residual) < tol):
        return big_e
    worst = np.unravel_index(np.argmax(np.abs(residual)), m.shape)
    raise KeplerConvergenceError(
        f"Kepler solver did not converge in {max_iter} steps "
        f"(M={m[worst]}, e={ecc[worst]})"
    )


def _theta_to_eccentric(theta, e):
    """True anomaly -> eccentric anomaly (elementwise, array-safe)."""
    half = np.asarray(theta) / 2.0
    return 2.0 * np.arctan2(np.sqrt(1.0 - e) * np.sin(half),
                            np.sqrt(1.0 + e) * np.cos(half))


def _eccentric_to_theta(big_e, e):
    half = np.asarray(big_e) / 2.0
    return 2.0 * np.arctan2(np.sqrt(1.0 + e) * np.sin(half),
                            np.sqrt(1.0 - e) * np.cos(half))


def elements_to_state(el: OrbitalElements, g: GravityModel = GravityModel()) -> StateVector:
    """Position/velocity at the element epoch (perifocal rotated by raan, inc)."""
    p = el.a * (1.0 - el.e * el.e)
    cos_o, sin_o = np.cos(el.raan), np.sin(el.raan)
    cos_i, sin_i = np.cos(el.inc), np.sin(el.inc)
    # Node direction and the in-plane quadrature direction: Rz(raan) @ Rx(inc)
    # applied to x-hat and y-hat.
    px, py = cos_o, sin_o
    qx, qy, qz = -sin_o * cos_i, cos_o * cos_i, sin_i
    cos_t, sin_t = np.cos(el.theta), np.sin(el.theta)
    r = p / (1.0 + el.e * cos_t)
    position = np.array([
        r * (cos_t * px + sin_t * qx),
        r * (cos_t * py + sin_t * qy),
        r * (sin_t * qz),
    ])
    vfac = math.sqrt(g.mu / p)
    ve = el.e + cos_t
    velocity = np.array([
        vfac * (-sin_t * px + ve * qx),
        vfac * (-sin_t * py + ve * qy),
        vfac * (ve * qz),
    ])
    return StateVector(position, velocity, el.epoch)


def state_to_elements(s: StateVector, g: GravityModel = GravityModel()) -> OrbitalElements:
    """Recover (a, e, inc, raan, theta) from a bound state.

    Inverse of ``elements_to_state`` for states on the perigee-at-node
    manifold (every state this package produces). Near-equatorial states
    (inc < 1e-9 rad) come back in the total-longitude convention: raan = 0
    and theta carrying the whole in-plane angle from the inertial x-axis.
    """
    pos, vel = s.position, s.velocity
    r = math.sqrt(float(pos @ pos))
    v2 = float(vel @ vel)
    if r <= 0.0:
        raise ValueError("state at the attractor center")
    energy_inv = 2.0 / r - v2 / g.mu
    if energy_inv <= 0.0:
        raise ValueError(f"state is not elliptic (1/a = {energy_inv})")
    a = 1.0 / energy_inv

    hx = pos[1] * vel[2] - pos[2] * vel[1]
    hy = pos[2] * vel[0] - pos[0] * vel[2]
    hz = pos[0] * vel[1] - pos[1] * vel[0]
    h = math.sqrt(hx * hx + hy * hy + hz * hz)
    if h == 0.0:
        raise ValueError("degenerate rectilinear state")
    inc = math.acos(min(1.0, max(-1.0, hz / h)))

    rv = float(pos @ vel)
    coeff = v2 / g.mu - 1.0 / r
    ex = coeff * pos[0] - (rv / g.mu) * vel[0]
    ey = coeff * pos[1] - (rv / g.mu) * vel[1]
    ez = coeff * pos[2] - (rv / g.mu) * vel[2]
    e = math.sqrt(ex * ex + ey * ey + ez * ez)
    if e >= 1.0:
        raise ValueError(f"state is not elliptic (e = {e})")

    node_mag = math.hypot(hx, hy)
    if inc < NEAR_EQUATORIAL_INC or node_mag == 0.0:
        raan = 0.0
        ref_x, ref_y, ref_z = 1.0, 0.0, 0.0
    else:
        # Ascending node direction z-hat x h, normalized.
        nx, ny = -hy / node_mag, hx / node_mag
        raan = math.atan2(ny, nx)
        ref_x, ref_y, ref_z = nx, ny, 0.0
    # Signed in-plane angle from the reference direction to the position,
    # measured along the motion (h-hat x ref gives the quadrature direction).
    cross_x = (hy * ref_z - hz * ref_y) / h
    cross_y = (hz * ref_x - hx * ref_z) / h
    cross_z = (hx * ref_y - hy * ref_x) / h
    sin_t = (cross_x * pos[0] + cross_y * pos[1] + cross_z * pos[2]) / r
    cos_t = (ref_x * pos[0] + ref_y * pos[1] + ref_z * pos[2]) / r
    theta = math.atan2(sin_t, cos_t)
    return OrbitalElements(a=a, e=e, inc=inc, raan=raan, theta=theta, epoch=s.epoch)


def propagate(el: OrbitalElements, t: float, g: GravityModel = GravityModel()) -> StateVector:
    """Keplerian state at time t >= el.epoch."""
    if t < el.epoch:
        raise ValueError(f"cannot propagate backward: t={t} < epoch={el.epoch}")
    big_e0 = _theta_to_eccentric(el.theta, el.e)
    m0 = big_e0 - el.e * np.sin(big_e0)
    m_t = wrap_angle(m0 + mean_motion(el.a, g) * (t - el.epoch))
    big_e = solve_kepler(m_t, el.e)
    theta_t = float(_eccentric_to_theta(big_e, el.e))
    return elements_to_state(replace(el, theta=theta_t, epoch=t), g)


def propagate_positions(a, e, inc, raan, theta, epoch, times,
                        g: GravityModel = GravityModel()) -> np.ndarray:
    """Positions of n orbits at T epochs, shape (T, n, 3).

    Vectorized counterpart of ``propagate`` restricted to positions; every
    operation is elementwise so results are independent of batch shape.
    """
    a = np.asarray(a, dtype=float)
    e = np.asarray(e, dtype=float)
    times = np.asarray(times, dtype=float)
    big_e0 = _theta_to_eccentric(theta, e)
    m0 = big_e0 - e * np.sin(big_e0)
    n_mean = np.sqrt(g.mu / (a * a * a))
    m_t = _wrap_fast(m0[None, :] + n_mean[None, :] * (times[:, None] - epoch))
    big_e = _solve_kepler_masked(m_t, e[None, :])
    theta_t = _eccentric_to_theta(big_e, e[None, :])

    p = a * (1.0 - e * e)
    r = p[None, :] / (1.0 + e[None, :] * np.cos(theta_t))
    cos_o, sin_o = np.cos(raan), np.sin(raan)
    cos_i, sin_i = np.cos(inc), np.sin(inc)
    px, py = cos_o, sin_o
    qx, qy, qz = -sin_o * cos_i, cos_o * cos_i, sin_i
    cos_t, sin_t = np.cos(theta_t), np.sin(theta_t)
    out = np.empty(theta_t.shape + (3,))
    out[..., 0] = r * (cos_t * px[None, :] + sin_t * qx[None, :])
    out[..., 1] = r * (cos_t * py[None, :] + sin_t * qy[None, :])
    out[..., 2] = r * (sin_t * qz[None, :])
    return out
