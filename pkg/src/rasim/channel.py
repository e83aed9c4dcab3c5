"""
Array geometry, directional gain pattern, steering vectors and channel synthesis.

Conventions: all angles are radians. Antenna boresight reference is the +z
axis; a user direction is a unit 3-vector. Two direction conventions are
provided (see :func:`user_direction`), selected by a flag because the
coordinate bookkeeping differs between sources; the self-consistent
``standard-spherical`` reading (elevation measured from the z boresight)
is the default everywhere.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .numerics import DimensionError, DomainError, kron

TWO_PI = 2.0 * math.pi

#: accepted values of the direction-convention flag
CONVENTIONS = ("standard-spherical", "paper-verbatim")


def _wrap_azimuth(a):
    return float(np.mod(a, TWO_PI))


@dataclass(frozen=True)
class DeflectionAngles:
    """Zenith/azimuth deflection of a single rotatable element."""

    zenith: float
    azimuth: float

    def __post_init__(self):
        if not 0.0 <= self.zenith <= math.pi / 2 + 1e-12:
            raise DomainError(f"zenith {self.zenith} outside [0, pi/2]")
        object.__setattr__(self, "azimuth", _wrap_azimuth(self.azimuth))


@dataclass(frozen=True)
class OrientationMatrix:
    """Per-antenna deflection angles for all N elements (zenith[n], azimuth[n])."""

    zenith: np.ndarray
    azimuth: np.ndarray

    def __post_init__(self):
        z = np.atleast_1d(np.asarray(self.zenith, dtype=float))
        a = np.atleast_1d(np.asarray(self.azimuth, dtype=float))
        if z.shape != a.shape or z.ndim != 1:
            raise DimensionError("zenith and azimuth must be equal-length 1-D arrays")
        if np.any(z < -1e-12) or np.any(z > math.pi / 2 + 1e-12):
            raise DomainError("zenith angles outside [0, pi/2]")
        object.__setattr__(self, "zenith", np.clip(z, 0.0, math.pi / 2))
        object.__setattr__(self, "azimuth", np.mod(a, TWO_PI))

    @property
    def n(self):
        return self.zenith.shape[0]

    @classmethod
    def zeros(cls, n):
        """All boresights at the +z reference (fixed-antenna preset)."""
        return cls(np.zeros(n), np.zeros(n))

    @classmethod
    def broadcast(cls, angles: DeflectionAngles, n):
        return cls(np.full(n, angles.zenith), np.full(n, angles.azimuth))

    @classmethod
    def from_angle_list(cls, angles):
        return cls(
            np.array([a.zenith for a in angles]),
            np.array([a.azimuth for a in angles]),
        )

    @classmethod
    def uniform_random(cls, n, theta_max, rng):
        """Independent draws: zenith ~ U[0, theta_max], azimuth ~ U[0, 2pi)."""
        return cls(rng.uniform(0.0, theta_max, n), rng.uniform(0.0, TWO_PI, n))

    def pointing(self):
        """(N, 3) matrix of unit pointing vectors."""
        sz = np.sin(self.zenith)
        return np.stack(
            [sz * np.cos(self.azimuth), sz * np.sin(self.azimuth), np.cos(self.zenith)],
            axis=1,
        )

    def angles(self):
        return [DeflectionAngles(float(z), float(a)) for z, a in zip(self.zenith, self.azimuth)]


@dataclass(frozen=True)
class GainPattern:
    """Cosine-power directional gain: g0 * cos(eps)^(2p) in front, 0 behind."""

    p: float
    g0: float

    def __post_init__(self):
        if self.p < 0:
            raise DomainError("directivity exponent must be non-negative")
        if self.g0 <= 0:
            raise DomainError("peak gain must be positive")

    @classmethod
    def default(cls, p):
        """Power-conserving pattern with peak gain 2(2p+1)."""
        return cls(p=p, g0=2.0 * (2.0 * p + 1.0))

    @classmethod
    def isotropic(cls):
        return cls(p=0.0, g0=1.0)


@dataclass(frozen=True)
class UserGeometry:
    """Distance plus elevation/azimuth of a single-antenna user."""

    r: float
    elevation: float
    azimuth: float
    power: float = 1.0

    def __post_init__(self):
        if self.r <= 0:
            raise DomainError("distance must be positive")
        if not -math.pi / 2 - 1e-12 <= self.elevation <= math.pi / 2 + 1e-12:
            raise DomainError("elevation outside [-pi/2, pi/2]")
        if not -1e-12 <= self.azimuth <= math.pi + 1e-12:
            raise DomainError("azimuth outside [0, pi]")
        if self.power <= 0:
            raise DomainError("transmit power must be positive")


@dataclass(frozen=True)
class ArrayConfig:
    """Uniform planar array: n_x * n_y elements, spacing d, wavelength lam."""

    n_x: int
    n_y: int
    wavelength: float
    d: float = field(default=None)

    def __post_init__(self):
        if self.n_x < 1 or self.n_y < 1:
            raise DomainError("array dimensions must be >= 1")
        if self.wavelength <= 0:
            raise DomainError("wavelength must be positive")
        if self.d is None:
            object.__setattr__(self, "d", self.wavelength / 2.0)
        if self.d <= 0:
            raise DomainError("element spacing must be positive")

    @property
    def n(self):
        return self.n_x * self.n_y


def pointing_vector(angles: DeflectionAngles):
    """Unit boresight vector [sin z cos a, sin z sin a, cos z]."""
    sz = math.sin(angles.zenith)
    return np.array(
        [sz * math.cos(angles.azimuth), sz * math.sin(angles.azimuth), math.cos(angles.zenith)]
    )


def user_direction(u: UserGeometry, convention="standard-spherical"):
    """
    Unit direction vector of a user.

    ``standard-spherical``: elevation measured from the z axis,
    [sin(el)cos(az), sin(el)sin(az), cos(el)].
    ``paper-verbatim``: [sin(el)sin(az), cos(el), sin(el)cos(az)].
    """
    return direction_from_angles(u.elevation, u.azimuth, convention)


def direction_from_angles(elevation, azimuth, convention="standard-spherical"):
    """Vectorized direction construction; broadcasts over angle arrays."""
    el = np.asarray(elevation, dtype=float)
    az = np.asarray(azimuth, dtype=float)
    if convention == "standard-spherical":
        out = np.stack(
            [np.sin(el) * np.cos(az), np.sin(el) * np.sin(az), np.cos(el) * np.ones_like(az)],
            axis=-1,
        )
    elif convention == "paper-verbatim":
        out = np.stack(
            [np.sin(el) * np.sin(az), np.cos(el) * np.ones_like(az), np.sin(el) * np.cos(az)],
            axis=-1,
        )
    else:
        raise DomainError(f"unknown direction convention {convention!r}")
    return out


def steering_1d(psi, n_bar, cfg: ArrayConfig):
    """ULA steering vector: entry m is exp(j * 2 pi d / lam * m * psi)."""
    if n_bar < 1:
        raise DomainError("steering vector needs at least one element")
    m = np.arange(n_bar)
    return np.exp(1j * TWO_PI * cfg.d / cfg.wavelength * m * psi)


def array_response(elevation, azimuth, cfg: ArrayConfig):
    """
    UPA response e(cos az cos el, n_x) kron e(cos az sin el, n_y); all
    entries have unit modulus.
    """
    ex = steering_1d(math.cos(azimuth) * math.cos(elevation), cfg.n_x, cfg)
    ey = steering_1d(math.cos(azimuth) * math.sin(elevation), cfg.n_y, cfg)
    return kron(ex.reshape(-1, 1), ey.reshape(-1, 1)).ravel()


def array_response_grid(elevations, azimuths, cfg: ArrayConfig):
    """(N, L) matrix of UPA responses for L candidate (elevation, azimuth) pairs."""
    el = np.asarray(elevations, dtype=float).ravel()
    az = np.asarray(azimuths, dtype=float).ravel()
    if el.shape != az.shape:
        raise DimensionError("elevation/azimuth grids must have equal length")
    c = TWO_PI * cfg.d / cfg.wavelength
    psi_x = np.cos(az) * np.cos(el)
    psi_y = np.cos(az) * np.sin(el)
    ex = np.exp(1j * c * np.outer(np.arange(cfg.n_x), psi_x))
    ey = np.exp(1j * c * np.outer(np.arange(cfg.n_y), psi_y))
    return (ex[:, None, :] * ey[None, :, :]).reshape(cfg.n, el.shape[0])


def directional_gain(pattern: GainPattern, cos_eps):
    """
    Power gain toward a direction whose angle eps off boresight has the given
    cosine. Zero for the back hemisphere (cos eps <= 0).
    """
    c = np.asarray(cos_eps, dtype=float)
    if np.any(c < -1.0 - 1e-12) or np.any(c > 1.0 + 1e-12):
        raise DomainError("cos_eps outside [-1, 1]")
    c = np.clip(c, -1.0, 1.0)
    front = np.where(c > 0.0, c, 0.0)
    g = np.where(c > 0.0, pattern.g0 * front ** (2.0 * pattern.p), 0.0)
    if np.isscalar(cos_eps):
        return float(g)
    return g


def radiation_vector(orient: OrientationMatrix, q_hat, pattern: GainPattern):
    """Per-element amplitude coefficients sqrt(G_n) toward direction q_hat."""
    q = np.asarray(q_hat, dtype=float).ravel()
    if q.shape[0] != 3:
        raise DimensionError("direction must be a 3-vector")
    cos_eps = orient.pointing() @ q
    return np.sqrt(directional_gain(pattern, cos_eps))


def radiation_matrix(orient: OrientationMatrix, q, pattern: GainPattern):
    """(N, L) amplitude coefficients for L unit directions given as (L, 3)."""
    q = np.asarray(q, dtype=float)
    cos_eps = orient.pointing() @ q.T
    return np.sqrt(directional_gain(pattern, cos_eps))


def path_gain(u: UserGeometry, wavelength):
    """Free-space complex amplitude lam/(4 pi r) * exp(-j 2 pi r / lam)."""
    if wavelength <= 0:
        raise DomainError("wavelength must be positive")
    amp = wavelength / (4.0 * math.pi * u.r)
    phase = -TWO_PI * u.r / wavelength
    return amp * complex(math.cos(phase), math.sin(phase))


def channel_vector(u: UserGeometry, orient: OrientationMatrix, pattern: GainPattern,
                   cfg: ArrayConfig, convention="standard-spherical"):
    """Channel h = beta * g(orient) hadamard a(elevation, azimuth), length N."""
    if orient.n != cfg.n:
        raise DimensionError(f"orientation count {orient.n} != array size {cfg.n}")
    beta = path_gain(u, cfg.wavelength)
    g = radiation_vector(orient, user_direction(u, convention), pattern)
    a = array_response(u.elevation, u.azimuth, cfg)
    return beta * g * a


def channel_matrix(users, orient, pattern, cfg, convention="standard-spherical"):
    """(N, K) matrix whose columns are the per-user channel vectors."""
    return np.stack(
        [channel_vector(u, orient, pattern, cfg, convention) for u in users], axis=1
    )


def sum_channel_gain(channels):
    """Total gain sum_k ||h_k||^2 over a non-empty collection of channels."""
    if isinstance(channels, np.ndarray):
        cols = [channels[:, k] for k in range(channels.shape[1])] if channels.ndim == 2 else [channels]
    else:
        cols = list(channels)
    if len(cols) == 0:
        raise DomainError("sum channel gain of an empty set is undefined")
    return float(sum(np.sum(np.abs(np.asarray(h)) ** 2) for h in cols))
