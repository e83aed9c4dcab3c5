"""
Orientation-aware MUSIC direction finding and stacked least-squares path gains.

The pseudo-spectrum replaces the classical steering vector by
b(el, az) = g(orient; el, az) hadamard a(el, az), i.e. the candidate steering
vector is weighted by the directional amplitude of the current antenna
orientations toward the scanned direction. With an isotropic pattern this
reduces exactly to classical MUSIC.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import channel as ch
from . import numerics

#: denominator floor of the pseudo-spectrum (caps values at 1e12)
SPECTRUM_DENOM_FLOOR = 1e-12
#: squared-norm threshold below which a candidate steering vector counts as null
NULL_STEERING_TOL = 1e-24


class ConfigurationError(ValueError):
    """Estimation parameters are inconsistent (e.g. k >= N)."""


@dataclass(frozen=True)
class SubspaceSplit:
    """Signal/noise eigenvector bases of a covariance matrix."""

    signal_basis: np.ndarray
    noise_basis: np.ndarray
    eigenvalues: np.ndarray


@dataclass(frozen=True)
class GridSpec:
    """
    Search grid over candidate directions, in radians.

    The default is the 1-D sweep used throughout: elevation from -pi/2 to
    pi/2 in 0.1 degree steps with azimuth fixed at 0. A 2-D grid is obtained
    by giving the azimuth axis more than one point.
    """

    theta_start: float = -math.pi / 2
    theta_stop: float = math.pi / 2
    theta_step: float = math.radians(0.1)
    phi_start: float = 0.0
    phi_stop: float = 0.0
    phi_step: float = math.radians(0.1)

    def thetas(self):
        n = int(round((self.theta_stop - self.theta_start) / self.theta_step)) + 1
        return self.theta_start + self.theta_step * np.arange(n)

    def phis(self):
        if self.phi_stop <= self.phi_start:
            return np.array([self.phi_start])
        n = int(round((self.phi_stop - self.phi_start) / self.phi_step)) + 1
        return self.phi_start + self.phi_step * np.arange(n)


@dataclass(frozen=True)
class SpectrumGrid:
    """
    Pseudo-spectrum over a (theta, phi) grid.

    ``values`` is the raw score 1 / (b^H En En^H b). ``norm_values`` scores
    the unit-normalized candidate, ||b||^2 / (b^H En En^H b); peak picking
    and spectrum emission use it because the raw score is inflated wherever
    the directional envelope drives ||b|| toward zero, which would rank
    no-signal directions above genuine sources.
    """

    thetas: np.ndarray
    phis: np.ndarray
    values: np.ndarray       # shape (len(thetas), len(phis))
    norm_values: np.ndarray
    null_flags: np.ndarray

    @property
    def is_1d(self):
        return self.phis.shape[0] == 1

    def values_1d(self, normalized=True):
        if not self.is_1d:
            raise ConfigurationError("spectrum grid is 2-D")
        return (self.norm_values if normalized else self.values)[:, 0]


@dataclass(frozen=True)
class AoaEstimate:
    """Top-K direction estimates, sorted ascending by elevation."""

    aoas: np.ndarray  # (K, 2): elevation, azimuth
    degraded: bool = False


@dataclass(frozen=True)
class ChannelEstimate:
    """Estimated AoAs, complex path gains, and environment-only CSI vectors."""

    aoas: np.ndarray   # (K, 2)
    gains: np.ndarray  # (K,)
    eta: np.ndarray    # (K, N)
    degraded: bool = False


def subspace_split(r, k):
    """Split the covariance eigenbasis into the leading-k signal part and the rest."""
    decomp = numerics.hermitian_eig(r)
    n = decomp.eigenvectors.shape[0]
    if not 1 <= k < n:
        raise ConfigurationError(f"source count k={k} must satisfy 1 <= k < N={n}")
    return SubspaceSplit(
        signal_basis=decomp.eigenvectors[:, :k],
        noise_basis=decomp.eigenvectors[:, k:],
        eigenvalues=decomp.eigenvalues,
    )


def candidate_steering(orient, pattern, cfg, thetas, phis, convention="standard-spherical"):
    """(N, L) candidate vectors b = g hadamard a over the flattened grid."""
    tt, pp = np.meshgrid(thetas, phis, indexing="ij")
    el = tt.ravel()
    az = pp.ravel()
    a = ch.array_response_grid(el, az, cfg)
    q = ch.direction_from_angles(el, az, convention)
    g = ch.radiation_matrix(orient, q, pattern)
    return g * a


def music_spectrum(split: SubspaceSplit, orient, pattern, cfg, grid: GridSpec,
                   convention="standard-spherical"):
    """
    Orientation-aware MUSIC pseudo-spectrum 1 / (b^H En En^H b).

    Values are capped at ``1/SPECTRUM_DENOM_FLOOR``. Grid points whose
    candidate steering vector is numerically zero (all boresights facing away)
    report value 0 with the null flag set instead of dividing 0 by 0.
    """
    if split.noise_basis.shape[1] < 1:
        raise ConfigurationError("noise subspace is empty")
    thetas = grid.thetas()
    phis = grid.phis()
    b = candidate_steering(orient, pattern, cfg, thetas, phis, convention)
    bnorm2 = np.sum(np.abs(b) ** 2, axis=0)
    null = bnorm2 < NULL_STEERING_TOL
    proj = split.noise_basis.conj().T @ b
    denom = np.sum(np.abs(proj) ** 2, axis=0)
    values = 1.0 / np.maximum(denom, SPECTRUM_DENOM_FLOOR)
    with np.errstate(invalid="ignore", divide="ignore"):
        norm_values = bnorm2 / np.maximum(denom, SPECTRUM_DENOM_FLOOR * bnorm2)
    values[null] = 0.0
    norm_values[null] = 0.0
    shape = (thetas.shape[0], phis.shape[0])
    return SpectrumGrid(thetas=thetas, phis=phis,
                        values=values.reshape(shape),
                        norm_values=norm_values.reshape(shape),
                        null_flags=null.reshape(shape))


def _quadratic_offset(y_left, y_center, y_right):
    """Sub-grid vertex offset in [-0.5, 0.5] from a three-point parabola fit."""
    denom = y_left - 2.0 * y_center + y_right
    if denom >= 0.0:
        return 0.0
    return float(np.clip(0.5 * (y_left - y_right) / denom, -0.5, 0.5))


def _local_maxima(values):
    """
    Indices of strict local maxima over immediate axis neighbors. Grid
    boundary points are excluded: a one-sided comparison cannot establish a
    peak, and scan-edge artifacts would otherwise masquerade as sources.
    """
    v = values
    nt, np_ = v.shape
    mask = np.ones_like(v, dtype=bool)
    if nt > 1:
        mask[0, :] = mask[-1, :] = False
        mask[1:-1, :] &= (v[1:-1, :] > v[:-2, :]) & (v[1:-1, :] > v[2:, :])
    if np_ > 1:
        mask[:, 0] = mask[:, -1] = False
        mask[:, 1:-1] &= (v[:, 1:-1] > v[:, :-2]) & (v[:, 1:-1] > v[:, 2:])
    return np.argwhere(mask)


def estimate_aoas(spectrum: SpectrumGrid, k):
    """
    Pick the k largest strict local maxima of the pseudo-spectrum, refine each
    by one quadratic interpolation step per axis, and return them sorted
    ascending by elevation.

    If fewer than k local maxima exist the k largest grid values are returned
    with the ``degraded`` diagnostic set (unresolved sources, not a crash).

    Peaks are detected and ranked on the normalized score so that directions
    with a vanishing candidate norm cannot outrank genuine sources.
    """
    v = spectrum.norm_values
    peaks = _local_maxima(v)
    degraded = peaks.shape[0] < k
    if degraded:
        flat = np.argsort(v.ravel())[::-1][:k]
        peaks = np.stack(np.unravel_index(flat, v.shape), axis=1)
    else:
        order = np.argsort(v[peaks[:, 0], peaks[:, 1]])[::-1][:k]
        peaks = peaks[order]

    aoas = np.empty((k, 2))
    for i, (it, ip) in enumerate(peaks):
        theta = spectrum.thetas[it]
        phi = spectrum.phis[ip]
        if not degraded:
            if 0 < it < v.shape[0] - 1:
                off = _quadratic_offset(v[it - 1, ip], v[it, ip], v[it + 1, ip])
                theta = spectrum.thetas[it] + off * (spectrum.thetas[1] - spectrum.thetas[0])
            if 0 < ip < v.shape[1] - 1:
                off = _quadratic_offset(v[it, ip - 1], v[it, ip], v[it, ip + 1])
                phi = spectrum.phis[ip] + off * (spectrum.phis[1] - spectrum.phis[0])
        aoas[i] = (theta, phi)
    aoas = aoas[np.argsort(aoas[:, 0])]
    return AoaEstimate(aoas=aoas, degraded=bool(degraded))


def build_design_matrix(aoas, orient, pattern, cfg, pilots,
                        convention="standard-spherical"):
    """
    Stacked LS design matrix X of shape (N*T, K): rows (t*N .. t*N+N-1) hold
    B diag(s(t)) with B = G hadamard A evaluated at the estimated directions.
    """
    aoas = np.asarray(aoas, dtype=float).reshape(-1, 2)
    k = aoas.shape[0]
    if pilots.t < k:
        raise ConfigurationError(f"pilot length {pilots.t} below source count {k}")
    if pilots.k != k:
        raise ConfigurationError(f"pilot matrix has {pilots.k} rows, expected {k}")
    a = ch.array_response_grid(aoas[:, 0], aoas[:, 1], cfg)
    q = ch.direction_from_angles(aoas[:, 0], aoas[:, 1], convention)
    g = ch.radiation_matrix(orient, q, pattern)
    b = g * a
    return (b[None, :, :] * pilots.s.T[:, None, :]).reshape(pilots.t * cfg.n, k)


def stack_snapshots(y):
    """Vectorize an N x T snapshot matrix so entry t*N + n equals Y[n, t]."""
    return np.asarray(y).T.reshape(-1)


def estimate_path_gains(x, y_stacked):
    """LS path gains (X^H X)^{-1} X^H y; exact when the true B is supplied noiselessly."""
    return numerics.least_squares(x, y_stacked)


def assemble_estimate(aoas, gains, cfg, convention="standard-spherical", degraded=False):
    """
    Bundle AoAs and gains into a ChannelEstimate with environment-only CSI
    eta_k = gain_k * a(el_k, az_k). Entries are sorted ascending by elevation
    so association with the true users is deterministic.
    """
    aoas = np.asarray(aoas, dtype=float).reshape(-1, 2)
    gains = np.asarray(gains, dtype=np.complex128).ravel()
    if aoas.shape[0] != gains.shape[0]:
        raise ConfigurationError("aoas and gains must have equal length")
    order = np.argsort(aoas[:, 0])
    aoas = aoas[order]
    gains = gains[order]
    a = ch.array_response_grid(aoas[:, 0], aoas[:, 1], cfg)
    eta = (gains[None, :] * a).T
    return ChannelEstimate(aoas=aoas, gains=gains, eta=eta, degraded=degraded)
