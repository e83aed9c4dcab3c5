"""
Pilot generation, received-snapshot synthesis with AWGN, sample covariance.

Randomness discipline: every function that draws random numbers takes either
a numpy ``Generator`` or a seed; given the same seed the output is
bit-identical. The harness derives independent sub-streams per (trial,
block, purpose) so that benchmark schemes see identical pilot and noise
realizations.
"""

from dataclasses import dataclass

import numpy as np

from .numerics import DimensionError, DomainError

PILOT_KINDS = ("random-phase", "orthogonal")


def _as_rng(seed_or_rng):
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    return np.random.default_rng(seed_or_rng)


@dataclass(frozen=True)
class PilotMatrix:
    """K x T pilot symbols; every entry of row k has modulus sqrt(powers[k])."""

    s: np.ndarray
    powers: np.ndarray

    @property
    def k(self):
        return self.s.shape[0]

    @property
    def t(self):
        return self.s.shape[1]


@dataclass(frozen=True)
class SnapshotBlock:
    """Received N x T snapshots plus everything that produced them."""

    y: np.ndarray
    pilots: PilotMatrix
    noise_power: float
    orient: object = None
    seed: object = None

    @property
    def n(self):
        return self.y.shape[0]

    @property
    def t(self):
        return self.y.shape[1]


def make_pilots(k, t, powers, seed, kind="random-phase"):
    """
    Constant-modulus pilot matrix for K users over T slots.

    ``random-phase``: i.i.d. uniform phases (default). ``orthogonal``: rows of
    a harmonic (DFT-style) matrix, mutually orthogonal when T >= K. Both
    satisfy |s_k(t)|^2 = powers[k] exactly.
    """
    if k < 1:
        raise DomainError("need at least one user")
    if t < k:
        raise DomainError(
            f"pilot length {t} below user count {k}: LS identifiability needs T >= K"
        )
    p = np.broadcast_to(np.asarray(powers, dtype=float), (k,)).copy()
    if np.any(p <= 0):
        raise DomainError("pilot powers must be positive")
    amps = np.sqrt(p)[:, None]
    if kind == "random-phase":
        rng = _as_rng(seed)
        phases = rng.uniform(0.0, 2.0 * np.pi, (k, t))
    elif kind == "orthogonal":
        phases = 2.0 * np.pi * np.outer(np.arange(k), np.arange(t)) / t
    else:
        raise DomainError(f"unknown pilot kind {kind!r}")
    return PilotMatrix(s=amps * np.exp(1j * phases), powers=p)


def receive(channels, pilots: PilotMatrix, noise_power, seed, orient=None):
    """
    Synthesize received snapshots Y = H S + N.

    ``channels`` is an (N, K) matrix (or list of K length-N vectors). Noise is
    circularly-symmetric complex Gaussian with total variance ``noise_power``
    per entry; zero noise power yields the exact noiseless product.
    """
    if isinstance(channels, (list, tuple)):
        h = np.stack([np.asarray(c, dtype=np.complex128).ravel() for c in channels], axis=1)
    else:
        h = np.asarray(channels, dtype=np.complex128)
        if h.ndim == 1:
            h = h[:, None]
    if h.shape[1] != pilots.k:
        raise DimensionError(f"channel matrix {h.shape} does not match K={pilots.k}")
    if noise_power < 0:
        raise DomainError("noise power must be non-negative")
    y = h @ pilots.s
    if noise_power > 0:
        rng = _as_rng(seed)
        n, t = y.shape
        scale = np.sqrt(noise_power / 2.0)
        noise = scale * (rng.standard_normal((n, t)) + 1j * rng.standard_normal((n, t)))
        y = y + noise
    return SnapshotBlock(y=y, pilots=pilots, noise_power=float(noise_power),
                         orient=orient, seed=seed)


def sample_covariance(block):
    """Sample covariance R = (1/T) sum_t y(t) y(t)^H, exactly Hermitian."""
    y = block.y if isinstance(block, SnapshotBlock) else np.asarray(block, dtype=np.complex128)
    if y.ndim != 2 or y.shape[1] < 1:
        raise DimensionError("need an N x T snapshot matrix with T >= 1")
    r = (y @ y.conj().T) / y.shape[1]
    return (r + r.conj().T) / 2.0
