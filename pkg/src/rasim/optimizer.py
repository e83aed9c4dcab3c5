"""
Per-antenna projected gradient ascent over the spherical cap of feasible
boresights.

Each antenna maximizes L(f) = sum_k mu_k * max(f . q_k, 0)^(2p) subject to
||f|| = 1 and f_z >= cos(theta_max). The subproblem is identical for every
antenna, so the default execution path solves it once (with multiple
restarts) and broadcasts the winner; an independent per-antenna path exists
for cross-checking.

Back-hemisphere projections are clamped to zero in both the objective and
the gradient: an even power would otherwise credit gain to directions the
physical pattern cannot radiate toward.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .channel import OrientationMatrix
from .numerics import DomainError

BORESIGHT = np.array([0.0, 0.0, 1.0])
FEASIBILITY_TOL = 1e-9
MAX_HALVINGS = 20


@dataclass(frozen=True)
class OrientationProblem:
    """User directions, power weights mu_k = |beta_k|^2 * g0, pattern exponent, cap."""

    directions: np.ndarray  # (K, 3) unit vectors
    weights: np.ndarray     # (K,)
    p: float
    theta_max: float

    def __post_init__(self):
        q = np.atleast_2d(np.asarray(self.directions, dtype=float))
        w = np.atleast_1d(np.asarray(self.weights, dtype=float))
        if q.shape[1] != 3 or q.shape[0] != w.shape[0]:
            raise DomainError("directions must be (K, 3) matching K weights")
        if np.any(w < 0):
            raise DomainError("weights must be non-negative")
        norms = np.linalg.norm(q, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-9):
            raise DomainError("directions must be unit vectors")
        if not 0.0 <= self.theta_max <= math.pi / 2 + 1e-12:
            raise DomainError("theta_max outside [0, pi/2]")
        object.__setattr__(self, "directions", q)
        object.__setattr__(self, "weights", w)

    @classmethod
    def from_estimate(cls, estimate, pattern, theta_max, convention="standard-spherical"):
        """Build the adjustment problem from an estimated channel."""
        from .channel import direction_from_angles

        q = direction_from_angles(estimate.aoas[:, 0], estimate.aoas[:, 1], convention)
        mu = np.abs(estimate.gains) ** 2 * pattern.g0
        return cls(directions=q, weights=mu, p=pattern.p, theta_max=theta_max)


@dataclass(frozen=True)
class OptimizerConfig:
    """Ascent controls; ``step=None`` selects 0.1 / max(mu) automatically."""

    step: float = None
    max_iters: int = 100
    tol: float = 1e-9
    restarts: int = 7  # random starts in addition to the supplied initial point

    def __post_init__(self):
        if self.step is not None and self.step <= 0:
            raise DomainError("step must be positive")
        if self.tol < 0:
            raise DomainError("tol must be non-negative")


@dataclass(frozen=True)
class OrientationSolution:
    """Optimized pointing vectors with the objective trajectory of the ascent."""

    pointings: np.ndarray        # (N, 3)
    orient: OrientationMatrix
    objective: float
    iterations: int
    trajectory: np.ndarray


def objective(problem: OrientationProblem, f):
    """sum_k mu_k * clamp(f . q_k)^(2p); back-hemisphere terms contribute zero."""
    proj = np.clip(np.asarray(f, dtype=float) @ problem.directions.T, 0.0, None)
    return float(np.sum(problem.weights * proj ** (2.0 * problem.p), axis=-1))


def gradient(problem: OrientationProblem, f):
    """2p * sum_k mu_k * clamp(f . q_k)^(2p-1) * q_k (zero for p = 0)."""
    if problem.p == 0:
        return np.zeros(3)
    proj = np.clip(np.asarray(f, dtype=float) @ problem.directions.T, 0.0, None)
    coeff = 2.0 * problem.p * problem.weights * proj ** (2.0 * problem.p - 1.0)
    return coeff @ problem.directions


def project_feasible(f, theta_max, rule="paper"):
    """
    Project a raw ascent iterate back onto the feasible cap.

    ``paper`` first applies the subtract-then-normalize rule (shift along the
    boresight axis, renormalize); if that still violates the cap it falls
    through to ``exact``, which normalizes and clamps the zenith angle to
    theta_max while preserving azimuth. Either way the result is a unit
    vector inside the cap (within 1e-9).
    """
    f = np.asarray(f, dtype=float).ravel()
    norm = np.linalg.norm(f)
    if norm < 1e-12:
        warnings.warn("degenerate pointing input; returning boresight", RuntimeWarning)
        return BORESIGHT.copy()
    cap = math.cos(theta_max)
    if rule == "paper":
        g = f
        if f @ BORESIGHT < cap:
            g = f - (f @ BORESIGHT - cap) * BORESIGHT
        g = g / np.linalg.norm(g)
        if g[2] >= cap - FEASIBILITY_TOL:
            return g
        # paper rule overshot the cap; fall through to the exact clamp
        f = g
        rule = "exact"
    if rule != "exact":
        raise DomainError(f"unknown projection rule {rule!r}")
    g = f / np.linalg.norm(f)
    if g[2] < cap:
        rho = math.hypot(g[0], g[1])
        az = math.atan2(g[1], g[0]) if rho > 1e-15 else 0.0
        s = math.sin(theta_max)
        g = np.array([s * math.cos(az), s * math.sin(az), cap])
    return g


def _auto_step(problem):
    mu_max = float(np.max(problem.weights)) if problem.weights.size else 0.0
    return 0.1 / mu_max if mu_max > 0 else 0.1


@dataclass(frozen=True)
class _SingleRun:
    f: np.ndarray
    objective: float
    iterations: int
    trajectory: np.ndarray


def optimize_antenna(problem: OrientationProblem, cfg: OptimizerConfig, f0,
                     rule="paper"):
    """
    Projected gradient ascent from a single feasible start.

    Each step is f <- project(f + xi * grad); whenever the projected step
    fails to increase the objective, xi is halved (up to MAX_HALVINGS times,
    then the ascent stops). The returned objective is never below the
    starting one and the trajectory is non-decreasing.
    """
    f = project_feasible(np.asarray(f0, dtype=float), problem.theta_max, "exact")
    obj = objective(problem, f)
    traj = [obj]
    xi = cfg.step if cfg.step is not None else _auto_step(problem)
    iters = 0
    for _ in range(cfg.max_iters):
        g = gradient(problem, f)
        step = xi
        accepted = False
        for _ in range(MAX_HALVINGS + 1):
            cand = project_feasible(f + step * g, problem.theta_max, rule)
            cand_obj = objective(problem, cand)
            if cand_obj > obj:
                accepted = True
                break
            step /= 2.0
        if not accepted:
            break
        gain = cand_obj - obj
        f, obj = cand, cand_obj
        traj.append(obj)
        iters += 1
        if gain <= cfg.tol * max(abs(obj), 1.0e-300):
            break
    return _SingleRun(f=f, objective=obj, iterations=iters, trajectory=np.array(traj))


def _random_feasible(theta_max, rng):
    z = rng.uniform(0.0, theta_max)
    a = rng.uniform(0.0, 2.0 * math.pi)
    return np.array([math.sin(z) * math.cos(a), math.sin(z) * math.sin(a), math.cos(z)])


def _best_restart(problem, cfg, f0, rng, rule):
    # deterministic starts: the supplied point plus each user direction
    # projected onto the cap (boundary optima are exactly such projections,
    # and with large p the per-user basins are narrow)
    starts = [np.asarray(f0, dtype=float)]
    for q in problem.directions:
        if q[2] > 0.0:
            starts.append(project_feasible(q, problem.theta_max, "exact"))
    runs = [optimize_antenna(problem, cfg, s, rule) for s in starts]
    for _ in range(cfg.restarts):
        runs.append(optimize_antenna(problem, cfg, _random_feasible(problem.theta_max, rng), rule))
    return max(runs, key=lambda r: r.objective)


def _angles_from_pointings(f):
    zen = np.arccos(np.clip(f[:, 2], -1.0, 1.0))
    az = np.mod(np.arctan2(f[:, 1], f[:, 0]), 2.0 * math.pi)
    return OrientationMatrix(zen, az)


def optimize_all(problem: OrientationProblem, cfg: OptimizerConfig,
                 orient0: OrientationMatrix, seed=None, mode="broadcast",
                 rule="paper"):
    """
    Optimize all N antennas.

    The subproblem has no antenna-specific term, so ``broadcast`` mode solves
    it once from antenna 0's initial pointing (plus random restarts) and
    assigns the winner to every antenna; ``per-antenna`` runs the ascent
    independently for each element, which is slower but serves as a
    cross-check.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    f0_all = orient0.pointing()
    n = orient0.n
    if mode == "broadcast":
        best = _best_restart(problem, cfg, f0_all[0], rng, rule)
        pointings = np.tile(best.f, (n, 1))
        total = n * best.objective
        iters = best.iterations
        traj = n * best.trajectory
    elif mode == "per-antenna":
        runs = [_best_restart(problem, cfg, f0_all[i], rng, rule) for i in range(n)]
        pointings = np.stack([r.f for r in runs])
        total = float(sum(r.objective for r in runs))
        iters = max(r.iterations for r in runs)
        longest = max(runs, key=lambda r: r.trajectory.shape[0])
        traj = n * longest.trajectory
    else:
        raise DomainError(f"unknown optimization mode {mode!r}")
    return OrientationSolution(
        pointings=pointings,
        orient=_angles_from_pointings(pointings),
        objective=total,
        iterations=iters,
        trajectory=traj,
    )
