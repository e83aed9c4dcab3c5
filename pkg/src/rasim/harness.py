"""
Scenario configuration, the alternating training protocol, benchmark schemes,
NMSE scoring and Monte-Carlo sweeps.

A training period of T_E slots is split into M equal blocks. In each block
the BS collects T_E/M pilot snapshots under the current antenna orientations,
runs orientation-aware MUSIC for the AoAs and stacked LS for the path gains,
and then (scheme permitting) re-orients the antennas for the next block.
The deliverable estimate is the final block's.

All randomness is derived from one root seed via per-(trial, block, purpose)
sub-streams, so every scheme sees identical pilot and noise draws at matching
indices (paired comparison) and reruns are bit-identical.
"""

import hashlib
import json
import math
from dataclasses import dataclass, field, asdict

import numpy as np

from . import channel as ch
from . import estimation as est
from . import optimizer as opt
from . import sigmodel as sig
from .numerics import DomainError, SingularMatrixError

SCHEMES = ("proposed", "random-orientation", "no-adjustment", "isotropic")

#: a block fails when some estimated path's receive energy sum_n G_n falls
#: below this fraction of the peak achievable N * g0 -- the LS gain for that
#: path would be noise divided by (almost) zero, i.e. junk; the worst
#: legitimate geometry (widest user seen from the flat preset) sits near 0.06
MIN_COLUMN_GAIN_RATIO = 1e-2

#: an estimate only steers the antennas when the LS residual energy is below
#: this multiple of the expected noise energy N * T * sigma^2; a larger
#: residual means the fitted angle model leaves signal unexplained, and
#: re-orienting on such CSI locks the array onto phantom directions (for
#: correct angles the ratio concentrates near 1 - K/(N*T))
RESIDUAL_GATE_FACTOR = 1.6

# sub-stream purposes within a (trial, block)
_STREAM_PILOT = 0
_STREAM_NOISE = 1
_STREAM_ORIENT = 2
_STREAM_OPT = 3


class ConfigError(ValueError):
    """Scenario configuration is invalid or contains unknown keys."""


def _rng(root_seed, *key):
    return np.random.default_rng(np.random.SeedSequence(root_seed, spawn_key=key))


def sweep_array_shape(n):
    """
    (n_x, n_y) used when sweeping the total element count: a y-axis ULA.

    The array-size sweep runs in the single-plane mode where only the
    elevation varies, and the y-axis phase (proportional to sin of the
    elevation) is the one that resolves it; putting every element on that
    axis maximizes angular resolution per element. A square split would
    leave K=3 sources unresolvable at the smallest sizes.
    """
    if n < 1:
        raise ConfigError(f"invalid array size {n}")
    return (1, n)


@dataclass(frozen=True)
class OptimizerSettings:
    step: float = None
    max_iters: int = 100
    tol: float = 1e-9
    restarts: int = 7
    mode: str = "broadcast"
    rule: str = "paper"

    def to_opt_config(self):
        return opt.OptimizerConfig(step=self.step, max_iters=self.max_iters,
                                   tol=self.tol, restarts=self.restarts)


@dataclass(frozen=True)
class ScenarioConfig:
    """Complete description of one simulated scenario (angles in radians)."""

    users: tuple
    n_x: int = 4
    n_y: int = 4
    wavelength: float = 0.125
    spacing: float = None  # None -> half wavelength
    pattern_exponent: float = 4.0
    pattern_gain: float = None  # None -> power-conserving 2(2p+1)
    theta_max: float = math.pi / 6
    t_e: int = 60
    m_blocks: int = 6
    grid: est.GridSpec = field(default_factory=est.GridSpec)
    snr_db: tuple = (-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0)
    snr_fixed_db: float = 5.0
    n_values: tuple = (4, 8, 16, 36, 64)
    trials: int = 200
    seed: int = 0
    convention: str = "standard-spherical"
    snr_reference: str = "received"  # "received": SNR vs mean per-path pilot power at the array
    schemes: tuple = SCHEMES
    pilot_kind: str = "random-phase"
    exact_covariance: bool = False
    accumulate_covariance: bool = False
    optimizer: OptimizerSettings = field(default_factory=OptimizerSettings)

    def __post_init__(self):
        users = tuple(sorted(self.users, key=lambda u: u.elevation))
        if len(users) == 0:
            raise ConfigError("at least one user is required")
        object.__setattr__(self, "users", users)
        object.__setattr__(self, "snr_db", tuple(float(s) for s in self.snr_db))
        object.__setattr__(self, "n_values", tuple(int(n) for n in self.n_values))
        object.__setattr__(self, "schemes", tuple(self.schemes))
        for s in self.schemes:
            if s not in SCHEMES:
                raise ConfigError(f"unknown scheme {s!r}")
        if self.convention not in ch.CONVENTIONS:
            raise ConfigError(f"unknown convention {self.convention!r}")
        if self.snr_reference not in ("received", "transmit"):
            raise ConfigError(f"unknown SNR reference {self.snr_reference!r}")
        if self.pilot_kind not in sig.PILOT_KINDS:
            raise ConfigError(f"unknown pilot kind {self.pilot_kind!r}")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.m_blocks < 1 or self.t_e % self.m_blocks != 0:
            raise ConfigError(
                f"training length {self.t_e} must divide into {self.m_blocks} equal blocks"
            )
        if self.t_block < self.k:
            raise ConfigError(
                f"per-block pilot length {self.t_block} below user count {self.k}"
            )

    @property
    def k(self):
        return len(self.users)

    @property
    def t_block(self):
        return self.t_e // self.m_blocks

    def array_config(self, n_override=None):
        if n_override is None:
            nx, ny = self.n_x, self.n_y
        else:
            nx, ny = sweep_array_shape(n_override)
        return ch.ArrayConfig(n_x=nx, n_y=ny, wavelength=self.wavelength, d=self.spacing)

    def pattern(self, scheme="proposed"):
        if scheme == "isotropic":
            return ch.GainPattern.isotropic()
        if self.pattern_gain is None:
            return ch.GainPattern.default(self.pattern_exponent)
        return ch.GainPattern(p=self.pattern_exponent, g0=self.pattern_gain)

    @property
    def powers(self):
        return np.array([u.power for u in self.users])

    @property
    def mean_power(self):
        return float(np.mean(self.powers))

    def noise_power(self, snr_db):
        """
        Noise variance for a nominal SNR. The default reference is the mean
        received single-path pilot power p_k |beta_k|^2 (directional gain
        excluded), which keeps the nominal SNR meaningful regardless of the
        user distances; ``transmit`` uses the raw transmit power instead.
        """
        if self.snr_reference == "received":
            ref = float(np.mean([
                u.power * abs(ch.path_gain(u, self.wavelength)) ** 2
                for u in self.users
            ]))
        else:
            ref = self.mean_power
        return ref / 10.0 ** (snr_db / 10.0)

    def true_eta(self, acfg=None):
        """(K, N) environment-only CSI: beta_k times the array response."""
        acfg = acfg or self.array_config()
        eta = np.empty((self.k, acfg.n), dtype=np.complex128)
        for i, u in enumerate(self.users):
            beta = ch.path_gain(u, acfg.wavelength)
            eta[i] = beta * ch.array_response(u.elevation, u.azimuth, acfg)
        return eta

    def to_dict(self):
        d = {
            "array": {"n_x": self.n_x, "n_y": self.n_y,
                      "wavelength_m": self.wavelength,
                      "spacing_m": self.spacing},
            "users": [
                {"r_m": u.r, "elevation_deg": math.degrees(u.elevation),
                 "azimuth_deg": math.degrees(u.azimuth), "power": u.power}
                for u in self.users
            ],
            "pattern": {"p": self.pattern_exponent,
                        "g0": "auto" if self.pattern_gain is None else self.pattern_gain},
            "theta_max_deg": math.degrees(self.theta_max),
            "training": {"t_e": self.t_e, "m_blocks": self.m_blocks},
            "grid": {
                "theta_start_deg": math.degrees(self.grid.theta_start),
                "theta_stop_deg": math.degrees(self.grid.theta_stop),
                "theta_step_deg": math.degrees(self.grid.theta_step),
                "phi_start_deg": math.degrees(self.grid.phi_start),
                "phi_stop_deg": math.degrees(self.grid.phi_stop),
                "phi_step_deg": math.degrees(self.grid.phi_step),
            },
            "snr_db": list(self.snr_db),
            "snr_fixed_db": self.snr_fixed_db,
            "n_values": list(self.n_values),
            "trials": self.trials,
            "seed": self.seed,
            "convention": self.convention,
            "snr_reference": self.snr_reference,
            "schemes": list(self.schemes),
            "pilot_kind": self.pilot_kind,
            "exact_covariance": self.exact_covariance,
            "accumulate_covariance": self.accumulate_covariance,
            "optimizer": asdict(self.optimizer),
        }
        return d

    def config_hash(self):
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _require_keys(d, allowed, context):
    unknown = set(d) - set(allowed)
    if unknown:
        raise ConfigError(f"unknown keys in {context}: {sorted(unknown)}")


def config_from_dict(raw):
    """
    Build a ScenarioConfig from a parsed config document. Angles are given in
    degrees in the document; unknown keys anywhere are errors.
    """
    if not isinstance(raw, dict):
        raise ConfigError("config document must be a mapping")
    _require_keys(raw, {"array", "users", "pattern", "theta_max_deg", "training",
                        "grid", "snr_db", "snr_fixed_db", "n_values", "trials",
                        "seed", "convention", "snr_reference", "schemes", "pilot_kind",
                        "exact_covariance", "accumulate_covariance", "optimizer"},
                  "config")
    kwargs = {}

    arr = raw.get("array", {})
    _require_keys(arr, {"n_x", "n_y", "wavelength_m", "spacing_m"}, "array")
    for src, dst in (("n_x", "n_x"), ("n_y", "n_y"),
                     ("wavelength_m", "wavelength"), ("spacing_m", "spacing")):
        if src in arr and arr[src] is not None:
            kwargs[dst] = arr[src]

    if "users" not in raw:
        raise ConfigError("config must list users")
    users = []
    for i, u in enumerate(raw["users"]):
        _require_keys(u, {"r_m", "elevation_deg", "azimuth_deg", "power"}, f"users[{i}]")
        users.append(ch.UserGeometry(
            r=float(u.get("r_m", 100.0)),
            elevation=math.radians(float(u["elevation_deg"])),
            azimuth=math.radians(float(u.get("azimuth_deg", 0.0))),
            power=float(u.get("power", 1.0)),
        ))
    kwargs["users"] = tuple(users)

    pat = raw.get("pattern", {})
    _require_keys(pat, {"p", "g0"}, "pattern")
    if "p" in pat:
        kwargs["pattern_exponent"] = float(pat["p"])
    if "g0" in pat and pat["g0"] != "auto":
        kwargs["pattern_gain"] = float(pat["g0"])

    if "theta_max_deg" in raw:
        kwargs["theta_max"] = math.radians(float(raw["theta_max_deg"]))

    tr = raw.get("training", {})
    _require_keys(tr, {"t_e", "m_blocks"}, "training")
    if "t_e" in tr:
        kwargs["t_e"] = int(tr["t_e"])
    if "m_blocks" in tr:
        kwargs["m_blocks"] = int(tr["m_blocks"])

    if "grid" in raw:
        g = raw["grid"]
        _require_keys(g, {"theta_start_deg", "theta_stop_deg", "theta_step_deg",
                          "phi_start_deg", "phi_stop_deg", "phi_step_deg"}, "grid")
        defaults = est.GridSpec()
        kwargs["grid"] = est.GridSpec(
            theta_start=math.radians(g.get("theta_start_deg", math.degrees(defaults.theta_start))),
            theta_stop=math.radians(g.get("theta_stop_deg", math.degrees(defaults.theta_stop))),
            theta_step=math.radians(g.get("theta_step_deg", math.degrees(defaults.theta_step))),
            phi_start=math.radians(g.get("phi_start_deg", 0.0)),
            phi_stop=math.radians(g.get("phi_stop_deg", 0.0)),
            phi_step=math.radians(g.get("phi_step_deg", 0.1)),
        )

    for key in ("snr_db", "snr_fixed_db", "n_values", "trials", "seed", "convention",
                "snr_reference", "pilot_kind", "exact_covariance", "accumulate_covariance"):
        if key in raw:
            kwargs[key] = raw[key]
    if "schemes" in raw:
        s = raw["schemes"]
        kwargs["schemes"] = SCHEMES if s == "all" else tuple(s)
    if "optimizer" in raw:
        o = raw["optimizer"]
        _require_keys(o, {"step", "max_iters", "tol", "restarts", "mode", "rule"},
                      "optimizer")
        kwargs["optimizer"] = OptimizerSettings(**o)

    return ScenarioConfig(**kwargs)


@dataclass(frozen=True)
class BlockTrace:
    """What happened in one training block."""

    index: int
    orient: ch.OrientationMatrix
    estimate: est.ChannelEstimate
    failed: bool
    degraded: bool
    reliable: bool
    residual_ratio: float = math.inf  # LS residual over expected noise energy


@dataclass(frozen=True)
class TrainingResult:
    """Outcome of one full training period for one scheme."""

    scheme: str
    estimate: est.ChannelEstimate
    orient: ch.OrientationMatrix
    blocks: tuple
    failed: bool
    spectrum: est.SpectrumGrid = None


def run_training_period(cfg: ScenarioConfig, scheme, noise_power, trial=0,
                        seed=None, n_override=None, collect_spectrum=False):
    """
    Run the M-block alternating estimate/adjust protocol for one scheme.

    Returns the final block's channel estimate together with the per-block
    trace. A block fails on a singular LS system or degraded (unresolvable)
    peaks; the trial counts as failed when the final block fails.
    """
    if scheme not in SCHEMES:
        raise ConfigError(f"unknown scheme {scheme!r}")
    root = cfg.seed if seed is None else seed
    acfg = cfg.array_config(n_override)
    pattern = cfg.pattern(scheme)
    k = cfg.k
    if acfg.n <= k:
        raise ConfigError(f"array size {acfg.n} must exceed user count {k}")
    orient = ch.OrientationMatrix.zeros(acfg.n)
    opt_cfg = cfg.optimizer.to_opt_config()

    blocks = []
    cov_sum = None
    final_spectrum = None
    scan_idx = 0
    had_reliable = False
    for m in range(1, cfg.m_blocks + 1):
        pilots = sig.make_pilots(k, cfg.t_block, cfg.powers,
                                 _rng(root, trial, m, _STREAM_PILOT), cfg.pilot_kind)
        h = ch.channel_matrix(cfg.users, orient, pattern, acfg, cfg.convention)
        block = sig.receive(h, pilots, noise_power,
                            _rng(root, trial, m, _STREAM_NOISE), orient)
        if cfg.exact_covariance:
            r = h @ np.diag(cfg.powers.astype(np.complex128)) @ h.conj().T \
                + noise_power * np.eye(acfg.n)
        else:
            r = sig.sample_covariance(block)
            if cfg.accumulate_covariance:
                cov_sum = r if cov_sum is None else cov_sum + r
                r = cov_sum / m

        failed = False
        degraded = False
        reliable = False
        estimate = None
        spectrum = None
        ratio = math.inf
        try:
            split = est.subspace_split(r, k)
            spectrum = est.music_spectrum(split, orient, pattern, acfg,
                                          cfg.grid, cfg.convention)
            aoa = est.estimate_aoas(spectrum, k)
            degraded = aoa.degraded
            x = est.build_design_matrix(aoa.aoas, orient, pattern, acfg, pilots,
                                        cfg.convention)
            col_energy = np.sum(np.abs(x) ** 2, axis=0) / cfg.t_block / cfg.powers
            if np.min(col_energy) < MIN_COLUMN_GAIN_RATIO * acfg.n * pattern.g0:
                failed = True
            y_stacked = est.stack_snapshots(block.y)
            gains = est.estimate_path_gains(x, y_stacked)
            res2 = float(np.sum(np.abs(y_stacked - x @ gains) ** 2))
            noise_ref = noise_power * acfg.n * cfg.t_block
            gate = max(RESIDUAL_GATE_FACTOR * noise_ref,
                       1e-12 * float(np.sum(np.abs(y_stacked) ** 2)))
            reliable = res2 <= gate
            ratio = res2 / noise_ref if noise_ref > 0 else 0.0
            estimate = est.assemble_estimate(aoa.aoas, gains, acfg,
                                             cfg.convention, degraded)
        except SingularMatrixError:
            failed = True
        failed = failed or degraded
        reliable = reliable and not failed
        blocks.append(BlockTrace(index=m, orient=orient, estimate=estimate,
                                 failed=failed, degraded=degraded,
                                 reliable=reliable, residual_ratio=ratio))
        final_spectrum = spectrum

        if m == cfg.m_blocks:
            break
        # scheme-dependent orientation update for the next block
        if scheme == "proposed":
            if estimate is not None and reliable:
                problem = opt.OrientationProblem.from_estimate(
                    estimate, pattern, cfg.theta_max, cfg.convention)
                sol = opt.optimize_all(problem, opt_cfg, orient,
                                       seed=_rng(root, trial, m, _STREAM_OPT),
                                       mode=cfg.optimizer.mode,
                                       rule=cfg.optimizer.rule)
                orient = sol.orient
                had_reliable = True
            elif not had_reliable:
                # the fit left signal unexplained, so steering on it would
                # lock onto phantom directions; scan a fresh perspective
                # instead: full tilt, azimuth advancing a quarter turn per
                # unreliable block
                orient = ch.OrientationMatrix.broadcast(
                    ch.DeflectionAngles(cfg.theta_max,
                                        math.radians(90.0 * scan_idx)),
                    acfg.n)
                scan_idx += 1
            # after a reliable fit has steered the array once, an unreliable
            # block just keeps the current orientation
        elif scheme == "random-orientation":
            orient = ch.OrientationMatrix.uniform_random(
                acfg.n, cfg.theta_max, _rng(root, trial, m, _STREAM_ORIENT))
        # no-adjustment and isotropic keep the zero orientation

    # deliver the most recent estimate that passed the residual check (later
    # blocks have the better geometry); when none did, fall back to the
    # non-failed block whose fit best explains its own data -- the residual
    # ratio is truth-free and rank-orders fit quality sharply
    last = blocks[-1]
    best = next((b for b in reversed(blocks) if b.reliable), None)
    if best is None:
        candidates = [b for b in blocks if not b.failed and b.estimate is not None]
        best = min(candidates, key=lambda b: b.residual_ratio) if candidates else last
    return TrainingResult(
        scheme=scheme,
        estimate=best.estimate,
        orient=last.orient,
        blocks=tuple(blocks),
        failed=best.failed,
        spectrum=final_spectrum if collect_spectrum else None,
    )


def nmse(true_eta, estimate: est.ChannelEstimate):
    """Single-trial NMSE: sum_k ||eta_k - eta_hat_k||^2 / sum_k ||eta_k||^2."""
    true_eta = np.asarray(true_eta)
    denom = float(np.sum(np.abs(true_eta) ** 2))
    if denom <= 0:
        raise DomainError("true CSI has zero norm")
    eta_hat = estimate.eta if isinstance(estimate, est.ChannelEstimate) else np.asarray(estimate)
    if eta_hat.shape != true_eta.shape:
        raise DomainError(f"shape mismatch {eta_hat.shape} vs {true_eta.shape}")
    return float(np.sum(np.abs(true_eta - eta_hat) ** 2)) / denom


@dataclass(frozen=True)
class NMSEReport:
    """Aggregated sweep results, one row per (scheme, sweep point)."""

    sweep: str  # "snr_db" or "n"
    rows: tuple  # dicts: scheme, value, mean_nmse, stderr, trials, failures
    config_hash: str
    seed: int

    def to_csv(self):
        lines = [f"scheme,{self.sweep},mean_nmse,stderr,trials,failures"]
        for r in self.rows:
            mean = "" if r["mean_nmse"] is None else format(r["mean_nmse"], ".10e")
            serr = "" if r["stderr"] is None else format(r["stderr"], ".10e")
            lines.append(f'{r["scheme"]},{r["value"]:g},{mean},{serr},'
                         f'{r["trials"]},{r["failures"]}')
        return "\n".join(lines) + "\n"

    def to_json(self):
        doc = {"sweep": self.sweep, "config_hash": self.config_hash,
               "seed": self.seed, "rows": list(self.rows)}
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _aggregate(values, failures, scheme, point):
    n = len(values)
    if n == 0:
        return {"scheme": scheme, "value": point, "mean_nmse": None,
                "stderr": None, "trials": 0, "failures": failures}
    arr = np.array(values)
    mean = float(np.mean(arr))
    stderr = float(np.std(arr, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return {"scheme": scheme, "value": point, "mean_nmse": mean,
            "stderr": stderr, "trials": n, "failures": failures}


def run_snr_sweep(cfg: ScenarioConfig):
    """NMSE of every configured scheme across the configured SNR points."""
    true_eta = cfg.true_eta()
    rows = []
    for snr in cfg.snr_db:
        noise = cfg.noise_power(snr)
        for scheme in cfg.schemes:
            values, fails = [], 0
            for trial in range(cfg.trials):
                res = run_training_period(cfg, scheme, noise, trial=trial)
                if res.failed or res.estimate is None:
                    fails += 1
                else:
                    values.append(nmse(true_eta, res.estimate))
            rows.append(_aggregate(values, fails, scheme, snr))
    return NMSEReport(sweep="snr_db", rows=tuple(rows),
                      config_hash=cfg.config_hash(), seed=cfg.seed)


def run_n_sweep(cfg: ScenarioConfig):
    """NMSE of every scheme across array sizes at the fixed SNR."""
    noise = cfg.noise_power(cfg.snr_fixed_db)
    rows = []
    for n in cfg.n_values:
        acfg = cfg.array_config(n)
        true_eta = cfg.true_eta(acfg)
        for scheme in cfg.schemes:
            values, fails = [], 0
            for trial in range(cfg.trials):
                res = run_training_period(cfg, scheme, noise, trial=trial, n_override=n)
                if res.failed or res.estimate is None:
                    fails += 1
                else:
                    values.append(nmse(true_eta, res.estimate))
            rows.append(_aggregate(values, fails, scheme, n))
    return NMSEReport(sweep="n", rows=tuple(rows),
                      config_hash=cfg.config_hash(), seed=cfg.seed)


@dataclass(frozen=True)
class SpectrumTable:
    """Trial-averaged, peak-normalized pseudo-spectra (dB) per scheme."""

    thetas_deg: np.ndarray
    values_db: dict  # scheme -> array
    config_hash: str
    seed: int

    def to_csv(self):
        schemes = list(self.values_db)
        lines = ["angle_deg," + ",".join(schemes)]
        for i, ang in enumerate(self.thetas_deg):
            vals = ",".join(format(self.values_db[s][i], ".6f") for s in schemes)
            lines.append(f"{ang:.4f},{vals}")
        return "\n".join(lines) + "\n"

    def to_json(self):
        doc = {"config_hash": self.config_hash, "seed": self.seed,
               "angle_deg": [round(a, 6) for a in self.thetas_deg.tolist()],
               "values_db": {s: [float(format(v, '.6f')) for v in arr]
                             for s, arr in self.values_db.items()}}
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def emit_spectrum(cfg: ScenarioConfig, schemes=None, trials=None):
    """
    Average the final-block pseudo-spectrum over trials for each scheme at the
    fixed SNR and normalize the peak to 0 dB. Requires the 1-D grid mode.
    """
    if cfg.grid.phis().shape[0] != 1:
        raise ConfigError("spectrum emission requires the 1-D grid mode")
    schemes = tuple(schemes) if schemes else cfg.schemes
    trials = cfg.trials if trials is None else trials
    noise = cfg.noise_power(cfg.snr_fixed_db)
    thetas_deg = np.degrees(cfg.grid.thetas())
    out = {}
    for scheme in schemes:
        acc = np.zeros(thetas_deg.shape[0])
        count = 0
        for trial in range(trials):
            res = run_training_period(cfg, scheme, noise, trial=trial,
                                      collect_spectrum=True)
            if res.spectrum is not None:
                acc += res.spectrum.values_1d()
                count += 1
        if count == 0:
            raise ConfigError(f"no spectra produced for scheme {scheme!r}")
        avg = acc / count
        out[scheme] = 10.0 * np.log10(np.maximum(avg, 1e-300) / np.max(avg))
    return SpectrumTable(thetas_deg=thetas_deg, values_db=out,
                         config_hash=cfg.config_hash(), seed=cfg.seed)


def top_peaks(values, k):
    """Indices of the k largest strict local maxima of a 1-D series."""
    v = np.asarray(values)
    idx = [i for i in range(1, v.shape[0] - 1) if v[i] > v[i - 1] and v[i] > v[i + 1]]
    idx.sort(key=lambda i: v[i], reverse=True)
    return idx[:k]


def half_power_width(thetas_deg, values_db, peak_idx, drop_db=3.0):
    """
    Width (degrees) of a peak at ``drop_db`` below its own level, with linear
    interpolation at the crossings; runs to the grid edge if never crossed.
    """
    v = np.asarray(values_db)
    t = np.asarray(thetas_deg)
    level = v[peak_idx] - drop_db

    def cross(direction):
        i = peak_idx
        while 0 < i + direction < v.shape[0] - 1 and v[i + direction] > level:
            i += direction
        j = i + direction
        if v[j] > level:
            return t[j]
        frac = (v[i] - level) / (v[i] - v[j])
        return t[i] + frac * (t[j] - t[i])

    return float(cross(+1) - cross(-1))
