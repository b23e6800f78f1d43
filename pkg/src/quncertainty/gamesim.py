"""Monte Carlo simulation of the uncertainty game and the parameter sweeps.

Each round Alice picks ``R`` or ``S`` with a fair coin, measures her qubit,
and announces the basis; Bob (after the feed-forward relay) measures his
qubit in the same basis. Joint coincidence counts give the measurement and
Fano estimators; the tomographic estimator comes from the true state, or
from simulated conditional tomography when ``tomography=True``.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .entropy import (
    conditional_entropy,
    ensemble_entropy,
    h_r_given_b,
    h_r_given_rb,
    joint_distribution,
    mismatch_probability,
)
from .optimize import h2, minimize_state
from .states import (
    NoiseModel,
    SchmidtParams,
    Z_BASIS,
    apply_white_noise,
    linear_basis,
    schmidt_state,
    zeta_for_tangle,
)
from .tomography import _bob_settings, ensemble_from_conditional_counts, outcome_probabilities, Setting
from .uncertainty import ENTANGLED, log_inv_c, make_report

DEFAULT_SHOTS = 20_000
DEFAULT_FIDELITY_NOISY = 0.97
FIXED_ANGLE_OMEGA = math.radians(32.5)
OMEGA_SWEEP_TANGLE = 0.47
ESTIMATORS = ("tomographic", "measurement", "fano")

# experimentally reported thresholds (tangle, error), for comparison only
REPORTED_THRESHOLDS = {
    "tomographic": (0.007, 0.003),
    "measurement": (0.06, 0.01),
    "fano": (0.13, 0.02),
}


class InvariantViolation(RuntimeError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    """One game configuration; give exactly one of ``tangle`` or ``zeta``.

    Angles are in radians. ``omega`` is the angle of ``R`` relative to
    ``S = Z``. ``fidelity`` sets the white-noise mixing ``p = (4F - 1)/3``.
    ``shots`` counts game rounds (and coincidences per Bob setting when
    ``tomography`` is on).
    """

    tangle: float = 1.0
    zeta: float = None
    theta: float = 0.0
    phi: float = 0.0
    omega: float = math.pi / 4
    fidelity: float = 1.0
    shots: int = DEFAULT_SHOTS
    seed: int = 0
    exact_counts: bool = False
    tomography: bool = False

    def __post_init__(self):
        if (self.tangle is None) == (self.zeta is None):
            raise ValueError("give exactly one of tangle or zeta")
        if self.tangle is not None and not 0.0 <= self.tangle <= 1.0:
            raise ValueError(f"tangle={self.tangle} outside [0, 1]")
        if self.zeta is not None and not 0.0 <= self.zeta <= math.pi / 2:
            raise ValueError(f"zeta={self.zeta} outside [0, pi/2]")
        if not 0.25 < self.fidelity <= 1.0:
            raise ValueError(f"fidelity={self.fidelity} outside (1/4, 1]")
        if self.shots < 1:
            raise ValueError("shots must be >= 1")

    @property
    def zeta_value(self):
        return zeta_for_tangle(self.tangle) if self.zeta is None else self.zeta

    @property
    def mixing(self):
        return NoiseModel.from_fidelity(self.fidelity).mixing

    @property
    def params(self):
        return SchmidtParams(self.zeta_value, self.theta, self.phi)

    def with_tangle(self, tangle, **kw):
        return replace(self, tangle=tangle, zeta=None, **kw)

    def state(self):
        return apply_white_noise(schmidt_state(self.params), NoiseModel(self.mixing))

    def bases(self):
        return linear_basis(self.omega, "R"), Z_BASIS


@dataclass
class GameRecord:
    """Outcome of one game.

    ``counts[b, r, rb]``: rounds with basis ``b`` (0 = R, 1 = S), Alice
    outcome ``r`` and Bob outcome ``rb``. ``tomo_counts[b]`` holds the
    conditional-tomography coincidences (6 Bob settings x 4) if simulated.
    """

    config: ExperimentConfig
    counts: np.ndarray
    q_r: float
    q_s: float
    h_r: float
    h_s: float
    report: object
    tomo_counts: np.ndarray = None

    @property
    def exact(self):
        return self.config.exact_counts


def _estimator_value(report, estimator):
    if estimator not in ESTIMATORS:
        raise ValueError(f"unknown estimator {estimator!r}; choose from {ESTIMATORS}")
    return getattr(report, f"lhs_{estimator}")


def _counts_entropies(counts):
    # counts: (2, 2, 2) -> (h_r, h_s, q_r, q_s)
    out = []
    for b in range(2):
        tot = counts[b].sum()
        if tot <= 0:
            raise ValueError("no rounds recorded for one of the bases; increase shots")
        d = counts[b] / tot
        out.append((h_r_given_rb(d), mismatch_probability(d)))
    return out[0][0], out[1][0], out[0][1], out[1][1]


def _play_rounds(rng, shots, dists):
    """Simulate individual rounds; returns ``(2, 2, 2)`` counts."""
    alice_choice = rng.integers(0, 2, size=shots)
    bob_choice = alice_choice.copy()  # feed-forward relay
    if not np.array_equal(alice_choice, bob_choice):
        raise InvariantViolation("Bob's basis differs from Alice's announced basis")
    counts = np.zeros((2, 4))
    for b in range(2):
        n = int(np.count_nonzero(alice_choice == b))
        outcomes = rng.choice(4, size=n, p=dists[b].ravel())
        counts[b] = np.bincount(outcomes, minlength=4)
    return counts.reshape(2, 2, 2)


def _tomographic_counts(rho, basis, shots, rng, exact):
    rows = []
    for bob in _bob_settings():
        p = outcome_probabilities(rho, Setting(basis, bob, ""))
        rows.append(shots * p if exact else rng.multinomial(shots, p))
    return np.array(rows, dtype=float)


def tomographic_lhs(tomo_counts):
    bob = _bob_settings()
    return sum(ensemble_entropy(ensemble_from_conditional_counts(c, bob)) for c in tomo_counts)


def run_game(config, witness_estimator="measurement", witness_tolerance=0.0):
    """Play ``config.shots`` rounds and evaluate all estimators.

    In exact mode the counts are the expectations ``shots/2 * P``.
    """
    rho = config.state()
    R, S = config.bases()
    dists = [joint_distribution(rho, R, R), joint_distribution(rho, S, S)]
    rng = np.random.default_rng(config.seed)
    if config.exact_counts:
        counts = np.array([0.5 * config.shots * d for d in dists])
    else:
        counts = _play_rounds(rng, config.shots, dists)
    h_r, h_s, q_r, q_s = _counts_entropies(counts)

    tomo_counts = None
    if config.tomography and not config.exact_counts:
        per_setting = max(1, config.shots // 6)
        tomo_counts = np.array([_tomographic_counts(rho, B, per_setting, rng, False) for B in (R, S)])
        lhs_tomo = tomographic_lhs(tomo_counts)
    else:
        lhs_tomo = h_r_given_b(rho, R) + h_r_given_b(rho, S)

    lhs_meas = h_r + h_s
    lhs_fano = float(h2(q_r) + h2(q_s))
    values = {"tomographic": lhs_tomo, "measurement": lhs_meas, "fano": lhs_fano}
    if witness_estimator not in values:
        raise ValueError(f"unknown estimator {witness_estimator!r}")
    report = make_report(
        lhs_tomo, lhs_meas, lhs_fano, log_inv_c(R, S), conditional_entropy(rho),
        witness_lhs=values[witness_estimator], witness_tolerance=witness_tolerance,
    )
    return GameRecord(config, counts, q_r, q_s, h_r, h_s, report, tomo_counts)


def bootstrap_errors(record, resamples=200, seed=0):
    """Multinomial-resampling standard errors of the derived quantities."""
    if resamples < 100:
        raise ValueError("bootstrap needs at least 100 resamples")
    keys = ("lhs_measurement", "lhs_fano", "lhs_tomographic", "h_r", "h_s", "q_r", "q_s")
    if record.exact:
        return {k: 0.0 for k in keys}
    rng = np.random.default_rng(seed)
    counts = record.counts.reshape(2, 4)
    samples = {k: [] for k in keys}
    for _ in range(resamples):
        c = np.array([rng.multinomial(int(n.sum()), n / n.sum()) for n in counts], dtype=float)
        h_r, h_s, q_r, q_s = _counts_entropies(c.reshape(2, 2, 2))
        samples["h_r"].append(h_r)
        samples["h_s"].append(h_s)
        samples["q_r"].append(q_r)
        samples["q_s"].append(q_s)
        samples["lhs_measurement"].append(h_r + h_s)
        samples["lhs_fano"].append(float(h2(q_r) + h2(q_s)))
        if record.tomo_counts is not None:
            tc = np.array([
                [rng.multinomial(int(row.sum()), row / row.sum()) for row in basis_counts]
                for basis_counts in record.tomo_counts
            ], dtype=float)
            samples["lhs_tomographic"].append(tomographic_lhs(tc))
        else:
            samples["lhs_tomographic"].append(record.report.lhs_tomographic)
    return {k: float(np.std(v, ddof=1)) for k, v in samples.items()}


# sweeps ------------------------------------------------------------------

SWEEP_COLUMNS = (
    "x", "lhs_tomo", "lhs_meas", "lhs_fano", "rhs_raw", "rhs_eff", "mu_bound",
    "witness", "err_tomo", "err_meas", "err_fano",
)


@dataclass(frozen=True)
class SweepRow:
    x: float
    lhs_tomo: float
    lhs_meas: float
    lhs_fano: float
    rhs_raw: float
    rhs_eff: float
    mu_bound: float
    witness: str
    err_tomo: float
    err_meas: float
    err_fano: float


@dataclass
class SweepResult:
    kind: str
    rows: list
    x_label: str
    violations: list = field(default_factory=list)

    def column(self, name):
        return np.array([getattr(r, name) for r in self.rows])

    def entangled_range(self):
        xs = [r.x for r in self.rows if r.witness == ENTANGLED]
        return (min(xs), max(xs)) if xs else None


def point_seed(seed, index):
    """Independent per-point seed, fixed by ``(seed, index)`` alone."""
    return int(np.random.SeedSequence([int(seed), int(index)]).generate_state(1)[0])


def evaluate_point(config, x, resamples=200, witness_estimator="measurement", sigmas=3.0):
    """One sweep row. In sampled mode the witness margin is ``sigmas`` bootstrap errors."""
    record = run_game(config, witness_estimator=witness_estimator)
    errs = bootstrap_errors(record, resamples, seed=config.seed)
    if not config.exact_counts:
        key = {"tomographic": "lhs_tomographic", "measurement": "lhs_measurement",
               "fano": "lhs_fano"}[witness_estimator]
        record = run_game(config, witness_estimator, witness_tolerance=sigmas * errs[key])
    rep = record.report
    return SweepRow(
        float(x), rep.lhs_tomographic, rep.lhs_measurement, rep.lhs_fano, rep.rhs_raw,
        rep.rhs_effective, rep.log_inv_c, rep.witness_verdict,
        errs["lhs_tomographic"], errs["lhs_measurement"], errs["lhs_fano"],
    )


def check_rows(rows, exact, atol=1e-9, sigmas=3.0):
    """Estimator ordering and the quantum-memory bound for every row."""
    bad = []
    for r in rows:
        slack_o1 = atol if exact else atol + sigmas * math.hypot(r.err_tomo, r.err_meas)
        slack_o2 = atol if exact else atol + sigmas * math.hypot(r.err_meas, r.err_fano)
        slack_b = atol if exact else atol + sigmas * r.err_tomo
        if r.lhs_tomo > r.lhs_meas + slack_o1 or r.lhs_meas > r.lhs_fano + slack_o2:
            bad.append(f"x={r.x:.9f}: estimator ordering violated")
        if r.lhs_tomo < r.rhs_raw - slack_b:
            bad.append(f"x={r.x:.9f}: uncertainty bound violated")
    return bad


def _run_sweep(kind, x_label, xs, configs, resamples, witness_estimator, workers):
    def job(args):
        x, cfg = args
        return evaluate_point(cfg, x, resamples, witness_estimator)

    items = list(zip(xs, configs))
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(job, items))
    else:
        rows = [job(it) for it in items]
    exact = all(c.exact_counts for c in configs)
    return SweepResult(kind, rows, x_label, check_rows(rows, exact))


def _tangle_grid(points):
    if points < 2:
        raise ValueError("a sweep needs at least 2 points")
    return np.linspace(0.0, 1.0, points)


def sweep_tangle(template, omega=math.pi / 4, points=41, resamples=200,
                 witness_estimator="measurement", workers=1):
    """Tangle sweep: uniform on ``[0, 1]``, state ``cos z|HH> + sin z|VV>``."""
    taus = _tangle_grid(points)
    configs = [
        template.with_tangle(float(t), theta=0.0, phi=0.0, omega=omega, seed=point_seed(template.seed, k))
        for k, t in enumerate(taus)
    ]
    return _run_sweep("sweep-tangle", "tangle", taus, configs, resamples, witness_estimator, workers)


def sweep_tangle_fixed_angle(template, omega=FIXED_ANGLE_OMEGA, points=41, resamples=200,
                             witness_estimator="measurement", workers=1):
    """Tangle sweep at fixed ``omega`` with the Schmidt basis optimised per point."""
    taus = _tangle_grid(points)
    configs = []
    for k, t in enumerate(taus):
        zeta = zeta_for_tangle(t)
        theta, phi, _ = minimize_state(zeta, omega)
        configs.append(template.with_tangle(
            float(t), theta=theta, phi=phi, omega=omega, seed=point_seed(template.seed, k)
        ))
    return _run_sweep("sweep-tangle-fixed-angle", "tangle", taus, configs, resamples,
                      witness_estimator, workers)


def sweep_omega(template, tangle=OMEGA_SWEEP_TANGLE, points=46, resamples=200,
                witness_estimator="measurement", workers=1):
    """Sweep of ``omega`` over ``[0, pi/4]`` at fixed tangle."""
    if points < 2:
        raise ValueError("a sweep needs at least 2 points")
    omegas = np.linspace(0.0, math.pi / 4, points)
    zeta = zeta_for_tangle(tangle)
    configs = []
    for k, w in enumerate(omegas):
        theta, phi, _ = minimize_state(zeta, float(w))
        configs.append(template.with_tangle(
            float(tangle), theta=theta, phi=phi, omega=float(w), seed=point_seed(template.seed, k)
        ))
    return _run_sweep("sweep-omega", "omega_rad", omegas, configs, resamples, witness_estimator,
                      workers)


# witness thresholds --------------------------------------------------------


@dataclass
class ThresholdResult:
    estimator: str
    tau_star: float
    error: float
    replicates: list
    reported: tuple

    @property
    def found(self):
        return self.tau_star is not None


def _bisect_threshold(entangled_at, tol):
    lo, hi = 0.0, 1.0
    if entangled_at(lo):
        return 0.0
    if not entangled_at(hi):
        return None
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if entangled_at(mid):
            hi = mid
        else:
            lo = mid
    return hi


def witness_threshold_scan(template, estimator="measurement", tol=1e-9, error_seeds=20,
                           replicate_tol=1e-4):
    """Smallest tangle at which ``estimator`` certifies entanglement (conjugate bases).

    ``tau_star`` uses expected counts at the template's noise level; ``error``
    is the spread of thresholds found in ``error_seeds`` sampled replicates
    (each bisected with common random numbers). Returns ``tau_star=None``
    when the verdict never flips on ``[0, 1]``.
    """
    if estimator not in ESTIMATORS:
        raise ValueError(f"unknown estimator {estimator!r}")
    base = replace(template, theta=0.0, phi=0.0, omega=math.pi / 4)

    def verdict(exact, seed):
        def entangled_at(tau):
            cfg = base.with_tangle(tau, exact_counts=exact, seed=seed,
                                   tomography=(estimator == "tomographic" and not exact))
            rep = run_game(cfg, witness_estimator=estimator).report
            return rep.witness_verdict == ENTANGLED
        return entangled_at

    tau_star = _bisect_threshold(verdict(True, template.seed), tol)
    replicates = []
    for k in range(error_seeds):
        t = _bisect_threshold(verdict(False, point_seed(template.seed, k)), replicate_tol)
        if t is not None:
            replicates.append(t)
    error = float(np.std(replicates, ddof=1)) if len(replicates) > 1 else 0.0
    return ThresholdResult(estimator, tau_star, error, replicates, REPORTED_THRESHOLDS[estimator])
