import math
from dataclasses import replace

import numpy as np
import pytest

import oracles
from quncertainty.gamesim import (
    ExperimentConfig,
    InvariantViolation,
    SweepRow,
    bootstrap_errors,
    check_rows,
    point_seed,
    run_game,
    sweep_omega,
    sweep_tangle,
    sweep_tangle_fixed_angle,
    witness_threshold_scan,
)
from quncertainty.optimize import minimize_state
from quncertainty.states import X_BASIS, Z_BASIS, zeta_for_tangle
from quncertainty.uncertainty import ENTANGLED, INCONCLUSIVE

EXACT = ExperimentConfig(exact_counts=True)


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(tangle=0.5, zeta=0.3)
    with pytest.raises(ValueError):
        ExperimentConfig(tangle=None, zeta=None)
    with pytest.raises(ValueError):
        ExperimentConfig(fidelity=0.2)
    with pytest.raises(ValueError):
        ExperimentConfig(tangle=1.5)
    with pytest.raises(ValueError):
        ExperimentConfig(shots=0)
    cfg = ExperimentConfig(zeta=0.2, tangle=None, fidelity=0.97)
    assert cfg.zeta_value == 0.2
    assert cfg.mixing == pytest.approx(0.96)


def test_bell_game_perfect_prediction():
    rec = run_game(ExperimentConfig(tangle=1.0, seed=3))
    assert rec.q_r == 0 and rec.q_s == 0
    assert rec.report.lhs_measurement == 0.0
    assert rec.counts.sum() == 20_000
    assert rec.counts[:, 0, 1].sum() == 0 and rec.counts[:, 1, 0].sum() == 0


def test_product_game_one_bit():
    rec = run_game(ExperimentConfig(tangle=0.0, seed=1))
    err = bootstrap_errors(rec, 200, seed=1)["lhs_measurement"]
    assert abs(rec.report.lhs_measurement - 1.0) <= 3 * err
    assert rec.h_s == 0.0


def test_bell_noisy_matches_expected_counts():
    cfg = ExperimentConfig(tangle=1.0, fidelity=0.97, seed=11)
    rec = run_game(cfg)
    exact = run_game(replace(cfg, exact_counts=True))
    errs = bootstrap_errors(rec, 300, seed=2)
    for key in ("lhs_measurement", "lhs_fano"):
        assert abs(getattr(rec.report, key) - getattr(exact.report, key)) <= 3 * errs[key]
    # the expected-count values follow from the joint distribution directly
    rho = cfg.state()
    oracle = sum(oracles.h_given_measured(rho, B.kets, B.kets) for B in (X_BASIS, Z_BASIS))
    assert exact.report.lhs_measurement == pytest.approx(oracle, abs=1e-12)
    q = 0.5 * (1 - cfg.mixing)
    assert exact.q_r == pytest.approx(q) and exact.q_s == pytest.approx(q)


@pytest.mark.parametrize("seed", range(5))
def test_counts_partition_shots(seed):
    rec = run_game(ExperimentConfig(tangle=0.3, fidelity=0.9, shots=777, seed=seed))
    assert rec.counts.sum() == 777
    assert 0 <= rec.q_r <= 1 and 0 <= rec.q_s <= 1


def test_game_tomography_mode():
    rec = run_game(ExperimentConfig(tangle=1.0, fidelity=0.97, tomography=True, seed=2))
    exact = run_game(ExperimentConfig(tangle=1.0, fidelity=0.97, exact_counts=True))
    errs = bootstrap_errors(rec, 100, seed=0)
    assert errs["lhs_tomographic"] > 0
    assert abs(rec.report.lhs_tomographic - exact.report.lhs_tomographic) < 5 * errs["lhs_tomographic"]


def test_bootstrap_exact_is_zero():
    errs = bootstrap_errors(run_game(replace(EXACT, fidelity=0.9)), 100)
    assert set(errs.values()) == {0.0}


def test_bootstrap_needs_100():
    with pytest.raises(ValueError):
        bootstrap_errors(run_game(EXACT), 50)


def test_bootstrap_large_n_small_errors():
    rec = run_game(ExperimentConfig(tangle=1.0, shots=1_000_000, seed=4))
    errs = bootstrap_errors(rec, 100, seed=0)
    assert errs["lhs_measurement"] <= 1e-3 and errs["lhs_fano"] <= 1e-3


def test_bootstrap_matches_delta_method():
    # noisy Bell: each basis gives h2(q) from N/2 rounds, q = (1 - p)/2
    n = 1_000_000
    cfg = ExperimentConfig(tangle=1.0, fidelity=0.97, shots=n, seed=4)
    q = 0.5 * (1 - cfg.mixing)
    sigma = math.sqrt(2) * math.log2((1 - q) / q) * math.sqrt(q * (1 - q) / (n / 2))
    errs = bootstrap_errors(run_game(cfg), 400, seed=0)
    assert errs["lhs_fano"] == pytest.approx(sigma, rel=0.2)
    assert errs["lhs_measurement"] == pytest.approx(sigma, rel=0.2)


def test_bootstrap_inverse_sqrt_scaling():
    errs = []
    for n in (1_000, 10_000, 100_000):
        rec = run_game(ExperimentConfig(tangle=0.5, fidelity=0.97, shots=n, seed=9))
        errs.append(bootstrap_errors(rec, 400, seed=1)["lhs_measurement"])
    for a, b in zip(errs, errs[1:]):
        assert a / b == pytest.approx(math.sqrt(10), rel=0.3)


def test_sampled_converges_to_exact():
    cfg = ExperimentConfig(tangle=0.5, fidelity=0.97, shots=10_000)
    target = run_game(replace(cfg, exact_counts=True)).report.lhs_measurement
    hits = 0
    for trial in range(100):
        rec = run_game(replace(cfg, seed=trial))
        sigma = bootstrap_errors(rec, 100, seed=trial)["lhs_measurement"]
        hits += abs(rec.report.lhs_measurement - target) <= 5 * sigma
    assert hits >= 95


def test_sweep_tangle_closed_forms():
    res = sweep_tangle(EXACT, points=41)
    xs = res.column("x")
    assert np.all(np.diff(xs) > 0) and xs[0] == 0 and xs[-1] == 1
    for row in res.rows:
        zeta = zeta_for_tangle(row.x)
        assert row.lhs_tomo == pytest.approx(1 - oracles.h2(math.cos(zeta) ** 2), abs=1e-9)
        assert row.rhs_raw == pytest.approx(row.lhs_tomo, abs=1e-9)
        assert row.lhs_meas == pytest.approx(oracles.h2((1 - math.sqrt(row.x)) / 2), abs=1e-9)
        assert row.mu_bound == pytest.approx(1.0)
    assert res.rows[-1].lhs_tomo == pytest.approx(0.0, abs=1e-12)
    assert res.rows[0].witness == INCONCLUSIVE and res.rows[-1].witness == ENTANGLED
    assert res.violations == []


def test_sweep_fixed_angle_gap():
    omega = math.radians(32.5)
    res = sweep_tangle_fixed_angle(EXACT, points=21)
    first, last = res.rows[0], res.rows[-1]
    assert first.mu_bound == pytest.approx(-math.log2(math.cos(omega) ** 2))
    # best product state sits strictly above the classical bound for these bases
    assert first.lhs_tomo == pytest.approx(minimize_state(0.0, omega)[2], abs=1e-12)
    assert first.lhs_tomo > first.rhs_raw
    assert last.lhs_tomo == pytest.approx(0.0, abs=1e-9)
    assert last.rhs_raw == pytest.approx(first.mu_bound - 1, abs=1e-9) and last.rhs_eff == 0.0
    assert all(r.lhs_tomo - r.rhs_raw > 1e-6 for r in res.rows[1:-1])


def test_sweep_omega_endpoints():
    res = sweep_omega(EXACT)
    assert len(res.rows) == 46
    np.testing.assert_allclose(np.degrees(res.column("x")), np.arange(46), atol=1e-9)
    first = res.rows[0]
    zeta = zeta_for_tangle(0.47)
    assert first.rhs_raw == pytest.approx(-oracles.h2(math.cos(zeta) ** 2))
    assert first.rhs_eff == 0.0 and first.lhs_tomo == pytest.approx(0.0, abs=1e-12)
    ref = sweep_tangle(EXACT, points=101).rows[47]
    assert ref.x == pytest.approx(0.47)
    for k in ("lhs_tomo", "lhs_meas", "lhs_fano", "rhs_raw"):
        assert getattr(res.rows[-1], k) == pytest.approx(getattr(ref, k), abs=1e-9)
    assert all(r.lhs_tomo - r.rhs_raw >= -1e-9 for r in res.rows)


def test_sweep_exact_seed_and_worker_invariance():
    a = sweep_tangle(replace(EXACT, seed=1), points=9)
    b = sweep_tangle(replace(EXACT, seed=2), points=9, workers=4)
    assert a.rows == b.rows


def test_sweep_sampled_worker_invariance():
    cfg = ExperimentConfig(fidelity=0.97, shots=2000, seed=5)
    a = sweep_tangle(cfg, points=5, resamples=100)
    b = sweep_tangle(cfg, points=5, resamples=100, workers=3)
    assert a.rows == b.rows
    assert a.violations == []


def test_sweep_needs_two_points():
    with pytest.raises(ValueError):
        sweep_tangle(EXACT, points=1)
    with pytest.raises(ValueError):
        sweep_omega(EXACT, points=1)


def test_point_seed_distinct():
    seeds = {point_seed(0, k) for k in range(100)}
    assert len(seeds) == 100 and point_seed(3, 4) == point_seed(3, 4)


def test_check_rows_flags_violations():
    good = SweepRow(0.5, 0.4, 0.6, 0.6, 0.4, 0.4, 1.0, ENTANGLED, 0, 0, 0)
    bad = replace(good, lhs_meas=0.7, lhs_fano=0.65)
    worse = replace(good, lhs_tomo=0.3)
    assert check_rows([good], exact=True) == []
    assert "ordering" in check_rows([bad], exact=True)[0]
    assert "bound" in check_rows([worse], exact=True)[0]


def test_threshold_ideal_tomographic_zero():
    res = witness_threshold_scan(ExperimentConfig(fidelity=1.0), "tomographic", error_seeds=0)
    assert res.tau_star == pytest.approx(0.0, abs=1e-9)


def test_threshold_never_flips():
    # F = 1/2 Werner states are separable at every tangle
    res = witness_threshold_scan(ExperimentConfig(fidelity=0.5), "measurement", error_seeds=0)
    assert res.tau_star is None and not res.found


def test_threshold_rejects_unknown_estimator():
    with pytest.raises(ValueError):
        witness_threshold_scan(EXACT, "bogus")
    with pytest.raises(ValueError):
        run_game(EXACT, witness_estimator="bogus")


def test_invariant_violation_is_runtime_error():
    assert issubclass(InvariantViolation, RuntimeError)
