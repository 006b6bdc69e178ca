import math

import numpy as np
import pytest

from braiddyn.diskmaps import MapSpec, MeasureSpec, TwistSpec, evaluate
from braiddyn.invariants import (
    calabi_invariant,
    calabi_quadrature,
    entropy_report,
    invariance_experiment,
    line_stretch_rate,
    orbit_winding_sum,
    pair_winding,
    theta_estimate,
    theta_family_sup,
)

LAM = math.log((3 + math.sqrt(5)) / 2)
RHO = 0.4


def full_turn_pair_map(k=1.0):
    return MapSpec((TwistSpec(0j, 0.5, k * 16.0 / 9.0),))


def protocol_map():
    s = 0.5
    return MapSpec((TwistSpec(-s / 2, s, 8.0 / 9.0), TwistSpec(s / 2, s, -8.0 / 9.0)))


def protocol_measures():
    return [
        MeasureSpec("dirac", point=-0.5 + 0j),
        MeasureSpec("dirac", point=0j),
        MeasureSpec("dirac", point=0.5 + 0j),
    ]


def test_winding_identity_and_full_turn():
    assert pair_winding(MapSpec.identity(), 0.1, 0.3 + 0.2j) == 0.0
    w = pair_winding(full_turn_pair_map(1), -0.25 + 0j, 0.25 + 0j)
    assert abs(w - 2.0) < 1e-6
    with pytest.raises(ValueError):
        pair_winding(MapSpec.identity(), 0.1, 0.1)


def test_winding_birkhoff_additivity():
    m = MapSpec((TwistSpec(0j, 0.5, 1.3), TwistSpec(0.25 + 0.2j, 0.4, -0.8)))
    rng = np.random.default_rng(1)
    doubled = MapSpec(m.twists + m.twists)
    for _ in range(15):
        p1 = 0.6 * complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
        p2 = 0.6 * complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
        if p1 == p2:
            continue
        lhs = pair_winding(doubled, p1, p2)
        rhs = pair_winding(m, p1, p2) + pair_winding(m, evaluate(m, p1), evaluate(m, p2))
        assert abs(lhs - rhs) < 1e-5
        birkhoff = orbit_winding_sum(m, [p1], [p2], 2)[0]
        assert abs(birkhoff - rhs) < 1e-5


def test_theta1_fixed_points_tracks():
    for k in (1, 2, 3):
        meas = [MeasureSpec("dirac", point=-0.25 + 0j), MeasureSpec("dirac", point=0.25 + 0j)]
        est = theta_estimate(full_turn_pair_map(k), meas, kind="theta1", N_max=4, samples=1, seed=1)
        for row in est.per_N:
            assert row["mean"] == 2 * k
            assert row["mean_lower"] == 2 * k
        assert est.point_estimate == 2 * k


def test_theta_identity_map_is_zero():
    meas = [MeasureSpec("area"), MeasureSpec("area")]
    for kind in ("theta1", "theta2"):
        est = theta_estimate(MapSpec.identity(), meas, kind=kind, N_max=2, samples=3, seed=2)
        assert est.point_estimate == 0.0
        assert est.inf_estimate == 0.0


def test_theta2_periodic_orbit_protocol():
    est = theta_estimate(protocol_map(), protocol_measures(), kind="theta2", N_max=24, samples=1, seed=3, base_angle=RHO)
    assert abs(est.rate_estimate - LAM) < 1e-2
    means = [r["mean"] for r in est.per_N]
    infs = [r["inf_track"] for r in est.per_N]
    assert infs == list(np.minimum.accumulate(means))


def test_theta2_le_log3_theta1_per_N():
    rng = np.random.default_rng(5)
    m = protocol_map()
    meas = [MeasureSpec("area")] * 3
    t1 = theta_estimate(m, meas, kind="theta1", N_max=4, samples=4, seed=7, base_angle=RHO)
    t2 = theta_estimate(m, meas, kind="theta2", N_max=4, samples=4, seed=7, base_angle=RHO)
    for r1, r2 in zip(t1.per_N, t2.per_N):
        assert r2["mean"] <= math.log(3) * r1["mean"] + 1e-9


def test_atomic_invariance_checked():
    meas = [MeasureSpec("dirac", point=0.1 + 0j), MeasureSpec("dirac", point=0.3 + 0j)]
    with pytest.raises(ValueError):
        theta_estimate(full_turn_pair_map(1), meas, kind="theta1", N_max=2, samples=1, seed=0)


def test_monotone_in_marked_points_on_nested_families():
    m = full_turn_pair_map(2)
    meas2 = [MeasureSpec("dirac", point=-0.25 + 0j), MeasureSpec("dirac", point=0.25 + 0j)]
    meas3 = meas2 + [MeasureSpec("dirac", point=0.8 + 0j)]
    est2 = theta_estimate(m, meas2, kind="theta1", N_max=4, samples=1, seed=1)
    est3 = theta_estimate(m, meas3, kind="theta1", N_max=4, samples=1, seed=1)
    assert est2.point_estimate <= est3.point_estimate + 1e-12


def test_family_sup():
    m = full_turn_pair_map(1)
    fam_inner = [MeasureSpec("dirac", point=-0.25 + 0j), MeasureSpec("dirac", point=0.25 + 0j)]
    fam_outer = [MeasureSpec("dirac", point=-0.8 + 0j), MeasureSpec("dirac", point=0.8 + 0j)]
    rep = theta_family_sup(m, [fam_outer, fam_inner], kind="theta1", N_max=2, samples=1, seed=0)
    assert rep["argmax_family"] == 1
    assert rep["family_sup"] == 2.0


def test_calabi_identity_and_quadrature_agreement():
    est0 = calabi_invariant(MapSpec.identity(), MeasureSpec("area"), MeasureSpec("area"), samples=100, N=2, seed=1)
    assert abs(est0.point_estimate) < 1e-12
    m = MapSpec((TwistSpec(0.1 + 0.05j, 0.55, 1.3),))
    est = calabi_invariant(m, MeasureSpec("area"), MeasureSpec("area"), samples=2000, N=8, seed=5)
    quad = calabi_quadrature(m, nodes=200)
    assert abs(est.point_estimate - quad) <= 3 * est.per_N[0]["stderr"]


def test_calabi_bounded_by_word_metric_estimate():
    m = MapSpec((TwistSpec(0.1 + 0.05j, 0.55, 1.3),))
    meas = [MeasureSpec("area"), MeasureSpec("area")]
    N = 8
    cal = calabi_invariant(m, meas[0], meas[1], samples=400, N=N, seed=9)
    t1 = theta_estimate(m, meas, kind="theta1", N_max=N, samples=40, seed=9)
    se = cal.per_N[0]["stderr"] + t1.per_N[-1]["stderr"]
    assert abs(cal.point_estimate) <= t1.point_estimate + 3.0 / N + 3 * se


def test_invariance_experiment_identity_is_bitwise():
    rep = invariance_experiment(
        protocol_map(), MapSpec.identity(), protocol_measures(), kind="theta2", N_max=8, samples=1, seed=9, base_angle=RHO
    )
    assert rep["base"] == rep["conjugated"]
    assert rep["difference_rate"] == 0.0


def test_line_stretch_rates():
    assert line_stretch_rate(MapSpec.identity())["rate"] == 0.0
    single = MapSpec((TwistSpec(0.1 + 0.05j, 0.55, 1.3),))
    assert line_stretch_rate(single)["rate"] < 1e-2
    ent = line_stretch_rate(protocol_map())
    assert ent["rate"] > LAM


def test_entropy_report_identity():
    meas = [MeasureSpec("area"), MeasureSpec("area")]
    rep = entropy_report(MapSpec.identity(), meas, N_max=2, samples=2, seed=3)
    assert abs(rep["entropy_lower_bound"]) < 1e-9
    assert abs(rep["line_stretch"]["rate"]) < 1e-9
    assert rep["inequality_ok"]


def test_entropy_report_protocol_and_zero_entropy():
    rep = entropy_report(protocol_map(), protocol_measures(), N_max=32, samples=1, seed=3, base_angle=RHO)
    assert abs(rep["entropy_lower_bound"] - LAM) < 1e-2
    assert rep["entropy_lower_bound"] <= rep["line_stretch"]["rate"]
    assert rep["inequality_ok"]
    # zero-entropy map: both tracks vanish at the 1e-2 scale
    single = MapSpec((TwistSpec(0j, 0.5, 16.0 / 9.0),))
    meas = [MeasureSpec("dirac", point=-0.25 + 0j), MeasureSpec("dirac", point=0.25 + 0j)]
    rep0 = entropy_report(single, meas, N_max=256, samples=1, seed=4)
    assert abs(rep0["entropy_lower_bound"]) < 1e-2
    assert abs(rep0["line_stretch"]["rate"]) < 1e-2


def test_invariance_difference_shrinks_with_horizon():
    h = MapSpec((TwistSpec(0.15 + 0.2j, 0.35, 0.6),))
    diffs = []
    for n_max in (8, 16):
        rep = invariance_experiment(
            protocol_map(), h, protocol_measures(), kind="theta2", N_max=n_max, samples=1, seed=9, base_angle=RHO
        )
        diffs.append(abs(rep["difference_point"]))
    assert diffs[1] <= diffs[0] + 1e-9
