import math

import numpy as np
import pytest

from beambook import (ArrayGeometry, ChannelParams, Codebook, Codeword,
                      Direction, Metric, codebook_gains, dft_codebook,
                      effective_gain, estimate_objective, generate_training_set,
                      outage_fraction, rate_from_gain, steering_vector)

G8 = ArrayGeometry.ula(8)


def random_codebook(k, n, seed):
    rng = np.random.default_rng(seed)
    return Codebook(rng.uniform(0, 2 * math.pi, (k, n)))


def test_metric_validation():
    with pytest.raises(ValueError):
        Metric("bogus")
    with pytest.raises(ValueError):
        Metric.coverage(gamma=-1.0)
    with pytest.raises(ValueError):
        Metric.coverage(gamma=1.0, alpha=0.0)


def test_avg_gain_is_identity():
    m = Metric.avg_gain()
    assert m.value(7.5) == 7.5
    assert m.derivative(123.0) == 1.0


def test_rate_values():
    m = Metric.rate()
    assert m.value(3.0) == pytest.approx(2.0)
    assert m.derivative(0.0) == pytest.approx(1.0 / math.log(2), rel=1e-12)


def test_coverage_midpoint():
    m = Metric.coverage(gamma=2.0, alpha=8.0)
    assert m.value(2.0) == pytest.approx(0.5)
    assert m.derivative(2.0) == pytest.approx(2.0)  # alpha/4


def test_coverage_extreme_arguments_are_stable():
    m = Metric.coverage(gamma=5.0, alpha=1e4)
    assert m.value(0.0) == pytest.approx(0.0, abs=1e-12)
    assert m.value(100.0) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("metric", [Metric.avg_gain(), Metric.rate(),
                                    Metric.coverage(gamma=2.0, alpha=8.0)])
def test_derivative_matches_finite_differences(metric):
    # centered differences evaluated at 50-digit precision so the sigmoid
    # tails do not drown the comparison in float64 cancellation
    import mpmath
    mpmath.mp.dps = 50
    step = mpmath.mpf("1e-5")

    def value(x):
        if metric.kind == "avg":
            return x
        if metric.kind == "rate":
            return mpmath.log(1 + x) / mpmath.log(2)
        return 1 / (1 + mpmath.exp(-metric.alpha * (x - metric.gamma)))

    for x in (0.1, 1.0, 5.0, 8.0):
        fd = (value(mpmath.mpf(x) + step) - value(mpmath.mpf(x) - step)) / (2 * step)
        assert metric.derivative(x) == pytest.approx(float(fd), rel=1e-6)


def test_effective_gain_matched_filter():
    d = Direction(1.0)
    v = steering_vector(G8, d)
    cb = Codebook.from_codewords([Codeword.matched_to(v)])
    gain, idx = effective_gain(cb, v)
    assert gain == pytest.approx(8.0, abs=1e-9)
    assert idx == 0


def test_effective_gain_orthogonal_channel():
    cb = dft_codebook(G8)
    # channel orthogonal to every DFT codeword cannot exist (they span C^8),
    # so check a single-codeword codebook against an orthogonal steering dir
    thetas = [math.acos(-1 + (2 * m - 1) / 8) for m in range(1, 9)]
    one = Codebook.from_codewords([cb[0]])
    h = steering_vector(G8, Direction(thetas[3]))
    gain, _ = effective_gain(one, h)
    assert gain == pytest.approx(0.0, abs=1e-9)


def test_effective_gain_matches_loop_oracle():
    rng = np.random.default_rng(10)
    cb = random_codebook(5, 8, seed=11)
    for _ in range(20):
        h = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        expected = max(np.abs(np.vdot(cb[k].vector, h)) ** 2 for k in range(5))
        gain, idx = effective_gain(cb, h)
        assert gain == pytest.approx(expected, rel=1e-12)
        per = [np.abs(np.vdot(cb[k].vector, h)) ** 2 for k in range(5)]
        assert idx == int(np.argmax(per))


def test_effective_gain_global_phase_invariance():
    rng = np.random.default_rng(14)
    cb = random_codebook(4, 8, seed=15)
    h = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    g1, i1 = effective_gain(cb, h)
    g2, i2 = effective_gain(cb, h * np.exp(1j * 0.777))
    assert g1 == pytest.approx(g2, rel=1e-12)
    assert i1 == i2


def test_estimate_objective_single_sample():
    cb = random_codebook(3, 8, seed=21)
    rng = np.random.default_rng(22)
    h = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    obj = estimate_objective(cb, [h], Metric.avg_gain())
    assert obj == pytest.approx(effective_gain(cb, h)[0], rel=1e-12)


def test_estimate_objective_sharp_sigmoid_counts_threshold_crossings():
    # with a near-step sigmoid the objective reduces to the coverage fraction
    cb = random_codebook(4, 8, seed=30)
    rng = np.random.default_rng(31)
    samples = generate_training_set(ChannelParams.single_ray(), G8, 500, rng)
    gamma = 2.0
    frac = 1.0 - outage_fraction(cb, samples, gamma)
    obj = estimate_objective(cb, samples, Metric.coverage(gamma=gamma, alpha=1e4))
    assert obj == pytest.approx(frac, abs=1.0 / 500)


def test_estimate_objective_duplication_invariance():
    cb = random_codebook(3, 8, seed=41)
    rng = np.random.default_rng(42)
    samples = generate_training_set(ChannelParams.nlos(), G8, 64, rng)
    doubled = np.vstack([samples, samples])
    for m in (Metric.avg_gain(), Metric.rate(), Metric.coverage(1.5)):
        assert estimate_objective(cb, doubled, m) == \
            pytest.approx(estimate_objective(cb, samples, m), rel=1e-12)


def test_estimate_objective_empty_rejected():
    cb = random_codebook(2, 4, seed=1)
    with pytest.raises(ValueError):
        estimate_objective(cb, np.zeros((0, 4)), Metric.avg_gain())
    with pytest.raises(ValueError):
        outage_fraction(cb, np.zeros((0, 4)), 1.0)


def test_outage_trivial_thresholds():
    cb = random_codebook(4, 8, seed=51)
    rng = np.random.default_rng(52)
    samples = generate_training_set(ChannelParams.single_ray(), G8, 200, rng)
    assert outage_fraction(cb, samples, 0.0) == 0.0
    assert outage_fraction(cb, samples, 8.0 + 1e-9) == 1.0


def test_outage_dft_floor():
    cb = dft_codebook(G8)
    rng = np.random.default_rng(53)
    samples = generate_training_set(ChannelParams.single_ray(), G8, 20_000, rng)
    assert outage_fraction(cb, samples, 3.2) == 0.0


def test_outage_monotone_in_k_and_gamma():
    rng = np.random.default_rng(61)
    phases = rng.uniform(0, 2 * math.pi, (6, 8))
    samples = generate_training_set(ChannelParams.single_ray(), G8, 500,
                                    np.random.default_rng(62))
    prev = 1.0
    for k in range(1, 7):
        out = outage_fraction(Codebook(phases[:k]), samples, 2.0)
        assert out <= prev + 1e-12
        prev = out
    cb = Codebook(phases)
    outs = [outage_fraction(cb, samples, g) for g in (0.5, 1.0, 2.0, 4.0)]
    assert all(a <= b + 1e-12 for a, b in zip(outs, outs[1:]))


def test_sigmoid_sign_consistency():
    # far from the threshold the steep sigmoid agrees with the indicator
    m = Metric.coverage(gamma=2.0, alpha=1e4)
    rng = np.random.default_rng(71)
    x = rng.uniform(0, 8, 1000)
    x = x[np.abs(x - 2.0) > 0.05]
    hard = (x >= 2.0).astype(float)
    assert np.max(np.abs(m.value(x) - hard)) < 1e-3


def test_codebook_gains_shape_check():
    cb = random_codebook(3, 8, seed=81)
    with pytest.raises(ValueError):
        codebook_gains(cb, np.zeros((5, 4), dtype=complex))


def test_rate_from_gain():
    assert rate_from_gain(3.0, 1.0) == pytest.approx(2.0)
    np.testing.assert_allclose(rate_from_gain([0.0, 1.0], 1.0), [0.0, 1.0])
