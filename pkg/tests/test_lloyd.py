import itertools
import math

import numpy as np
import pytest

from beambook import (ArrayGeometry, ChannelParams, Codebook, Codeword,
                      Direction, LloydConfig, Metric, dft_codebook,
                      estimate_objective, generate_training_set, init_codebook,
                      lloyd_design, objective_gradient, partition,
                      project_to_grid, quantized_lloyd_design, steering_vector,
                      update_codeword)

G8 = ArrayGeometry.ula(8)
TWO_PI = 2 * math.pi


def cell_objective(phases, samples, metric):
    w = np.exp(1j * phases) / math.sqrt(phases.size)
    return float(np.mean(metric.value(np.abs(samples @ np.conj(w)) ** 2)))


# -- initialization -----------------------------------------------------------

def test_init_codebook_deterministic_and_feasible():
    a = init_codebook(8, 4, np.random.default_rng(5))
    b = init_codebook(8, 4, np.random.default_rng(5))
    np.testing.assert_array_equal(a.phases, b.phases)
    np.testing.assert_allclose(8 * np.abs(a.matrix) ** 2, 1.0, atol=1e-12)
    single = init_codebook(8, 1, np.random.default_rng(0))
    assert single.k == 1


# -- partitioning -------------------------------------------------------------

def test_partition_single_codeword_takes_all():
    cb = init_codebook(8, 1, np.random.default_rng(1))
    samples = generate_training_set(ChannelParams.single_ray(), G8, 30,
                                    np.random.default_rng(2))
    part = partition(cb, samples)
    assert np.all(part.assignment == 0)
    assert len(part.cells[0]) == 30


def test_partition_matched_sample_goes_to_its_codeword():
    d1, d2 = Direction(math.acos(-0.5)), Direction(math.acos(0.5))
    rows = [Codeword.matched_to(steering_vector(G8, d1)),
            Codeword.matched_to(steering_vector(G8, d2))]
    cb = Codebook.from_codewords(rows)
    sample = steering_vector(G8, d2)
    part = partition(cb, [sample])
    assert part.assignment[0] == 1


def test_partition_matches_bruteforce_argmax():
    rng = np.random.default_rng(7)
    cb = Codebook(rng.uniform(0, TWO_PI, (5, 8)))
    samples = generate_training_set(ChannelParams.nlos(), G8, 100,
                                    np.random.default_rng(8))
    part = partition(cb, samples)
    for i, h in enumerate(samples):
        gains = [np.abs(np.vdot(cb[k].vector, h)) ** 2 for k in range(cb.k)]
        assert part.assignment[i] == int(np.argmax(gains))
    covered = np.concatenate(part.cells)
    assert sorted(covered) == list(range(100))


def test_partition_reassignment_never_helps_avg_objective():
    rng = np.random.default_rng(17)
    cb = Codebook(rng.uniform(0, TWO_PI, (4, 8)))
    samples = generate_training_set(ChannelParams.single_ray(), G8, 50,
                                    np.random.default_rng(18))
    part = partition(cb, samples)
    gains = np.abs(samples @ np.conj(cb.matrix)) ** 2
    for i in range(len(samples)):
        for k in range(cb.k):
            assert gains[i, part.assignment[i]] >= gains[i, k] - 1e-12


# -- gradients ----------------------------------------------------------------

def test_gradient_zero_for_single_element():
    w = Codeword(np.array([1.0]))
    h = np.array([[0.7 + 0.2j]])
    g = objective_gradient(w, h, Metric.avg_gain())
    assert abs(g[0]) < 1e-12


def test_gradient_zero_at_matched_filter():
    d = Direction(1.3)
    v = steering_vector(G8, d)
    w = Codeword.matched_to(v)
    g = objective_gradient(w, [v], Metric.avg_gain())
    assert np.max(np.abs(g)) < 1e-9


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(123)
    metrics = [Metric.avg_gain(), Metric.rate(), Metric.coverage(gamma=3.0, alpha=8.0)]
    step = 1e-6
    for trial in range(30):
        n = int(rng.integers(2, 9))
        c = int(rng.integers(1, 6))
        phases = rng.uniform(0, TWO_PI, n)
        samples = (rng.standard_normal((c, n)) + 1j * rng.standard_normal((c, n)))
        metric = metrics[trial % 3]
        grad = objective_gradient(Codeword(phases), samples, metric)
        for i in range(n):
            up, dn = phases.copy(), phases.copy()
            up[i] += step
            dn[i] -= step
            fd = (cell_objective(up, samples, metric)
                  - cell_objective(dn, samples, metric)) / (2 * step)
            assert abs(grad[i] - fd) <= 1e-4 * max(abs(fd), 1e-6)


def test_gradient_empty_cell_rejected():
    with pytest.raises(ValueError):
        objective_gradient(Codeword(np.zeros(4)), np.zeros((0, 4)), Metric.avg_gain())


# -- codeword updates ---------------------------------------------------------

def test_update_converges_to_matched_filter():
    rng = np.random.default_rng(3)
    d = Direction(0.8)
    v = steering_vector(G8, d)
    w = Codeword(rng.uniform(0, TWO_PI, 8))
    cfg = LloydConfig(k=1, grad_steps_per_iter=400, step_size=0.05)
    out = update_codeword(w, [v], Metric.avg_gain(), cfg)
    final = cell_objective(out.phases, np.atleast_2d(v), Metric.avg_gain())
    assert final >= 8.0 * 0.99


def test_update_keeps_input_at_stationary_point():
    d = Direction(0.8)
    v = steering_vector(G8, d)
    w = Codeword.matched_to(v)
    cfg = LloydConfig(k=1)
    out = update_codeword(w, [v], Metric.avg_gain(), cfg)
    np.testing.assert_array_equal(out.phases, w.phases)


def test_update_never_worse():
    rng = np.random.default_rng(9)
    cfg = LloydConfig(k=1, grad_steps_per_iter=5)
    for metric in (Metric.avg_gain(), Metric.rate(), Metric.coverage(2.0)):
        for seed in range(5):
            r = np.random.default_rng(seed)
            w = Codeword(r.uniform(0, TWO_PI, 8))
            cell = generate_training_set(ChannelParams.nlos(), G8, 10, r)
            out = update_codeword(w, cell, metric, cfg)
            assert cell_objective(out.phases, cell, metric) >= \
                cell_objective(w.phases, cell, metric)


# -- full designs -------------------------------------------------------------

def test_design_single_sample_reaches_matched_gain():
    v = steering_vector(G8, Direction(2.2))
    cfg = LloydConfig(k=1, seed=0, restarts=2)
    res = lloyd_design([v], Metric.avg_gain(), cfg)
    assert res.objective_history[-1] >= 8.0 * 0.99


def test_design_orthogonal_samples_one_codeword_each():
    thetas = [math.acos(-1 + (2 * m - 1) / 8) for m in range(1, 9)]
    samples = np.stack([steering_vector(G8, Direction(t)) for t in thetas])
    cfg = LloydConfig(k=8, seed=1, restarts=3, max_iters=100)
    res = lloyd_design(samples, Metric.avg_gain(), cfg)
    assert res.objective_history[-1] >= 8.0 * 0.99


def test_design_beats_dft_on_training_objective():
    samples = generate_training_set(ChannelParams.single_ray(), G8, 800,
                                    np.random.default_rng(4))
    cfg = LloydConfig(k=8, seed=0, restarts=3)
    res = lloyd_design(samples, Metric.avg_gain(), cfg)
    dft_obj = estimate_objective(dft_codebook(G8), samples, Metric.avg_gain())
    assert res.objective_history[-1] >= dft_obj


def test_design_histories_monotone_and_deterministic():
    samples = generate_training_set(ChannelParams.single_ray(), G8, 200,
                                    np.random.default_rng(14))
    cfg = LloydConfig(k=3, seed=7, restarts=2, max_iters=40)
    res1 = lloyd_design(samples, Metric.coverage(2.0), cfg)
    res2 = lloyd_design(samples, Metric.coverage(2.0), cfg)
    np.testing.assert_array_equal(res1.codebook.phases, res2.codebook.phases)
    hist = res1.objective_history
    assert all(a <= b for a, b in zip(hist, hist[1:]))
    assert len(res1.restart_objectives) == 2


def test_design_result_objective_matches_estimate():
    samples = generate_training_set(ChannelParams.single_ray(), G8, 300,
                                    np.random.default_rng(24))
    cfg = LloydConfig(k=4, seed=2, restarts=2, max_iters=60)
    metric = Metric.avg_gain()
    res = lloyd_design(samples, metric, cfg)
    assert res.objective_history[-1] == pytest.approx(
        estimate_objective(res.codebook, samples, metric), rel=1e-12)


# -- quantization -------------------------------------------------------------

def test_project_to_grid_examples():
    w = Codeword(np.array([0.3, 2.0]))
    q = project_to_grid(w, bits=1)
    np.testing.assert_allclose(q.phases, [0.0, math.pi], atol=1e-12)


def test_project_to_grid_idempotent():
    rng = np.random.default_rng(33)
    w = Codeword(rng.uniform(0, TWO_PI, 8))
    q = project_to_grid(w, bits=3)
    q2 = project_to_grid(q, bits=3)
    np.testing.assert_array_equal(q.phases, q2.phases)


def test_project_to_grid_ties_round_down():
    w = Codeword(np.array([math.pi / 2]))  # exactly between 0 and pi for B=1
    q = project_to_grid(w, bits=1)
    assert q.phases[0] == 0.0


def test_project_to_grid_elementwise_bruteforce():
    rng = np.random.default_rng(44)
    w = Codeword(rng.uniform(0, TWO_PI, 16))
    q = project_to_grid(w, bits=2)
    grid = np.arange(4) * (TWO_PI / 4)
    for wp, qp in zip(w.phases, q.phases):
        dists = np.abs(np.exp(1j * wp) - np.exp(1j * grid))
        assert qp == pytest.approx(grid[int(np.argmin(dists))], abs=1e-12)


def test_projection_is_codeword_euclidean_optimum():
    # whole-vector search over every grid codeword for small N and B
    rng = np.random.default_rng(55)
    for n, bits in ((2, 3), (3, 2), (4, 2)):
        w = Codeword(rng.uniform(0, TWO_PI, n))
        q = project_to_grid(w, bits=bits)
        step = TWO_PI / (1 << bits)
        best = None
        for combo in itertools.product(range(1 << bits), repeat=n):
            cand = np.array(combo) * step
            dist = np.linalg.norm(np.exp(1j * w.phases) - np.exp(1j * cand))
            if best is None or dist < best - 1e-12:
                best = dist
        got = np.linalg.norm(np.exp(1j * w.phases) - np.exp(1j * q.phases))
        assert got == pytest.approx(best, abs=1e-9)


def test_quantized_design_matches_exhaustive_tiny_instance():
    # N=2, B=2, K=1: all 16 feasible codewords are enumerable
    g2 = ArrayGeometry.ula(2)
    samples = generate_training_set(ChannelParams.single_ray(), g2, 50,
                                    np.random.default_rng(66))
    metric = Metric.avg_gain()
    cfg = LloydConfig(k=1, seed=0, restarts=10, quant_bits=2)
    res = quantized_lloyd_design(samples, metric, cfg)
    step = TWO_PI / 4
    best = max(
        np.mean(metric.value(np.abs(samples @ np.conj(
            np.exp(1j * np.array(c) * step) / math.sqrt(2))) ** 2))
        for c in itertools.product(range(4), repeat=2))
    assert res.objective_history[-1] == pytest.approx(best, abs=1e-9)


def test_quantized_design_fine_grid_approaches_ideal():
    samples = generate_training_set(ChannelParams.single_ray(), G8, 400,
                                    np.random.default_rng(77))
    metric = Metric.avg_gain()
    ideal = lloyd_design(samples, metric, LloydConfig(k=4, seed=3, restarts=2))
    quant = quantized_lloyd_design(samples, metric,
                                   LloydConfig(k=4, seed=3, restarts=2, quant_bits=10))
    rel = abs(ideal.objective_history[-1] - quant.objective_history[-1])
    assert rel / ideal.objective_history[-1] < 0.005


def test_quantized_design_all_on_grid_and_monotone():
    samples = generate_training_set(ChannelParams.single_ray(), G8, 300,
                                    np.random.default_rng(88))
    cfg = LloydConfig(k=3, seed=5, restarts=2, quant_bits=2)
    res = quantized_lloyd_design(samples, Metric.avg_gain(), cfg)
    step = TWO_PI / 4
    ratio = res.codebook.phases / step
    np.testing.assert_allclose(ratio, np.round(ratio), atol=1e-9)
    hist = res.objective_history
    assert all(a <= b for a, b in zip(hist, hist[1:]))


def test_quantized_design_requires_bits():
    samples = generate_training_set(ChannelParams.single_ray(), G8, 10,
                                    np.random.default_rng(0))
    with pytest.raises(ValueError):
        quantized_lloyd_design(samples, Metric.avg_gain(), LloydConfig(k=2))


def test_config_validation():
    with pytest.raises(ValueError):
        LloydConfig(k=0)
    with pytest.raises(ValueError):
        LloydConfig(k=1, step_size=-1.0)
    with pytest.raises(ValueError):
        LloydConfig(k=1, quant_bits=0)
    with pytest.raises(ValueError):
        lloyd_design(np.zeros((0, 4)), Metric.avg_gain(), LloydConfig(k=1))
