"""Fekete configurations against brute-force and closed-form oracles."""

import json
import math

import numpy as np
import pytest

import coulomblab as cl

DISK = cl.Disk(0.0, 1.0)
SEGMENT = cl.Segment(-2.0, 2.0)


# ---------------------------------------------------------------------------
# objective
# ---------------------------------------------------------------------------

def test_log_delta_examples():
    assert cl.log_delta(DISK, cl.Configuration([1.0, -1.0])) == pytest.approx(math.log(2))
    # pair at distance 4 with green penalty (N-1)(log 2 + log 2)
    assert cl.log_delta(DISK, cl.Configuration([2.0, -2.0])) == pytest.approx(0.0, abs=1e-12)
    assert cl.log_delta(DISK, cl.Configuration([1.0, 1.0])) == -math.inf


@pytest.mark.parametrize("n", range(2, 13))
def test_log_delta_roots_of_unity(n):
    # oracle: direct product of pair distances is n^(n/2)
    roots = np.exp(2j * math.pi * np.arange(n) / n)
    prod = np.prod([abs(roots[i] - roots[j]) for i in range(n) for j in range(i + 1, n)])
    assert math.log(prod) == pytest.approx((n / 2) * math.log(n), abs=1e-9)
    assert cl.log_delta(DISK, cl.Configuration(roots)) == pytest.approx(
        (n / 2) * math.log(n), abs=1e-10)


# ---------------------------------------------------------------------------
# solve
# ---------------------------------------------------------------------------

def test_solve_disk_pair_brute_force():
    # oracle: grid maximization over two boundary angles
    grid = np.linspace(0, 2 * math.pi, 721)
    t1, t2 = np.meshgrid(grid, grid)
    vals = np.log(np.maximum(np.abs(np.exp(1j * t1) - np.exp(1j * t2)), 1e-300))
    assert vals.max() == pytest.approx(math.log(2), abs=1e-5)
    res = cl.solve(DISK, 2, seed=1)
    assert res.log_delta == pytest.approx(math.log(2), abs=1e-9)
    assert res.converged


def test_solve_disk_matches_roots_of_unity():
    for n in (5, 9, 16):
        res = cl.solve(DISK, n, seed=2)
        assert res.log_delta == pytest.approx((n / 2) * math.log(n), abs=1e-8)
        assert res.max_green_violation <= 1e-8


def test_solve_segment_three_points():
    # oracle: 1-D brute force over interior point position with ends fixed
    xs = np.linspace(-1.999, 1.999, 20001)
    vals = np.log(xs + 2) + np.log(2 - xs) + math.log(4)
    assert xs[np.argmax(vals)] == pytest.approx(0.0, abs=1e-3)
    res = cl.solve(SEGMENT, 3, seed=3)
    assert np.allclose(np.sort(res.configuration.points.real), [-2.0, 0.0, 2.0], atol=1e-6)
    assert np.allclose(res.configuration.points.imag, 0.0, atol=1e-12)


def test_solve_containment():
    for K in (DISK, SEGMENT, cl.Ellipse(0.0, 2.0, 1.0)):
        res = cl.solve(K, 17, seed=4)
        assert res.max_green_violation <= 1e-8
        assert res.converged


def test_scaling_covariance():
    base = cl.solve(cl.Disk(0.0, 1.0), 12, seed=7)
    for r in (0.5, 2.0):
        scaled = cl.solve(cl.Disk(0.0, r), 12, seed=7)
        shift = (12 * 11 / 2) * math.log(r)
        assert scaled.log_delta - base.log_delta == pytest.approx(shift, abs=1e-6)


def test_rotation_invariance():
    res = cl.solve(DISK, 10, seed=8)
    rotated = cl.Configuration(np.exp(0.37j) * res.configuration.points)
    assert abs(cl.log_delta(DISK, rotated) - res.log_delta) < 1e-12


def test_trace_monotone():
    res = cl.solve(DISK, 15, seed=9)
    trace = np.asarray(res.trace)
    assert np.all(np.diff(trace) >= 0)


# ---------------------------------------------------------------------------
# capacity estimate
# ---------------------------------------------------------------------------

def test_capacity_estimate_disk_closed_form():
    # the optimum is the roots-of-unity value exp(log N / (N - 1))
    for n in (8, 16, 24):
        est = cl.capacity_estimate(DISK, n, seed=10)
        assert est == pytest.approx(math.exp(math.log(n) / (n - 1)), rel=1e-8)


def test_capacity_estimate_decreasing():
    ests = [cl.capacity_estimate(DISK, n, seed=11) for n in (8, 12, 16, 24, 32)]
    assert all(a > b for a, b in zip(ests[:-1], ests[1:]))


def test_capacity_estimate_scaled_disk():
    est = cl.capacity_estimate(cl.Disk(0.0, 2.0), 16, seed=12)
    assert est == pytest.approx(2.0 * math.exp(math.log(16) / 15), rel=1e-8)


def test_capacity_estimate_validation():
    with pytest.raises(ValueError):
        cl.capacity_estimate(DISK, 4)
    with pytest.raises(ValueError):
        cl.solve(DISK, 1)


# ---------------------------------------------------------------------------
# persistence
# ---------------------------------------------------------------------------

def test_fekete_result_save(tmp_path):
    res = cl.solve(DISK, 6, seed=13)
    base = tmp_path / "fekete_run"
    res.save(base)
    meta = json.loads((tmp_path / "fekete_run.json").read_text())
    assert meta["log_delta"] == pytest.approx(res.log_delta)
    assert meta["converged"] is True
    loaded = cl.Configuration.load_csv(tmp_path / "fekete_run.csv")
    assert np.allclose(loaded.points, res.configuration.points)


def test_threaded_starts_match_sequential(monkeypatch):
    seq = cl.solve(DISK, 9, seed=21)
    monkeypatch.setenv("COULOMBLAB_THREADS", "3")
    par = cl.solve(DISK, 9, seed=21)
    assert par.log_delta == pytest.approx(seq.log_delta, abs=1e-12)
    assert par.start_index == seq.start_index


def test_capacity_estimate_segment_trend():
    ests = [cl.capacity_estimate(SEGMENT, n, seed=14) for n in (8, 16, 32)]
    assert all(a > b for a, b in zip(ests[:-1], ests[1:]))
    assert all(e > 1.0 for e in ests)  # converges to capacity 1 from above
    assert ests[-1] < 1.2
