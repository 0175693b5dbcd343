"""Exit criteria, one test per criterion.

Each test prints a single ``[PASS]``/``[FAIL]`` line (visible with ``-s``) and
then asserts. Run ``pytest tests/test_acceptance.py -s`` or execute this file
directly for the summary alone.
"""
import io
import itertools
import math
import sys
import time

import numpy as np
import pytest

from gridforecast import kernels
from gridforecast.baseline import BaselineConfig, extrapolate, grid_for
from gridforecast.gridgeom import GridSpec, pixel_to_world, world_to_pixel
from gridforecast.hgrd import Raster, read_hgrd, write_hgrd
from gridforecast.losses import LossConfig, cross_entropy, focal_loss, focal_loss_grad
from gridforecast.metrics import gamma, hits_at, miss_rate, miss_threshold, soft_map
from gridforecast.pipeline import (coverage_sweep, ground_truths, in_grid, predict_scenarios,
                                   to_prediction_set)
from gridforecast.sampler import KernelSize, box_sum, greedy_sample, kernel_size, raw_kernel_size
from gridforecast.scenario_io import scenarios_from_json
from gridforecast.synthetic import generate_synthetic
from malformed import MALFORMED
from oracles import naive_box_sum, naive_greedy
from test_metrics import _bucket_fixture, oracle_ap

pytestmark = pytest.mark.acceptance

LAMBDA_TABLE = {3.0: (1.0, 2.0), 5.0: (1.8, 3.6), 8.0: (3.0, 6.0)}
N_GRID = (1, 2, 3, 4, 5, 6, 10, 15, 20, 25, 30)


def verdict(num, title, ok, detail="", elapsed=None, limit=None):
    if limit is not None:
        ok = ok and elapsed < limit
        detail = f"{detail}; {elapsed:.2f}s (limit {limit:g}s)".lstrip("; ")
    print(f"[{'PASS' if ok else 'FAIL'}] criterion {num:>2}: {title} ({detail})")
    return ok


def test_c01_gamma_endpoints_and_monotone():
    t0 = time.perf_counter()
    vs = np.linspace(0.0, 30.0, 1000)
    g = np.array([gamma(v) for v in vs])
    ends = gamma(1.4) == 0.5 and gamma(11.0) == 1.0
    mono = bool(np.all(np.diff(g) >= 0))
    ok = verdict(1, "gamma endpoints and monotonicity", ends and mono,
                 f"gamma(1.4)={gamma(1.4)}, gamma(11)={gamma(11.0)}, monotone={mono}",
                 time.perf_counter() - t0, 1.0)
    assert ok


def test_c02_lambda_table():
    got = {t: miss_threshold(t) for t in LAMBDA_TABLE}
    ok = verdict(2, "lambda_t table", got == LAMBDA_TABLE, str(got))
    assert ok


def test_c03_kernel_sizing():
    t0 = time.perf_counter()
    rng = np.random.default_rng(3)
    bad = []
    for _ in range(100):
        v = float(rng.uniform(0, 30))
        t = float(rng.choice(list(LAMBDA_TABLE)))
        ppm = float(rng.uniform(0.25, 4.0))
        lat, lon = LAMBDA_TABLE[t]
        g = min(max((v - 1.4) / (11 - 1.4), 0.0), 1.0) / 2 + 0.5
        want = []
        for lam in (lat, lon):
            k = math.floor(4 * g * lam * ppm)
            k = k - 1 if k % 2 == 0 else k
            want.append(max(k, 1))
        ks = kernel_size(v, t, ppm)
        if (ks.k_lat, ks.k_lon) != tuple(want):
            bad.append((v, t, ppm))
    cancel_bad = []
    for t, (lat, lon) in LAMBDA_TABLE.items():
        expect = (math.floor(4 * lat), math.floor(4 * lon))
        for v in np.linspace(0, 30, 61):
            if raw_kernel_size(float(v), t, 1.0 / gamma(float(v))) != expect:
                cancel_bad.append((float(v), t))
    ok = verdict(3, "kernel sizing and velocity cancellation", not bad and not cancel_bad,
                 f"{len(bad)} sizing mismatches, {len(cancel_bad)} cancellation mismatches",
                 time.perf_counter() - t0, 1.0)
    assert ok


def _sampler_cases():
    rng = np.random.default_rng(4)
    for _ in range(500):
        h, w = int(rng.integers(1, 33)), int(rng.integers(1, 33))
        if rng.random() < 0.3:
            conv = rng.integers(0, 4, (h, w)).astype(np.float64)  # plenty of ties
        else:
            conv = rng.random((h, w))
        k = KernelSize(int(rng.integers(0, 8)) * 2 + 1, int(rng.integers(0, 8)) * 2 + 1)
        yield conv, k, int(rng.integers(1, 11)), GridSpec(h, w, float(rng.uniform(0.5, 3)))


@pytest.fixture(scope="module")
def sampler_outputs():
    """Run criterion 4 once per backend; criterion 6 reuses the outputs."""
    results = {}
    previous = kernels.BACKEND
    try:
        for name in kernels.available_backends():
            kernels.use_backend(name)
            t0 = time.perf_counter()
            outs, mismatches = [], 0
            for conv, k, n, spec in _sampler_cases():
                got = greedy_sample(conv, n, k, spec)
                want = naive_greedy(conv, n, k.half_rows, k.half_cols)
                same = (got.pixels == [p for p, _ in want]
                        and got.confidences == [c for _, c in want]
                        and got.coordinates == [tuple(pixel_to_world(spec, p)) for p, _ in want])
                mismatches += not same
                outs.append((got, k))
            results[name] = (outs, mismatches, time.perf_counter() - t0)
    finally:
        kernels.use_backend(previous)
    return results


def test_c04_sampler_oracle(sampler_outputs):
    ok = True
    for name, (outs, mismatches, elapsed) in sampler_outputs.items():
        # the time limit covers the sampler plus its oracle for one backend
        ok &= verdict(4, f"greedy sampler equals rescan oracle [{name}]", mismatches == 0,
                      f"{mismatches}/{len(outs)} mismatches", elapsed, 30.0)
    assert ok


def test_c05_box_sum_oracle():
    ok = True
    previous = kernels.BACKEND
    try:
        for name in kernels.available_backends():
            kernels.use_backend(name)
            rng = np.random.default_rng(5)
            t0 = time.perf_counter()
            worst = 0.0
            for _ in range(200):
                h = rng.random((16, 16))
                k = KernelSize(int(rng.integers(0, 8)) * 2 + 1, int(rng.integers(0, 8)) * 2 + 1)
                diff = np.abs(box_sum(h, k) - naive_box_sum(h, k.rows, k.cols)).max()
                worst = max(worst, float(diff))
            ok &= verdict(5, f"box_sum equals naive oracle [{name}]", worst <= 1e-5,
                          f"max abs error {worst:.2e}", time.perf_counter() - t0, 5.0)
    finally:
        kernels.use_backend(previous)
    assert ok


def test_c06_non_redundancy(sampler_outputs):
    ok = True
    for name, (outs, _, _) in sampler_outputs.items():
        pairs = violations = 0
        for s, k in outs:
            for (r1, c1), (r2, c2) in itertools.combinations(s.pixels, 2):
                pairs += 1
                if abs(r1 - r2) <= k.half_rows and abs(c1 - c2) <= k.half_cols:
                    violations += 1
        ok &= verdict(6, f"sample pairs never share an exclusion window [{name}]",
                      violations == 0, f"{violations} violations over {pairs} pairs")
    assert ok


def test_c07_constant_velocity_zero_miss():
    t0 = time.perf_counter()
    scs = generate_synthetic(7, 100, {"constant_velocity": 1.0})
    preds = predict_scenarios(scs, n=6, policy="velocity")
    gts = ground_truths(scs)
    tracks = [sc.track(tid) for sc in scs for tid in sc.targets]
    rates, counts, missed = {}, {}, []
    for t in (3.0, 5.0, 8.0):
        keep = [i for i, tr in enumerate(tracks)
                if gts[i].is_valid(t) and in_grid(tr, extrapolate(tr, t), t, "velocity")]
        p = [to_prediction_set(tid, sid, s) for j, (sid, tid, s) in enumerate(preds) if j in keep]
        rates[t] = miss_rate(p, [gts[i] for i in keep], t)
        counts[t] = len(keep)
        for i, ps in zip(keep, p):
            if not any(hits_at(ps, gts[i], t)):
                spec = grid_for(tracks[i], t, "velocity")
                r, c = world_to_pixel(spec, extrapolate(tracks[i], t))
                k = kernel_size(tracks[i].current.speed, t, spec.pixels_per_meter)
                edge = min(r, c, spec.height_px - 1 - r, spec.width_px - 1 - c)
                missed.append(f"{t:g}s target pixel ({r},{c}) {edge}px from border, "
                              f"half window {k.half_rows}x{k.half_cols}")
    detail = ", ".join(f"MR@{t:g}s={r:.3f} over {counts[t]}" for t, r in rates.items())
    if missed:
        detail += "; misses: " + "; ".join(missed)
    ok = verdict(7, "constant-velocity baseline never misses in-bounds targets",
                 all(r == 0.0 for r in rates.values()), detail,
                 time.perf_counter() - t0, 60.0)
    assert ok


def test_c08_miss_rate_monotone_in_n():
    t0 = time.perf_counter()
    scs = generate_synthetic(8, 200)
    cfg = BaselineConfig()
    cfg = BaselineConfig(cfg.kind, 3 * cfg.sigma_growth, 3 * cfg.base_sigma)
    preds = [to_prediction_set(tid, sid, s)
             for sid, tid, s in predict_scenarios(scs, n=max(N_GRID), cfg=cfg)]
    gts = ground_truths(scs)
    curves, ok = {}, True
    for t in (3.0, 5.0, 8.0):
        curves[t] = [miss_rate([p.truncated(n) for p in preds], gts, t) for n in N_GRID]
        ok &= all(b <= a for a, b in zip(curves[t], curves[t][1:]))
    detail = "; ".join(f"{t:g}s: " + " ".join(f"{m:.3f}" for m in c) for t, c in curves.items())
    ok = verdict(8, "MR(n) non-increasing under a miscalibrated baseline", ok, detail,
                 time.perf_counter() - t0, 120.0)
    assert ok


def test_c09_coverage_shape():
    scs = generate_synthetic(9, 300)
    speeds = [sc.track(t).current.speed for sc in scs for t in sc.targets]
    rows = coverage_sweep(scs, (1.0, 2.0, 3.0), (3.0, 5.0, 8.0))
    cov = {(p, t): f for p, t, f in rows}
    mono = all(cov[(1.0, t)] >= cov[(2.0, t)] >= cov[(3.0, t)] for t in (3.0, 5.0, 8.0))
    detail = (f"speeds {min(speeds):.1f}-{max(speeds):.1f} m/s; "
              + " ".join(f"({t:g}s,{p:g})={cov[(p, t)]:.3f}" for p, t in sorted(cov)))
    ok = verdict(9, "coverage non-increasing in ppm", mono and cov[(1.0, 8.0)] >= cov[(2.0, 8.0)],
                 detail)
    assert ok


def test_c10_loss_identities():
    t0 = time.perf_counter()
    rng = np.random.default_rng(10)
    zero = LossConfig(focal_alpha=0.0, focal_beta=0.0)
    worst_id = 0.0
    for _ in range(100):
        p = rng.random((16, 16))
        y = (rng.random((16, 16)) < 0.1).astype(np.float64)
        worst_id = max(worst_id, abs(focal_loss(p, y, zero) - cross_entropy(p, y)))
    worst_grad = 0.0
    step = 1e-6
    for cfg in (LossConfig(), zero):
        p = rng.uniform(0.05, 0.95, (6, 6))
        y = rng.random((6, 6))
        y[2, 2] = 1.0
        analytic = focal_loss_grad(p, y, cfg)
        for idx in np.ndindex(p.shape):
            a, b = p.copy(), p.copy()
            a[idx] += step
            b[idx] -= step
            fd = (focal_loss(a, y, cfg) - focal_loss(b, y, cfg)) / (2 * step)
            worst_grad = max(worst_grad, abs(fd - analytic[idx]) / abs(analytic[idx]))
    ok = verdict(10, "focal(0,0) equals cross-entropy; gradient check",
                 worst_id <= 1e-6 and worst_grad <= 1e-4,
                 f"identity err {worst_id:.1e}, worst relative grad err {worst_grad:.1e}",
                 time.perf_counter() - t0, 10.0)
    assert ok


def test_c11_soft_map_boundaries():
    perfect = soft_map(*_bucket_fixture([[(0, 1.0)], [(0, 0.4)], [(0, 0.9)], [(0, 0.2)]]), 3.0)
    never = soft_map(*_bucket_fixture([[(50, 0.9), (60, 0.3)]] * 3), 3.0)
    # target 0: hit .9 plus a duplicate hit .8; target 1: miss .7 then hit .6
    alone = soft_map(*_bucket_fixture([[(0, .9)], [(50, .7), (0, .6)]]), 3.0)
    dup = soft_map(*_bucket_fixture([[(0, .9), (0.5, .8)], [(50, .7), (0, .6)]]), 3.0)
    hand = oracle_ap([[(.9, True)], [(.7, False), (.6, True)]], 2)
    ok = verdict(11, "soft mAP boundary cases",
                 perfect == 1.0 and never == 0.0 and alone == dup == pytest.approx(hand),
                 f"perfect={perfect}, never={never}, with dup={dup:.4f}, without={alone:.4f}, "
                 f"oracle={hand:.4f}")
    assert ok


def test_c12_format_round_trips():
    rng = np.random.default_rng(12)
    identical = 0
    for _ in range(50):
        c, h, w = int(rng.integers(1, 28)), int(rng.integers(1, 65)), int(rng.integers(1, 65))
        spec = GridSpec(h, w, float(rng.uniform(0.5, 4)), tuple(rng.uniform(-500, 500, 2)),
                        float(rng.uniform(-3, 3)))
        vals = (rng.standard_normal((c, h, w)) * 10 ** rng.uniform(-3, 3)).astype(np.float32)
        buf = io.BytesIO()
        write_hgrd(buf, Raster(spec, vals))
        data = buf.getvalue()
        back = read_hgrd(io.BytesIO(data))
        out = io.BytesIO()
        write_hgrd(out, back)
        identical += back.values.tobytes() == vals.tobytes() and out.getvalue() == data
    rejected = []
    for name, text, cls, _ in MALFORMED:
        try:
            scenarios_from_json(text)
        except cls as e:
            rejected.append(type(e) is cls)
        except Exception:
            rejected.append(False)
        else:
            rejected.append(False)
    ok = verdict(12, "HGRD round-trips and malformed scenario rejection",
                 identical == 50 and len(MALFORMED) == 10 and all(rejected),
                 f"{identical}/50 bit-identical, {sum(rejected)}/{len(MALFORMED)} fixtures "
                 "rejected with the expected class")
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s", "-p", "no:cacheprovider"]))
