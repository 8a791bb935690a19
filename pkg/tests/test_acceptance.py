"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with `pytest tests/test_acceptance.py -s` to see the lines.  The full
9x8 determinism/runtime check is heavy and only runs when RUN_FULL_BENCH=1
(see the full_bench marker); a reduced determinism check always runs.
"""

import json
import os
import time
from pathlib import Path

import numpy as np
import pytest

from conftest import make_dataset
from effortbench import default_config_path, reference, report
from effortbench.evaluation import (UndefinedMetricError, loocv_run, mmre,
                                    rmse)
from effortbench.ingest import DATASET_IDS, load_dataset, validate_dataset
from effortbench.learners import LearnerSpec, default_grid, fit
from effortbench.learners.linear import fit_bglm, fit_lrbs, fit_pls
from effortbench.learners.mars import fit_mars
from effortbench.learners.tree import fit_cart, fit_rf
from effortbench.learners import elm as elm_mod
from effortbench.learners import gp as gp_mod
from effortbench.numerics import RngStream, apply_scaler, fit_scaler
from test_learners_linear import cv_rmse_oracle, ols_predict
from test_learners_tree import oracle_tree_predict

REPO = Path(__file__).resolve().parent.parent


def announce(number, name, ok):
    print(f"{'PASS' if ok else 'FAIL'} criterion {number}: {name}")
    assert ok, f"criterion {number}: {name}"


def test_criterion_1_reference_table_consistency():
    t0 = time.perf_counter()
    rows, ok = reference.verify_consistency()
    elapsed = time.perf_counter() - t0
    by = {r.learner: r for r in rows}
    ok = ok and abs(by["PLS"].recomputed_avg - 1577.51) <= 0.01
    ok = ok and abs(by["ELM"].recomputed_avg - 1651.585) <= 0.01
    ok = ok and abs(by["LM"].recomputed_avg - 21100.52) <= 0.01
    ok = ok and [by[k].recomputed_rank for k in
                 ("PLS", "ELM", "MARS", "GP", "BGLM", "RF", "LRBS", "CART", "LM")
                 ] == list(range(1, 10))
    ok = ok and elapsed < 1.0
    announce(1, f"reference Avg/Rank recomputation ({elapsed * 1e3:.0f} ms)", ok)


def test_criterion_2_dataset_profiles_reproduced():
    t0 = time.perf_counter()
    waived = []
    failed = []
    for ds_id in DATASET_IDS:
        result = validate_dataset(ds_id)
        failed += [(ds_id, c.column, c.stat) for c in result.failures]
        waived += [(ds_id, c.column, c.stat) for c in result.waived]
    elapsed = time.perf_counter() - t0
    # the one documented waiver: the printed kemerer effort std is unattainable
    ok = not failed and waived == [("kemerer", "Effort", "std")] and elapsed < 5.0
    announce(2, f"profile cells match within one printed unit "
                f"(waivers: {waived}, {elapsed:.2f} s)", ok)


def test_criterion_3_metric_oracles():
    recs = [type("R", (), {"fold_index": i, "predicted": p, "actual": a})()
            for i, (p, a) in enumerate([(2.5, 1.0), (2.0, 2.0), (1.5, 3.0)])]
    ok = abs(rmse(recs).value - np.sqrt(1.5)) <= 1e-12
    ok = ok and abs(mmre(recs).value - 2 / 3) <= 1e-12
    try:
        mmre([type("R", (), {"fold_index": 0, "predicted": 1.0, "actual": 0.0})()])
        ok = False
    except UndefinedMetricError:
        pass
    announce(3, "rmse = sqrt(1.5), mmre = 2/3 at 1e-12; zero actual rejected", ok)


FAST_PARAMS = {
    "ELM": {"hidden_width": 6, "ridge": 1e-2},
    "CART": {"min_leaf": 1, "max_depth": None},
    "RF": {"n_trees": 4, "mtry": 2, "min_leaf": 1},
    "PLS": {"n_components": 2},
    "GP": {"length_scale_factor": 1.0, "noise_frac": 1e-2},
    "LRBS": {"criterion_folds": 3},
    "MARS": {"max_terms": 5, "gcv_penalty": 3.0},
    "LM": {},
    "BGLM": {},
}


def test_criterion_4_loocv_oracle_and_leakage_canary(rng):
    ds = make_dataset(np.array([[1.0], [2.0], [3.0]]), [1.0, 2.0, 3.0])
    recs = loocv_run(ds, LearnerSpec("MEAN"), rng)
    ok = [r.predicted for r in recs] == [2.5, 2.0, 1.5] and len(recs) == 3

    g = np.random.default_rng(4)
    X = g.normal(size=(10, 3))
    y = X[:, 0] * 3 + g.normal(size=10) * 0.2
    probe = 4
    for kind, params in FAST_PARAMS.items():
        spec = LearnerSpec(kind, params)
        base = loocv_run(make_dataset(X, y), spec, rng)
        ok = ok and len(base) == 10
        y_mut = y.copy()
        y_mut[probe] = 1e6
        mutated = loocv_run(make_dataset(X, y_mut), spec, rng)
        ok = ok and mutated[probe].predicted == base[probe].predicted
    announce(4, "mean-predictor records [2.5, 2, 1.5]; held-out target mutation "
                "never moves its prediction (all nine learners)", ok)


def test_criterion_5_learner_property_suite(rng):
    t0 = time.perf_counter()
    g = np.random.default_rng(10)
    checks = {}

    X = g.normal(size=(12, 3))
    y_lin = X @ [2.0, -1.0, 0.5] + 3

    const_ok = True
    for kind, params in FAST_PARAMS.items():
        m = fit(LearnerSpec(kind, params), X, np.full(12, 5.5), rng)
        const_ok &= bool(np.max(np.abs(m.predict_many(X) - 5.5)) <= 1e-6)
    checks["constant-target (9 kinds, 1e-6)"] = const_ok

    Xs = apply_scaler(fit_scaler(X), X)
    y_noisy = y_lin + 0.1 * g.normal(size=12)
    pls = fit_pls(Xs, y_noisy, n_components=3)
    checks["PLS at full rank == OLS (1e-6)"] = bool(np.allclose(
        pls.predict_many(Xs), ols_predict(Xs, y_noisy, Xs), atol=1e-6))

    bglm = fit_bglm(Xs, y_noisy, alpha=1e-12, beta=1.0)
    checks["BGLM prior floor == OLS (1e-6)"] = bool(np.allclose(
        bglm.predict_many(Xs), ols_predict(Xs, y_noisy, Xs), atol=1e-6))

    gp_model = gp_mod.fit_gp(Xs, y_noisy, length_scale=1.5, noise_var=0.0)
    checks["GP zero-noise interpolation (1e-6)"] = bool(np.allclose(
        gp_model.predict_many(Xs), y_noisy, atol=1e-6))

    cart_ok = True
    for seed in range(5):
        gg = np.random.default_rng(seed)
        n = int(gg.integers(6, 21))
        Xc = np.round(gg.normal(size=(n, 2)) * 4)
        yc = np.round(gg.normal(size=n) * 8)
        model = fit_cart(Xc, yc, min_leaf=2)
        want = [oracle_tree_predict(Xc, yc, 2, None, Xc[i]) for i in range(n)]
        cart_ok &= bool(np.allclose(model.predict_many(Xc), want, atol=1e-9))
    checks["CART == brute-force split oracle (<= 20 rows)"] = cart_ok

    Xh = np.array([[0.0], [0.5], [1.0], [1.5], [2.0]])
    yh = np.maximum(0.0, Xh[:, 0] - 1.0)
    mars_small = fit_mars(Xh, yh, max_terms=11, gcv_penalty=3.0)
    knot_ok = 1.0 in {t for _, t, _ in mars_small.terms}
    knot_ok &= float(np.sqrt(np.mean(
        (mars_small.predict_many(Xh) - yh) ** 2))) <= 1e-8
    Xm = g.normal(size=(25, 3))
    ym = np.maximum(0, Xm[:, 0]) + 0.5 * g.normal(size=25)
    mars_big = fit_mars(Xm, ym, max_terms=11, gcv_penalty=3.0)
    knot_ok &= mars_big.gcv is not None and mars_big.gcv <= mars_big.forward_gcv + 1e-12
    checks["MARS knot recovery + backward GCV <= forward GCV"] = knot_ok

    y8 = g.normal(size=12) * 10
    elm_model = elm_mod.fit_elm(Xs, y8, hidden_width=16, ridge=0.0,
                                rng=RngStream(77))
    resid = elm_model.predict_many(Xs) - y8
    checks["ELM interpolation at width >= N, ridge 0"] = bool(
        np.sqrt(np.mean(resid ** 2)) <= 1e-6 * (np.std(y8) + 1))

    cart = fit_cart(X, y_noisy, min_leaf=2)
    rf1 = fit_rf(X, y_noisy, n_trees=1, mtry=3, min_leaf=2, rng=RngStream(0),
                 bootstrap=False)
    checks["RF single-tree degeneracy == CART"] = bool(np.array_equal(
        cart.predict_many(X), rf1.predict_many(X)))

    from itertools import combinations
    Xl = g.normal(size=(12, 3))
    yl = 2.0 * Xl[:, 0] + 1e-3 * g.normal(size=12)
    best_subset, best_score = None, None
    for size in range(0, 4):
        for subset in combinations(range(3), size):
            s = cv_rmse_oracle(Xl, yl, subset, 4)
            if best_score is None or s < best_score - 1e-12:
                best_subset, best_score = subset, s
    lrbs = fit_lrbs(Xl, yl, criterion_folds=4)
    checks["LRBS == exhaustive best-subset oracle"] = lrbs.selected == best_subset

    elapsed = time.perf_counter() - t0
    ok = all(checks.values()) and elapsed < 60.0
    for name, passed in checks.items():
        print(f"  {'ok' if passed else 'FAIL'}: {name}")
    announce(5, f"learner property suite ({elapsed:.1f} s)", ok)


REDUCED_CONFIG = {
    "datasets": ["albrecht", "kemerer"],
    "learners": [
        {"kind": "ELM", "grid": {"hidden_width": [4, 8], "ridge": [0.01]}},
        {"kind": "RF", "grid": {"n_trees": [5], "mtry": [2], "min_leaf": [2]}},
        {"kind": "LM"},
    ],
    "seed": 20190101,
    "inner_folds": 5,
    "metrics": ["RMSE", "MMRE"],
}


def test_criterion_6_determinism_reduced():
    config = report.parse_config(REDUCED_CONFIG)
    runs = [report.run_benchmark(config, jobs=j)[0] for j in (1, 1, 2)]
    blobs = [json.dumps(p, sort_keys=True) for p in runs]
    ok = blobs[0] == blobs[1] == blobs[2]
    announce(6, "reduced benchmark: reruns byte-identical, parallel == sequential",
             ok)


@pytest.mark.full_bench
@pytest.mark.skipif(not os.environ.get("RUN_FULL_BENCH"),
                    reason="full 9x8 double run; set RUN_FULL_BENCH=1")
def test_criterion_6_full_benchmark_determinism_and_runtime():
    jobs = int(os.environ.get("BENCH_JOBS", "1"))
    config = report.load_config(default_config_path())
    t0 = time.perf_counter()
    first, failures1 = report.run_benchmark(config, jobs=jobs)
    elapsed = time.perf_counter() - t0
    second, failures2 = report.run_benchmark(config, jobs=jobs)
    ok = not failures1 and not failures2
    ok = ok and json.dumps(first, sort_keys=True) == json.dumps(second, sort_keys=True)
    ok = ok and elapsed < 1800.0
    announce(6, f"full 9x8 benchmark twice, byte-identical, {elapsed / 60:.1f} min "
                f"(jobs={jobs})", ok)


def test_criterion_7_reference_report_and_comparison():
    path = REPO / "reference" / "report.json"
    ok = path.exists()
    flagged_count = None
    lm_albrecht = None
    if ok:
        payload = json.loads(path.read_text())
        lm_albrecht = payload["cells"]["LM"]["albrecht"]["rmse"]
        ok = 5.0 <= lm_albrecht <= 50.0
        ours = {k: {ds: c["rmse"] for ds, c in row.items()}
                for k, row in payload["cells"].items()}
        comparisons, agreements, skipped = reference.compare_cells(ours)
        ok = ok and len(comparisons) == 72 and not skipped
        flagged = [c for c in comparisons if c.flagged]
        flagged_count = len(flagged)
        # flags are informational; each one must carry a ratio beyond 3x
        ok = ok and all(c.ratio > 3.0 or c.ratio < 1 / 3.0 for c in flagged)
        ok = ok and len(agreements) == 8
    announce(7, f"committed reference report: LM albrecht RMSE = {lm_albrecht} "
                f"in [5, 50]; {flagged_count} cells flagged beyond 3x", ok)
