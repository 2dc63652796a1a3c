import math

import numpy as np
import pytest

from toposhadow.errors import FormatError
from toposhadow.evaluation import (
    FoldSpec,
    MetricsReport,
    confusion,
    evaluate_folds,
    fit_normal_target,
    grid_search,
    load_folds,
    oracle_predictor,
    perturb_sweep,
    topol_predictor,
    trajectory_rmse,
    write_folds,
)
from toposhadow.saliency import Params
from toposhadow.synth import make_dataset


def small_dataset(n=6):
    frames, entries = make_dataset(n_frames=n, seed=3, n_groups=3, n_folds=3)
    return frames, entries, FoldSpec(entries)


# ---------------------------------------------------------------- metrics


def test_worked_confusion_example():
    rep = MetricsReport(tp=8, tn=90, fp=1, fn=1)
    assert rep.acc == 0.98
    assert rep.tpr == pytest.approx(8.0 / 9.0, rel=1e-12)
    assert rep.tnr == pytest.approx(90.0 / 91.0, rel=1e-12)
    assert rep.ppv == pytest.approx(8.0 / 9.0, rel=1e-12)


def test_perfect_prediction():
    truth = np.zeros(100, dtype=np.uint8)
    truth[:9] = 1
    rep = confusion(truth, truth)
    assert (rep.tp, rep.tn, rep.fp, rep.fn) == (9, 91, 0, 0)
    assert rep.acc == 1.0 and rep.tpr == 1.0 and rep.tnr == 1.0 and rep.ppv == 1.0


def test_metric_identities_randomized():
    rng = np.random.default_rng(123)
    for _ in range(200):
        tp, tn, fp, fn = (int(v) for v in rng.integers(0, 50, size=4))
        rep = MetricsReport(tp=tp, tn=tn, fp=fp, fn=fn)
        total = tp + tn + fp + fn
        if total:
            assert abs(rep.acc - (tp + tn) / total) < 1e-12
        if tp + fn:
            assert abs(rep.tpr - tp / (tp + fn)) < 1e-12
        if tn + fp:
            assert abs(rep.tnr - tn / (tn + fp)) < 1e-12
        if tp + fp:
            assert abs(rep.ppv - tp / (tp + fp)) < 1e-12


def test_degenerate_denominators_are_nan():
    rep = confusion(np.zeros(10, dtype=np.uint8), np.zeros(10, dtype=np.uint8))
    assert math.isnan(rep.tpr)
    assert math.isnan(rep.ppv)
    assert rep.tnr == 1.0 and rep.acc == 1.0


def test_report_pooling():
    a = MetricsReport(tp=1, tn=2, fp=3, fn=4)
    b = MetricsReport(tp=10, tn=20, fp=30, fn=40)
    c = a + b
    assert (c.tp, c.tn, c.fp, c.fn) == (11, 22, 33, 44)


def test_confusion_length_mismatch():
    with pytest.raises(ValueError):
        confusion(np.zeros(5, dtype=np.uint8), np.zeros(6, dtype=np.uint8))


# ---------------------------------------------------------------- folds


def test_foldspec_roundtrip(tmp_path):
    _, entries, folds = small_dataset()
    path = tmp_path / "folds.txt"
    write_folds(entries, path)
    again = load_folds(path)
    assert again.folds() == folds.folds()
    assert again.frame_ids() == folds.frame_ids()
    for fold in folds.folds():
        for role in ("seen", "unseen"):
            assert again.members(fold, role) == folds.members(fold, role)
    for fid in folds.frame_ids():
        assert again.group_of(fid) == folds.group_of(fid)


def test_foldspec_groups_never_split():
    _, entries, folds = small_dataset()
    for fold in folds.folds():
        for role in ("seen", "unseen"):
            groups = {folds.group_of(f) for f in folds.members(fold, role)}
            other = {
                folds.group_of(f)
                for f in folds.members(fold, "seen" if role == "unseen" else "unseen")
            }
            assert not groups & other


def test_foldspec_rejects_bad_role():
    with pytest.raises(FormatError):
        FoldSpec([("f0", "g0", 1, "validation")])


def test_foldspec_rejects_duplicate_frame_in_fold():
    with pytest.raises(FormatError):
        FoldSpec([("f0", "g0", 1, "seen"), ("f0", "g0", 1, "unseen")])


def test_foldspec_rejects_group_split():
    with pytest.raises(FormatError):
        FoldSpec(
            [
                ("f0", "g0", 1, "seen"),
                ("f1", "g0", 1, "unseen"),
            ]
        )


def test_foldspec_rejects_inconsistent_group():
    with pytest.raises(FormatError):
        FoldSpec([("f0", "g0", 1, "seen"), ("f0", "g1", 2, "seen")])


def test_foldspec_rejects_bad_fold_number():
    with pytest.raises(FormatError):
        FoldSpec([("f0", "g0", 0, "seen")])


def test_load_folds_rejects_malformed_line(tmp_path):
    path = tmp_path / "folds.txt"
    path.write_text("frame000 g0 1\n")
    with pytest.raises(FormatError):
        load_folds(path)


# ---------------------------------------------------------------- harness


def test_oracle_predictor_all_ones():
    dataset, _, folds = small_dataset()
    report = evaluate_folds(dataset, folds, oracle_predictor())
    assert report.rows
    for row in report.rows:
        rep = row.metrics
        assert rep.acc == 1.0 and rep.tnr == 1.0
        assert rep.tpr == 1.0 and rep.ppv == 1.0
    assert report.averages["unseen"]["acc"] == 1.0


def test_evaluate_deterministic():
    dataset, _, folds = small_dataset()
    r1 = evaluate_folds(dataset, folds, topol_predictor())
    r2 = evaluate_folds(dataset, folds, topol_predictor())
    assert r1 == r2


def test_evaluate_workers_agree():
    dataset, _, folds = small_dataset()
    r1 = evaluate_folds(dataset, folds, topol_predictor(), workers=1)
    r2 = evaluate_folds(dataset, folds, topol_predictor(), workers=3)
    assert r1 == r2


def test_average_is_mean_of_fold_ratios():
    dataset, _, folds = small_dataset()
    report = evaluate_folds(dataset, folds, topol_predictor())
    for role in ("seen", "unseen"):
        per_fold = [r.metrics.acc for r in report.rows if r.role == role]
        assert report.averages[role]["acc"] == pytest.approx(
            sum(per_fold) / len(per_fold), rel=1e-12
        )


# ---------------------------------------------------------------- targets


def test_target_constant_vector():
    t = fit_normal_target([0.4, 0.4, 0.4, 0.4, 0.4])
    assert t.tolist() == [0.4] * 5


def test_target_endpoints_n101():
    measured = np.zeros(101)
    measured[50] = 1.0
    t = fit_normal_target(measured)
    assert t[50] == 1.0
    # direct evaluation of the bell at the first index
    expect = math.exp(-(50.0**2) / (2.0 * (101.0 / 6.0) ** 2))
    assert t[0] == pytest.approx(expect, rel=1e-12)
    assert expect == pytest.approx(0.012139, abs=1e-6)


def test_target_symmetry():
    rng = np.random.default_rng(2)
    m = rng.uniform(0.0, 1.0, size=31)
    t = fit_normal_target(m)
    assert np.array_equal(t, t[::-1])


def test_target_needs_three_frames():
    with pytest.raises(ValueError):
        fit_normal_target([0.1, 0.2])


def test_rmse_zero_and_offset():
    t = np.linspace(0.0, 1.0, 11)
    assert trajectory_rmse(t, t) == 0.0
    assert trajectory_rmse(t + 0.5, t) == 0.5
    assert trajectory_rmse(t - 0.5, t) == 0.5


# ---------------------------------------------------------------- sweeps


def test_sweep_row_shape():
    dataset, _, _ = small_dataset()
    rows = perturb_sweep(dataset, "epsilon", [50.0, 60.0])
    assert [v for v, _ in rows] == [50.0, 60.0]
    for _, rep in rows:
        for metric in (rep.acc, rep.tnr, rep.tpr, rep.ppv):
            assert math.isnan(metric) or 0.0 <= metric <= 1.0


def test_sweep_single_base_value_matches_eval():
    dataset, _, _ = small_dataset()
    rows = perturb_sweep(dataset, "epsilon", [60.0])
    base = perturb_sweep(dataset, "tau", [2])
    assert rows[0][1] == base[0][1]


def test_sweep_extreme_gamma():
    dataset, _, _ = small_dataset()
    ((_, rep),) = perturb_sweep(dataset, "gamma", [100.0])
    # nothing crosses the bar: everything is labeled shadow
    assert rep.tpr == 1.0
    assert rep.tnr == 0.0


def test_sweep_rejects_unknown_name():
    dataset, _, _ = small_dataset(n=3)
    with pytest.raises(ValueError):
        perturb_sweep(dataset, "kappa", [1.0])


def test_sweep_rejects_fractional_int_field():
    dataset, _, _ = small_dataset(n=3)
    with pytest.raises(ValueError):
        perturb_sweep(dataset, "tau", [2.5])


def test_grid_search_single_point():
    dataset, _, _ = small_dataset()
    best, score = grid_search(dataset, {"epsilon": [60.0], "tau": [2]})
    assert best == Params()
    ((_, rep),) = perturb_sweep(dataset, "epsilon", [60.0])
    assert score == rep.acc


def test_grid_search_prefers_earlier_tie():
    # an all-tissue miniature: tau=1 and tau=2 both classify perfectly,
    # so the first grid point must win the tie
    from toposhadow.synth import PhantomSpec, synth_phantom

    clean = {}
    for i in range(2):
        img, lab = synth_phantom(PhantomSpec(shadow_intervals=(), seed=20 + i))
        clean[f"frame{i:03d}"] = (img, lab)
    best, score = grid_search(clean, {"tau": [1, 2]})
    assert score == 1.0
    assert best.tau == 1


def test_grid_search_argmax_property():
    dataset, _, _ = small_dataset()
    grid = {"epsilon": [40.0, 60.0]}
    best, score = grid_search(dataset, grid)
    for eps in grid["epsilon"]:
        ((_, rep),) = perturb_sweep(dataset, "epsilon", [eps])
        assert score >= rep.acc
        if rep.acc == score:
            break
    assert best.epsilon in grid["epsilon"]
