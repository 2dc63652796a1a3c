"""Acceptance gate: ten go/no-go checks over the whole package.

Each test prints exactly one PASS/FAIL verdict line straight to the
terminal (bypassing capture) and then asserts, so the printed status and
the pytest status always agree.  Thresholds are fixed here and are not
to be loosened to make a run green.
"""

import math
import os
import subprocess
import sys
import time

import numpy as np
import pytest

from toposhadow.baseline import select_kappa
from toposhadow.classify import detect, scanline_counts
from toposhadow.evaluation import (
    MetricsReport,
    confusion,
    fit_normal_target,
    perturb_sweep,
    trajectory_rmse,
)
from toposhadow.saliency import Params, filter_stack, std_map
from toposhadow.synth import PhantomSpec, make_dataset, synth_phantom, synth_tilt_sequence
from toposhadow.topology import Complex, occurrence_map, rips_triangles

_DATASET = None


def dataset50():
    global _DATASET
    if _DATASET is None:
        _DATASET = make_dataset(n_frames=50, seed=0)[0]
    return _DATASET


def verdict(capsys, num, ok, detail):
    with capsys.disabled():
        print(f"acceptance {num:2d}: {'PASS' if ok else 'FAIL'} - {detail}")
    return ok


def run_cli(*args):
    return subprocess.run(
        [sys.executable, "-m", "toposhadow.cli", *args],
        capture_output=True,
        text=True,
    )


def tree_bytes(root):
    out = {}
    for dirpath, _, names in os.walk(root):
        for name in names:
            p = os.path.join(dirpath, name)
            out[os.path.relpath(p, root)] = open(p, "rb").read()
    return out


# ------------------------------------------------------------ criterion 1


def test_criterion_1_degenerate_inputs(capsys):
    ok = True
    for value in (0, 1, 57, 128, 255):
        img = np.full((300, 600), value, dtype=np.uint8)
        s = std_map(filter_stack(img[100:].astype(np.float64), Params()))
        res = detect(img)
        ok = ok and not s.any()
        ok = ok and res.cloud_size == 0
        ok = ok and res.triangle_count == 0
        ok = ok and res.labels.tolist() == [1] * 600
        ok = ok and res.mean_confidence == 0.0
    assert verdict(capsys, 1, ok, "constant frames: flat deviation, empty complex, all shadow")


# ------------------------------------------------------------ criterion 2


def _brute_triples(pts, eps):
    """Full pairwise predicate -> all i<j<k with three qualifying edges."""
    d = pts[:, None, :] - pts[None, :, :]
    d2 = (d[..., 0] * d[..., 0] + d[..., 1] * d[..., 1]).astype(np.float64)
    adj = d2 <= eps * eps
    np.fill_diagonal(adj, False)
    tri = adj[:, :, None] & adj[:, None, :] & adj[None, :, :]
    i, j, k = np.where(tri)
    keep = (i < j) & (j < k)
    return sorted(zip(i[keep].tolist(), j[keep].tolist(), k[keep].tolist()))


def test_criterion_2_rips_oracle(capsys):
    rng = np.random.default_rng(2024)
    trials = 0
    ok = True
    for trial in range(200):
        n = int(rng.integers(3, 41))
        pts = np.stack(
            [rng.integers(0, 150, n), rng.integers(0, 150, n)], axis=1
        ).astype(np.int64)
        pts = np.unique(pts, axis=0)
        # integer thresholds every few trials to exercise exact ties
        eps = float(rng.integers(5, 100)) if trial % 5 == 0 else float(
            rng.uniform(5.0, 100.0)
        )
        got = [tuple(t) for t in rips_triangles(pts, eps).triangles.tolist()]
        if got != _brute_triples(pts, eps):
            ok = False
            break
        trials += 1
    assert verdict(capsys, 2, ok, f"triangle sets equal brute force on {trials} clouds")


# ------------------------------------------------------------ criterion 3


def _pixel_cover_counts(vertices, triangles, width, height):
    rr, cc = np.meshgrid(
        np.arange(height, dtype=np.int64),
        np.arange(width, dtype=np.int64),
        indexing="ij",
    )
    total = np.zeros((height, width), dtype=np.int64)
    v = vertices.astype(np.int64)
    for ia, ib, ic in triangles:
        a, b, c = v[ia], v[ib], v[ic]
        orient = int(b[0] - a[0]) * int(c[1] - a[1]) - int(b[1] - a[1]) * int(c[0] - a[0])
        s1 = (b[0] - a[0]) * (cc - a[1]) - (b[1] - a[1]) * (rr - a[0])
        s2 = (c[0] - b[0]) * (cc - b[1]) - (c[1] - b[1]) * (rr - b[0])
        s3 = (a[0] - c[0]) * (cc - c[1]) - (a[1] - c[1]) * (rr - c[0])
        if orient > 0:
            inside = (s1 >= 0) & (s2 >= 0) & (s3 >= 0)
        elif orient < 0:
            inside = (s1 <= 0) & (s2 <= 0) & (s3 <= 0)
        else:
            inside = (
                (s1 == 0)
                & (s2 == 0)
                & (s3 == 0)
                & (rr >= min(a[0], b[0], c[0]))
                & (rr <= max(a[0], b[0], c[0]))
                & (cc >= min(a[1], b[1], c[1]))
                & (cc <= max(a[1], b[1], c[1]))
            )
        total += inside
    return total


def _random_complexes(count, max_triangles):
    rng = np.random.default_rng(33)
    out = []
    while len(out) < count:
        n = int(rng.integers(4, 25))
        pts = np.stack(
            [rng.integers(0, 40, n), rng.integers(0, 50, n)], axis=1
        ).astype(np.int64)
        pts = np.unique(pts, axis=0)
        eps = float(rng.uniform(8.0, 22.0))
        cx = rips_triangles(pts, eps)
        if len(cx) == 0:
            continue
        out.append(Complex(cx.vertices, cx.triangles[:max_triangles]))
    return out


def test_criterion_3_occurrence_oracle(capsys):
    complexes = _random_complexes(50, 20)
    ok = True
    for cx in complexes:
        got = occurrence_map(cx, 50, 40)
        expect = _pixel_cover_counts(cx.vertices, cx.triangles, 50, 40)
        if not np.array_equal(got, expect):
            ok = False
            break
    assert verdict(capsys, 3, ok, f"pixel counts equal sign tests on {len(complexes)} complexes")


# ------------------------------------------------------------ criterion 4


def test_criterion_4_projection_vs_rasterized_occupancy(capsys):
    """Column extents versus per-column rasterized coverage.

    A triangle thinner than a pixel still projects onto every column in
    its extent, but its rasterization can miss every pixel centre of a
    column, so the two countings disagree on sliver triangles.  The
    check is kept exact and is expected to stay red; the classifier is
    defined on the projection counts.
    """
    complexes = _random_complexes(50, 20)
    ok = True
    first = None
    for idx, cx in enumerate(complexes):
        proj = scanline_counts(cx, 50)
        occupancy = np.zeros(50, dtype=np.int64)
        for t in cx.triangles:
            single = occurrence_map(Complex(cx.vertices, t.reshape(1, 3)), 50, 40)
            occupancy += single.any(axis=0)
        if not np.array_equal(proj, occupancy):
            ok = False
            cols = np.where(proj != occupancy)[0]
            first = (idx, cols[:4].tolist())
            break
    assert verdict(
        capsys, 4, ok, "projection counts equal rasterized occupancy"
    ), f"complex {first[0]}: columns {first[1]} differ (sliver triangles cover no pixel centre there)"


# ------------------------------------------------------------ criterion 5


def test_criterion_5_synthetic_classification(capsys):
    frames = dataset50()
    pooled = MetricsReport(0, 0, 0, 0)
    for fid in sorted(frames):
        img, truth = frames[fid]
        pooled = pooled + confusion(detect(img).labels, truth)
    topol_acc = pooled.acc
    kappa, thresh_acc = select_kappa(
        [frames[f][0] for f in sorted(frames)],
        [frames[f][1] for f in sorted(frames)],
    )
    ok = topol_acc >= 0.95 and thresh_acc >= 0.95
    assert verdict(
        capsys,
        5,
        ok,
        f"50 phantoms: topol acc {topol_acc:.4f}, thresh acc {thresh_acc:.4f} (kappa {kappa:g})",
    )


# ------------------------------------------------------------ criterion 6


def test_criterion_6_trajectory(capsys):
    frames = synth_tilt_sequence(101)
    traj = [detect(img).mean_confidence for img, _ in frames]
    t = np.asarray(traj)
    peak = int(np.argmax(t))
    d = np.diff(t)
    unimodal = not np.any(d[:peak] < 0) and not np.any(d[peak:] > 0)
    rmse = trajectory_rmse(traj, fit_normal_target(traj))
    ok = unimodal and abs(peak - 50) <= 10 and rmse <= 0.25
    assert verdict(
        capsys,
        6,
        ok,
        f"tilt sweep: peak {peak}, unimodal {unimodal}, rmse {rmse:.4f}",
    )


# ------------------------------------------------------------ criterion 7


def test_criterion_7_metric_identities(capsys):
    rng = np.random.default_rng(55)
    ok = MetricsReport(tp=8, tn=90, fp=1, fn=1).acc == 0.98
    for _ in range(300):
        tp, tn, fp, fn = (int(v) for v in rng.integers(0, 40, size=4))
        rep = MetricsReport(tp=tp, tn=tn, fp=fp, fn=fn)
        if tp + tn + fp + fn:
            ok = ok and abs(rep.acc - (tp + tn) / (tp + tn + fp + fn)) < 1e-12
        if tp + fn:
            ok = ok and abs(rep.tpr - tp / (tp + fn)) < 1e-12
        if tn + fp:
            ok = ok and abs(rep.tnr - tn / (tn + fp)) < 1e-12
        if tp + fp:
            ok = ok and abs(rep.ppv - tp / (tp + fp)) < 1e-12
    assert verdict(capsys, 7, ok, "ratio identities within 1e-12, worked example exact")


# ------------------------------------------------------------ criterion 8


def test_criterion_8_latency(capsys):
    img, _ = synth_phantom(PhantomSpec(seed=123))
    detect(img)  # warm-up: allocator and kernel dispatch
    times = []
    for _ in range(100):
        t0 = time.perf_counter()
        detect(img)
        times.append((time.perf_counter() - t0) * 1000.0)
    median = float(np.median(times))
    ok = median <= 50.0
    assert verdict(capsys, 8, ok, f"median latency {median:.1f} ms over 100 runs (budget 50)")


# ------------------------------------------------------------ criterion 9


def test_criterion_9_determinism(capsys, tmp_path):
    ok = True

    a, b = tmp_path / "a", tmp_path / "b"
    ok = ok and run_cli("synth", "--out", str(a), "--frames", "4").returncode == 0
    ok = ok and run_cli("synth", "--out", str(b), "--frames", "4").returncode == 0
    ok = ok and tree_bytes(a) == tree_bytes(b)

    frame = sorted(a.glob("*.pgm"))[0]
    outs = []
    for sub in ("d1", "d2"):
        d = tmp_path / sub
        d.mkdir()
        r = run_cli(
            "detect",
            "--input",
            str(frame),
            "--out-labels",
            str(d / "l.txt"),
            "--out-confidence",
            str(d / "c.pgm"),
            "--overlay",
            str(d / "o.ppm"),
        )
        ok = ok and r.returncode == 0
        outs.append((tree_bytes(d), r.stdout))
    ok = ok and outs[0] == outs[1]

    eval_args = (
        "evaluate",
        "--dataset",
        str(a),
        "--folds",
        str(a / "folds.txt"),
        "--method",
        "topol",
    )
    e1, e2 = run_cli(*eval_args), run_cli(*eval_args)
    e3 = run_cli(*eval_args, "--workers", "2")
    ok = ok and e1.returncode == 0 and e1.stdout == e2.stdout == e3.stdout

    sweep_args = ("sweep", "--dataset", str(a), "--param", "epsilon", "--values", "50,60")
    s1, s2 = run_cli(*sweep_args), run_cli(*sweep_args)
    s3 = run_cli(*sweep_args, "--workers", "2")
    ok = ok and s1.returncode == 0 and s1.stdout == s2.stdout == s3.stdout

    seq = tmp_path / "seq"
    ok = ok and run_cli("synth", "--out", str(seq), "--tilt", "3").returncode == 0
    t1 = run_cli("trajectory", "--frames-dir", str(seq))
    t2 = run_cli("trajectory", "--frames-dir", str(seq))
    ok = ok and t1.returncode == 0 and t1.stdout == t2.stdout

    g_args = ("gridsearch", "--dataset", str(a), "--grid", "epsilon=60")
    g1, g2 = run_cli(*g_args), run_cli(*g_args)
    ok = ok and g1.returncode == 0 and g1.stdout == g2.stdout

    assert verdict(capsys, 9, ok, "byte-identical reruns for all six commands, workers included")


# ------------------------------------------------------------ criterion 10


def test_criterion_10_epsilon_sweep(capsys):
    frames = dataset50()
    values = [30.0, 40.0, 50.0, 60.0, 70.0, 80.0, 90.0]
    rows = perturb_sweep(frames, "epsilon", values)
    ok = len(rows) == len(values)
    for _, rep in rows:
        for metric in (rep.acc, rep.tnr, rep.tpr, rep.ppv):
            ok = ok and math.isfinite(metric) and 0.0 <= metric <= 1.0
    accs = {v: rep.acc for v, rep in rows}
    default_acc = accs[60.0]
    better = sum(1 for v, acc in accs.items() if acc > default_acc)
    ok = ok and better <= 1  # default within the top two of the sweep
    assert verdict(
        capsys,
        10,
        ok,
        f"default acc {default_acc:.4f}; {better} swept value(s) strictly better",
    )
