"""Metrics, fold-based evaluation, trajectory scoring, and sweeps."""

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields, replace

import numpy as np

from .classify import detect
from .errors import FormatError
from .saliency import Params

SWEEPABLE = ("sigma_u", "sigma_v", "gamma", "phi1", "phi2", "sigma_w", "epsilon", "tau")

_INT_FIELDS = {"stack_size", "tau", "crop_rows", "triangle_cap"}


@dataclass(frozen=True)
class MetricsReport:
    """Scan-line confusion counts; shadow is the positive class.

    The four ratios are derived from the counts on access, so the
    defining identities hold by construction.  A ratio with a zero
    denominator is NaN, never silently 0.
    """

    tp: int
    tn: int
    fp: int
    fn: int

    @property
    def total(self):
        return self.tp + self.tn + self.fp + self.fn

    @property
    def acc(self):
        return _ratio(self.tp + self.tn, self.total)

    @property
    def tnr(self):
        return _ratio(self.tn, self.tn + self.fp)

    @property
    def tpr(self):
        return _ratio(self.tp, self.tp + self.fn)

    @property
    def ppv(self):
        return _ratio(self.tp, self.tp + self.fp)

    def __add__(self, other):
        return MetricsReport(
            self.tp + other.tp,
            self.tn + other.tn,
            self.fp + other.fp,
            self.fn + other.fn,
        )


def _ratio(num, den):
    return num / den if den else math.nan


def confusion(pred, truth):
    """Confusion counts of a predicted label vector against truth."""
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    if pred.shape != truth.shape:
        raise ValueError("prediction/truth length mismatch")
    p = pred.astype(bool)
    t = truth.astype(bool)
    return MetricsReport(
        tp=int(np.count_nonzero(p & t)),
        tn=int(np.count_nonzero(~p & ~t)),
        fp=int(np.count_nonzero(p & ~t)),
        fn=int(np.count_nonzero(~p & t)),
    )


class FoldSpec:
    """Named partition of frames into per-fold seen/unseen cells.

    Built from manifest lines ``<frame-id> <group-id> <fold#>
    <seen|unseen>`` (one line per frame per fold).  Within a fold a
    frame appears at most once and a group is never split across roles.
    """

    def __init__(self, entries):
        self._members = {}
        self._groups = {}
        roles_by_fold_group = {}
        for frame_id, group_id, fold, role in entries:
            fold = int(fold)
            if fold < 1:
                raise FormatError(f"fold numbers start at 1, got {fold}")
            if role not in ("seen", "unseen"):
                raise FormatError(f"unknown role {role!r}")
            cell = self._members.setdefault((fold, role), [])
            other = self._members.get((fold, _other_role(role)), [])
            if frame_id in cell or frame_id in other:
                raise FormatError(f"frame {frame_id!r} listed twice for fold {fold}")
            cell.append(frame_id)
            prev_group = self._groups.setdefault(frame_id, group_id)
            if prev_group != group_id:
                raise FormatError(f"frame {frame_id!r} has conflicting group ids")
            prev_role = roles_by_fold_group.setdefault((fold, group_id), role)
            if prev_role != role:
                raise FormatError(
                    f"group {group_id!r} split across seen/unseen in fold {fold}"
                )
        if not self._members:
            raise FormatError("empty fold manifest")

    def folds(self):
        return sorted({fold for fold, _ in self._members})

    def members(self, fold, role):
        return list(self._members.get((fold, role), []))

    def frame_ids(self):
        return sorted(self._groups)

    def group_of(self, frame_id):
        return self._groups[frame_id]


def _other_role(role):
    return "unseen" if role == "seen" else "seen"


def load_folds(path):
    """Parse a fold manifest file into a FoldSpec."""
    entries = []
    with open(path, "r", encoding="ascii") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 4:
                raise FormatError(f"{path}:{lineno}: expected 4 fields, got {len(parts)}")
            frame_id, group_id, fold_text, role = parts
            try:
                fold = int(fold_text)
            except ValueError:
                raise FormatError(f"{path}:{lineno}: bad fold number {fold_text!r}") from None
            entries.append((frame_id, group_id, fold, role))
    return FoldSpec(entries)


def write_folds(entries, path):
    """Write manifest lines (frame_id, group_id, fold, role)."""
    with open(path, "w", encoding="ascii") as fh:
        for frame_id, group_id, fold, role in entries:
            fh.write(f"{frame_id} {group_id} {fold} {role}\n")


@dataclass(frozen=True)
class FoldResult:
    fold: int
    role: str
    metrics: MetricsReport


@dataclass(frozen=True)
class EvalReport:
    """Per-(fold, role) pooled metrics plus the across-fold averages."""

    rows: tuple
    averages: dict


def evaluate_folds(dataset, folds, make_predict, workers=1):
    """Evaluate a predictor under a fold manifest.

    ``dataset`` maps frame id -> (image, truth labels).  ``make_predict``
    is called once per fold with (fold, seen subset) and must return a
    ``predict(img, truth) -> labels`` callable; confusion counts are
    pooled over the frames of each (fold, role) cell and the four
    ratios averaged across folds per role.
    """
    missing = [fid for fid in folds.frame_ids() if fid not in dataset]
    if missing:
        raise FormatError("missing annotations for: " + ", ".join(missing))
    rows = []
    for fold in folds.folds():
        seen_ids = folds.members(fold, "seen")
        unseen_ids = folds.members(fold, "unseen")
        predict = make_predict(fold, {fid: dataset[fid] for fid in seen_ids})
        for role, ids in (("seen", seen_ids), ("unseen", unseen_ids)):
            if not ids:
                continue
            preds = _map_ordered(lambda fid: predict(*dataset[fid]), ids, workers)
            pooled = MetricsReport(0, 0, 0, 0)
            for fid, pred in zip(ids, preds):
                pooled = pooled + confusion(pred, dataset[fid][1])
            rows.append(FoldResult(fold, role, pooled))
    averages = {}
    for role in ("seen", "unseen"):
        per_fold = [r.metrics for r in rows if r.role == role]
        if per_fold:
            averages[role] = {
                name: sum(getattr(m, name) for m in per_fold) / len(per_fold)
                for name in ("acc", "tnr", "tpr", "ppv")
            }
    return EvalReport(rows=tuple(rows), averages=averages)


def _map_ordered(fn, items, workers):
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def topol_predictor(params=None):
    """make_predict for the pipeline detector (fold-independent)."""

    def make_predict(fold, seen):
        del fold, seen
        return lambda img, truth: detect(img, params).labels

    return make_predict


def oracle_predictor():
    """make_predict that returns the ground truth (upper bound)."""

    def make_predict(fold, seen):
        del fold, seen
        return lambda img, truth: truth

    return make_predict


def fit_normal_target(measured):
    """Bell-shaped target through the min/max of a trajectory.

    T_i = m + (Mx - m) * exp(-(i - mu)^2 / (2 s^2)) with mu the middle
    index and s = n/6, so three standard deviations span the sequence.
    """
    t = np.asarray(measured, dtype=np.float64)
    if t.ndim != 1 or len(t) < 3:
        raise ValueError("need at least 3 frames")
    n = len(t)
    lo = t.min()
    hi = t.max()
    mu = (n - 1) / 2.0
    s = n / 6.0
    i = np.arange(n, dtype=np.float64)
    return lo + (hi - lo) * np.exp(-((i - mu) ** 2) / (2.0 * s * s))


def trajectory_rmse(measured, target):
    """Root-mean-square error between two equal-length trajectories."""
    a = np.asarray(measured, dtype=np.float64)
    b = np.asarray(target, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError("trajectory length mismatch")
    d = b - a
    return float(np.sqrt((d * d).mean()))


def perturb_sweep(dataset, name, values, base=None, workers=1):
    """One pooled evaluation per parameter value, everything else at base.

    Returns a list of (value, MetricsReport) rows in input order.
    """
    if name not in SWEEPABLE:
        raise ValueError(f"unknown parameter {name!r}")
    if base is None:
        base = Params()
    rows = []
    for value in values:
        params = replace(base, **{name: _coerce(name, value)})
        rows.append((value, _pooled(dataset, params, workers)))
    return rows


def grid_search(dataset, grid, base=None, workers=1):
    """Exhaustive search over a dict of parameter value lists.

    Combinations are visited in row-major order of the grid definition;
    the accuracy-maximizing combination wins and ties keep the earlier
    combination.  Returns (best Params, best accuracy).
    """
    if not dataset:
        raise ValueError("empty dataset")
    if not grid or any(len(v) == 0 for v in grid.values()):
        raise ValueError("empty grid")
    if base is None:
        base = Params()
    valid = {f.name for f in fields(Params)}
    for name in grid:
        if name not in valid:
            raise ValueError(f"unknown parameter {name!r}")
    names = list(grid)
    best = None
    for combo in itertools.product(*(grid[name] for name in names)):
        assignment = {n: _coerce(n, v) for n, v in zip(names, combo)}
        params = replace(base, **assignment)
        score = _pooled(dataset, params, workers).acc
        if best is None or score > best[1]:
            best = (params, score)
    return best


def _coerce(name, value):
    if name in _INT_FIELDS:
        if float(value) != int(value):
            raise ValueError(f"{name} must be an integer, got {value!r}")
        return int(value)
    return float(value)


def _pooled(dataset, params, workers=1):
    ids = sorted(dataset)
    preds = _map_ordered(lambda fid: detect(dataset[fid][0], params).labels, ids, workers)
    pooled = MetricsReport(0, 0, 0, 0)
    for fid, pred in zip(ids, preds):
        pooled = pooled + confusion(pred, dataset[fid][1])
    return pooled
