"""Compare the compiled kernels against the pure numpy twins.

Both backends produce bit-identical output, so this is purely a speed
report: per-kernel medians on pipeline-shaped workloads plus the
end-to-end frame latency each way.

    python3 benchmarks/bench_backends.py [--repeat N]
"""

import argparse
import statistics
import time

import numpy as np

from toposhadow import _kernels
from toposhadow._kernels import _pure
from toposhadow.classify import detect
from toposhadow.saliency import Params, filter_stack, gaussian_kernel_1d, std_map, threshold_points
from toposhadow.sparsify import density_field, thin
from toposhadow.synth import PhantomSpec, synth_phantom

try:
    from toposhadow._kernels import _core
except ImportError:
    _core = None


def bench(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append((time.perf_counter() - t0) * 1000.0)
    return statistics.median(times)


def realistic_stage_inputs():
    """Intermediate products of one phantom frame, for honest shapes."""
    img, _ = synth_phantom(PhantomSpec(seed=7))
    p = Params()
    cropped = img[p.crop_rows :].astype(np.float64)
    s = std_map(filter_stack(img[p.crop_rows :], p))
    cloud = threshold_points(s, p.gamma)
    lam = density_field(s, p)
    thinned = thin(cloud, lam)
    spacing = lam[cloud[:, 0], cloud[:, 1]]
    tris = _pure.rips_triangles(thinned, p.epsilon, p.triangle_cap)
    return cropped, cloud, spacing, thinned, tris


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=21)
    args = ap.parse_args()

    if _core is None:
        print("compiled backend not built; showing pure numpy only")
    backends = [("pure", _pure)] + ([("compiled", _core)] if _core else [])

    cropped, cloud, spacing, thinned, tris = realistic_stage_inputs()
    h, w = cropped.shape
    ku = gaussian_kernel_1d(1.8)
    rng = np.random.default_rng(0)
    big_cloud = np.unique(
        np.stack([rng.integers(0, 200, 4000), rng.integers(0, 600, 4000)], axis=1),
        axis=0,
    ).astype(np.int64)
    big_spacing = rng.uniform(15.0, 35.0, size=len(big_cloud))

    cases = [
        (
            f"correlate1d {h}x{w} sigma=1.8",
            lambda mod: mod.correlate1d_replicate(cropped, ku, 0),
        ),
        (
            f"thin frame cloud ({len(cloud)} pts)",
            lambda mod: mod.thin_points(cloud, spacing),
        ),
        (
            f"thin dense cloud ({len(big_cloud)} pts)",
            lambda mod: mod.thin_points(big_cloud, big_spacing),
        ),
        (
            f"rips frame cloud ({len(thinned)} pts)",
            lambda mod: mod.rips_triangles(thinned, 60.0, 2_000_000),
        ),
        (
            f"occurrence ({len(tris)} triangles)",
            lambda mod: mod.occurrence_counts(thinned, tris, h, w),
        ),
    ]

    print(f"median of {args.repeat} runs, milliseconds")
    header = "case".ljust(36) + "".join(name.rjust(12) for name, _ in backends)
    print(header)
    print("-" * len(header))
    for label, call in cases:
        row = label.ljust(36)
        for _, mod in backends:
            call(mod)  # warm-up
            row += f"{bench(lambda: call(mod), args.repeat):12.3f}"
        print(row)

    # end-to-end: swap the dispatch table around detect()
    img, _ = synth_phantom(PhantomSpec(seed=7))
    names = ("correlate1d_replicate", "thin_points", "rips_triangles", "occurrence_counts")
    saved = tuple(getattr(_kernels, n) for n in names)
    row = "detect end-to-end 300x600".ljust(36)
    try:
        for _, mod in backends:
            for n in names:
                setattr(_kernels, n, getattr(mod, n))
            detect(img)
            row += f"{bench(lambda: detect(img), args.repeat):12.3f}"
    finally:
        for n, fn in zip(names, saved):
            setattr(_kernels, n, fn)
    print(row)


if __name__ == "__main__":
    main()
