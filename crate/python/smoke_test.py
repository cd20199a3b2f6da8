#!/usr/bin/env python3
"""Smoke test for the cfp_py extension module.

Build the module first:

    cargo build -p cfp-py --release --features extension-module

then run this script from anywhere inside the repository:

    python3 python/smoke_test.py
"""

import math
import shutil
import sys
import tempfile
from pathlib import Path


def import_cfp_py():
    try:
        import cfp_py  # already installed / on sys.path

        return cfp_py
    except ImportError:
        pass
    root = Path(__file__).resolve().parent.parent
    candidates = [
        root / "target" / "release" / "libcfp_py.so",
        root / "target" / "debug" / "libcfp_py.so",
        root / "target" / "release" / "libcfp_py.dylib",
        root / "target" / "debug" / "libcfp_py.dylib",
    ]
    built = next((p for p in candidates if p.exists()), None)
    if built is None:
        sys.exit(
            "cfp_py not built; run "
            "`cargo build -p cfp-py --release --features extension-module`"
        )
    staging = Path(tempfile.mkdtemp(prefix="cfp_py_"))
    suffix = ".so" if built.suffix == ".so" else ".so"
    shutil.copy2(built, staging / f"cfp_py{suffix}")
    sys.path.insert(0, str(staging))
    import cfp_py

    return cfp_py


def close(a, b, tol=1e-10):
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def main():
    cfp = import_cfp_py()
    print(f"cfp_py {cfp.__version__}")

    # Partitions: q(9) = 30, and the bounded K=3 subset of size 3.
    assert cfp.partition_count(9) == 30
    assert cfp.partition_count(9, k=3, max_size=4) == 3
    assert cfp.enumerate_partitions(1) == [[(1, 1)]]

    # Constant kernel, N=3, a=1: the ladder gives (3/11, 6/11, 2/11).
    kernel = cfp.Kernel.constant(1.0)
    pi = cfp.steady_state_pi(kernel, 3)
    for got, want in zip(pi, (3 / 11, 6 / 11, 2 / 11)):
        assert close(got, want), (got, want)
    closed = cfp.pi_constant(3, 1.0)
    assert all(close(x, y) for x, y in zip(pi, closed))

    # Colocalization theorem: p2 = G1.
    assert close(cfp.p2_exact(kernel, 3), 5 / 11)
    assert close(cfp.g_n(1, 1.0, 3), 5 / 11)
    assert close(cfp.g_n(1, 1.0, 3, method="continued-fraction"), 5 / 11)
    assert close(cfp.p2_constant(1.0, 3), 5 / 11)

    # Mean cluster count: mu1 = 1 + a(N-1)G1 = 21/11.
    assert close(cfp.mu_n(1, 1.0, 3), 21 / 11)
    conserved = sum(
        s * cfp.mean_counts_constant(s, 0.7, 12) for s in range(1, 13)
    )
    assert close(conserved, 12.0, tol=1e-9)

    # Detailed balance holds identically for built-ins.
    report = kernel.verify_detailed_balance(20, 0.0)
    assert report["exact_zero"]

    # Bounded kernel nucleation limit: 3/10, 6/10, 1/10 and p2 = 7/24.
    limit = cfp.nucleation_limit(9, 4)
    assert limit["cluster_count"] == 3
    probs = {tuple(sizes): p for sizes, p in limit["configs"]}
    assert close(probs[(4, 4, 1)], 0.3)
    assert close(probs[(4, 3, 2)], 0.6)
    assert close(probs[(3, 3, 3)], 0.1)
    assert close(limit["p2"], 7 / 24)

    # Pair times: N=2 gives T_S = 1/a, T_R = 1, ratio = 1/(1+a).
    times = cfp.pair_times(cfp.Kernel.constant(2.0), 2)
    assert close(times["t_s"], 0.5)
    assert close(times["t_r"], 1.0)
    assert close(times["p2_ratio"], 1 / 3)
    assert close(times["p2_ratio"], times["p2_exact"], tol=1e-8)

    # Simulation: determinism and rough agreement.
    run = lambda: cfp.run_ssa(
        kernel, 3, t_end=2000.0, seed=42, burn_in=100.0, replicas=4, track_pair=True
    )
    a, b = run(), run()
    assert a == b, "same seed must reproduce identical statistics"
    assert a["events_total"] > 0
    assert math.isclose(sum(a["pi"]), 1.0, rel_tol=1e-9)
    assert abs(a["p2"] - 5 / 11) < 0.05

    # Linear kernel sanity through the generic pipeline.
    linear = cfp.Kernel.linear(1.0)
    assert close(linear.dissociation(5), (25 - 1) / 6)
    means = cfp.mean_counts(linear, 6)
    assert close(sum((i + 1) * m for i, m in enumerate(means)), 6.0, tol=1e-9)

    print("smoke test: all checks passed")


if __name__ == "__main__":
    main()
