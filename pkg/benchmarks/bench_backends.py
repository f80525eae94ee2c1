"""Timing comparison of the numba and pure-Python kernel backends.

Run without arguments; the script re-launches itself once per backend with
COHERENTMB_BACKEND pinned (the choice is frozen at import time, so the same
process cannot time both) and prints a side-by-side table.

    python3 benchmarks/bench_backends.py

Workload sizes live in _WORKLOADS; each entry is timed as best-of-three
after a JIT warmup pass, so compilation cost never lands in a number.
"""

from __future__ import annotations

import json
import os
import subprocess
import sys
import time

import numpy as np

_WORKLOADS = (
    ("bisect n=10^4", "bisect", 10_000, 1),
    ("charpoly n=5000 x 200 points", "charpoly", 5_000, 200),
    ("qd sweeps n=5000 x 50", "qd", 5_000, 50),
    ("shifted solve n=5000 x 100", "solve", 5_000, 100),
)


def _best_of(repeats: int, fn) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def _run_worker() -> None:
    from coherentmb import _kernels as k

    k.warmup()
    rng = np.random.default_rng(7)
    results: dict[str, float] = {"__backend__": 0.0}
    for label, kind, n, inner in _WORKLOADS:
        diag = np.full(n, 2.0) + rng.uniform(0.0, 0.5, n)
        offsq = np.ones(n - 1) + rng.uniform(0.0, 0.2, n - 1)

        if kind == "bisect":
            def work() -> None:
                k.bisect_smallest(diag, offsq, 0.0, 5.0, 1e-12, 200)
        elif kind == "charpoly":
            lams = rng.uniform(-0.5, 0.5, inner)
            def work() -> None:
                for lam in lams:
                    k.eval_charpoly(diag, offsq, lam)
        elif kind == "qd":
            def work() -> None:
                q = diag.copy()
                e = np.concatenate([offsq[: n - 1], [0.0]])
                for _ in range(inner):
                    if k.qd_sweep(q, e) != 0:
                        break
        else:
            sd = rng.uniform(-1.0, 1.0, n - 1)
            rhs = rng.uniform(-1.0, 1.0, n)
            def work() -> None:
                for _ in range(inner):
                    k.tridiag_shifted_solve(diag, sd, 0.01, rhs)

        results[label] = _best_of(3, work)
    print(json.dumps({"backend": k.backend(), "timings": results}))


def _time_backend(backend: str) -> dict:
    env = dict(os.environ, COHERENTMB_BACKEND=backend)
    cp = subprocess.run(
        [sys.executable, __file__, "--worker"],
        capture_output=True,
        text=True,
        env=env,
    )
    if cp.returncode != 0:
        raise RuntimeError(f"worker for backend {backend!r} failed:\n{cp.stderr}")
    return json.loads(cp.stdout.strip().splitlines()[-1])


def main() -> int:
    if "--worker" in sys.argv:
        _run_worker()
        return 0
    reports = {}
    for backend in ("python", "numba"):
        try:
            reports[backend] = _time_backend(backend)
        except RuntimeError as exc:
            print(exc, file=sys.stderr)
    if "numba" not in reports:
        print("numba backend unavailable; showing python timings only")
    width = max(len(label) for label, *_ in _WORKLOADS)
    header = f"{'workload':<{width}}  {'python':>10}  {'numba':>10}  {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for label, *_ in _WORKLOADS:
        py = reports["python"]["timings"][label]
        if "numba" in reports:
            nb = reports["numba"]["timings"][label]
            print(f"{label:<{width}}  {py:>9.4f}s  {nb:>9.4f}s  {py / nb:>7.1f}x")
        else:
            print(f"{label:<{width}}  {py:>9.4f}s  {'-':>10}  {'-':>8}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
