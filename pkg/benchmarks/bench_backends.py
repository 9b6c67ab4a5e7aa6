"""Compare the compiled inference kernel against the numpy fallback.

Runs the full rule-base evaluation (fuzzify, fire, aggregate, centroid)
for a batch of random inputs on each available backend and reports
per-call latency plus the speedup.  The same inputs go to both
backends and the outputs are checked to agree to 1e-9, so the numbers
are comparing identical work.

Usage: python benchmarks/bench_backends.py [N]
"""

from __future__ import annotations

import sys
import time

import numpy as np

from oculus.fuzzy import backend
from oculus.fuzzy.inference import InferenceEngine
from oculus.intent import IntentConfig


def bench(engine: InferenceEngine, values: np.ndarray) -> tuple[float, np.ndarray]:
    t0 = time.perf_counter()
    out = engine.evaluate_batch(values)
    return time.perf_counter() - t0, out


def main() -> int:
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 100_000
    rulebase = IntentConfig.default().rulebase

    rng = np.random.default_rng(20240817)
    values = np.empty((n, 2), dtype=np.float64)
    values[:, 0] = rng.uniform(0.0, 1.0, n)       # priority
    values[:, 1] = rng.uniform(-200.0, 200.0, n)  # arousal

    names = backend.available_backends()
    results: dict[str, tuple[float, np.ndarray]] = {}
    for name in names:
        engine = InferenceEngine(rulebase, backend=name)
        bench(engine, values[:1000].copy())  # warmup
        elapsed, out = bench(engine, values)
        results[name] = (elapsed, out)
        print(f"{name:>8}: {elapsed:8.3f} s total, {elapsed / n * 1e6:7.2f} us/call  (n={n})")

    if len(results) == 2:
        (a, (ta, oa)), (b, (tb, ob)) = results.items()
        worst = float(np.nanmax(np.abs(oa - ob)))
        slow, fast = (a, b) if ta > tb else (b, a)
        ratio = max(ta, tb) / min(ta, tb)
        print(f"agreement: max |{a} - {b}| = {worst:.3e}")
        print(f"{fast} is {ratio:.1f}x faster than {slow}")
        if not (worst < 1e-9 or np.isnan(worst)):
            print("FAIL: backends disagree beyond 1e-9")
            return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
