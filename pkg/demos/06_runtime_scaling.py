"""Greedy explanation runtime as the feature count doubles.

The classified-instance explainer is dominated by one sort, so doubling the
number of features should roughly double the time.  Medians over repeated
runs keep the numbers steady.
"""

import time

import numpy as np

from minaxp import Instance, LinearModel, RejectClassifier, explain_positive, unit_box

rng = np.random.default_rng(0)
print("      n   median per explanation   ratio vs previous")
previous = None
for k in range(8):
    n = 1000 * 2**k
    weights = rng.uniform(-1.0, 1.0, n)
    values = rng.uniform(0.0, 1.0, n)
    model = LinearModel(weights, 0.0, unit_box(n))
    s = float(weights @ values)
    clf = RejectClassifier(model, s - 2.0, s - 1.0)
    instance = Instance(values)

    explain_positive(clf, instance)  # warm-up
    samples = []
    for _ in range(9):
        start = time.perf_counter()
        explanation, _ = explain_positive(clf, instance)
        samples.append(time.perf_counter() - start)
    median = float(np.median(samples))
    ratio = "" if previous is None else f"{median / previous:.2f}x"
    print(f"{n:>7d}   {median * 1000:>10.3f} ms           {ratio:>6s}")
    previous = median
print("\nratios hover near 2: time grows like n log n, not n^2.")
