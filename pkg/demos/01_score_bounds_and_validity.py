"""Worst-case score bounds: why pinning features locks a prediction in.

A tiny two-feature model shows the machinery every explainer builds on:
the reachable score interval [s_min, s_max] for a pinned feature set, and
how an explanation is just a pinned set whose interval clears the right
threshold(s).
"""

import numpy as np

from minaxp import (
    ExplanationKind,
    Instance,
    LinearModel,
    RejectClassifier,
    coefficient_profile,
    is_valid_explanation,
    predict,
    s_max,
    s_min,
    unit_box,
)

model = LinearModel(weights=np.array([2.0, -2.0]), bias=0.0, domains=unit_box(2))
clf = RejectClassifier(model, t_minus=-1.0, t_plus=1.0)
x = Instance.validated(model, [0.5, 0.5])

pred = predict(clf, x)
print(f"score(x) = {pred.score:+.2f}  ->  label {pred.label.value}")
print(f"rejection band: [{clf.t_minus:+.2f}, {clf.t_plus:+.2f}]")
print()

profile = coefficient_profile(clf, x)
print("per-feature contributions (free max / observed / free min):")
for j in range(model.n_features):
    print(
        f"  feature {j}: alpha_max={profile.alpha_max[j]:+.2f} "
        f"beta={profile.beta[j]:+.2f} alpha_min={profile.alpha_min[j]:+.2f}"
    )
print()

print("reachable score interval per pinned set:")
for pinned in ([], [0], [1], [0, 1]):
    lo, hi = s_min(profile, pinned), s_max(profile, pinned)
    ok = is_valid_explanation(clf, x, pinned, ExplanationKind.REJECTION)
    print(f"  pinned {str(pinned):8s} -> [{lo:+.2f}, {hi:+.2f}]  still rejected for sure: {ok}")
print()
print("pinning either single feature already traps the score inside the band,")
print("so this rejection has two distinct minimum-size explanations of size 1.")
