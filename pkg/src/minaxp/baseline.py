"""Deletion-based subset-minimal explainer, the comparison baseline.

Starts from the full feature set and walks indices in ascending order,
dropping every feature whose removal keeps the explanation valid.  The
result is irredundant (no single remaining feature can be dropped) but not
necessarily of minimum size, which is exactly the contrast the exact
explainers are measured against.
"""

from __future__ import annotations

from .model import (
    DEFAULT_EPSILON,
    Explanation,
    ExplanationKind,
    Instance,
    RejectClassifier,
    coefficient_profile,
    kind_for_label,
    predict,
)


def subset_minimal_explanation(
    clf: RejectClassifier, instance: Instance, eps: float = DEFAULT_EPSILON
) -> Explanation:
    """Subset-minimal explanation for whatever the instance's prediction is.

    Validity under a removal is tracked incrementally: dropping feature j
    raises the reachable maximum by ``delta_minus[j]`` and lowers the
    reachable minimum by ``delta_plus[j]``, so each trial costs O(1).
    """
    pred = predict(clf, instance, eps)
    kind = kind_for_label(pred.label)
    profile = coefficient_profile(clf, instance)
    t_minus, t_plus = clf.t_minus, clf.t_plus

    # With every feature pinned both bounds collapse onto the score itself.
    smax = pred.score
    smin = pred.score
    kept = []
    for j in range(profile.n_features):
        trial_max = smax + profile.delta_minus[j]
        trial_min = smin - profile.delta_plus[j]
        if kind is ExplanationKind.POSITIVE:
            removable = trial_min >= t_plus - eps
        elif kind is ExplanationKind.NEGATIVE:
            removable = trial_max <= t_minus + eps
        else:
            removable = trial_max <= t_plus + eps and trial_min >= t_minus - eps
        if removable:
            smax = trial_max
            smin = trial_min
        else:
            kept.append(j)
    return Explanation(indices=tuple(kept), kind=kind, certified_minimum=False)
