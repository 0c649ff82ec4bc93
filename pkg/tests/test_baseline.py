import numpy as np

from minaxp import (
    ExplanationKind,
    Instance,
    Label,
    LinearModel,
    RejectClassifier,
    brute_force_minimum,
    explain_negative,
    explain_positive,
    explain_rejection,
    is_valid_explanation,
    random_case,
    subset_minimal_explanation,
    unit_box,
)


def test_band_case_drops_first_feature(band_case):
    # ascending deletion removes feature 0, then cannot remove feature 1
    clf, instance = band_case
    explanation = subset_minimal_explanation(clf, instance)
    assert explanation.indices == (1,)
    assert explanation.kind is ExplanationKind.REJECTION
    assert not explanation.certified_minimum


def test_empty_set_valid_deletes_everything():
    model = LinearModel(np.zeros(3), 0.0, unit_box(3))
    clf = RejectClassifier(model, -1.0, 1.0)
    instance = Instance.validated(model, [0.2, 0.5, 0.8])
    assert subset_minimal_explanation(clf, instance).indices == ()

    strong_bias = LinearModel(np.array([1.0, 1.0]), 5.0, unit_box(2))
    clf2 = RejectClassifier(strong_bias, -1.0, 1.0)
    inst2 = Instance.validated(strong_bias, [0.1, 0.9])
    assert subset_minimal_explanation(clf2, inst2).indices == ()


def test_subset_minimality_and_validity():
    rng = np.random.default_rng(21)
    for i in range(90):
        n = int(rng.integers(2, 12))
        label = (Label.POSITIVE, Label.NEGATIVE, Label.REJECT)[i % 3]
        clf, instance = random_case(rng, n, label)
        explanation = subset_minimal_explanation(clf, instance)
        assert is_valid_explanation(clf, instance, explanation.indices, explanation.kind)
        for j in explanation.indices:
            reduced = [k for k in explanation.indices if k != j]
            assert not is_valid_explanation(clf, instance, reduced, explanation.kind)


def test_never_smaller_than_certified_minimum():
    rng = np.random.default_rng(22)
    for i in range(90):
        n = int(rng.integers(2, 12))
        label = (Label.POSITIVE, Label.NEGATIVE, Label.REJECT)[i % 3]
        clf, instance = random_case(rng, n, label)
        baseline = subset_minimal_explanation(clf, instance)
        if label is Label.POSITIVE:
            exact, _ = explain_positive(clf, instance)
        elif label is Label.NEGATIVE:
            exact, _ = explain_negative(clf, instance)
        else:
            exact = explain_rejection(clf, instance)
        assert baseline.size >= exact.size
        assert exact.size == brute_force_minimum(clf, instance).size


def test_deterministic(band_case):
    clf, instance = band_case
    assert subset_minimal_explanation(clf, instance) == subset_minimal_explanation(clf, instance)
