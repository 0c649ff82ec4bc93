"""File formats: delimited datasets, serialized models, explanation reports.

The model file is a single JSON object with the fields ``weights``, ``bias``,
``t_minus``, ``t_plus``, ``domains`` and ``scaling`` (thresholds and scaling
may be null).  Reports are JSON lines, one record per explained instance,
followed by a single trailing aggregate object.  Numbers round-trip at full
precision.
"""

from __future__ import annotations

import csv
import json
import warnings
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .model import LinearModel, RejectClassifier

REPORT_RECORD_FIELDS = (
    "instance_id",
    "label",
    "score",
    "kind",
    "indices",
    "size",
    "certified_minimum",
    "method",
    "time_ms",
    "nodes",
    "boundary_tight",
)


class ModelFormatError(ValueError):
    """A model file is missing fields or violates an invariant."""


@dataclass(frozen=True)
class ScalingInfo:
    """Per-feature min-max ranges recorded on the training split.

    ``transform`` maps a training feature into [0, 1]; unseen data may land
    outside that interval and is deliberately not clipped here.  Constant
    features map to 0 by convention.
    """

    mins: np.ndarray
    maxs: np.ndarray

    @classmethod
    def fit(cls, features: np.ndarray) -> "ScalingInfo":
        X = np.asarray(features, dtype=float)
        mins = X.min(axis=0)
        maxs = X.max(axis=0)
        constant = mins == maxs
        if np.any(constant):
            warnings.warn(
                f"{int(constant.sum())} constant feature(s) under scaling; mapped to 0",
                RuntimeWarning,
                stacklevel=2,
            )
        return cls(mins=mins, maxs=maxs)

    def transform(self, features: np.ndarray) -> np.ndarray:
        X = np.asarray(features, dtype=float)
        span = self.maxs - self.mins
        safe = np.where(span == 0.0, 1.0, span)
        out = (X - self.mins) / safe
        out[..., span == 0.0] = 0.0
        return out


@dataclass(frozen=True)
class Dataset:
    features: np.ndarray
    labels: np.ndarray  # values in {-1, +1}
    feature_names: tuple[str, ...]
    label_name: str
    scaling: ScalingInfo | None = None

    @property
    def n_instances(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]


def _normalize_labels(raw: np.ndarray, column: str) -> np.ndarray:
    values = sorted(set(raw.tolist()))
    if len(values) > 2:
        raise ValueError(
            f"label column {column!r} has {len(values)} distinct values, expected two"
        )
    if set(values) <= {-1.0, 1.0}:
        return raw.astype(int)
    # Two arbitrary numeric labels: smaller becomes -1, larger +1.
    out = np.where(raw == values[-1], 1, -1) if len(values) == 2 else np.full(raw.size, -1)
    return out.astype(int)


def _read_numeric_table(path: Path, delimiter: str) -> tuple[list[str], np.ndarray]:
    with path.open(newline="") as fh:
        reader = csv.reader(fh, delimiter=delimiter)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        rows = [row for row in reader if row and any(cell.strip() for cell in row)]
    if not rows:
        raise ValueError(f"{path}: no data rows")
    matrix = np.empty((len(rows), len(header)), dtype=float)
    for i, row in enumerate(rows):
        if len(row) != len(header):
            raise ValueError(f"{path}: row {i + 2} has {len(row)} cells, expected {len(header)}")
        for j, cell in enumerate(row):
            try:
                matrix[i, j] = float(cell)
            except ValueError:
                raise ValueError(
                    f"{path}: non-numeric cell {cell!r} at row {i + 2}, column {header[j]!r}"
                ) from None
    return header, matrix


def load_feature_matrix(path, delimiter: str = ",") -> tuple[np.ndarray, tuple[str, ...]]:
    """Read a header-plus-rows text file where every column is a feature."""
    header, matrix = _read_numeric_table(Path(path), delimiter)
    return matrix, tuple(header)


def load_dataset(
    path,
    delimiter: str = ",",
    label_column: str | int | None = None,
    scale: bool = False,
    scaling: ScalingInfo | None = None,
) -> Dataset:
    """Read a delimited text file with a header row into features and labels.

    ``label_column`` selects the label by header name or position (default:
    last column).  ``scale=True`` fits min-max scaling on this data and
    applies it; passing an existing ``scaling`` applies that transform
    instead, for test splits.
    """
    if scale and scaling is not None:
        raise ValueError("pass either scale=True or an existing scaling, not both")
    path = Path(path)
    header, matrix = _read_numeric_table(path, delimiter)

    if label_column is None:
        label_idx = len(header) - 1
    elif isinstance(label_column, int):
        label_idx = label_column if label_column >= 0 else len(header) + label_column
    else:
        try:
            label_idx = header.index(label_column)
        except ValueError:
            raise ValueError(
                f"{path}: label column {label_column!r} not in header {header}"
            ) from None
    if not 0 <= label_idx < len(header):
        raise ValueError(f"{path}: label column index {label_column} out of range")

    feature_idx = [j for j in range(len(header)) if j != label_idx]
    features = matrix[:, feature_idx]
    labels = _normalize_labels(matrix[:, label_idx], header[label_idx])

    if scale:
        scaling = ScalingInfo.fit(features)
    if scaling is not None:
        if scaling.mins.size != features.shape[1]:
            raise ValueError(
                f"{path}: scaling covers {scaling.mins.size} features, data has {features.shape[1]}"
            )
        features = scaling.transform(features)

    return Dataset(
        features=features,
        labels=labels,
        feature_names=tuple(header[j] for j in feature_idx),
        label_name=header[label_idx],
        scaling=scaling,
    )


@dataclass(frozen=True)
class ModelBundle:
    """A linear model plus optional thresholds and scaling metadata."""

    model: LinearModel
    t_minus: float | None = None
    t_plus: float | None = None
    scaling: ScalingInfo | None = None

    @classmethod
    def from_classifier(cls, clf: RejectClassifier, scaling: ScalingInfo | None = None):
        return cls(model=clf.model, t_minus=clf.t_minus, t_plus=clf.t_plus, scaling=scaling)

    def classifier(self) -> RejectClassifier:
        if self.t_minus is None or self.t_plus is None:
            raise ModelFormatError("model has no calibrated thresholds yet")
        return RejectClassifier(self.model, self.t_minus, self.t_plus)

    def with_thresholds(self, t_minus: float, t_plus: float) -> "ModelBundle":
        return ModelBundle(self.model, float(t_minus), float(t_plus), self.scaling)


def save_model(bundle: ModelBundle, path) -> None:
    """Write a model bundle as JSON; floats keep shortest round-trip precision."""
    payload = {
        "weights": bundle.model.weights.tolist(),
        "bias": bundle.model.bias,
        "t_minus": bundle.t_minus,
        "t_plus": bundle.t_plus,
        "domains": bundle.model.domains.tolist(),
        "scaling": None
        if bundle.scaling is None
        else {"mins": bundle.scaling.mins.tolist(), "maxs": bundle.scaling.maxs.tolist()},
    }
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")


def load_model(path) -> ModelBundle:
    """Read a model bundle, validating presence and consistency of all fields."""
    path = Path(path)
    try:
        payload = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"{path}: not valid JSON ({exc})") from None
    for field in ("weights", "bias", "t_minus", "t_plus", "domains", "scaling"):
        if field not in payload:
            raise ModelFormatError(f"{path}: missing field {field!r}")
    weights = np.asarray(payload["weights"], dtype=float)
    domains = np.asarray(payload["domains"], dtype=float)
    if domains.ndim != 2 or domains.shape != (weights.size, 2):
        raise ModelFormatError(
            f"{path}: domains shape {domains.shape} does not match {weights.size} weights"
        )
    t_minus, t_plus = payload["t_minus"], payload["t_plus"]
    if (t_minus is None) != (t_plus is None):
        raise ModelFormatError(f"{path}: thresholds must both be set or both null")
    if t_minus is not None and not t_minus < t_plus:
        raise ModelFormatError(f"{path}: t_minus ({t_minus}) must be strictly below t_plus ({t_plus})")
    scaling = None
    if payload["scaling"] is not None:
        raw = payload["scaling"]
        if "mins" not in raw or "maxs" not in raw:
            raise ModelFormatError(f"{path}: scaling must provide mins and maxs")
        mins = np.asarray(raw["mins"], dtype=float)
        maxs = np.asarray(raw["maxs"], dtype=float)
        if mins.size != weights.size or maxs.size != weights.size:
            raise ModelFormatError(f"{path}: scaling length does not match weights")
        scaling = ScalingInfo(mins=mins, maxs=maxs)
    try:
        model = LinearModel(weights, float(payload["bias"]), domains)
    except ValueError as exc:
        raise ModelFormatError(f"{path}: {exc}") from None
    return ModelBundle(
        model=model,
        t_minus=None if t_minus is None else float(t_minus),
        t_plus=None if t_plus is None else float(t_plus),
        scaling=scaling,
    )


@dataclass(frozen=True)
class ExplanationRecord:
    """One explained instance, as written to a report."""

    instance_id: int | str
    label: str
    score: float
    kind: str
    indices: tuple[int, ...]
    size: int
    certified_minimum: bool
    method: str  # "minabro" or "baseline"
    time_ms: float
    nodes: int | None = None
    boundary_tight: bool = False


def _group_stats(records: list[ExplanationRecord]) -> dict:
    if not records:
        return {
            "count": 0,
            "size_mean": None,
            "size_std": None,
            "time_mean_ms": None,
            "time_std_ms": None,
        }
    sizes = np.array([r.size for r in records], dtype=float)
    times = np.array([r.time_ms for r in records], dtype=float)
    return {
        "count": len(records),
        "size_mean": float(sizes.mean()),
        "size_std": float(sizes.std()),
        "time_mean_ms": float(times.mean()),
        "time_std_ms": float(times.std()),
    }


def aggregate_records(records: list[ExplanationRecord]) -> dict:
    """Mean and standard deviation of size and time, split by method and by
    classified versus rejected."""
    groups = {}
    for method in ("minabro", "baseline"):
        for split in ("classified", "rejected"):
            if split == "rejected":
                members = [r for r in records if r.method == method and r.kind == "REJECTION"]
            else:
                members = [r for r in records if r.method == method and r.kind != "REJECTION"]
            groups[f"{method}/{split}"] = _group_stats(members)
    return groups


def write_explanation_report(
    records: list[ExplanationRecord],
    path,
    skipped_out_of_domain: int = 0,
    note: str | None = None,
) -> None:
    """Write one JSON record per line plus a trailing aggregate object."""
    lines = []
    for record in records:
        payload = asdict(record)
        payload["indices"] = list(record.indices)
        lines.append(json.dumps(payload))
    aggregate = {
        "aggregate": {
            "by_group": aggregate_records(records),
            "skipped_out_of_domain": skipped_out_of_domain,
        }
    }
    if note is not None:
        aggregate["aggregate"]["note"] = note
    lines.append(json.dumps(aggregate))
    Path(path).write_text("\n".join(lines) + "\n")


def read_explanation_report(path) -> tuple[list[ExplanationRecord], dict]:
    """Parse a report back into records and the aggregate block."""
    records = []
    aggregate = None
    for line in Path(path).read_text().splitlines():
        if not line.strip():
            continue
        payload = json.loads(line)
        if "aggregate" in payload:
            aggregate = payload["aggregate"]
            continue
        payload["indices"] = tuple(payload["indices"])
        records.append(ExplanationRecord(**payload))
    if aggregate is None:
        raise ValueError(f"{path}: report is missing its aggregate line")
    return records, aggregate
