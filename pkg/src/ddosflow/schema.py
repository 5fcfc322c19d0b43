"""Flow-record data model: feature catalog, records, labels, datasets.

The catalog is the single authority on which CSV columns are model features,
which are socket/identity columns to discard, and which one carries the label.
It ships as a data file so column sets can be versioned without code changes.

Catalog file format (UTF-8 text, one directive per line):

    version <tag>
    feature <column name>
    drop <column name>
    label <column name>

``#`` begins a comment. The order of ``feature`` lines defines feature order.
Column names are matched exactly after trimming surrounding whitespace.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import DataError, SchemaError

__all__ = [
    "LabelClass", "FeatureCatalog", "FlowRecord", "Dataset",
    "load_catalog", "parse_catalog", "save_catalog", "default_catalog_path",
    "validate_record",
]


class LabelClass(enum.IntEnum):
    BENIGN = 0
    ATTACK = 1


@dataclass(frozen=True)
class FeatureCatalog:
    """Ordered feature columns, dropped columns, and the label column."""

    feature_names: tuple[str, ...]
    dropped_names: tuple[str, ...]
    label_name: str
    version_tag: str = ""

    def __post_init__(self):
        if not self.feature_names:
            raise SchemaError("catalog has no feature columns")
        seen = set()
        for name in self.feature_names:
            if name in seen:
                raise SchemaError(f"duplicate feature column: {name!r}")
            seen.add(name)
        dropped = set(self.dropped_names)
        if len(dropped) != len(self.dropped_names):
            raise SchemaError("duplicate entries in dropped columns")
        overlap = seen & dropped
        if overlap:
            raise SchemaError(f"columns both feature and dropped: {sorted(overlap)}")
        if self.label_name in seen:
            raise SchemaError(f"label column {self.label_name!r} listed as feature")
        if self.label_name in dropped:
            raise SchemaError(f"label column {self.label_name!r} listed as dropped")

    @property
    def feature_count(self) -> int:
        return len(self.feature_names)


@dataclass(frozen=True)
class FlowRecord:
    """One flow: numeric feature vector plus label and provenance."""

    features: np.ndarray
    label: LabelClass
    subtype: str | None = None  # attack name for attack flows, None for benign
    source_row: int = -1


class Dataset:
    """Immutable collection of flow records sharing one catalog.

    Stored columnar (features matrix, label vector) for numeric work; the
    record-level view is materialized on demand.
    """

    def __init__(self, features: np.ndarray, labels: np.ndarray, catalog: FeatureCatalog,
                 subtypes: tuple[str | None, ...] | None = None,
                 source_rows: np.ndarray | None = None, provenance: str = ""):
        features = np.asarray(features, dtype=np.float64)
        if features.ndim != 2:
            raise DataError(f"features must be 2-D, got shape {features.shape}")
        if features.shape[1] != catalog.feature_count:
            raise DataError(
                f"feature width {features.shape[1]} does not match catalog "
                f"({catalog.feature_count})")
        labels = np.asarray(labels, dtype=np.int64)
        if labels.shape != (features.shape[0],):
            raise DataError("labels length does not match record count")
        self.features = features
        self.labels = labels
        self.catalog = catalog
        self.subtypes = subtypes if subtypes is not None else (None,) * features.shape[0]
        if len(self.subtypes) != features.shape[0]:
            raise DataError("subtypes length does not match record count")
        self.source_rows = (source_rows if source_rows is not None
                            else np.arange(features.shape[0], dtype=np.int64))
        self.provenance = provenance
        self.features.setflags(write=False)
        self.labels.setflags(write=False)

    def __len__(self) -> int:
        return self.features.shape[0]

    def __getitem__(self, i: int) -> FlowRecord:
        return FlowRecord(features=self.features[i], label=LabelClass(int(self.labels[i])),
                          subtype=self.subtypes[i], source_row=int(self.source_rows[i]))

    def records(self):
        for i in range(len(self)):
            yield self[i]

    def subset(self, indices: np.ndarray, provenance_note: str = "") -> "Dataset":
        indices = np.asarray(indices, dtype=np.int64)
        note = f"{self.provenance}; {provenance_note}" if provenance_note else self.provenance
        return Dataset(
            features=self.features[indices].copy(),
            labels=self.labels[indices].copy(),
            catalog=self.catalog,
            subtypes=tuple(self.subtypes[int(i)] for i in indices),
            source_rows=self.source_rows[indices].copy(),
            provenance=note,
        )

    def replace_features(self, features: np.ndarray, provenance_note: str = "") -> "Dataset":
        note = f"{self.provenance}; {provenance_note}" if provenance_note else self.provenance
        return Dataset(features=features, labels=self.labels.copy(), catalog=self.catalog,
                       subtypes=self.subtypes, source_rows=self.source_rows.copy(),
                       provenance=note)

    def raw_label(self, i: int) -> str:
        """Original label string for CSV output (subtype or BENIGN)."""
        if self.labels[i] == LabelClass.BENIGN:
            return "BENIGN"
        return self.subtypes[i] or "Attack"


def parse_catalog(text: str, origin: str = "<string>") -> FeatureCatalog:
    features: list[str] = []
    dropped: list[str] = []
    label: str | None = None
    version = ""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split(None, 1)
        directive = parts[0]
        arg = parts[1].strip() if len(parts) > 1 else ""
        if not arg:
            raise SchemaError(f"{origin}:{lineno}: directive {directive!r} needs an argument")
        if directive == "feature":
            features.append(arg)
        elif directive == "drop":
            dropped.append(arg)
        elif directive == "label":
            if label is not None:
                raise SchemaError(f"{origin}:{lineno}: repeated label directive")
            label = arg
        elif directive == "version":
            version = arg
        else:
            raise SchemaError(f"{origin}:{lineno}: unknown directive {directive!r}")
    if label is None:
        raise SchemaError(f"{origin}: no label directive")
    return FeatureCatalog(feature_names=tuple(features), dropped_names=tuple(dropped),
                          label_name=label, version_tag=version)


def load_catalog(path: str | Path) -> FeatureCatalog:
    """Parse a catalog file. Raises SchemaError on any contract violation."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise SchemaError(f"cannot read catalog {path}: {exc}") from exc
    return parse_catalog(text, origin=str(path))


def save_catalog(catalog: FeatureCatalog, path: str | Path) -> None:
    lines = []
    if catalog.version_tag:
        lines.append(f"version {catalog.version_tag}")
    lines.append(f"label {catalog.label_name}")
    for name in catalog.dropped_names:
        lines.append(f"drop {name}")
    for name in catalog.feature_names:
        lines.append(f"feature {name}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def default_catalog_path() -> Path:
    """Path of the catalog shipped with the package (77-feature CICDDoS2019 set)."""
    return Path(resources.files("ddosflow").joinpath("data/cicddos2019_catalog.txt"))


def validate_record(record: FlowRecord, catalog: FeatureCatalog) -> list[str]:
    """Check one record against the catalog. Empty list means valid.

    Pure function: violations are reported as data, not raised.
    """
    violations: list[str] = []
    n = len(record.features)
    if n != catalog.feature_count:
        violations.append(
            f"feature length {n} does not match catalog ({catalog.feature_count})")
    for i, value in enumerate(record.features):
        if not math.isfinite(value):
            violations.append(f"non-finite value at feature index {i}")
    return violations
