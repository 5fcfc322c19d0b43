"""Flow CSV ingestion, row cleaning, label encoding, synthetic data.

Cleaning follows the drop-the-row rule: any record with a missing, unparsable,
or non-finite feature cell is discarded and counted, never imputed. The
literal strings "Infinity", "inf", "NaN", "nan" (case-insensitive, with or
without sign) and anything that fails to parse as a number all count as
non-finite.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DataError
from .nn import Rng
from .schema import Dataset, FeatureCatalog, LabelClass

__all__ = [
    "CleaningReport", "SynthSpec", "load_flow_csv", "encode_labels",
    "generate_synthetic", "synthetic_catalog", "merge_datasets",
]


@dataclass(frozen=True)
class CleaningReport:
    rows_read: int
    rows_dropped_nonfinite: int
    rows_dropped_malformed: int
    rows_kept: int

    def __post_init__(self):
        total = self.rows_kept + self.rows_dropped_nonfinite + self.rows_dropped_malformed
        if total != self.rows_read:
            raise ValueError("cleaning report does not balance")

    def merged(self, other: "CleaningReport") -> "CleaningReport":
        return CleaningReport(
            rows_read=self.rows_read + other.rows_read,
            rows_dropped_nonfinite=self.rows_dropped_nonfinite + other.rows_dropped_nonfinite,
            rows_dropped_malformed=self.rows_dropped_malformed + other.rows_dropped_malformed,
            rows_kept=self.rows_kept + other.rows_kept,
        )


@dataclass(frozen=True)
class SynthSpec:
    """Two-cluster Gaussian synthetic flows for dataset-free testing."""

    n_benign: int
    n_attack: int
    n_features: int = 77
    class_separation: float = 4.0  # distance between the class mean vectors
    noise_scale: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.n_benign < 0 or self.n_attack < 0:
            raise ValueError("record counts must be nonnegative")
        if self.n_features < 1:
            raise ValueError("n_features must be at least 1")
        if self.class_separation < 0:
            raise ValueError("class_separation must be nonnegative")
        if self.noise_scale <= 0:
            raise ValueError("noise_scale must be positive")


def encode_labels(raw_label: str) -> tuple[LabelClass, str | None]:
    """BENIGN (case-insensitive, trimmed) -> Benign; anything else -> Attack.

    Attack labels keep the raw string as the subtype. Empty labels are a data
    error, not a class.
    """
    trimmed = raw_label.strip()
    if not trimmed:
        raise DataError("empty label string")
    if trimmed.upper() == "BENIGN":
        return LabelClass.BENIGN, None
    return LabelClass.ATTACK, trimmed


_NONFINITE_TOKENS = {"infinity", "inf", "+inf", "-inf", "-infinity", "+infinity", "nan", "-nan"}


def _parse_cell(cell: str) -> float | None:
    """Numeric value of a feature cell, or None when non-finite/unparsable."""
    text = cell.strip()
    if not text or text.lower() in _NONFINITE_TOKENS:
        return None
    try:
        value = float(text)
    except ValueError:
        return None
    if not math.isfinite(value):
        return None
    return value


def load_flow_csv(path: str | Path, catalog: FeatureCatalog) -> tuple[Dataset, CleaningReport]:
    """Load one flow CSV into a Dataset, dropping and counting bad rows.

    The header must contain every catalog feature and the label column;
    columns named in dropped_names (and any unknown extras) are discarded.
    Rows are classified exactly one way: malformed (wrong field count or
    empty label) or non-finite (any bad feature cell) or kept.
    """
    path = Path(path)
    try:
        handle = path.open(newline="", encoding="utf-8", errors="replace")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc

    with handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: missing header row") from None
        names = [h.strip() for h in header]
        positions = {}
        for i, name in enumerate(names):
            positions.setdefault(name, i)
        missing = [n for n in catalog.feature_names if n not in positions]
        if missing:
            raise DataError(f"{path}: header lacks catalog features {missing[:5]}"
                            + ("..." if len(missing) > 5 else ""))
        if catalog.label_name not in positions:
            raise DataError(f"{path}: header lacks label column {catalog.label_name!r}")
        feat_idx = [positions[n] for n in catalog.feature_names]
        label_idx = positions[catalog.label_name]
        width = len(names)

        features: list[list[float]] = []
        labels: list[int] = []
        subtypes: list[str | None] = []
        source_rows: list[int] = []
        rows_read = 0
        dropped_nonfinite = 0
        dropped_malformed = 0
        for row_index, row in enumerate(reader):
            rows_read += 1
            if len(row) != width:
                dropped_malformed += 1
                continue
            raw_label = row[label_idx].strip()
            if not raw_label:
                dropped_malformed += 1
                continue
            values = []
            ok = True
            for idx in feat_idx:
                value = _parse_cell(row[idx])
                if value is None:
                    ok = False
                    break
                values.append(value)
            if not ok:
                dropped_nonfinite += 1
                continue
            label, subtype = encode_labels(raw_label)
            features.append(values)
            labels.append(int(label))
            subtypes.append(subtype)
            source_rows.append(row_index)

    report = CleaningReport(rows_read=rows_read, rows_dropped_nonfinite=dropped_nonfinite,
                            rows_dropped_malformed=dropped_malformed, rows_kept=len(features))
    matrix = (np.asarray(features, dtype=np.float64) if features
              else np.empty((0, catalog.feature_count), dtype=np.float64))
    dataset = Dataset(features=matrix, labels=np.asarray(labels, dtype=np.int64),
                      catalog=catalog, subtypes=tuple(subtypes),
                      source_rows=np.asarray(source_rows, dtype=np.int64),
                      provenance=f"csv:{path.name}")
    return dataset, report


def merge_datasets(datasets: list[Dataset]) -> Dataset:
    """Concatenate datasets sharing one catalog; source_row restarts per file."""
    if not datasets:
        raise DataError("no datasets to merge")
    catalog = datasets[0].catalog
    for ds in datasets[1:]:
        if ds.catalog.feature_names != catalog.feature_names:
            raise DataError("cannot merge datasets with different catalogs")
    subtypes: list[str | None] = []
    for ds in datasets:
        subtypes.extend(ds.subtypes)
    return Dataset(
        features=np.concatenate([ds.features for ds in datasets], axis=0),
        labels=np.concatenate([ds.labels for ds in datasets]),
        catalog=catalog,
        subtypes=tuple(subtypes),
        source_rows=np.concatenate([ds.source_rows for ds in datasets]),
        provenance="; ".join(ds.provenance for ds in datasets),
    )


def synthetic_catalog(n_features: int) -> FeatureCatalog:
    names = tuple(f"f{i:02d}" for i in range(n_features))
    return FeatureCatalog(feature_names=names, dropped_names=(), label_name="Label",
                          version_tag=f"synthetic-{n_features}")


def generate_synthetic(spec: SynthSpec) -> Dataset:
    """Deterministic two-cluster dataset: benign around 0, attack around a mean
    vector at euclidean distance class_separation, independent Gaussian noise."""
    rng = Rng(spec.seed)
    d = spec.n_features
    offset = spec.class_separation / math.sqrt(d)
    benign = rng.normal((spec.n_benign, d)) * spec.noise_scale
    attack = rng.normal((spec.n_attack, d)) * spec.noise_scale + offset
    features = np.concatenate([benign, attack], axis=0)
    labels = np.concatenate([
        np.full(spec.n_benign, int(LabelClass.BENIGN), dtype=np.int64),
        np.full(spec.n_attack, int(LabelClass.ATTACK), dtype=np.int64),
    ])
    subtypes = (None,) * spec.n_benign + ("Attack",) * spec.n_attack
    return Dataset(features=features, labels=labels, catalog=synthetic_catalog(d),
                   subtypes=subtypes,
                   provenance=(f"synthetic(seed={spec.seed}, benign={spec.n_benign}, "
                               f"attack={spec.n_attack}, separation={spec.class_separation}, "
                               f"noise={spec.noise_scale})"))
