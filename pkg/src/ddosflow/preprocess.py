"""Data preparation: min-max scaling, splits, balanced sampling, sequence framing.

The scaler is fitted on training data only and applied unclamped elsewhere, so
validation/test values may fall outside [0, 1]. Constant features map to 0
instead of dividing by zero, keeping the feature width fixed.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .nn import Rng
from .schema import Dataset, LabelClass

__all__ = [
    "ScalerParams", "SplitSpec", "SequenceBatch",
    "fit_minmax", "apply_minmax", "stratified_split", "sized_split",
    "balance_sample", "frame_sequences",
]


@dataclass(frozen=True)
class ScalerParams:
    feature_min: np.ndarray
    feature_max: np.ndarray
    fitted_on: str = ""

    def __post_init__(self):
        lo = np.asarray(self.feature_min, dtype=np.float64)
        hi = np.asarray(self.feature_max, dtype=np.float64)
        if lo.shape != hi.shape or lo.ndim != 1:
            raise ValueError("min/max must be 1-D vectors of equal length")
        if np.any(lo > hi):
            raise ValueError("feature_min exceeds feature_max")
        object.__setattr__(self, "feature_min", lo)
        object.__setattr__(self, "feature_max", hi)


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 0.7
    val_fraction: float = 0.2
    test_fraction: float = 0.1
    seed: int = 0
    stratify_by_label: bool = True

    def __post_init__(self):
        for f in (self.train_fraction, self.val_fraction, self.test_fraction):
            if not 0.0 < f < 1.0:
                raise ValueError("split fractions must lie in (0, 1)")
        total = self.train_fraction + self.val_fraction + self.test_fraction
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"split fractions sum to {total}, expected 1")


@dataclass(frozen=True)
class SequenceBatch:
    """Feature vectors cut into fixed-length step sequences for the recurrent model."""

    sequences: np.ndarray  # (n_records, seq_len, step_dim)
    labels: np.ndarray     # (n_records,)
    seq_len: int
    step_dim: int

    def __post_init__(self):
        if self.sequences.shape != (len(self.labels), self.seq_len, self.step_dim):
            raise ValueError("sequence array shape disagrees with seq_len/step_dim")

    def __len__(self) -> int:
        return self.sequences.shape[0]

    def take(self, indices: np.ndarray) -> "SequenceBatch":
        return SequenceBatch(sequences=self.sequences[indices], labels=self.labels[indices],
                             seq_len=self.seq_len, step_dim=self.step_dim)


def fit_minmax(data: Dataset) -> ScalerParams:
    """Column-wise extrema of the fitting data."""
    if len(data) == 0:
        raise DataError("cannot fit scaler on an empty dataset")
    return ScalerParams(feature_min=data.features.min(axis=0),
                        feature_max=data.features.max(axis=0),
                        fitted_on=data.provenance)


def apply_minmax(data: Dataset, scaler: ScalerParams) -> Dataset:
    """x -> (x - min) / (max - min); constant features map to 0; no clamping."""
    if scaler.feature_min.shape[0] != data.catalog.feature_count:
        raise DataError(
            f"scaler width {scaler.feature_min.shape[0]} does not match dataset "
            f"({data.catalog.feature_count})")
    span = scaler.feature_max - scaler.feature_min
    degenerate = span == 0.0
    safe_span = np.where(degenerate, 1.0, span)
    scaled = (data.features - scaler.feature_min) / safe_span
    scaled[:, degenerate] = 0.0
    return data.replace_features(scaled, provenance_note="minmax")


def _allocate(n: int, fractions: tuple[float, ...]) -> list[int]:
    """Largest-remainder allocation of n items to fractions (sums to n exactly)."""
    ideal = [f * n for f in fractions]
    base = [int(np.floor(x)) for x in ideal]
    remainder = n - sum(base)
    order = sorted(range(len(fractions)), key=lambda i: (-(ideal[i] - base[i]), i))
    for i in order[:remainder]:
        base[i] += 1
    return base


def stratified_split(data: Dataset, spec: SplitSpec) -> tuple[Dataset, Dataset, Dataset]:
    """Deterministic three-way split; per-class counts within one record of ideal."""
    fractions = (spec.train_fraction, spec.val_fraction, spec.test_fraction)
    rng = Rng(spec.seed)
    if spec.stratify_by_label:
        groups = [np.flatnonzero(data.labels == int(cls)) for cls in LabelClass]
        for cls, idx in zip(LabelClass, groups):
            if 0 < len(idx) < 3:
                raise DataError(f"class {cls.name} has only {len(idx)} records; "
                                "too small to stratify")
        groups = [g for g in groups if len(g)]
    else:
        groups = [np.arange(len(data), dtype=np.int64)]

    parts: list[list[np.ndarray]] = [[], [], []]
    for idx in groups:
        perm = idx[rng.permutation(len(idx))]
        counts = _allocate(len(idx), fractions)
        start = 0
        for k, c in enumerate(counts):
            parts[k].append(perm[start:start + c])
            start += c
    picks = [np.sort(np.concatenate(p)) if p else np.empty(0, dtype=np.int64) for p in parts]
    names = ("train", "val", "test")
    return tuple(data.subset(picks[k], provenance_note=f"split:{names[k]}(seed={spec.seed})")
                 for k in range(3))  # type: ignore[return-value]


def sized_split(data: Dataset, n_train: int, n_val: int, n_test: int, seed: int,
                stratify_by_label: bool = True,
                holdout_subtype: str | None = None) -> tuple[Dataset, Dataset, Dataset]:
    """Split with explicit per-split record counts (record targets, not fractions).

    Counts must fit in the data. With holdout_subtype set, every record of that
    attack subtype goes to the test split (counted toward n_test) and none of
    them can appear in train/val.
    """
    total = n_train + n_val + n_test
    if total > len(data):
        raise DataError(f"requested {total} records but dataset has {len(data)}")
    rng = Rng(seed)

    held = np.empty(0, dtype=np.int64)
    pool = np.arange(len(data), dtype=np.int64)
    if holdout_subtype is not None:
        mask = np.array([st == holdout_subtype for st in data.subtypes])
        held = np.flatnonzero(mask)
        if len(held) > n_test:
            held = held[rng.permutation(len(held))[:n_test]]
        pool = np.flatnonzero(~mask)
    n_test_rest = n_test - len(held)

    def draw(pool_idx: np.ndarray, count: int) -> tuple[np.ndarray, np.ndarray]:
        if count > len(pool_idx):
            raise DataError("not enough records left for the requested split sizes")
        if stratify_by_label:
            picks = []
            rest = []
            labels = data.labels[pool_idx]
            class_groups = [pool_idx[labels == int(cls)] for cls in LabelClass]
            class_groups = [g for g in class_groups if len(g)]
            sizes = [len(g) for g in class_groups]
            shares = _allocate(count, tuple(s / sum(sizes) for s in sizes))
            # largest-remainder can ask for more than a small class holds; rebalance
            overflow = 0
            for i, g in enumerate(class_groups):
                if shares[i] > len(g):
                    overflow += shares[i] - len(g)
                    shares[i] = len(g)
            for i, g in enumerate(class_groups):
                while overflow > 0 and shares[i] < len(g):
                    shares[i] += 1
                    overflow -= 1
            for g, s in zip(class_groups, shares):
                perm = g[rng.permutation(len(g))]
                picks.append(perm[:s])
                rest.append(perm[s:])
            return np.concatenate(picks), np.concatenate(rest)
        perm = pool_idx[rng.permutation(len(pool_idx))]
        return perm[:count], perm[count:]

    train_idx, pool = draw(pool, n_train)
    val_idx, pool = draw(pool, n_val)
    test_idx, _ = draw(pool, n_test_rest)
    test_idx = np.concatenate([test_idx, held])
    return (
        data.subset(np.sort(train_idx), provenance_note=f"sized-split:train(seed={seed})"),
        data.subset(np.sort(val_idx), provenance_note=f"sized-split:val(seed={seed})"),
        data.subset(np.sort(test_idx), provenance_note=f"sized-split:test(seed={seed})"),
    )


def balance_sample(data: Dataset, per_group_count: int, group_key: str, seed: int) -> Dataset:
    """Cap every group at per_group_count records, sampled without replacement.

    group_key is "label" (Benign/Attack) or "subtype" (attack name; benign
    flows form the BENIGN group). Deterministic given seed.
    """
    if per_group_count < 1:
        raise ValueError("per_group_count must be at least 1")
    if group_key not in ("label", "subtype"):
        raise ValueError(f"unknown group key: {group_key!r}")
    if group_key == "label":
        keys = [LabelClass(int(l)).name for l in data.labels]
    else:
        keys = [st if st is not None else "BENIGN" for st in data.subtypes]
    rng = Rng(seed)
    picks = []
    for key in sorted(set(keys)):
        idx = np.flatnonzero(np.array([k == key for k in keys]))
        perm = idx[rng.permutation(len(idx))]
        picks.append(perm[:min(per_group_count, len(idx))])
    chosen = np.sort(np.concatenate(picks))
    return data.subset(chosen, provenance_note=f"balance({group_key}<={per_group_count})")


def frame_sequences(data: Dataset, seq_len: int) -> SequenceBatch:
    """Cut each feature vector, in catalog order, into seq_len consecutive chunks."""
    d = data.catalog.feature_count
    if seq_len < 1 or d % seq_len != 0:
        raise DataError(f"seq_len {seq_len} does not divide feature count {d}")
    step_dim = d // seq_len
    sequences = data.features.reshape(len(data), seq_len, step_dim).copy()
    return SequenceBatch(sequences=sequences, labels=data.labels.copy(),
                         seq_len=seq_len, step_dim=step_dim)
