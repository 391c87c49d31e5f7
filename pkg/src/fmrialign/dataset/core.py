"""ROI layout, the in-memory dataset, and per-vertex normalization."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from ..errors import ValidationError

DEGENERATE_STD = 1e-8

SPLITS = ("train", "test")


@dataclass(frozen=True)
class RoiLayout:
    """Ordered named brain regions; defines the structure of a signal vector."""

    rois: tuple[tuple[str, int], ...]

    def __post_init__(self):
        names = [name for name, _ in self.rois]
        if len(names) != len(set(names)):
            raise ValidationError(f"duplicate ROI names in layout: {names}")
        if not names:
            raise ValidationError("layout needs at least one ROI")
        for name, count in self.rois:
            if count < 1:
                raise ValidationError(f"ROI '{name}' has voxel count {count}, must be >= 1")

    @classmethod
    def from_pairs(cls, pairs) -> "RoiLayout":
        return cls(tuple((str(n), int(c)) for n, c in pairs))

    @property
    def names(self) -> list[str]:
        return [name for name, _ in self.rois]

    @property
    def voxel_counts(self) -> list[int]:
        return [count for _, count in self.rois]

    @property
    def total_voxels(self) -> int:
        return sum(count for _, count in self.rois)

    def slices(self) -> dict[str, slice]:
        out = {}
        start = 0
        for name, count in self.rois:
            out[name] = slice(start, start + count)
            start += count
        return out


@dataclass
class NormStats:
    """Per-vertex z-scoring statistics fit on the train split.

    Vertexes whose train standard deviation falls below ``DEGENERATE_STD``
    are mapped to zero and recorded in ``degenerate``.
    """

    mean: np.ndarray
    std: np.ndarray
    degenerate: list[int] = field(default_factory=list)

    def __post_init__(self):
        self.mean = np.asarray(self.mean, dtype=np.float64)
        self.std = np.asarray(self.std, dtype=np.float64)
        if self.mean.shape != self.std.shape or self.mean.ndim != 1:
            raise ValidationError(
                f"norm stats need matching 1-D mean/std, got {self.mean.shape} and {self.std.shape}"
            )
        if (self.std < 0).any():
            raise ValidationError("norm stats std must be non-negative")

    def to_dict(self) -> dict:
        return {"mean": self.mean.tolist(), "std": self.std.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "NormStats":
        stats = cls(mean=np.asarray(d["mean"]), std=np.asarray(d["std"]))
        stats.degenerate = [int(i) for i in np.nonzero(stats.std < DEGENERATE_STD)[0]]
        return stats


@dataclass
class FmriDataset:
    """Per-subject signal matrix with split labels and stimulus ids."""

    subject_id: str
    layout: RoiLayout
    signals: np.ndarray  # (M, L) float64
    stimulus_ids: list[str]
    split: list[str]
    norm_stats: NormStats | None = None

    def __post_init__(self):
        self.signals = np.asarray(self.signals, dtype=np.float64)
        if self.signals.ndim != 2:
            raise ValidationError(f"signals must be 2-D, got shape {self.signals.shape}")
        m, width = self.signals.shape
        if m == 0:
            raise ValidationError("no samples")
        if width != self.layout.total_voxels:
            raise ValidationError(
                f"signal width {width} does not match layout total {self.layout.total_voxels}"
            )
        if len(self.stimulus_ids) != m or len(self.split) != m:
            raise ValidationError(
                f"row count {m} does not match stimulus_ids ({len(self.stimulus_ids)}) "
                f"or split ({len(self.split)})"
            )
        bad = sorted({s for s in self.split} - set(SPLITS))
        if bad:
            raise ValidationError(f"unknown split labels: {bad}")
        if self.norm_stats is not None and self.norm_stats.mean.shape[0] != width:
            raise ValidationError(
                f"norm stats length {self.norm_stats.mean.shape[0]} != signal width {width}"
            )

    @property
    def n_samples(self) -> int:
        return self.signals.shape[0]

    @property
    def n_voxels(self) -> int:
        return self.signals.shape[1]

    def indices(self, split: str) -> np.ndarray:
        return np.array([i for i, s in enumerate(self.split) if s == split], dtype=np.intp)

    def subset(self, idx) -> "FmriDataset":
        idx = np.asarray(idx, dtype=np.intp)
        return FmriDataset(
            subject_id=self.subject_id,
            layout=self.layout,
            signals=self.signals[idx].copy(),
            stimulus_ids=[self.stimulus_ids[i] for i in idx],
            split=[self.split[i] for i in idx],
            norm_stats=self.norm_stats,
        )

    def with_signals(self, signals: np.ndarray, norm_stats=None) -> "FmriDataset":
        return FmriDataset(
            subject_id=self.subject_id,
            layout=self.layout,
            signals=signals,
            stimulus_ids=list(self.stimulus_ids),
            split=list(self.split),
            norm_stats=norm_stats,
        )


def zscore_fit(dataset: FmriDataset) -> NormStats:
    """Per-vertex mean/std on the train split only."""
    train_idx = dataset.indices("train")
    if train_idx.size < 1:
        raise ValidationError("zscore_fit needs at least one train sample")
    train = dataset.signals[train_idx]
    mean = train.mean(axis=0)
    std = train.std(axis=0)
    degenerate = [int(i) for i in np.nonzero(std < DEGENERATE_STD)[0]]
    return NormStats(mean=mean, std=std, degenerate=degenerate)


def zscore_apply(dataset: FmriDataset, stats: NormStats) -> FmriDataset:
    normalized = zscore_apply_signals(dataset.signals, stats)
    return dataset.with_signals(normalized, norm_stats=stats)


def zscore_apply_signals(signals: np.ndarray, stats: NormStats) -> np.ndarray:
    signals = np.asarray(signals, dtype=np.float64)
    if signals.shape[-1] != stats.mean.shape[0]:
        raise ValidationError(
            f"stats length {stats.mean.shape[0]} does not match signal width {signals.shape[-1]}"
        )
    safe_std = np.where(stats.std < DEGENERATE_STD, 1.0, stats.std)
    out = (signals - stats.mean) / safe_std
    if stats.degenerate:
        out[..., stats.degenerate] = 0.0
    return out


def zscore_unapply_signals(signals: np.ndarray, stats: NormStats) -> np.ndarray:
    """Inverse of apply on non-degenerate vertexes; degenerate ones return the mean."""
    signals = np.asarray(signals, dtype=np.float64)
    safe_std = np.where(stats.std < DEGENERATE_STD, 1.0, stats.std)
    out = signals * safe_std + stats.mean
    if stats.degenerate:
        out[..., stats.degenerate] = stats.mean[stats.degenerate]
    return out
