"""Synthetic data with known ground truth.

Both modalities are driven by one latent: per-class centers plus within-class
jitter give a latent z per sample, and fixed random maps with unit-norm rows
project it into voxel space and embedding space, each with independent additive
Gaussian noise. Under this construction a linear map between the two spaces is
exactly the right model, which makes the generator a usable oracle for the
whole pipeline.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ValidationError
from ..numerics import RngStream
from .bundles import EmbeddingTable
from .core import FmriDataset, RoiLayout


@dataclass(frozen=True)
class SyntheticSpec:
    latent_dim: int
    layout: RoiLayout
    embedding_dim: int
    num_classes: int
    n_train: int
    n_test: int
    noise_std_fmri: float
    noise_std_emb: float
    seed: int
    class_jitter: float = 0.5

    def __post_init__(self):
        for name in ("latent_dim", "embedding_dim", "num_classes", "n_train", "n_test"):
            if getattr(self, name) < 1:
                raise ValidationError(f"{name} must be >= 1, got {getattr(self, name)}")
        for name in ("noise_std_fmri", "noise_std_emb", "class_jitter"):
            if getattr(self, name) < 0:
                raise ValidationError(f"{name} must be >= 0, got {getattr(self, name)}")

    @property
    def n_samples(self) -> int:
        return self.n_train + self.n_test

    def to_dict(self) -> dict:
        return {
            "latent_dim": self.latent_dim,
            "layout": [{"name": n, "voxel_count": c} for n, c in self.layout.rois],
            "embedding_dim": self.embedding_dim,
            "num_classes": self.num_classes,
            "n_train": self.n_train,
            "n_test": self.n_test,
            "noise_std_fmri": self.noise_std_fmri,
            "noise_std_emb": self.noise_std_emb,
            "seed": self.seed,
            "class_jitter": self.class_jitter,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SyntheticSpec":
        return cls(
            latent_dim=int(d["latent_dim"]),
            layout=RoiLayout.from_pairs((r["name"], r["voxel_count"]) for r in d["layout"]),
            embedding_dim=int(d["embedding_dim"]),
            num_classes=int(d["num_classes"]),
            n_train=int(d["n_train"]),
            n_test=int(d["n_test"]),
            noise_std_fmri=float(d["noise_std_fmri"]),
            noise_std_emb=float(d["noise_std_emb"]),
            seed=int(d["seed"]),
            class_jitter=float(d.get("class_jitter", 0.5)),
        )


@dataclass
class SyntheticTruth:
    """Everything the generator knows and the pipeline has to recover."""

    voxel_map: np.ndarray      # (L, d_z), unit-norm rows
    embedding_map: np.ndarray  # (D, d_z), unit-norm rows
    latents: np.ndarray        # (M, d_z)
    class_centers: np.ndarray  # (K, d_z)
    labels: list[str]          # class name per sample


def _unit_rows(matrix: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(matrix, axis=1, keepdims=True)
    return matrix / norms


def class_name(k: int) -> str:
    return f"class-{k:03d}"


def synth_generate(spec: SyntheticSpec) -> tuple[FmriDataset, EmbeddingTable, SyntheticTruth]:
    root = RngStream(spec.seed)
    centers = root.child("centers").generator().normal(size=(spec.num_classes, spec.latent_dim))
    voxel_map = _unit_rows(
        root.child("voxel_map").generator().normal(size=(spec.layout.total_voxels, spec.latent_dim))
    )
    embedding_map = _unit_rows(
        root.child("embedding_map").generator().normal(size=(spec.embedding_dim, spec.latent_dim))
    )

    m = spec.n_samples
    class_idx = np.arange(m) % spec.num_classes
    class_idx = root.child("assignment").generator().permutation(class_idx)
    jitter = root.child("latents").generator().normal(size=(m, spec.latent_dim))
    latents = centers[class_idx] + spec.class_jitter * jitter

    signals = latents @ voxel_map.T
    if spec.noise_std_fmri > 0:
        signals = signals + spec.noise_std_fmri * root.child("noise_fmri").generator().normal(
            size=signals.shape
        )
    embeddings = latents @ embedding_map.T
    if spec.noise_std_emb > 0:
        embeddings = embeddings + spec.noise_std_emb * root.child("noise_emb").generator().normal(
            size=embeddings.shape
        )

    stimulus_ids = [f"stim-{i:05d}" for i in range(m)]
    split = ["train"] * spec.n_train + ["test"] * spec.n_test
    dataset = FmriDataset(
        subject_id=f"synth-{spec.seed}",
        layout=spec.layout,
        signals=signals,
        stimulus_ids=stimulus_ids,
        split=split,
    )
    table = EmbeddingTable(stimulus_ids, embeddings)
    truth = SyntheticTruth(
        voxel_map=voxel_map,
        embedding_map=embedding_map,
        latents=latents,
        class_centers=centers,
        labels=[class_name(int(k)) for k in class_idx],
    )
    return dataset, table, truth
