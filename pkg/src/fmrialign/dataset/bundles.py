"""Dataset and embedding bundle I/O.

A dataset bundle is a directory holding ``manifest.json`` plus a raw
little-endian float32 signal file (row-major, no header). An embedding bundle
is the same idea for a table of id -> vector rows. Checksums are written on
save and verified on load.
"""

from __future__ import annotations

import json
import zlib
from pathlib import Path

import numpy as np

from ..errors import BundleError
from .core import FmriDataset, NormStats, RoiLayout

BUNDLE_FORMAT_VERSION = 1

MANIFEST = "manifest.json"


def _read_manifest(path: Path, kind: str) -> dict:
    manifest_path = path / MANIFEST
    if not manifest_path.is_file():
        raise BundleError(f"{kind} bundle {path}: missing {MANIFEST}")
    try:
        return json.loads(manifest_path.read_text())
    except json.JSONDecodeError as exc:
        raise BundleError(f"{kind} bundle {path}: unreadable manifest ({exc})") from exc


def _read_f32_matrix(path: Path, rows: int, cols: int, crc32, what: str) -> np.ndarray:
    if not path.is_file():
        raise BundleError(f"missing {what} file: {path}")
    raw = path.read_bytes()
    expected = rows * cols * 4
    if len(raw) != expected:
        raise BundleError(
            f"{path}: {what} file holds {len(raw)} bytes, expected {expected} "
            f"({rows} rows x {cols} cols of f32le)"
        )
    if crc32 is not None and zlib.crc32(raw) != crc32:
        raise BundleError(f"{path}: {what} checksum mismatch")
    return np.frombuffer(raw, dtype="<f4").reshape(rows, cols).astype(np.float64)


def save_bundle(dataset: FmriDataset, path) -> None:
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    signals32 = np.ascontiguousarray(dataset.signals, dtype="<f4")
    raw = signals32.tobytes()
    signal_file = "signals.f32"
    manifest = {
        "format_version": BUNDLE_FORMAT_VERSION,
        "subject_id": dataset.subject_id,
        "rois": [{"name": n, "voxel_count": c} for n, c in dataset.layout.rois],
        "samples": [
            {"id": str(i), "stimulus_id": sid, "split": sp}
            for i, (sid, sp) in enumerate(zip(dataset.stimulus_ids, dataset.split))
        ],
        "signal_file": signal_file,
        "dtype": "f32le",
        "order": "row-major",
        "crc32": zlib.crc32(raw),
    }
    if dataset.norm_stats is not None:
        manifest["norm_stats"] = dataset.norm_stats.to_dict()
    (path / signal_file).write_bytes(raw)
    (path / MANIFEST).write_text(json.dumps(manifest, indent=1, sort_keys=True))


def load_bundle(path) -> FmriDataset:
    path = Path(path)
    manifest = _read_manifest(path, "dataset")
    version = manifest.get("format_version")
    if version != BUNDLE_FORMAT_VERSION:
        raise BundleError(f"{path}: unknown format_version {version!r}")
    if manifest.get("dtype", "f32le") != "f32le" or manifest.get("order", "row-major") != "row-major":
        raise BundleError(f"{path}: unsupported dtype/order in manifest")

    rois = manifest.get("rois", [])
    names = [r["name"] for r in rois]
    if len(names) != len(set(names)):
        raise BundleError(f"{path}: duplicate ROI names {names}")
    try:
        layout = RoiLayout.from_pairs((r["name"], r["voxel_count"]) for r in rois)
    except Exception as exc:
        raise BundleError(f"{path}: bad ROI table ({exc})") from exc

    samples = manifest.get("samples", [])
    if not samples:
        raise BundleError(f"{path}: no samples")
    stimulus_ids = [s["stimulus_id"] for s in samples]
    split = [s["split"] for s in samples]

    signals = _read_f32_matrix(
        path / manifest["signal_file"],
        rows=len(samples),
        cols=layout.total_voxels,
        crc32=manifest.get("crc32"),
        what="signal",
    )

    norm_stats = None
    if "norm_stats" in manifest and manifest["norm_stats"] is not None:
        norm_stats = NormStats.from_dict(manifest["norm_stats"])

    try:
        return FmriDataset(
            subject_id=manifest["subject_id"],
            layout=layout,
            signals=signals,
            stimulus_ids=stimulus_ids,
            split=split,
            norm_stats=norm_stats,
        )
    except Exception as exc:
        raise BundleError(f"{path}: {exc}") from exc


class EmbeddingTable:
    """Ordered id -> vector table with uniform dimension."""

    def __init__(self, ids: list[str], vectors: np.ndarray):
        vectors = np.asarray(vectors, dtype=np.float64)
        if vectors.ndim != 2:
            raise BundleError(f"embedding matrix must be 2-D, got shape {vectors.shape}")
        if len(ids) != vectors.shape[0]:
            raise BundleError(f"{len(ids)} ids but {vectors.shape[0]} embedding rows")
        if len(set(ids)) != len(ids):
            raise BundleError("duplicate ids in embedding table")
        if not np.all(np.isfinite(vectors)):
            raise BundleError("non-finite values in embedding table")
        self.ids = [str(i) for i in ids]
        self.vectors = vectors
        self._index = {sid: i for i, sid in enumerate(self.ids)}

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def __len__(self) -> int:
        return len(self.ids)

    def __contains__(self, sid: str) -> bool:
        return sid in self._index

    def vector(self, sid: str) -> np.ndarray:
        if sid not in self._index:
            raise KeyError(f"unknown id '{sid}'")
        return self.vectors[self._index[sid]]

    def rows_for(self, ids) -> np.ndarray:
        missing = [sid for sid in ids if sid not in self._index]
        if missing:
            raise BundleError(f"embedding table missing ids: {missing}")
        return self.vectors[[self._index[sid] for sid in ids]]


def save_embedding_bundle(table: EmbeddingTable, path) -> None:
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    raw = np.ascontiguousarray(table.vectors, dtype="<f4").tobytes()
    blob_file = "embeddings.f32"
    manifest = {
        "format_version": BUNDLE_FORMAT_VERSION,
        "dim": table.dim,
        "ids": table.ids,
        "blob_file": blob_file,
        "dtype": "f32le",
        "order": "row-major",
        "crc32": zlib.crc32(raw),
    }
    (path / blob_file).write_bytes(raw)
    (path / MANIFEST).write_text(json.dumps(manifest, indent=1, sort_keys=True))


def load_embedding_bundle(path) -> EmbeddingTable:
    path = Path(path)
    manifest = _read_manifest(path, "embedding")
    version = manifest.get("format_version")
    if version != BUNDLE_FORMAT_VERSION:
        raise BundleError(f"{path}: unknown format_version {version!r}")
    ids = [str(i) for i in manifest.get("ids", [])]
    if not ids:
        raise BundleError(f"{path}: no ids")
    dim = int(manifest["dim"])
    if dim < 1:
        raise BundleError(f"{path}: dim must be >= 1, got {dim}")
    vectors = _read_f32_matrix(
        path / manifest["blob_file"], rows=len(ids), cols=dim,
        crc32=manifest.get("crc32"), what="embedding",
    )
    return EmbeddingTable(ids, vectors)
