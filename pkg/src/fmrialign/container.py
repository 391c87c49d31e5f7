"""Binary container: length-prefixed JSON header + concatenated f32le blobs.

Used for model checkpoints, alignment maps, and synthetic ground truth. The
header records a tensor table (name, shape, offset) and a CRC32 of the blob
region, so truncation and corruption are detected at load time. Values are
stored as little-endian float32 and returned as float64.
"""

from __future__ import annotations

import json
import struct
import zlib
from pathlib import Path

import numpy as np

from .errors import CheckpointError

FORMAT_VERSION = 1

_LEN = struct.Struct("<I")


def save_container(path, meta: dict, tensors: dict[str, np.ndarray]) -> None:
    blobs = []
    table = []
    offset = 0
    for name, arr in tensors.items():
        arr32 = np.ascontiguousarray(np.asarray(arr), dtype="<f4")
        raw = arr32.tobytes()
        table.append({"name": name, "shape": list(arr32.shape), "offset": offset})
        blobs.append(raw)
        offset += len(raw)
    blob = b"".join(blobs)
    header = {
        "format_version": FORMAT_VERSION,
        "meta": meta,
        "tensors": table,
        "blob_size": len(blob),
        "blob_crc32": zlib.crc32(blob),
    }
    encoded = json.dumps(header, sort_keys=True).encode("utf-8")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as fh:
        fh.write(_LEN.pack(len(encoded)))
        fh.write(encoded)
        fh.write(blob)


def load_container(path) -> tuple[dict, dict[str, np.ndarray]]:
    path = Path(path)
    raw = path.read_bytes()
    if len(raw) < _LEN.size:
        raise CheckpointError(f"{path}: file too short for a container header")
    (header_len,) = _LEN.unpack_from(raw, 0)
    header_end = _LEN.size + header_len
    if len(raw) < header_end:
        raise CheckpointError(f"{path}: truncated header")
    try:
        header = json.loads(raw[_LEN.size:header_end].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CheckpointError(f"{path}: unreadable header ({exc})") from exc
    version = header.get("format_version")
    if version != FORMAT_VERSION:
        raise CheckpointError(f"{path}: unknown format_version {version!r}")
    blob = raw[header_end:]
    if len(blob) != header["blob_size"]:
        raise CheckpointError(
            f"{path}: blob region is {len(blob)} bytes, header says {header['blob_size']}"
        )
    if zlib.crc32(blob) != header["blob_crc32"]:
        raise CheckpointError(f"{path}: blob CRC mismatch")
    tensors: dict[str, np.ndarray] = {}
    for entry in header["tensors"]:
        name = entry["name"]
        shape = tuple(entry["shape"])
        count = int(np.prod(shape)) if shape else 1
        start = entry["offset"]
        stop = start + 4 * count
        if stop > len(blob):
            raise CheckpointError(f"{path}: tensor '{name}' overruns blob region")
        arr = np.frombuffer(blob, dtype="<f4", count=count, offset=start)
        tensors[name] = arr.reshape(shape).astype(np.float64)
    return header["meta"], tensors


def peek_meta(path) -> dict:
    """Read only the JSON header of a container (cheap inspect)."""
    path = Path(path)
    with open(path, "rb") as fh:
        prefix = fh.read(_LEN.size)
        if len(prefix) < _LEN.size:
            raise CheckpointError(f"{path}: file too short for a container header")
        (header_len,) = _LEN.unpack(prefix)
        encoded = fh.read(header_len)
    if len(encoded) < header_len:
        raise CheckpointError(f"{path}: truncated header")
    header = json.loads(encoded.decode("utf-8"))
    if header.get("format_version") != FORMAT_VERSION:
        raise CheckpointError(f"{path}: unknown format_version {header.get('format_version')!r}")
    return header
