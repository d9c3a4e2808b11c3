"""Checkpoint codec.

File layout::

    b"BEVNAVCK" | uint64 LE manifest length | manifest (canonical JSON) | payload

The manifest carries the format version, free-form metadata and one entry per
tensor (name, shape, byte offset into the payload). The payload is the
concatenation of every tensor as little-endian IEEE-754 float32.
"""
from __future__ import annotations

import json
import os
import struct
from pathlib import Path
from typing import Any

import numpy as np

from bevnav.common.errors import CheckpointError
from bevnav.common.utils import json_dumps_canonical

MAGIC = b"BEVNAVCK"
FORMAT_VERSION = 1
_LEN = struct.Struct("<Q")


def encode_checkpoint(tensors: dict[str, np.ndarray], meta: dict[str, Any]) -> bytes:
    entries = []
    chunks = []
    offset = 0
    for name, array in tensors.items():
        raw = np.ascontiguousarray(array, dtype="<f4").tobytes()
        entries.append({"name": name, "shape": list(np.shape(array)), "offset": offset})
        chunks.append(raw)
        offset += len(raw)
    manifest = {
        "format_version": FORMAT_VERSION,
        "meta": meta,
        "payload_bytes": offset,
        "tensors": entries,
    }
    head = json_dumps_canonical(manifest).encode("utf-8")
    return MAGIC + _LEN.pack(len(head)) + head + b"".join(chunks)


def decode_checkpoint(blob: bytes) -> tuple[dict[str, np.ndarray], dict[str, Any]]:
    """Parse and validate a whole checkpoint before returning anything."""
    if not blob.startswith(MAGIC) or len(blob) < len(MAGIC) + _LEN.size:
        raise CheckpointError("not a bevnav checkpoint (bad magic)")
    (head_len,) = _LEN.unpack_from(blob, len(MAGIC))
    start = len(MAGIC) + _LEN.size
    if start + head_len > len(blob):
        raise CheckpointError("manifest truncated")
    try:
        manifest = json.loads(blob[start : start + head_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise CheckpointError(f"corrupt manifest: {e}") from e
    if manifest.get("format_version") != FORMAT_VERSION:
        raise CheckpointError(f"unsupported format version {manifest.get('format_version')!r}")

    payload = blob[start + head_len :]
    declared = manifest.get("payload_bytes")
    if declared != len(payload):
        raise CheckpointError(f"payload length {len(payload)} != declared {declared}")

    tensors: dict[str, np.ndarray] = {}
    expected_offset = 0
    for entry in manifest.get("tensors", []):
        name = entry["name"]
        shape = tuple(int(d) for d in entry["shape"])
        if name in tensors:
            raise CheckpointError(f"duplicate tensor name {name!r}")
        if entry["offset"] != expected_offset:
            raise CheckpointError(f"{name}: offset {entry['offset']} != {expected_offset}")
        count = int(np.prod(shape, dtype=np.int64))
        end = expected_offset + 4 * count
        if end > len(payload):
            raise CheckpointError(f"{name}: payload truncated")
        tensors[name] = np.frombuffer(payload, dtype="<f4", count=count, offset=expected_offset).astype(
            np.float32
        ).reshape(shape)
        expected_offset = end
    if expected_offset != len(payload):
        raise CheckpointError(f"{len(payload) - expected_offset} trailing payload bytes")
    return tensors, manifest.get("meta", {})


def save_tensors(path: str | Path, tensors: dict[str, np.ndarray], meta: dict[str, Any]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_bytes(encode_checkpoint(tensors, meta))
    os.replace(tmp, path)
    return path


def load_tensors(path: str | Path) -> tuple[dict[str, np.ndarray], dict[str, Any]]:
    try:
        blob = Path(path).read_bytes()
    except FileNotFoundError as e:
        raise CheckpointError(f"checkpoint not found: {path}") from e
    return decode_checkpoint(blob)
