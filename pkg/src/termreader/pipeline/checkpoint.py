"""Binary model checkpoints.

Layout:

    magic   "TRCKPT01"
    u32     manifest byte length (little-endian)
    bytes   manifest, canonical JSON (sorted keys, no whitespace)
    bytes   payload: each parameter as little-endian float32, C order,
            concatenated in manifest order

The manifest records the format version, parameter names and shapes,
the config snapshot, optimizer/shuffle RNG state, free-form extras
(vocab, relation names, model kind), and the SHA-256 of the payload.
Loading verifies the hash, so truncation or corruption fails up front
instead of producing a subtly wrong model.  A loaded checkpoint saved
again is byte-identical.
"""

from __future__ import annotations

import hashlib
import json

import numpy as np

MAGIC = b"TRCKPT01"
FORMAT_VERSION = 1


class CheckpointError(Exception):
    pass


def _canonical(manifest):
    return json.dumps(manifest, sort_keys=True, separators=(",", ":")).encode("utf-8")


def save_checkpoint(path, params, config_snapshot, rng_state=None, extra=None):
    """``params`` is an ordered name -> array mapping (a ParamStore's
    items() works); values are cast to float32 for storage."""
    names, shapes, blobs = [], [], []
    for name, value in params:
        array = value.data if hasattr(value, "data") else value
        names.append(name)
        shapes.append(list(array.shape))
        blobs.append(np.ascontiguousarray(array, dtype="<f4").tobytes())
    payload = b"".join(blobs)
    manifest = {
        "format_version": FORMAT_VERSION,
        "dtype": "float32",
        "params": [{"name": n, "shape": s} for n, s in zip(names, shapes)],
        "config": config_snapshot,
        "rng_state": rng_state,
        "extra": extra or {},
        "payload_sha256": hashlib.sha256(payload).hexdigest(),
    }
    body = _canonical(manifest)
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(len(body).to_bytes(4, "little"))
        fh.write(body)
        fh.write(payload)


class Checkpoint:
    def __init__(self, manifest, params):
        self.manifest = manifest
        self.params = params  # name -> float32 ndarray, manifest order

    @property
    def config_snapshot(self):
        return self.manifest["config"]

    @property
    def extra(self):
        return self.manifest.get("extra", {})

    @property
    def rng_state(self):
        return self.manifest.get("rng_state")

    def save(self, path):
        save_checkpoint(path, list(self.params.items()),
                        self.manifest["config"],
                        rng_state=self.manifest.get("rng_state"),
                        extra=self.manifest.get("extra"))

    def apply_to(self, store):
        """Overwrite a freshly built store with the stored values; the
        shapes have to agree exactly."""
        store_names = store.names()
        ckpt_names = list(self.params)
        if store_names != ckpt_names:
            raise CheckpointError(
                "checkpoint parameters do not match the model: "
                f"expected {store_names[:4]}..., found {ckpt_names[:4]}...")
        for name in store_names:
            tensor = store[name]
            value = self.params[name]
            if tuple(value.shape) != tensor.data.shape:
                raise CheckpointError(
                    f"shape mismatch for '{name}': "
                    f"{tuple(value.shape)} vs {tensor.data.shape}")
            tensor.data = value.astype(store.dtype)


def load_checkpoint(path):
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[:8] != MAGIC:
        raise CheckpointError(f"{path}: not a checkpoint (bad magic)")
    length = int.from_bytes(blob[8:12], "little")
    body = blob[12:12 + length]
    if len(body) != length:
        raise CheckpointError(f"{path}: truncated manifest")
    try:
        manifest = json.loads(body.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CheckpointError(f"{path}: unreadable manifest: {exc}") from exc
    if manifest.get("format_version") != FORMAT_VERSION:
        raise CheckpointError(
            f"{path}: unsupported format version {manifest.get('format_version')}")
    payload = blob[12 + length:]
    digest = hashlib.sha256(payload).hexdigest()
    if digest != manifest.get("payload_sha256"):
        raise CheckpointError(
            f"{path}: payload hash mismatch; the file is corrupted")
    params = {}
    offset = 0
    for entry in manifest["params"]:
        shape = tuple(entry["shape"])
        count = int(np.prod(shape)) if shape else 1
        end = offset + 4 * count
        if end > len(payload):
            raise CheckpointError(f"{path}: payload shorter than manifest claims")
        params[entry["name"]] = np.frombuffer(
            payload[offset:end], dtype="<f4").reshape(shape).copy()
        offset = end
    if offset != len(payload):
        raise CheckpointError(f"{path}: {len(payload) - offset} trailing bytes")
    return Checkpoint(manifest, params)
