"""Binary policy checkpoints.

Layout: magic ``NTRL``, u32 format version, u32 header length, header JSON
(architecture config, parameter table, training step, seed, reward-config
digest), little-endian float32 parameter data in header order, then a
trailing SHA-256 of everything before it. Writes are atomic (temp file +
rename), so a serving process can hot-swap checkpoints safely.
"""

from __future__ import annotations

import hashlib
import json
import os
import struct
import tempfile
from pathlib import Path

import numpy as np

from ntrl.agent.network import ArchConfig, PolicyNetwork

MAGIC = b"NTRL"
FORMAT_VERSION = 1


class CheckpointError(Exception):
    def __init__(self, code: str, message: str):
        self.code = code
        super().__init__(f"{code}: {message}")


def save_checkpoint(net: PolicyNetwork, path: str | Path) -> None:
    path = Path(path)
    names = sorted(net.params)
    header = {
        "arch": net.arch.to_json(),
        "params": [{"name": n, "shape": list(net.params[n].shape)} for n in names],
        "training_step": net.training_step,
        "seed": net.seed,
        "reward_config_digest": net.reward_config_digest,
    }
    header_bytes = json.dumps(header, sort_keys=True).encode("utf-8")
    body = bytearray()
    body += MAGIC
    body += struct.pack("<I", FORMAT_VERSION)
    body += struct.pack("<I", len(header_bytes))
    body += header_bytes
    for n in names:
        body += np.ascontiguousarray(net.params[n], dtype="<f4").tobytes()
    body += hashlib.sha256(bytes(body)).digest()

    fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."), prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(bytes(body))
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_checkpoint(path: str | Path, expect_arch: ArchConfig | None = None) -> PolicyNetwork:
    """Load a checkpoint; forward outputs are bit-identical to the saved
    net's in the same numeric mode.

    Raises CheckpointError(VERSION_MISMATCH) for unknown format versions or,
    when expect_arch is given, a different architecture config;
    CheckpointError(CORRUPT_CHECKPOINT) for truncation or digest failure.
    """
    data = Path(path).read_bytes()
    if len(data) < len(MAGIC) + 8 + 32 or data[:4] != MAGIC:
        raise CheckpointError("CORRUPT_CHECKPOINT", f"not a checkpoint file: {path}")
    payload, digest = data[:-32], data[-32:]
    if hashlib.sha256(payload).digest() != digest:
        raise CheckpointError("CORRUPT_CHECKPOINT", "content digest mismatch")
    version = struct.unpack_from("<I", data, 4)[0]
    if version != FORMAT_VERSION:
        raise CheckpointError("VERSION_MISMATCH", f"format version {version}, expected {FORMAT_VERSION}")
    header_len = struct.unpack_from("<I", data, 8)[0]
    off = 12
    try:
        header = json.loads(data[off:off + header_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise CheckpointError("CORRUPT_CHECKPOINT", f"bad header: {e}") from e
    off += header_len

    arch = ArchConfig.from_json(header["arch"])
    if expect_arch is not None and arch != expect_arch:
        raise CheckpointError("VERSION_MISMATCH",
                              "checkpoint architecture differs from the expected config")
    params: dict[str, np.ndarray] = {}
    for entry in header["params"]:
        shape = tuple(entry["shape"])
        count = int(np.prod(shape)) if shape else 1
        nbytes = count * 4
        if off + nbytes > len(payload):
            raise CheckpointError("CORRUPT_CHECKPOINT", "parameter data truncated")
        arr = np.frombuffer(payload, dtype="<f4", count=count, offset=off).reshape(shape)
        params[entry["name"]] = arr.astype(np.float32).copy()
        off += nbytes
    if off != len(payload):
        raise CheckpointError("CORRUPT_CHECKPOINT", "trailing bytes after parameter data")

    return PolicyNetwork(
        arch=arch,
        params=params,
        training_step=header["training_step"],
        seed=header["seed"],
        reward_config_digest=header["reward_config_digest"],
    )
