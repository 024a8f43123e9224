"""
Binary checkpoint files.

Layout, little-endian: magic b"RTAL", uint16 format version, uint16 digest
length and the UTF-8 config digest, uint64 step, uint32 record count; then per
record a uint16 name length, the name bytes, a uint8 rank, rank uint32 extents
and the float32 payload.
"""

import re
import struct
from pathlib import Path
from typing import Dict, List

import numpy as np
from injector import inject

from rtal.adapters.gateway.filesystem.repository.exceptions import (ECheckpointNotFound, ECorruptCheckpoint,
                                                                      EUnsupportedCheckpointVersion)
from rtal.adapters.gateway.filesystem.run_directory import RunDirectory
from rtal.entities.checkpoint.repository import ICheckpointRepository
from rtal.entities.checkpoint.schema import Checkpoint
from rtal.infrastructure.config import DefaultConfig

MAGIC = b"RTAL"
FORMAT_VERSION = 1
SUFFIX = ".rtal"


def encode_checkpoint(checkpoint: Checkpoint) -> bytes:
    digest = checkpoint.config_digest.encode('utf-8')
    chunks = [MAGIC, struct.pack("<HH", FORMAT_VERSION, len(digest)), digest,
              struct.pack("<QI", checkpoint.step, len(checkpoint.params))]
    for name, value in checkpoint.params.items():
        encoded_name = name.encode('utf-8')
        value = np.asarray(value)
        chunks.append(struct.pack("<H", len(encoded_name)))
        chunks.append(encoded_name)
        chunks.append(struct.pack(f"<B{value.ndim}I", value.ndim, *value.shape))
        chunks.append(value.astype("<f4").tobytes())
    return b"".join(chunks)


class _Reader():
    def __init__(self, payload: bytes) -> None:
        self.payload = payload
        self.offset = 0

    def take(self, size: int) -> bytes:
        if self.offset + size > len(self.payload):
            raise ECorruptCheckpoint(f"checkpoint truncated at byte {self.offset}, needed {size} more")
        chunk = self.payload[self.offset:self.offset + size]
        self.offset += size
        return chunk

    def unpack(self, layout: str):
        return struct.unpack(layout, self.take(struct.calcsize(layout)))


def decode_checkpoint(payload: bytes) -> Checkpoint:
    reader = _Reader(payload)
    if reader.take(len(MAGIC)) != MAGIC:
        raise ECorruptCheckpoint("not a checkpoint file (bad magic)")
    version, digest_length = reader.unpack("<HH")
    if version != FORMAT_VERSION:
        raise EUnsupportedCheckpointVersion(f"checkpoint format version {version}, expected {FORMAT_VERSION}")
    digest = reader.take(digest_length).decode('utf-8')
    step, count = reader.unpack("<QI")

    params: Dict[str, np.ndarray] = {}
    for _ in range(count):
        (name_length,) = reader.unpack("<H")
        name = reader.take(name_length).decode('utf-8')
        (rank,) = reader.unpack("<B")
        shape = reader.unpack(f"<{rank}I")
        size = int(np.prod(shape, dtype=np.int64))
        params[name] = np.frombuffer(reader.take(4 * size), dtype="<f4").reshape(shape).astype(np.float32)
    if reader.offset != len(payload):
        raise ECorruptCheckpoint(f"{len(payload) - reader.offset} trailing bytes after the last record")
    return Checkpoint(step=step, config_digest=digest, params=params)


@inject
class CheckpointRepository(ICheckpointRepository):
    def __init__(self, session: RunDirectory) -> None:
        self.session = session
        self.prefix = DefaultConfig.CHECKPOINT_PREFIX
        self._pattern = re.compile(rf"^{re.escape(self.prefix)}_(\d+){re.escape(SUFFIX)}$")

    def path_for_step(self, run_dir: Path, step: int) -> Path:
        return Path(run_dir) / f"{self.prefix}_{step:08d}{SUFFIX}"

    def average_path(self, run_dir: Path) -> Path:
        return Path(run_dir) / f"{self.prefix}_average{SUFFIX}"

    def _write(self, path: Path, checkpoint: Checkpoint) -> Path:
        with self.session.scope(path, binary=True) as handle:
            handle.write(encode_checkpoint(checkpoint))
        return path

    def save(self, run_dir: Path, checkpoint: Checkpoint) -> Path:
        return self._write(self.path_for_step(run_dir, checkpoint.step), checkpoint)

    def save_average(self, run_dir: Path, checkpoint: Checkpoint) -> Path:
        return self._write(self.average_path(run_dir), checkpoint)

    def load(self, path: Path) -> Checkpoint:
        path = Path(path)
        if not path.is_file():
            raise ECheckpointNotFound(f"no checkpoint at {path}")
        return decode_checkpoint(path.read_bytes())

    def load_step(self, run_dir: Path, step: int) -> Checkpoint:
        return self.load(self.path_for_step(run_dir, step))

    def load_average(self, run_dir: Path) -> Checkpoint:
        return self.load(self.average_path(run_dir))

    def has_average(self, run_dir: Path) -> bool:
        return self.average_path(run_dir).is_file()

    def list_steps(self, run_dir: Path) -> List[int]:
        run_dir = Path(run_dir)
        if not run_dir.is_dir():
            return []
        matches = (self._pattern.match(entry.name) for entry in run_dir.iterdir())
        return sorted(int(match.group(1)) for match in matches if match)
