"""ERTK binary token-file format.

Layout (all integers little-endian)::

    offset  size  field
    0       4     magic "ERTK"
    4       1     version (0x01; high bit reserved for an extension
                  vocabulary and must be 0)
    5       2     resolution, u16
    7       4     token_count, u32
    11      2*N   token ids, u16 each

Every id must be inside the base vocabulary (resolution + 6) of the stated
resolution. write/read round-trip is the identity on (resolution, ids).
"""

from __future__ import annotations

import struct
from pathlib import Path

from .errors import ErtkFormatError
from .tokenizer import TokenSequence

MAGIC = b"ERTK"
VERSION = 1
_HEADER = struct.Struct("<4sBHI")


def to_bytes(seq: TokenSequence) -> bytes:
    if not 2 <= seq.resolution <= 0xFFFF:
        raise ErtkFormatError(f"resolution not encodable as u16: {seq.resolution}")
    vocab_size = seq.resolution + 6
    for i, tid in enumerate(seq.ids):
        if not 0 <= tid < vocab_size:
            raise ErtkFormatError(f"id {tid} at index {i} outside base vocabulary {vocab_size}")
    header = _HEADER.pack(MAGIC, VERSION, seq.resolution, len(seq.ids))
    payload = struct.pack(f"<{len(seq.ids)}H", *seq.ids)
    return header + payload


def from_bytes(data: bytes) -> TokenSequence:
    if len(data) < _HEADER.size:
        raise ErtkFormatError("truncated header")
    magic, version, resolution, count = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise ErtkFormatError(f"bad magic {magic!r}")
    if version != VERSION:
        raise ErtkFormatError(f"unsupported version byte 0x{version:02x}")
    if resolution < 2:
        raise ErtkFormatError(f"invalid resolution {resolution}")
    expected = _HEADER.size + 2 * count
    if len(data) != expected:
        raise ErtkFormatError(f"payload length mismatch: {len(data)} bytes, expected {expected}")
    ids = list(struct.unpack_from(f"<{count}H", data, _HEADER.size))
    vocab_size = resolution + 6
    for i, tid in enumerate(ids):
        if tid >= vocab_size:
            raise ErtkFormatError(f"id {tid} at index {i} outside base vocabulary {vocab_size}")
    return TokenSequence(resolution=resolution, ids=ids)


def write_token_file(path, seq: TokenSequence) -> None:
    Path(path).write_bytes(to_bytes(seq))


def read_token_file(path) -> TokenSequence:
    return from_bytes(Path(path).read_bytes())
