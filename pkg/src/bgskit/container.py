"""BSVT tensor container: bit-exact storage for images and sample triplets.

Byte layout, all integers little-endian:

    offset 0   magic            4 bytes  "BSVT"
    offset 4   format version   u16      (currently 1)
    offset 6   section count    u32
    offset 10  section table    count * (tag 4 bytes, offset u64, length u64)
    ...        section payloads

Each payload is ``height u32 | width u32 | channels u32 | dtype u32 | planes``
with planes stored row-major as little-endian float32 (dtype code 1). Image
files carry one section tagged "IMG "; triplet files carry four sections
tagged "E   ", "R   ", "C   ", "FG  " in that order, the label stored as a
single-channel plane of 0.0/1.0 values.
"""
from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import BadMagicError, TruncatedFileError, UnsupportedVersionError
from .model import ForegroundMask, MultiChannelImage, SampleTriplet

MAGIC = b"BSVT"
VERSION = 1
DTYPE_FLOAT32 = 1

TAG_IMAGE = b"IMG "
TAG_EMPTY = b"E   "
TAG_RECENT = b"R   "
TAG_CURRENT = b"C   "
TAG_LABEL = b"FG  "
TRIPLET_TAGS = (TAG_EMPTY, TAG_RECENT, TAG_CURRENT, TAG_LABEL)

_HEAD = struct.Struct("<4sHI")
_ENTRY = struct.Struct("<4sQQ")
_SECTION = struct.Struct("<IIII")


def _encode_section(arr: np.ndarray) -> bytes:
    if arr.ndim == 2:
        h, w, c = arr.shape[0], arr.shape[1], 1
    else:
        h, w, c = arr.shape
    planes = np.ascontiguousarray(arr, dtype="<f4").tobytes()
    return _SECTION.pack(h, w, c, DTYPE_FLOAT32) + planes


def _encode(sections: list[tuple[bytes, np.ndarray]]) -> bytes:
    payloads = [_encode_section(arr) for _, arr in sections]
    offset = _HEAD.size + _ENTRY.size * len(sections)
    table = b""
    for (tag, _), payload in zip(sections, payloads):
        table += _ENTRY.pack(tag, offset, len(payload))
        offset += len(payload)
    return _HEAD.pack(MAGIC, VERSION, len(sections)) + table + b"".join(payloads)


def write_tensor(path, value: MultiChannelImage | SampleTriplet) -> None:
    """Write an image or triplet; reading it back is bit-identical."""
    if isinstance(value, MultiChannelImage):
        sections = [(TAG_IMAGE, value.data)]
    elif isinstance(value, SampleTriplet):
        sections = [
            (TAG_EMPTY, value.empty.data),
            (TAG_RECENT, value.recent.data),
            (TAG_CURRENT, value.current.data),
            (TAG_LABEL, value.label.data),
        ]
    else:
        raise TypeError(f"cannot serialize {type(value).__name__}")
    Path(path).write_bytes(_encode(sections))


def _decode_section(blob: bytes, offset: int, length: int) -> np.ndarray:
    if offset + length > len(blob):
        raise TruncatedFileError("section extends past end of file")
    if length < _SECTION.size:
        raise TruncatedFileError("section shorter than its header")
    h, w, c, dtype = _SECTION.unpack_from(blob, offset)
    if dtype != DTYPE_FLOAT32:
        raise UnsupportedVersionError(f"unknown dtype code {dtype}")
    expected = _SECTION.size + h * w * c * 4
    if length != expected:
        raise TruncatedFileError(
            f"section payload is {length} bytes, dims require {expected}"
        )
    flat = np.frombuffer(blob, dtype="<f4", count=h * w * c, offset=offset + _SECTION.size)
    shape = (h, w) if c == 1 else (h, w, c)
    return flat.reshape(shape).astype(np.float32)


def read_tensor(path) -> MultiChannelImage | SampleTriplet:
    """Read a BSVT file written by :func:`write_tensor`."""
    blob = Path(path).read_bytes()
    if len(blob) < _HEAD.size:
        raise TruncatedFileError("file shorter than the fixed header")
    magic, version, count = _HEAD.unpack_from(blob, 0)
    if magic != MAGIC:
        raise BadMagicError(f"expected magic {MAGIC!r}, got {magic!r}")
    if version != VERSION:
        raise UnsupportedVersionError(f"format version {version} not supported")
    table_end = _HEAD.size + _ENTRY.size * count
    if len(blob) < table_end:
        raise TruncatedFileError("file ends inside the section table")

    entries = {}
    order = []
    for i in range(count):
        tag, offset, length = _ENTRY.unpack_from(blob, _HEAD.size + _ENTRY.size * i)
        entries[tag] = _decode_section(blob, offset, length)
        order.append(tag)

    if order == [TAG_IMAGE]:
        return MultiChannelImage(entries[TAG_IMAGE])
    if tuple(order) == TRIPLET_TAGS:
        label = entries[TAG_LABEL]
        if label.ndim == 3:
            label = label[:, :, 0]
        return SampleTriplet(
            empty=MultiChannelImage(entries[TAG_EMPTY]),
            recent=MultiChannelImage(entries[TAG_RECENT]),
            current=MultiChannelImage(entries[TAG_CURRENT]),
            label=ForegroundMask(label),
        )
    raise UnsupportedVersionError(f"unrecognized section layout {order!r}")
