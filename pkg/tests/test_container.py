import struct

import numpy as np
import pytest

from bgskit.container import read_tensor, write_tensor
from bgskit.errors import BadMagicError, TruncatedFileError, UnsupportedVersionError
from bgskit.model import MultiChannelImage

from conftest import random_image, random_triplet, triplets_equal


def test_image_round_trip_is_bit_exact(rng, tmp_path):
    img = random_image(rng, 13, 17, 4)
    path = tmp_path / "image.bsvt"
    write_tensor(path, img)
    loaded = read_tensor(path)
    assert isinstance(loaded, MultiChannelImage)
    assert np.array_equal(loaded.data, img.data)
    assert loaded.data.dtype == np.float32


def test_triplet_round_trip_is_bit_exact(rng, tmp_path):
    t = random_triplet(rng, 9, 7, 3)
    path = tmp_path / "triplet.bsvt"
    write_tensor(path, t)
    loaded = read_tensor(path)
    assert triplets_equal(loaded, t)
    assert loaded.label.data.ndim == 2


def test_golden_bytes_for_tiny_image(tmp_path):
    # 2x2x3 image with values k/10, hand-assembled per the documented layout.
    values = np.arange(12, dtype=np.float32).reshape(2, 2, 3) / 10.0
    path = tmp_path / "tiny.bsvt"
    write_tensor(path, MultiChannelImage(values))

    expected = b"BSVT"
    expected += struct.pack("<H", 1)  # version
    expected += struct.pack("<I", 1)  # one section
    payload = struct.pack("<IIII", 2, 2, 3, 1) + values.astype("<f4").tobytes()
    expected += struct.pack("<4sQQ", b"IMG ", 30, len(payload))  # header 10 + entry 20
    expected += payload
    assert path.read_bytes() == expected


def test_truncated_file_raises(rng, tmp_path):
    img = random_image(rng, 4, 4, 3)
    path = tmp_path / "image.bsvt"
    write_tensor(path, img)
    blob = path.read_bytes()
    for cut in (2, 12, 40, len(blob) - 1):
        clipped = tmp_path / f"cut{cut}.bsvt"
        clipped.write_bytes(blob[:cut])
        with pytest.raises(TruncatedFileError):
            read_tensor(clipped)


def test_bad_magic_raises(tmp_path):
    path = tmp_path / "bad.bsvt"
    path.write_bytes(b"NOPE" + b"\x00" * 64)
    with pytest.raises(BadMagicError):
        read_tensor(path)


def test_unsupported_version_raises(rng, tmp_path):
    img = random_image(rng, 4, 4, 3)
    path = tmp_path / "image.bsvt"
    write_tensor(path, img)
    blob = bytearray(path.read_bytes())
    blob[4:6] = struct.pack("<H", 9)
    path.write_bytes(bytes(blob))
    with pytest.raises(UnsupportedVersionError):
        read_tensor(path)


def test_unknown_dtype_code_raises(rng, tmp_path):
    img = random_image(rng, 4, 4, 3)
    path = tmp_path / "image.bsvt"
    write_tensor(path, img)
    blob = bytearray(path.read_bytes())
    # dtype code sits 12 bytes into the payload header at offset 30
    blob[30 + 12 : 30 + 16] = struct.pack("<I", 77)
    path.write_bytes(bytes(blob))
    with pytest.raises(UnsupportedVersionError):
        read_tensor(path)


def test_unexpected_type_rejected(tmp_path):
    with pytest.raises(TypeError):
        write_tensor(tmp_path / "x.bsvt", np.zeros((2, 2)))
