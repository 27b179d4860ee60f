import struct

import numpy as np
import pytest

from codec.bitstream import (
    HEADER_SIZE,
    BadMagicError,
    BitstreamError,
    ChecksumError,
    CorruptStreamError,
    TruncatedStreamError,
    VersionMismatchError,
    decode_gof,
    encode_gof,
    encode_segmentation,
    unzigzag,
    zigzag,
)
from codec.octree import segment
from codec.wavelet import QuantSpec, distortion
from conftest import make_random_gof, make_two_region


@pytest.fixture(scope="module")
def coded():
    gof = make_two_region()
    tree = segment(gof, QuantSpec(delta=2.0), max_depth=2, search_range=1)
    return gof, tree, encode_segmentation(tree)


def test_decode_matches_encoder_reconstruction(coded):
    gof, tree, stream = coded
    recon = decode_gof(stream)
    np.testing.assert_array_equal(recon, tree.reconstruction())
    assert distortion(gof.samples, recon) == pytest.approx(tree.total_distortion, rel=1e-9)


def test_decode_crops_padding():
    gof = make_random_gof((3, 5, 6), seed=2)
    recon = decode_gof(encode_gof(gof, QuantSpec(delta=1.0), max_depth=1, search_range=1))
    assert recon.shape == (3, 5, 6)
    assert recon.min() >= 0.0 and recon.max() <= 255.0


def test_encode_is_deterministic(coded):
    gof, _, stream = coded
    assert encode_gof(gof, QuantSpec(delta=2.0), max_depth=2, search_range=1) == stream


def test_header_layout(coded):
    _, tree, stream = coded
    magic, version, T, H, W, delta, count = struct.unpack_from("<4sB3HdI", stream, 0)
    assert (magic, version) == (b"GOFC", 1)
    assert (T, H, W) == (8, 8, 8)
    assert delta == 2.0
    assert count == len(tree.leaves)


@pytest.mark.parametrize("cut", [2, 5, 9])
def test_truncated_tail(coded, cut):
    with pytest.raises(TruncatedStreamError):
        decode_gof(coded[2][:-cut])


@pytest.mark.parametrize("length", [0, 3, HEADER_SIZE - 1])
def test_truncated_head(coded, length):
    with pytest.raises(TruncatedStreamError):
        decode_gof(coded[2][:length])


def test_bad_magic(coded):
    with pytest.raises(BadMagicError):
        decode_gof(b"XXXX" + coded[2][4:])


def test_version_mismatch(coded):
    stream = bytearray(coded[2])
    stream[4] = 2
    with pytest.raises(VersionMismatchError):
        decode_gof(bytes(stream))


def test_crc_failure(coded):
    stream = bytearray(coded[2])
    stream[-1] ^= 0xFF
    with pytest.raises(ChecksumError):
        decode_gof(bytes(stream))


def test_trailing_garbage(coded):
    with pytest.raises(ChecksumError):
        decode_gof(coded[2] + b"\x00")


def test_missing_segment_breaks_partition():
    gof = make_random_gof((2, 4, 4), seed=6)
    tree = segment(gof, QuantSpec(delta=2.0), max_depth=1, search_range=1)
    tree.leaves = tree.leaves[:-1] if len(tree.leaves) > 1 else tree.leaves * 2
    with pytest.raises(CorruptStreamError):
        decode_gof(encode_segmentation(tree))


def test_zigzag_interleaves_signs():
    assert [zigzag(v) for v in (0, -1, 1, -2, 2)] == [0, 1, 2, 3, 4]
    assert unzigzag(0xFFFFFFFF) == -(1 << 31)


def test_zigzag_range():
    with pytest.raises(BitstreamError):
        zigzag(1 << 31)
