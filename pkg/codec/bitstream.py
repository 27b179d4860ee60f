"""
Модуль серіалізації сегментації gof у самодостатній бітовий потік.

Формат (усі цілі little-endian):
  "GOFC" | версія u8 | T, H, W u16 | Δ f64 | кількість сегментів u32
  для кожного сегмента:
    початок t, y, x u16 | log2 розмірів u8 x3 | тип руху u8 | dy, dx i8
    M u32 | M пар (індекс u32, значення zigzag u32)
  CRC32 усіх попередніх байтів u32
"""

import struct
import zlib

import numpy as np

from codec.octree import REGISTERED_KINDS, Cuboid, FlowKind, FlowModel, reconstruct_cuboid, segment
from codec.wavelet import CodecError, QuantSpec, next_pow2
from utils import log_debug

MAGIC = b"GOFC"
VERSION = 1

HEADER_FORMAT = "<4sB3HdI"
SEGMENT_FORMAT = "<3H3BBbbI"
PAIR_FORMAT = "<II"
CRC_FORMAT = "<I"

HEADER_SIZE = struct.calcsize(HEADER_FORMAT)
SEGMENT_SIZE = struct.calcsize(SEGMENT_FORMAT)
PAIR_SIZE = struct.calcsize(PAIR_FORMAT)
CRC_SIZE = struct.calcsize(CRC_FORMAT)


class BitstreamError(CodecError):
    """Базова помилка бітового потоку."""


class BadMagicError(BitstreamError):
    pass


class VersionMismatchError(BitstreamError):
    pass


class TruncatedStreamError(BitstreamError):
    pass


class ChecksumError(BitstreamError):
    pass


class CorruptStreamError(BitstreamError):
    pass


def zigzag(v):
    if not -(1 << 31) <= v < (1 << 31):
        raise BitstreamError(f"Коефіцієнт {v} не вміщується у 32 біти")
    return ((v << 1) ^ (v >> 31)) & 0xFFFFFFFF


def unzigzag(u):
    return (u >> 1) ^ -(u & 1)


def encode_segmentation(tree):
    """
    Серіалізує SegmentationTree.

    Returns:
        bytes: Бітовий потік з CRC32 в кінці
    """
    if max(tree.dims) > 0xFFFF:
        raise BitstreamError(f"Розміри gof {tree.dims} перевищують 16 біт")
    parts = [struct.pack(HEADER_FORMAT, MAGIC, VERSION, *tree.dims, float(tree.quant.delta), len(tree.leaves))]
    for leaf in tree.leaves:
        flat = leaf.qvalues.ravel()
        indices = np.flatnonzero(flat)
        parts.append(struct.pack(
            SEGMENT_FORMAT,
            *leaf.cuboid.origin,
            *leaf.cuboid.log2_dims,
            int(leaf.flow.kind),
            leaf.flow.dy,
            leaf.flow.dx,
            len(indices),
        ))
        parts.extend(struct.pack(PAIR_FORMAT, int(i), zigzag(int(flat[i]))) for i in indices)
    body = b"".join(parts)
    return body + struct.pack(CRC_FORMAT, zlib.crc32(body) & 0xFFFFFFFF)


def encode_gof(gof, q, max_depth=2, search_range=2):
    """
    Сегментує та кодує gof.

    Args:
        gof (GroupOfFrames): Група кадрів
        q (QuantSpec): Параметри квантування

    Returns:
        bytes: Бітовий потік
    """
    stream = encode_segmentation(segment(gof, q, max_depth, search_range))
    log_debug(f"Бітовий потік: {len(stream)} байт")
    return stream


def _read(data, offset, fmt, size):
    if offset + size > len(data):
        raise TruncatedStreamError(f"Потік обірвано: потрібно {offset + size} байт, є {len(data)}")
    return struct.unpack_from(fmt, data, offset), offset + size


def decode_gof(data):
    """
    Декодує бітовий потік у відновлення gof (float64, відліки в [0, 255]).
    Результат побітово збігається з внутрішнім відновленням кодера.

    Args:
        data (bytes): Бітовий потік

    Returns:
        np.ndarray: Масив T x H x W
    """
    data = bytes(data)
    if len(data) >= 4 and data[:4] != MAGIC:
        raise BadMagicError(f"Невідома сигнатура потоку: {data[:4]!r}")
    (magic, version, T, H, W, delta, count), offset = _read(data, 0, HEADER_FORMAT, HEADER_SIZE)
    if version != VERSION:
        raise VersionMismatchError(f"Версія потоку {version}, підтримується {VERSION}")
    if min(T, H, W) < 1 or not delta > 0:
        raise CorruptStreamError("Некоректний заголовок потоку")

    segments = []
    for _ in range(count):
        (t0, y0, x0, lt, ly, lx, kind, dy, dx, m), offset = _read(data, offset, SEGMENT_FORMAT, SEGMENT_SIZE)
        if offset + m * PAIR_SIZE > len(data):
            raise TruncatedStreamError(f"Потік обірвано всередині сегмента з {m} коефіцієнтами")
        pairs = struct.unpack_from("<" + "II" * m, data, offset)
        offset += m * PAIR_SIZE
        segments.append(((t0, y0, x0), (1 << lt, 1 << ly, 1 << lx), kind, dy, dx, pairs))

    if len(data) - offset < CRC_SIZE:
        raise TruncatedStreamError("Потік обірвано: відсутня контрольна сума")
    if len(data) - offset > CRC_SIZE:
        raise ChecksumError(f"Зайві {len(data) - offset - CRC_SIZE} байт після сегментів")
    (crc,), _ = _read(data, offset, CRC_FORMAT, CRC_SIZE)
    if crc != zlib.crc32(data[:offset]) & 0xFFFFFFFF:
        raise ChecksumError("Контрольна сума CRC32 не збігається")

    q = QuantSpec(delta=delta)
    padded = (next_pow2(T), next_pow2(H), next_pow2(W))
    volume = np.zeros(padded, dtype=np.float64)
    coverage = np.zeros(padded, dtype=np.int32)
    for origin, dims, kind, dy, dx, pairs in segments:
        try:
            cuboid = Cuboid(origin=origin, dims=dims)
            flow = FlowModel(FlowKind(kind), dy, dx)
        except (ValueError, CodecError) as e:
            raise CorruptStreamError(f"Некоректний сегмент {origin}: {e}")
        if flow.kind not in REGISTERED_KINDS:
            raise CorruptStreamError(f"Сегмент {origin}: незареєстрована модель руху {flow.kind.name}")
        if any(o + d > p for o, d, p in zip(origin, dims, padded)):
            raise CorruptStreamError(f"Сегмент {origin} {dims} виходить за межі {padded}")
        flat = np.zeros(int(np.prod(dims)), dtype=np.int64)
        for index, value in zip(pairs[0::2], pairs[1::2]):
            if index >= flat.size:
                raise CorruptStreamError(f"Індекс коефіцієнта {index} поза сегментом")
            flat[index] = unzigzag(value)
        volume[cuboid.slices] = reconstruct_cuboid(flat.reshape(dims), flow, q)
        coverage[cuboid.slices] += 1

    if not np.all(coverage == 1):
        raise CorruptStreamError("Сегменти не розбивають gof без перекриттів і пропусків")
    return volume[:T, :H, :W]
