"""
Модуль наскрізної передачі закодованої gof мережею.
Основні функції:
- packetize: Розбиває бітовий потік на пакети з CRC32
- reassemble: Збирає потік з пакетів
- transmit_gof: Кодування -> пакети -> флудинг -> збирання та декодування на кожному вузлі

Формат пакета (little-endian):
  magic "RRPK" | msg_id u32 | fragment_index u16 | fragment_count u16 | payload_len u16 | payload | CRC32(payload) u32
"""

import struct
import zlib
from dataclasses import dataclass, field

import pandas as pd

from codec.bitstream import decode_gof, encode_segmentation
from codec.octree import segment
from codec.wavelet import CodecError
from flood_sim import NAIVE, flood
from neighbor_protocol import run_discovery
from topology import label_of
from utils import log_debug

PACKET_MAGIC = b"RRPK"
PACKET_HEADER_FORMAT = "<4sIHHH"
PACKET_HEADER_SIZE = struct.calcsize(PACKET_HEADER_FORMAT)
PACKET_CRC_FORMAT = "<I"
PACKET_OVERHEAD = PACKET_HEADER_SIZE + struct.calcsize(PACKET_CRC_FORMAT)
MIN_MTU = 64
DEFAULT_MTU = 1024

STATUS_COLUMNS = ["node", "fragments", "decoded", "identical", "error"]


class TransportError(Exception):
    """Базова помилка транспортного рівня."""


class MtuTooSmallError(TransportError):
    pass


class EmptyStreamError(TransportError):
    pass


class PacketFormatError(TransportError):
    pass


class PacketChecksumError(TransportError):
    pass


class MixedMessageError(TransportError):
    pass


class MissingFragmentError(TransportError):
    def __init__(self, missing, count):
        self.missing = list(missing)
        super().__init__(f"Відсутні фрагменти {self.missing} з {count}")


def payload_crc(payload):
    return zlib.crc32(payload) & 0xFFFFFFFF


@dataclass(frozen=True)
class Packet:
    msg_id: int
    fragment_index: int
    fragment_count: int
    payload: bytes
    crc: int

    @property
    def payload_len(self):
        return len(self.payload)

    def crc_ok(self):
        return self.crc == payload_crc(self.payload)

    def to_bytes(self):
        header = struct.pack(PACKET_HEADER_FORMAT, PACKET_MAGIC, self.msg_id,
                             self.fragment_index, self.fragment_count, self.payload_len)
        return header + self.payload + struct.pack(PACKET_CRC_FORMAT, self.crc)

    @classmethod
    def from_bytes(cls, data):
        """Розбирає пакет; перевіряє сигнатуру, довжину та CRC."""
        if len(data) < PACKET_OVERHEAD:
            raise PacketFormatError(f"Пакет закороткий: {len(data)} байт")
        magic, msg_id, index, count, length = struct.unpack_from(PACKET_HEADER_FORMAT, data, 0)
        if magic != PACKET_MAGIC:
            raise PacketFormatError(f"Невідома сигнатура пакета: {magic!r}")
        if len(data) != PACKET_OVERHEAD + length:
            raise PacketFormatError(f"Довжина пакета {len(data)} не відповідає payload_len {length}")
        if index >= count:
            raise PacketFormatError(f"Індекс фрагмента {index} >= кількості {count}")
        payload = bytes(data[PACKET_HEADER_SIZE:PACKET_HEADER_SIZE + length])
        (crc,) = struct.unpack_from(PACKET_CRC_FORMAT, data, PACKET_HEADER_SIZE + length)
        packet = cls(msg_id, index, count, payload, crc)
        if not packet.crc_ok():
            raise PacketChecksumError(f"CRC фрагмента {index} не збігається")
        return packet


def payload_capacity(mtu):
    return mtu - PACKET_OVERHEAD


def packetize(stream, mtu=DEFAULT_MTU, msg_id=0):
    """
    Розбиває потік на ⌈len / ємність⌉ фрагментів; усі, крім останнього, повні.

    Args:
        stream (bytes): Бітовий потік
        mtu (int): Максимальний розмір пакета в байтах (>= 64)
        msg_id (int): Ідентифікатор повідомлення

    Returns:
        list: Packet у порядку фрагментів
    """
    if mtu < MIN_MTU:
        raise MtuTooSmallError(f"MTU {mtu} менше мінімального {MIN_MTU}")
    if not stream:
        raise EmptyStreamError("Порожній потік неможливо розбити на пакети")
    capacity = min(payload_capacity(mtu), 0xFFFF)
    count = -(-len(stream) // capacity)
    if count > 0xFFFF:
        raise TransportError(f"Потік потребує {count} фрагментів, максимум 65535")
    packets = []
    for index in range(count):
        payload = bytes(stream[index * capacity:(index + 1) * capacity])
        packets.append(Packet(msg_id, index, count, payload, payload_crc(payload)))
    log_debug(f"Потік {len(stream)} байт -> {count} пакетів (ємність {capacity})")
    return packets


def reassemble(packets):
    """
    Збирає потік, якщо присутні всі фрагменти і всі CRC коректні.

    Args:
        packets (iterable): Пакети в довільному порядку

    Returns:
        bytes: Вихідний потік
    """
    packets = list(packets)
    if not packets:
        raise MissingFragmentError([], 0)
    msg_ids = {p.msg_id for p in packets}
    if len(msg_ids) > 1:
        raise MixedMessageError(f"Пакети різних повідомлень: {sorted(msg_ids)}")
    counts = {p.fragment_count for p in packets}
    if len(counts) > 1:
        raise PacketFormatError(f"Розбіжна кількість фрагментів: {sorted(counts)}")
    count = counts.pop()

    fragments = {}
    for packet in packets:
        if not packet.crc_ok():
            raise PacketChecksumError(f"CRC фрагмента {packet.fragment_index} не збігається")
        if not 0 <= packet.fragment_index < count:
            raise PacketFormatError(f"Індекс фрагмента {packet.fragment_index} поза межами {count}")
        fragments.setdefault(packet.fragment_index, packet.payload)

    missing = [i for i in range(count) if i not in fragments]
    if missing:
        raise MissingFragmentError(missing, count)
    return b"".join(fragments[i] for i in range(count))


@dataclass
class NodeStatus:
    node: int
    fragments: int
    decoded: bool
    identical: bool
    error: str = ""


@dataclass
class TransmissionResult:
    """
    Результат transmit_gof.

    Attributes:
        stream (bytes): Бітовий потік джерела
        tree (SegmentationTree): Сегментація джерела
        packets (list): Пакети потоку
        reports (list): DisseminationReport для кожного пакета
        statuses (list): NodeStatus для кожного вузла
    """
    stream: bytes
    tree: object
    packets: list
    reports: list
    statuses: list = field(default_factory=list)

    @property
    def transmissions(self):
        return sum(r.transmissions for r in self.reports)

    @property
    def all_identical(self):
        return all(s.identical for s in self.statuses)


def transmit_gof(gof, t, source, q, mtu=DEFAULT_MTU, mode=NAIVE, tables=None,
                 max_depth=2, search_range=2, msg_id=0):
    """
    Кодує gof, розбиває на пакети, поширює кожен пакет і декодує на кожному вузлі.

    Args:
        gof (GroupOfFrames): Група кадрів
        t (Topology): Топологія
        source (int): Вузол-джерело
        q (QuantSpec): Параметри квантування
        mtu (int): MTU в байтах
        mode (str): 'naive' або 'rrdbfsf'
        tables (dict, optional): Таблиці NT(x); обчислюються, якщо не задано

    Returns:
        TransmissionResult: Звіти поширення та стан декодування кожного вузла
    """
    tree = segment(gof, q, max_depth, search_range)
    stream = encode_segmentation(tree)
    reference = decode_gof(stream).tobytes()
    packets = packetize(stream, mtu, msg_id)
    if tables is None:
        tables = run_discovery(t, 3)

    reports = [
        flood(t, tables, source, mode, payload=packet.to_bytes(), msg_id=packet.fragment_index)
        for packet in packets
    ]
    result = TransmissionResult(stream, tree, packets, reports)

    for node in range(t.n):
        received = [Packet.from_bytes(r.inbox[node]) for r in reports if node in r.inbox]
        try:
            recon = decode_gof(reassemble(received))
        except (TransportError, CodecError) as e:
            result.statuses.append(NodeStatus(node, len(received), False, False, str(e)))
            continue
        result.statuses.append(NodeStatus(node, len(received), True, recon.tobytes() == reference))

    log_debug(f"transmit_gof({mode}): {len(packets)} пакетів, {result.transmissions} передач, "
              f"ідентично на {sum(s.identical for s in result.statuses)}/{t.n} вузлах")
    return result


def status_frame(t, result):
    rows = [{
        "node": label_of(t, s.node),
        "fragments": s.fragments,
        "decoded": s.decoded,
        "identical": s.identical,
        "error": s.error,
    } for s in result.statuses]
    return pd.DataFrame(rows, columns=STATUS_COLUMNS)
