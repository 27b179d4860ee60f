import dataclasses
import random

import pytest

from codec.wavelet import QuantSpec
from conftest import make_random_gof
from flood_sim import NAIVE, RRDBFSF
from neighbor_protocol import run_discovery
from topology import grid_topology, topology_from_edges
from transport import (
    PACKET_OVERHEAD,
    EmptyStreamError,
    MissingFragmentError,
    MixedMessageError,
    MtuTooSmallError,
    Packet,
    PacketChecksumError,
    PacketFormatError,
    STATUS_COLUMNS,
    packetize,
    reassemble,
    status_frame,
    transmit_gof,
)

STREAM = bytes(range(256)) * 3 + bytes(232)


def test_fragment_sizes():
    packets = packetize(STREAM, mtu=400 + PACKET_OVERHEAD)
    assert len(STREAM) == 1000
    assert [len(p.payload) for p in packets] == [400, 400, 200]
    assert [p.fragment_index for p in packets] == [0, 1, 2]
    assert all(p.fragment_count == 3 for p in packets)


def test_reassemble_any_order():
    packets = packetize(STREAM, mtu=64, msg_id=7)
    random.Random(3).shuffle(packets)
    assert reassemble(packets) == STREAM


def test_missing_fragment_is_named():
    packets = packetize(STREAM, mtu=418)
    with pytest.raises(MissingFragmentError) as info:
        reassemble([packets[0], packets[2]])
    assert info.value.missing == [1]


def test_duplicate_fragments_are_tolerated():
    packets = packetize(STREAM, mtu=418)
    assert reassemble(packets + packets[:1]) == STREAM


def test_corrupted_payload():
    packets = packetize(STREAM, mtu=418)
    packets[1] = dataclasses.replace(packets[1], payload=b"\x00" * 400)
    with pytest.raises(PacketChecksumError):
        reassemble(packets)


def test_mixed_messages():
    first = packetize(STREAM, mtu=418, msg_id=1)
    second = packetize(STREAM, mtu=418, msg_id=2)
    with pytest.raises(MixedMessageError):
        reassemble(first[:2] + second[2:])


def test_mtu_too_small():
    with pytest.raises(MtuTooSmallError):
        packetize(STREAM, mtu=63)


def test_empty_stream():
    with pytest.raises(EmptyStreamError):
        packetize(b"", mtu=1024)


def test_wire_layout():
    [packet] = packetize(b"abc", mtu=64, msg_id=5)
    wire = packet.to_bytes()
    assert len(wire) == PACKET_OVERHEAD + 3
    assert wire[:4] == b"RRPK"
    assert wire[4:8] == (5).to_bytes(4, "little")
    assert Packet.from_bytes(wire) == packet


def test_wire_checks():
    wire = packetize(b"abcdef", mtu=64)[0].to_bytes()
    with pytest.raises(PacketFormatError):
        Packet.from_bytes(b"XXXX" + wire[4:])
    with pytest.raises(PacketFormatError):
        Packet.from_bytes(wire[:-1])
    with pytest.raises(PacketChecksumError):
        Packet.from_bytes(wire[:-1] + bytes([wire[-1] ^ 1]))


def test_single_node_decodes_locally():
    t = topology_from_edges([], labels=["solo"])
    result = transmit_gof(make_random_gof((2, 4, 4)), t, 0, QuantSpec(delta=2.0), max_depth=1, search_range=1)
    assert result.transmissions == 0
    assert result.all_identical


@pytest.fixture(scope="module")
def grid_and_tables():
    t = grid_topology(5, 5)
    return t, run_discovery(t, 3)


@pytest.mark.parametrize("mtu", [1024, 128])
@pytest.mark.parametrize("mode", [NAIVE, RRDBFSF])
def test_grid_transparency(grid_and_tables, mode, mtu):
    t, tables = grid_and_tables
    gof = make_random_gof((4, 8, 8), seed=11)
    result = transmit_gof(gof, t, 0, QuantSpec(delta=1.0), mtu, mode, tables, max_depth=1, search_range=1)
    assert len(result.packets) > 1
    assert all(s.decoded and s.identical for s in result.statuses)
    assert all(s.fragments == len(result.packets) for s in result.statuses)
    df = status_frame(t, result)
    assert list(df.columns) == STATUS_COLUMNS
    assert len(df) == 25


def test_restricted_mode_saves_transmissions(grid_and_tables):
    t, tables = grid_and_tables
    gof = make_random_gof((4, 8, 8), seed=11)
    q = QuantSpec(delta=1.0)
    naive = transmit_gof(gof, t, 0, q, 128, NAIVE, tables, max_depth=1, search_range=1)
    restricted = transmit_gof(gof, t, 0, q, 128, RRDBFSF, tables, max_depth=1, search_range=1)
    assert naive.stream == restricted.stream
    k = len(restricted.packets)
    assert naive.transmissions == 25 * k
    assert restricted.transmissions == 23 * k
