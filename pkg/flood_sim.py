"""
Модуль детермінованої симуляції поширення повідомлень.
Основні функції:
- flood: Наївний флудинг або обмежений флудинг з директивами RT(x)
- compare_modes: Кількість передач в обох режимах для кожного джерела
- report_row / compare_row: Рядки таблиць з фіксованим порядком колонок
"""

from dataclasses import dataclass, field

import pandas as pd

from neighbor_protocol import DISCOVERY_ROUNDS, run_discovery
from rrdbfsf import select_forwarders
from topology import UnknownNodeError, label_of
from utils import log_debug

NAIVE = "naive"
RRDBFSF = "rrdbfsf"
MODES = (NAIVE, RRDBFSF)

REPORT_COLUMNS = ["trial", "source", "mode", "transmissions", "receptions",
                  "duplicates", "delivered_count", "rounds"]
COMPARE_COLUMNS = ["trial", "source", "tx_naive", "tx_rrdbfsf", "ratio"]


class FloodError(Exception):
    """Базова помилка симуляції флудингу."""


class UnknownSourceError(FloodError):
    pass


class IncompleteDiscoveryError(FloodError):
    """Таблиці NT(x) побудовано менш ніж за DISCOVERY_ROUNDS раундів."""


@dataclass(frozen=True)
class FloodMessage:
    """Повідомлення в ефірі: в режимі rrdbfsf несе директиву відправника."""
    msg_id: int
    source: int
    hop: int
    directive: object = None
    payload_ref: bytes = b""


@dataclass
class DisseminationReport:
    """
    Підсумок поширення одного повідомлення.

    Attributes:
        transmissions (int): Кількість трансляцій
        receptions (int): Кількість прийомів
        duplicates (int): Прийоми мінус перші прийоми
        delivered (frozenset): Вузли, що отримали повідомлення (разом із джерелом)
        rounds (int): Кількість раундів до затихання
        inbox (dict): вузол -> отриманий вміст
    """
    source: int
    mode: str
    msg_id: int
    transmissions: int = 0
    receptions: int = 0
    duplicates: int = 0
    delivered: frozenset = frozenset()
    rounds: int = 0
    inbox: dict = field(default_factory=dict)

    @property
    def delivered_count(self):
        return len(self.delivered)


@dataclass(frozen=True)
class RedundancyStats:
    source: int
    tx_naive: int
    tx_rrdbfsf: int
    ratio: float


def _forward_message(t, tables, mode, message, sender, receiver):
    """
    Вирішує, чи ретранслює receiver повідомлення від sender.

    Returns:
        FloodMessage | None: Повідомлення для наступного раунду
    """
    if mode == NAIVE:
        return FloodMessage(message.msg_id, message.source, message.hop + 1, None, message.payload_ref)

    upstream = message.directive
    if not upstream.designates(receiver):
        return None
    nt = tables[receiver]
    already_covered = upstream.covered_hint | {sender} | nt.adjacent(sender)
    directive = select_forwarders(nt, already_covered, seed=upstream.chosen[receiver])
    return FloodMessage(message.msg_id, message.source, message.hop + 1, directive, message.payload_ref)


def flood(t, tables, source, mode=NAIVE, payload=b"", msg_id=0):
    """
    Поширює одне повідомлення синхронними раундами (затримка - один хоп, без втрат).

    Наївний режим: кожен вузол ретранслює рівно один раз при першому прийомі.
    Режим rrdbfsf: джерело транслює з директивою select_forwarders(NT(source));
    вузол ретранслює, лише якщо його призначено вхідною директивою і він ще не
    транслював це повідомлення. Якщо вузол призначено кількома директивами,
    діє перша.

    Args:
        t (Topology): Топологія
        tables (dict): Результат run_discovery (обов'язковий для rrdbfsf)
        source (int): Вузол-джерело
        mode (str): 'naive' або 'rrdbfsf'
        payload (bytes): Вміст повідомлення
        msg_id (int): Ідентифікатор повідомлення

    Returns:
        DisseminationReport: Метрики поширення
    """
    try:
        t.check_node(source)
    except UnknownNodeError:
        raise UnknownSourceError(f"Невідоме джерело: {source!r}")
    if mode not in MODES:
        raise FloodError(f"Невідомий режим флудингу: {mode}")
    if mode == RRDBFSF and tables is None:
        raise FloodError("Режим rrdbfsf потребує таблиць NT(x) (run_discovery)")
    if mode == RRDBFSF and not all(nt.complete for nt in tables.values()):
        raise IncompleteDiscoveryError(
            f"Режим rrdbfsf потребує завершеного збору сусідів ({DISCOVERY_ROUNDS} раунди)"
        )

    delivered = {source}
    inbox = {source: payload}
    forwarded = set()
    transmissions = receptions = rounds = 0

    pending = []
    if t.adjacency(source):
        directive = select_forwarders(tables[source]) if mode == RRDBFSF else None
        pending = [(source, FloodMessage(msg_id, source, 0, directive, payload))]

    while pending:
        rounds += 1
        if rounds > t.n:
            raise FloodError(f"Повідомлення {msg_id} не затихло за {t.n} раундів")
        scheduled = {}
        for sender, message in pending:
            forwarded.add(sender)
            transmissions += 1
            for receiver in t.adjacency(sender):
                receptions += 1
                if receiver not in delivered:
                    delivered.add(receiver)
                    inbox[receiver] = message.payload_ref
                if receiver in forwarded or receiver in scheduled:
                    continue
                outgoing = _forward_message(t, tables, mode, message, sender, receiver)
                if outgoing is not None:
                    scheduled[receiver] = outgoing
        pending = sorted(scheduled.items())

    report = DisseminationReport(
        source=source,
        mode=mode,
        msg_id=msg_id,
        transmissions=transmissions,
        receptions=receptions,
        duplicates=receptions - (len(delivered) - 1),
        delivered=frozenset(delivered),
        rounds=rounds,
        inbox=inbox,
    )
    log_debug(f"flood({mode}, джерело {source}, msg {msg_id}): {transmissions} передач, "
              f"{report.duplicates} дублікатів, {len(delivered)}/{t.n} вузлів, {rounds} раундів")
    return report


def compare_modes(t, sources, seed=0, tables=None):
    """
    Запускає обидва режими для кожного джерела.

    Args:
        t (Topology): Топологія
        sources (list): Вузли-джерела (хоча б один)
        seed (int): База ідентифікаторів повідомлень
        tables (dict, optional): Таблиці NT(x); обчислюються, якщо не задано

    Returns:
        list: RedundancyStats для кожного джерела
    """
    if not sources:
        raise FloodError("Потрібне хоча б одне джерело")
    if tables is None:
        tables = run_discovery(t, 3)

    stats = []
    for offset, source in enumerate(sources):
        msg_id = seed + offset
        naive = flood(t, tables, source, NAIVE, msg_id=msg_id)
        restricted = flood(t, tables, source, RRDBFSF, msg_id=msg_id)
        ratio = restricted.transmissions / naive.transmissions if naive.transmissions else 1.0
        stats.append(RedundancyStats(source, naive.transmissions, restricted.transmissions, ratio))
    return stats


def report_row(t, report, trial=0):
    return {
        "trial": trial,
        "source": label_of(t, report.source),
        "mode": report.mode,
        "transmissions": report.transmissions,
        "receptions": report.receptions,
        "duplicates": report.duplicates,
        "delivered_count": report.delivered_count,
        "rounds": report.rounds,
    }


def compare_row(t, stats, trial=0):
    return {
        "trial": trial,
        "source": label_of(t, stats.source),
        "tx_naive": stats.tx_naive,
        "tx_rrdbfsf": stats.tx_rrdbfsf,
        "ratio": stats.ratio,
    }


def reports_frame(rows):
    return pd.DataFrame(rows, columns=REPORT_COLUMNS)


def compare_frame(rows):
    return pd.DataFrame(rows, columns=COMPARE_COLUMNS)
