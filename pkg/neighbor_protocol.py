"""
Модуль збору інформації про сусідів (hello-раунди) для побудови NT(x).
Основні функції:
- run_discovery: Синхронні раунди обміну hello-повідомленнями
- known_set: T(x) - сусіди та вузли в радіусі трьох хопів
- dump_tables: JSON-представлення всіх NT(x) за назвами вузлів
"""

from dataclasses import dataclass, field

from topology import label_of
from utils import log_debug

# Раундів, після яких NT(x) містить повне знання в радіусі трьох хопів
DISCOVERY_ROUNDS = 3


@dataclass(frozen=True)
class NeighborTable:
    """
    Таблиця сусідів NT(x).

    Attributes:
        owner (int): Вузол x
        entries (dict): сусід i -> вузли в радіусі двох хопів від i (без x)
        links (dict): відомі списки суміжності вузлів у радіусі двох хопів від x
        rounds (int): скільки hello-раундів побудували таблицю
    """
    owner: int
    entries: dict
    links: dict = field(default_factory=dict)
    rounds: int = 0

    @property
    def neighbors(self):
        return tuple(sorted(self.entries))

    @property
    def complete(self):
        return self.rounds >= DISCOVERY_ROUNDS

    def adjacent(self, v):
        """Суміжність вузла v, як її знає власник таблиці."""
        return self.links.get(v, frozenset())


def run_discovery(t, rounds=DISCOVERY_ROUNDS):
    """
    Симулює збір інформації про сусідів синхронними раундами.

    Раунд 1: кожен вузол транслює свій id, сусіди дізнаються N(x).
    Раунди 2..k: кожен вузол транслює відомі списки суміжності - свій та своїх
    сусідів. Після трьох раундів entries[i] = вузли на відстані <= 2 від i (без x),
    а known_set(x) = T(x). Далі вміст hello не росте.

    Args:
        t (Topology): Топологія
        rounds (int): Кількість раундів (>= 1)

    Returns:
        dict: id вузла -> NeighborTable
    """
    if rounds < 1:
        raise ValueError(f"Кількість раундів має бути >= 1, отримано {rounds}")

    nodes = range(t.n)
    heard = {x: frozenset(t.adjacency(x)) for x in nodes}
    links = {x: {x: heard[x]} for x in nodes}
    entries = {x: {i: frozenset() for i in heard[x]} for x in nodes}

    for round_no in range(2, rounds + 1):
        hellos = {
            i: {v: links[i][v] for v in heard[i] | {i} if v in links[i]}
            for i in nodes
        }
        for x in nodes:
            for i in heard[x]:
                reach = set()
                for adjacent in hellos[i].values():
                    reach |= adjacent
                entries[x][i] = frozenset(reach - {i, x})
                links[x].update(hellos[i])
        log_debug(f"Раунд {round_no}: відомо в середньому "
                  f"{sum(len(known_set_of(entries[x])) for x in nodes) / max(t.n, 1):.1f} вузлів")

    return {
        x: NeighborTable(owner=x, entries=dict(entries[x]), links=dict(links[x]), rounds=rounds)
        for x in nodes
    }


def known_set_of(entries):
    known = set(entries)
    for reach in entries.values():
        known |= reach
    return known


def known_set(nt):
    """
    Повертає T(x) = N(x) ∪ ⋃ entries[i].

    Args:
        nt (NeighborTable): Таблиця після збору інформації

    Returns:
        set: Вузли, відомі власнику таблиці
    """
    return known_set_of(nt.entries)


def dump_tables(t, tables):
    """
    Перетворює всі NT(x) на словник для JSON: назва вузла -> {назва сусіда -> [назви]}.
    """
    dump = {}
    for x in sorted(tables):
        nt = tables[x]
        dump[label_of(t, x)] = {
            label_of(t, i): [label_of(t, v) for v in sorted(nt.entries[i])]
            for i in nt.neighbors
        }
    return dump
