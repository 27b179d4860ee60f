"""
Модуль вибору ретрансляторів для флудингу в радіусі трьох хопів.
Основні функції:
- select_forwarders: Жадібний вибір R(x) та таблиці RT(x) з NT(x)
- check_directive: Перевірка покриття вузлів на відстані 2 і 3
- brute_force_min_forwarders: Точний мінімум ретрансляторів перебором (оракул)
- forwarder_gap_table: Порівняння жадібного вибору з мінімумом по всіх вузлах
"""

from dataclasses import dataclass, field
from itertools import combinations

import pandas as pd

from neighbor_protocol import known_set
from topology import label_of, neighbors, nodes_within_radius
from utils import log_debug

EXHAUSTIVE_NEIGHBOR_LIMIT = 20

GAP_COLUMNS = ["node", "neighbors", "greedy", "minimum", "gap", "valid"]


class ForwarderSelectionError(Exception):
    """Базова помилка вибору ретрансляторів."""


class UncoverableTargetError(ForwarderSelectionError):
    """Ціль неможливо покрити: таблиця NT пошкоджена."""


class NeighborLimitError(ForwarderSelectionError):
    pass


@dataclass(frozen=True)
class ForwardingDirective:
    """
    Директива RT(x), що передається разом із повідомленням.

    Attributes:
        selector (int): Вузол, який обчислив директиву
        chosen (dict): ретранслятор i -> його наступні ретранслятори RT(x, i)
        covered_hint (frozenset): Вузли, які селектор вважає вже охопленими
    """
    selector: int
    chosen: dict
    covered_hint: frozenset = frozenset()

    @property
    def forwarders(self):
        return tuple(sorted(self.chosen))

    def designates(self, node):
        return node in self.chosen


@dataclass
class ResidualSets:
    """Непокриті вузли на відстані 2 (RN(x)) та 3 (RTLen(x)) під час жадібного вибору."""
    uncovered2: set = field(default_factory=set)
    uncovered3: set = field(default_factory=set)

    def is_empty(self):
        return not self.uncovered2 and not self.uncovered3


def radius_rings(nt):
    """
    Розбиває знання NT(x) на кільця за відстанню від x.

    Returns:
        tuple: (відстань 1, відстань 2, відстань 3) як множини
    """
    ring1 = set(nt.entries)
    ring2 = set()
    for i in ring1:
        ring2 |= nt.adjacent(i)
    ring2 -= ring1 | {nt.owner}
    ring3 = known_set(nt) - ring1 - ring2 - {nt.owner}
    return ring1, ring2, ring3


def _best_cover(candidates, nt, targets):
    """Кандидат з найбільшим покриттям цілей; при рівності - найменший id."""
    best, best_gain = None, 0
    for candidate in sorted(candidates):
        gain = len(nt.adjacent(candidate) & targets)
        if gain > best_gain:
            best, best_gain = candidate, gain
    return best


def select_forwarders(nt, already_covered=frozenset(), seed=()):
    """
    Обирає найменшу (жадібно) множину ретрансляторів серед сусідів.

    Спочатку покриваються вузли на відстані 2 (мінус already_covered): щоразу
    береться сусід, що покриває найбільше непокритих; рівність вирішує менший id.
    Потім для вузлів на відстані 3 обираються наступні ретранслятори з вузлів
    на відстані 2, кожен прив'язується до вже обраного сусіда, через якого
    його видно (або до сусіда з найменшим id, що додається до вибору).

    Args:
        nt (NeighborTable): Таблиця сусідів селектора
        already_covered (set): Вузли, які вже отримали повідомлення
        seed (iterable): Ретранслятори, призначені директивою згори

    Returns:
        ForwardingDirective: Директива RT(x)
    """
    x = nt.owner
    covered = frozenset(already_covered)
    ring1, ring2, ring3 = radius_rings(nt)

    seed = set(seed)
    if not seed <= ring1:
        raise ForwarderSelectionError(f"Призначені ретранслятори {sorted(seed - ring1)} не є сусідами вузла {x}")

    residual = ResidualSets(uncovered2=ring2 - covered, uncovered3=ring3 - covered)
    chosen = {}
    for i in sorted(seed):
        chosen[i] = set()
        residual.uncovered2 -= nt.adjacent(i)

    while residual.uncovered2:
        best = _best_cover(ring1 - set(chosen), nt, residual.uncovered2)
        if best is None:
            raise UncoverableTargetError(f"Вузол {x}: неможливо покрити {sorted(residual.uncovered2)}")
        chosen[best] = set()
        residual.uncovered2 -= nt.adjacent(best)

    while residual.uncovered3:
        best = _best_cover(ring2, nt, residual.uncovered3)
        if best is None:
            raise UncoverableTargetError(f"Вузол {x}: неможливо покрити {sorted(residual.uncovered3)}")
        parents = sorted(i for i in ring1 if best in nt.adjacent(i))
        parent = next((i for i in parents if i in chosen), parents[0])
        chosen.setdefault(parent, set()).add(best)
        residual.uncovered3 -= nt.adjacent(best)

    directive = ForwardingDirective(
        selector=x,
        chosen={i: frozenset(chosen[i]) for i in sorted(chosen)},
        covered_hint=covered | {x} | ring1,
    )
    log_debug(f"Вузол {x}: ретранслятори {directive.forwarders}")
    return directive


def check_directive(nt, directive, already_covered=frozenset()):
    """
    Перевіряє обидві умови покриття директиви.

    Returns:
        ResidualSets: Непокриті цілі; порожні множини означають коректну директиву
    """
    ring1, ring2, ring3 = radius_rings(nt)
    reached2 = set()
    reached3 = set()
    for i, next_forwarders in directive.chosen.items():
        reached2 |= nt.adjacent(i)
        for j in next_forwarders:
            reached3 |= nt.adjacent(j)
    return ResidualSets(
        uncovered2=ring2 - set(already_covered) - reached2,
        uncovered3=ring3 - set(already_covered) - reached3,
    )


def brute_force_min_forwarders(t, x, limit=EXHAUSTIVE_NEIGHBOR_LIMIT):
    """
    Найменша кількість сусідів, що покривають усі вузли на відстані 2 від x.
    Повний перебір підмножин N(x).

    Args:
        t (Topology): Топологія
        x (int): Вузол
        limit (int): Максимальна кількість сусідів для перебору

    Returns:
        int: Розмір мінімального покриття
    """
    targets = nodes_within_radius(t, x, 2, 2)
    candidates = neighbors(t, x)
    if len(candidates) > limit:
        raise NeighborLimitError(f"Вузол {x} має {len(candidates)} сусідів, межа перебору {limit}")
    for size in range(len(candidates) + 1):
        for subset in combinations(candidates, size):
            reached = set()
            for i in subset:
                reached.update(t.adjacency(i))
            if targets <= reached:
                return size
    raise UncoverableTargetError(f"Вузол {x}: цілі на відстані 2 непокривні")


def forwarder_gap_table(t, tables, max_neighbors=12):
    """
    Порівнює жадібний вибір з точним мінімумом для кожного вузла з
    не більше ніж max_neighbors сусідами.

    Returns:
        pd.DataFrame: Колонки GAP_COLUMNS
    """
    rows = []
    for x in range(t.n):
        nt = tables[x]
        if len(nt.entries) > max_neighbors:
            continue
        directive = select_forwarders(nt)
        greedy = len(directive.chosen)
        minimum = brute_force_min_forwarders(t, x)
        rows.append({
            "node": label_of(t, x),
            "neighbors": len(nt.entries),
            "greedy": greedy,
            "minimum": minimum,
            "gap": greedy - minimum,
            "valid": check_directive(nt, directive).is_empty(),
        })
    return pd.DataFrame(rows, columns=GAP_COLUMNS)


def directive_to_dict(t, directive):
    """Детермінований словник директиви з назвами вузлів."""
    return {
        "selector": label_of(t, directive.selector),
        "chosen": {label_of(t, i): [label_of(t, j) for j in sorted(directive.chosen[i])]
                   for i in directive.forwarders},
        "covered_hint": [label_of(t, v) for v in sorted(directive.covered_hint)],
    }
