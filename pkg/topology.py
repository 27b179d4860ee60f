"""
Модуль моделі мережі для обмеженого флудингу.
Основні функції:
- load_topology: Розбирає документ зі списком ребер і будує Topology
- neighbors: Множина сусідів N(x)
- nodes_within_radius: Вузли на відстані lo..hi хопів (TLen(x) = (2, 3), T(x) = (1, 3))
- *_topology: Детерміновані генератори тестових та експериментальних мереж
"""

from dataclasses import dataclass

import networkx as nx
import numpy as np

from utils import log_debug


class TopologyError(Exception):
    """Базова помилка моделі мережі."""


class EmptyTopologyError(TopologyError):
    pass


class SelfLoopError(TopologyError):
    pass


class DisconnectedTopologyError(TopologyError):
    pass


class MalformedLineError(TopologyError):
    pass


class UnknownNodeError(TopologyError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "невідомий вузол"


@dataclass(frozen=True)
class Topology:
    """
    Неорієнтований зв'язний граф мережі.

    Attributes:
        graph (nx.Graph): Заморожений граф, вузли 0..n-1
        labels (tuple): Назви вузлів у порядку їх ідентифікаторів
    """
    graph: nx.Graph
    labels: tuple

    @property
    def n(self):
        return len(self.labels)

    def check_node(self, x):
        if not isinstance(x, (int, np.integer)) or not 0 <= x < self.n:
            raise UnknownNodeError(f"Невідомий вузол: {x!r}")

    def adjacency(self, x):
        """Відсортований кортеж сусідів вузла x."""
        self.check_node(x)
        return tuple(sorted(self.graph.adj[x]))

    def edges(self):
        """Ребра (u, v), u < v, у відсортованому порядку."""
        return sorted((min(u, v), max(u, v)) for u, v in self.graph.edges())


def topology_from_edges(edges, labels=None, n=None):
    """
    Будує Topology з пар ідентифікаторів.

    Args:
        edges (iterable): Пари (u, v) цілих ідентифікаторів
        labels (list, optional): Назви вузлів; за замовчуванням "n0", "n1", ...
        n (int, optional): Кількість вузлів, якщо labels не задано

    Returns:
        Topology: Перевірена топологія
    """
    edges = [(int(u), int(v)) for u, v in edges]
    if labels is None:
        if n is None:
            n = max((max(u, v) for u, v in edges), default=-1) + 1
        labels = [f"n{i}" for i in range(n)]
    labels = tuple(labels)
    n = len(labels)
    if n == 0:
        raise EmptyTopologyError("Топологія не містить жодного вузла")
    if len(set(labels)) != n:
        raise TopologyError("Назви вузлів мають бути унікальними")

    graph = nx.Graph()
    graph.add_nodes_from(range(n))
    for u, v in edges:
        if u == v:
            raise SelfLoopError(f"Петля на вузлі {labels[u] if 0 <= u < n else u}")
        if not (0 <= u < n and 0 <= v < n):
            raise UnknownNodeError(f"Ребро ({u}, {v}) посилається на невідомий вузол")
        graph.add_edge(u, v)

    if not nx.is_connected(graph):
        parts = nx.number_connected_components(graph)
        raise DisconnectedTopologyError(f"Мережа не зв'язна: {parts} компонент(и)")

    return Topology(graph=nx.freeze(graph), labels=labels)


def load_topology(text):
    """
    Розбирає документ зі списком ребер: один рядок `labelA labelB` на ребро,
    коментарі після '#', порожні рядки ігноруються. Назви отримують щільні
    ідентифікатори в порядку першої появи, дублікати ребер зливаються.

    Args:
        text (str): Вміст документа

    Returns:
        Topology: Топологія мережі
    """
    ids = {}
    edges = []
    for line_no, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if len(tokens) != 2:
            raise MalformedLineError(f"Рядок {line_no}: очікується 'labelA labelB', отримано {line!r}")
        a, b = tokens
        if a == b:
            raise SelfLoopError(f"Рядок {line_no}: петля на вузлі '{a}'")
        for label in (a, b):
            if label not in ids:
                ids[label] = len(ids)
        edges.append((ids[a], ids[b]))

    if not edges:
        raise EmptyTopologyError("Документ топології не містить жодного ребра")

    labels = sorted(ids, key=ids.get)
    topology = topology_from_edges(edges, labels=labels)
    log_debug(f"Топологію завантажено: {topology.n} вузлів, {topology.graph.number_of_edges()} ребер")
    return topology


def read_topology(path):
    """Завантажує топологію з файлу (UTF-8)."""
    with open(path, "r", encoding="utf-8") as f:
        return load_topology(f.read())


def dump_topology(t):
    """Повертає документ зі списком ребер, який load_topology читає назад."""
    lines = [f"# {t.n} nodes, {t.graph.number_of_edges()} edges"]
    lines += [f"{t.labels[u]} {t.labels[v]}" for u, v in t.edges()]
    return "\n".join(lines) + "\n"


def label_of(t, x):
    t.check_node(x)
    return t.labels[x]


def id_of(t, label):
    try:
        return t.labels.index(label)
    except ValueError:
        raise UnknownNodeError(f"Невідомий вузол: '{label}'")


def neighbors(t, x):
    """
    Повертає N(x), відсортований за ідентифікатором.

    Args:
        t (Topology): Топологія
        x (int): Ідентифікатор вузла

    Returns:
        list: Сусіди вузла x
    """
    return list(t.adjacency(x))


def nodes_within_radius(t, x, lo, hi):
    """
    Вузли v != x, для яких lo <= dist(x, v) <= hi (пошук у ширину).

    Args:
        t (Topology): Топологія
        x (int): Ідентифікатор вузла
        lo (int): Нижня межа відстані в хопах
        hi (int): Верхня межа відстані в хопах

    Returns:
        set: Множина ідентифікаторів
    """
    t.check_node(x)
    if lo < 0:
        raise ValueError(f"Нижня межа радіуса має бути невід'ємною: {lo}")
    if lo > hi:
        return set()
    distances = nx.single_source_shortest_path_length(t.graph, x, cutoff=hi)
    return {v for v, d in distances.items() if v != x and lo <= d <= hi}


# --- Генератори мереж ---

def path_topology(n):
    return topology_from_edges([(i, i + 1) for i in range(n - 1)], n=n)


def ring_topology(n):
    return topology_from_edges([(i, (i + 1) % n) for i in range(n)], n=n)


def complete_topology(n):
    return topology_from_edges([(u, v) for u in range(n) for v in range(u + 1, n)], n=n)


def star_topology(leaves):
    """Зірка: центр 's' (id 0) та листки 'l1'..'lk'."""
    labels = ["s"] + [f"l{i}" for i in range(1, leaves + 1)]
    return topology_from_edges([(0, i) for i in range(1, leaves + 1)], labels=labels)


def grid_topology(rows, cols):
    """Решітка rows x cols, вузол (r, c) має id r*cols + c і назву 'r{r}c{c}'."""
    labels = [f"r{r}c{c}" for r in range(rows) for c in range(cols)]
    edges = []
    for r in range(rows):
        for c in range(cols):
            node = r * cols + c
            if c + 1 < cols:
                edges.append((node, node + 1))
            if r + 1 < rows:
                edges.append((node, node + cols))
    return topology_from_edges(edges, labels=labels)


def two_cluster_topology(k, bridge_len=1):
    """
    Дві повні підмережі по k вузлів, з'єднані шляхом з bridge_len ребер.

    Args:
        k (int): Розмір кожного кластера
        bridge_len (int): Довжина мосту в ребрах (>= 1)

    Returns:
        Topology: Топологія 'a0'..'a{k-1}', 'p1'.., 'b0'..'b{k-1}'
    """
    if bridge_len < 1:
        raise ValueError("Міст має містити хоча б одне ребро")
    relays = bridge_len - 1
    labels = [f"a{i}" for i in range(k)] + [f"p{i}" for i in range(1, relays + 1)] + [f"b{i}" for i in range(k)]
    a = list(range(k))
    p = list(range(k, k + relays))
    b = list(range(k + relays, 2 * k + relays))
    edges = [(u, v) for cluster in (a, b) for i, u in enumerate(cluster) for v in cluster[i + 1:]]
    chain = [a[-1]] + p + [b[0]]
    edges += list(zip(chain, chain[1:]))
    return topology_from_edges(edges, labels=labels)


def random_connected_topology(n, seed, extra_edge_prob=0.1):
    """
    Випадкова зв'язна мережа: випадкове кістякове дерево плюс додаткові ребра.
    Однаковий seed дає однакову топологію.

    Args:
        n (int): Кількість вузлів (>= 1)
        seed (int): Зерно генератора
        extra_edge_prob (float): Ймовірність кожного додаткового ребра

    Returns:
        Topology: Топологія з назвами 'n0'..'n{n-1}'
    """
    if n < 1:
        raise ValueError("Мережа має містити хоча б один вузол")
    rng = np.random.default_rng(seed)
    edges = {(int(rng.integers(0, i)), i) for i in range(1, n)}
    extra = np.triu(rng.random((n, n)) < extra_edge_prob, k=1)
    edges.update((int(u), int(v)) for u, v in zip(*np.nonzero(extra)))
    return topology_from_edges(sorted(edges), n=n)
