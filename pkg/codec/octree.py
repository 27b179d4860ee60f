"""
Модуль сегментації групи кадрів окт-деревом кубоїдів з мінімізацією D + λR.
Основні функції:
- cuboid_cost: (D, R, D + λR) кубоїда для заданої моделі руху
- best_flow: Модель руху з мінімальною вартістю
- build_octree / segment: Дерево вартостей та оптимальне обрізання split/merge
- brute_force_prunings: Повний перебір обрізань (оракул)
"""

from dataclasses import dataclass, field
from enum import IntEnum
from itertools import product

import numpy as np

from codec.wavelet import (
    CENTER,
    CodecError,
    CoeffBlock,
    bit_cost,
    decomposition_levels,
    dequantize,
    distortion,
    dwt3_forward,
    dwt3_inverse,
    is_pow2,
    lambda_of,
    quantize,
)
from utils import log_debug

MIN_LEAF = 2
DEFAULT_SEARCH_RANGE = 2


class SegmentationError(CodecError):
    pass


class InvalidFlowError(CodecError):
    pass


class FlowKind(IntEnum):
    NO_FLOW = 0
    CONST_TRANSLATION = 1
    RESERVED2 = 2
    RESERVED3 = 3


REGISTERED_KINDS = (FlowKind.NO_FLOW, FlowKind.CONST_TRANSLATION)


@dataclass(frozen=True)
class FlowModel:
    """
    Модель руху кубоїда: без руху або стала трансляція (dy, dx) пікселів за кадр.
    """
    kind: FlowKind = FlowKind.NO_FLOW
    dy: int = 0
    dx: int = 0

    @property
    def param_count(self):
        return 2 if self.kind == FlowKind.CONST_TRANSLATION else 0

    def __str__(self):
        if self.kind == FlowKind.CONST_TRANSLATION:
            return f"ConstTranslation({self.dy},{self.dx})"
        if self.kind == FlowKind.NO_FLOW:
            return "NoFlow"
        return self.kind.name


NO_FLOW = FlowModel()


def translation(dy, dx):
    return FlowModel(FlowKind.CONST_TRANSLATION, int(dy), int(dx))


def check_flow(f, search_range=DEFAULT_SEARCH_RANGE):
    if f.kind not in REGISTERED_KINDS:
        raise InvalidFlowError(f"Модель руху {f.kind.name} не зареєстрована")
    if f.kind == FlowKind.NO_FLOW and (f.dy or f.dx):
        raise InvalidFlowError("Модель NoFlow не має параметрів")
    if abs(f.dy) > search_range or abs(f.dx) > search_range:
        raise InvalidFlowError(f"Зсув ({f.dy},{f.dx}) поза вікном пошуку ±{search_range}")


def candidate_flows(search_range=DEFAULT_SEARCH_RANGE):
    """Зареєстровані моделі у порядку розв'язання рівності вартостей."""
    flows = [NO_FLOW]
    steps = range(-search_range, search_range + 1)
    flows += [translation(dy, dx) for dy, dx in product(steps, steps)]
    return flows


@dataclass(frozen=True)
class Cuboid:
    """Кубоїд: початок (t, y, x) та розміри-степені двійки (dt, dy, dx)."""
    origin: tuple
    dims: tuple

    def __post_init__(self):
        if len(self.origin) != 3 or len(self.dims) != 3:
            raise SegmentationError("Кубоїд має три осі")
        if not all(is_pow2(d) for d in self.dims):
            raise SegmentationError(f"Розміри кубоїда мають бути степенями двійки: {self.dims}")

    @property
    def slices(self):
        return tuple(slice(o, o + d) for o, d in zip(self.origin, self.dims))

    @property
    def log2_dims(self):
        return tuple(d.bit_length() - 1 for d in self.dims)

    def can_split(self):
        return any(d > MIN_LEAF for d in self.dims)

    def children(self):
        """8, 4 або 2 дочірні кубоїди: вісь мінімального розміру не ділиться."""
        axes = []
        for o, d in zip(self.origin, self.dims):
            if d > MIN_LEAF:
                half = d // 2
                axes.append([(o, half), (o + half, half)])
            else:
                axes.append([(o, d)])
        return [Cuboid(origin=tuple(p[0] for p in parts), dims=tuple(p[1] for p in parts))
                for parts in product(*axes)]


@dataclass(frozen=True)
class CostTriple:
    D: float
    R: float
    cost: float


@dataclass
class LeafCoding:
    """Закодований кубоїд: модель руху, квантовані коефіцієнти, вартість та відновлення."""
    cuboid: Cuboid
    flow: FlowModel
    qvalues: np.ndarray
    D: float
    R: float
    cost: float
    recon: np.ndarray = field(repr=False)

    @property
    def nonzeros(self):
        return int(np.count_nonzero(self.qvalues))

    @property
    def triple(self):
        return CostTriple(self.D, self.R, self.cost)


def _shift_frames(block, dy, dx):
    """Кадр t: відлік (y, x) береться з (y + t·dy, x + t·dx), індекси обмежуються краями кубоїда."""
    T, H, W = block.shape
    out = np.empty_like(block)
    for t in range(T):
        rows = np.clip(np.arange(H) + t * dy, 0, H - 1)
        cols = np.clip(np.arange(W) + t * dx, 0, W - 1)
        out[t] = block[t][np.ix_(rows, cols)]
    return out


def compensate(block, f):
    """Зсуває кадр t на (-t·dy, -t·dx) з обмеженням на краях кубоїда."""
    if f.kind != FlowKind.CONST_TRANSLATION or (f.dy == 0 and f.dx == 0):
        return block
    return _shift_frames(block, f.dy, f.dx)


def decompensate(block, f):
    """
    Зворотний зсув. Рядки й стовпці, що вийшли за край під час компенсації,
    відновлюються копією крайніх відліків; втрату враховує D.
    """
    if f.kind != FlowKind.CONST_TRANSLATION or (f.dy == 0 and f.dx == 0):
        return block
    return _shift_frames(block, -f.dy, -f.dx)


def reconstruct_cuboid(qvalues, f, q):
    """
    Декодує кубоїд: деквантування, обернений вейвлет, зворотна компенсація руху,
    повернення зсуву 128 та обмеження до [0, 255]. Спільне для кодера й декодера.
    """
    coeffs = CoeffBlock(values=dequantize(qvalues, q), levels=decomposition_levels(qvalues.shape))
    recon = decompensate(dwt3_inverse(coeffs), f) + CENTER
    return np.clip(recon, 0.0, 255.0)


def support_extent(c, original_dims):
    """Розміри частини кубоїда, що лежить в оригінальній (нерозширеній) gof."""
    return tuple(max(0, min(d, limit - o)) for o, d, limit in zip(c.origin, c.dims, original_dims))


def code_cuboid(gof, c, f, q, search_range=DEFAULT_SEARCH_RANGE):
    """
    Кодує кубоїд з моделлю руху f.

    Args:
        gof (GroupOfFrames): Група кадрів
        c (Cuboid): Кубоїд у межах розширеної gof
        f (FlowModel): Модель руху
        q (QuantSpec): Параметри квантування

    Returns:
        LeafCoding: Результат кодування з D, R та вартістю
    """
    check_flow(f, search_range)
    if any(o < 0 or o + d > limit for o, d, limit in zip(c.origin, c.dims, gof.padded_dims)):
        raise SegmentationError(f"Кубоїд {c} виходить за межі gof {gof.padded_dims}")

    block = gof.padded[c.slices].astype(np.float64) - CENTER
    coeffs = dwt3_forward(compensate(block, f))
    qvalues = quantize(coeffs, q)
    R = bit_cost(int(np.count_nonzero(qvalues)), f.param_count, q)
    recon = reconstruct_cuboid(qvalues, f, q)

    st, sy, sx = support_extent(c, gof.dims)
    t0, y0, x0 = c.origin
    original = gof.samples[t0:t0 + st, y0:y0 + sy, x0:x0 + sx]
    D = distortion(original, recon[:st, :sy, :sx])
    return LeafCoding(c, f, qvalues, D, R, D + lambda_of(q) * R, recon)


def cuboid_cost(gof, c, f, q, search_range=DEFAULT_SEARCH_RANGE):
    """
    Вартість кубоїда для моделі руху f.

    Returns:
        CostTriple: (D, R, D + λR)
    """
    return code_cuboid(gof, c, f, q, search_range).triple


def best_flow_coding(gof, c, q, search_range=DEFAULT_SEARCH_RANGE):
    best = None
    for f in candidate_flows(search_range):
        coding = code_cuboid(gof, c, f, q, search_range)
        if best is None or coding.cost < best.cost:
            best = coding
    return best


def best_flow(gof, c, q, search_range=DEFAULT_SEARCH_RANGE):
    """
    Перебирає всі зареєстровані моделі руху (трансляції - по всьому вікну пошуку).
    При рівності вартостей перемагає менший індекс типу, потім лексикографічно
    менший (dy, dx).

    Returns:
        tuple: (FlowModel, CostTriple)
    """
    coding = best_flow_coding(gof, c, q, search_range)
    return coding.flow, coding.triple


@dataclass
class OctreeNode:
    cuboid: Cuboid
    depth: int
    coding: LeafCoding
    children: list = field(default_factory=list)
    best_cost: float = 0.0
    split: bool = False

    @property
    def own_cost(self):
        return self.coding.cost


def build_octree(gof, q, max_depth, search_range=DEFAULT_SEARCH_RANGE, cuboid=None, depth=0):
    """
    Будує окт-дерево до глибини max_depth і обчислює найкращу модель руху в кожному вузлі.
    """
    if cuboid is None:
        cuboid = Cuboid(origin=(0, 0, 0), dims=gof.padded_dims)
    node = OctreeNode(cuboid=cuboid, depth=depth, coding=best_flow_coding(gof, cuboid, q, search_range))
    if depth < max_depth and cuboid.can_split():
        node.children = [build_octree(gof, q, max_depth, search_range, child, depth + 1)
                         for child in cuboid.children()]
    return node


def prune(node):
    """
    Обрізання знизу вгору: поділ лишається, лише якщо сума оптимальних
    вартостей дітей строго менша за вартість вузла; при рівності - злиття.

    Returns:
        float: Оптимальна вартість піддерева
    """
    if not node.children:
        node.split = False
        node.best_cost = node.own_cost
        return node.best_cost
    children_cost = sum(prune(child) for child in node.children)
    node.split = children_cost < node.own_cost
    node.best_cost = children_cost if node.split else node.own_cost
    return node.best_cost


def collect_leaves(node):
    if not node.split:
        return [node.coding]
    leaves = []
    for child in node.children:
        leaves.extend(collect_leaves(child))
    return leaves


@dataclass
class SegmentationTree:
    """
    Обрізане окт-дерево: листки розбивають розширену gof без перекриттів і пропусків.

    Attributes:
        dims (tuple): Розміри оригінальної gof
        padded_dims (tuple): Розміри після розширення
        quant (QuantSpec): Параметри квантування
        root (OctreeNode): Корінь дерева вартостей
        leaves (list): LeafCoding для кожного сегмента
    """
    dims: tuple
    padded_dims: tuple
    quant: object
    root: OctreeNode
    leaves: list

    @property
    def total_distortion(self):
        return sum(leaf.D for leaf in self.leaves)

    @property
    def total_rate(self):
        return sum(leaf.R for leaf in self.leaves)

    @property
    def total_cost(self):
        lam = lambda_of(self.quant)
        return sum(leaf.D + lam * leaf.R for leaf in self.leaves)

    def flow_histogram(self):
        histogram = {}
        for leaf in self.leaves:
            key = str(leaf.flow)
            histogram[key] = histogram.get(key, 0) + 1
        return dict(sorted(histogram.items()))

    def reconstruction(self):
        """Відновлення gof з листків, обрізане до оригінальних розмірів."""
        volume = np.zeros(self.padded_dims, dtype=np.float64)
        for leaf in self.leaves:
            volume[leaf.cuboid.slices] = leaf.recon
        T, H, W = self.dims
        return volume[:T, :H, :W]


def segment(gof, q, max_depth=2, search_range=DEFAULT_SEARCH_RANGE):
    """
    Оптимальна сегментація gof окт-деревом кубоїдів.

    Args:
        gof (GroupOfFrames): Група кадрів (розширюється до степенів двійки)
        q (QuantSpec): Параметри квантування
        max_depth (int): Максимальна глибина окт-дерева
        search_range (int): Вікно пошуку трансляцій, пікселів за кадр

    Returns:
        SegmentationTree: Обрізане дерево з закодованими листками
    """
    if min(gof.padded_dims) < MIN_LEAF:
        raise SegmentationError(f"gof {gof.dims} менша за мінімальний листок {MIN_LEAF}x{MIN_LEAF}x{MIN_LEAF}")
    if max_depth < 0:
        raise SegmentationError(f"Глибина дерева має бути невід'ємною: {max_depth}")
    root = build_octree(gof, q, max_depth, search_range)
    prune(root)
    leaves = collect_leaves(root)
    tree = SegmentationTree(gof.dims, gof.padded_dims, q, root, leaves)
    log_debug(f"Сегментація: {len(leaves)} сегментів, D={tree.total_distortion:.3f}, "
              f"R={tree.total_rate:.0f}, вартість={tree.total_cost:.3f}")
    return tree


def enumerate_prunings(node):
    """Усі допустимі обрізання піддерева як списки листків-вузлів."""
    yield [node]
    if node.children:
        for combo in product(*(list(enumerate_prunings(child)) for child in node.children)):
            yield [leaf for part in combo for leaf in part]


def brute_force_prunings(root):
    """
    Повний перебір обрізань дерева вартостей.

    Returns:
        tuple: (мінімальна вартість, кількість перебраних обрізань)
    """
    best = None
    count = 0
    for leaves in enumerate_prunings(root):
        count += 1
        cost = sum(leaf.own_cost for leaf in leaves)
        if best is None or cost < best:
            best = cost
    return best, count
