"""
Модуль числової основи кодека: 3D вейвлет Хаара, квантування, моделі бітової
вартості та спотворення, множник Лагранжа.
Основні функції:
- dwt3_forward / dwt3_inverse: Багаторівневий ортонормований 3D Хаар (ліфтинг)
- quantize / dequantize: Рівномірне квантування з кроком Δ
- bit_cost: R = α₀·(M + P)
- distortion: Сума квадратів похибки
- lambda_of: λ = 3Δ²/(4α₀)
- read_raw_video / write_raw_video: Сирі 8-бітні файли яскравості
"""

from dataclasses import dataclass, field

import numpy as np

ALPHA0 = 7
CENTER = 128.0
SQRT2 = np.sqrt(2.0)


class CodecError(Exception):
    """Базова помилка кодека."""


class DimensionError(CodecError):
    pass


class VideoSizeError(CodecError):
    pass


def is_pow2(n):
    return n >= 1 and (n & (n - 1)) == 0


def next_pow2(n):
    return 1 << max(int(n) - 1, 0).bit_length()


def pad_to_pow2(samples):
    """Симетричне розширення до найближчих степенів двійки по кожній осі."""
    widths = [(0, next_pow2(d) - d) for d in samples.shape]
    if not any(after for _, after in widths):
        return samples
    return np.pad(samples, widths, mode="symmetric")


@dataclass(frozen=True)
class GroupOfFrames:
    """
    Група кадрів (gof): масив T x H x W 8-бітних відліків яскравості.

    Attributes:
        samples (np.ndarray): uint8, форма (T, H, W)
        padded (np.ndarray): samples після симетричного розширення до степенів двійки
    """
    samples: np.ndarray
    padded: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        samples = np.asarray(self.samples)
        if samples.ndim != 3 or min(samples.shape) < 1:
            raise DimensionError(f"Очікується масив T x H x W з розмірами >= 1, отримано {samples.shape}")
        if samples.min() < 0 or samples.max() > 255:
            raise CodecError("Відліки мають лежати в діапазоні [0, 255]")
        samples = samples.astype(np.uint8)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "padded", pad_to_pow2(samples))

    @property
    def dims(self):
        return tuple(int(d) for d in self.samples.shape)

    @property
    def padded_dims(self):
        return tuple(int(d) for d in self.padded.shape)


@dataclass(frozen=True)
class CoeffBlock:
    """Вейвлет-коефіцієнти кубоїда; levels - глибина розкладу."""
    values: np.ndarray
    levels: int

    @property
    def dims(self):
        return self.values.shape


@dataclass(frozen=True)
class QuantSpec:
    """Крок квантування Δ та константа бітової вартості α₀."""
    delta: float
    alpha0: float = ALPHA0

    def __post_init__(self):
        if self.delta < 0:
            raise CodecError(f"Крок квантування має бути невід'ємним: {self.delta}")
        if self.alpha0 <= 0:
            raise CodecError(f"α₀ має бути додатним: {self.alpha0}")


def decomposition_levels(shape):
    """
    Кількість рівнів розкладу: рівень застосовується до осей з довжиною >= 2,
    рекурсія на низькочастотну смугу триває, поки всі такі осі мають довжину >= 2.
    """
    active = [d for d in shape if d >= 2]
    if not active:
        return 0
    return min(int(d).bit_length() - 1 for d in active)


def _check_shape(shape):
    if len(shape) != 3 or not all(is_pow2(d) for d in shape):
        raise DimensionError(f"Кожен розмір блоку має бути степенем двійки, отримано {tuple(shape)}")


def _haar_analysis(band):
    # ліфтинг вздовж осі 0: d = x0 - x1, s = x1 + d/2, потім нормування
    x0, x1 = band[0::2], band[1::2]
    d = x0 - x1
    s = x1 + d / 2
    return np.concatenate([s * SQRT2, d / SQRT2], axis=0)


def _haar_synthesis(band):
    half = band.shape[0] // 2
    s = band[:half] / SQRT2
    d = band[half:] * SQRT2
    x1 = s - d / 2
    x0 = d + x1
    out = np.empty_like(band)
    out[0::2] = x0
    out[1::2] = x1
    return out


def _band_regions(shape, levels):
    """Області низькочастотної смуги для кожного рівня, від першого до останнього."""
    regions = []
    band = list(shape)
    for _ in range(levels):
        regions.append(tuple(band))
        band = [b // 2 if d >= 2 else b for b, d in zip(band, shape)]
    return regions


def dwt3_forward(block):
    """
    Прямий 3D ортонормований вейвлет Хаара.

    Один рівень - попарне (a, d) = ((x0+x1)/√2, (x0-x1)/√2) вздовж t, потім y,
    потім x; далі рекурсія на смугу LLL.

    Args:
        block (np.ndarray): Масив T x H x W, кожен розмір - степінь двійки

    Returns:
        CoeffBlock: Коефіцієнти в розкладці за підсмугами
    """
    values = np.array(block, dtype=np.float64)
    _check_shape(values.shape)
    levels = decomposition_levels(values.shape)
    for band in _band_regions(values.shape, levels):
        region = tuple(slice(0, b) for b in band)
        for axis in range(3):
            if values.shape[axis] < 2:
                continue
            sub = np.moveaxis(values[region], axis, 0)
            values[region] = np.moveaxis(_haar_analysis(sub), 0, axis)
    return CoeffBlock(values=values, levels=levels)


def dwt3_inverse(c):
    """
    Обернене перетворення до dwt3_forward.

    Args:
        c (CoeffBlock): Коефіцієнти

    Returns:
        np.ndarray: Відновлений блок (float64)
    """
    values = np.array(c.values, dtype=np.float64)
    _check_shape(values.shape)
    if c.levels != decomposition_levels(values.shape):
        raise DimensionError(f"Глибина розкладу {c.levels} не відповідає розмірам {values.shape}")
    for band in reversed(_band_regions(values.shape, c.levels)):
        region = tuple(slice(0, b) for b in band)
        for axis in reversed(range(3)):
            if values.shape[axis] < 2:
                continue
            sub = np.moveaxis(values[region], axis, 0)
            values[region] = np.moveaxis(_haar_synthesis(sub), 0, axis)
    return values


def quantize(c, q):
    """
    Рівномірне квантування: q_i = round(c_i / Δ), округлення половин від нуля.

    Args:
        c (CoeffBlock | np.ndarray): Коефіцієнти
        q (QuantSpec): Параметри квантування

    Returns:
        np.ndarray: Цілі індекси (int64)
    """
    if q.delta <= 0:
        raise CodecError(f"Для квантування потрібен додатний крок Δ, отримано {q.delta}")
    values = c.values if isinstance(c, CoeffBlock) else np.asarray(c, dtype=np.float64)
    return (np.sign(values) * np.floor(np.abs(values) / q.delta + 0.5)).astype(np.int64)


def dequantize(qvalues, q):
    """ĉ_i = q_i · Δ"""
    return np.asarray(qvalues, dtype=np.float64) * q.delta


def bit_cost(nonzero_count, flow_param_count, q):
    """
    Модель бітової вартості: R = α₀·(M + P), де P - кількість параметрів руху.

    Args:
        nonzero_count (int): Кількість ненульових квантованих коефіцієнтів M
        flow_param_count (int): Кількість параметрів моделі руху P
        q (QuantSpec): Параметри квантування (α₀)

    Returns:
        float: Бітова вартість
    """
    if nonzero_count < 0 or flow_param_count < 0:
        raise ValueError("M та P мають бути невід'ємними")
    return q.alpha0 * (nonzero_count + flow_param_count)


def distortion(orig, recon):
    """Сума квадратів похибки відновлення."""
    a = np.asarray(orig, dtype=np.float64)
    b = np.asarray(recon, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionError(f"Розміри не збігаються: {a.shape} та {b.shape}")
    return float(np.sum((a - b) ** 2))


def energy(values):
    return float(np.sum(np.square(np.asarray(values, dtype=np.float64))))


def lambda_of(q):
    """λ = 3Δ²/(4α₀)"""
    return 3.0 * q.delta ** 2 / (4.0 * q.alpha0)


def to_8bit(recon):
    """Округлення та обмеження відновлення до 8-бітних відліків."""
    return np.clip(np.rint(recon), 0, 255).astype(np.uint8)


def read_raw_video(path, frames, height, width):
    """
    Читає безголовковий планарний 8-бітний файл яскравості.

    Args:
        path (str): Шлях до файлу
        frames (int): Кількість кадрів T
        height (int): Висота H
        width (int): Ширина W

    Returns:
        GroupOfFrames: Група кадрів
    """
    with open(path, "rb") as f:
        data = f.read()
    expected = frames * height * width
    if len(data) != expected:
        raise VideoSizeError(
            f"Розмір файлу {path} ({len(data)} байт) не відповідає {frames}x{height}x{width} = {expected}"
        )
    samples = np.frombuffer(data, dtype=np.uint8).reshape(frames, height, width)
    return GroupOfFrames(samples.copy())


def raw_video_bytes(recon):
    return to_8bit(recon).tobytes()


def write_raw_video(path, recon):
    """Записує відновлення як сирий 8-бітний файл яскравості."""
    with open(path, "wb") as f:
        f.write(raw_video_bytes(recon))
