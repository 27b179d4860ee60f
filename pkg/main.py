#!/usr/bin/env python3
"""
Головний модуль командного рядка.
Поєднує збір сусідів, обмежений флудинг, кодек груп кадрів та наскрізну передачу.

Підкоманди:
- discover: Таблиці NT(x) усіх вузлів (JSON)
- flood: Звіт поширення для кожного джерела
- compare: Наївний флудинг проти rrdbfsf (колонка ratio)
- gap: Якість жадібного вибору ретрансляторів проти точного мінімуму
- generate: Випадкова зв'язна топологія у форматі списку ребер
- compress / decompress: Кодування сирого 8-бітного відео та відновлення
  (compress друкує D, R, cost, lambda, segments, flows та D_8bit - похибку 8-бітного файлу decompress)
- transmit: Кодування, пакетизація, флудинг і декодування на кожному вузлі

Колонки таблиць:
- flood: trial, source, mode, transmissions, receptions, duplicates, delivered_count, rounds
- compare: trial, source, tx_naive, tx_rrdbfsf, ratio
- gap: trial, node, neighbors, greedy, minimum, gap, valid
- transmit: node, fragments, decoded, identical, error
"""

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import pandas as pd

from codec.bitstream import BitstreamError, decode_gof, encode_segmentation
from codec.octree import segment
from codec.wavelet import CodecError, QuantSpec, distortion, lambda_of, read_raw_video, to_8bit, write_raw_video
from flood_sim import MODES, RRDBFSF, FloodError, compare_frame, compare_modes, compare_row, flood, report_row, reports_frame
from neighbor_protocol import DISCOVERY_ROUNDS, dump_tables, run_discovery
from rrdbfsf import GAP_COLUMNS, ForwarderSelectionError, forwarder_gap_table
from topology import TopologyError, dump_topology, id_of, random_connected_topology, read_topology
from transport import TransportError, status_frame, transmit_gof
from utils import (
    DEFAULT_CONFIG,
    TABLE_FORMATS,
    ConfigError,
    load_config,
    log_debug,
    log_info,
    render_json,
    save_table,
    set_verbose,
    write_text,
)

COMMANDS = ("discover", "flood", "compare", "gap", "generate", "compress", "decompress", "transmit")
VIDEO_COMMANDS = ("compress", "transmit")

DEFAULT_NODES = 20
DEFAULT_EDGE_PROB = 0.1


@dataclass
class RunConfig:
    """
    Параметри одного запуску: значення за замовчуванням <- файл конфігурації <- прапорці.

    Attributes:
        command (str): Підкоманда
        topology (str): Шлях до файлу топології (None - випадкові топології)
        sources (list): Назви вузлів-джерел
        input (str): Вхідне відео або бітовий потік
        out (str): Шлях виводу (None - stdout)
    """
    command: str
    topology: str = None
    sources: list = field(default_factory=list)
    mode: str = DEFAULT_CONFIG["mode"]
    delta: float = DEFAULT_CONFIG["delta"]
    alpha0: float = DEFAULT_CONFIG["alpha0"]
    mtu: int = DEFAULT_CONFIG["mtu"]
    seed: int = DEFAULT_CONFIG["seed"]
    rounds: int = DEFAULT_CONFIG["rounds"]
    max_depth: int = DEFAULT_CONFIG["max_depth"]
    search_range: int = DEFAULT_CONFIG["search_range"]
    trials: int = DEFAULT_CONFIG["trials"]
    format: str = DEFAULT_CONFIG["format"]
    jobs: int = 1
    nodes: int = DEFAULT_NODES
    edge_prob: float = DEFAULT_EDGE_PROB
    input: str = None
    width: int = None
    height: int = None
    frames: int = None
    out: str = None

    @property
    def quant(self):
        return QuantSpec(delta=self.delta, alpha0=self.alpha0)

    @property
    def uses_forwarders(self):
        """Чи потрібні підкоманді повні таблиці NT(x) для вибору ретрансляторів."""
        if self.command in ("compare", "gap"):
            return True
        return self.command in ("flood", "transmit") and self.mode == RRDBFSF

    def validate(self):
        """Перевіряє параметри до запуску будь-якого етапу."""
        if self.command not in COMMANDS:
            raise ConfigError(f"Невідома підкоманда: {self.command}")
        if not self.delta > 0:
            raise ConfigError(f"Крок квантування має бути додатним: {self.delta}")
        if not self.alpha0 > 0:
            raise ConfigError(f"alpha0 має бути додатним: {self.alpha0}")
        if self.mtu < 64:
            raise ConfigError(f"MTU має бути не менше 64: {self.mtu}")
        if self.mode not in MODES:
            raise ConfigError(f"Невідомий режим: {self.mode} (доступні: {', '.join(MODES)})")
        if self.format not in TABLE_FORMATS:
            raise ConfigError(f"Невідомий формат: {self.format} (доступні: {', '.join(TABLE_FORMATS)})")
        for name in ("trials", "jobs", "rounds", "nodes"):
            if getattr(self, name) < 1:
                raise ConfigError(f"Параметр {name} має бути >= 1: {getattr(self, name)}")
        if self.max_depth < 0 or self.search_range < 0:
            raise ConfigError("max_depth та search_range мають бути невід'ємними")
        if not 0.0 <= self.edge_prob <= 1.0:
            raise ConfigError(f"edge_prob має лежати в [0, 1]: {self.edge_prob}")

        if self.uses_forwarders and self.rounds < DISCOVERY_ROUNDS:
            raise ConfigError(
                f"Режим rrdbfsf потребує щонайменше {DISCOVERY_ROUNDS} раундів збору сусідів: {self.rounds}"
            )
        if self.command == "discover" and self.topology is None:
            raise ConfigError("Підкоманда discover потребує --topology")
        if self.command in VIDEO_COMMANDS:
            if self.input is None:
                raise ConfigError(f"Підкоманда {self.command} потребує --input")
            dims = (self.frames, self.height, self.width)
            if any(d is None for d in dims):
                raise ConfigError("Потрібні --frames, --height та --width")
            if min(dims) < 1:
                raise ConfigError(f"Розміри відео мають бути >= 1: {dims}")
        if self.command in ("compress", "decompress") and self.out in (None, "-"):
            raise ConfigError(f"Підкоманда {self.command} потребує --out <файл>")
        if self.command == "decompress" and self.input is None:
            raise ConfigError("Підкоманда decompress потребує --input")
        return self


def build_parser():
    parser = argparse.ArgumentParser(
        description="Обмежений флудинг rrdbfsf та RD-оптимальне кодування груп кадрів."
    )
    parser.add_argument("command", choices=COMMANDS, help="Підкоманда")
    parser.add_argument("--config", type=str, default=None,
                        help="Файл конфігурації (JSON або key=value); за замовчуванням config.json, якщо існує")
    parser.add_argument("--topology", type=str, default=None, help="Файл топології (пари 'a b' по рядку)")
    parser.add_argument("--source", action="append", default=None, help="Назва вузла-джерела (можна повторювати)")
    parser.add_argument("--mode", type=str, default=None, help="Режим флудингу: naive або rrdbfsf")
    parser.add_argument("--delta", type=float, default=None, help="Крок квантування Δ")
    parser.add_argument("--alpha0", type=float, default=None, help="Біт на ненульовий коефіцієнт α₀")
    parser.add_argument("--mtu", type=int, default=None, help="MTU пакета в байтах")
    parser.add_argument("--seed", type=int, default=None, help="Зерно випадкових топологій")
    parser.add_argument("--rounds", type=int, default=None, help="Раунди збору сусідів")
    parser.add_argument("--max-depth", dest="max_depth", type=int, default=None, help="Глибина окт-дерева")
    parser.add_argument("--search-range", dest="search_range", type=int, default=None,
                        help="Вікно пошуку трансляцій")
    parser.add_argument("--trials", type=int, default=None, help="Кількість незалежних запусків")
    parser.add_argument("--jobs", type=int, default=None, help="Кількість процесів для запусків")
    parser.add_argument("--nodes", type=int, default=None, help="Кількість вузлів випадкової топології")
    parser.add_argument("--edge-prob", dest="edge_prob", type=float, default=None,
                        help="Ймовірність додаткового ребра випадкової топології")
    parser.add_argument("--input", type=str, default=None, help="Вхідний файл (сире відео або бітовий потік)")
    parser.add_argument("--width", type=int, default=None, help="Ширина кадру W")
    parser.add_argument("--height", type=int, default=None, help="Висота кадру H")
    parser.add_argument("--frames", type=int, default=None, help="Кількість кадрів T")
    parser.add_argument("--out", type=str, default=None, help="Вихідний файл (за замовчуванням stdout)")
    parser.add_argument("--format", type=str, default=None, help="Формат таблиць: csv, json або xlsx")
    parser.add_argument("--verbose", action="store_true", help="Друкувати DEBUG-повідомлення")
    return parser


def make_run_config(args):
    """
    Збирає RunConfig: значення за замовчуванням, потім файл конфігурації, потім прапорці.

    Args:
        args (argparse.Namespace): Розібрані аргументи

    Returns:
        RunConfig: Перевірена конфігурація
    """
    if args.config is not None:
        file_config = load_config(args.config)
    elif os.path.exists("config.json"):
        file_config = load_config("config.json")
    else:
        file_config = dict(DEFAULT_CONFIG)

    values = dict(file_config)
    for key in ("mode", "delta", "alpha0", "mtu", "seed", "rounds", "max_depth",
                "search_range", "trials", "format"):
        if getattr(args, key) is not None:
            values[key] = getattr(args, key)
    for key in ("topology", "jobs", "nodes", "edge_prob", "input", "width", "height", "frames", "out"):
        if getattr(args, key) is not None:
            values[key] = getattr(args, key)
    values["sources"] = list(args.source or [])
    return RunConfig(command=args.command, **values).validate()


def trial_topology(config, trial):
    if config.topology is not None:
        return read_topology(config.topology)
    return random_connected_topology(config.nodes, config.seed + trial, config.edge_prob)


def resolve_sources(t, labels):
    if not labels:
        return [0]
    return [id_of(t, label) for label in labels]


def run_trial(config, trial):
    """
    Один незалежний запуск flood / compare / gap.

    Returns:
        list: Рядки таблиці
    """
    t = trial_topology(config, trial)
    tables = run_discovery(t, config.rounds)
    log_debug(f"Запуск {trial}: {t.n} вузлів, {t.graph.number_of_edges()} ребер")

    if config.command == "gap":
        rows = forwarder_gap_table(t, tables).to_dict("records")
        return [{"trial": trial, **row} for row in rows]

    sources = resolve_sources(t, config.sources)
    if config.command == "compare":
        stats = compare_modes(t, sources, seed=config.seed, tables=tables)
        return [compare_row(t, s, trial) for s in stats]
    return [
        report_row(t, flood(t, tables, s, config.mode, msg_id=config.seed + offset), trial)
        for offset, s in enumerate(sources)
    ]


def _run_trial_job(job):
    config, trial = job
    return run_trial(config, trial)


def run_trials(config):
    """Усі запуски в порядку номерів; з --jobs > 1 - у пулі процесів."""
    jobs = [(config, trial) for trial in range(config.trials)]
    if config.jobs > 1 and config.trials > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as executor:
            results = list(executor.map(_run_trial_job, jobs))
    else:
        results = [_run_trial_job(job) for job in jobs]
    return [row for rows in results for row in rows]


def cmd_discover(config):
    t = read_topology(config.topology)
    tables = run_discovery(t, config.rounds)
    write_text(render_json(dump_tables(t, tables)), config.out)
    log_info(f"Таблиці NT(x) побудовано для {t.n} вузлів")


def cmd_flood(config):
    save_table(reports_frame(run_trials(config)), config.out, config.format)


def cmd_compare(config):
    save_table(compare_frame(run_trials(config)), config.out, config.format)


def cmd_gap(config):
    df = pd.DataFrame(run_trials(config), columns=["trial"] + GAP_COLUMNS)
    save_table(df, config.out, config.format)


def cmd_generate(config):
    t = random_connected_topology(config.nodes, config.seed, config.edge_prob)
    write_text(dump_topology(t), config.out)
    log_info(f"Згенеровано топологію: {t.n} вузлів, {t.graph.number_of_edges()} ребер")


def compress_stats(gof, tree):
    recon = tree.reconstruction()
    return {
        "D": tree.total_distortion,
        "R": tree.total_rate,
        "cost": tree.total_cost,
        "lambda": lambda_of(tree.quant),
        "segments": len(tree.leaves),
        "flows": tree.flow_histogram(),
        "D_8bit": distortion(gof.samples, to_8bit(recon)),
    }


def cmd_compress(config):
    gof = read_raw_video(config.input, config.frames, config.height, config.width)
    tree = segment(gof, config.quant, config.max_depth, config.search_range)
    stream = encode_segmentation(tree)
    stats = compress_stats(gof, tree)
    with open(config.out, "wb") as f:
        f.write(stream)
    write_text(render_json(stats))
    log_info(f"Закодовано {gof.dims} у {len(stream)} байт: {config.out}")


def cmd_decompress(config):
    with open(config.input, "rb") as f:
        stream = f.read()
    recon = decode_gof(stream)
    if config.frames is not None and config.height is not None and config.width is not None:
        expected = (config.frames, config.height, config.width)
        if recon.shape != expected:
            raise BitstreamError(f"Розміри потоку {recon.shape} не відповідають {expected}")
    write_raw_video(config.out, recon)
    log_info(f"Відновлено {recon.shape}: {config.out}")


def cmd_transmit(config):
    gof = read_raw_video(config.input, config.frames, config.height, config.width)
    t = trial_topology(config, 0)
    source = resolve_sources(t, config.sources[:1])[0]
    tables = run_discovery(t, config.rounds)
    result = transmit_gof(gof, t, source, config.quant, config.mtu, config.mode, tables,
                          config.max_depth, config.search_range, msg_id=config.seed)
    save_table(status_frame(t, result), config.out, config.format)
    log_info(f"Передано {len(result.packets)} пакетів, {result.transmissions} трансляцій; "
             f"ідентичне відновлення на {sum(s.identical for s in result.statuses)}/{t.n} вузлах")


HANDLERS = {
    "discover": cmd_discover,
    "flood": cmd_flood,
    "compare": cmd_compare,
    "gap": cmd_gap,
    "generate": cmd_generate,
    "compress": cmd_compress,
    "decompress": cmd_decompress,
    "transmit": cmd_transmit,
}


def main(argv=None):
    """
    Головна функція запуску.

    Args:
        argv (list, optional): Аргументи командного рядка (без назви програми)

    Returns:
        int: Код завершення (0 - успіх)
    """
    args = build_parser().parse_args(argv)
    set_verbose(args.verbose)
    try:
        config = make_run_config(args)
        log_debug(f"Конфігурація запуску: {config}")
        HANDLERS[config.command](config)
    except (TopologyError, ForwarderSelectionError, FloodError, CodecError,
            TransportError, ConfigError, OSError) as e:
        print(f"Помилка: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
