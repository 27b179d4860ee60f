# utils.py
"""
Допоміжні функції: конфігурація запуску, діагностичний вивід та збереження таблиць.
Основні функції:
- load_config: Завантажує конфігурацію (JSON або рядки key=value)
- log_info / log_debug: Діагностичні повідомлення у stderr
- render_table / save_table: Вивід таблиць pandas у CSV, JSON або XLSX
- format_excel_file: Форматування XLSX (ширина колонок, підсвічування статусів)
"""

import json
import sys

from openpyxl import load_workbook
from openpyxl.styles import PatternFill
from openpyxl.utils import get_column_letter

DEFAULT_CONFIG = {
    "alpha0": 7.0,
    "delta": 4.0,
    "mtu": 1024,
    "search_range": 2,
    "max_depth": 2,
    "rounds": 3,
    "mode": "rrdbfsf",
    "seed": 0,
    "trials": 1,
    "format": "csv",
}

TABLE_FORMATS = ("csv", "json", "xlsx")

# Вмикається прапорцем --verbose
VERBOSE = False


class ConfigError(Exception):
    """Помилка у файлі конфігурації або в параметрах запуску."""


def set_verbose(enabled):
    global VERBOSE
    VERBOSE = bool(enabled)


def log_info(message):
    """Друкує повідомлення у stderr, щоб stdout лишався чистим для CSV/JSON."""
    print(message, file=sys.stderr)


def log_debug(message):
    """Друкує DEBUG-повідомлення лише в режимі --verbose."""
    if VERBOSE:
        print(f"DEBUG: {message}", file=sys.stderr)


def _coerce_value(key, raw):
    """
    Приводить текстове значення з файлу key=value до типу значення за замовчуванням.

    Args:
        key (str): Назва параметра
        raw (str): Сире значення

    Returns:
        int | float | str: Значення потрібного типу
    """
    default = DEFAULT_CONFIG[key]
    try:
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
    except ValueError:
        raise ConfigError(f"Параметр '{key}' має некоректне значення: {raw!r}")
    return raw


def _parse_key_value(text, source):
    values = {}
    for line_no, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{line_no}: очікується рядок key=value, отримано {line!r}")
        key, raw = line.split("=", 1)
        key = key.strip()
        if key not in DEFAULT_CONFIG:
            raise ConfigError(f"{source}:{line_no}: невідомий параметр '{key}'")
        values[key] = _coerce_value(key, raw.strip())
    return values


def load_config(config_file="config.json"):
    """
    Завантажує конфігурацію запуску.

    Файли *.json читаються як JSON-об'єкт, усі інші як рядки key=value
    (коментарі після '#'). Відсутні параметри беруться з DEFAULT_CONFIG.

    Args:
        config_file (str, optional): Шлях до файлу конфігурації. За замовчуванням 'config.json'.

    Returns:
        dict: Повна конфігурація
    """
    with open(config_file, "r", encoding="utf-8") as f:
        text = f.read()

    if config_file.lower().endswith(".json"):
        try:
            values = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError(f"{config_file}: некоректний JSON ({e})")
        if not isinstance(values, dict):
            raise ConfigError(f"{config_file}: очікується JSON-об'єкт")
        unknown = sorted(set(values) - set(DEFAULT_CONFIG))
        if unknown:
            raise ConfigError(f"{config_file}: невідомі параметри {unknown}")
        values = {key: _coerce_value(key, str(raw)) for key, raw in values.items()}
    else:
        values = _parse_key_value(text, config_file)

    config = dict(DEFAULT_CONFIG)
    config.update(values)
    log_debug(f"Конфігурацію завантажено з {config_file}: {config}")
    return config


def render_json(obj):
    """Детермінований JSON-текст (відсортовані ключі, завершальний перенос рядка)."""
    return json.dumps(obj, ensure_ascii=False, indent=2, sort_keys=True) + "\n"


def render_table(df, fmt="csv"):
    """
    Перетворює таблицю на текст.

    Args:
        df (pd.DataFrame): Таблиця з фіксованим порядком колонок
        fmt (str): 'csv' або 'json'

    Returns:
        str: Текст таблиці
    """
    if fmt == "csv":
        return df.to_csv(index=False, lineterminator="\n")
    if fmt == "json":
        return render_json(df.to_dict("records"))
    raise ConfigError(f"Формат '{fmt}' не можна вивести як текст")


def write_text(text, output_path=None):
    """Пише текст у файл або в stdout, якщо шлях не вказано."""
    if output_path is None or output_path == "-":
        sys.stdout.write(text)
        return
    with open(output_path, "w", encoding="utf-8", newline="") as f:
        f.write(text)


def save_table(df, output_path=None, fmt="csv"):
    """
    Зберігає таблицю у вибраному форматі.

    Args:
        df (pd.DataFrame): Таблиця
        output_path (str, optional): Шлях до файлу; None означає stdout (лише csv/json)
        fmt (str): 'csv', 'json' або 'xlsx'
    """
    if fmt not in TABLE_FORMATS:
        raise ConfigError(f"Невідомий формат виводу: {fmt}")
    if fmt != "xlsx":
        write_text(render_table(df, fmt), output_path)
        return

    if output_path is None or output_path == "-":
        raise ConfigError("Для формату xlsx потрібен --out <файл.xlsx>")
    if not output_path.lower().endswith(".xlsx"):
        output_path += ".xlsx"
        log_info(f"Додано розширення .xlsx до вихідного файлу Excel: {output_path}")
    df.to_excel(output_path, index=False, engine="openpyxl")
    if format_excel_file(output_path):
        log_debug(f"Форматування успішно застосовано до {output_path}")


def format_excel_file(excel_file_path):
    """
    Застосовує форматування до Excel файлу:
    1. Автоматично регулює ширину колонок відповідно до вмісту
    2. Підсвічує логічні колонки статусу (decoded, identical, valid):
       - True = світло-зелений
       - False = світло-червоний

    Args:
        excel_file_path (str): Шлях до Excel файлу для форматування

    Returns:
        bool: True при успішному форматуванні, False у випадку помилки
    """
    try:
        wb = load_workbook(excel_file_path)
        ws = wb.active

        light_red = PatternFill(start_color="FFCCCC", end_color="FFCCCC", fill_type="solid")
        light_green = PatternFill(start_color="CCFFCC", end_color="CCFFCC", fill_type="solid")

        headers = [cell.value for cell in ws[1]]
        status_columns = [idx for idx, header in enumerate(headers, start=1)
                          if header in ("decoded", "identical", "valid")]

        for col_idx in status_columns:
            col_letter = get_column_letter(col_idx)
            for row in range(2, ws.max_row + 1):
                cell = ws[f"{col_letter}{row}"]
                if cell.value is True:
                    cell.fill = light_green
                elif cell.value is False:
                    cell.fill = light_red

        for idx, column_cells in enumerate(ws.columns, start=1):
            length = max((len(str(cell.value)) for cell in column_cells if cell.value is not None), default=0)
            ws.column_dimensions[get_column_letter(idx)].width = length + 2

        wb.save(excel_file_path)
        return True
    except Exception as e:
        log_info(f"Помилка при форматуванні Excel файлу: {e}")
        return False

