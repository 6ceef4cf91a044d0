import json
import os

import numpy as np
import pandas as pd

from src.utils.logger import logger


FLOAT_FORMAT = "%.17g"


def format_float(value: float) -> str:
    return f"{value:.17g}"


def parse_float_list(values: list | str = None) -> list:
    if values is None:
        return []

    if isinstance(values, str):
        values = [x for x in values.split(",") if x.strip()]

    values = [float(x) for x in values]
    if not values:
        raise ValueError("Value list is empty!")

    return values


def parse_int_list(values: list | str = None) -> list:
    return [int(x) for x in parse_float_list(values)]


def get_eps_schedule(
    eps_list: list | str = None,
    eps_start: float = None,
    eps_factor: float = None,
    eps_count: int = None,
) -> list:
    if eps_list:
        schedule = parse_float_list(eps_list)
    else:
        if eps_start is None or eps_factor is None or eps_count is None:
            raise ValueError("Either 'eps_list' or 'eps_start/eps_factor/eps_count' is required")
        if eps_start <= 0:
            raise ValueError("'eps_start' must be > 0")
        if not 0 < eps_factor < 1:
            raise ValueError("'eps_factor' must be in (0, 1)")
        if eps_count < 1:
            raise ValueError("'eps_count' must be >= 1")
        schedule = [eps_start * eps_factor**i for i in range(eps_count)]

    if any(eps <= 0 for eps in schedule):
        raise ValueError("eps values must be > 0")
    if any(later >= earlier for earlier, later in zip(schedule, schedule[1:])):
        raise ValueError("eps schedule must be strictly decreasing")

    return schedule


def make_dirs(filename: str):
    path_dir = os.path.dirname(os.path.abspath(filename))
    os.makedirs(path_dir, exist_ok=True)


def write_json(data: dict, filename: str):
    make_dirs(filename)
    with open(filename, "w", encoding="utf-8") as f:
        json.dump(to_jsonable(data), f, indent=2, sort_keys=True)
        f.write("\n")
    logger.info(f"✅ Data has been saved to '{filename}'!")


def read_json(filename: str) -> dict:
    with open(filename, "r", encoding="utf-8") as f:
        return json.load(f)


def write_table(data: pd.DataFrame, filename: str):
    make_dirs(filename)
    if filename.endswith(".parquet"):
        data.to_parquet(filename, index=False)
    else:
        data.to_csv(filename, index=False, float_format=FLOAT_FORMAT)
    logger.info(f"✅ Data has been saved to '{filename}'!")


def read_table(filename: str) -> pd.DataFrame:
    if filename.endswith(".parquet"):
        return pd.read_parquet(filename)
    return pd.read_csv(filename, float_precision="round_trip")


def to_jsonable(value):
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, np.generic):
        return value.item()
    if hasattr(value, "value") and isinstance(getattr(value, "value"), str):
        return value.value
    return value
