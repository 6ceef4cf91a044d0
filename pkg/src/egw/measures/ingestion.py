"""
Measure files and raster images.

JSON: {"dim": d, "points": [[...], ...], "weights": [...], "raw_weights": bool}
CSV:  header w,x1,...,xd and one row per atom
Raster: header-less CSV grid or .npy array of nonnegative intensities
"""

import json
import os

import numpy as np
import pandas as pd
from scipy import ndimage

import src.egw.constants as consts
from src.egw.exceptions import MeasureValidationError
from src.egw.measures.measure import DiscreteMeasure, normalize, rotation_matrix, transform
from src.utils.io import FLOAT_FORMAT, make_dirs, read_json
from src.utils.logger import logger


def from_weights(
    points,
    weights,
    raw_weights: bool = False,
    drop_zero_mass: bool = False,
) -> DiscreteMeasure:
    if raw_weights:
        return DiscreteMeasure.from_raw(points, weights, drop_zero_mass=drop_zero_mass)

    weights = np.asarray(weights, dtype=np.float64)
    if drop_zero_mass:
        points = np.asarray(points, dtype=np.float64)
        keep = weights != 0
        points, weights = points[keep], weights[keep]

    if weights.size == 0:
        raise MeasureValidationError("measure has no atoms")
    if not np.all(np.isfinite(weights)) or np.any(weights <= 0):
        raise MeasureValidationError("weights must be finite and > 0")
    if abs(weights.sum() - 1.0) > consts.FILE_WEIGHT_SUM_ATOL:
        raise MeasureValidationError("weights not normalized")

    return DiscreteMeasure(points=points, weights=normalize(weights))


def read_measure_json(filename: str) -> dict:
    try:
        data = read_json(filename)
    except json.JSONDecodeError as e:
        raise MeasureValidationError(f"cannot parse '{filename}': {e}") from e

    if not isinstance(data, dict) or "points" not in data or "weights" not in data:
        raise MeasureValidationError(f"'{filename}' must define 'points' and 'weights'")

    points = np.asarray(data["points"], dtype=np.float64)
    if points.ndim == 1:
        points = points.reshape(-1, 1)
    dim = data.get("dim")
    if dim is not None and points.ndim == 2 and points.shape[1] != dim:
        raise MeasureValidationError(f"'dim' is {dim} but points have {points.shape[1]} columns")

    return {
        "points": points,
        "weights": data["weights"],
        "raw_weights": bool(data.get("raw_weights", False)),
    }


def read_measure_csv(filename: str) -> dict:
    try:
        df = pd.read_csv(filename, float_precision="round_trip")
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise MeasureValidationError(f"cannot parse '{filename}': {e}") from e

    columns = list(df.columns)
    expected = ["w"] + [f"x{i}" for i in range(1, len(columns))]
    if len(columns) < 2 or columns != expected:
        raise MeasureValidationError(f"'{filename}' header must be {','.join(expected)}")

    try:
        values = df.to_numpy(dtype=np.float64)
    except ValueError as e:
        raise MeasureValidationError(f"non-numeric values in '{filename}'") from e

    return {"points": values[:, 1:], "weights": values[:, 0], "raw_weights": False}


def load_measure(
    filename: str,
    renormalize: bool = False,
    drop_zero_mass: bool = False,
) -> DiscreteMeasure:
    """Load and validate a measure file (.json or .csv)"""
    if not os.path.exists(filename):
        raise FileNotFoundError(f"File '{filename}' does not exist.")

    if filename.endswith(".json"):
        data = read_measure_json(filename)
    elif filename.endswith(".csv"):
        data = read_measure_csv(filename)
    else:
        raise MeasureValidationError(f"unsupported measure format: '{filename}'")

    try:
        measure = from_weights(
            points=data["points"],
            weights=data["weights"],
            raw_weights=data["raw_weights"] or renormalize,
            drop_zero_mass=drop_zero_mass,
        )
    except ValueError as e:
        raise MeasureValidationError(f"{filename}: {e}") from e

    logger.debug(f"Loaded {measure.n_atoms} atoms in R^{measure.dim} from '{filename}'")
    return measure


def save_measure(m: DiscreteMeasure, filename: str):
    make_dirs(filename)
    if filename.endswith(".json"):
        data = {
            "dim": m.dim,
            "points": m.points.tolist(),
            "weights": m.weights.tolist(),
            "raw_weights": False,
        }
        with open(filename, "w", encoding="utf-8") as f:
            json.dump(data, f, indent=2)
    elif filename.endswith(".csv"):
        columns = ["w"] + [f"x{i}" for i in range(1, m.dim + 1)]
        values = np.column_stack([m.weights, m.points])
        pd.DataFrame(values, columns=columns).to_csv(
            filename, index=False, float_format=FLOAT_FORMAT
        )
    else:
        raise MeasureValidationError(f"unsupported measure format: '{filename}'")


def load_raster(filename: str) -> np.ndarray:
    if not os.path.exists(filename):
        raise FileNotFoundError(f"File '{filename}' does not exist.")

    try:
        if filename.endswith(".npy"):
            grid = np.load(filename)
        else:
            grid = pd.read_csv(filename, header=None, float_precision="round_trip").to_numpy(
                dtype=np.float64
            )
    except ValueError as e:
        raise MeasureValidationError(f"cannot read raster '{filename}': {e}") from e

    grid = np.asarray(grid, dtype=np.float64)
    if grid.ndim != 2:
        raise MeasureValidationError(f"raster '{filename}' must be a 2-D grid")
    if max(grid.shape) > consts.RASTER_MAX_SIDE:
        logger.warning(
            f"Raster '{filename}' is {grid.shape[0]}x{grid.shape[1]}, larger than"
            f" {consts.RASTER_MAX_SIDE}x{consts.RASTER_MAX_SIDE}; solves may be slow"
        )

    return grid


def rotate_raster(grid: np.ndarray, degrees: float) -> np.ndarray:
    """Rotate counterclockwise; multiples of 90 degrees are exact"""
    quarter_turns, remainder = divmod(float(degrees), 90.0)
    if remainder == 0:
        return np.rot90(grid, k=int(quarter_turns) % 4).copy()

    rotated = ndimage.rotate(grid, degrees, reshape=False, order=1, mode="constant", cval=0.0)
    return np.clip(rotated, 0.0, None)


def raster_to_measure(grid: np.ndarray, drop_zero_mass: bool = True) -> DiscreteMeasure:
    """Pixel intensities as raw weights on a pixel-center grid"""
    grid = np.asarray(grid, dtype=np.float64)
    if grid.ndim != 2:
        raise MeasureValidationError("raster must be a 2-D grid")

    n_rows, n_cols = grid.shape
    rows, cols = np.meshgrid(np.arange(n_rows), np.arange(n_cols), indexing="ij")
    # image axes: x to the right, y upwards, origin at the grid center
    points = np.column_stack(
        [(cols - (n_cols - 1) / 2).ravel(), ((n_rows - 1) / 2 - rows).ravel()]
    )

    return DiscreteMeasure.from_raw(points, grid.ravel(), drop_zero_mass=drop_zero_mass)


def rotate_measure(m: DiscreteMeasure, degrees: float) -> DiscreteMeasure:
    return transform(m, rotation=rotation_matrix(degrees))
