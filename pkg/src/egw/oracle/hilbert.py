import numpy as np


def _positive(x, name: str) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if not np.all(np.isfinite(x)) or np.any(x <= 0):
        raise ValueError(f"'{name}' must have finite entries > 0")
    return x


def hilbert_distance(x, y) -> float:
    """Hilbert projective metric: max log(x/y) - min log(x/y)"""
    x, y = _positive(x, "x"), _positive(y, "y")
    if x.shape != y.shape:
        raise ValueError(f"length mismatch: {x.shape[0]} != {y.shape[0]}")

    log_ratio = np.log(x) - np.log(y)
    return float(np.max(log_ratio) - np.min(log_ratio))


def hilbert_distance_log(log_x, log_y) -> float:
    """Same metric for vectors given by their logarithms"""
    log_ratio = np.asarray(log_x, dtype=np.float64) - np.asarray(log_y, dtype=np.float64)
    return float(np.max(log_ratio) - np.min(log_ratio))


def norm_bound(s, r) -> float:
    """Upper bound on d_H(s, r) from the Euclidean distance |s - r|_2

    Ties in the argmax/argmin of s/r go to the lowest index.
    """
    s, r = _positive(s, "s"), _positive(r, "r")
    ratio = s / r
    i_max = int(np.argmax(ratio))
    i_min = int(np.argmin(ratio))
    return float((1.0 / r[i_max] + 1.0 / s[i_min]) * np.linalg.norm(s - r))
