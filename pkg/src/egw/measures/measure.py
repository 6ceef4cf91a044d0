from dataclasses import dataclass

import numpy as np

import src.egw.constants as consts
from src.egw.exceptions import MeasureValidationError


@dataclass(frozen=True)
class Moments:
    m2: float
    m4: float


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """Weighted point cloud: sum_i weights[i] * delta(points[i])"""

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        points = np.array(self.points, dtype=np.float64)
        weights = np.array(self.weights, dtype=np.float64)

        if points.ndim == 1:
            points = points.reshape(-1, 1)
        if points.ndim != 2 or points.shape[0] < 1 or points.shape[1] < 1:
            raise MeasureValidationError("points must be a non-empty N x d array")
        if weights.shape != (points.shape[0],):
            raise MeasureValidationError(
                f"expected {points.shape[0]} weights, got shape {weights.shape}"
            )
        if not np.all(np.isfinite(points)):
            raise MeasureValidationError("points contain NaN or Inf coordinates")
        if not np.all(np.isfinite(weights)) or np.any(weights <= 0):
            raise MeasureValidationError("weights must be finite and > 0")
        if abs(weights.sum() - 1.0) > consts.WEIGHT_SUM_ATOL:
            raise MeasureValidationError("weights not normalized")

        points.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def from_raw(cls, points, intensities, drop_zero_mass: bool = False) -> "DiscreteMeasure":
        """Build a measure from unnormalized nonnegative intensities"""
        points = np.array(points, dtype=np.float64)
        intensities = np.array(intensities, dtype=np.float64)
        if points.ndim == 1:
            points = points.reshape(-1, 1)

        if not np.all(np.isfinite(intensities)) or np.any(intensities < 0):
            raise MeasureValidationError("intensities must be finite and >= 0")

        if drop_zero_mass:
            keep = intensities > 0
            points, intensities = points[keep], intensities[keep]
        elif np.any(intensities == 0):
            raise MeasureValidationError("zero-mass atoms found, use drop_zero_mass to drop them")

        total = intensities.sum()
        if total <= 0:
            raise MeasureValidationError("total mass is zero")

        return cls(points=points, weights=normalize(intensities / total))

    @property
    def n_atoms(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def mean(self) -> np.ndarray:
        return self.weights @ self.points

    @property
    def sq_norms(self) -> np.ndarray:
        return np.einsum("ij,ij->i", self.points, self.points)

    @property
    def norms(self) -> np.ndarray:
        return np.sqrt(self.sq_norms)

    def is_centered(self, atol: float = consts.CENTER_ATOL) -> bool:
        return bool(np.all(np.abs(self.mean) <= atol))

    def __eq__(self, other):
        if not isinstance(other, DiscreteMeasure):
            return NotImplemented
        return np.array_equal(self.points, other.points) and np.array_equal(
            self.weights, other.weights
        )

    def __hash__(self):
        return hash((self.points.tobytes(), self.weights.tobytes(), self.points.shape))


def normalize(weights: np.ndarray) -> np.ndarray:
    """Rescale weights so that their sum is 1 up to rounding"""
    weights = np.asarray(weights, dtype=np.float64)
    weights = weights / weights.sum()
    # one more pass absorbs the rounding left by the first division
    return weights / weights.sum()


def center(m: DiscreteMeasure) -> DiscreteMeasure:
    return DiscreteMeasure(points=m.points - m.mean, weights=m.weights)


def moments(m: DiscreteMeasure) -> Moments:
    sq_norms = m.sq_norms
    return Moments(m2=float(m.weights @ sq_norms), m4=float(m.weights @ sq_norms**2))


def rotation_matrix(degrees: float) -> np.ndarray:
    """Planar rotation; exact entries for multiples of 90 degrees"""
    quarter_turns, remainder = divmod(float(degrees), 90.0)
    if remainder == 0:
        cos, sin = [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)][int(quarter_turns) % 4]
    else:
        theta = np.deg2rad(degrees)
        cos, sin = np.cos(theta), np.sin(theta)

    return np.array([[cos, -sin], [sin, cos]])


def transform(
    m: DiscreteMeasure,
    rotation: np.ndarray = None,
    translation: np.ndarray = None,
    scale: float = 1.0,
    orthogonal: bool = True,
) -> DiscreteMeasure:
    """Map every atom x to scale * rotation @ x + translation; weights are kept"""
    if scale <= 0:
        raise MeasureValidationError("scale must be > 0")

    points = m.points
    if rotation is not None:
        rotation = np.atleast_2d(np.asarray(rotation, dtype=np.float64))
        if rotation.shape[1] != m.dim:
            raise MeasureValidationError(
                f"map expects dimension {rotation.shape[1]}, measure has {m.dim}"
            )
        if orthogonal:
            gram = rotation.T @ rotation
            if np.max(np.abs(gram - np.eye(m.dim))) > consts.ORTHOGONALITY_ATOL:
                raise MeasureValidationError("matrix declared orthogonal is not orthogonal")
        points = points @ rotation.T

    points = scale * points
    if translation is not None:
        translation = np.asarray(translation, dtype=np.float64).reshape(-1)
        if translation.shape[0] != points.shape[1]:
            raise MeasureValidationError("translation dimension does not match the mapped points")
        points = points + translation

    return DiscreteMeasure(points=points, weights=m.weights)
