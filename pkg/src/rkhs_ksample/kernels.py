"""Kernel functions on R^d and Gram-matrix assembly."""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InvalidParameters


class KernelFamily(str, enum.Enum):
    GAUSSIAN = "gaussian"


@dataclass(frozen=True)
class KernelSpec:
    """Translation-invariant kernel ``K(x, y) = exp(-scale * ||x - y||^2)``.

    The default scale of 2 gives ``exp(-2 (x - y)^2)`` in one dimension.
    Gaussian kernels are bounded by 1, so the sup-norm condition holds.
    """

    family: KernelFamily = KernelFamily.GAUSSIAN
    scale: float = 2.0

    def __post_init__(self):
        object.__setattr__(self, "family", KernelFamily(self.family))
        if not (np.isfinite(self.scale) and self.scale > 0):
            raise InvalidParameters(f"kernel scale must be positive, got {self.scale!r}")

    def to_dict(self) -> dict:
        return {"family": self.family.value, "scale": float(self.scale)}


def _as_points(points) -> np.ndarray:
    arr = np.asarray(points, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise DimensionMismatch(f"points must be a 2-d array (n, d), got shape {arr.shape}")
    return arr


def _from_sqdist(spec: KernelSpec, sqdist):
    if spec.family is KernelFamily.GAUSSIAN:
        return np.exp(-spec.scale * sqdist)
    raise NotImplementedError(spec.family)


def eval_kernel(spec: KernelSpec, x, y) -> float:
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    y = np.atleast_1d(np.asarray(y, dtype=np.float64))
    if x.shape != y.shape:
        raise DimensionMismatch(f"dimension mismatch: {x.shape} vs {y.shape}")
    diff = x - y
    return float(_from_sqdist(spec, np.dot(diff, diff)))


def gram(spec: KernelSpec, points) -> np.ndarray:
    """Gram matrix ``G[i, j] = K(p_i, p_j)`` for an ``(n, d)`` array of points.

    Squared distances are summed from coordinate differences, so shifting all
    points by an exactly representable offset leaves the matrix bit-identical.
    Only the upper triangle is evaluated; the lower one is a mirror copy.
    """
    x = _as_points(points)
    n = x.shape[0]
    if n < 1:
        raise DimensionMismatch("need at least one point")
    iu, ju = np.triu_indices(n, k=1)
    diff = x[iu] - x[ju]
    upper = _from_sqdist(spec, np.einsum("ij,ij->i", diff, diff))
    out = np.empty((n, n), dtype=np.float64)
    out[np.diag_indices(n)] = _from_sqdist(spec, np.zeros(n))
    out[iu, ju] = upper
    out[ju, iu] = upper
    return out
