"""Regularized kernel k-sample statistic via n x n Gram-matrix algebra.

Feature-space objects are never formed. With ``L`` the pooled Gram matrix,
``N`` the block-diagonal within-group centering projection and
``A = N' L N``, the pooled within-group covariance has the same nonzero
spectrum as ``A / n``. Each group's regularized discrepancy reduces, through
the matrix inversion lemma, to one solve against ``gamma I + A / n``. That
matrix is shared by all groups and is factored once.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DegenerateKernelMatrix, NumericalFailure, ShapeMismatch
from .kernels import KernelSpec, gram
from .sample import GroupLayout, MultiSample

ELL_EPS = 1e-12


class RegularizationMode(str, enum.Enum):
    PAPER_SCHEDULE = "paper-schedule"
    FIXED = "fixed"


@dataclass(frozen=True)
class RegularizationPolicy:
    mode: RegularizationMode = RegularizationMode.PAPER_SCHEDULE
    value: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "mode", RegularizationMode(self.mode))
        if self.mode is RegularizationMode.FIXED:
            if self.value is None or not (math.isfinite(self.value) and self.value > 0):
                raise ValueError(f"fixed gamma must be positive, got {self.value!r}")

    @classmethod
    def fixed(cls, gamma: float) -> "RegularizationPolicy":
        return cls(RegularizationMode.FIXED, float(gamma))

    @classmethod
    def schedule(cls) -> "RegularizationPolicy":
        return cls()

    def describe(self) -> str:
        if self.mode is RegularizationMode.FIXED:
            return f"fixed({self.value!r})"
        return "auto"


def gamma_for(policy: RegularizationPolicy, n: int) -> float:
    """Ridge parameter for total sample size ``n``.

    The automatic schedule is 0.2 for n < 100, 0.01 for 100 <= n <= 300 and
    n ** -0.25 beyond.
    """
    if n < 1:
        raise ValueError(f"sample size must be >= 1, got {n}")
    if policy.mode is RegularizationMode.FIXED:
        return float(policy.value)
    if n < 100:
        return 0.2
    if n <= 300:
        return 0.01
    return float(n) ** -0.25


def contrast_vector(layout: GroupLayout, j: int) -> np.ndarray:
    """Coefficients ``m`` with ``mean_j - pooled mean = sum_i m_i K(x_i, .)``.

    ``j`` is 0-based.
    """
    if not 0 <= j < layout.k:
        raise IndexError(f"group index {j} out of range for k={layout.k}")
    n = layout.n
    m = np.full(n, -1.0 / n)
    m[layout.block(j)] = 1.0 / layout.sizes[j] - 1.0 / n
    return m


def center_apply(layout: GroupLayout, M) -> np.ndarray:
    """Apply the block centering projection ``N`` to the rows of ``M``.

    Every group's block of rows has its column means subtracted. ``N`` is
    symmetric, so this is also ``N' M``.
    """
    M = np.asarray(M, dtype=np.float64)
    vector = M.ndim == 1
    if vector:
        M = M[:, None]
    if M.ndim != 2 or M.shape[0] != layout.n:
        raise ShapeMismatch(f"expected {layout.n} rows, got shape {M.shape}")
    out = np.empty_like(M)
    for blk in layout.blocks():
        out[blk] = M[blk] - M[blk].mean(axis=0)
    return out[:, 0] if vector else out


def centered_gram(layout: GroupLayout, L: np.ndarray) -> np.ndarray:
    """``N' L N``, symmetrized exactly."""
    A = center_apply(layout, center_apply(layout, L).T)
    return 0.5 * (A + A.T)


@dataclass(frozen=True)
class StatisticBreakdown:
    per_group_terms: tuple[float, ...]
    numerator_sum: float
    ell: float
    gamma: float
    t_hat: float
    n_t_hat: float
    n: int
    sizes: tuple[int, ...]


def _trace_ell_squared(A: np.ndarray, chol, n: int, gamma: float) -> float:
    # M = (I + A/(n gamma))^-1 = gamma (gamma I + A/n)^-1
    A2 = A @ A
    MA = gamma * scipy.linalg.cho_solve(chol, A)
    MA_sq = MA @ MA
    # tr(XY) = sum(X * Y') and A2 is symmetric
    t1 = np.sum(A * A)
    t2 = np.sum(MA * A2)
    t3 = np.sum(MA_sq * A2)
    ng = n * gamma
    return t1 / ng**2 - 2.0 * t2 / ng**3 + t3 / ng**4


def statistic_from_gram(layout: GroupLayout, L: np.ndarray, gamma: float) -> StatisticBreakdown:
    n = layout.n
    if L.shape != (n, n):
        raise ShapeMismatch(f"Gram matrix shape {L.shape} does not match n={n}")
    if not np.isfinite(L).all():
        raise NumericalFailure("non-finite entries in the Gram matrix")
    A = centered_gram(layout, L)
    try:
        chol = scipy.linalg.cho_factor(gamma * np.eye(n) + A / n, lower=True)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"Cholesky factorization failed: {exc}") from exc

    terms = []
    for j, nj in enumerate(layout.sizes):
        m = contrast_vector(layout, j)
        Lm = L @ m
        u = center_apply(layout, Lm)
        quad = m @ Lm - (u @ scipy.linalg.cho_solve(chol, u)) / n
        terms.append(float(nj / (n * gamma) * quad))
    numerator = float(sum(terms))

    ell_sq = _trace_ell_squared(A, chol, n, gamma)
    if not math.isfinite(ell_sq):
        raise NumericalFailure("normalization factor is not finite")
    ell = math.sqrt(max(ell_sq, 0.0))
    if ell < ELL_EPS:
        raise DegenerateKernelMatrix(
            f"degenerate kernel matrix: normalization factor {ell:.3g} < {ELL_EPS:g}"
        )
    t_hat = numerator / (math.sqrt(2.0) * ell)
    return StatisticBreakdown(
        per_group_terms=tuple(terms),
        numerator_sum=numerator,
        ell=ell,
        gamma=float(gamma),
        t_hat=t_hat,
        n_t_hat=n * t_hat,
        n=n,
        sizes=layout.sizes,
    )


def statistic(
    sample: MultiSample,
    spec: KernelSpec | None = None,
    policy: RegularizationPolicy | None = None,
) -> StatisticBreakdown:
    spec = spec or KernelSpec()
    policy = policy or RegularizationPolicy()
    layout = sample.layout
    L = gram(spec, sample.stacked())
    return statistic_from_gram(layout, L, gamma_for(policy, layout.n))


def statistic_order_invariance_check(sample, spec, policy, permutation, rtol=1e-10) -> bool:
    """True iff ``t_hat`` is unchanged (to ``rtol``) when groups are reordered.

    ``permutation`` lists 1-based group indices in their new order.
    """
    base = statistic(sample, spec, policy).t_hat
    other = statistic(sample.reorder([p - 1 for p in permutation]), spec, policy).t_hat
    return abs(other - base) <= rtol * max(abs(base), np.finfo(float).tiny)
