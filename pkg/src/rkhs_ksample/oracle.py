"""Slow dense reference computations used to cross-check the fast path.

Nothing here reuses the Cholesky/inversion-lemma route of ``statistic``.
The quadratic forms come from the push-through identity
``G'(gamma I + G B G')^-1 G = L (gamma I + B L)^-1``, which gives a
non-symmetric n x n system solved by pivoted LU. The normalization factor
comes from a full symmetric eigendecomposition.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import SingularSystem
from .kernels import KernelSpec, gram
from .sample import GroupLayout, MultiSample
from .statistic import ELL_EPS


@dataclass(frozen=True)
class OracleReport:
    numerator_sum: float
    ell: float
    t_hat: float
    eigenvalues: np.ndarray
    per_group_terms: tuple[float, ...] = ()

    @property
    def ell_squared(self) -> float:
        return self.ell**2


def dense_center_matrix(layout: GroupLayout) -> np.ndarray:
    n = layout.n
    N = np.zeros((n, n))
    for blk, nj in zip(layout.blocks(), layout.sizes):
        N[blk, blk] = np.eye(nj) - np.full((nj, nj), 1.0 / nj)
    return N


def _contrast(layout: GroupLayout, j: int) -> np.ndarray:
    # pooled-mean weights minus group-mean weights, written independently
    n = layout.n
    group_mean = np.zeros(n)
    group_mean[layout.block(j)] = 1.0 / layout.sizes[j]
    return group_mean - np.ones(n) / n


def oracle_from_gram(layout: GroupLayout, L: np.ndarray, gamma: float) -> OracleReport:
    n = layout.n
    N = dense_center_matrix(layout)
    system = gamma * np.eye(n) + (N @ N.T @ L) / n
    try:
        lu = scipy.linalg.lu_factor(system, check_finite=True)
    except (ValueError, np.linalg.LinAlgError) as exc:
        raise SingularSystem(str(exc)) from exc
    if np.any(np.abs(np.diag(lu[0])) == 0.0):
        raise SingularSystem("exactly singular system")

    terms = []
    for j, pj in enumerate(layout.proportions):
        m = _contrast(layout, j)
        terms.append(float(pj * (m @ L @ scipy.linalg.lu_solve(lu, m))))
    numerator = float(sum(terms))

    cov = N.T @ L @ N / n
    eig = np.sort(np.linalg.eigvalsh(0.5 * (cov + cov.T)))[::-1]
    ell = math.sqrt(float(np.sum(eig**2 / (eig + gamma) ** 2)))
    t_hat = numerator / (math.sqrt(2.0) * ell) if ell >= ELL_EPS else math.nan
    return OracleReport(
        numerator_sum=numerator,
        ell=ell,
        t_hat=t_hat,
        eigenvalues=eig,
        per_group_terms=tuple(terms),
    )


def oracle_statistic(sample: MultiSample, spec: KernelSpec, gamma: float) -> OracleReport:
    """Dense reference values for ``sample`` at a fixed ``gamma``.

    ``eigenvalues`` holds the full spectrum of ``N' L N / n`` in decreasing
    order. Its zero part is kept, so ``eigenvalues.sum()`` equals the trace.
    When ``ell`` falls below the degeneracy threshold, ``t_hat`` is NaN rather
    than raising.
    """
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma!r}")
    L = gram(spec, sample.stacked())
    return oracle_from_gram(sample.layout, L, gamma)


def woodbury_quadratic_form(layout: GroupLayout, L: np.ndarray, m: np.ndarray, gamma: float) -> float:
    """The inversion-lemma form ``(m'Lm - m'LN(gamma I + N'LN/n)^-1 N'Lm / n) / gamma``.

    Built with dense matrices and a general solver, for checking against
    the push-through route.
    """
    n = layout.n
    N = dense_center_matrix(layout)
    Lm = L @ m
    rhs = N.T @ Lm
    inner = np.linalg.solve(gamma * np.eye(n) + N.T @ L @ N / n, rhs)
    return float((m @ Lm - (Lm @ N) @ inner / n) / gamma)


def push_through_quadratic_form(layout: GroupLayout, L: np.ndarray, m: np.ndarray, gamma: float) -> float:
    n = layout.n
    N = dense_center_matrix(layout)
    return float(m @ L @ np.linalg.solve(gamma * np.eye(n) + N @ N.T @ L / n, m))


def max_relative_deviation(fast, ref) -> float:
    """Largest ``|fast - ref| / max(1, |ref|)`` over numerator, ell and t_hat."""
    pairs = [
        (fast.numerator_sum, ref.numerator_sum),
        (fast.ell, ref.ell),
        (fast.t_hat, ref.t_hat),
    ]
    return max(abs(a - b) / max(1.0, abs(b)) for a, b in pairs)
