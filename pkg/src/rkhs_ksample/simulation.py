"""Samplers and the Monte Carlo power / null-distribution harness."""
from __future__ import annotations

import enum
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DegenerateKernelMatrix, InvalidParameters
from .inference import check_alpha, decide, std_normal_cdf
from .kernels import KernelSpec
from .sample import MIN_GROUP_SIZE, MultiSample
from .statistic import RegularizationPolicy, statistic


class Family(str, enum.Enum):
    NORMAL = "normal"
    GAMMA = "gamma"
    BETA = "beta"
    UNIFORM = "uniform"


# parameter names per family, in positional order
PARAMS = {
    Family.NORMAL: ("loc", "var"),
    Family.GAMMA: ("shape", "rate"),
    Family.BETA: ("a", "b"),
    Family.UNIFORM: ("lo", "hi"),
}


@dataclass(frozen=True)
class DistSpec:
    """A univariate sampling distribution.

    Normal's second parameter is the variance: ``DistSpec.normal(0, 4)``
    has standard deviation 2. Gamma uses shape and rate (mean shape/rate).
    """

    family: Family
    params: tuple[float, float]

    def __post_init__(self):
        fam = Family(self.family)
        object.__setattr__(self, "family", fam)
        p = tuple(float(v) for v in self.params)
        if len(p) != 2 or not all(math.isfinite(v) for v in p):
            raise InvalidParameters(f"{fam.value}: expected two finite parameters, got {self.params!r}")
        object.__setattr__(self, "params", p)
        a, b = p
        if fam is Family.NORMAL and not b > 0:
            raise InvalidParameters(f"normal variance must be > 0, got {b}")
        if fam in (Family.GAMMA, Family.BETA) and not (a > 0 and b > 0):
            raise InvalidParameters(f"{fam.value} parameters must be > 0, got {p}")
        if fam is Family.UNIFORM and not a < b:
            raise InvalidParameters(f"uniform needs lo < hi, got {p}")

    @classmethod
    def normal(cls, loc, var):
        return cls(Family.NORMAL, (loc, var))

    @classmethod
    def gamma(cls, shape, rate):
        return cls(Family.GAMMA, (shape, rate))

    @classmethod
    def beta(cls, a, b):
        return cls(Family.BETA, (a, b))

    @classmethod
    def uniform(cls, lo, hi):
        return cls(Family.UNIFORM, (lo, hi))

    @property
    def mean(self) -> float:
        a, b = self.params
        return {
            Family.NORMAL: a,
            Family.GAMMA: a / b,
            Family.BETA: a / (a + b),
            Family.UNIFORM: 0.5 * (a + b),
        }[self.family]

    @property
    def var(self) -> float:
        a, b = self.params
        return {
            Family.NORMAL: b,
            Family.GAMMA: a / b**2,
            Family.BETA: a * b / ((a + b) ** 2 * (a + b + 1)),
            Family.UNIFORM: (b - a) ** 2 / 12,
        }[self.family]

    def to_dict(self) -> dict:
        return {"family": self.family.value, **dict(zip(PARAMS[self.family], self.params))}

    @classmethod
    def from_dict(cls, d: dict) -> "DistSpec":
        try:
            fam = Family(str(d["family"]).lower())
            names = PARAMS[fam]
            return cls(fam, tuple(d[name] for name in names))
        except (KeyError, ValueError, TypeError) as exc:
            raise InvalidParameters(f"bad distribution entry {d!r}: {exc}") from None

    def __str__(self):
        label = {"normal": "N", "gamma": "Gamma", "beta": "Beta", "uniform": "Uniform"}
        return f"{label[self.family.value]}({self.params[0]:g},{self.params[1]:g})"


def sample_dist(spec: DistSpec, count: int, rng: np.random.Generator) -> np.ndarray:
    if count < 1:
        raise InvalidParameters(f"count must be >= 1, got {count}")
    a, b = spec.params
    if spec.family is Family.NORMAL:
        return rng.normal(a, math.sqrt(b), size=count)
    if spec.family is Family.GAMMA:
        return rng.gamma(a, 1.0 / b, size=count)
    if spec.family is Family.BETA:
        return rng.beta(a, b, size=count)
    return rng.uniform(a, b, size=count)


@dataclass(frozen=True)
class CaseSpec:
    name: str
    dists: tuple[DistSpec, ...]

    def __post_init__(self):
        object.__setattr__(self, "dists", tuple(self.dists))
        if len(self.dists) < 2:
            raise InvalidParameters(f"case {self.name!r} needs at least 2 distributions")

    @property
    def k(self) -> int:
        return len(self.dists)

    def to_dict(self) -> dict:
        return {"name": self.name, "dists": [d.to_dict() for d in self.dists]}

    @classmethod
    def from_dict(cls, d: dict) -> "CaseSpec":
        try:
            dists = tuple(DistSpec.from_dict(x) for x in d["dists"])
        except (KeyError, TypeError) as exc:
            raise InvalidParameters(f"bad case description: {exc}") from None
        return cls(str(d.get("name", "custom")), dists)

    @classmethod
    def from_json(cls, path) -> "CaseSpec":
        with open(path, encoding="utf-8") as fh:
            try:
                return cls.from_dict(json.load(fh))
            except json.JSONDecodeError as exc:
                raise InvalidParameters(f"{path}: invalid JSON ({exc})") from None


_N = DistSpec.normal
CASES = {
    "1": CaseSpec("case1", (_N(3, 1), DistSpec.gamma(3, 1), DistSpec.gamma(6, 2))),
    "2": CaseSpec("case2", (_N(0, 1), _N(0, 2), _N(0, 4))),
    "3": CaseSpec("case3", (DistSpec.uniform(0, 1), DistSpec.beta(1, 1.5), DistSpec.beta(1.5, 1))),
    "4": CaseSpec("case4", (_N(0, 1), _N(0.3, 1), _N(0.6, 1))),
    "null": CaseSpec("null", (_N(0, 1), _N(0, 1), _N(0, 1))),
}


def builtin_case(name: str) -> CaseSpec:
    key = str(name).lower().removeprefix("case")
    if key not in CASES:
        raise InvalidParameters(f"unknown case {name!r}; choose from {sorted(CASES)}")
    return CASES[key]


def equal_split(n_total: int, k: int) -> tuple[int, ...]:
    """Split ``n_total`` into ``k`` near-equal sizes, remainder to the first groups."""
    base, rem = divmod(n_total, k)
    sizes = tuple(base + (1 if j < rem else 0) for j in range(k))
    if min(sizes) < MIN_GROUP_SIZE:
        raise InvalidParameters(
            f"n_total={n_total} gives groups {sizes}; every group needs >= {MIN_GROUP_SIZE}"
        )
    return sizes


def replication_rng(master_seed: int, n_total: int, rep: int) -> np.random.Generator:
    """Independent Philox stream keyed by ``(master_seed, n_total, rep)``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([master_seed, n_total, rep])))


def draw_case(case: CaseSpec, sizes: Sequence[int], rng: np.random.Generator) -> MultiSample:
    groups = tuple(sample_dist(d, nj, rng) for d, nj in zip(case.dists, sizes))
    return MultiSample(tuple(f"g{j + 1}" for j in range(case.k)), groups)


@dataclass(frozen=True)
class PowerRow:
    n_total: int
    allocation: tuple[int, ...]
    replications: int
    rejections: int

    @property
    def power(self) -> float:
        return self.rejections / self.replications

    @property
    def mc_se(self) -> float:
        p = self.power
        return math.sqrt(p * (1 - p) / self.replications)


@dataclass
class PowerCurve:
    rows: list[PowerRow]
    case: CaseSpec
    seed: int
    alpha: float
    kernel: KernelSpec
    policy: RegularizationPolicy

    def power(self, n_total: int) -> float:
        for row in self.rows:
            if row.n_total == n_total:
                return row.power
        raise KeyError(n_total)

    def to_csv(self) -> str:
        k = self.case.k
        lines = [",".join(["n_total", *(f"n{j + 1}" for j in range(k)),
                           "replications", "rejections", "power", "mc_se"])]
        for r in self.rows:
            lines.append(",".join(map(str, [r.n_total, *r.allocation, r.replications,
                                            r.rejections, repr(r.power), repr(r.mc_se)])))
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        return {
            "case": self.case.to_dict(),
            "seed": self.seed,
            "alpha": self.alpha,
            "kernel": self.kernel.to_dict(),
            "gamma": self.policy.describe(),
            "allocation_rule": "equal-split",
            "rows": [
                {
                    "n_total": r.n_total,
                    "allocation": list(r.allocation),
                    "replications": r.replications,
                    "rejections": r.rejections,
                    "power": r.power,
                    "mc_se": r.mc_se,
                }
                for r in self.rows
            ],
        }


def _map(fn, items, workers: int):
    # executor.map yields results in submission order whatever the completion order
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _replicate(case, sizes, n_total, reps, master_seed, kernel, policy, workers):
    def one(r):
        sample = draw_case(case, sizes, replication_rng(master_seed, n_total, r))
        try:
            return statistic(sample, kernel, policy)
        except DegenerateKernelMatrix as exc:
            raise DegenerateKernelMatrix(f"n={n_total}, replication {r}: {exc}") from exc

    return _map(one, range(reps), workers)


def _check_reps(replications: int) -> int:
    if int(replications) < 1:
        raise InvalidParameters(f"replications must be >= 1, got {replications}")
    return int(replications)


def run_power_study(
    case: CaseSpec,
    n_grid: Sequence[int],
    alpha: float = 0.05,
    replications: int = 500,
    master_seed: int = 0,
    kernel: KernelSpec | None = None,
    policy: RegularizationPolicy | None = None,
    workers: int = 1,
) -> PowerCurve:
    kernel = kernel or KernelSpec()
    policy = policy or RegularizationPolicy()
    alpha = check_alpha(alpha)
    reps = _check_reps(replications)
    allocations = [equal_split(int(n), case.k) for n in n_grid]
    rows = []
    for n_total, sizes in zip(n_grid, allocations):
        stats = _replicate(case, sizes, int(n_total), reps, master_seed, kernel, policy, workers)
        rejections = sum(decide(b, alpha).reject for b in stats)
        rows.append(PowerRow(int(n_total), sizes, reps, rejections))
    return PowerCurve(rows, case, master_seed, alpha, kernel, policy)


def ks_distance_to_normal(values) -> float:
    """Kolmogorov-Smirnov sup distance between the empirical CDF and Phi."""
    x = np.sort(np.asarray(values, dtype=np.float64))
    m = x.size
    cdf = np.array([std_normal_cdf(v) for v in x])
    upper = np.arange(1, m + 1) / m - cdf
    lower = cdf - np.arange(0, m) / m
    return float(max(upper.max(), lower.max()))


@dataclass
class NullStudy:
    case: CaseSpec
    n_total: int
    allocation: tuple[int, ...]
    seed: int
    statistics: np.ndarray
    gammas: np.ndarray = field(repr=False)

    @property
    def summary(self) -> dict:
        s = self.statistics
        return {
            "case": self.case.name,
            "n_total": self.n_total,
            "allocation": list(self.allocation),
            "replications": int(s.size),
            "seed": self.seed,
            "gamma": float(self.gammas[0]),
            "mean": float(s.mean()),
            "variance": float(s.var(ddof=1)) if s.size > 1 else 0.0,
            "ks_distance": ks_distance_to_normal(s),
        }

    def to_lines(self) -> str:
        return "".join(f"{v!r}\n" for v in self.statistics.tolist())


def run_null_distribution_study(
    case: CaseSpec,
    n_total: int,
    replications: int = 300,
    master_seed: int = 0,
    kernel: KernelSpec | None = None,
    policy: RegularizationPolicy | None = None,
    workers: int = 1,
) -> NullStudy:
    """Replicate ``n * t_hat`` under a case whose distributions all coincide."""
    kernel = kernel or KernelSpec()
    policy = policy or RegularizationPolicy()
    reps = _check_reps(replications)
    if len(set(case.dists)) != 1:
        raise InvalidParameters(f"case {case.name!r} is not a null case: distributions differ")
    sizes = equal_split(int(n_total), case.k)
    stats = _replicate(case, sizes, int(n_total), reps, master_seed, kernel, policy, workers)
    return NullStudy(
        case=case,
        n_total=int(n_total),
        allocation=sizes,
        seed=master_seed,
        statistics=np.array([b.n_t_hat for b in stats]),
        gammas=np.array([b.gamma for b in stats]),
    )


def default_workers() -> int:
    return max(1, min(8, os.cpu_count() or 1))
