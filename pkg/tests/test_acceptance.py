"""Exit criteria. Each test prints one PASS/FAIL line in the terminal summary.

Monte Carlo criteria use master seed 2024; sizes and replication counts are
the ones the criteria state.
"""
import math
import subprocess
import sys
import time

import numpy as np
import pytest

from conftest import dyadic_sample, random_instances, random_sample
from rkhs_ksample import (
    CASES,
    DegenerateKernelMatrix,
    DistSpec,
    KernelSpec,
    MultiSample,
    RegularizationPolicy,
    contrast_vector,
    gamma_for,
    gram,
    oracle_statistic,
    sample_dist,
    statistic,
)
from rkhs_ksample.oracle import push_through_quadratic_form, woodbury_quadratic_form
from rkhs_ksample.simulation import run_null_distribution_study, run_power_study

K2 = KernelSpec()
SEED = 2024
REPS = 500


def rel(a, b):
    return abs(a - b) / max(1.0, abs(b))


@pytest.fixture(scope="module")
def instances():
    return random_instances(seed=1, count=100)


@pytest.fixture(scope="module")
def null_300():
    return run_power_study(CASES["null"], [300], alpha=0.05, replications=REPS,
                           master_seed=SEED, workers=4)


def test_c01_oracle_equivalence(instances):
    """fast path == dense oracle, 1e-8 relative, 100 instances, < 10 s"""
    start = time.perf_counter()
    worst = 0.0
    for s, gamma in instances:
        fast = statistic(s, K2, RegularizationPolicy.fixed(gamma))
        ref = oracle_statistic(s, K2, gamma)
        for a, b in ((fast.numerator_sum, ref.numerator_sum), (fast.ell, ref.ell), (fast.t_hat, ref.t_hat)):
            worst = max(worst, rel(a, b))
    elapsed = time.perf_counter() - start
    assert worst <= 1e-8, f"max relative deviation {worst:.3g}"
    assert elapsed < 10.0, f"took {elapsed:.1f}s"


def test_c02_ell_dual_route(instances):
    """trace-expansion ell^2 == sum lambda^2/(lambda+gamma)^2, 1e-8 relative, < 10 s"""
    start = time.perf_counter()
    worst = 0.0
    for s, gamma in instances:
        fast = statistic(s, K2, RegularizationPolicy.fixed(gamma))
        lam = oracle_statistic(s, K2, gamma).eigenvalues
        eig_route = float(np.sum(lam**2 / (lam + gamma) ** 2))
        worst = max(worst, abs(fast.ell**2 - eig_route) / max(1.0, eig_route))
    assert worst <= 1e-8
    assert time.perf_counter() - start < 10.0


def test_c03_push_through_vs_woodbury():
    """two quadratic-form routes agree to 1e-8 relative on 50 instances"""
    for s, gamma in random_instances(seed=3, count=50):
        layout = s.layout
        L = gram(K2, s.stacked())
        for j in range(layout.k):
            m = contrast_vector(layout, j)
            a = push_through_quadratic_form(layout, L, m, gamma)
            b = woodbury_quadratic_form(layout, L, m, gamma)
            assert abs(a - b) <= 1e-8 * max(1.0, abs(b))


def test_c04_gamma_schedule_exact():
    """gamma_n at 99, 100, 300, 301, 10000 exact to 1 ulp"""
    auto = RegularizationPolicy.schedule()
    for n, expected in [(99, 0.2), (100, 0.01), (300, 0.01), (301, 301 ** -0.25), (10000, 0.1)]:
        got = gamma_for(auto, n)
        assert abs(got - expected) <= math.ulp(expected), (n, got)


def test_c05_null_level(null_300):
    """null case, n=(100,100,100), alpha=0.05, 500 reps: rejection rate in [0.02, 0.10]"""
    rate = null_300.power(300)
    print(f"null rejection rate at n=300: {rate}")
    assert 0.02 <= rate <= 0.10, f"null rejection rate {rate}"


def test_c06_null_normality_direction():
    """KS distance to Phi over 300 reps is smaller at n=900 than at n=90"""
    ks = {
        n: run_null_distribution_study(CASES["null"], n, 300, master_seed=SEED, workers=4).summary["ks_distance"]
        for n in (90, 900)
    }
    print(f"KS distances: {ks}")
    assert ks[900] < ks[90], f"KS(900)={ks[900]:.4f} vs KS(90)={ks[90]:.4f}"


@pytest.mark.parametrize("case", ["1", "2", "3", "4"])
def test_c07_power_trend(case, null_300):
    """power(300) > power(60), and power(300) >= null rate + 0.15"""
    curve = run_power_study(CASES[case], [60, 300], alpha=0.05, replications=REPS,
                            master_seed=SEED, workers=4)
    p60, p300 = curve.power(60), curve.power(300)
    null_rate = null_300.power(300)
    print(f"case {case}: power(60)={p60} power(300)={p300} null={null_rate}")
    assert p300 > p60, f"power(300)={p300} not above power(60)={p60}"
    assert p300 - null_rate >= 0.15, f"separation {p300 - null_rate:.3f} < 0.15"


@pytest.mark.parametrize(
    "spec",
    [DistSpec.normal(3, 1), DistSpec.gamma(3, 1), DistSpec.gamma(6, 2), DistSpec.gamma(0.7, 1.3),
     DistSpec.beta(1, 1.5), DistSpec.beta(1.5, 1), DistSpec.uniform(0, 1)],
    ids=str,
)
def test_c08_sampler_moments(spec):
    """10^5 draws: mean and variance within 6 Monte Carlo standard errors"""
    draws = 100_000
    x = sample_dist(spec, draws, np.random.default_rng(SEED))
    mean_se = math.sqrt(spec.var / draws)
    mu4 = np.mean((x - x.mean()) ** 4)
    var_se = math.sqrt((mu4 - x.var() ** 2) / draws)
    assert abs(x.mean() - spec.mean) <= 6 * mean_se
    assert abs(x.var(ddof=1) - spec.var) <= 6 * var_se


def test_c09_simulate_determinism():
    """cmd_simulate output byte-identical across runs and worker counts"""
    base = [sys.executable, "-m", "rkhs_ksample.cli", "simulate", "--case", "4",
            "--sizes", "60,150,300", "--reps", "100", "--seed", "1"]
    outputs = [
        subprocess.run(base + ["--workers", w], capture_output=True, check=True).stdout
        for w in ("1", "1", "4")
    ]
    assert outputs[0] == outputs[1] == outputs[2]
    assert len(outputs[0].decode().strip().splitlines()) == 4


def test_c10_invariances():
    """translation (bit-exact), group order (1e-10 relative), degenerate input error"""
    rng = np.random.default_rng(SEED)
    auto = RegularizationPolicy.schedule()
    for _ in range(25):
        k = int(rng.integers(2, 5))
        sizes = tuple(int(v) for v in rng.integers(3, 16, size=k))
        s = dyadic_sample(rng, sizes, d=int(rng.choice([1, 3])))
        base = statistic(s, K2, auto)
        assert statistic(s.shifted(7.3), K2, auto) == base
        perm = rng.permutation(k)
        other = statistic(s.reorder(list(perm)), K2, auto)
        assert abs(other.t_hat - base.t_hat) <= 1e-10 * abs(base.t_hat)
    flat = MultiSample.from_groups([np.full(5, 2.0), np.full(6, 2.0), np.full(4, 2.0)])
    with pytest.raises(DegenerateKernelMatrix):
        statistic(flat, K2, auto)
    assert math.isnan(oracle_statistic(flat, K2, 0.2).t_hat)
