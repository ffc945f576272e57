import numpy as np
import pytest

from rkhs_ksample import MultiSample


def random_sample(rng, sizes, d=1, scale=1.0):
    return MultiSample.from_groups([scale * rng.normal(size=(nj, d)) for nj in sizes])


def dyadic_sample(rng, sizes, d=1):
    """Points on a 2**-20 grid in [-3, 0.5), so adding 7.3 is exact."""
    groups = [np.round(rng.uniform(-3, 0.5, size=(nj, d)) * 2**20) / 2**20 for nj in sizes]
    return MultiSample.from_groups(groups)


def random_instances(seed, count):
    """Randomized instances: k in {2,3,4}, n_j in [3,15], d in {1,3}, both gamma branches."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        k = int(rng.integers(2, 5))
        sizes = tuple(int(v) for v in rng.integers(3, 16, size=k))
        d = int(rng.choice([1, 3]))
        gamma = (0.2, 0.01)[i % 2]
        out.append((random_sample(rng, sizes, d), gamma))
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


_acceptance = []


def pytest_runtest_logreport(report):
    if "test_acceptance.py" in report.nodeid and report.when == "call":
        _acceptance.append(report)
    elif "test_acceptance.py" in report.nodeid and report.when == "setup" and report.failed:
        _acceptance.append(report)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for rep in _acceptance:
        name = rep.nodeid.split("::", 1)[1]
        status = "PASS" if rep.passed else "FAIL"
        detail = ""
        if rep.failed and rep.longrepr is not None:
            crash = getattr(rep.longrepr, "reprcrash", None)
            detail = f"  ({crash.message.splitlines()[0]})" if crash else ""
        terminalreporter.write_line(f"{status}  {name}{detail}")
