import numpy as np
import pytest

from cossum.model import EXAMPLE1, SamplingGrid, random_cosine_sum, sample

TABLE1_GRIDS = [(100, 20), (150, 30), (200, 40)]


@pytest.fixture
def example1_samples():
    return sample(EXAMPLE1, SamplingGrid(100, 20))


def random_instances(seed, count, max_M, K=10.0, min_cos_sep=0.02, extra=40):
    """Yield ``(truth, samples)`` pairs with ``N = 2M + extra``."""
    rng = np.random.default_rng(seed)
    for _ in range(count):
        M = int(rng.integers(1, max_M + 1))
        cs = random_cosine_sum(rng, M, K, min_cos_sep=min_cos_sep)
        yield cs, sample(cs, SamplingGrid(2 * M + extra, K))


def mixed_instances(seed, count, max_generic=5, K=10.0, n_grid=(1, 2), min_cos_sep=0.02):
    """Yield ``(truth, samples, grid_indices)`` with generic plus grid frequencies."""
    from cossum.model import CosineSum
    rng = np.random.default_rng(seed)
    for i in range(count):
        M1 = int(rng.integers(1, max_generic + 1))
        ng = n_grid[i % len(n_grid)]
        generic = random_cosine_sum(rng, M1, K, min_cos_sep=min_cos_sep)
        grid = SamplingGrid(2 * (M1 + ng) + 40, K)
        while True:
            ks = np.sort(rng.choice(np.arange(1, grid.N), size=ng, replace=False))
            phi = np.concatenate([generic.phi, ks * grid.grid_spacing])
            if np.min(np.diff(np.sort(np.cos(phi * grid.h)))) >= min_cos_sep:
                break
        gamma = np.concatenate([generic.gamma, rng.uniform(1.0, 4.0, ng)])
        cs = CosineSum(gamma, phi)
        yield cs, sample(cs, grid), ks.tolist()


def pytest_configure(config):
    for n in range(1, 11):
        config.addinivalue_line("markers", f"AC{n}: acceptance criterion {n}")


_acceptance = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    for key in report.keywords:
        if key.startswith("AC") and key[2:].isdigit():
            n = int(key[2:])
            status = "PASS" if report.outcome == "passed" else "FAIL"
            if hasattr(report, "wasxfail"):
                status = "FAIL (expected: " + report.wasxfail.replace("reason: ", "") + ")"
            if _acceptance.get(n, "PASS") == "PASS":
                _acceptance[n] = status


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_acceptance):
        terminalreporter.write_line(f"criterion {n:2d}: {_acceptance[n]}")
