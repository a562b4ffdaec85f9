import numpy as np
import pytest

from ovnet.datasets import NestedCubeSpec, canonical_planes, generate_level_r, level_r_clusters

# criterion name -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict[str, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[name]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")


@pytest.fixture(scope="session")
def cube3():
    """3-D cube benchmark: 8 clusters, 4 classes, the three coordinate planes."""
    spec = NestedCubeSpec(n=3, r=1, seed=7)
    train, test = generate_level_r(spec)
    return canonical_planes(3, 1), level_r_clusters(3, 1, spec.radius), train, test


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def record():
    """Log one acceptance line; printed immediately and again in the summary."""

    def _record(name: str, ok: bool, detail: str):
        ACCEPTANCE[name] = (bool(ok), detail)
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
        return ok

    return _record
