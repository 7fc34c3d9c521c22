import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "numerics", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("numerics")


@pytest.fixture(scope="session")
def universal_profile():
    from relscott.tf_atom import solve_universal_tf

    return solve_universal_tf()


@pytest.fixture(scope="session")
def neutral_atoms():
    from relscott import phase_space as ps
    from relscott.tf_atom import RadialGrid, solve_tf_atom

    law = ps.PressureLaw(ps.NONREL)
    return {Z: solve_tf_atom(Z, Z, law, RadialGrid.for_atom(Z)) for Z in (1.0, 10.0)}


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


_ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def acceptance():
    """Record one verdict per acceptance criterion; printed in the terminal summary."""

    def record(number: int, checks: dict[str, bool], detail: str = "") -> bool:
        ok = all(checks.values())
        failed = [k for k, v in checks.items() if not v]
        _ACCEPTANCE[number] = (ok, detail + (f" | failed: {', '.join(failed)}" if failed else ""))
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        ok, detail = _ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
