import pytest

from hetnet_ee.config import load_preset
from hetnet_ee.network import derive


@pytest.fixture(scope="session")
def femto_light():
    params, powers, _ = load_preset("femto", "light")
    return params, powers


@pytest.fixture(scope="session")
def pico_light():
    params, powers, _ = load_preset("pico", "light")
    return params, powers


@pytest.fixture(scope="session")
def femto_model(femto_light):
    return derive(*femto_light)


_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def acceptance(request):
    """Record one PASS/FAIL line per acceptance criterion for the terminal summary."""
    lines = request.config.stash.setdefault(_ACCEPTANCE, [])

    def record(number: int, ok: bool, detail: str, table=()):
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        lines.append((number, line, list(table)))
        print("\n" + line)
        for row in table:
            print("    " + row)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for _, line, table in sorted(lines, key=lambda x: x[0]):
        terminalreporter.write_line(line)
        for row in table:
            terminalreporter.write_line("    " + row)
