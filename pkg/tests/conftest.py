import pytest

from eemx.dataset import bundled_gasoline


@pytest.fixture(scope="session")
def gasoline():
    ds = bundled_gasoline()
    if ds is None:
        pytest.skip("bundled gasoline data not found; set EEMX_DATA_DIR to its directory")
    return ds



def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("tests.test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
