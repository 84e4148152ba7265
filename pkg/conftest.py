import pytest


def pytest_addoption(parser):
    parser.addoption("--slow", action="store_true", default=False, help="run the exhaustive slow sweeps")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: exhaustive sweep, needs --slow")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--slow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --slow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)
