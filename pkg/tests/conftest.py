import pytest


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-window checks, opt-in via -m slow")


def pytest_collection_modifyitems(config, items):
    if config.getoption("-m"):
        return
    skip = pytest.mark.skip(reason="long-window check; run with -m slow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)
