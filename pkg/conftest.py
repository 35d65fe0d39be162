"""
pytest plugin for the relay AoI toolkit
"""
import pytest
import os
import sys

# Add src directory to path
sys.path.insert(0, os.path.join(os.path.dirname(os.path.abspath(__file__)), 'src'))


def pytest_addoption(parser):
    """Add command line options for the slow acceptance runs"""
    group = parser.getgroup('relay', 'Relay AoI acceptance runs')

    group.addoption(
        '--run-slow',
        action='store_true',
        default=False,
        help='Run slow tests (full N=7 solves and long simulations)'
    )


def pytest_collection_modifyitems(config, items):
    """Skip slow tests unless --run-slow is given"""
    if config.getoption('--run-slow'):
        return

    skip_slow = pytest.mark.skip(reason="needs --run-slow")
    for item in items:
        if 'slow' in item.keywords:
            item.add_marker(skip_slow)


def pytest_report_header(config):
    """Add slow-run info to pytest header"""
    return [f"Relay AoI slow tests: {'ENABLED' if config.getoption('--run-slow') else 'skipped'}"]
