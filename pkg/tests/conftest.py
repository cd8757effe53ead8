"""Shared fixtures and the acceptance summary.

Tests in test_acceptance.py carry ``@pytest.mark.criterion(n, title)``; their
outcomes are collected here and printed as one line per criterion at the end
of the run.
"""

import time

import pytest


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")
    config._acceptance = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call":
        return
    n, title = mark.args
    log = item.config._acceptance
    prev = log.get(n)
    ok = rep.passed and (prev is None or prev[1])
    secs = rep.duration + (prev[2] if prev else 0.0)
    log[n] = (title, ok, secs)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    log = getattr(config, "_acceptance", {})
    if not log:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(log):
        title, ok, secs = log[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {title}  ({secs:.1f} s)")


@pytest.fixture
def stopwatch():
    t0 = time.perf_counter()
    return lambda: time.perf_counter() - t0
