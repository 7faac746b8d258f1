"""Shared fixtures and the acceptance summary printed at the end of a run."""

from __future__ import annotations

from collections import OrderedDict

import pytest

_ACCEPTANCE: "OrderedDict[int, list]" = OrderedDict()

TITLES = {
    1: "closed form vs quadrature, 100 draws per tabulated family",
    2: "Weibull(3.85819, 2.3409) alpha=1.5 theoretical dynamic values",
    3: "Weibull(5,1) alpha=1.5 static estimator bias/MSE, 10k reps",
    4: "Weibull(5,1) alpha=0.5 dynamic estimator bias signs and sizes, 10k reps",
    5: "bootstrap of 40 synthetic draws, bias at t=0.9 in [0.05, 0.15]",
    6: "property suite",
    7: "CLI CSV byte-identical across --threads",
}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, label): acceptance criterion check")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if report.when == "setup" and report.outcome == "passed":
        # module fixtures run the Monte Carlo studies; count their time once
        item._setup_seconds = report.duration
        return
    if report.when == "call" or report.when == "setup":
        number = marker.args[0]
        label = marker.args[1] if len(marker.args) > 1 else item.name
        detail = dict(report.user_properties).get("detail", "")
        seconds = report.duration + getattr(item, "_setup_seconds", 0.0)
        _ACCEPTANCE.setdefault(number, []).append((label, report.outcome, seconds, detail))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        checks = _ACCEPTANCE[number]
        ok = all(outcome == "passed" for _, outcome, _, _ in checks)
        seconds = sum(d for _, _, d, _ in checks)
        tr.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {TITLES.get(number, '')} ({seconds:.1f}s)")
        for label, outcome, duration, detail in checks:
            tr.write_line(f"    [{outcome}] {label}{': ' + detail if detail else ''}")
