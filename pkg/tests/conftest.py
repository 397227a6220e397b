import sys

import numpy as np
import pytest

from hsmcast import load_table


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    # repeat the acceptance verdicts where they are visible without -s
    mod = sys.modules.get("test_acceptance")
    verdicts = getattr(mod, "VERDICTS", None) if mod else None
    if not verdicts:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for num, label, ok in sorted(verdicts):
        terminalreporter.write_line(
            f"criterion {num} ({label}): {'PASS' if ok else 'FAIL'}")


@pytest.fixture(scope="session")
def table():
    return load_table()


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)


def sub_rates_codes(table, n):
    # leading slice of the bundled table keeps both monotonicity properties
    return table.rates[:n], table.codes[:n]


def sub_table(table, n):
    from hsmcast.cqi import CqiTable

    return CqiTable(tuple(list(table)[:n]))
