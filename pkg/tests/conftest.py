from contextlib import contextmanager

import pytest

ACCEPTANCE = {}


@pytest.fixture
def record():
    """Context manager recording a one-line verdict per acceptance
    criterion, printed in the terminal summary."""
    @contextmanager
    def _rec(n, desc):
        try:
            yield
        except pytest.skip.Exception as e:
            ACCEPTANCE[n] = ("SKIP", desc, str(e))
            raise
        except BaseException as e:
            ACCEPTANCE[n] = ("FAIL", desc, type(e).__name__)
            raise
        else:
            ACCEPTANCE[n] = ("PASS", desc, "")
    return _rec


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for n in sorted(ACCEPTANCE):
        status, desc, extra = ACCEPTANCE[n]
        line = f"criterion {n:2d} {status}: {desc}"
        if extra:
            line += f" ({extra})"
        terminalreporter.write_line(line)
