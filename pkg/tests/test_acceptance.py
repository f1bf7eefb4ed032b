"""The ten acceptance criteria at full size and stated tolerances.

Each criterion is its own test; a PASS/FAIL line per criterion is written
to the terminal (and collected in a summary at the end of the session).
Run on its own with ``python tests/test_acceptance.py``.
"""

import json
import sys

import pytest

from zetaclt import acceptance

_LINES: dict = {}


@pytest.fixture(scope="module")
def reporter(request):
    tr = request.config.pluginmanager.getplugin("terminalreporter")
    yield tr
    if tr is not None and _LINES:
        tr.write_sep("=", "acceptance criteria")
        for k in sorted(_LINES):
            tr.write_line(_LINES[k])


@pytest.mark.slow
@pytest.mark.parametrize("number", sorted(acceptance.CRITERIA))
def test_criterion(number, reporter):
    r = acceptance.CRITERIA[number]()
    line = r.line()
    _LINES[number] = line
    print(line)
    print(json.dumps(r.to_dict()["measured"], default=str)[:2000])
    if reporter is not None:
        reporter.write_line("")
        reporter.write_line(line)
    assert r.passed, line


if __name__ == "__main__":
    results = acceptance.run()
    sys.exit(0 if all(r.passed for r in results) else 1)
