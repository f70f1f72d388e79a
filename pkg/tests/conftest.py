import pytest

from cudfopt.model import parse_universe

MICRO = """\
package: p
version: 1
conflicts: p
installed: true

package: p
version: 2
conflicts: p

package: q
version: 1
conflicts: p (= 2)
installed: true

request:
install: p (= 2)
"""

# a satisfiable 2104-rule universe that the lexicographic engine cannot finish
# within a few seconds; used wherever a budget must run out
ANYTIME_ARGS = (8, 700, 5)
ANYTIME_KW = dict(dep_density=0.45, conflict_density=0.05, installed_fraction=0.5, absent_fraction=0.0)


@pytest.fixture
def micro():
    """p@1 installed, p@2 available, q@1 installed and conflicting with p@2."""
    return parse_universe(MICRO)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
