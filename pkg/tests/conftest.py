import numpy as np
import pytest

from cmcdarboux import flat_family as ff
from cmcdarboux import surface as sf
from cmcdarboux.vacuum import vacuum_cylinder


@pytest.fixture(scope="session")
def grid():
    return sf.ConformalGrid.standard(64, 64)


@pytest.fixture(scope="session")
def vacuum(grid):
    return vacuum_cylinder(grid)


@pytest.fixture(scope="session")
def cyl(vacuum):
    return vacuum[0]


@pytest.fixture(scope="session")
def vac(vacuum):
    return vacuum[1]


@pytest.fixture(scope="session")
def family(cyl):
    """Family built from the analytic derivatives of the cylinder."""
    return ff.family_of(cyl, exact=True)


@pytest.fixture(scope="session")
def fd_family(cyl):
    """Family built from finite differences of the Gauss map only."""
    return ff.family_of(cyl, exact=False)


@pytest.fixture(scope="session")
def sections(family):
    cache = {}

    def get(mu, v=(1.0, 0.3 + 0.2j)):
        key = (complex(mu), tuple(complex(c) for c in v))
        if key not in cache:
            cache[key] = ff.parallel_section(family, mu, v)
        return cache[key]

    return get


def random_quaternion_matrix(rng, shape=()):
    from cmcdarboux import quatlib as ql

    a = rng.normal(size=shape + (4,))
    return ql.qmat(a[..., 0] + 1j * a[..., 1], a[..., 2] + 1j * a[..., 3])


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def acceptance_log(request):
    """List shared with the terminal summary; one line per criterion."""
    if not hasattr(request.config, "_acceptance_lines"):
        request.config._acceptance_lines = []
    return request.config._acceptance_lines


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", [])
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
