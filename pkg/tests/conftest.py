import random

import pytest

from crq.core.generate import gen_random
from crq.core.tree import CrqTree

WORKED_EXAMPLE = ((1, 1), [((1, 0), [(7, 6), (2, 3), (4, 6)]), ((0, -1), [(2, 8), (3, 4)])])

# ranks and positions of a 15-node example shape; node i (1-based) is id i - 1
RANKED_CHILDREN = {1: [2, 3], 2: [4, 5], 3: [6, 7], 4: [8, 9], 6: [10, 11], 7: [12, 13], 9: [14, 15]}
RANKED_RANKS = [2, 1, 2, 1, 0, 1, 1, 0, 1, 0, 0, 0, 0, 0, 0]
RANKED_POSITIONS = [15, 14, 7, 12, 13, 3, 6, 11, 10, 1, 2, 4, 5, 8, 9]


def ranked_skeleton() -> list[list[int]]:
    return [[c - 1 for c in RANKED_CHILDREN.get(v + 1, [])] for v in range(15)]


@pytest.fixture
def worked() -> CrqTree:
    return CrqTree.from_nested(WORKED_EXAMPLE)


@pytest.fixture
def ranked() -> CrqTree:
    return gen_random(skeleton=ranked_skeleton(), d=2, seed=11, tie_free=True)


def random_tie_free(count: int, seed: int, n_max: int = 63, ds=(1, 2, 4), max_degree: int = 2):
    """Deterministic stream of tie-free trees with a valid node count."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        n = rng.randint(1, n_max)
        if (max_degree == 2 and n % 2 == 0) or n == 2:
            continue
        out.append(gen_random(n, d=rng.choice(ds), seed=rng.randrange(2**31), tie_free=True,
                              max_degree=max_degree))
    return out


def pytest_configure(config):
    config.acceptance_lines = []


def pytest_terminal_summary(terminalreporter, config):
    lines = getattr(config, "acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
