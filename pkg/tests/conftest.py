import random

import pytest
from hypothesis import strategies as st

ACCEPTANCE_LINES: list[str] = []


def random_word(rng: random.Random, genus: int, max_len: int = 20) -> tuple:
    n = rng.randint(0, max_len)
    return tuple(rng.choice([1, -1]) * rng.randint(1, 2 * genus) for _ in range(n))


def words(genus: int = 2, max_size: int = 12):
    letter = st.integers(1, 2 * genus).flatmap(lambda k: st.sampled_from([k, -k]))
    return st.lists(letter, max_size=max_size).map(tuple)


@pytest.fixture
def rng():
    return random.Random(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
