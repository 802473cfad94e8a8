import itertools
import random

import pytest
from hypothesis import settings

from polyclosure.structures import Structure, Vocabulary

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def random_structure(rng, vocab, n, density=0.4):
    rel = {}
    for sym in vocab:
        rel[sym.name] = [t for t in itertools.product(range(n), repeat=sym.arity) if rng.random() < density]
    return Structure(vocab, n, rel)


@pytest.fixture
def rng():
    return random.Random(12345)


@pytest.fixture
def graph_vocab():
    return Vocabulary.of(("E", 2))


ACCEPTANCE_LINES = []


def record_acceptance(number, ok, text, seconds, bound):
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {text} ({seconds:.1f}s, bound {bound}s)"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
