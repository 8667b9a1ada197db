import itertools
import math

import pytest

from oashrink.oa import from_rows, parity_check_array, replicate_and_shuffle

FIG1_ROWS = ["1000", "0100", "0010", "0001", "0111", "1011", "1101", "1110"]

_acceptance_lines: list[str] = []


def record_criterion(number: int, name: str, passed, detail: str = "") -> None:
    status = passed if isinstance(passed, str) else ("PASS" if passed else "FAIL")
    _acceptance_lines.append(f"[{status}] criterion {number}: {name}" + (f" ({detail})" if detail else ""))


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)


@pytest.fixture
def fig1():
    return from_rows(FIG1_ROWS, strength=3)


@pytest.fixture
def t2_instance():
    return replicate_and_shuffle(parity_check_array(2), 2, seed=7)


@pytest.fixture
def t3_instance():
    return replicate_and_shuffle(parity_check_array(3), 2, seed=7)


def brute_counts(rows, cols, s=2):
    """Tuple counts by plain enumeration over all s^t tuples; independent of the library."""
    rows = [tuple(r) for r in rows]
    return [
        sum(1 for r in rows if tuple(r[c] for c in cols) == tup)
        for tup in itertools.product(range(s), repeat=len(cols))
    ]


def brute_fitness(rows, mask, strength, target_index, s=2):
    """Two-loop Euclidean fitness over the kept rows."""
    kept = [r for r, m in zip(rows, mask) if not m]
    k = len(rows[0])
    total = 0
    for cols in itertools.combinations(range(k), strength):
        for c in brute_counts(kept, cols, s):
            total += (c - target_index) ** 2
    return math.sqrt(total)


def brute_is_oa(rows, strength, s=2):
    n = len(rows)
    if n % s**strength:
        return False
    lam = n // s**strength
    k = len(rows[0])
    return all(
        all(c == lam for c in brute_counts(rows, cols, s)) for cols in itertools.combinations(range(k), strength)
    )
