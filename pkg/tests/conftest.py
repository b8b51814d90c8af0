import random
import time

import pytest

ACCEPTANCE_LINES: list[str] = []


def random_point_sets(count: int, seed: int = 7, max_points: int = 8, box: int = 4):
    """Full dimensional point sets in dims 2 and 3 with at most ``max_points`` points."""
    from oracles import affine_dim

    rng = random.Random(seed)
    out = []
    while len(out) < count:
        d = rng.choice((2, 3))
        k = rng.randint(d + 1, max_points)
        pts = {tuple(rng.randint(-box, box) for _ in range(d)) for _ in range(k)}
        if affine_dim(pts) == d:
            out.append(sorted(pts))
    return out


@pytest.fixture(scope="session")
def point_sets():
    return random_point_sets(120)


@pytest.fixture(scope="session")
def oracle_report(point_sets):
    """Per point set: problems found by each oracle comparison, plus total seconds."""
    import checks

    start = time.perf_counter()
    rows = [
        {
            "points": pts,
            "face_lattice": checks.face_lattice_problems(pts),
            "normal_fan": checks.normal_fan_problems(pts),
            "newton": checks.newton_problems(pts),
        }
        for pts in point_sets
    ]
    return rows, time.perf_counter() - start


@pytest.fixture(scope="session")
def acceptance():
    """Record one verdict line per acceptance criterion; printed at the end of the run."""

    def record(number: int, title: str, verdict: str, detail: str):
        line = f"criterion {number} [{verdict}] {title}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda x: int(x.split()[1])):
            terminalreporter.write_line(line)
