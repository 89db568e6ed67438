import os
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from monodromic.generate import GeneratorConfig, case_rng, random_datum
from monodromic.gluing import functor_G
from monodromic.linalg import Matrix

settings.register_profile("dev", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=300, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "dev"))

small_rationals = st.builds(Fraction, st.integers(-4, 4), st.integers(1, 3))


@st.composite
def matrices(draw, rows=None, cols=None, max_dim=4, elements=small_rationals):
    r = draw(st.integers(0, max_dim)) if rows is None else rows
    c = draw(st.integers(0, max_dim)) if cols is None else cols
    entries = draw(st.lists(st.lists(elements, min_size=c, max_size=c), min_size=r, max_size=r))
    return Matrix.from_rows(entries, c)


@st.composite
def square_matrices(draw, max_dim=4):
    n = draw(st.integers(0, max_dim))
    return draw(matrices(rows=n, cols=n))


@st.composite
def jordan_types(draw, max_total=6):
    """Partition of at most max_total into Jordan block sizes."""
    sizes, left = [], draw(st.integers(1, max_total))
    while left:
        k = draw(st.integers(1, left))
        sizes.append(k)
        left -= k
    return sizes


@st.composite
def gluing_data(draw, max_dim=4):
    """Valid gluing data from the seeded generator, with the seed drawn by hypothesis."""
    seed = draw(st.integers(0, 2 ** 32))
    return random_datum(case_rng(seed, 0), GeneratorConfig(seed=seed, max_dim=max_dim))


@st.composite
def cores(draw, max_dim=4):
    return functor_G(draw(gluing_data(max_dim))).core


ACCEPTANCE = pytest.StashKey[dict]()


@pytest.fixture
def acceptance(request):
    """record(number, title, ok, detail) for the acceptance summary."""
    lines = request.config.stash.setdefault(ACCEPTANCE, {})

    def record(number, title, ok, detail):
        lines[number] = f"criterion {number} {'PASS' if ok else 'FAIL'}: {title} [{detail}]"
    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(ACCEPTANCE, {})
    if lines:
        terminalreporter.section("acceptance criteria")
        for n in sorted(lines):
            terminalreporter.write_line(lines[n])
