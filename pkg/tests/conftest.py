import os

import pytest
from hypothesis import HealthCheck, settings

from folmmp import fixtures as fx
from folmmp.corpus import CorpusConfig, build_corpus
from folmmp.foliation import FoliatedPair, ToricFoliation

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=500, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def corpus():
    return build_corpus(CorpusConfig())


@pytest.fixture
def atiyah():
    f = fx.atiyah_delta1()
    return f, FoliatedPair.on(f, fx.atiyah_foliation())


@pytest.fixture
def atiyah_flop():
    f = fx.atiyah_delta1()
    return f, FoliatedPair.on(f, ToricFoliation.full(3))


@pytest.fixture
def p1xp1():
    f = fx.p1xp1()
    return f, FoliatedPair.on(f, fx.p1xp1_foliation())


ACCEPTANCE_LINES = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[ACCEPTANCE_LINES] = []


@pytest.fixture
def verdict(request, capsys):
    """Print and remember one PASS/FAIL line for an acceptance criterion."""
    def record(label: str, ok: bool, elapsed: float, limit: float, detail: str = "") -> None:
        line = f"{'PASS' if ok else 'FAIL'} {label} [{elapsed:.2f}s of {limit:g}s] {detail}".rstrip()
        request.config.stash[ACCEPTANCE_LINES].append(line)
        with capsys.disabled():
            print("\n" + line)
    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
