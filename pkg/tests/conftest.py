"""Shared fixtures and the acceptance-criteria report."""

import numpy as np
import pytest

from zollfrei.profiles import GaussianMixture, OddMixture
from zollfrei.quadrature import QuadratureConfig
from zollfrei.twistor import f_to_h

ACCEPTANCE = {}


def record_acceptance(number, title, passed, detail):
    """Store the outcome of an acceptance criterion for the terminal summary."""
    ACCEPTANCE[number] = (title, bool(passed), detail)


@pytest.fixture(scope="session")
def cfg():
    return QuadratureConfig()


@pytest.fixture(scope="session")
def gauss():
    return GaussianMixture(((1.0, 1.0),))


@pytest.fixture(scope="session")
def zero_f():
    return GaussianMixture(())


@pytest.fixture(scope="session")
def zero_h():
    return OddMixture(())


@pytest.fixture(scope="session")
def odd_gauss():
    """``h(t) = i t exp(-t^2)``."""
    return OddMixture(((1.0, 1.0, 1),))


@pytest.fixture(scope="session")
def gauss_h(gauss, cfg):
    """Odd profile paired with the unit Gaussian."""
    return f_to_h(gauss, cfg)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, passed, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {number:>2}. {title}: {detail}")
