"""Shared fixtures: the four bundled problem files, loaded once per session."""

from pathlib import Path

import pytest

from toricres import build_context, load_problem

PROBLEM_DIR = Path(__file__).resolve().parent.parent / "problems"

FIXTURE_NAMES = ("p1", "p2", "square_r2", "nonreflexive")


def problem_path(name):
    return PROBLEM_DIR / f"{name}.json"


@pytest.fixture(scope="session")
def p1():
    return build_context(load_problem(problem_path("p1")))


@pytest.fixture(scope="session")
def p2():
    return build_context(load_problem(problem_path("p2")))


@pytest.fixture(scope="session")
def square():
    return build_context(load_problem(problem_path("square_r2")))


@pytest.fixture(scope="session")
def nonreflexive():
    return build_context(load_problem(problem_path("nonreflexive")))


@pytest.fixture(scope="session")
def all_fixtures(p1, p2, square, nonreflexive):
    return {"p1": p1, "p2": p2, "square_r2": square, "nonreflexive": nonreflexive}
