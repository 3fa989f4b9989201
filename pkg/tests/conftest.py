import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from owlminer.turtle import load_turtle


@pytest.fixture(scope="session")
def books_path():
    import importlib.resources as resources

    return str(resources.files("owlminer.data") / "books.ttl")


@pytest.fixture(scope="session")
def books_graph(books_path):
    return load_turtle(books_path)


FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


@pytest.fixture(scope="session")
def ratings_path():
    return os.path.join(FIXTURES, "ratings.ttl")


@pytest.fixture(scope="session")
def cycle_path():
    return os.path.join(FIXTURES, "cycle.ttl")
