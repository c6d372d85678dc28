import pathlib
import sys

import pytest

sys.path.insert(0, str(pathlib.Path(__file__).parent))

from wrebeca.cli import corpus_path
from wrebeca.parser import parse_model
from wrebeca.semantics import ModelRuntime


def load_corpus(name):
    return parse_model(corpus_path(name).read_text())


@pytest.fixture(scope="session")
def corpus():
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = load_corpus(name)
        return cache[name]

    return get


@pytest.fixture(scope="session")
def runtimes(corpus):
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = ModelRuntime(corpus(name))
        return cache[name]

    return get


@pytest.fixture(scope="session")
def spaces(runtimes):
    """Shared exploration results, computed at most once per session."""
    from wrebeca.explorer import (explore_counter_abstraction, explore_full,
                                  explore_tau_eliminated)
    cache = {}

    def get(name, mode, **kwargs):
        key = (name, mode, tuple(sorted(kwargs.items())))
        if key not in cache:
            rt = runtimes(name)
            fn = {"full": explore_full,
                  "counter": explore_counter_abstraction,
                  "tau": explore_tau_eliminated}[mode]
            cache[key] = fn(rt, **kwargs)
        return cache[key]

    return get
