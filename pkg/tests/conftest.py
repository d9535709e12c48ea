import numpy as np
import pytest

from fopz.scripts.generate import random_dataset, random_formula
from fopz.services.dataset import Dataset, bind
from fopz.services.formula import parse


def make_instance(text, sets, free=None):
    """Bind formula text to raw sets, e.g. {"A": [[1], [5]]}."""
    return bind(parse(text), Dataset.create(sets, free))


def scalars(values):
    return [[v] for v in values]


def random_instance(rng, shape, n, d=1, bound=10, duplicates=False, **formula_args):
    text = random_formula(rng, shape, d=d, **formula_args)
    data = random_dataset(rng, len(shape), n, d, bound, duplicates=duplicates)
    return bind(parse(text), data)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
