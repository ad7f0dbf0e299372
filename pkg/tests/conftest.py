from __future__ import annotations

import random

import pytest

from malgebra.datasets import InstanceSampler


@pytest.fixture
def sampler() -> InstanceSampler:
    return InstanceSampler(seed=1234)


@pytest.fixture
def rng() -> random.Random:
    return random.Random(99)
