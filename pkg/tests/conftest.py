"""Shared fixtures: small grids and a seeded generator."""

from __future__ import annotations

import numpy as np
import pytest

from tricomi_lab.grids import GridSpec


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def grid2d():
    return GridSpec(n=2, L=8.0, N=32)


@pytest.fixture
def grid1d():
    return GridSpec(n=1, L=8.0, N=64)
