import numpy as np
import pytest

import nurbskit as nk


@pytest.fixture
def rng():
    return np.random.default_rng(987123654)


@pytest.fixture
def shell():
    return nk.quarter_cylinder_shell()


@pytest.fixture
def cylinder():
    return nk.circular_cylinder(radius=0.2, center=(0.5, 0.4), z_range=(0.0, 1.2))
