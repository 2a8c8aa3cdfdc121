import numpy as np
import pytest

from fracedge import kernels


@pytest.fixture(params=kernels.available_backends())
def backend(request):
    """Run a test once per kernel backend (pure Python, and native if built)."""
    previous = kernels.backend_name()
    kernels.set_backend(request.param)
    yield request.param
    kernels.set_backend(previous)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
