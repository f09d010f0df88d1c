import numpy as np
import pytest

from kdvflow.spectral import BasisSpec, SpectralField


@pytest.fixture
def rng():
    return np.random.default_rng(20240613)


def random_field(spec: BasisSpec, rng, scale: float = 1.0) -> SpectralField:
    return SpectralField(spec, rng.uniform(-scale, scale, spec.dim))


@pytest.fixture
def spec8():
    return BasisSpec(40.0, 8)


@pytest.fixture
def spec_small():
    return BasisSpec(2.5, 3)
