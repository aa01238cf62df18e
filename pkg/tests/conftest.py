import numpy as np
import pytest

from szegodet import make_map
from szegodet.symbol import symbol_from_coefficients, zero_symbol


@pytest.fixture(scope="session")
def circle():
    return make_map(1.0, 0.0, [0.0])


@pytest.fixture(scope="session")
def qcurve():
    """Ellipse-type quasicircle z + 0.5/z."""
    return make_map(1.0, 0.0, [0.5])


@pytest.fixture(scope="session")
def wobbly():
    """A nonsymmetric test curve with several tail terms."""
    return make_map(1.3, 0.2 + 0.1j, [0.3, 0.1j, -0.05, 0.02 + 0.02j])


@pytest.fixture
def zero_sym():
    return zero_symbol()


@pytest.fixture
def a1_sym():
    """Symbol with a_1 = 1, everything else zero (g o phi = cos theta)."""
    return symbol_from_coefficients(0.0, [1.0])


def q_energy_limit(q: float) -> float:
    """-0.5 sum_k log(1 - q**(2k)), truncated once q**(2k) < 1e-16."""
    total = 0.0
    k = 1
    while q ** (2 * k) >= 1e-16:
        total += -0.5 * np.log1p(-(q ** (2 * k)))
        k += 1
    return total
