import cmath
import math

import numpy as np
import pytest

from qwire import TransferMatrix


def mod_pi_distance(a: float, b: float) -> float:
    """Circular distance between two phases identified modulo pi."""
    d = (a - b) % math.pi
    return min(d, math.pi - d)


def random_unimodular(rng: np.random.Generator, scale: float = 0.02, k: float = 1.0) -> TransferMatrix:
    """exp of a random traceless 2x2 complex matrix; det = e^{tr} = 1 exactly
    up to roundoff.  Small `scale` keeps long products representable."""
    x11, x12, x21 = (rng.normal(size=2) @ np.array([1.0, 1j]) * scale for _ in range(3))
    # traceless X => X^2 = (x11^2 + x12 x21) I and exp(X) = cosh(s) I + sinh(s)/s X
    s = cmath.sqrt(x11 * x11 + x12 * x21)
    if abs(s) < 1e-30:
        c, f = 1.0, 1.0
    else:
        c, f = cmath.cosh(s), cmath.sinh(s) / s
    return TransferMatrix(c + f * x11, f * x12, f * x21, c - f * x11, k)


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
