import math

import numpy as np
import pytest

import ddlab
from ddlab.bath import thermal_weight


@pytest.fixture(scope="session")
def quad():
    return ddlab.QuadratureSpec()


def classical_twin(alpha: float, temperature: float, omega_d: float = 1.0):
    """ClassicalBath with p = pi * J * coth, the exact quantum equivalent."""

    def p(w):
        w = np.asarray(w, dtype=float)
        j = 2.0 * alpha * w * (w <= omega_d)
        if temperature == 0.0:
            return math.pi * j
        return math.pi * j * thermal_weight(temperature, w)

    return ddlab.ClassicalBath(power_spectrum=p, omega_max=omega_d)


# grid shared by the path-equality and quadrature-consistency checks
STANDARD_GRID = [
    (build, n, alpha, temp, t)
    for n in (0, 2, 10, 50)
    for build in (ddlab.udd, ddlab.equidistant)
    for alpha in (0.001, 0.25)
    for temp in (0.0, 0.1)
    for t in (1e-2, 1.0, 30.0, 1e3)
]
