import math

import numpy as np
import pytest

from cascadelab.spectrum import SpectrumSeries


@pytest.fixture
def power_law():
    def make(exponent, k_lo=1.0, k_hi=64.0, n=10, scale=1.0):
        k = np.geomspace(k_lo, k_hi, n)
        return SpectrumSeries(k, scale * k**exponent, f"k^{exponent}")

    return make


def rel(a, b):
    return abs(a - b) / abs(b)


E1 = math.exp(-1.0)
