import math
from dataclasses import dataclass

import numpy as np
import pytest

from properscore.dist import Distribution, DomainError, Gumbel, Laplace, Logistic, _result


@dataclass(frozen=True)
class CauchyTail(Distribution):
    """Standard Cauchy law: 1 - F(x) ~ 1 / (pi x), so S-tilde integrals diverge."""

    kind = "cauchy"

    def cdf(self, x):
        # arctan(x) + pi/2 = arctan2(1, -x) keeps precision far in the left tail
        return _result(x, np.arctan2(1.0, -np.asarray(x, dtype=float)) / math.pi)

    def sf(self, x):
        return _result(x, np.arctan2(1.0, np.asarray(x, dtype=float)) / math.pi)

    def logcdf(self, x):
        return _result(x, np.log(np.arctan2(1.0, -np.asarray(x, dtype=float)) / math.pi))

    def logsf(self, x):
        return _result(x, np.log(np.arctan2(1.0, np.asarray(x, dtype=float)) / math.pi))

    def density(self, x):
        x = np.asarray(x, dtype=float)
        return _result(x, 1.0 / (math.pi * (1.0 + x * x)))

    @property
    def has_density(self):
        return True

    def quantile(self, p):
        p = np.asarray(p, dtype=float)
        if np.any((p <= 0) | (p >= 1)):
            raise DomainError("p outside (0, 1)")
        return _result(p, np.tan(math.pi * (p - 0.5)))

    @property
    def in_p01(self):
        return True


@pytest.fixture
def cauchy():
    return CauchyTail()


def mixed_grid():
    """Twelve continuous members of P_(0,1) used by the propriety checks."""
    return [
        Logistic(0.0, 1.0), Logistic(1.0, 1.0), Logistic(-1.0, 2.0), Logistic(0.5, 0.5),
        Gumbel(0.0, 1.0), Gumbel(1.0, 1.5), Gumbel(-1.0, 0.7), Gumbel(0.3, 1.0),
        Laplace(0.0, 1.0), Laplace(-0.5, 2.0), Laplace(1.0, 0.8), Laplace(2.0, 1.0),
    ]
