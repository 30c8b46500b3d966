"""Principal-branch complex arithmetic.

Everything in this package fixes one branch: log z = log|z| + i*theta with
theta in (-pi, pi], so the negative real axis carries theta = +pi.  Powers
are z**lam = exp(lam * log z) with the convention 0**lam = 0 for every lam
(including lam = 0).
"""

import cmath
import enum
import math
from dataclasses import dataclass

import numpy as np

from .gammafn import gamma

__all__ = [
    "principal_log",
    "principal_pow",
    "np_principal_log",
    "np_principal_pow",
    "power_bound_constant",
    "OrderRegion",
    "FracOrder",
    "BranchDomainError",
]


class BranchDomainError(ValueError):
    """Argument outside the domain of a principal-branch operation."""


def principal_log(z):
    """log|z| + i*theta with theta in (-pi, pi]; domain error at z = 0.

    A zero imaginary part (including -0.0) is snapped to the upper side of
    the cut, so principal_log(-1) = i*pi, never -i*pi.
    """
    z = complex(z)
    if z == 0:
        raise BranchDomainError("principal_log undefined at 0")
    if z.imag == 0.0:
        z = complex(z.real, 0.0)
    return cmath.log(z)


def principal_pow(z, lam):
    """exp(lam * principal_log(z)) for z != 0, and exactly 0 for z = 0."""
    z = complex(z)
    if z == 0:
        return 0j
    return cmath.exp(complex(lam) * principal_log(z))


def np_principal_log(z):
    """Vectorized principal_log. Entries on the negative real axis get +pi."""
    z = np.asarray(z, dtype=complex)
    # kill signed zeros in the imaginary part so the cut is approached from above
    z = np.where(z.imag == 0.0, z.real + 0.0j, z)
    return np.log(z)


def np_principal_pow(z, lam):
    """Vectorized principal_pow with the 0**lam = 0 convention."""
    z = np.asarray(z, dtype=complex)
    out = np.exp(complex(lam) * np_principal_log(np.where(z == 0, 1.0, z)))
    return np.where(z == 0, 0.0 + 0.0j, out)


def power_bound_constant(lam):
    """Constant C with |z**lam| <= C * |Im z|**Re(lam) for all z off the real axis.

    C = Gamma(-Re lam) * exp(pi |Im lam| / 2) / |Gamma(-lam)|, defined for
    Re(lam) < 0 only.
    """
    lam = complex(lam)
    if lam.real >= 0.0:
        raise BranchDomainError("power_bound_constant needs Re(lam) < 0")
    num = gamma(-lam.real).real * math.exp(math.pi * abs(lam.imag) / 2.0)
    return num / abs(gamma(-lam))


class OrderRegion(enum.Enum):
    """Sign of the real part of a fractional order, which selects the route."""

    NEGATIVE_RE = "negative"
    POSITIVE_RE = "positive"
    ZERO = "zero"


@dataclass(frozen=True)
class FracOrder:
    """A complex exponent with its region classification."""

    lam: complex
    region: OrderRegion

    @classmethod
    def classify(cls, lam):
        lam = complex(lam)
        if lam.real < 0:
            region = OrderRegion.NEGATIVE_RE
        elif lam.real > 0:
            region = OrderRegion.POSITIVE_RE
        else:
            region = OrderRegion.ZERO
        return cls(lam, region)
