"""Comparisons between E[|Z|**p] and |E[Z**p]|, and the geometric-mean
strong-law demonstration.

For a law supported in a closed half plane (in the principal-argument sense)
and |p| <= 1, the fractional absolute moment is controlled by the fractional
moment:

    E[|Z|**p] <= |E[Z**p]| / cos(p pi / 2),

with equality for the two-point law at {1, -1}.  Without half-plane support
the weaker divisor cos(p pi) works for |p| < 1/2, and for |p| > 1/2 nothing
survives: two unit-modulus atoms whose p-th powers are antipodal give
E[Z**p] = 0 while E[|Z|**p] = 1.

Half-plane support is checked on principal arguments.  The upper closure
{Im z >= 0} is always admissible, but a lower law may not touch the open
negative real axis: those points carry argument +pi, land on the far end of
the power arc, and break the convex-hull argument the bound rests on.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .distributions import (
    Cauchy,
    Empirical,
    MomentExistenceError,
    Poincare,
    ScaledT3,
    SupportError,
    TwoPoint,
    sample,
    stream_generator,
)
from .moments import MCConfig, Route, closed_moment, frac_moment
from .principal import np_principal_log, np_principal_pow, principal_log, principal_pow

__all__ = [
    "BoundReport",
    "half_plane_bound_check",
    "general_bound_check",
    "cancelling_pair_law",
    "SllnTrajectory",
    "geometric_slln_demo",
]


@dataclass
class BoundReport:
    abs_moment: float
    moment_abs: float
    bound: float
    satisfied: bool
    slack: float
    tolerance: float = 0.0
    meta: dict = field(default_factory=dict)

    def to_json(self):
        return {
            "abs_moment": self.abs_moment,
            "moment_abs": self.moment_abs,
            "bound": self.bound,
            "satisfied": self.satisfied,
            "slack": self.slack,
            "tolerance": self.tolerance,
            "meta": self.meta,
        }


def _support_class(model):
    """'upper' or 'lower' in the principal-argument sense, else SupportError."""
    if isinstance(model, (Cauchy, ScaledT3, Poincare)):
        return "upper"  # the real line sits inside the upper closure
    atoms = model.atoms
    if np.all(atoms.imag >= 0.0):
        return "upper"
    on_neg_axis = (atoms.imag == 0.0) & (atoms.real < 0.0)
    if np.all(atoms.imag <= 0.0) and not np.any(on_neg_axis):
        return "lower"
    raise SupportError(
        "law is not supported in a closed half plane of principal arguments"
    )


def _abs_moment(model, p, mc):
    """(E[|Z|**p], stderr); exact for atomic laws, Monte Carlo otherwise."""
    if isinstance(model, (TwoPoint, Empirical)):
        val = float(np.sum(model.weights * np.abs(model.atoms) ** p))
        return val, 0.0
    if isinstance(model, Cauchy) and abs(p) >= 1.0:
        raise MomentExistenceError("E[|Z|^p] diverges for Cauchy at |p| >= 1")
    draws = np.abs(sample(model, mc.seed, mc.samples, stream=31)) ** p
    val = float(np.mean(draws))
    stderr = float(np.std(draws, ddof=1) / math.sqrt(len(draws)))
    return val, stderr


def _bound_report(model, p, divisor, estimator, mc, support_declared):
    mc = mc or MCConfig()
    if estimator == "closed":
        val = closed_moment(model, 0.0, complex(p))
        if val is None:
            raise ValueError("no closed moment for this law; use estimator='mc'")
        moment_abs, m_err = abs(val), 0.0
        if not isinstance(model, (TwoPoint, Empirical)):
            raise ValueError("closed absolute moments exist for atomic laws only")
        abs_mom, a_err = _abs_moment(model, p, mc)
    elif estimator == "mc":
        est = frac_moment(model, 0.0, complex(p), route=Route.AUTO, mc=mc)
        moment_abs, m_err = abs(est.value), est.uncertainty
        abs_mom, a_err = _abs_moment(model, p, mc)
    else:
        raise ValueError("estimator must be 'closed' or 'mc'")

    if divisor <= 0.0:
        bound = math.inf
        slack = math.inf
        satisfied = True
        tol = 0.0
    else:
        bound = moment_abs / divisor
        tol = 4.0 * (a_err + m_err / divisor) + 1e-12
        slack = bound - abs_mom
        satisfied = abs_mom <= bound + tol
    return BoundReport(
        abs_moment=abs_mom,
        moment_abs=moment_abs,
        bound=bound,
        satisfied=satisfied,
        slack=slack,
        tolerance=tol,
        meta={"p": p, "estimator": estimator, "support": support_declared},
    )


def half_plane_bound_check(model, p, estimator="mc", mc=None, declare_support=None):
    """Check E[|Z|**p] <= |E[Z**p]| / cos(p pi/2) for |p| <= 1.

    The law must be supported in a closed half plane (principal arguments);
    pass declare_support='upper'/'lower' to skip the check and probe the
    bound outside its hypotheses.  At |p| = 1 the divisor vanishes and the
    inequality is vacuous; the report then carries bound = inf.
    """
    if abs(p) > 1.0:
        raise ValueError("half-plane bound needs |p| <= 1")
    support = declare_support or _support_class(model)
    divisor = 0.0 if abs(p) == 1.0 else math.cos(p * math.pi / 2.0)
    return _bound_report(model, p, divisor, estimator, mc, support)


def general_bound_check(model, p, estimator="mc", mc=None):
    """Check E[|Z|**p] <= |E[Z**p]| / cos(p pi) for |p| < 1/2 and any
    complex-supported law."""
    if abs(p) >= 0.5:
        raise ValueError("general bound needs |p| < 1/2")
    divisor = math.cos(p * math.pi)
    return _bound_report(model, p, divisor, estimator, mc, "complex")


def cancelling_pair_law(p):
    """Two equally weighted unit-modulus atoms whose p-th powers are
    antipodal, so E[Z**p] = 0 while E[|Z|**p] = 1 (possible once |p| > 1/2).

    The atoms are -1 (principal argument +pi, power angle p*pi) and
    exp(i(1 - 1/p)pi) (power angle (p-1)*pi, exactly pi less).
    """
    if not 0.5 < abs(p) <= 1.0:
        raise ValueError("antipodal powers of unit atoms need 1/2 < |p| <= 1")
    theta = (1.0 - 1.0 / p) * math.pi
    return TwoPoint(-1.0 + 0.0j, complex(math.cos(theta), math.sin(theta)), 0.5)


@dataclass
class SllnTrajectory:
    ns: np.ndarray
    values: np.ndarray
    target: complex

    def final_error(self):
        return abs(self.values[-1] - self.target)

    def to_json(self):
        return {
            "n": [int(n) for n in self.ns],
            "values": [[v.real, v.imag] for v in self.values],
            "target": [self.target.real, self.target.imag],
        }


def _log_moment_target(model):
    if isinstance(model, Poincare):
        return model.gamma_point  # exp(E[log Z]) = exp(log beta) = beta
    atoms, weights = model.atoms, model.weights
    if np.any(atoms == 0):
        raise SupportError("geometric means need nonzero values")
    mean_log = complex(np.sum(weights * np_principal_log(atoms)))
    return complex(np.exp(mean_log))


def geometric_slln_demo(model, n_max, seed, n_checkpoints=60):
    """Running geometric means prod_{j<=n} Z_j**(1/n) along one sample path,
    against the limit exp(E[log Z]).

    Supported for laws in the closed upper half plane with a finite positive
    absolute moment (all built-ins that qualify).
    """
    from .distributions import model_support

    if model_support(model) not in ("upper",) or isinstance(model, (Cauchy, ScaledT3)):
        raise SupportError("the demo needs an upper-half-plane law")
    if n_max < 10:
        raise ValueError("need n_max >= 10")
    target = _log_moment_target(model)
    checkpoints = np.unique(
        np.geomspace(10, n_max, num=min(n_checkpoints, n_max)).astype(int)
    )
    rng = stream_generator(seed, 0)
    from .distributions import _sample_with

    values = []
    log_sum = 0.0 + 0.0j
    done = 0
    for n_stop in checkpoints:
        block = _sample_with(rng, model, int(n_stop - done))
        log_sum += complex(np.sum(np_principal_log(block)))
        done = int(n_stop)
        values.append(complex(np.exp(log_sum / done)))
    return SllnTrajectory(checkpoints, np.array(values, dtype=complex), target)
