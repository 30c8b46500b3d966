"""Fractional moments E[Z**lam] and power-mean expectations by three routes.

Routes, cross-checking one another:

* closed forms where a family admits them,
* fractional-order differentiation of the half-line characteristic
  transform, realized as quadrature (a Riemann-Liouville integral for
  Re(lam) < 0, a Marchaud difference quotient for Re(lam) > 0),
* Monte Carlo with componentwise standard errors and deterministic,
  stream-split batching.

The power mean of order p is ((1/n) sum z_j**p)**(1/p) with principal
branches throughout, and the geometric mean prod z_j**(1/n) at p = 0.
"""

import dataclasses
import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .distributions import (
    Cauchy,
    CharSign,
    Empirical,
    MomentExistenceError,
    Poincare,
    ScaledT3,
    SupportError,
    TwoPoint,
    char_decay_rate,
    char_fn,
    char_fn_derivative,
    model_support,
    model_to_json,
    sample,
    stream_generator,
)
from .gammafn import gamma
from .principal import BranchDomainError, np_principal_log, np_principal_pow, principal_pow
from .quad import (
    NonConvergenceError,
    QuadratureConfig,
    integrate_marchaud,
    integrate_singular_decaying,
    marchaud_unit_interval,
)

__all__ = [
    "Route",
    "RouteUnavailableError",
    "MomentEstimate",
    "MCConfig",
    "PowerMeanSpec",
    "power_mean",
    "frac_moment",
    "frac_moment_neg",
    "frac_moment_pos",
    "frac_moment_mc",
    "closed_moment",
    "power_mean_expectation",
    "t3_product_identity",
    "continuity_scan",
    "ScanRow",
    "ScanTable",
]


class Route(enum.Enum):
    CLOSED = "closed"
    QUAD_NEG = "quad_neg"
    QUAD_POS = "quad_pos"
    MONTE_CARLO = "mc"
    FRAC_DERIV = "frac_deriv"  # power-mean route through the fractional operators
    AUTO = "auto"


class RouteUnavailableError(ValueError):
    """The requested route does not apply to this model/parameter combination."""


@dataclass
class MomentEstimate:
    value: complex
    uncertainty: float
    method: Route
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.uncertainty < 0:
            raise ValueError("uncertainty must be >= 0")
        if self.method is Route.CLOSED and self.uncertainty != 0.0:
            raise ValueError("closed-form estimates carry zero uncertainty")

    def to_json(self):
        return {
            "value": {"re": self.value.real, "im": self.value.imag},
            "uncertainty": self.uncertainty,
            "method": self.method.value,
            "meta": self.meta,
        }


@dataclass(frozen=True)
class MCConfig:
    samples: int = 100_000
    seed: int = 0
    batch: int = 4096

    def __post_init__(self):
        if self.samples < 1 or self.batch < 1:
            raise ValueError("samples and batch must be positive")


@dataclass(frozen=True)
class PowerMeanSpec:
    p: float
    n: int
    alpha: complex = 0j
    exploratory: bool = False  # lifts the |p| <= 1 restriction (MC experiments only)

    def __post_init__(self):
        object.__setattr__(self, "alpha", complex(self.alpha))
        if self.n < 1:
            raise ValueError("need n >= 1")
        if not self.exploratory and not -1.0 <= self.p <= 1.0:
            raise ValueError("p must lie in [-1, 1]")
        if self.alpha.imag < 0:
            raise ValueError("alpha must lie in the closed upper half plane")


# below this, z**p - 1 ~ p log z sinks under rounding while 1/p amplifies it,
# so the geometric limit is the *accurate* evaluation
_P_GEOMETRIC_EPS = 1e-8


def power_mean(values, p):
    """((1/n) sum z_j**p)**(1/p); the geometric mean prod z_j**(1/n) at p = 0.

    p < 0 (and p = 0) require every value to be nonzero.
    """
    values = np.asarray(values, dtype=complex)
    if values.ndim != 1 or len(values) == 0:
        raise ValueError("power_mean expects a nonempty 1-d collection")
    if p <= 0 and np.any(values == 0):
        raise BranchDomainError("power mean of order p <= 0 needs nonzero values")
    if abs(p) < _P_GEOMETRIC_EPS:
        return complex(np.exp(np.mean(np_principal_log(values))))
    mean = complex(np.mean(np_principal_pow(values, p)))
    return principal_pow(mean, 1.0 / p)


def _power_mean_rows(draws, p):
    # vectorized power mean along axis 1 of an (R, n) complex array
    if abs(p) < _P_GEOMETRIC_EPS:
        return np.exp(np.mean(np_principal_log(draws), axis=1))
    means = np.mean(np_principal_pow(draws, p), axis=1)
    return np_principal_pow(means, 1.0 / p)


def t3_product_identity(p, k):
    """Both sides of p**k Gamma(k - 1/p) / Gamma(-1/p) = prod_{j<k} (j p - 1).

    The product side is the cancellation-free way to evaluate the closed
    power-mean sum of the t3 family; the Gamma side doubles as a self-test.
    """
    if p >= 0:
        raise ValueError("the identity is used with p < 0")
    if not 0 <= k <= 12:
        raise ValueError("k must lie in [0, 12]")
    lhs = p ** k * gamma(k - 1.0 / p) / gamma(-1.0 / p)
    rhs = 1.0 + 0.0j
    for j in range(k):
        rhs *= j * p - 1.0
    return complex(lhs), complex(rhs)


# ---------------------------------------------------------------------------
# closed forms


def _max_pos_moment(model):
    # supremum r with E[|Z|^r] < inf on the positive side
    if isinstance(model, Cauchy):
        return 1.0
    if isinstance(model, ScaledT3):
        return 3.0
    return math.inf


def closed_moment(model, alpha, lam):
    """E[(Z + alpha)**lam] in closed form, or None when the family has no
    closed expression for these arguments.

    Raises MomentExistenceError when the moment itself does not exist.
    """
    alpha = complex(alpha)
    lam = complex(lam)
    if isinstance(model, (Cauchy, ScaledT3)):
        cap = _max_pos_moment(model)
        if lam.real >= cap:
            raise MomentExistenceError(
                f"E[|Z|^{lam.real:g}] diverges for {type(model).__name__}"
            )
        if alpha.imag == 0.0 and lam.real <= -1.0:
            raise MomentExistenceError(
                "negative orders at real alpha need Re(lam) > -1"
            )
        g = model.gamma_point + alpha
        if isinstance(model, Cauchy):
            return principal_pow(g, lam)
        return principal_pow(g, lam - 1.0) * (g - 1j * lam * model.sigma)
    if isinstance(model, Poincare):
        if alpha != 0:
            return None
        return principal_pow(model.gamma_point, lam)
    shifted = model.atoms + alpha
    vals = np_principal_pow(shifted, lam)
    return complex(np.sum(model.weights * vals))


def _shifted_moment(model, alpha, k):
    """E[(Z + alpha)**k] for integer k >= 0 via the transform derivatives."""
    alpha = complex(alpha)
    total = 0.0 + 0.0j
    for j in range(k + 1):
        ez_j = 1j ** j * char_fn_derivative(model, j, 0.0, CharSign.MINUS_I)
        total += math.comb(k, j) * alpha ** (k - j) * ez_j
    return total


def _shifted_weighted_char(model, alpha, k, u):
    """E[(Z + alpha)**k exp(iu (Z + alpha))] via the transform derivatives."""
    alpha = complex(alpha)
    phase = 1j * u * alpha
    if phase.real < -709.0:
        return 0.0 + 0.0j
    total = 0.0 + 0.0j
    for j in range(k + 1):
        ezj = 1j ** j * char_fn_derivative(model, j, u, CharSign.MINUS_I)
        total += math.comb(k, j) * alpha ** (k - j) * ezj
    return np.exp(phase) * total


# ---------------------------------------------------------------------------
# quadrature routes for a single fractional moment


def _cfg_meta(cfg):
    return {"rel_tol": cfg.rel_tol, "abs_tol": cfg.abs_tol, "max_level": cfg.max_level}


def frac_moment_neg(model, alpha, lam, cfg=None):
    """E[(Z + alpha)**lam] for Re(lam) < 0 through the Riemann-Liouville
    integral of the half-line transform:

        E[Z'**lam] = i**lam / Gamma(-lam) * int_0^inf t**(-lam-1) E[e^{itZ'}] dt

    with Z' = Z + alpha.  Real-supported laws need Im(alpha) > 0.
    """
    cfg = cfg or QuadratureConfig()
    alpha = complex(alpha)
    lam = complex(lam)
    if lam.real >= 0:
        raise ValueError("frac_moment_neg needs Re(lam) < 0")
    support = model_support(model)
    if support == "real" and alpha.imag <= 0.0:
        raise SupportError("real-supported law needs Im(alpha) > 0 for Re(lam) < 0")
    if support == "complex":
        raise SupportError("negative orders need an upper-half-plane shift Z + alpha")

    decay = char_decay_rate(model) + alpha.imag
    if decay <= 0:
        raise SupportError("transform does not decay; increase Im(alpha)")
    qcfg = dataclasses.replace(cfg, truncation_decay=decay)

    s = -lam.real - 1.0
    im_l = lam.imag

    def g(t):
        osc = np.exp(-1j * im_l * math.log(t)) if im_l != 0.0 else 1.0
        phase = 1j * alpha * t
        if phase.real < -709.0:
            return 0.0 + 0.0j
        return osc * char_fn(model, t) * np.exp(phase)

    res = integrate_singular_decaying(g, s, qcfg)
    scale = principal_pow(1j, lam) / gamma(-lam)
    return MomentEstimate(
        value=scale * res.value,
        uncertainty=abs(scale) * res.err_estimate,
        method=Route.QUAD_NEG,
        meta={
            "evaluations": res.evaluations,
            "decay": decay,
            "alpha": [alpha.real, alpha.imag],
            "lambda": [lam.real, lam.imag],
            "quad": _cfg_meta(qcfg),
        },
    )


def _phase_tail(z, delta, cfg):
    """int_1^inf exp(iuz) u**(-1-delta) du for real z != 0, via the rotated
    contour u = 1 + i*sign(z)*y on which the phase decays like exp(-|z| y)."""
    z = float(z.real) if isinstance(z, complex) else float(z)
    eps_dir = 1.0 if z > 0 else -1.0
    qcfg = dataclasses.replace(cfg, truncation_decay=abs(z))
    phase0 = complex(math.cos(z), math.sin(z))

    def g(y):
        return math.exp(-eps_dir * y * z) * principal_pow(1.0 + 1j * eps_dir * y, -1.0 - delta)

    res = integrate_singular_decaying(g, 0.0, qcfg)
    return 1j * eps_dir * phase0 * res.value, res.err_estimate, res.evaluations


def _marchaud_atom(z, delta, cfg):
    """int_0^inf (1 - exp(iuz)) u**(-1-delta) du for one atom z in the closed
    upper half plane."""
    if z.imag > 0.0:
        qcfg = dataclasses.replace(cfg, truncation_decay=z.imag)

        def f(u):
            phase = 1j * u * z
            if phase.real < -709.0:
                return 0.0 + 0.0j
            return np.exp(phase)

        res = integrate_marchaud(1.0, f, delta, qcfg)
        return res.value, res.err_estimate, res.evaluations
    # real atom: numeric head below u = 1, exact d0 part and a contour-rotated
    # oscillatory tail above
    head = marchaud_unit_interval(1.0, lambda u: np.exp(1j * u * z), delta, cfg)
    tail, tail_err, tail_evals = _phase_tail(z, delta, cfg)
    value = head.value + 1.0 / delta - tail
    return value, head.err_estimate + tail_err, head.evaluations + tail_evals


def frac_moment_pos(model, alpha, lam, cfg=None):
    """E[(Z + alpha)**lam] for Re(lam) > 0, Re(lam) not an integer, through
    the Marchaud difference quotient with k = floor(Re lam), delta = lam - k:

        E[Z'**lam] = i**delta delta / Gamma(1-delta)
                     * int_0^inf E[Z'**k (1 - e^{iuZ'})] / u**(1+delta) du.
    """
    cfg = cfg or QuadratureConfig()
    alpha = complex(alpha)
    lam = complex(lam)
    if lam.real <= 0:
        raise ValueError("frac_moment_pos needs Re(lam) > 0")
    if lam.real == int(lam.real):
        raise ValueError(
            "integer Re(lam) is an ordinary moment; compute it directly "
            "from the transform derivatives instead of the fractional route"
        )
    if isinstance(model, Cauchy):
        raise MomentExistenceError("positive-order moments are rejected for Cauchy")
    if lam.real >= _max_pos_moment(model):
        raise MomentExistenceError(
            f"E[|Z|^{lam.real:g}] diverges for {type(model).__name__}"
        )
    if alpha.imag < 0:
        raise SupportError("alpha must lie in the closed upper half plane")

    k = int(math.floor(lam.real))
    delta = lam - k
    scale = principal_pow(1j, delta) * delta / gamma(1.0 - delta)

    if isinstance(model, (TwoPoint, Empirical)):
        shifted = model.atoms + alpha
        if np.any(shifted.imag < 0):
            raise SupportError("shifted atoms must stay in the closed upper half plane")
        if isinstance(model, Empirical) and np.any(shifted.imag == 0) and len(shifted) > 4:
            raise SupportError(
                "empirical law with real atoms: take Im(alpha) > 0 so the "
                "transform decays"
            )
        total = 0.0 + 0.0j
        err = 0.0
        evals = 0
        for w_j, z_j in zip(model.weights, shifted):
            if z_j == 0 or w_j == 0.0:
                continue  # 0**lam = 0 contributes nothing
            m_val, m_err, m_ev = _marchaud_atom(z_j, delta, cfg)
            zk = principal_pow(z_j, float(k)) if k else 1.0
            total += w_j * zk * m_val
            err += abs(w_j * zk) * m_err
            evals += m_ev
        return MomentEstimate(
            value=scale * total,
            uncertainty=abs(scale) * err,
            method=Route.QUAD_POS,
            meta={"evaluations": evals, "k": k, "atomic": True, "quad": _cfg_meta(cfg)},
        )

    decay = char_decay_rate(model) + alpha.imag
    qcfg = dataclasses.replace(cfg, truncation_decay=decay)
    d0 = _shifted_moment(model, alpha, k)

    def f(u):
        return _shifted_weighted_char(model, alpha, k, u)

    res = integrate_marchaud(d0, f, delta, qcfg)
    return MomentEstimate(
        value=scale * res.value,
        uncertainty=abs(scale) * res.err_estimate,
        method=Route.QUAD_POS,
        meta={"evaluations": res.evaluations, "k": k, "decay": decay, "quad": _cfg_meta(qcfg)},
    )


# ---------------------------------------------------------------------------
# Monte Carlo


def _thread_count():
    import os

    raw = os.environ.get("FRACMEAN_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _mc_mean(per_block_values, total, mc):
    """Blockwise accumulation of a complex sample mean.

    Each block owns a stream derived from (seed, block index) and blocks are
    reduced in index order, so serial and FRACMEAN_THREADS > 1 runs produce
    identical results.
    """
    sizes = []
    done = 0
    while done < total:
        size = min(mc.batch, total - done)
        sizes.append(size)
        done += size
    threads = _thread_count()
    if threads > 1 and len(sizes) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            blocks = list(pool.map(per_block_values, range(len(sizes)), sizes))
    else:
        blocks = [per_block_values(idx, size) for idx, size in enumerate(sizes)]
    s = 0.0 + 0.0j
    ss_re = 0.0
    ss_im = 0.0
    for vals in blocks:  # fixed block order keeps the reduction deterministic
        s += complex(np.sum(vals))
        ss_re += float(np.sum(vals.real ** 2))
        ss_im += float(np.sum(vals.imag ** 2))
    mean = s / total
    if total > 1:
        var_re = max(ss_re - total * mean.real ** 2, 0.0) / (total - 1)
        var_im = max(ss_im - total * mean.imag ** 2, 0.0) / (total - 1)
        stderr = math.sqrt((var_re + var_im) / total)
    else:
        stderr = math.inf
    return mean, stderr, len(sizes)


def frac_moment_mc(model, alpha, lam, mc=None):
    """Monte Carlo E[(Z + alpha)**lam] with componentwise standard error
    combined as sqrt(var_re + var_im) / sqrt(N)."""
    mc = mc or MCConfig()
    alpha = complex(alpha)
    lam = complex(lam)
    if lam.real < 0 and model_support(model) == "real" and alpha.imag <= 0.0:
        raise SupportError("real-supported law needs Im(alpha) > 0 for Re(lam) < 0")

    def block(idx, size):
        draws = _draw_block(model, mc.seed, idx, size)
        return np_principal_pow(draws + alpha, lam)

    mean, stderr, blocks = _mc_mean(block, mc.samples, mc)
    return MomentEstimate(
        value=mean,
        uncertainty=stderr,
        method=Route.MONTE_CARLO,
        meta={"seed": mc.seed, "samples": mc.samples, "blocks": blocks},
    )


def _draw_block(model, seed, stream, size):
    rng = stream_generator(seed, stream)
    from .distributions import _sample_with

    return _sample_with(rng, model, size)


# ---------------------------------------------------------------------------
# dispatch


def frac_moment(model, alpha, lam, route=Route.AUTO, cfg=None, mc=None):
    """One fractional moment E[(Z + alpha)**lam] by the requested route.

    AUTO prefers closed > quadrature > Monte Carlo and records the choice.
    """
    alpha = complex(alpha)
    lam = complex(lam)
    auto = route is Route.AUTO

    if route in (Route.CLOSED, Route.AUTO):
        if lam == 0:
            val = closed_moment(model, alpha, 0.0) if isinstance(model, (TwoPoint, Empirical)) else 1.0 + 0.0j
            return MomentEstimate(val, 0.0, Route.CLOSED, {"auto": auto, "trivial_order": True})
        try:
            val = closed_moment(model, alpha, lam)
        except MomentExistenceError:
            if auto:
                val = None
            else:
                raise
        if val is not None:
            return MomentEstimate(val, 0.0, Route.CLOSED, {"auto": auto})
        if not auto:
            raise RouteUnavailableError(
                f"no closed form for {type(model).__name__} at alpha={alpha}, lam={lam}"
            )

    if route in (Route.QUAD_NEG, Route.QUAD_POS, Route.AUTO) and lam.real != 0:
        try:
            if lam.real < 0:
                if route is Route.QUAD_POS:
                    raise RouteUnavailableError("Re(lam) < 0 uses the negative-order route")
                est = frac_moment_neg(model, alpha, lam, cfg)
            else:
                if route is Route.QUAD_NEG:
                    raise RouteUnavailableError("Re(lam) > 0 uses the positive-order route")
                est = frac_moment_pos(model, alpha, lam, cfg)
            est.meta["auto"] = auto
            return est
        except MomentExistenceError:
            raise  # a nonexistent moment is not a route-selection problem
        except (SupportError, ValueError, NonConvergenceError):
            if not auto:
                raise
    elif route in (Route.QUAD_NEG, Route.QUAD_POS):
        raise RouteUnavailableError("quadrature routes need Re(lam) != 0")

    est = frac_moment_mc(model, alpha, lam, mc)
    est.meta["auto"] = auto
    return est


# ---------------------------------------------------------------------------
# power-mean expectations


def _series_power_coeff(g_coeffs, n, k):
    """k-th Taylor coefficient of (sum_j g_j tau**j)**n, truncated at tau**k."""
    series = np.zeros(k + 1, dtype=complex)
    series[: len(g_coeffs)] = g_coeffs[: k + 1]
    out = np.zeros(k + 1, dtype=complex)
    out[0] = 1.0
    for _ in range(n):
        out = np.convolve(out, series)[: k + 1]
    return out[k]


def _single_draw_powers(model, alpha, p, mc):
    """Frozen draws of W = (Z + alpha)**p for sampled transforms."""
    draws = sample(model, mc.seed, mc.samples, stream=913)
    return np_principal_pow(draws + alpha, p)


class _NegTransform:
    """u -> E[exp(-i(u/n) W)]**n with W = (Z+alpha)**p, p < 0, plus its
    exponential decay rate."""

    def __init__(self, model, alpha, p, n, mc):
        self.n = n
        self.kind = "sampled"
        g = getattr(model, "gamma_point", None)
        if isinstance(model, (Cauchy, ScaledT3)) and alpha.imag > 0:
            self.w = principal_pow(g + alpha, p)
            self.kind = "cauchy" if isinstance(model, Cauchy) else "t3"
            self.poly = (
                p * model.sigma * principal_pow(g + alpha, p - 1.0)
                if isinstance(model, ScaledT3)
                else 0.0
            )
            self.decay = -self.w.imag * (1.0 if isinstance(model, Cauchy) else 0.95)
        elif isinstance(model, Poincare) and alpha == 0:
            self.w = principal_pow(model.gamma_point, p)
            self.kind = "poincare"
            self.decay = -self.w.imag
        elif isinstance(model, (TwoPoint, Empirical)):
            self.atoms = np_principal_pow(model.atoms + alpha, p)
            self.weights = model.weights
            self.kind = "atoms"
            self.decay = -float(np.max(self.atoms.imag))
        else:
            self.samples = _single_draw_powers(model, alpha, p, mc)
            self.decay = -float(np.max(self.samples.imag))
        if self.decay <= 0:
            raise SupportError("single-draw transform does not decay; check alpha")

    def __call__(self, u):
        if self.kind in ("cauchy", "poincare"):
            return _safe_exp(-1j * u * self.w)
        if self.kind == "t3":
            return (1.0 - self.poly * u / self.n) ** self.n * _safe_exp(-1j * u * self.w)
        if self.kind == "atoms":
            vals = _safe_exp_arr(-1j * (u / self.n) * self.atoms)
            return complex(np.sum(self.weights * vals)) ** self.n
        vals = _safe_exp_arr(-1j * (u / self.n) * self.samples)
        return complex(np.mean(vals)) ** self.n


def _safe_exp(z):
    if z.real < -709.0:
        return 0.0 + 0.0j
    return complex(np.exp(z))


def _safe_exp_arr(z):
    return np.where(np.real(z) < -709.0, 0.0 + 0.0j, np.exp(np.where(np.real(z) < -709.0, 0, z)))


class _PosTransformDerivs:
    """j-th derivatives of G(t) = E[exp(-i(t/n) W)] at t = -u, for
    W = (Z+alpha)**p with p > 0; used to assemble F = G**n."""

    def __init__(self, model, alpha, p, n, jmax, mc):
        self.n = n
        self.jmax = jmax
        self.kind = "sampled"
        if isinstance(model, Poincare) and alpha == 0:
            self.w = principal_pow(model.gamma_point, p)
            self.wj = np.array([principal_pow(model.gamma_point, p * j) for j in range(jmax + 1)])
            self.kind = "poincare"
            self.decay = self.w.imag
        elif isinstance(model, (TwoPoint, Empirical)):
            self.atoms = np_principal_pow(model.atoms + alpha, p)
            self.weights = model.weights
            self.kind = "atoms"
            self.decay = float(np.min(self.atoms.imag))
        else:
            self.samples = _single_draw_powers(model, alpha, p, mc)
            self.decay = float(np.min(self.samples.imag))
        if self.decay <= 0:
            raise SupportError("single-draw transform does not decay; check alpha")

    def g_derivs(self, u):
        """[G^(j)(-u)] for j = 0..jmax; G^(j)(-u) = (-i/n)^j E[W^j e^{i(u/n)W}]."""
        pref = np.array([(-1j / self.n) ** j for j in range(self.jmax + 1)])
        v = u / self.n
        if self.kind == "poincare":
            return pref * self.wj * _safe_exp(1j * v * self.w)
        if self.kind == "atoms":
            base = _safe_exp_arr(1j * v * self.atoms)
            mom = np.array(
                [complex(np.sum(self.weights * self.atoms ** j * base)) for j in range(self.jmax + 1)]
            )
            return pref * mom
        base = _safe_exp_arr(1j * v * self.samples)
        mom = np.array(
            [complex(np.mean(self.samples ** j * base)) for j in range(self.jmax + 1)]
        )
        return pref * mom

    def f_deriv_k(self, u, k):
        """F^(k)(-u) with F = G**n, via a truncated series power."""
        derivs = self.g_derivs(u)
        coeffs = derivs / np.array([math.factorial(j) for j in range(self.jmax + 1)])
        return _series_power_coeff(coeffs, self.n, k) * math.factorial(k)


def _pm_closed(model, spec):
    p, n, alpha = spec.p, spec.n, spec.alpha
    if isinstance(model, Cauchy):
        if p >= 0:
            raise RouteUnavailableError(
                "Cauchy power means with p >= 0 are not integrable; closed "
                "form exists for p < 0 only"
            )
        if alpha.imag <= 0:
            raise SupportError("Cauchy power means need alpha in the open upper half plane")
        return model.gamma_point + alpha
    if isinstance(model, ScaledT3):
        if p >= 0:
            raise RouteUnavailableError("closed t3 power means cover p < 0 only")
        if alpha.imag <= 0:
            raise SupportError("t3 power means need alpha in the open upper half plane")
        g = model.gamma_point + alpha
        total = 0.0 + 0.0j
        for k in range(n + 1):
            prod = 1.0 + 0.0j
            for j in range(k):
                prod *= j * p - 1.0
            total += math.comb(n, k) * (1j / (n * g)) ** k * prod
        return g * total
    if isinstance(model, Poincare):
        if alpha != 0:
            raise RouteUnavailableError("closed Poincare power means need alpha = 0")
        if abs(p) > 1:
            raise RouteUnavailableError("closed Poincare power means need |p| <= 1")
        return model.gamma_point
    if isinstance(model, TwoPoint):
        # exact enumeration over the n-fold product law
        atoms = model.atoms + alpha
        if p <= 0 and np.any(atoms == 0):
            raise BranchDomainError("power mean of order p <= 0 needs nonzero values")
        total = 0.0 + 0.0j
        for k in range(n + 1):
            weight = math.comb(n, k) * model.w ** k * (1.0 - model.w) ** (n - k)
            if weight == 0.0:
                continue
            values = np.array([atoms[0]] * k + [atoms[1]] * (n - k))
            total += weight * power_mean(values, p)
        return total
    raise RouteUnavailableError("no closed power-mean expectation for this law")


def _pm_frac_deriv(model, spec, cfg, mc):
    p, n, alpha = spec.p, spec.n, spec.alpha
    cfg = cfg or QuadratureConfig()
    mc = mc or MCConfig()
    if abs(p) < _P_GEOMETRIC_EPS:
        # geometric mean: E[prod Z_j**(1/n)] = E[Z**(1/n)]**n, no fractional
        # operator at p itself
        if n == 1:
            val = _shifted_moment(model, alpha, 1)
            return MomentEstimate(val, 0.0, Route.CLOSED, {"route": "frac_deriv", "geometric": True})
        inner = frac_moment_pos(model, alpha, 1.0 / n, cfg)
        value = principal_pow(inner.value, float(n))
        unc = n * abs(inner.value) ** (n - 1) * inner.uncertainty
        meta = dict(inner.meta)
        meta.update({"route": "frac_deriv", "geometric": True, "n": n})
        return MomentEstimate(value, unc, Route.QUAD_POS, meta)
    order = 1.0 / p
    if p < 0:
        if model_support(model) == "real" and alpha.imag <= 0:
            raise SupportError("real-supported power means with p < 0 need Im(alpha) > 0")
        transform = _NegTransform(model, complex(alpha), p, n, mc)
        qcfg = dataclasses.replace(cfg, truncation_decay=transform.decay)
        s = -order - 1.0
        res = integrate_singular_decaying(transform, s, qcfg)
        scale = principal_pow(-1j, order) / gamma(-order)
        meta = {
            "route": "frac_deriv",
            "order": order,
            "transform": transform.kind,
            "evaluations": res.evaluations,
        }
        return MomentEstimate(scale * res.value, abs(scale) * res.err_estimate, Route.QUAD_NEG, meta)
    # p > 0
    if _max_pos_moment(model) < 1.0 or isinstance(model, Cauchy):
        raise MomentExistenceError(
            "positive-order power means need Z in L^1; rejected for Cauchy"
        )
    if abs(order - round(order)) < 1e-12:
        # 1/p is an integer m: the plain m-th derivative of the transform
        m = int(round(order))
        derivs = _PosTransformDerivs(model, complex(alpha), p, n, m, mc)
        f_m = derivs.f_deriv_k(0.0, m)
        value = principal_pow(-1j, -float(m)) * f_m
        return MomentEstimate(
            value,
            0.0 if derivs.kind in ("poincare", "atoms") else abs(value) * 1e-6,
            Route.QUAD_POS,
            {"route": "frac_deriv", "order": m, "ordinal": True, "transform": derivs.kind},
        )
    k = int(math.floor(order))
    delta = order - k
    derivs = _PosTransformDerivs(model, complex(alpha), p, n, k, mc)
    qcfg = dataclasses.replace(cfg, truncation_decay=derivs.decay)
    d0 = derivs.f_deriv_k(0.0, k)
    res = integrate_marchaud(d0, lambda u: derivs.f_deriv_k(u, k), delta, qcfg)
    scale = principal_pow(-1j, -order) * delta / gamma(1.0 - delta)
    meta = {
        "route": "frac_deriv",
        "order": order,
        "transform": derivs.kind,
        "evaluations": res.evaluations,
    }
    return MomentEstimate(scale * res.value, abs(scale) * res.err_estimate, Route.QUAD_POS, meta)


def _pm_monte_carlo(model, spec, mc):
    mc = mc or MCConfig()
    p, n, alpha = spec.p, spec.n, spec.alpha
    if p < 0 and model_support(model) == "real" and alpha.imag <= 0:
        raise SupportError("real-supported power means with p < 0 need Im(alpha) > 0")

    def block(idx, size):
        draws = _draw_block(model, mc.seed, idx, size * n).reshape(size, n) + alpha
        return _power_mean_rows(draws, p)

    mean, stderr, blocks = _mc_mean(block, mc.samples, mc)
    return MomentEstimate(
        value=mean,
        uncertainty=stderr,
        method=Route.MONTE_CARLO,
        meta={"seed": mc.seed, "replications": mc.samples, "n": n, "blocks": blocks},
    )


def power_mean_expectation(model, spec, route=Route.AUTO, cfg=None, mc=None):
    """E[((1/n) sum_j (Z_j + alpha)**p)**(1/p)] by the requested route.

    Route CLOSED covers the families with explicit formulas (and exact
    enumeration for two-point laws); FRAC_DERIV applies the fractional
    operators to the n-th power of the single-draw transform; MONTE_CARLO
    averages power means over replications of n fresh draws.
    """
    if not isinstance(spec, PowerMeanSpec):
        raise TypeError("spec must be a PowerMeanSpec")
    if spec.exploratory and route is not Route.MONTE_CARLO:
        raise RouteUnavailableError("|p| > 1 exploration is Monte Carlo only")
    auto = route is Route.AUTO
    if route in (Route.CLOSED, Route.AUTO):
        try:
            val = _pm_closed(model, spec)
            return MomentEstimate(val, 0.0, Route.CLOSED, {"auto": auto, "n": spec.n, "p": spec.p})
        except (RouteUnavailableError, SupportError, BranchDomainError):
            if not auto:
                raise
    if route in (Route.FRAC_DERIV, Route.AUTO):
        try:
            est = _pm_frac_deriv(model, spec, cfg, mc)
            est.meta["auto"] = auto
            return est
        except (RouteUnavailableError, SupportError, MomentExistenceError, ValueError):
            if not auto:
                raise
    if route in (Route.MONTE_CARLO, Route.AUTO):
        est = _pm_monte_carlo(model, spec, mc)
        est.meta["auto"] = auto
        return est
    raise RouteUnavailableError(f"route {route} not applicable to power means")


# ---------------------------------------------------------------------------
# continuity scan


@dataclass
class ScanRow:
    p: float
    estimate: MomentEstimate | None
    error: str | None = None


@dataclass
class ScanTable:
    rows: list
    max_jump: float
    max_jump_pair: tuple | None
    max_jump_uncertainty: float

    def to_csv(self, path):
        import csv as _csv

        with open(path, "w", newline="") as fh:
            writer = _csv.writer(fh)
            writer.writerow(["p", "re", "im", "uncertainty", "method"])
            for row in self.rows:
                if row.estimate is None:
                    writer.writerow([row.p, "", "", "", f"error: {row.error}"])
                else:
                    est = row.estimate
                    writer.writerow(
                        [row.p, repr(est.value.real), repr(est.value.imag), est.uncertainty, est.method.value]
                    )

    def to_json(self):
        return {
            "rows": [
                {
                    "p": row.p,
                    "estimate": row.estimate.to_json() if row.estimate else None,
                    "error": row.error,
                }
                for row in self.rows
            ],
            "max_jump": self.max_jump,
            "max_jump_pair": list(self.max_jump_pair) if self.max_jump_pair else None,
            "max_jump_uncertainty": self.max_jump_uncertainty,
        }


def continuity_scan(model, alpha, n, p_grid, route=Route.AUTO, cfg=None, mc=None, exploratory=False):
    """Power-mean expectations over a grid of p, with the maximum
    adjacent-pair jump as a continuity diagnostic.  Per-point failures are
    recorded and the scan continues."""
    mc = mc or MCConfig()
    rows = []
    for idx, p in enumerate(p_grid):
        spec = PowerMeanSpec(p=float(p), n=n, alpha=alpha, exploratory=exploratory)
        point_mc = dataclasses.replace(mc, seed=mc.seed + 7919 * idx)
        try:
            est = power_mean_expectation(model, spec, route, cfg, point_mc)
            rows.append(ScanRow(float(p), est))
        except Exception as exc:  # per-point errors recorded, scan continues
            rows.append(ScanRow(float(p), None, f"{type(exc).__name__}: {exc}"))
    max_jump = 0.0
    max_pair = None
    max_unc = 0.0
    prev = None
    for row in rows:
        if row.estimate is None:
            prev = None
            continue
        if prev is not None:
            jump = abs(row.estimate.value - prev.estimate.value)
            if jump > max_jump:
                max_jump = jump
                max_pair = (prev.p, row.p)
                max_unc = math.hypot(prev.estimate.uncertainty, row.estimate.uncertainty)
        prev = row
    return ScanTable(rows, max_jump, max_pair, max_unc)
