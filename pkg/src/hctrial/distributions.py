"""Conjugate mixture priors and the distance / effect-summary machinery built on them.

Everything in this package works on an internal "working scale": continuous
responses are assumed to have unit variance (raw data and prior parameters are
divided by the known outcome standard deviation at ingestion, and treatment
effect summaries are multiplied back for reporting), binary responses are
Bernoulli.  Priors and posteriors share a single representation, a weighted
mixture of conjugate components (normal or beta).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import integrate
from scipy.special import betainc, betaln, erf

__all__ = [
    "NORMAL",
    "BETA",
    "CONTINUOUS",
    "BINARY",
    "NumericsError",
    "OutcomeModel",
    "DataSummary",
    "PriorComponent",
    "PriorSpec",
    "posterior_update",
    "hellinger_normal",
    "hellinger_beta",
    "hellinger_numeric",
    "prob_delta_positive",
    "delta_point_and_interval",
]

NORMAL = "normal"
BETA = "beta"
CONTINUOUS = "continuous"
BINARY = "binary"

_SQRT2 = math.sqrt(2.0)
_WEIGHT_TOL = 1e-12
# Integration supports: +-10 sd beyond the extreme component means for the
# normal family, an epsilon-clipped unit interval for the beta family.
_SUPPORT_SDS = 10.0
_BETA_EPS = 1e-12
# Tighter than the guaranteed 1e-8 so that H = sqrt(H^2) keeps ~1e-6 accuracy
# even for nearly identical densities.
_QUAD_EPSABS = 1e-12
_QUAD_EPSREL = 1e-10
_QUAD_MAX_ABSERR = 1e-8


class NumericsError(RuntimeError):
    """A quadrature or root/minimum search failed to converge."""


def _phi(z: float) -> float:
    """Standard normal CDF via erfc (accurate in both tails)."""
    return 0.5 * math.erfc(-z / _SQRT2)


@dataclass(frozen=True)
class OutcomeModel:
    """Endpoint family: continuous with known sd, or binary.

    ``known_sd`` records the raw-scale standard deviation used to normalize a
    continuous endpoint; all computations downstream assume unit variance and
    the value is only consulted when converting summaries back to raw units.
    """

    kind: str
    known_sd: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in (CONTINUOUS, BINARY):
            raise ValueError(f"unknown outcome kind: {self.kind!r}")
        if not (math.isfinite(self.known_sd) and self.known_sd > 0):
            raise ValueError("known_sd must be finite and > 0")
        if self.kind == BINARY and self.known_sd != 1.0:
            raise ValueError("binary outcomes carry no scale; leave known_sd at 1.0")

    @property
    def family(self) -> str:
        return NORMAL if self.kind == CONTINUOUS else BETA


@dataclass(frozen=True)
class DataSummary:
    """Sufficient statistics for one arm: count and sum of responses.

    For a binary endpoint ``total`` is the number of successes.
    """

    n: int
    total: float

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError("n must be >= 0")
        if not math.isfinite(self.total):
            raise ValueError("data summary total must be finite")

    @property
    def mean(self) -> float:
        if self.n == 0:
            raise ValueError("mean of an empty summary")
        return self.total / self.n


@dataclass(frozen=True)
class PriorComponent:
    """One mixture component: (weight, mean, scale).

    ``scale`` is the standard deviation for a normal component and the
    precision parameter phi for a beta component (shapes a = mean * phi,
    b = (1 - mean) * phi).
    """

    weight: float
    mean: float
    scale: float


@dataclass(frozen=True)
class PriorSpec:
    """A weighted mixture of conjugate components; length-1 mixtures are the
    single-prior case."""

    family: str
    components: tuple[PriorComponent, ...]

    def __post_init__(self) -> None:
        if self.family not in (NORMAL, BETA):
            raise ValueError(f"unknown prior family: {self.family!r}")
        if not self.components:
            raise ValueError("prior needs at least one component")
        total = 0.0
        for i, c in enumerate(self.components):
            if not (math.isfinite(c.weight) and c.weight >= 0.0):
                raise ValueError(f"component {i}: weight must be >= 0")
            if not (math.isfinite(c.scale) and c.scale > 0.0):
                raise ValueError(f"component {i}: scale must be > 0")
            if not math.isfinite(c.mean):
                raise ValueError(f"component {i}: mean must be finite")
            if self.family == BETA and not (0.0 < c.mean < 1.0):
                raise ValueError(f"component {i}: beta mean must be in (0, 1)")
            total += c.weight
        if abs(total - 1.0) > _WEIGHT_TOL:
            raise ValueError(f"mixture weights sum to {total!r}, expected 1")

    # -- constructors ------------------------------------------------------

    @classmethod
    def normal(cls, mean: float, sd: float) -> "PriorSpec":
        return cls(NORMAL, (PriorComponent(1.0, mean, sd),))

    @classmethod
    def beta(cls, mean: float, precision: float) -> "PriorSpec":
        return cls(BETA, (PriorComponent(1.0, mean, precision),))

    @classmethod
    def mixture(cls, family: str, triples: Iterable[Sequence[float]]) -> "PriorSpec":
        comps = tuple(PriorComponent(w, m, s) for w, m, s in triples)
        return cls(family, comps)

    # -- basic structure ----------------------------------------------------

    @property
    def is_single(self) -> bool:
        return len(self.components) == 1

    def weights(self) -> np.ndarray:
        return np.array([c.weight for c in self.components])

    def means(self) -> np.ndarray:
        return np.array([c.mean for c in self.components])

    def scales(self) -> np.ndarray:
        return np.array([c.scale for c in self.components])

    def beta_shapes(self) -> tuple[np.ndarray, np.ndarray]:
        if self.family != BETA:
            raise ValueError("beta_shapes only applies to beta mixtures")
        m, p = self.means(), self.scales()
        return m * p, (1.0 - m) * p

    def mean(self) -> float:
        return float(np.dot(self.weights(), self.means()))

    def variance(self) -> float:
        w, m = self.weights(), self.means()
        if self.family == NORMAL:
            comp_var = self.scales() ** 2
        else:
            comp_var = m * (1.0 - m) / (self.scales() + 1.0)
        overall = self.mean()
        return float(np.dot(w, comp_var + (m - overall) ** 2))

    def sd(self) -> float:
        return math.sqrt(self.variance())

    # -- density and sampling ------------------------------------------------

    def support(self) -> tuple[float, float]:
        if self.family == NORMAL:
            m, s = self.means(), self.scales()
            return (float(m.min() - _SUPPORT_SDS * s.max()),
                    float(m.max() + _SUPPORT_SDS * s.max()))
        return (_BETA_EPS, 1.0 - _BETA_EPS)

    def pdf(self, x):
        """Mixture density, vectorized over ``x``."""
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        if self.family == NORMAL:
            for c in self.components:
                z = (x - c.mean) / c.scale
                out += c.weight * np.exp(-0.5 * z * z) / (c.scale * math.sqrt(2.0 * math.pi))
        else:
            a_all, b_all = self.beta_shapes()
            xc = np.clip(x, _BETA_EPS, 1.0 - _BETA_EPS)
            for c, a, b in zip(self.components, a_all, b_all):
                logp = (a - 1.0) * np.log(xc) + (b - 1.0) * np.log1p(-xc) - betaln(a, b)
                out += c.weight * np.exp(logp)
        return out

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        if self.family == NORMAL:
            for c in self.components:
                z = (x - c.mean) / (c.scale * _SQRT2)
                out += c.weight * 0.5 * (1.0 + erf(z))
        else:
            a_all, b_all = self.beta_shapes()
            xc = np.clip(x, 0.0, 1.0)
            for c, a, b in zip(self.components, a_all, b_all):
                out += c.weight * betainc(a, b, xc)
        return out

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Draw ``size`` variates from the mixture using ``rng``."""
        if self.is_single:
            c = self.components[0]
            if self.family == NORMAL:
                return rng.normal(c.mean, c.scale, size)
            return rng.beta(c.mean * c.scale, (1.0 - c.mean) * c.scale, size)
        idx = rng.choice(len(self.components), size=size, p=self.weights())
        if self.family == NORMAL:
            return rng.normal(self.means()[idx], self.scales()[idx])
        a, b = self.beta_shapes()
        return rng.beta(a[idx], b[idx])


def _check_family(prior: PriorSpec, model: OutcomeModel, what: str = "prior") -> None:
    if prior.family != model.family:
        raise ValueError(
            f"{what} family {prior.family!r} does not match outcome kind {model.kind!r}"
        )


def _check_single(prior: PriorSpec, what: str) -> None:
    if not prior.is_single:
        raise ValueError(f"{what} must be a single-component prior")


# ---------------------------------------------------------------------------
# Conjugate updating
# ---------------------------------------------------------------------------


def posterior_update(prior: PriorSpec, data: DataSummary, model: OutcomeModel) -> PriorSpec:
    """Exact mixture posterior under conjugate updating.

    Each component is updated conjugately and its weight is multiplied by the
    component's marginal likelihood of the data (then renormalized); factors
    common to all components cancel.  An empty summary returns the prior.
    """
    _check_family(prior, model)
    if data.n == 0:
        return prior

    comps: list[tuple[float, float]] = []
    logw: list[float] = []
    if model.kind == CONTINUOUS:
        ybar = data.mean
        for c in prior.components:
            prec0 = 1.0 / (c.scale * c.scale)
            prec = prec0 + data.n
            mean = (prec0 * c.mean + data.total) / prec
            comps.append((mean, 1.0 / math.sqrt(prec)))
            # marginal of the sample mean: N(component mean, sd^2 + 1/n)
            mvar = c.scale * c.scale + 1.0 / data.n
            logw.append(math.log(c.weight) - 0.5 * math.log(mvar)
                        - 0.5 * (ybar - c.mean) ** 2 / mvar if c.weight > 0 else -math.inf)
    else:
        s = data.total
        if s < 0 or s > data.n:
            raise ValueError("binary successes must lie in [0, n]")
        f = data.n - s
        for c in prior.components:
            a, b = c.mean * c.scale, (1.0 - c.mean) * c.scale
            a2, b2 = a + s, b + f
            comps.append((a2 / (a2 + b2), a2 + b2))
            logw.append(math.log(c.weight) + betaln(a2, b2) - betaln(a, b)
                        if c.weight > 0 else -math.inf)

    top = max(logw)
    raw = [math.exp(lw - top) if math.isfinite(lw) else 0.0 for lw in logw]
    norm = sum(raw)
    new = tuple(
        PriorComponent(r / norm, mean, scale)
        for r, (mean, scale) in zip(raw, comps)
    )
    return PriorSpec(prior.family, new)


# ---------------------------------------------------------------------------
# Hellinger distances
# ---------------------------------------------------------------------------


def hellinger_normal(p: PriorSpec, q: PriorSpec) -> float:
    """Closed-form Hellinger distance between two normal densities.

    H^2 = 1 - sqrt(2 s1 s2 / (s1^2 + s2^2)) * exp(-(m1 - m2)^2 / (4 (s1^2 + s2^2)))
    """
    _check_single(p, "p")
    _check_single(q, "q")
    if p.family != NORMAL or q.family != NORMAL:
        raise ValueError("hellinger_normal expects normal priors")
    c1, c2 = p.components[0], q.components[0]
    ssum = c1.scale * c1.scale + c2.scale * c2.scale
    bc = math.sqrt(2.0 * c1.scale * c2.scale / ssum) * math.exp(
        -0.25 * (c1.mean - c2.mean) ** 2 / ssum
    )
    return math.sqrt(max(0.0, 1.0 - bc))


def hellinger_beta(p: PriorSpec, q: PriorSpec) -> float:
    """Closed-form Hellinger distance between two beta densities.

    Uses log-beta-function arithmetic throughout; the direct ratio of beta
    functions overflows once the precision parameters reach a few hundred.
    """
    _check_single(p, "p")
    _check_single(q, "q")
    if p.family != BETA or q.family != BETA:
        raise ValueError("hellinger_beta expects beta priors")
    a1, b1 = p.beta_shapes()
    a2, b2 = q.beta_shapes()
    a1, b1, a2, b2 = float(a1[0]), float(b1[0]), float(a2[0]), float(b2[0])
    log_bc = betaln(0.5 * (a1 + a2), 0.5 * (b1 + b2)) - 0.5 * (
        betaln(a1, b1) + betaln(a2, b2)
    )
    # 1 - exp(log_bc), stable when the densities nearly coincide
    return math.sqrt(max(0.0, -math.expm1(min(log_bc, 0.0))))


def _quad(f: Callable[[float], float], lo: float, hi: float,
          points: Sequence[float] | None = None,
          epsabs: float = _QUAD_EPSABS, epsrel: float = _QUAD_EPSREL,
          max_abserr: float = _QUAD_MAX_ABSERR, what: str = "quadrature") -> float:
    res = integrate.quad(f, lo, hi, epsabs=epsabs, epsrel=epsrel,
                         limit=300, points=points, full_output=1)
    value, abserr = res[0], res[1]
    # ignore the roundoff/subdivision flag as long as the achieved error is
    # within what the caller can tolerate
    if not math.isfinite(value) or abserr > max_abserr:
        raise NumericsError(f"{what} did not converge (abserr={abserr!r})")
    return value


def _scalar_pdf(prior: PriorSpec) -> Callable[[float], float]:
    """Plain-math mixture density for quadrature callbacks (scalar x)."""
    if prior.family == NORMAL:
        terms = [
            (c.weight / (c.scale * math.sqrt(2.0 * math.pi)), c.mean,
             0.5 / (c.scale * c.scale))
            for c in prior.components
        ]

        def pdf(x: float) -> float:
            total = 0.0
            for amp, m, k in terms:
                total += amp * math.exp(-k * (x - m) * (x - m))
            return total

    else:
        shapes = [
            (c.weight, c.mean * c.scale, (1.0 - c.mean) * c.scale)
            for c in prior.components
        ]
        terms = [(w, a, b, float(betaln(a, b))) for w, a, b in shapes]

        def pdf(x: float) -> float:
            x = min(max(x, _BETA_EPS), 1.0 - _BETA_EPS)
            total = 0.0
            for w, a, b, lnb in terms:
                total += w * math.exp(
                    (a - 1.0) * math.log(x) + (b - 1.0) * math.log1p(-x) - lnb
                )
            return total

    return pdf


def hellinger_numeric(p: PriorSpec, q: PriorSpec) -> float:
    """Hellinger distance by adaptive quadrature; either input may be a mixture.

    Integrates the squared-difference form of the Hellinger integrand, which
    is algebraically identical to 1 minus the Bhattacharyya coefficient and
    vanishes pointwise when the densities coincide, so H(p, p) is numerically
    zero instead of sqrt(quadrature noise).
    """
    if p.family != q.family:
        raise ValueError("densities must share a support to be compared")
    lo = min(p.support()[0], q.support()[0])
    hi = max(p.support()[1], q.support()[1])
    pts = sorted(
        x for x in list(p.means()) + list(q.means()) if lo < x < hi
    )
    pdf_p, pdf_q = _scalar_pdf(p), _scalar_pdf(q)

    def integrand(x: float) -> float:
        d = math.sqrt(pdf_p(x)) - math.sqrt(pdf_q(x))
        return d * d

    h2 = 0.5 * _quad(integrand, lo, hi, points=pts or None, what="hellinger quadrature")
    return math.sqrt(min(1.0, max(0.0, h2)))


# ---------------------------------------------------------------------------
# Posterior functionals of the treatment effect
# ---------------------------------------------------------------------------


def prob_delta_positive(post_t: PriorSpec, post_c: PriorSpec, model: OutcomeModel) -> float:
    """P(effect > 0) for independent arm posteriors.

    Continuous: exact sum of Gaussian tail probabilities over component pairs.
    Binary: integral of (treatment density) * (control CDF) over (0, 1) by
    adaptive quadrature.
    """
    if post_t.family != post_c.family:
        raise ValueError("posterior families do not match")
    _check_family(post_t, model, "treatment posterior")
    if model.kind == CONTINUOUS:
        total = 0.0
        for ct in post_t.components:
            for cc in post_c.components:
                s = math.sqrt(ct.scale**2 + cc.scale**2)
                total += ct.weight * cc.weight * _phi((ct.mean - cc.mean) / s)
        return min(1.0, max(0.0, total))

    # scalar closures keep the quadrature callback cheap
    dens_t = [(c.weight, a, b, betaln(a, b))
              for c, a, b in zip(post_t.components, *post_t.beta_shapes())]
    cdf_c = [(c.weight, a, b)
             for c, a, b in zip(post_c.components, *post_c.beta_shapes())]

    def integrand(x: float) -> float:
        x = min(max(x, _BETA_EPS), 1.0 - _BETA_EPS)
        f = 0.0
        for w, a, b, lnb in dens_t:
            f += w * math.exp((a - 1.0) * math.log(x) + (b - 1.0) * math.log1p(-x) - lnb)
        big_f = 0.0
        for w, a, b in cdf_c:
            big_f += w * float(betainc(a, b, x))
        return f * big_f

    pts = sorted(set(float(m) for m in post_t.means()) | set(float(m) for m in post_c.means()))
    val = _quad(integrand, 0.0, 1.0, points=pts, epsabs=1e-9, epsrel=1e-9,
                max_abserr=1e-6, what="success-probability quadrature")
    return min(1.0, max(0.0, val))


def _delta_cdf_normal(post_t: PriorSpec, post_c: PriorSpec, x: float) -> float:
    total = 0.0
    for ct in post_t.components:
        for cc in post_c.components:
            s = math.sqrt(ct.scale**2 + cc.scale**2)
            total += ct.weight * cc.weight * _phi((x - (ct.mean - cc.mean)) / s)
    return total


def delta_point_and_interval(
    post_t: PriorSpec,
    post_c: PriorSpec,
    model: OutcomeModel,
    level: float = 0.95,
    stream: np.random.Generator | None = None,
    draws: int = 100_000,
) -> tuple[float, float, float]:
    """Posterior mean and equal-tailed credible interval of the effect.

    Continuous: quantiles by root-finding on the exact mixture-difference CDF.
    Binary: quantiles from ``draws`` paired Monte Carlo samples taken from the
    caller-supplied ``stream`` (required for the binary path).
    """
    if not (0.0 < level < 1.0):
        raise ValueError("credible level must be in (0, 1)")
    if post_t.family != post_c.family:
        raise ValueError("posterior families do not match")
    _check_family(post_t, model, "treatment posterior")
    point = post_t.mean() - post_c.mean()
    q_lo, q_hi = 0.5 * (1.0 - level), 0.5 * (1.0 + level)

    if model.kind == CONTINUOUS:
        from scipy.optimize import brentq

        pair_means = [ct.mean - cc.mean for ct in post_t.components for cc in post_c.components]
        pair_sds = [math.sqrt(ct.scale**2 + cc.scale**2)
                    for ct in post_t.components for cc in post_c.components]
        lo_b = min(pair_means) - 12.0 * max(pair_sds)
        hi_b = max(pair_means) + 12.0 * max(pair_sds)
        lo = brentq(lambda x: _delta_cdf_normal(post_t, post_c, x) - q_lo, lo_b, hi_b, xtol=1e-8)
        hi = brentq(lambda x: _delta_cdf_normal(post_t, post_c, x) - q_hi, lo_b, hi_b, xtol=1e-8)
        return point, float(lo), float(hi)

    if stream is None:
        raise ValueError("binary credible intervals need a random stream")
    delta = post_t.sample(stream, draws) - post_c.sample(stream, draws)
    lo, hi = np.quantile(delta, [q_lo, q_hi])
    return point, float(lo), float(hi)
