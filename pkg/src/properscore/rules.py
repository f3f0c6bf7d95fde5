"""Scoring rules for forecasts on the real line (lower score is better).

Families implemented:

* ``wcrps`` / ``crps`` -- (weighted) continuous ranked probability score;
* ``s_alpha`` -- ``int |F(x) - 1{y < x}|^alpha dx`` and its properization
  ``s_alpha_star`` through the Brehmer-Gneiting map;
* ``s_tilde`` -- the Anderson-Darling style rule
  ``int |F - 1{y < x}|^(2 alpha) / (F (1 - F))^alpha w dx`` and its
  properization ``s_tilde_star``, which has an alpha-free closed form;
* ``log_score`` on finite discrete laws, and the two ``remark_*`` rules that
  integrate against F(dx) instead of dx.

Inside a tail the S-tilde integrands are powers of the odds ``F / (1 - F)``,
so they are evaluated as ``exp(+-alpha * log_odds)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Any, Callable

import numpy as np

from . import weights as wmod
from .dist import DiscreteDistribution, Dirac, Distribution, DomainError, OddsPower
from .quad import DEFAULT, IntegralResult, QuadConfig, combine, expect_under, integrate_real_line
from .weights import UNIT, WeightSpec, require_strictly_positive

ScoreValue = IntegralResult


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not (alpha > 0 and math.isfinite(alpha)):
        raise DomainError(f"alpha must be positive and finite, got {alpha}")
    return alpha


def _require_p01(F: Distribution) -> None:
    if not F.in_p01:
        raise DomainError("distribution not in P_(0,1)")


def _points(F: Distribution, y, w: WeightSpec | None, cfg: QuadConfig) -> list[float]:
    pts = list(F.breakpoints(cfg.tail_cutoff_probability))
    if w is not None:
        pts.extend(w.breakpoints())
    pts.extend(np.atleast_1d(y).tolist())
    return pts


def _scale(F: Distribution) -> float | None:
    if F.is_atomic:
        return None
    q = np.asarray(F.quantile(np.array([0.25, 0.75])))
    return float(q[1] - q[0]) if q[1] > q[0] else None


def _line_integral(integrand, F, y, w, cfg) -> ScoreValue:
    res = integrate_real_line(integrand, cfg, points=_points(F, y, w, cfg), scale=_scale(F),
                              on_nonfinite="diverge")
    if not res.divergent and res.value < 0:
        # nonnegative integrand; only roundoff can push the sum below zero
        res = IntegralResult(0.0, res.error_estimate, res.converged, False, res.n_intervals)
    return res


# ---------------------------------------------------------------------------
# CRPS family


def wcrps(P: Distribution, y: float, w: WeightSpec = UNIT, cfg: QuadConfig = DEFAULT) -> ScoreValue:
    """Threshold-weighted CRPS, ``int (P(x) - 1{y < x})^2 w(x) dx``."""
    y = float(y)

    def integrand(x):
        above = x > y
        base = np.where(above, P.sf(x), P.cdf(x))
        return base * base * w(x)

    return _line_integral(integrand, P, y, w, cfg)


def crps(P: Distribution, y: float, cfg: QuadConfig = DEFAULT) -> ScoreValue:
    return wcrps(P, y, UNIT, cfg)


def s_alpha(P: Distribution, y: float, alpha: float, cfg: QuadConfig = DEFAULT) -> ScoreValue:
    """``int |P(x) - 1{y < x}|^alpha dx``; alpha = 2 is the CRPS."""
    alpha = _check_alpha(alpha)
    y = float(y)

    def integrand(x):
        above = x > y
        return np.where(above, P.sf(x), P.cdf(x)) ** alpha

    return _line_integral(integrand, P, y, None, cfg)


def properize_map_bg(P: Distribution, alpha: float) -> Distribution:
    """Bayes act of ``s_alpha`` under P.

    For alpha > 1 the odds of P are raised to ``1 / (alpha - 1)``; for
    alpha <= 1 it is the point mass at the (lower) median of P.
    """
    alpha = _check_alpha(alpha)
    if alpha <= 1:
        return Dirac(P.median())
    return OddsPower(P, 1.0 / (alpha - 1.0))


def s_alpha_star(P: Distribution, y: float, alpha: float, cfg: QuadConfig = DEFAULT) -> ScoreValue:
    return s_alpha(properize_map_bg(P, alpha), y, alpha, cfg)


# ---------------------------------------------------------------------------
# S-tilde family


def p_tilde_star(P: Distribution, alpha: float) -> OddsPower:
    """x -> (1 + ((1 - P(x)) / P(x)) ** (1 / (2 alpha))) ** -1 as a distribution."""
    alpha = _check_alpha(alpha)
    _require_p01(P)
    return OddsPower(P, 1.0 / (2.0 * alpha))


def _odds_power_integrand(F: Distribution, y: float, k: float, w: WeightSpec) -> Callable:
    # ((1-F)/F)^k above y, (F/(1-F))^k at or below y
    def integrand(x):
        lo = np.asarray(F.log_odds(x), dtype=float)
        sgn = np.where(x > y, -1.0, 1.0)
        with np.errstate(over="ignore"):
            return np.exp(sgn * k * lo) * w(x)

    return integrand


def s_tilde(F: Distribution, y: float, alpha: float, w: WeightSpec = UNIT,
            cfg: QuadConfig = DEFAULT) -> ScoreValue:
    alpha = _check_alpha(alpha)
    _require_p01(F)
    require_strictly_positive(w)
    return _line_integral(_odds_power_integrand(F, float(y), alpha, w), F, y, w, cfg)


def s_tilde_star(F: Distribution, y: float, w: WeightSpec = UNIT, cfg: QuadConfig = DEFAULT,
                 alpha: float | None = None) -> ScoreValue:
    """Properized S-tilde via its closed form.

    ``int |1{x > y} - F|^(1/2) / |1 - 1{x > y} - F|^(1/2) w dx``; the value
    does not depend on alpha, which is accepted only for interface symmetry.
    """
    if alpha is not None:
        _check_alpha(alpha)
    _require_p01(F)
    require_strictly_positive(w)
    return _line_integral(_odds_power_integrand(F, float(y), 0.5, w), F, y, w, cfg)


def expected_s_tilde_closed(F: Distribution, G: Distribution, alpha: float, w: WeightSpec = UNIT,
                            cfg: QuadConfig = DEFAULT) -> ScoreValue:
    """E_{y~G} s_tilde(F, y) after exchanging the integrals.

    ``int [((1-F)/F)^alpha G + (F/(1-F))^alpha (1-G)] w dx``.
    """
    alpha = _check_alpha(alpha)
    _require_p01(F)
    require_strictly_positive(w)
    return _tonelli_odds(F, G, alpha, w, cfg)


def _tonelli_odds(F, G, k, w, cfg) -> ScoreValue:
    def integrand(x):
        lo = np.asarray(F.log_odds(x), dtype=float)
        lg = np.asarray(G.logcdf(x), dtype=float)
        ls = np.asarray(G.logsf(x), dtype=float)
        with np.errstate(over="ignore", invalid="ignore"):
            t1 = np.exp(-k * lo + lg)
            t2 = np.exp(k * lo + ls)
        # 0 * inf: G puts no mass on that side, so the term vanishes
        t1 = np.where(np.isneginf(lg), 0.0, t1)
        t2 = np.where(np.isneginf(ls), 0.0, t2)
        return (t1 + t2) * w(x)

    pts = list(G.breakpoints(cfg.tail_cutoff_probability)) + _points(F, [], w, cfg)
    res = integrate_real_line(integrand, cfg, points=pts, scale=_scale(G) or _scale(F),
                              on_nonfinite="diverge")
    return res


def entropy_s_tilde(G: Distribution, w: WeightSpec = UNIT, cfg: QuadConfig = DEFAULT) -> ScoreValue:
    """``2 int sqrt(G (1 - G)) w dx``, the expected properized score under G itself."""
    _require_p01(G)

    def integrand(x):
        return 2.0 * np.exp(0.5 * (np.asarray(G.logcdf(x)) + np.asarray(G.logsf(x)))) * w(x)

    return _line_integral(integrand, G, [], w, cfg)


# ---------------------------------------------------------------------------
# pointwise expected score g(q) = [((1-q)/q)^a p + (q/(1-q))^a (1-p)] w


def g_eval(q, p, alpha: float, wx=1.0):
    q = np.asarray(q, dtype=float)
    r = (1.0 - q) / q
    return _result_like(q, p, (r**alpha * p + r ** (-alpha) * (1.0 - np.asarray(p))) * wx)


def g_prime(q, p, alpha: float, wx=1.0):
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    a = alpha
    out = (a * ((1 - q) / q) ** (a - 1) * (-1.0 / q**2) * p
           + a * (q / (1 - q)) ** (a - 1) / (1 - q) ** 2 * (1 - p)) * wx
    return _result_like(q, p, out)


def g_double_prime(q, p, alpha: float, wx=1.0):
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    a = alpha
    out = (a * ((1 - q) / q) ** (a - 2) * (a + 1 - 2 * q) / q**4 * p
           + a * (q / (1 - q)) ** (a - 2) * (a - 1 + 2 * q) / (1 - q) ** 4 * (1 - p)) * wx
    return _result_like(q, p, out)


def argmin_g(p, alpha: float):
    """Minimiser of g over q in (0, 1): the pointwise value of the properization map."""
    alpha = _check_alpha(alpha)
    p = np.asarray(p, dtype=float)
    out = 1.0 / (1.0 + ((1.0 - p) / p) ** (1.0 / (2.0 * alpha)))
    return float(out) if out.ndim == 0 else out


def _result_like(q, p, out):
    return float(out) if np.ndim(q) == 0 and np.ndim(p) == 0 else out


# ---------------------------------------------------------------------------
# logarithmic score


def log_score(d: DiscreteDistribution, outcome: float) -> float:
    """-log2 of the mass at ``outcome``; 0 for outcomes off the support."""
    m = d.mass_at(float(outcome))
    return -math.log2(m) if m > 0 else 0.0


def shannon_entropy(d: DiscreteDistribution) -> float:
    return float(-np.dot(d.masses, np.log2(d.masses)))


# ---------------------------------------------------------------------------
# rules integrated against F(dx)


def _need_density(F: Distribution) -> None:
    if not F.has_density:
        raise DomainError("rule requires a distribution with a density")


def remark_first(F: Distribution, y: float, alpha: float, cfg: QuadConfig = DEFAULT) -> ScoreValue:
    """``int |F(x) - 1{y < x}|^(2 alpha) F(dx)``."""
    alpha = _check_alpha(alpha)
    _need_density(F)
    y = float(y)

    def h(x):
        return np.where(x > y, F.sf(x), F.cdf(x)) ** (2 * alpha)

    return expect_under(F, h, cfg, points=[y], on_nonfinite="diverge")


def remark_second(F: Distribution, y: float, alpha: float, cfg: QuadConfig = DEFAULT) -> ScoreValue:
    """``int |F(x) - 1{y < x}|^(2 alpha) / (F (1 - F))^alpha F(dx)``; alpha = 1 is Anderson-Darling."""
    alpha = _check_alpha(alpha)
    _need_density(F)
    _require_p01(F)
    return expect_under(F, _odds_power_integrand(F, float(y), alpha, UNIT), cfg, points=[float(y)],
                        on_nonfinite="diverge")


# ---------------------------------------------------------------------------
# rule specifications


RULE_NAMES = (
    "crps", "wcrps", "s_alpha", "s_alpha_star", "s_tilde", "s_tilde_star",
    "log_score", "remark_first", "remark_second",
)
_NEEDS_ALPHA = {"s_alpha", "s_alpha_star", "s_tilde", "remark_first", "remark_second"}
_HAS_WEIGHT = {"wcrps", "s_tilde", "s_tilde_star"}


@dataclass(frozen=True)
class RuleSpec:
    name: str
    alpha: float | None = None
    weight: WeightSpec | None = None

    def __post_init__(self):
        if self.name not in RULE_NAMES:
            raise DomainError(f"unknown rule {self.name!r}")
        alpha = self.alpha
        if alpha is None and self.name == "s_tilde_star":
            alpha = 1.0
        if self.name in _NEEDS_ALPHA or self.name == "s_tilde_star":
            if alpha is None:
                raise DomainError(f"rule {self.name} needs alpha")
            alpha = _check_alpha(alpha)
        object.__setattr__(self, "alpha", alpha)
        w = self.weight
        if self.name in _HAS_WEIGHT:
            w = w or UNIT
            if self.name in ("s_tilde", "s_tilde_star"):
                require_strictly_positive(w)
        elif w is not None:
            raise DomainError(f"rule {self.name} takes no weight")
        object.__setattr__(self, "weight", w)

    @property
    def requires_p01(self) -> bool:
        return self.name in ("s_tilde", "s_tilde_star", "remark_second")

    def check_forecast(self, F: Distribution) -> None:
        if self.requires_p01:
            _require_p01(F)
        if self.name == "log_score" and not isinstance(F, DiscreteDistribution):
            raise DomainError("log_score needs a discrete forecast")
        if self.name.startswith("remark"):
            _need_density(F)

    def score(self, F: Distribution, y: float, cfg: QuadConfig = DEFAULT) -> ScoreValue:
        n, a, w = self.name, self.alpha, self.weight
        if n == "crps":
            return crps(F, y, cfg)
        if n == "wcrps":
            return wcrps(F, y, w, cfg)
        if n == "s_alpha":
            return s_alpha(F, y, a, cfg)
        if n == "s_alpha_star":
            return s_alpha_star(F, y, a, cfg)
        if n == "s_tilde":
            return s_tilde(F, y, a, w, cfg)
        if n == "s_tilde_star":
            return s_tilde_star(F, y, w, cfg)
        if n == "log_score":
            self.check_forecast(F)
            return IntegralResult.exact(log_score(F, y))
        if n == "remark_first":
            return remark_first(F, y, a, cfg)
        return remark_second(F, y, a, cfg)

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"rule": self.name}
        if self.alpha is not None:
            out["alpha"] = self.alpha
        if self.weight is not None:
            out["weight"] = self.weight.to_dict()
        return out

    @classmethod
    def from_dict(cls, obj: Any) -> "RuleSpec":
        if not isinstance(obj, dict) or "rule" not in obj:
            raise DomainError(f"rule specification must be an object with a 'rule' field: {obj!r}")
        alpha = obj.get("alpha")
        if alpha is not None and (isinstance(alpha, bool) or not isinstance(alpha, (int, float))):
            raise DomainError("alpha must be a number")
        weight = obj.get("weight")
        return cls(obj["rule"], None if alpha is None else float(alpha),
                   None if weight is None else wmod.from_dict(weight))


def score(rule: RuleSpec, F: Distribution, y: float, cfg: QuadConfig = DEFAULT) -> ScoreValue:
    return rule.score(F, y, cfg)


# ---------------------------------------------------------------------------
# expected scores


def expected_score(rule: RuleSpec, F: Distribution, G: Distribution, cfg: QuadConfig = DEFAULT,
                   method: str = "direct") -> ScoreValue:
    """S(F, G) = E_{y~G} S(F, y).

    ``method="direct"`` scores every quadrature node y and averages
    (score-then-average).  ``method="reduced"`` exchanges the integrals
    first, using ``E_G 1{y < x} = G(x)``; it exists for every rule of the
    CRPS and S-tilde families and is much cheaper.  The two routes are
    independent and are cross-checked in the tests.
    """
    rule.check_forecast(F)
    if method == "reduced":
        return _expected_reduced(rule, F, G, cfg)
    if method != "direct":
        raise ValueError(f"unknown method {method!r}")
    if rule.name == "log_score":
        if not G.is_atomic:
            raise DomainError("log_score expectation needs a discrete verifying law")
        pts, masses = G.atoms()
        return IntegralResult.exact(float(sum(m * log_score(F, p) for p, m in zip(pts, masses))))

    # Inner scores far in the tails of G are huge but finite; the magnitude
    # threshold would misreport them as infinite.
    inner_cfg = replace(cfg, divergence_threshold=math.inf)

    def scores(ys):
        out = np.empty(ys.shape)
        for i, yv in enumerate(ys):
            out[i] = rule.score(F, float(yv), inner_cfg).value
        return out

    extra = list(F.breakpoints(cfg.tail_cutoff_probability)) if F.is_atomic else []
    extra += list(rule.weight.breakpoints()) if rule.weight is not None else []
    return expect_under(G, scores, cfg, points=extra, on_nonfinite="diverge")


def _expected_reduced(rule: RuleSpec, F: Distribution, G: Distribution, cfg: QuadConfig) -> ScoreValue:
    n, a = rule.name, rule.alpha
    if n in ("s_tilde", "s_tilde_star"):
        k = 0.5 if n == "s_tilde_star" else a
        return _tonelli_odds(F, G, k, rule.weight, cfg)
    if n in ("crps", "wcrps"):
        return _tonelli_power(F, G, 2.0, rule.weight or UNIT, cfg)
    if n == "s_alpha":
        return _tonelli_power(F, G, a, UNIT, cfg)
    if n == "s_alpha_star":
        return _tonelli_power(properize_map_bg(F, a), G, a, UNIT, cfg)
    if n == "log_score":
        return expected_score(rule, F, G, cfg, method="direct")
    raise DomainError(f"no reduced expectation for rule {n}")


def _tonelli_power(F, G, alpha, w, cfg) -> ScoreValue:
    # E_G |F(x) - 1{y < x}|^a = F(x)^a (1 - G(x)) + (1 - F(x))^a G(x)
    def integrand(x):
        return (np.asarray(F.cdf(x)) ** alpha * np.asarray(G.sf(x))
                + np.asarray(F.sf(x)) ** alpha * np.asarray(G.cdf(x))) * w(x)

    pts = list(G.breakpoints(cfg.tail_cutoff_probability)) + _points(F, [], w, cfg)
    scale = _scale(G) or _scale(F)
    return integrate_real_line(integrand, cfg, points=pts, scale=scale, on_nonfinite="diverge")


__all__ = [
    "ScoreValue", "RuleSpec", "RULE_NAMES", "wcrps", "crps", "s_alpha", "properize_map_bg",
    "s_alpha_star", "p_tilde_star", "s_tilde", "s_tilde_star", "expected_score",
    "expected_s_tilde_closed", "entropy_s_tilde", "g_eval", "g_prime", "g_double_prime",
    "argmin_g", "log_score", "shannon_entropy", "remark_first", "remark_second", "score",
    "combine",
]
