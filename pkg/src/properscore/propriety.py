"""Numerical checks of (strict) propriety on finite grids of distributions."""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from . import dist as dmod
from .dist import Distribution, DomainError
from .quad import DEFAULT, IntegralResult, QuadConfig, integrate_real_line
from .rules import (
    RuleSpec,
    argmin_g,
    entropy_s_tilde,
    expected_s_tilde_closed,
    expected_score,
    g_eval,
    p_tilde_star,
)
from .weights import UNIT, WeightSpec, require_strictly_positive


@dataclass(frozen=True)
class DistGrid:
    """Either a family with a (loc x scale) lattice or an explicit member list."""

    family: str | None = None
    locs: tuple[float, ...] = ()
    scales: tuple[float, ...] = ()
    members: tuple[Distribution, ...] = ()

    def distributions(self) -> list[Distribution]:
        out = list(self.members)
        if self.family is not None:
            if self.family == "binary":
                # Bernoulli laws on {0, 1}; ``locs`` holds the success probabilities
                out += [dmod.DiscreteDistribution([0.0, 1.0], [1 - p, p]) for p in self.locs]
            else:
                for loc, sc in itertools.product(self.locs, self.scales):
                    out.append(dmod.from_dict({"kind": self.family, "loc": loc, "scale": sc}))
        if not out:
            raise DomainError("empty distribution grid")
        return out

    def describe(self) -> dict[str, Any]:
        d: dict[str, Any] = {}
        if self.family is not None:
            d.update(family=self.family, locs=list(self.locs), scales=list(self.scales))
        if self.members:
            d["members"] = [m.to_dict() for m in self.members]
        return d

    @classmethod
    def from_dict(cls, obj: Any) -> "DistGrid":
        if not isinstance(obj, dict):
            raise DomainError("grid specification must be a JSON object")
        members = tuple(dmod.from_dict(m) for m in obj.get("members", []))
        family = obj.get("family")
        if family is None:
            return cls(members=members)
        if family == "binary":
            ps = tuple(float(p) for p in obj.get("p", obj.get("locs", [])))
            return cls(family="binary", locs=ps, members=members)
        return cls(
            family=family,
            locs=tuple(float(v) for v in obj.get("locs", [0.0])),
            scales=tuple(float(v) for v in obj.get("scales", [1.0])),
            members=members,
        )


@dataclass
class PropReport:
    rule: RuleSpec
    grid: dict[str, Any]
    matrix: np.ndarray  # matrix[i, j] = S(F_i, G_j)
    tolerance: float
    worst_margin: float
    violation: tuple[int, int] | None
    inconclusive_columns: list[int]
    diagnostics: list[list[IntegralResult]] = field(repr=False, default_factory=list)
    challenger: dict[str, Any] | None = None

    @property
    def proper(self) -> bool:
        return self.violation is None

    def margins(self) -> np.ndarray:
        """margins[i, j] = M[i, j] - M[j, j] (nan where undefined)."""
        diag = np.diag(self.matrix)
        with np.errstate(invalid="ignore"):
            return self.matrix - diag[None, :]

    def to_dict(self) -> dict[str, Any]:
        def num(v):
            return None if not math.isfinite(v) else float(v)

        return {
            "rule": self.rule.to_dict(),
            "grid": self.grid,
            "proper": self.proper,
            "tolerance": self.tolerance,
            "worst_margin": num(self.worst_margin) if not math.isinf(self.worst_margin) else "inf",
            "violation": list(self.violation) if self.violation else None,
            "inconclusive_columns": self.inconclusive_columns,
            "matrix": [[num(v) for v in row] for row in self.matrix],
            "divergent": [[bool(r.divergent) for r in row] for row in self.diagnostics],
            "challenger": self.challenger,
        }


def score_matrix(rule: RuleSpec, grid: DistGrid | Sequence[Distribution], cfg: QuadConfig = DEFAULT,
                 method: str = "reduced", threads: int = 1) -> list[list[IntegralResult]]:
    """Entries M[i][j] = E_{y ~ G_j} S(F_i, y); +inf entries carry divergent flags."""
    members = grid.distributions() if isinstance(grid, DistGrid) else list(grid)
    for d in members:
        rule.check_forecast(d)
    pairs = [(i, j) for i in range(len(members)) for j in range(len(members))]

    def entry(ij):
        i, j = ij
        return expected_score(rule, members[i], members[j], cfg, method=method)

    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            flat = list(ex.map(entry, pairs))
    else:
        flat = [entry(ij) for ij in pairs]
    n = len(members)
    return [flat[i * n:(i + 1) * n] for i in range(n)]


def check_proper(rule: RuleSpec, grid: DistGrid | Sequence[Distribution], cfg: QuadConfig = DEFAULT,
                 tolerance: float = 1e-6, method: str = "reduced", threads: int = 1) -> PropReport:
    """Test S(G_j, G_j) <= S(F_i, G_j) + tolerance over the grid.

    A column whose diagonal entry is +inf is inconclusive when every other
    entry in it is +inf too; a finite challenger against an infinite
    diagonal is a violation in the extended reals.
    """
    if not tolerance > 0:
        raise ValueError("tolerance must be positive")
    diag_results = score_matrix(rule, grid, cfg, method=method, threads=threads)
    M = np.array([[r.value for r in row] for row in diag_results])
    n = M.shape[0]
    worst = math.inf
    violation = None
    inconclusive = []
    for j in range(n):
        others = [i for i in range(n) if i != j]
        if math.isinf(M[j, j]):
            if all(math.isinf(M[i, j]) for i in others):
                inconclusive.append(j)
                continue
        for i in others:
            if math.isinf(M[i, j]) and math.isinf(M[j, j]):
                continue
            margin = M[i, j] - M[j, j]
            worst = min(worst, margin)
            if margin < -tolerance and violation is None:
                violation = (i, j)
    if n == 1:
        worst = 0.0
    grid_desc = grid.describe() if isinstance(grid, DistGrid) else {"members": [_describe(d) for d in grid]}
    return PropReport(rule, grid_desc, M, tolerance, worst, violation, inconclusive, diag_results)


def _describe(d: Distribution) -> Any:
    try:
        return d.to_dict()
    except NotImplementedError:
        return repr(d)


@dataclass(frozen=True)
class Violation:
    challenger: Distribution
    margin: float  # S(G, G) - S(challenger, G); > 0 certifies impropriety
    truthful: IntegralResult
    challenger_score: IntegralResult


def find_violation(rule: RuleSpec, G: Distribution, cfg: QuadConfig = DEFAULT) -> Violation | None:
    """Pit the properization image of G against G itself under the raw S-tilde rule.

    Returns None when the challenger's own expected score diverges, since no
    conclusion can be drawn then.  The margin is +inf when only the truthful
    forecast has an infinite expected score.
    """
    if rule.name != "s_tilde":
        raise DomainError("find_violation applies to the unproperized s_tilde rule")
    alpha, w = rule.alpha, rule.weight
    challenger = p_tilde_star(G, alpha)
    truthful = expected_s_tilde_closed(G, G, alpha, w, cfg)
    rival = expected_s_tilde_closed(challenger, G, alpha, w, cfg)
    if rival.divergent:
        return None
    if truthful.divergent:
        return Violation(challenger, math.inf, truthful, rival)
    return Violation(challenger, truthful.value - rival.value, truthful, rival)


@dataclass(frozen=True)
class StrictnessVerdict:
    gap: float  # S*(F, G) - S*(G, G), computed from the AM-GM integrand
    max_cdf_deviation: float
    cdf_tolerance: float
    equal_scores: bool
    identical: bool

    @property
    def counterexample(self) -> bool:
        """Equal expected scores although the distributions differ."""
        return self.equal_scores and not self.identical


def amgm_gap(p, q):
    """(1/2)[u q + (1 - q) / u] - sqrt(q (1 - q)) with u = sqrt((1 - p) / p).

    Evaluated as ``(sqrt(u q) - sqrt((1 - q) / u))**2 / 2``, which is the same
    quantity written without cancellation; it vanishes exactly when p = q.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if np.any((p <= 0) | (p >= 1) | (q <= 0) | (q >= 1)):
        raise DomainError("amgm_gap needs p, q in (0, 1)")
    lu = 0.5 * (np.log1p(-p) - np.log(p))
    out = _gap_from_logs(lu, np.log(q), np.log1p(-q))
    return float(out) if out.ndim == 0 else out


def _gap_from_logs(log_u, log_q, log_1mq):
    a = np.exp(0.5 * (log_u + log_q))
    b = np.exp(0.5 * (log_1mq - log_u))
    return 0.5 * (a - b) ** 2


def _strict_gap(F: Distribution, G: Distribution, w: WeightSpec, cfg: QuadConfig) -> IntegralResult:
    def integrand(x):
        lu = -0.5 * np.asarray(F.log_odds(x), dtype=float)
        with np.errstate(over="ignore", invalid="ignore"):
            g = _gap_from_logs(lu, np.asarray(G.logcdf(x)), np.asarray(G.logsf(x)))
        return 2.0 * g * w(x)

    pts = list(F.breakpoints(cfg.tail_cutoff_probability)) + list(G.breakpoints(cfg.tail_cutoff_probability))
    pts += list(w.breakpoints())
    q = np.asarray(G.quantile(np.array([0.25, 0.75])))
    return integrate_real_line(integrand, cfg, points=pts, scale=float(q[1] - q[0]), on_nonfinite="diverge")


def _check_subclass(d: Distribution, w: WeightSpec, cfg: QuadConfig) -> None:
    if not (d.has_density and d.in_p01 and d.atoms()[0].size == 0):
        raise DomainError("strictness check needs continuous members of P_(0,1)")
    ent = entropy_s_tilde(d, w, cfg)
    if not ent.finite:
        raise DomainError("strictness check needs a finite expected score under truth-telling")


def strictness_check(F: Distribution, G: Distribution, cfg: QuadConfig = DEFAULT, tolerance: float = 1e-9,
                     w: WeightSpec = UNIT, n_grid: int = 20001) -> StrictnessVerdict:
    """Check that equal expected properized scores force F == G.

    The CDF tolerance is ``sqrt(tolerance)``: the pointwise gap is quadratic
    in F(x) - G(x), so a score gap of size t allows CDF deviations of order
    sqrt(t).
    """
    require_strictly_positive(w)
    _check_subclass(F, w, cfg)
    _check_subclass(G, w, cfg)
    gap = _strict_gap(F, G, w, cfg)
    gap_value = gap.value
    lo = min(F.quantile(1e-9), G.quantile(1e-9))
    hi = max(F.quantile(1 - 1e-9), G.quantile(1 - 1e-9))
    xs = np.linspace(lo, hi, n_grid)
    dev = float(np.max(np.abs(np.asarray(F.cdf(xs)) - np.asarray(G.cdf(xs)))))
    cdf_tol = math.sqrt(tolerance)
    equal = gap_value <= tolerance
    return StrictnessVerdict(gap_value, dev, cdf_tol, bool(equal), bool(dev <= cdf_tol))


def verify_bayes_act(G: Distribution, alpha: float, x_grid, q_grid) -> float:
    """Max |brute-force argmin of g - closed-form minimiser| over ``x_grid``."""
    if not G.in_p01:
        raise DomainError("distribution not in P_(0,1)")
    xs = np.asarray(x_grid, dtype=float)
    qs = np.asarray(q_grid, dtype=float)
    qs = qs[(qs > 0) & (qs < 1)]
    ps = np.asarray(G.cdf(xs), dtype=float)
    worst = 0.0
    with np.errstate(over="ignore"):
        for p in ps:
            brute = qs[np.argmin(g_eval(qs, p, alpha))]
            worst = max(worst, abs(brute - argmin_g(p, alpha)))
    return worst
