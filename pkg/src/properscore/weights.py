"""Weight functions w: R -> [0, inf) for weighted scoring rules."""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, ClassVar

import numpy as np
from scipy import special

from .dist import DomainError, _result


class WeightError(DomainError):
    pass


class WeightSpec(ABC):
    kind: ClassVar[str] = ""

    @abstractmethod
    def __call__(self, x): ...

    @property
    @abstractmethod
    def strictly_positive(self) -> bool: ...

    def breakpoints(self) -> tuple[float, ...]:
        return ()

    @abstractmethod
    def to_dict(self) -> dict[str, Any]: ...


@dataclass(frozen=True)
class Constant(WeightSpec):
    c: float = 1.0

    kind: ClassVar[str] = "constant"

    def __post_init__(self):
        if not (self.c > 0 and math.isfinite(self.c)):
            raise WeightError(f"constant weight must be positive and finite, got {self.c}")

    def __call__(self, x):
        return _result(x, np.full(np.shape(x), self.c))

    @property
    def strictly_positive(self) -> bool:
        return True

    def to_dict(self):
        return {"kind": self.kind, "c": self.c}


@dataclass(frozen=True)
class Indicator(WeightSpec):
    """1 on [a, b], ``floor`` elsewhere."""

    a: float
    b: float
    floor: float = 0.0

    kind: ClassVar[str] = "indicator"

    def __post_init__(self):
        if not self.a < self.b:
            raise WeightError(f"indicator weight needs a < b, got [{self.a}, {self.b}]")
        if not (0 <= self.floor < math.inf):
            raise WeightError("indicator floor must be finite and >= 0")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return _result(x, np.where((x >= self.a) & (x <= self.b), 1.0, self.floor))

    @property
    def strictly_positive(self) -> bool:
        return self.floor > 0

    def breakpoints(self):
        return (self.a, self.b)

    def to_dict(self):
        return {"kind": self.kind, "a": self.a, "b": self.b, "floor": self.floor}


@dataclass(frozen=True)
class _Gaussian(WeightSpec):
    mu: float = 0.0
    sigma: float = 1.0

    def __post_init__(self):
        if not (self.sigma > 0 and math.isfinite(self.sigma) and math.isfinite(self.mu)):
            raise WeightError(f"{self.kind} weight needs finite mu and sigma > 0")

    def _z(self, x):
        return (np.asarray(x, dtype=float) - self.mu) / self.sigma

    @property
    def strictly_positive(self) -> bool:
        # mathematically positive everywhere; underflow far out is a float artefact
        return True

    def breakpoints(self):
        return (self.mu,)

    def to_dict(self):
        return {"kind": self.kind, "mu": self.mu, "sigma": self.sigma}


class GaussianCDF(_Gaussian):
    """Phi((x - mu) / sigma): emphasises the right tail."""

    kind: ClassVar[str] = "gaussian_cdf"

    def __call__(self, x):
        return _result(x, special.ndtr(self._z(x)))


class GaussianSF(_Gaussian):
    """1 - Phi((x - mu) / sigma): emphasises the left tail."""

    kind: ClassVar[str] = "gaussian_sf"

    def __call__(self, x):
        return _result(x, special.ndtr(-self._z(x)))


class GaussianPDF(_Gaussian):
    """phi((x - mu) / sigma) / sigma: emphasises the centre."""

    kind: ClassVar[str] = "gaussian_pdf"

    def __call__(self, x):
        z = self._z(x)
        return _result(x, np.exp(-0.5 * z * z) / (self.sigma * math.sqrt(2 * math.pi)))


def weight_eval(w: WeightSpec, x):
    return w(x)


def require_strictly_positive(w: WeightSpec) -> WeightSpec:
    if not w.strictly_positive:
        raise WeightError("weight not strictly positive")
    return w


_KINDS = {
    "constant": Constant,
    "indicator": Indicator,
    "gaussian_cdf": GaussianCDF,
    "gaussian_sf": GaussianSF,
    "gaussian_pdf": GaussianPDF,
}


def from_dict(obj: Any) -> WeightSpec:
    if not isinstance(obj, dict) or obj.get("kind") not in _KINDS:
        raise WeightError(f"unknown weight specification {obj!r}")
    kind = obj["kind"]
    params = {k: v for k, v in obj.items() if k != "kind"}
    for k, v in params.items():
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise WeightError(f"weight field {k!r} must be a number")
    try:
        return _KINDS[kind](**{k: float(v) for k, v in params.items()})
    except TypeError as exc:
        raise WeightError(f"bad fields for {kind} weight: {sorted(params)}") from exc


UNIT = Constant(1.0)
