"""Probability functions for mixtures of discrete Lomax components.

A discrete Lomax component with scale ``b`` and shape ``v`` puts mass

    P(K = k) = b^v / (k - 1 + b)^v - b^v / (k + b)^v,    k = 1, 2, ...

on the positive integers; it arises as a gamma mixture of geometric
distributions and has survival function ``(b / (b + k - 1))^v``.  A
mixture model is a convex combination of such components.  The module
also provides the maximum-entropy geometric law the mixture is built
from, the continuous Lomax density, the rank-frequency law it induces,
and a lognormal asymptotic form of the heavy tail.

All evaluation is done in cancellation-free form: the mixture PMF is
computed as ``survival * (-expm1(v * log1p(-1 / (k + b))))`` rather
than as a difference of two powers, which for ``k >> b`` would lose
every significant digit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ValidationError

__all__ = [
    "SCALE_BOUNDS",
    "SHAPE_BOUNDS",
    "LomaxComponent",
    "MixtureModel",
    "GeometricState",
    "GammaMixing",
    "RankModel",
    "geometric_pmf",
    "mixture_pmf",
    "mixture_ccdf",
    "mixture_log_pmf",
    "continuous_lomax_pdf",
    "rank_of_size",
    "rank_frequency",
    "lognormal_asymptote",
]

# Outside these bounds the closed forms underflow or overflow in float64.
SCALE_BOUNDS = (1e-6, 1e9)
SHAPE_BOUNDS = (1e-6, 1e3)

_WEIGHT_SUM_TOL = 1e-12


def _check_finite(name: str, x: float) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise ValidationError(f"{name} must be finite, got {x!r}")
    return x


@dataclass(frozen=True)
class LomaxComponent:
    """One mixture component: weight, scale ``b`` and shape ``v``.

    The hidden per-state rate of the component is gamma distributed with
    mean ``shape / scale``; that mean is exposed as :attr:`mean_rate` and
    is how a component's dynamism is read off a fitted model.
    """

    weight: float
    scale: float
    shape: float

    def __post_init__(self) -> None:
        w = _check_finite("weight", self.weight)
        b = _check_finite("scale", self.scale)
        v = _check_finite("shape", self.shape)
        if not 0.0 <= w <= 1.0:
            raise ValidationError(f"weight must lie in [0, 1], got {w!r}")
        if not SCALE_BOUNDS[0] <= b <= SCALE_BOUNDS[1]:
            raise ValidationError(f"scale must lie in {SCALE_BOUNDS}, got {b!r}")
        if not SHAPE_BOUNDS[0] <= v <= SHAPE_BOUNDS[1]:
            raise ValidationError(f"shape must lie in {SHAPE_BOUNDS}, got {v!r}")
        object.__setattr__(self, "weight", w)
        object.__setattr__(self, "scale", b)
        object.__setattr__(self, "shape", v)

    @property
    def mean_rate(self) -> float:
        """Mean of the component's hidden rate distribution, shape/scale."""
        return self.shape / self.scale


def _canonical_key(c: LomaxComponent):
    # Descending weight, ties broken by ascending mean rate.
    return (-c.weight, c.mean_rate, c.scale, c.shape)


def _left_fold(values) -> float:
    acc = 0.0
    for x in values:
        acc += x
    return acc


def _snap_weights_to_one(weights: list[float]) -> list[float]:
    """Nudge weights (by at most a few ulp) so their left-fold sum is 1.0.

    The survival function at k = 1 is exactly the weight sum; making that
    sum bit-exact keeps ccdf(1) == 1.0 without any special casing.
    """
    for _ in range(4):
        if _left_fold(weights) == 1.0:
            return weights
        head = _left_fold(weights[:-1])
        tail = 1.0 - head
        if tail >= 0.0:
            weights[-1] = tail
        else:  # tiny last weight with sum slightly above one
            weights[0] -= _left_fold(weights) - 1.0
    return weights


@dataclass(frozen=True)
class MixtureModel:
    """An ordered convex mixture of :class:`LomaxComponent` values.

    Components are stored in canonical order (descending weight, ties by
    ascending mean rate) so that fits and reports are deterministic under
    label permutation.  Weights must sum to one within 1e-12; they are
    then snapped so the floating-point sum is exactly 1.0.
    """

    components: tuple[LomaxComponent, ...]
    _c: np.ndarray = field(init=False, repr=False, compare=False)
    _b: np.ndarray = field(init=False, repr=False, compare=False)
    _v: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        comps = tuple(self.components)
        if len(comps) < 1:
            raise ValidationError("a mixture needs at least one component")
        if not all(isinstance(c, LomaxComponent) for c in comps):
            raise ValidationError("components must be LomaxComponent instances")
        total = _left_fold(c.weight for c in comps)
        if abs(total - 1.0) > _WEIGHT_SUM_TOL:
            raise ValidationError(
                f"component weights must sum to 1 within {_WEIGHT_SUM_TOL}, got {total!r}"
            )
        comps = tuple(sorted(comps, key=_canonical_key))
        weights = _snap_weights_to_one([c.weight for c in comps])
        comps = tuple(
            LomaxComponent(weight=w, scale=c.scale, shape=c.shape)
            for w, c in zip(weights, comps)
        )
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "_c", np.array([c.weight for c in comps]))
        object.__setattr__(self, "_b", np.array([c.scale for c in comps]))
        object.__setattr__(self, "_v", np.array([c.shape for c in comps]))

    @classmethod
    def from_parameters(cls, weights, scales, shapes) -> "MixtureModel":
        """Build a model from parallel weight/scale/shape sequences."""
        weights, scales, shapes = list(weights), list(scales), list(shapes)
        if not len(weights) == len(scales) == len(shapes):
            raise ValidationError("weights, scales and shapes must have equal length")
        return cls(
            tuple(
                LomaxComponent(weight=w, scale=b, shape=v)
                for w, b, v in zip(weights, scales, shapes)
            )
        )

    @property
    def order(self) -> int:
        """Number of mixture components M."""
        return len(self.components)

    def pmf(self, k):
        return mixture_pmf(self, k)

    def ccdf(self, k):
        return mixture_ccdf(self, k)

    def log_pmf(self, k):
        return mixture_log_pmf(self, k)


@dataclass(frozen=True)
class GeometricState:
    """Geometric occurrence law of a single state with rate ``rate``.

    P(S = s) = (e^rate - 1) e^(-s*rate) on s = 1, 2, ...; the mass sums
    to one and the mean is e^rate / (e^rate - 1).
    """

    rate: float

    def __post_init__(self) -> None:
        r = _check_finite("rate", self.rate)
        if not r > 0.0:
            raise DomainError(f"rate must be > 0, got {r!r}")
        object.__setattr__(self, "rate", r)

    def mean(self) -> float:
        return -1.0 / math.expm1(-self.rate)


@dataclass(frozen=True)
class GammaMixing:
    """Gamma density of the hidden rate: shape ``v``, rate ``b``, mean v/b."""

    shape: float
    rate: float

    def __post_init__(self) -> None:
        v = _check_finite("shape", self.shape)
        b = _check_finite("rate", self.rate)
        if not v > 0.0:
            raise DomainError(f"shape must be > 0, got {v!r}")
        if not b > 0.0:
            raise DomainError(f"rate must be > 0, got {b!r}")
        object.__setattr__(self, "shape", v)
        object.__setattr__(self, "rate", b)

    @property
    def mean(self) -> float:
        return self.shape / self.rate

    def pdf(self, lam):
        """Density b^v lam^(v-1) e^(-b lam) / Gamma(v) for lam >= 0."""
        lam_arr, scalar = _as_float_array(lam, "lam")
        if np.any(lam_arr < 0.0):
            raise DomainError("gamma density requires lam >= 0")
        v, b = self.shape, self.rate
        out = np.zeros_like(lam_arr)
        pos = lam_arr > 0.0
        lp = lam_arr[pos]
        out[pos] = np.exp(
            v * math.log(b) + (v - 1.0) * np.log(lp) - b * lp - math.lgamma(v)
        )
        if np.any(~pos):
            if v < 1.0:
                out[~pos] = np.inf
            elif v == 1.0:
                out[~pos] = b
        return float(out[()]) if scalar else out


@dataclass(frozen=True)
class RankModel:
    """Rank-size law induced by a continuous Lomax tail over ``population`` units."""

    shape: float
    scale: float
    population: int

    def __post_init__(self) -> None:
        v = _check_finite("shape", self.shape)
        b = _check_finite("scale", self.scale)
        if not v > 0.0:
            raise DomainError(f"shape must be > 0, got {v!r}")
        if not b > 0.0:
            raise DomainError(f"scale must be > 0, got {b!r}")
        l = int(self.population)
        if l < 1 or l != self.population:
            raise DomainError(f"population must be a positive integer, got {self.population!r}")
        object.__setattr__(self, "shape", v)
        object.__setattr__(self, "scale", b)
        object.__setattr__(self, "population", l)


def _as_float_array(x, name: str):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite")
    return arr, arr.ndim == 0


def _validate_counts(k, name: str = "k"):
    """Validate integer support values k >= 1, return (float array, scalar?)."""
    arr = np.asarray(k)
    if arr.dtype.kind not in "iuf":
        raise DomainError(f"{name} must be integer-valued, got dtype {arr.dtype}")
    farr = arr.astype(float)
    if not np.all(np.isfinite(farr)):
        raise DomainError(f"{name} must be finite")
    if np.any(farr != np.floor(farr)):
        raise DomainError(f"{name} must be integer-valued")
    if np.any(farr < 1.0):
        raise DomainError(f"{name} must be >= 1")
    return farr, arr.ndim == 0


def _ret(value: np.ndarray, scalar: bool):
    return float(value[()]) if scalar else value


# ---------------------------------------------------------------------------
# array kernels (shared with the fitting objective, which calls them with
# raw parameter arrays to avoid per-evaluation model construction)
# ---------------------------------------------------------------------------


def _mix_ccdf(c, b, v, k: np.ndarray) -> np.ndarray:
    acc = None
    for ci, bi, vi in zip(c, b, v):
        t = np.exp(-vi * np.log1p((k - 1.0) / bi))
        acc = ci * t if acc is None else acc + ci * t
    return acc


def _mix_pmf(c, b, v, k: np.ndarray) -> np.ndarray:
    acc = None
    for ci, bi, vi in zip(c, b, v):
        surv = np.exp(-vi * np.log1p((k - 1.0) / bi))
        step = -np.expm1(vi * np.log1p(-1.0 / (k + bi)))
        t = ci * (surv * step)
        acc = t if acc is None else acc + t
    return acc


def _mix_log_pmf(c, b, v, k: np.ndarray) -> np.ndarray:
    rows = []
    for ci, bi, vi in zip(c, b, v):
        if ci == 0.0:
            continue
        rows.append(
            math.log(ci)
            - vi * np.log1p((k - 1.0) / bi)
            + np.log(-np.expm1(vi * np.log1p(-1.0 / (k + bi))))
        )
    if len(rows) == 1:
        return rows[0]
    top = np.maximum.reduce(rows)
    acc = np.exp(rows[0] - top)
    for row in rows[1:]:
        acc += np.exp(row - top)
    return top + np.log(acc)


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------


def geometric_pmf(state: GeometricState, s):
    """Mass of the geometric occurrence law at integer s >= 1.

    Evaluated as ``(1 - e^-rate) e^(-(s - 1) rate)``, which is the same
    normalized law written overflow-free for large rates.
    """
    s_arr, scalar = _validate_counts(s, "s")
    lam = state.rate
    out = -math.expm1(-lam) * np.exp(-(s_arr - 1.0) * lam)
    return _ret(out, scalar)


def mixture_pmf(model: MixtureModel, k):
    """Mixture mass at integer k >= 1; lies in (0, 1] before underflow."""
    k_arr, scalar = _validate_counts(k)
    return _ret(_mix_pmf(model._c, model._b, model._v, k_arr), scalar)


def mixture_ccdf(model: MixtureModel, k):
    """P(K >= k) = sum_i c_i (b_i / (b_i + k - 1))^v_i; exactly 1 at k = 1."""
    k_arr, scalar = _validate_counts(k)
    return _ret(_mix_ccdf(model._c, model._b, model._v, k_arr), scalar)


def mixture_log_pmf(model: MixtureModel, k):
    """log of :func:`mixture_pmf`, evaluated fully in log space.

    Stays finite and strictly decreasing for k up to 1e9 even where the
    linear-space mass underflows.
    """
    k_arr, scalar = _validate_counts(k)
    return _ret(_mix_log_pmf(model._c, model._b, model._v, k_arr), scalar)


def continuous_lomax_pdf(b: float, v: float, k):
    """Continuous Lomax density v b^v (k + b)^(-v-1) on k >= 0."""
    b = _check_finite("b", b)
    v = _check_finite("v", v)
    if not b > 0.0:
        raise DomainError(f"b must be > 0, got {b!r}")
    if not v > 0.0:
        raise DomainError(f"v must be > 0, got {v!r}")
    k_arr, scalar = _as_float_array(k, "k")
    if np.any(k_arr < 0.0):
        raise DomainError("k must be >= 0")
    out = np.exp(math.log(v) + v * math.log(b) - (v + 1.0) * np.log(k_arr + b))
    return _ret(out, scalar)


def rank_of_size(rm: RankModel, x):
    """Expected rank of a unit of size x: l b^v (b + x)^-v, decreasing in x."""
    x_arr, scalar = _as_float_array(x, "x")
    if np.any(x_arr < 0.0):
        raise DomainError("x must be >= 0")
    out = rm.population * np.exp(-rm.shape * np.log1p(x_arr / rm.scale))
    return _ret(out, scalar)


def rank_frequency(rm: RankModel, r):
    """Relative frequency of the r-th ranked unit, r in [1, population].

    Computed as ``(b / l) * expm1(log(l / r) / v)``, the same quantity as
    ``b l^(1/v - 1) r^(-1/v) - b / l`` but with exact cancellation at
    r = l.  Floating error can still not drive it negative; the result is
    clamped at zero regardless.
    """
    r_arr, scalar = _validate_counts(r, "r")
    if np.any(r_arr > rm.population):
        raise DomainError(f"r must be <= population ({rm.population})")
    out = (rm.scale / rm.population) * np.expm1(
        np.log(rm.population / r_arr) / rm.shape
    )
    out = np.maximum(out, 0.0)
    return _ret(out, scalar)


def lognormal_asymptote(b: float, v: float, m: float, k):
    """Lognormal-form tail density (v b^v e^(vm/2) / k) e^(-(ln k + m)^2 v / (2m)).

    Evaluated through the algebraically identical form
    ``v b^v k^(-v-1) exp(-v (ln k)^2 / (2m))`` so that e^(vm/2) never
    overflows; for m -> infinity it converges to the continuous power
    form v b^v k^(-v-1).
    """
    b = _check_finite("b", b)
    v = _check_finite("v", v)
    m = _check_finite("m", m)
    if not b > 0.0:
        raise DomainError(f"b must be > 0, got {b!r}")
    if not v > 0.0:
        raise DomainError(f"v must be > 0, got {v!r}")
    if not m > 0.0:
        raise DomainError(f"m must be > 0, got {m!r}")
    k_arr, scalar = _as_float_array(k, "k")
    if np.any(k_arr < 1.0):
        raise DomainError("k must be >= 1")
    log_k = np.log(k_arr)
    out = np.exp(
        math.log(v)
        + v * math.log(b)
        - (v + 1.0) * log_k
        - v * log_k**2 / (2.0 * m)
    )
    return _ret(out, scalar)
