"""Luxemburg norms of sampled functions, and Hardy/Bergman-Orlicz estimates."""

import csv
import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from orlicz_lab.ball_geometry import (
    Seed,
    block_rng,
    sample_ball_weighted,
    sample_sphere,
)
from orlicz_lab.orlicz_core import (
    ExtrapolationError,
    InverseOutOfRangeError,
    OrliczFunction,
    OrliczLabError,
)

logger = logging.getLogger(__name__)

AnalyticFunction = Callable[[np.ndarray], np.ndarray]

_ROTATION_STREAM = 7


class NonFiniteSampleError(OrliczLabError, ValueError):
    """Raised when a function evaluates to inf or nan at a sample point."""


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """
    |f| on a finite probability space.

    ``values`` are the moduli |f(ω_i)|, ``weights`` the masses of the ω_i;
    the weights must sum to 1 within 1e-12.
    """

    values: np.ndarray
    weights: np.ndarray
    label: str = ""

    def __post_init__(self):
        values = np.abs(np.asarray(self.values, dtype=float))
        weights = np.asarray(self.weights, dtype=float)
        if values.ndim != 1 or values.shape != weights.shape:
            raise ValueError("values and weights must be lists of equal length")
        if values.size == 0:
            raise ValueError("a sampled function needs at least one point")
        if not np.all(np.isfinite(values)):
            raise ValueError("sampled values must be finite")
        if np.any(weights <= 0):
            raise ValueError("weights must be positive")
        if abs(float(np.sum(weights)) - 1) > 1e-12:
            raise ValueError("weights must sum to 1")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def uniform(cls, values: Sequence[float], label: str = ""):
        values = np.abs(np.asarray(values))
        return cls(values, np.full(values.size, 1 / values.size), label)

    @classmethod
    def from_csv(cls, filename: str, label: Optional[str] = None):
        """Read a file with ``value`` and ``weight`` columns."""
        with open(filename, newline="") as file:
            rows = list(csv.DictReader(file))
        try:
            values = [float(row["value"]) for row in rows]
            weights = [float(row["weight"]) for row in rows]
        except KeyError as error:
            raise ValueError(f"{filename} lacks column {error.args[0]!r}") from None
        return cls(values, weights, filename if label is None else label)

    def to_csv(self, filename: str) -> None:
        with open(filename, "w", newline="") as file:
            writer = csv.writer(file)
            writer.writerow(["value", "weight"])
            for value, weight in zip(self.values, self.weights):
                writer.writerow([repr(float(value)), repr(float(weight))])

    def scaled(self, factor: float) -> "SampledFunction":
        return SampledFunction(abs(factor) * self.values, self.weights,
                               self.label)


def modular(psi: OrliczFunction, f: SampledFunction, c: float) -> float:
    """
    Σ w_i ψ(|f_i|/C).

    Arguments beyond the table of a tabulated ψ count as saturated.
    """
    scaled = f.values / c
    try:
        with np.errstate(over="ignore"):
            terms = np.asarray(psi.evaluate(scaled))
    except ExtrapolationError:
        return math.inf
    with np.errstate(invalid="ignore", over="ignore"):
        total = float(np.sum(f.weights * terms))
    return math.inf if math.isnan(total) else total


def _safe_inverse(psi: OrliczFunction, y: float) -> Optional[float]:
    try:
        x = psi.inverse(y)
    except InverseOutOfRangeError:
        return None
    return x if x > 0 else None


def luxemburg_norm(
    psi: OrliczFunction,
    f: SampledFunction,
    tol: float = 1e-10
) -> float:
    """
    Return inf{C > 0 : Σ w_i ψ(|f_i|/C) <= 1}.

    The search bisects between the two one-point bounds
    max|f|/ψ⁻¹(1/min w) and max|f|/ψ⁻¹(1), widened when rounding disagrees.
    The returned C satisfies the modular inequality, while C(1 − tol)
    violates it.

    >>> from orlicz_lab.orlicz_core import Power
    >>> round(luxemburg_norm(Power(2), SampledFunction([1, 0], [0.5, 0.5])), 10)
    0.7071067812
    """
    top = float(np.max(f.values))
    if top == 0:
        return 0.0

    x_one = _safe_inverse(psi, 1.0)
    hi = top / x_one if x_one else top
    x_far = _safe_inverse(psi, 1 / float(np.min(f.weights)))
    lo = top / x_far if x_far else hi / 2

    while modular(psi, f, hi) > 1:
        lo, hi = hi, 2 * hi
    while modular(psi, f, lo) <= 1:
        hi, lo = lo, lo / 2
        if lo == 0:
            return hi

    while hi - lo > tol * hi:
        if hi > 2 * lo:
            mid = math.sqrt(lo * hi)
        else:
            mid = (lo + hi) / 2
        if mid <= lo or mid >= hi:
            break
        if modular(psi, f, mid) <= 1:
            hi = mid
        else:
            lo = mid
    return hi


def _check_finite(values: np.ndarray, points: np.ndarray) -> None:
    bad = ~np.isfinite(values)
    if np.any(bad):
        index = int(np.argmax(bad))
        raise NonFiniteSampleError(
            f"function is not finite at z={points[index].tolist()}"
        )


def _circle_nodes(count: int, seed: Seed) -> np.ndarray:
    shift = block_rng(seed, _ROTATION_STREAM, 0).random()
    theta = 2 * math.pi * (np.arange(count) + shift) / count
    return np.exp(1j * theta)[:, None]


def hardy_norm_estimate(
    psi: OrliczFunction,
    f: AnalyticFunction,
    N: int,
    r_grid: Sequence[float],
    sphere_samples: int = 2 ** 16,
    seed: Seed = 0,
    tol: float = 1e-10
) -> float:
    """
    Estimate sup_r ‖f_r‖_ψ over ``r_grid``, with f_r(ζ) = f(rζ) on the sphere.

    In dimension one the circle is sampled at equispaced nodes under a
    seeded rotation; for N >= 2 the sphere is sampled at random.
    ``f`` maps an array of points, shape (count, N), to their values.
    """
    r_grid = np.asarray(r_grid, dtype=float)
    if np.any(np.diff(r_grid) <= 0) or r_grid[0] <= 0 or r_grid[-1] >= 1:
        raise ValueError("r_grid must increase inside (0, 1)")
    if N == 1:
        sphere = _circle_nodes(sphere_samples, seed)
    else:
        sphere = sample_sphere(N, sphere_samples, seed)

    best = 0.0
    for r in r_grid:
        points = r * sphere
        values = np.abs(np.asarray(f(points), dtype=complex)).reshape(-1)
        _check_finite(values, points)
        sample = SampledFunction.uniform(values, f"|f| at r={r!r}")
        norm = luxemburg_norm(psi, sample, tol)
        logger.debug("r=%r: Luxemburg norm %r", r, norm)
        best = max(best, norm)
    return best


def bergman_norm_estimate(
    psi: OrliczFunction,
    f: AnalyticFunction,
    N: int,
    alpha: float,
    ball_samples: int = 2 ** 16,
    seed: Seed = 0,
    tol: float = 1e-10
) -> float:
    """Estimate ‖f‖ in A_α^ψ from one weighted sample of the ball."""
    points = sample_ball_weighted(N, alpha, ball_samples, seed)
    values = np.abs(np.asarray(f(points), dtype=complex)).reshape(-1)
    _check_finite(values, points)
    return luxemburg_norm(psi, SampledFunction.uniform(values), tol)
