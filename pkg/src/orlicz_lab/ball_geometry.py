"""
Geometry and measures of the unit ball of ℂ^N.

Points are handled as complex numpy arrays of shape ``(count, N)``; a single
:py:class:`BallPoint` is accepted wherever an array of points is.

All samplers draw from counter-based streams: sample number ``i`` of a
stream depends only on ``(seed, stream, i // BLOCK)``, so any contiguous
range of samples can be produced independently of the others.
"""

import csv
import enum
import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy.special import betainc, betaincinv, gammaln

logger = logging.getLogger(__name__)

BLOCK = 4096

SPHERE_STREAM = 0
BALL_STREAM = 1
BOX_STREAM = 2
ARC_STREAM = 3

# 1 - |z|^2 never drops below this, so sampled points stay interior.
_S_FLOOR = 4 * np.finfo(float).eps

Seed = Union[int, Sequence[int]]


@dataclass(frozen=True)
class BallPoint:
    coords: tuple[complex, ...]

    def __post_init__(self):
        coords = tuple(complex(c) for c in self.coords)
        if not coords:
            raise ValueError("a ball point needs at least one coordinate")
        object.__setattr__(self, "coords", coords)
        if self.norm > 1 + 1e-12:
            raise ValueError(f"|z| = {self.norm} lies outside the closed ball")

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(np.asarray(self.coords)))

    @property
    def dimension(self) -> int:
        return len(self.coords)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=complex)


PointsLike = Union[BallPoint, Sequence[BallPoint], np.ndarray, complex]


def as_points(z: PointsLike, dimension: Optional[int] = None) -> np.ndarray:
    """Return ``z`` as a complex array of shape ``(count, N)``."""
    if isinstance(z, BallPoint):
        arr = z.as_array()[None, :]
    elif (isinstance(z, (list, tuple)) and z
            and isinstance(z[0], BallPoint)):
        arr = np.array([p.as_array() for p in z])
    else:
        arr = np.asarray(z, dtype=complex)
        if arr.ndim == 0:
            arr = arr.reshape(1, 1)
        elif arr.ndim == 1:
            arr = arr[None, :] if dimension not in (None, 1) else arr[:, None]
    if dimension is not None and arr.shape[1] != dimension:
        raise ValueError(
            f"expected points of dimension {dimension}, got {arr.shape[1]}"
        )
    return arr


def _unit_vector(zeta: Union[Sequence[complex], np.ndarray, complex]):
    vec = np.atleast_1d(np.asarray(zeta, dtype=complex))
    if abs(np.linalg.norm(vec) - 1) > 1e-12:
        raise ValueError("boundary points need |ζ| = 1 within 1e-12")
    return vec


def inner(z: np.ndarray, zeta: np.ndarray) -> np.ndarray:
    """⟨z, ζ⟩ = Σ z_i conj(ζ_i), row by row."""
    return z @ np.conj(zeta)


@dataclass(frozen=True, eq=False)
class KoranyiRegion:
    """Γ(ζ, a); ``a = inf`` stands for the whole ball."""

    zeta: np.ndarray
    a: float

    def __post_init__(self):
        object.__setattr__(self, "zeta", _unit_vector(self.zeta))
        if not self.a > 1:
            raise ValueError(f"Korányi aperture must exceed 1, got {self.a}")

    def contains(self, z: PointsLike) -> Union[bool, np.ndarray]:
        return in_koranyi(z, self)


class Closure(str, enum.Enum):
    OPEN = "open"
    CLOSED = "closed"


@dataclass(frozen=True, eq=False)
class CarlesonWindow:
    zeta: np.ndarray
    h: float
    closure: Closure = Closure.OPEN

    def __post_init__(self):
        object.__setattr__(self, "zeta", _unit_vector(self.zeta))
        if not 0 < self.h < 1:
            raise ValueError(f"window size must lie in (0, 1), got {self.h}")
        object.__setattr__(self, "closure", Closure(self.closure))

    def contains(self, z: PointsLike) -> Union[bool, np.ndarray]:
        return in_window(z, self)


@dataclass(frozen=True)
class Corona:
    r0: float

    def __post_init__(self):
        if not 0 < self.r0 < 1:
            raise ValueError(f"corona radius must lie in (0, 1), got {self.r0}")

    def contains(self, z: PointsLike) -> Union[bool, np.ndarray]:
        norms = np.linalg.norm(as_points(z), axis=1)
        return _collapse(z, (norms > self.r0) & (norms < 1))


def _collapse(template, result: np.ndarray):
    if isinstance(template, BallPoint) or np.ndim(template) == 0:
        return bool(result[0])
    return result


def n_alpha(N: int, alpha: Optional[float] = None) -> float:
    """
    Return N(α) = N + α + 1, or N for Hardy spaces (``alpha=None``).

    >>> n_alpha(1, 0)
    2.0
    >>> n_alpha(3)
    3.0
    """
    if N < 1:
        raise ValueError(f"dimension must be >= 1, got {N}")
    if alpha is None:
        return float(N)
    if not alpha > -1:
        raise ValueError(f"weight exponent must exceed -1, got {alpha}")
    return float(N + alpha + 1)


def in_koranyi(z: PointsLike, region: KoranyiRegion):
    points = as_points(z, region.zeta.size)
    norms2 = np.sum(np.abs(points) ** 2, axis=1)
    if math.isinf(region.a):
        return _collapse(z, norms2 < 1)
    lhs = np.abs(1 - inner(points, region.zeta))
    return _collapse(z, lhs < region.a / 2 * (1 - norms2))


def in_window(z: PointsLike, window: CarlesonWindow):
    points = as_points(z, window.zeta.size)
    norms = np.linalg.norm(points, axis=1)
    if window.closure is Closure.OPEN:
        inside = norms < 1
    else:
        inside = norms <= 1 + 1e-12
    near = np.abs(1 - inner(points, window.zeta)) < window.h
    return _collapse(z, inside & near)


def koranyi_aperture_bound(N: int) -> float:
    """
    Return b_N = 1/cos(π/(2N)), and ``inf`` for N = 1.

    >>> round(koranyi_aperture_bound(2), 5)
    1.41421
    """
    if N < 1:
        raise ValueError(f"dimension must be >= 1, got {N}")
    if N == 1:
        return math.inf
    return 1 / math.cos(math.pi / (2 * N))


def bergman_normalizer(N: int, alpha: float) -> float:
    """c_α making c_α(1 − |z|²)^α dv a probability measure."""
    n_alpha(N, alpha)
    return math.exp(gammaln(N + alpha + 1) - gammaln(N + 1)
                    - gammaln(alpha + 1))


def radius_cdf(N: int, alpha: float, r: Union[float, np.ndarray]):
    """P(|z| <= r) under v_α; ``alpha=None`` is the sphere (all mass at 1)."""
    r = np.asarray(r, dtype=float)
    if alpha is None:
        result = np.where(r >= 1, 1.0, 0.0)
    else:
        n_alpha(N, alpha)
        result = betainc(N, alpha + 1, np.clip(r, 0, 1) ** 2)
    return float(result) if result.ndim == 0 else result


def block_rng(seed: Seed, stream: int, block: int) -> np.random.Generator:
    sequence = np.random.SeedSequence(seed, spawn_key=(stream, block))
    return np.random.Generator(np.random.Philox(sequence))


def _stream(
    seed: Seed,
    stream: int,
    start: int,
    count: int,
    draw: Callable[[np.random.Generator], tuple]
) -> tuple:
    """Concatenate whole blocks covering [start, start + count) and slice."""
    if count < 1:
        raise ValueError(f"sample count must be >= 1, got {count}")
    if start < 0:
        raise ValueError("stream offsets are non-negative")
    first, last = start // BLOCK, (start + count - 1) // BLOCK
    pieces = [draw(block_rng(seed, stream, b)) for b in range(first, last + 1)]
    offset = start - first * BLOCK
    return tuple(
        np.concatenate(parts)[offset:offset + count] for parts in zip(*pieces)
    )


def _directions(normals: np.ndarray, N: int) -> np.ndarray:
    vec = normals[:, :N] + 1j * normals[:, N:]
    return vec / np.linalg.norm(vec, axis=1, keepdims=True)


def sample_sphere(N: int, count: int, seed: Seed,
                  start: int = 0) -> np.ndarray:
    """I.i.d. uniform points of the unit sphere of ℂ^N, shape (count, N)."""
    n_alpha(N)
    (normals,) = _stream(
        seed, SPHERE_STREAM, start, count,
        lambda rng: (rng.standard_normal((BLOCK, 2 * N)),)
    )
    return _directions(normals, N)


def sample_ball_weighted(N: int, alpha: float, count: int, seed: Seed,
                         start: int = 0) -> np.ndarray:
    """
    I.i.d. points with density c_α(1 − |z|²)^α.

    The direction is uniform on the sphere, and 1 − |z|² follows the
    Beta(α + 1, N) law, drawn by its inverse distribution function.
    """
    n_alpha(N, alpha)
    normals, uniforms = _stream(
        seed, BALL_STREAM, start, count,
        lambda rng: (rng.standard_normal((BLOCK, 2 * N)), rng.random(BLOCK))
    )
    s = np.maximum(betaincinv(alpha + 1, N, uniforms), _S_FLOOR)
    radii = np.sqrt(1 - s)
    return _directions(normals, N) * radii[:, None]


def localized_box_mass(alpha: float, t: float) -> float:
    """v_α-mass (N = 1) of {1 − t < |z| < 1, |arg z| < arcsin t}."""
    s_max = t * (2 - t)
    return float(betainc(alpha + 1, 1, s_max)) * math.asin(t) / math.pi


def sample_localized_box(alpha: float, center: complex, t: float,
                         count: int, seed: Seed) -> tuple[np.ndarray, float]:
    """
    Sample v_α (N = 1) conditioned on a polar box containing S(center, t).

    Returns the points, shape (count, 1), and the v_α-mass of the box.
    """
    n_alpha(1, alpha)
    if not 0 < t < 1:
        raise ValueError(f"localized box needs t in (0, 1), got {t}")
    mass = localized_box_mass(alpha, t)
    s_max = t * (2 - t)
    u, v = _stream(
        seed, BOX_STREAM, 0, count,
        lambda rng: (rng.random(BLOCK), rng.random(BLOCK))
    )
    s = betaincinv(alpha + 1, 1, u * betainc(alpha + 1, 1, s_max))
    s = np.maximum(s, _S_FLOOR)
    theta = math.asin(t) * (2 * v - 1)
    z = complex(center) * np.sqrt(1 - s) * np.exp(1j * theta)
    return z[:, None], mass


def sample_localized_arc(center: complex, t: float, count: int,
                         seed: Seed) -> tuple[np.ndarray, float]:
    """
    Sample σ₁ conditioned on the arc {ξ : |1 − ξ conj(center)| < t}.

    Returns the points, shape (count, 1), and the σ₁-mass of the arc; for
    t >= 2 the arc is the whole circle.
    """
    half_angle = math.pi if t >= 2 else 2 * math.asin(t / 2)
    (v,) = _stream(seed, ARC_STREAM, 0, count,
                   lambda rng: (rng.random(BLOCK),))
    xi = complex(center) * np.exp(1j * half_angle * (2 * v - 1))
    return xi[:, None], half_angle / math.pi


class MeasureKind(str, enum.Enum):
    SPHERE_SIGMA = "sphere_sigma"
    BALL_WEIGHTED = "ball_weighted"


@dataclass(frozen=True)
class MeasureSpec:
    kind: MeasureKind
    N: int
    alpha: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", MeasureKind(self.kind))
        if self.kind is MeasureKind.BALL_WEIGHTED:
            if self.alpha is None:
                raise ValueError("weighted ball measures need alpha")
            n_alpha(self.N, self.alpha)
        else:
            n_alpha(self.N)

    @property
    def normalizer(self) -> float:
        if self.kind is MeasureKind.SPHERE_SIGMA:
            return 1.0
        return bergman_normalizer(self.N, self.alpha)

    def sample(self, count: int, seed: Seed, start: int = 0) -> np.ndarray:
        if self.kind is MeasureKind.SPHERE_SIGMA:
            return sample_sphere(self.N, count, seed, start)
        return sample_ball_weighted(self.N, self.alpha, count, seed, start)


def export_samples_csv(
    points: np.ndarray,
    path: str,
    weights: Optional[np.ndarray] = None
) -> None:
    """Write points as ``re_1, im_1, ..., re_N, im_N, weight`` rows."""
    points = as_points(points)
    count, N = points.shape
    if weights is None:
        weights = np.full(count, 1 / count)
    header = [f"{part}_{i + 1}" for i in range(N) for part in ("re", "im")]
    with open(path, "w", newline="") as file:
        writer = csv.writer(file)
        writer.writerow(header + ["weight"])
        for row, weight in zip(points, weights):
            values = []
            for coord in row:
                values += [repr(float(coord.real)), repr(float(coord.imag))]
            writer.writerow(values + [repr(float(weight))])
    logger.debug("wrote %d sample points to %s", count, path)
