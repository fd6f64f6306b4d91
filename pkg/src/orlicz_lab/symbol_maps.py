"""
Holomorphic self-maps φ of the unit ball used as composition symbols.

Every family carries a ``pre_dilation`` factor s so that z ↦ φ(sz) stays in
the family; :py:func:`radial_restriction` only multiplies that factor.
"""

import dataclasses
import enum
import logging
import math
from dataclasses import dataclass
from typing import Any, NamedTuple, Optional, Sequence, Union

import numpy as np

from orlicz_lab.ball_geometry import (
    KoranyiRegion,
    PointsLike,
    Seed,
    as_points,
    in_koranyi,
    inner,
    sample_ball_weighted,
    sample_localized_arc,
    sample_localized_box,
    sample_sphere,
)
from orlicz_lab.orlicz_core import OrliczLabError

logger = logging.getLogger(__name__)


class SelfMapViolation(OrliczLabError):
    """Raised when a symbol sends an interior point to |φ(z)| >= 1."""

    def __init__(self, family: str, point: np.ndarray, image: np.ndarray):
        self.family = family
        self.point = point
        self.image = image
        super().__init__(
            f"self-map violation: {family} sends z={point.tolist()} to "
            f"|φ(z)|={np.linalg.norm(image):.17g}"
        )


class SymbolFamily(str, enum.Enum):
    CONSTANT = "constant"
    DILATION = "dilation"
    DIAGONAL = "diagonal"
    LENS = "lens"
    EMBEDDED_LENS = "embedded_lens"


def lens(z: np.ndarray, beta: float) -> np.ndarray:
    """ℓ_β(z) = 1 − (1 − z)^β with the principal branch."""
    with np.errstate(divide="ignore", invalid="ignore"):
        return 1 - np.exp(beta * np.log(1 - z + 0j))


class SymbolMap:
    family: SymbolFamily
    pre_dilation: float
    metadata: str

    @property
    def N(self) -> int:
        raise NotImplementedError

    def _raw(self, points: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def to_spec(self) -> dict[str, Any]:
        raise NotImplementedError

    def closed_form_sup_norm(self) -> Optional[float]:
        return None

    def preimage_window(self, zeta, h) -> Optional[tuple[np.ndarray, float]]:
        return None

    @property
    def label(self) -> str:
        params = self.to_spec()["params"]
        shown = ", ".join(f"{key}={value}" for key, value in params.items())
        return f"{self.family.value}({shown})"

    def _check_pre_dilation(self):
        if not 0 < self.pre_dilation <= 1:
            raise ValueError(
                f"pre_dilation must lie in (0, 1], got {self.pre_dilation}"
            )

    def apply(self, z: PointsLike) -> np.ndarray:
        """
        Return φ(z) for interior points, shape (count, N).

        :raises SelfMapViolation: when some image has modulus >= 1.
        """
        points = as_points(z, self.N)
        norms = np.linalg.norm(points, axis=1)
        if np.any(norms >= 1):
            raise ValueError("apply needs interior points |z| < 1")
        images = self._raw(self.pre_dilation * points)
        image_norms = np.linalg.norm(images, axis=1)
        bad = ~(image_norms < 1)
        if np.any(bad):
            index = int(np.argmax(bad))
            raise SelfMapViolation(self.family.value, points[index],
                                   images[index])
        return images

    def boundary_values(self, xi: PointsLike) -> np.ndarray:
        """
        Evaluate the continuous extension of φ at points of the closed ball.

        Every built-in family is continuous up to the sphere, so this is the
        boundary map φ* itself.
        """
        points = as_points(xi, self.N)
        images = self._raw(self.pre_dilation * points)
        if np.any(np.linalg.norm(images, axis=1) > 1 + 1e-12):
            index = int(np.argmax(np.linalg.norm(images, axis=1)))
            raise SelfMapViolation(self.family.value, points[index],
                                   images[index])
        return images


def _complex_vector(value: Any) -> tuple[complex, ...]:
    if isinstance(value, (int, float, complex)):
        return (complex(value),)
    if isinstance(value, str):
        return (complex(value.replace(" ", "")),)
    coords = []
    for item in value:
        if isinstance(item, (list, tuple)):
            if len(item) != 2:
                raise ValueError(f"complex coordinates are [re, im] pairs: {item}")
            coords.append(complex(float(item[0]), float(item[1])))
        elif isinstance(item, str):
            coords.append(complex(item.replace(" ", "")))
        else:
            coords.append(complex(item))
    return tuple(coords)


def _spec_vector(coords: Sequence[complex]) -> list:
    return [[c.real, c.imag] for c in coords]


@dataclass(frozen=True)
class Constant(SymbolMap):
    w0: tuple[complex, ...]
    pre_dilation: float = 1.0
    metadata: str = ""
    family = SymbolFamily.CONSTANT

    def __post_init__(self):
        object.__setattr__(self, "w0", _complex_vector(self.w0))
        self._check_pre_dilation()
        if not np.linalg.norm(self.w0) < 1:
            raise ValueError("a constant symbol needs |w0| < 1")

    @property
    def N(self):
        return len(self.w0)

    def _raw(self, points):
        return np.broadcast_to(np.asarray(self.w0), points.shape).copy()

    def closed_form_sup_norm(self):
        return float(np.linalg.norm(self.w0))

    def to_spec(self):
        return {"family": self.family.value,
                "params": {"w0": _spec_vector(self.w0)}}


@dataclass(frozen=True)
class Dilation(SymbolMap):
    """z ↦ rz; ``r = 1`` is the identity."""

    r: float
    dimension: int = 1
    pre_dilation: float = 1.0
    metadata: str = ""
    family = SymbolFamily.DILATION

    def __post_init__(self):
        if not 0 < self.r <= 1:
            raise ValueError(f"dilation needs r in (0, 1], got {self.r}")
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")
        self._check_pre_dilation()

    @property
    def N(self):
        return self.dimension

    @property
    def factor(self) -> float:
        return self.r * self.pre_dilation

    def _raw(self, points):
        return self.r * points

    def closed_form_sup_norm(self):
        return self.factor

    def preimage_window(self, zeta, h):
        t = h + 1 - self.factor
        if t >= 1:
            return None
        return np.atleast_1d(np.asarray(zeta, dtype=complex)), t

    def to_spec(self):
        return {"family": self.family.value,
                "params": {"r": self.r, "N": self.dimension,
                           "pre_dilation": self.pre_dilation}}


@dataclass(frozen=True)
class DiagonalLinear(SymbolMap):
    lambdas: tuple[complex, ...]
    pre_dilation: float = 1.0
    metadata: str = ""
    family = SymbolFamily.DIAGONAL

    def __post_init__(self):
        object.__setattr__(self, "lambdas", _complex_vector(self.lambdas))
        self._check_pre_dilation()
        if sum(abs(c) ** 2 for c in self.lambdas) > 1 + 1e-12:
            raise ValueError("a diagonal symbol needs Σ|λ_i|² <= 1")

    @property
    def N(self):
        return len(self.lambdas)

    def _raw(self, points):
        return points * np.asarray(self.lambdas)

    def closed_form_sup_norm(self):
        return max(abs(c) for c in self.lambdas) * self.pre_dilation

    def to_spec(self):
        return {"family": self.family.value,
                "params": {"lambdas": _spec_vector(self.lambdas),
                           "pre_dilation": self.pre_dilation}}


class LensFamily(SymbolMap):
    """Lens maps, with contact point e₁ and β in (0, 1)."""

    beta: float

    def _check_beta(self):
        if not 0 < self.beta < 1:
            raise ValueError(f"lens maps need beta in (0, 1), got {self.beta}")

    @property
    def contact_point(self) -> np.ndarray:
        point = np.zeros(self.N, dtype=complex)
        point[0] = 1
        return point

    def closed_form_sup_norm(self):
        return 1.0 if self.pre_dilation == 1 else None

    def preimage_window(self, zeta, h):
        zeta = np.atleast_1d(np.asarray(zeta, dtype=complex))
        if np.linalg.norm(zeta - self.contact_point) > 1e-12:
            return None
        t = h ** (1 / self.beta) + 1 - self.pre_dilation
        if t >= 1:
            return None
        return self.contact_point, t


@dataclass(frozen=True)
class Lens1D(LensFamily):
    beta: float
    pre_dilation: float = 1.0
    metadata: str = ""
    family = SymbolFamily.LENS

    def __post_init__(self):
        self._check_beta()
        self._check_pre_dilation()

    @property
    def N(self):
        return 1

    def _raw(self, points):
        return lens(points, self.beta)

    def to_spec(self):
        return {"family": self.family.value,
                "params": {"beta": self.beta,
                           "pre_dilation": self.pre_dilation}}


@dataclass(frozen=True)
class EmbeddedLens(LensFamily):
    """z ↦ (ℓ_β(z₁), 0, ..., 0) in the ball of ℂ^N."""

    beta: float
    dimension: int = 1
    pre_dilation: float = 1.0
    metadata: str = ""
    family = SymbolFamily.EMBEDDED_LENS

    def __post_init__(self):
        self._check_beta()
        self._check_pre_dilation()
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")

    @property
    def N(self):
        return self.dimension

    def _raw(self, points):
        images = np.zeros_like(points)
        images[:, 0] = lens(points[:, 0], self.beta)
        return images

    def to_spec(self):
        return {"family": self.family.value,
                "params": {"beta": self.beta, "N": self.dimension,
                           "pre_dilation": self.pre_dilation}}


def symbol_from_spec(spec: dict[str, Any]) -> SymbolMap:
    """
    Build a symbol from ``{"family": ..., "params": {...}}``.

    Complex coordinates are written as ``[re, im]`` pairs or strings such as
    ``"0.3+0.1j"``; plain numbers are real coordinates. Lens families take
    either ``beta`` or the aperture ``b``.
    """
    try:
        family = SymbolFamily(spec["family"])
    except (KeyError, ValueError):
        raise ValueError(f"unknown symbol family in {spec!r}") from None
    params = dict(spec.get("params", {}))
    pre = float(params.get("pre_dilation", 1.0))
    try:
        if family is SymbolFamily.CONSTANT:
            return Constant(params["w0"])
        if family is SymbolFamily.DILATION:
            return Dilation(float(params["r"]), int(params.get("N", 1)),
                            pre_dilation=pre)
        if family is SymbolFamily.DIAGONAL:
            return DiagonalLinear(params["lambdas"], pre_dilation=pre)
        if "beta" in params:
            beta = float(params["beta"])
        else:
            beta = beta_from_aperture(float(params["b"]))
        if family is SymbolFamily.LENS:
            return Lens1D(beta, pre_dilation=pre)
        return EmbeddedLens(beta, int(params.get("N", 1)), pre_dilation=pre)
    except KeyError as error:
        raise ValueError(
            f"{family.value} is missing parameter {error.args[0]!r}"
        ) from None


def apply(phi: SymbolMap, z: PointsLike) -> np.ndarray:
    return phi.apply(z)


def radial_restriction(phi: SymbolMap, r: float) -> SymbolMap:
    """
    Return z ↦ φ(rz) as a member of the same family.

    >>> radial_restriction(Dilation(1.0), 0.5).apply([0.5])
    array([[0.25+0.j]])
    """
    if not 0 < r < 1:
        raise ValueError(f"radial restriction needs r in (0, 1), got {r}")
    if isinstance(phi, Constant):
        return phi
    if isinstance(phi, Dilation):
        return dataclasses.replace(phi, r=phi.r * r)
    return dataclasses.replace(phi, pre_dilation=phi.pre_dilation * r)


class BoundaryLimit(NamedTuple):
    points: np.ndarray
    converged: np.ndarray
    steps: np.ndarray


def default_r_seq() -> np.ndarray:
    return 1 - 2.0 ** -np.arange(4, 41)


def boundary_limit(
    phi: SymbolMap,
    zeta: PointsLike,
    r_seq: Optional[Sequence[float]] = None,
    tol: float = 1e-9
) -> BoundaryLimit:
    """
    Follow φ(rζ) along ``r_seq`` until successive images differ by < tol.

    Works row by row on an array of boundary points. Rows that never settle
    keep the last iterate and are marked unconverged.
    """
    r_seq = default_r_seq() if r_seq is None else np.asarray(r_seq, float)
    if np.any(np.diff(r_seq) <= 0) or r_seq[0] <= 0 or r_seq[-1] >= 1:
        raise ValueError("r_seq must increase inside (0, 1)")
    zeta = as_points(zeta, phi.N)

    current = phi.apply(r_seq[0] * zeta)
    result = current.copy()
    converged = np.zeros(len(zeta), dtype=bool)
    steps = np.full(len(zeta), len(r_seq) - 1)
    for k, r in enumerate(r_seq[1:], start=1):
        following = phi.apply(r * zeta)
        settled = (np.linalg.norm(following - current, axis=1) < tol)
        newly = settled & ~converged
        result[newly] = following[newly]
        steps[newly] = k
        converged |= settled
        result[~converged] = following[~converged]
        current = following
        if np.all(converged):
            break
    unconverged = int(np.sum(~converged))
    if unconverged:
        logger.debug("%s: %d of %d boundary limits unconverged", phi.label,
                     unconverged, len(zeta))
    return BoundaryLimit(result, converged, steps)


class SupNormEstimate(NamedTuple):
    lower_bound: float
    closed_form: Optional[float]


def sup_norm_estimate(phi: SymbolMap, samples: int = 4096,
                      seed: Seed = 0) -> SupNormEstimate:
    """
    Lower-bound ‖φ‖_∞ from v₀ samples and radial sweeps toward the sphere.

    The sweeps follow the sampled directions and e₁, along r = 1 − 2^-k,
    k = 1..40.
    """
    N = phi.N
    points = sample_ball_weighted(N, 0.0, samples, seed)
    best = float(np.max(np.linalg.norm(phi.apply(points), axis=1)))

    directions = sample_sphere(N, min(samples, 256), seed)
    e1 = np.zeros((1, N), dtype=complex)
    e1[0, 0] = 1
    directions = np.vstack([e1, directions])
    for r in 1 - 2.0 ** -np.arange(1, 41):
        images = phi.apply(r * directions)
        best = max(best, float(np.max(np.linalg.norm(images, axis=1))))
    return SupNormEstimate(best, phi.closed_form_sup_norm())


def beta_from_aperture(b: float) -> float:
    """
    β = (2/π) arccos(1/b).

    >>> round(beta_from_aperture(2 ** 0.5), 12)
    0.5
    """
    if not b > 1:
        raise ValueError(f"aperture must exceed 1, got {b}")
    if math.isinf(b):
        return 1.0
    return 2 * math.acos(1 / b) / math.pi


def aperture_from_beta(beta: float) -> float:
    if not 0 < beta < 1:
        raise ValueError(f"beta must lie in (0, 1), got {beta}")
    return 1 / math.cos(beta * math.pi / 2)


class Containment(NamedTuple):
    """
    A Korányi region around the contact point of the image of φ.

    ``region`` is None when no such region is known. ``scope`` says whether
    the containment holds on the whole image (``global``) or only near the
    contact point (``contact``).
    """

    region: Optional[KoranyiRegion]
    scope: str


def _dilation_containment(radius: float, N: int) -> Containment:
    if radius >= 1:
        return Containment(None, "none")
    e1 = np.zeros(N, dtype=complex)
    e1[0] = 1
    # sup over |w| <= ρ of 2|1 − w₁|/(1 − |w|²) is 2/(1 − ρ)
    return Containment(KoranyiRegion(e1, 2 / (1 - radius) * (1 + 1e-6)),
                       "global")


def containing_region(phi: SymbolMap) -> Containment:
    """Return the Korányi region known to contain the image of φ."""
    if isinstance(phi, Constant):
        w0 = np.asarray(phi.w0)
        norm = float(np.linalg.norm(w0))
        if norm == 0:
            zeta = np.zeros(phi.N, dtype=complex)
            zeta[0] = 1
        else:
            zeta = w0 / norm
        aperture = max(2 / (1 + norm), 1.0) * (1 + 1e-6)
        return Containment(KoranyiRegion(zeta, aperture), "global")
    if isinstance(phi, Dilation):
        return _dilation_containment(phi.factor, phi.N)
    if isinstance(phi, DiagonalLinear):
        return _dilation_containment(phi.closed_form_sup_norm(), phi.N)
    if isinstance(phi, LensFamily):
        return Containment(
            KoranyiRegion(phi.contact_point, aperture_from_beta(phi.beta)),
            "contact",
        )
    return Containment(None, "none")


def contact_samples(phi: SymbolMap, delta: float = 1e-3, count: int = 4096,
                    seed: Seed = 0) -> Optional[np.ndarray]:
    """
    Images of φ inside S(e₁, delta), from interior and boundary samples.

    Only lens families in dimension one (or embedded through the first
    coordinate) have a known preimage of such a window; others return None.
    """
    if not isinstance(phi, LensFamily):
        return None
    window = phi.preimage_window(phi.contact_point, delta)
    if window is None:
        return None
    _, t = window
    box, _ = sample_localized_box(0.0, 1.0, t, count, seed)
    arc, _ = sample_localized_arc(1.0, t, count, seed)
    pad = np.zeros((count, phi.N - 1), dtype=complex)
    interior = phi.apply(np.hstack([box, pad]))
    boundary = phi.boundary_values(np.hstack([arc, pad]))
    images = np.vstack([interior, boundary])
    near = np.abs(1 - inner(images, phi.contact_point)) < delta
    return images[near & (np.linalg.norm(images, axis=1) < 1)]


def estimate_contact_aperture(phi: SymbolMap, delta: float = 1e-3,
                              count: int = 4096,
                              seed: Seed = 0) -> Optional[float]:
    """
    Smallest aperture of Γ(e₁, a) holding the sampled images near e₁.

    The value is a lower estimate of the true contact aperture; for lens
    maps it approaches 1/cos(βπ/2) as ``delta`` shrinks.
    """
    images = contact_samples(phi, delta, count, seed)
    if images is None or len(images) == 0:
        return None
    gap = np.abs(1 - inner(images, phi.contact_point))
    depth = 1 - np.sum(np.abs(images) ** 2, axis=1)
    return float(np.max(2 * gap / depth))


def check_contact_containment(phi: SymbolMap, slack: float = 0.01,
                              delta: float = 1e-3, count: int = 4096,
                              seed: Seed = 0) -> Optional[bool]:
    """Whether sampled images near e₁ lie in Γ(e₁, b(1 + slack))."""
    containment = containing_region(phi)
    images = contact_samples(phi, delta, count, seed)
    if containment.region is None or images is None:
        return None
    widened = KoranyiRegion(containment.region.zeta,
                            containment.region.a * (1 + slack))
    return bool(np.all(in_koranyi(images, widened)))

