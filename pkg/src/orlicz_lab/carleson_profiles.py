"""
Monte-Carlo estimates of pull-back measures on Carleson windows.

Hardy masses are μ_{φ_r}(𝒮(ζ, h)) = σ_N{ξ : φ(rξ) ∈ 𝒮(ζ, h)}, maximized over
a radius grid and the boundary map; Bergman masses are
μ_{φ,α}(S(ζ, h)) = v_α(φ⁻¹(S(ζ, h))).

When a family knows a domain window S(c, t) holding the preimage of the
target window (dilations, and lens maps aimed at e₁), dimension-one samples
are drawn inside a box around that window and the hit fraction is scaled by
the box mass. Thin windows far below 1/n stay measurable this way.
"""

import csv
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any, NamedTuple, Optional, Sequence

import numpy as np

from orlicz_lab.ball_geometry import (
    CarlesonWindow,
    Closure,
    Seed,
    in_window,
    n_alpha,
    sample_ball_weighted,
    sample_localized_arc,
    sample_localized_box,
    sample_sphere,
)
from orlicz_lab.symbol_maps import (
    SymbolMap,
    boundary_limit,
    radial_restriction,
)

logger = logging.getLogger(__name__)

MIN_SAMPLES = 1000

_DIAGNOSTIC_POINTS = 1024


def default_h_grid() -> np.ndarray:
    return 2.0 ** -np.arange(1, 15)


def default_hardy_r_grid() -> np.ndarray:
    return 1 - 2.0 ** -np.arange(2, 13)


class WindowMass(NamedTuple):
    estimate: float
    std_error: float
    n: int
    hits: int
    r: Optional[float] = None
    unconverged: int = 0
    flagged: bool = False


def _binomial(hits: int, n: int, mass: float) -> tuple[float, float]:
    """Scaled estimate and standard error; zero counts report 3/n."""
    p = hits / n
    if hits == 0:
        return 0.0, 3 * mass / n
    return mass * p, mass * math.sqrt(p * (1 - p) / n)


def _check_count(n: int) -> None:
    if n < MIN_SAMPLES:
        raise ValueError(f"window masses need n >= {MIN_SAMPLES}, got {n}")


def _zeta(zeta, N: int) -> np.ndarray:
    zeta = np.atleast_1d(np.asarray(zeta, dtype=complex))
    if zeta.size != N:
        raise ValueError(f"center has dimension {zeta.size}, symbol has {N}")
    return zeta


def bergman_window_mass(
    phi: SymbolMap,
    alpha: float,
    zeta,
    h: float,
    n: int = 2 ** 16,
    seed: Seed = 0,
    localize: bool = True
) -> WindowMass:
    """Estimate v_α(φ⁻¹(S(ζ, h))) with its binomial standard error."""
    _check_count(n)
    n_alpha(phi.N, alpha)
    zeta = _zeta(zeta, phi.N)
    window = CarlesonWindow(zeta, h)

    local = phi.preimage_window(zeta, h) if localize and phi.N == 1 else None
    if local is not None:
        center, t = local
        points, mass = sample_localized_box(alpha, center[0], t, n, seed)
    else:
        points, mass = sample_ball_weighted(phi.N, alpha, n, seed), 1.0

    hits = int(np.sum(in_window(phi.apply(points), window)))
    estimate, std_error = _binomial(hits, n, mass)
    return WindowMass(estimate, std_error, n, hits)


def _sphere_points(phi: SymbolMap, zeta, h, n, seed, localize):
    local = phi.preimage_window(zeta, h) if localize and phi.N == 1 else None
    if local is not None:
        center, t = local
        return sample_localized_arc(center[0], t, n, seed)
    return sample_sphere(phi.N, n, seed), 1.0


def hardy_window_mass(
    phi: SymbolMap,
    zeta,
    h: float,
    r_grid: Optional[Sequence[float]] = None,
    n: int = 2 ** 16,
    seed: Seed = 0,
    localize: bool = True
) -> WindowMass:
    """
    Estimate sup_r μ_{φ_r}(𝒮(ζ, h)) over ``r_grid`` and the boundary map.

    The boundary cell evaluates φ on the sphere itself. Radial boundary
    limits are followed on a subsample as a diagnostic: when more than 1% of
    them fail to settle, the returned mass is flagged.
    """
    _check_count(n)
    zeta = _zeta(zeta, phi.N)
    r_grid = default_hardy_r_grid() if r_grid is None else r_grid
    window = CarlesonWindow(zeta, h, Closure.CLOSED)

    best: Optional[WindowMass] = None
    for index, r in enumerate(r_grid):
        restricted = radial_restriction(phi, float(r))
        xi, mass = _sphere_points(restricted, zeta, h, n,
                                  _child(seed, index), localize)
        hits = int(np.sum(in_window(phi.apply(r * xi), window)))
        estimate, std_error = _binomial(hits, n, mass)
        if best is None or estimate > best.estimate:
            best = WindowMass(estimate, std_error, n, hits, float(r))

    xi, mass = _sphere_points(phi, zeta, h, n, _child(seed, len(r_grid)),
                              localize)
    hits = int(np.sum(in_window(phi.boundary_values(xi), window)))
    estimate, std_error = _binomial(hits, n, mass)

    limits = boundary_limit(phi, xi[:_DIAGNOSTIC_POINTS])
    unconverged = int(np.sum(~limits.converged))
    flagged = unconverged > 0.01 * len(limits.converged)

    if best is None or estimate >= best.estimate:
        best = WindowMass(estimate, std_error, n, hits, 1.0)
    return best._replace(unconverged=unconverged, flagged=flagged)


def _child(seed: Seed, *keys: int) -> list[int]:
    return [int(s) for s in np.atleast_1d(seed)] + list(keys)


def corona_mass(
    phi: SymbolMap,
    alpha: Optional[float],
    r0: float,
    n: int = 2 ** 16,
    seed: Seed = 0,
    r_grid: Optional[Sequence[float]] = None
) -> tuple[float, float]:
    """
    Estimate the mass of {|φ| > r₀}: under v_α, or for Hardy spaces
    (``alpha=None``) the sup over ``r_grid`` and the boundary map.
    """
    if not 0 < r0 < 1:
        raise ValueError(f"corona radius must lie in (0, 1), got {r0}")
    _check_count(n)
    if alpha is not None:
        points = sample_ball_weighted(phi.N, alpha, n, seed)
        hits = int(np.sum(np.linalg.norm(phi.apply(points), axis=1) > r0))
        return _binomial(hits, n, 1.0)

    r_grid = default_hardy_r_grid() if r_grid is None else r_grid
    xi = sample_sphere(phi.N, n, seed)
    best = (0.0, 3 / n)
    images = [phi.apply(r * xi) for r in r_grid] + [phi.boundary_values(xi)]
    for image in images:
        hits = int(np.sum(np.linalg.norm(image, axis=1) > r0))
        cell = _binomial(hits, n, 1.0)
        if cell[0] > best[0]:
            best = cell
    return best


@dataclass(frozen=True)
class ProfileRecord:
    h: float
    estimate: float
    std_error: float
    n: int
    argmax_center: tuple[complex, ...]
    r_argmax: Optional[float] = None
    unconverged: int = 0
    flagged: bool = False

    @property
    def reliable(self) -> bool:
        return self.estimate > 0 and self.std_error < 0.5 * self.estimate


@dataclass
class CarlesonProfile:
    """
    Window masses sup_ζ μ(window(ζ, h)) along a decreasing h grid.

    ``alpha`` is None for the Hardy pull-back measure μ_φ and the weight
    exponent α for μ_{φ,α}. Estimates are lower bounds for the true sup.
    """

    alpha: Optional[float]
    N: int
    records: list[ProfileRecord]
    seed: Any
    symbol: dict[str, Any]
    n_per_cell: int
    r_grid: Optional[tuple[float, ...]] = None
    centers: list[tuple[complex, ...]] = field(default_factory=list)

    @property
    def measure_kind(self) -> str:
        return "hardy" if self.alpha is None else "bergman"

    @property
    def exponent(self) -> float:
        return n_alpha(self.N, self.alpha)

    @property
    def h(self) -> np.ndarray:
        return np.array([record.h for record in self.records])

    @property
    def estimates(self) -> np.ndarray:
        return np.array([record.estimate for record in self.records])

    @property
    def std_errors(self) -> np.ndarray:
        return np.array([record.std_error for record in self.records])

    def is_monotone(self) -> bool:
        """Nondecreasing in h, up to twice the summed standard errors."""
        order = np.argsort(self.h)
        values = self.estimates[order]
        errors = self.std_errors[order]
        slack = 2 * (errors[1:] + errors[:-1])
        return bool(np.all(values[1:] >= values[:-1] - slack))

    def to_csv(self, filename: str) -> None:
        """
        Columns: h, estimate, std_error, n, then the real and imaginary
        parts of the maximizing center, then r_argmax and flagged.
        """
        header = ["h", "estimate", "std_error", "n"]
        header += [f"argmax_{part}_{i + 1}" for i in range(self.N)
                   for part in ("re", "im")]
        header += ["r_argmax", "flagged"]
        with open(filename, "w", newline="") as file:
            writer = csv.writer(file)
            writer.writerow(header)
            for record in self.records:
                row = [repr(record.h), repr(record.estimate),
                       repr(record.std_error), record.n]
                for coord in record.argmax_center:
                    row += [repr(coord.real), repr(coord.imag)]
                row += ["" if record.r_argmax is None else repr(record.r_argmax),
                        int(record.flagged)]
                writer.writerow(row)

    def to_dict(self) -> dict[str, Any]:
        records = []
        for record in self.records:
            item = asdict(record)
            item["argmax_center"] = [[c.real, c.imag]
                                     for c in record.argmax_center]
            records.append(item)
        return {
            "measure_kind": self.measure_kind,
            "alpha": self.alpha,
            "N": self.N,
            "seed": self.seed,
            "symbol": self.symbol,
            "n_per_cell": self.n_per_cell,
            "r_grid": None if self.r_grid is None else list(self.r_grid),
            "centers": [[[c.real, c.imag] for c in center]
                        for center in self.centers],
            "records": records,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "CarlesonProfile":
        def vector(pairs):
            return tuple(complex(re, im) for re, im in pairs)

        records = []
        for item in data["records"]:
            item = dict(item)
            item["argmax_center"] = vector(item["argmax_center"])
            records.append(ProfileRecord(**item))
        return cls(
            alpha=data["alpha"],
            N=data["N"],
            records=records,
            seed=data["seed"],
            symbol=data["symbol"],
            n_per_cell=data["n_per_cell"],
            r_grid=None if data["r_grid"] is None else tuple(data["r_grid"]),
            centers=[vector(center) for center in data.get("centers", [])],
        )

    @classmethod
    def from_json(cls, text: str) -> "CarlesonProfile":
        return cls.from_dict(json.loads(text))


def candidate_centers(phi: SymbolMap, seed: Seed,
                      random_probes: int = 2,
                      image_probes: int = 2) -> list[np.ndarray]:
    """
    e₁, a few random directions, and φ(z)/|φ(z)| for the sampled z with
    the largest |φ(z)|.
    """
    e1 = np.zeros(phi.N, dtype=complex)
    e1[0] = 1
    centers = [e1]
    if random_probes:
        centers += list(sample_sphere(phi.N, random_probes,
                                      _child(seed, 901)))

    if image_probes:
        points = sample_ball_weighted(phi.N, 0.0, 1024, _child(seed, 902))
        images = phi.apply(points)
        norms = np.linalg.norm(images, axis=1)
        for index in np.argsort(-norms, kind="stable")[:image_probes]:
            if norms[index] > 0:
                centers.append(images[index] / norms[index])

    unique = []
    for center in centers:
        if not any(np.allclose(center, seen, atol=1e-12) for seen in unique):
            unique.append(center)
    return unique


def build_profile(
    phi: SymbolMap,
    alpha: Optional[float],
    h_grid: Optional[Sequence[float]] = None,
    center_strategy: str = "auto",
    n_per_cell: int = 2 ** 14,
    seed: Seed = 0,
    r_grid: Optional[Sequence[float]] = None,
    threads: int = 1,
    localize: bool = True
) -> CarlesonProfile:
    """
    Assemble the profile h ↦ max over candidate centers of the window mass.

    ``center_strategy`` is ``"auto"`` (see :py:func:`candidate_centers`) or
    ``"e1"`` for the single probe e₁. Cells run on ``threads`` workers;
    every cell draws from its own seed, so the result does not depend on
    the schedule.
    """
    _check_count(n_per_cell)
    h_grid = default_h_grid() if h_grid is None else np.asarray(h_grid, float)
    h_grid = np.sort(h_grid)[::-1]
    if h_grid[0] >= 1 or h_grid[-1] <= 0:
        raise ValueError("window sizes must lie in (0, 1)")
    if alpha is None:
        r_grid = default_hardy_r_grid() if r_grid is None else np.asarray(r_grid)
    if center_strategy == "auto":
        centers = candidate_centers(phi, seed)
    elif center_strategy == "e1":
        centers = candidate_centers(phi, seed, 0, 0)
    else:
        raise ValueError(f"unknown center strategy {center_strategy!r}")

    def cell(indices):
        i, j = indices
        cell_seed = _child(seed, i, j)
        if alpha is None:
            return hardy_window_mass(phi, centers[j], h_grid[i], r_grid,
                                     n_per_cell, cell_seed, localize)
        return bergman_window_mass(phi, alpha, centers[j], h_grid[i],
                                   n_per_cell, cell_seed, localize)

    tasks = [(i, j) for i in range(len(h_grid)) for j in range(len(centers))]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            masses = list(pool.map(cell, tasks))
    else:
        masses = [cell(task) for task in tasks]

    records = []
    for i, h in enumerate(h_grid):
        row = masses[i * len(centers):(i + 1) * len(centers)]
        j = max(range(len(centers)), key=lambda k: (row[k].estimate, -k))
        best = row[j]
        records.append(ProfileRecord(
            h=float(h),
            estimate=best.estimate,
            std_error=best.std_error,
            n=best.n,
            argmax_center=tuple(complex(c) for c in centers[j]),
            r_argmax=best.r,
            unconverged=best.unconverged,
            flagged=best.flagged,
        ))
        logger.debug("h=%r: mass %r ± %r", float(h), best.estimate,
                     best.std_error)

    flagged = sum(record.flagged for record in records)
    if flagged:
        logger.info("%s: %d profile cells with unsettled boundary limits",
                    phi.label, flagged)
    return CarlesonProfile(
        alpha=alpha,
        N=phi.N,
        records=records,
        seed=seed,
        symbol=phi.to_spec(),
        n_per_cell=n_per_cell,
        r_grid=None if r_grid is None else tuple(float(r) for r in r_grid),
        centers=[tuple(complex(c) for c in center) for center in centers],
    )


class SlopeFit(NamedTuple):
    slope: float
    intercept: float
    cells: int


def profile_slope(
    profile: CarlesonProfile,
    h_min: float = 0.0,
    h_max: float = 1.0
) -> Optional[SlopeFit]:
    """
    Least-squares slope of log(mass) against log(h) over reliable cells.

    Returns None with fewer than two reliable cells in [h_min, h_max].
    """
    cells = [record for record in profile.records
             if record.reliable and h_min <= record.h <= h_max]
    if len(cells) < 2:
        return None
    log_h = np.log([record.h for record in cells])
    log_mass = np.log([record.estimate for record in cells])
    slope, intercept = np.polyfit(log_h, log_mass, 1)
    return SlopeFit(float(slope), float(intercept), len(cells))
