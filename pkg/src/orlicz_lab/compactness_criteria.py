"""
Boundedness and compactness criteria for composition operators C_φ.

Each criterion turns profiles, symbols and Orlicz functions into a
:py:class:`CriterionReport`: a verdict, a scalar margin and the evidence
rows the verdict was decided from. :py:meth:`CriterionReport.recompute_verdict`
decides again from those rows alone.

Finite grids cannot certify limits. "Tends to 0" is decided by a trend
test on the tail of the grid together with the threshold θ = 0.01, and
anything the test cannot separate is reported Inconclusive.
"""

import csv
import enum
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, NamedTuple, Optional, Sequence

import numpy as np

from orlicz_lab.ball_geometry import (
    Seed,
    koranyi_aperture_bound,
    n_alpha,
    sample_sphere,
)
from orlicz_lab.carleson_profiles import (
    CarlesonProfile,
    build_profile,
    profile_slope,
)
from orlicz_lab.orlicz_core import (
    ClassCertificate,
    Condition,
    ExpPower,
    Family,
    GridTooSmallError,
    InverseOutOfRangeError,
    LogExp,
    OrliczFunction,
    Power,
    Verdict,
    certify,
    certify_all,
)
from orlicz_lab.symbol_maps import (
    Constant,
    Dilation,
    EmbeddedLens,
    Lens1D,
    SymbolMap,
    LensFamily,
    containing_region,
    sup_norm_estimate,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INCONSISTENT = 2
EXIT_INCONCLUSIVE = 3

THETA = 0.01

OUTSIDE_HYPOTHESES = "outside theorem hypotheses"

BUILTIN_FUNCTIONS = (
    Power(2),
    Power(4),
    ExpPower(1, 1),
    ExpPower(1, 2),
    LogExp(1, 2),
)

BUILTIN_SYMBOLS = (
    Constant(0.3),
    Dilation(0.9),
    Dilation(1.0),
    Lens1D(0.5),
)


class CriterionId(str, enum.Enum):
    PSI_CARLESON_BIG_OH = "PsiCarlesonBigOh"
    PSI_CARLESON_LITTLE_OH = "PsiCarlesonLittleOh"
    BOUNDARY_RATIO_ALPHA = "BoundaryRatioAlpha"
    BOUNDARY_RATIO_SIMPLIFIED = "BoundaryRatioSimplified"
    CLASSICAL_ANGULAR_RATIO = "ClassicalAngularRatio"
    H_INFTY_COMPACT = "HInftyCompact"
    LENS_LOWER_BOUND_EXPONENT = "LensLowerBoundExponent"
    DELTA2_SHARP_SUFFICIENCY = "Delta2SharpSufficiency"
    KORANYI_APERTURE_VERDICT = "KoranyiApertureVerdict"
    BERGMAN_SUFFICIENCY = "BergmanSufficiency"


# Criteria whose Pass means "C_φ is compact".
COMPACTNESS_CRITERIA = (
    CriterionId.PSI_CARLESON_LITTLE_OH,
    CriterionId.BOUNDARY_RATIO_ALPHA,
    CriterionId.BOUNDARY_RATIO_SIMPLIFIED,
    CriterionId.CLASSICAL_ANGULAR_RATIO,
    CriterionId.KORANYI_APERTURE_VERDICT,
)


class CarlesonMode(str, enum.Enum):
    BIG_OH = "BigOh"
    LITTLE_OH = "LittleOh"


class EvidenceRow(NamedTuple):
    parameter: Any
    lhs: float
    rhs: float


def _plain(value):
    if isinstance(value, tuple):
        return [_plain(item) for item in value]
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    return value


def _tupled(value):
    if isinstance(value, list):
        return tuple(_tupled(item) for item in value)
    return value


@dataclass
class CriterionReport:
    criterion_id: CriterionId
    inputs: dict[str, Any]
    verdict: Verdict
    margin: Optional[float]
    evidence: list[EvidenceRow]
    rule: dict[str, Any] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)
    hypotheses_met: Optional[bool] = None

    def recompute_verdict(self) -> tuple[Verdict, Optional[float]]:
        """Decide the verdict and margin again from the evidence rows."""
        verdict, margin, _ = _DECIDERS[self.criterion_id](self.evidence,
                                                          self.rule)
        return verdict, margin

    def to_dict(self) -> dict[str, Any]:
        return {
            "criterion_id": self.criterion_id.value,
            "inputs": self.inputs,
            "verdict": self.verdict.value,
            "margin": self.margin,
            "evidence": [[_plain(row.parameter), row.lhs, row.rhs]
                         for row in self.evidence],
            "rule": self.rule,
            "notes": self.notes,
            "hypotheses_met": self.hypotheses_met,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "CriterionReport":
        return cls(
            criterion_id=CriterionId(data["criterion_id"]),
            inputs=data["inputs"],
            verdict=Verdict(data["verdict"]),
            margin=data["margin"],
            evidence=[EvidenceRow(_tupled(p), lhs, rhs)
                      for p, lhs, rhs in data["evidence"]],
            rule=data.get("rule", {}),
            notes=list(data.get("notes", [])),
            hypotheses_met=data.get("hypotheses_met"),
        )

    @classmethod
    def from_json(cls, text: str) -> "CriterionReport":
        return cls.from_dict(json.loads(text))

    def to_csv(self, filename: str) -> None:
        """Evidence rows as ``parameter, lhs, rhs``; tuples join with ``;``."""
        with open(filename, "w", newline="") as file:
            writer = csv.writer(file)
            writer.writerow(["parameter", "lhs", "rhs"])
            for row in self.evidence:
                parameter = row.parameter
                if isinstance(parameter, tuple):
                    parameter = ";".join(_repr(p) for p in parameter)
                else:
                    parameter = _repr(parameter)
                writer.writerow([parameter, _repr(row.lhs), _repr(row.rhs)])


def _repr(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _report(criterion_id, inputs, evidence, rule, hypotheses_met=None,
            notes=()) -> CriterionReport:
    verdict, margin, decided = _DECIDERS[criterion_id](evidence, rule)
    notes = list(notes) + decided
    if hypotheses_met is False:
        notes.append(OUTSIDE_HYPOTHESES)
    report = CriterionReport(criterion_id, inputs, verdict, margin, evidence,
                             rule, notes, hypotheses_met)
    logger.info("%s: %s (margin %r)", criterion_id.value, verdict.value,
                margin)
    return report


# -- hypotheses --------------------------------------------------------------

def _verdicts(certificates) -> dict[Condition, Verdict]:
    result = {}
    for certificate in certificates or ():
        if (certificate.condition is Condition.DELTA_SHARP2
                and certificate.exponent != 2.0):
            continue
        result[certificate.condition] = certificate.verdict
    return result


def _hypotheses(psi, certificates, conditions) -> Optional[bool]:
    """Whether ψ passes every listed condition; None when undecidable."""
    verdicts = _verdicts(certificates)
    met = True
    for condition in conditions:
        if condition not in verdicts:
            try:
                verdicts[condition] = certify(psi, condition).verdict
            except GridTooSmallError:
                return None
        met &= verdicts[condition] is Verdict.PASS
    return met


# -- trend helpers -----------------------------------------------------------

def _trend(x, y) -> tuple[float, float]:
    """Least-squares slope and its standard error (inf with < 3 points)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    slope, intercept = np.polyfit(x, y, 1)
    if x.size < 3:
        return float(slope), math.inf
    residuals = y - (slope * x + intercept)
    spread = float(np.sum((x - x.mean()) ** 2))
    se = math.sqrt(float(np.sum(residuals ** 2)) / (x.size - 2) / spread)
    return float(slope), se


def _log_scale(r: np.ndarray) -> np.ndarray:
    """u = 1/ln(1/(1 − r)), which decreases to 0 as r → 1."""
    return 1 / -np.log1p(-r)


def _limit_decision(evidence, rule):
    """
    Rows (r, R(r), θ). The tail is the last ``tail`` rows; its mean P is
    the plateau estimate and margin. γ̂ is the slope of log R against
    log u over the tail.
    """
    if not evidence:
        return Verdict.INCONCLUSIVE, None, ["no usable radii"]
    theta = rule.get("theta", THETA)
    tail = evidence[-rule.get("tail", 5):]
    r = np.array([row.parameter for row in tail], dtype=float)
    values = np.array([row.lhs for row in tail], dtype=float)
    plateau = float(np.mean(values))

    if np.all(values == 0):
        return Verdict.PASS, 0.0, ["ratio vanishes on the tail"]
    nonincreasing = bool(np.all(np.diff(values) <= 1e-12 * values[:-1]))
    if np.any(values <= 0) or values.size < 2:
        if plateau < theta and nonincreasing:
            return Verdict.PASS, plateau, []
        return Verdict.INCONCLUSIVE, plateau, ["too few positive ratios"]

    gamma, _ = _trend(np.log(_log_scale(r)), np.log(values))
    notes = [f"trend exponent {gamma:.4g}"]
    if gamma >= rule.get("pass_slope", 0.2):
        return Verdict.PASS, plateau, notes
    if plateau < theta and nonincreasing:
        return Verdict.PASS, plateau, notes
    if plateau >= theta and gamma < rule.get("fail_slope", 0.05):
        return Verdict.FAIL, plateau, notes
    return Verdict.INCONCLUSIVE, plateau, notes


def _limit_rule(tail: int = 5) -> dict[str, Any]:
    return {"theta": THETA, "tail": tail, "pass_slope": 0.2,
            "fail_slope": 0.05}


# -- Carleson fits -----------------------------------------------------------

def default_a_grid() -> tuple[float, ...]:
    return (1.0, 2.0, 4.0, 8.0, 16.0)


def _carleson_decision(evidence, rule):
    """
    Rows ((A, h), log of profile(h)·ψ(Aψ⁻¹(1/h^e)), relative error).

    The trend is fitted against log(1/h) over the last decade of the
    reliable cells; slopes within max(2·se, 0.05) of 0 count as flat.
    """
    mode = CarlesonMode(rule["mode"])
    floor = rule.get("slope_floor", 0.05)
    all_h = np.array(sorted({row.parameter[1] for row in evidence}))
    if all_h.size == 0:
        return Verdict.INCONCLUSIVE, None, ["empty profile"]

    decade = all_h[all_h <= 10 * all_h[0]]
    tail = [row for row in evidence if row.parameter[1] in set(decade)]
    if all(row.lhs == -math.inf for row in tail):
        return Verdict.PASS, None, ["profile vanishes on the last decade"]

    reliable = [row for row in evidence
                if math.isfinite(row.lhs) and row.rhs < 0.5]
    if not reliable:
        return Verdict.INCONCLUSIVE, None, ["no reliable cells"]
    h_min = min(row.parameter[1] for row in reliable)
    window = [row for row in reliable if row.parameter[1] <= 10 * h_min]

    fits = {}
    for a in sorted({row.parameter[0] for row in window}):
        rows = sorted((row for row in window if row.parameter[0] == a),
                      key=lambda row: row.parameter[1])
        if len(rows) < 3:
            return Verdict.INCONCLUSIVE, None, ["fewer than 3 reliable cells"]
        x = [-math.log(row.parameter[1]) for row in rows]
        slope, se = _trend(x, [row.lhs for row in rows])
        fits[a] = (slope, max(2 * se, floor), max(row.lhs for row in rows))

    notes = [f"A={a:g}: slope {slope:.4g}" for a, (slope, _, _) in fits.items()]
    if any(noise > 0.5 for _, noise, _ in fits.values()):
        return Verdict.INCONCLUSIVE, None, notes + ["Monte-Carlo noise dominates"]

    if mode is CarlesonMode.BIG_OH:
        bounded = [a for a, (slope, noise, _) in fits.items() if slope <= noise]
        if bounded:
            return Verdict.PASS, fits[bounded[0]][2], notes
        return Verdict.FAIL, min(fit[2] for fit in fits.values()), notes

    worst = max(fits.values(), key=lambda fit: fit[0] + fit[1])
    if all(slope < -noise for slope, noise, _ in fits.values()):
        return Verdict.PASS, worst[0], notes
    return Verdict.FAIL, worst[0], notes


def psi_carleson_fit(
    profile: CarlesonProfile,
    psi: OrliczFunction,
    exponent: Optional[float] = None,
    mode: CarlesonMode | str = CarlesonMode.LITTLE_OH,
    A_grid: Optional[Sequence[float]] = None,
    certificates: Optional[Sequence[ClassCertificate]] = None
) -> CriterionReport:
    """
    Compare window masses with 1/ψ(Aψ⁻¹(1/h^e)), e = N or N(α).

    BigOh passes when, for some A, the product profile(h)·ψ(Aψ⁻¹(1/h^e))
    stays bounded over the reliable cells (its largest logarithm is the
    margin); LittleOh passes when for every A the product decreases to 0
    along the last decade of h.

    :raises ValueError: if ``exponent`` does not belong to the measure of
        the profile.
    """
    mode = CarlesonMode(mode)
    if exponent is None:
        exponent = profile.exponent
    elif not math.isclose(exponent, profile.exponent):
        raise ValueError(
            f"exponent {exponent} does not match the {profile.measure_kind} "
            f"profile (expected {profile.exponent})"
        )
    A_grid = default_a_grid() if A_grid is None else tuple(A_grid)

    evidence, notes = [], []
    for record in profile.records:
        try:
            x = psi.inverse_of_log(exponent * -math.log(record.h))
        except InverseOutOfRangeError:
            notes.append(f"h={record.h!r}: ψ⁻¹ out of range")
            continue
        relative = (record.std_error / record.estimate
                    if record.estimate > 0 else math.inf)
        for a in A_grid:
            if record.estimate > 0:
                log_bound = float(psi.log_evaluate(a * x))
                lhs = math.log(record.estimate) + log_bound
            else:
                lhs = -math.inf
            evidence.append(EvidenceRow((float(a), record.h), lhs, relative))

    if profile.alpha is None:
        conditions = (Condition.NABLA2,)
    else:
        conditions = ()
    if mode is CarlesonMode.BIG_OH:
        conditions += (Condition.UNIFORM_NABLA0,)
        criterion = CriterionId.PSI_CARLESON_BIG_OH
    else:
        conditions += (Condition.NABLA0,)
        criterion = CriterionId.PSI_CARLESON_LITTLE_OH
    return _report(
        criterion,
        {"function": psi.to_spec(), "symbol": profile.symbol,
         "alpha": profile.alpha, "N": profile.N, "exponent": exponent,
         "A_grid": list(A_grid)},
        evidence,
        {"mode": mode.value, "slope_floor": 0.05},
        _hypotheses(psi, certificates, conditions),
        notes,
    )


# -- boundary ratios ---------------------------------------------------------

def default_ratio_r_grid() -> np.ndarray:
    return 1 - 2.0 ** -np.arange(1, 21)


def _directions(N: int, samples: int, seed: Seed) -> np.ndarray:
    e1 = np.zeros((1, N), dtype=complex)
    e1[0, 0] = 1
    return np.vstack([e1, sample_sphere(N, samples, seed)])


def _max_image_norms(phi, r_grid, samples, seed) -> np.ndarray:
    directions = _directions(phi.N, samples, seed)
    return np.array([
        float(np.max(np.linalg.norm(phi.apply(r * directions), axis=1)))
        for r in r_grid
    ])


def _check_r_grid(r_grid) -> np.ndarray:
    r_grid = np.asarray(r_grid, dtype=float)
    if np.any(np.diff(r_grid) <= 0) or r_grid[0] <= 0 or r_grid[-1] >= 1:
        raise ValueError("r_grid must increase inside (0, 1)")
    return r_grid


def _ratio_evidence(psi, exponent, r_grid, image_norms):
    """R(r) = ψ⁻¹(1/(1 − max|φ|)^e) / ψ⁻¹(1/(1 − r)^e), in log form."""
    evidence, notes = [], []
    for r, norm in zip(r_grid, image_norms):
        gap = 1 - norm
        if gap <= 0:
            notes.append(f"r={r!r}: |φ| rounds to 1, dropped")
            continue
        try:
            numerator = psi.inverse_of_log(-exponent * math.log(gap))
            denominator = psi.inverse_of_log(-exponent * math.log1p(-r))
        except InverseOutOfRangeError:
            notes.append(f"r={r!r}: ψ⁻¹ saturated, dropped")
            continue
        evidence.append(EvidenceRow(float(r), numerator / denominator, THETA))
    if notes:
        logger.warning("%s: %d radii dropped", psi.label, len(notes))
    return evidence, notes


def boundary_ratio_alpha(
    psi: OrliczFunction,
    phi: SymbolMap,
    alpha: Optional[float],
    r_grid: Optional[Sequence[float]] = None,
    samples_per_r: int = 256,
    seed: Seed = 0,
    certificates: Optional[Sequence[ClassCertificate]] = None
) -> CriterionReport:
    """
    Track R(r) = max_{|z|=r} ψ⁻¹(1/(1−|φ(z)|)^{N(α)}) / ψ⁻¹(1/(1−r)^{N(α)}).

    ``alpha=None`` is the Hardy sentinel, with exponent N. The circle |z| = r
    is probed along e₁ and ``samples_per_r`` random directions. Pass means
    R(r) → 0; a plateau above θ is a Fail with the plateau as margin.
    """
    r_grid = _check_r_grid(default_ratio_r_grid() if r_grid is None
                           else r_grid)
    exponent = n_alpha(phi.N, alpha)
    norms = _max_image_norms(phi, r_grid, samples_per_r, seed)
    evidence, notes = _ratio_evidence(psi, exponent, r_grid, norms)
    return _report(
        CriterionId.BOUNDARY_RATIO_ALPHA,
        {"function": psi.to_spec(), "symbol": phi.to_spec(), "alpha": alpha,
         "N": phi.N, "exponent": exponent, "samples_per_r": samples_per_r,
         "seed": seed},
        evidence,
        _limit_rule(),
        _hypotheses(psi, certificates, (Condition.NABLA0,)),
        notes,
    )


def boundary_ratio_simplified(
    psi: OrliczFunction,
    phi: SymbolMap,
    r_grid: Optional[Sequence[float]] = None,
    samples_per_r: int = 256,
    seed: Seed = 0,
    certificates: Optional[Sequence[ClassCertificate]] = None,
    alphas: Sequence[float] = (0.0, 1.0, 2.0)
) -> CriterionReport:
    """
    The exponent-one ratio ψ⁻¹(1/(1−|φ(z)|)) / ψ⁻¹(1/(1−|z|)).

    For ψ in the Δ²-class its verdict must agree with the N(α) ratio for
    every α in ``alphas``; disagreements are listed in the notes.
    """
    r_grid = _check_r_grid(default_ratio_r_grid() if r_grid is None
                           else r_grid)
    hypotheses = _hypotheses(psi, certificates, (Condition.DELTA_SHARP2,))
    notes = []
    if hypotheses is False:
        logger.warning("%s is not certified Delta^2; the exponent-one ratio "
                       "need not characterize compactness", psi.label)

    norms = _max_image_norms(phi, r_grid, samples_per_r, seed)
    evidence, dropped = _ratio_evidence(psi, 1.0, r_grid, norms)
    notes += dropped
    own, _, _ = _limit_decision(evidence, _limit_rule())

    agreement = {}
    for alpha in alphas:
        rows, _ = _ratio_evidence(psi, n_alpha(phi.N, alpha), r_grid, norms)
        verdict, _, _ = _limit_decision(rows, _limit_rule())
        agreement[str(alpha)] = verdict.value
        if (Verdict.INCONCLUSIVE not in (own, verdict) and own is not verdict):
            notes.append(f"alpha={alpha:g} disagrees: {verdict.value}")

    return _report(
        CriterionId.BOUNDARY_RATIO_SIMPLIFIED,
        {"function": psi.to_spec(), "symbol": phi.to_spec(), "N": phi.N,
         "samples_per_r": samples_per_r, "seed": seed,
         "alpha_verdicts": agreement},
        evidence,
        _limit_rule(),
        hypotheses,
        notes,
    )


def classical_angular_ratio(
    phi: SymbolMap,
    r_grid: Optional[Sequence[float]] = None,
    samples_per_r: int = 256,
    seed: Seed = 0
) -> CriterionReport:
    """max_{|z|=r} (1 − |z|)/(1 − |φ(z)|); Pass when it tends to 0."""
    r_grid = _check_r_grid(default_ratio_r_grid() if r_grid is None
                           else r_grid)
    norms = _max_image_norms(phi, r_grid, samples_per_r, seed)
    evidence, notes = [], []
    for r, norm in zip(r_grid, norms):
        if norm >= 1:
            notes.append(f"r={r!r}: |φ| rounds to 1, dropped")
            continue
        evidence.append(EvidenceRow(float(r), (1 - r) / (1 - norm), THETA))
    return _report(
        CriterionId.CLASSICAL_ANGULAR_RATIO,
        {"symbol": phi.to_spec(), "N": phi.N,
         "samples_per_r": samples_per_r, "seed": seed},
        evidence,
        _limit_rule(),
        notes=notes,
    )


# -- sup norm ----------------------------------------------------------------

def _h_infty_decision(evidence, rule):
    values = {row.parameter: row.lhs for row in evidence}
    bound = rule.get("bound", 1 - 1e-6)
    closed = values.get("closed_form", math.nan)
    value = closed if math.isfinite(closed) else values["lower_bound"]
    verdict = Verdict.PASS if value < bound else Verdict.FAIL
    return verdict, value, []


def h_infty_compact(phi: SymbolMap, samples: int = 4096,
                    seed: Seed = 0) -> CriterionReport:
    """Pass iff ‖φ‖_∞ < 1 − 10⁻⁶, from the closed form when one is known."""
    estimate = sup_norm_estimate(phi, samples, seed)
    bound = 1 - 1e-6
    closed = math.nan if estimate.closed_form is None else estimate.closed_form
    evidence = [
        EvidenceRow("closed_form", float(closed), bound),
        EvidenceRow("lower_bound", estimate.lower_bound, bound),
    ]
    return _report(
        CriterionId.H_INFTY_COMPACT,
        {"symbol": phi.to_spec(), "samples": samples, "seed": seed},
        evidence,
        {"bound": bound},
    )


# -- lens exponents ----------------------------------------------------------

def default_lens_h_grid() -> np.ndarray:
    return 2.0 ** -np.arange(2, 10)


def _lens_decision(evidence, rule):
    reliable = [row for row in evidence
                if row.lhs > 0 and row.rhs < 0.5 * row.lhs]
    if len(reliable) < rule.get("min_cells", 4):
        return Verdict.INCONCLUSIVE, None, ["fewer than 4 reliable cells"]
    slope, intercept = np.polyfit(np.log([row.parameter for row in reliable]),
                                  np.log([row.lhs for row in reliable]), 1)
    margin = float(slope) - rule["target"]
    notes = [f"slope {slope:.4g}, intercept {intercept:.4g}"]
    if margin <= rule.get("tolerance", 0.15):
        return Verdict.PASS, margin, notes
    return Verdict.FAIL, margin, notes


def lens_exponent_check(
    beta: float,
    alpha: Optional[float],
    h_grid: Optional[Sequence[float]] = None,
    n: int = 2 ** 14,
    seed: Seed = 0,
    threads: int = 1
) -> CriterionReport:
    """
    Fit the decay of lens window masses at e₁ against the lower bound
    exponent: 1/β for the Hardy space of the disc and (2 + α)/β for the
    weighted Bergman space of the disc. Pass iff the fitted slope is at
    most the exponent plus 0.15.
    """
    if alpha is None:
        phi = EmbeddedLens(beta, 1)
        target = 1 / beta
    else:
        phi = Lens1D(beta)
        target = (2 + alpha) / beta
    h_grid = default_lens_h_grid() if h_grid is None else h_grid
    profile = build_profile(phi, alpha, h_grid, center_strategy="e1",
                            n_per_cell=n, seed=seed, threads=threads)
    evidence = [EvidenceRow(record.h, record.estimate, record.std_error)
                for record in profile.records]
    fit = profile_slope(profile)
    notes = [] if fit is None else [f"{fit.cells} cells fitted"]
    return _report(
        CriterionId.LENS_LOWER_BOUND_EXPONENT,
        {"beta": beta, "alpha": alpha, "n": n, "seed": seed},
        evidence,
        {"target": target, "tolerance": 0.15, "min_cells": 4},
        notes=notes,
    )


# -- growth inequalities -----------------------------------------------------

def default_c_grid() -> tuple[float, ...]:
    return tuple(2.0 ** k for k in range(0, 21))


def default_y_grid() -> np.ndarray:
    return 2.0 ** np.arange(4, 41)


def _holds(lhs: float, rhs: float) -> bool:
    return lhs <= rhs + 1e-9 * max(1.0, abs(lhs), abs(rhs))


def _large(values) -> float:
    return float(np.median(sorted(set(values))))


def _delta2sharp_decision(evidence, rule):
    """Rows ((C, y), s·log ψ(y), log ψ(Cy)); Pass iff one C covers y >= median."""
    start = _large(row.parameter[1] for row in evidence)
    for c in sorted({row.parameter[0] for row in evidence}):
        rows = [row for row in evidence
                if row.parameter[0] == c and row.parameter[1] >= start]
        if all(_holds(row.lhs, row.rhs) for row in rows):
            return Verdict.PASS, c, [f"C={c:g} works"]
    return Verdict.FAIL, None, ["no C in the grid works"]


def delta2sharp_sufficiency(
    psi: OrliczFunction,
    beta: float,
    N: int,
    C_grid: Optional[Sequence[float]] = None,
    y_grid: Optional[Sequence[float]] = None
) -> CriterionReport:
    """
    Search C with ψ(y)^{1/(Nβ)} <= ψ(Cy) on the large points of ``y_grid``.

    When 1/(Nβ) <= 1, C = 1 works wherever ψ(y) >= 1.
    """
    if not 0 < beta < 1:
        raise ValueError(f"beta must lie in (0, 1), got {beta}")
    exponent = 1 / (N * beta)
    C_grid = default_c_grid() if C_grid is None else tuple(C_grid)
    y_grid = default_y_grid() if y_grid is None else np.asarray(y_grid, float)
    log_psi = np.asarray(psi.log_evaluate(y_grid), dtype=float)
    evidence = []
    for c in C_grid:
        rhs = np.asarray(psi.log_evaluate(c * y_grid), dtype=float)
        evidence += [EvidenceRow((float(c), float(y)), exponent * lhs, float(r))
                     for y, lhs, r in zip(y_grid, log_psi, rhs)]
    notes = ["exponent at most 1"] if exponent <= 1 else []
    return _report(
        CriterionId.DELTA2_SHARP_SUFFICIENCY,
        {"function": psi.to_spec(), "beta": beta, "N": N,
         "exponent": exponent, "C_grid": list(C_grid)},
        evidence,
        {"exponent": exponent},
        notes=notes,
    )


def default_b_grid() -> tuple[float, ...]:
    return (1.0, 2.0, 4.0, 8.0, 16.0)


def default_sufficiency_a_grid() -> tuple[float, ...]:
    return tuple(2.0 ** k for k in range(0, 33))


def _bergman_sufficiency_decision(evidence, rule):
    """Rows ((B, A, x), lhs, rhs); Pass iff every B has an A on x >= median."""
    start = _large(row.parameter[2] for row in evidence)
    needed = []
    for b in sorted({row.parameter[0] for row in evidence}):
        found = None
        for a in sorted({row.parameter[1] for row in evidence
                         if row.parameter[0] == b}):
            rows = [row for row in evidence
                    if row.parameter[:2] == (b, a) and row.parameter[2] >= start]
            if all(_holds(row.lhs, row.rhs) for row in rows):
                found = a
                break
        if found is None:
            return Verdict.FAIL, None, [f"no A in the grid works for B={b:g}"]
        needed.append(found)
    return Verdict.PASS, max(needed), []


def bergman_sufficiency_check(
    psi: OrliczFunction,
    N: int,
    alpha: float,
    beta: float,
    A_grid: Optional[Sequence[float]] = None,
    B_grid: Optional[Sequence[float]] = None,
    x_grid: Optional[Sequence[float]] = None
) -> CriterionReport:
    """
    For every B, search A with ψ(Bx)^{N(α)} <= ψ(Ax)^{α−β}·ψ(x)^{N(β)}
    for large x, the growth condition that carries boundedness on the
    β-weighted space over to compactness on the α-weighted one. The margin
    is the largest A needed.
    """
    if not alpha > beta > -1:
        raise ValueError("the weight change needs alpha > beta > -1")
    A_grid = default_sufficiency_a_grid() if A_grid is None else tuple(A_grid)
    B_grid = default_b_grid() if B_grid is None else tuple(B_grid)
    x_grid = (2.0 ** np.arange(4, 41, 2) if x_grid is None
              else np.asarray(x_grid, dtype=float))
    n_a, n_b = n_alpha(N, alpha), n_alpha(N, beta)
    log_x = np.asarray(psi.log_evaluate(x_grid), dtype=float)
    evidence = []
    for b in B_grid:
        lhs = n_a * np.asarray(psi.log_evaluate(b * x_grid), dtype=float)
        for a in A_grid:
            rhs = ((alpha - beta)
                   * np.asarray(psi.log_evaluate(a * x_grid), dtype=float)
                   + n_b * log_x)
            evidence += [EvidenceRow((float(b), float(a), float(x)),
                                     float(left), float(right))
                         for x, left, right in zip(x_grid, lhs, rhs)]
    return _report(
        CriterionId.BERGMAN_SUFFICIENCY,
        {"function": psi.to_spec(), "N": N, "alpha": alpha, "beta": beta},
        evidence,
        {},
    )


# -- aperture prediction -----------------------------------------------------

def _koranyi_decision(evidence, rule):
    values = {row.parameter: (row.lhs, row.rhs) for row in evidence}
    b, b_n = values["aperture"]
    closed = values["sup_norm"][0]
    if math.isfinite(closed) and closed < 1:
        return Verdict.PASS, closed, ["‖φ‖∞ < 1: compact on every space"]
    if math.isnan(b):
        return Verdict.INCONCLUSIVE, None, ["no known containing region"]
    margin = b / b_n if math.isfinite(b_n) else 0.0
    if values["Delta2&Nabla2"][0] == 1:
        if b < b_n and not math.isclose(b, b_n, rel_tol=1e-12):
            return Verdict.PASS, margin, ["aperture below b_N: compact"]
        if math.isclose(b, b_n, rel_tol=1e-12):
            return Verdict.INCONCLUSIVE, margin, ["aperture b_N: bounded"]
        return Verdict.INCONCLUSIVE, margin, ["aperture above b_N"]
    if values["DeltaSharp2"][0] == 1:
        if values["contact"][0] == 1:
            return Verdict.FAIL, margin, ["counterexample regime"]
        return Verdict.INCONCLUSIVE, margin, ["Delta^2 without contact"]
    return Verdict.INCONCLUSIVE, margin, ["no growth regime applies"]


def koranyi_aperture_verdict(
    phi: SymbolMap,
    psi: OrliczFunction,
    certificates: Optional[Sequence[ClassCertificate]] = None
) -> CriterionReport:
    """
    Predict compactness from a Korányi region Γ(ζ, b) holding φ(𝔹_N).

    For ψ in Δ₂ ∩ ∇₂ the operator is compact when b < b_N (always when
    N = 1) and bounded when b = b_N. For ψ in the Δ²-class a symbol with
    a boundary contact point is the non-compact regime.
    """
    if certificates is None:
        certificates = []
        for condition in (Condition.DELTA2, Condition.NABLA2,
                          Condition.DELTA_SHARP2):
            try:
                certificates.append(certify(psi, condition))
            except GridTooSmallError:
                pass
    verdicts = _verdicts(certificates)
    moderate = (verdicts.get(Condition.DELTA2) is Verdict.PASS
                and verdicts.get(Condition.NABLA2) is Verdict.PASS)
    fast = verdicts.get(Condition.DELTA_SHARP2) is Verdict.PASS

    containment = containing_region(phi)
    b = math.nan if containment.region is None else containment.region.a
    b_n = koranyi_aperture_bound(phi.N)
    closed = phi.closed_form_sup_norm()
    evidence = [
        EvidenceRow("aperture", float(b), b_n),
        EvidenceRow("Delta2&Nabla2", float(moderate), 1.0),
        EvidenceRow("DeltaSharp2", float(fast), 1.0),
        EvidenceRow("sup_norm", math.nan if closed is None else float(closed),
                    1.0),
        EvidenceRow("contact", float(isinstance(phi, LensFamily)), 1.0),
    ]
    return _report(
        CriterionId.KORANYI_APERTURE_VERDICT,
        {"symbol": phi.to_spec(), "function": psi.to_spec(), "N": phi.N,
         "scope": containment.scope},
        evidence,
        {},
        moderate or fast,
    )


_DECIDERS: dict[CriterionId, Callable] = {
    CriterionId.PSI_CARLESON_BIG_OH: _carleson_decision,
    CriterionId.PSI_CARLESON_LITTLE_OH: _carleson_decision,
    CriterionId.BOUNDARY_RATIO_ALPHA: _limit_decision,
    CriterionId.BOUNDARY_RATIO_SIMPLIFIED: _limit_decision,
    CriterionId.CLASSICAL_ANGULAR_RATIO: _limit_decision,
    CriterionId.H_INFTY_COMPACT: _h_infty_decision,
    CriterionId.LENS_LOWER_BOUND_EXPONENT: _lens_decision,
    CriterionId.DELTA2_SHARP_SUFFICIENCY: _delta2sharp_decision,
    CriterionId.KORANYI_APERTURE_VERDICT: _koranyi_decision,
    CriterionId.BERGMAN_SUFFICIENCY: _bergman_sufficiency_decision,
}


# -- batteries ---------------------------------------------------------------

class ConsistencyRow(NamedTuple):
    name: str
    status: str
    detail: str = ""


def _by_id(reports) -> dict[CriterionId, CriterionReport]:
    return {report.criterion_id: report for report in reports}


def _row(name, premise: bool, conclusion: Optional[bool], detail=""):
    if conclusion is None:
        return ConsistencyRow(name, "untested", detail)
    if premise and not conclusion:
        logger.warning("inconsistent: %s %s", name, detail)
        return ConsistencyRow(name, "inconsistent", detail)
    return ConsistencyRow(name, "consistent", detail)


def consistency_rows(
    reports: Sequence[CriterionReport],
    certificates: Sequence[ClassCertificate] = (),
    alpha_reports: Sequence[CriterionReport] = ()
) -> list[ConsistencyRow]:
    """
    Cross-check verdicts that theory ties together.

    * ‖φ‖∞ < 1 implies every compactness criterion passes;
    * a vanishing Carleson profile implies the boundary ratio tends to 0;
    * for ψ in the Δ²-class, boundary ratios agree for all weights
      (``alpha_reports`` holds the extra weights);
    * for power functions, the Orlicz and classical ratios agree;
    * the aperture prediction agrees with the computed ratio verdicts;
    * for ψ in the Δ²-class the lens sufficiency inequality holds, and a
      lens symbol passes the classical test while failing the Orlicz ratio.
    """
    found = _by_id(reports)
    verdict = {key: report.verdict for key, report in found.items()}
    fast = _verdicts(certificates).get(Condition.DELTA_SHARP2) is Verdict.PASS
    rows = []

    if CriterionId.H_INFTY_COMPACT in verdict:
        premise = verdict[CriterionId.H_INFTY_COMPACT] is Verdict.PASS
        failing = [key.value for key in COMPACTNESS_CRITERIA
                   if verdict.get(key) is Verdict.FAIL]
        rows.append(_row("bounded image => compact", premise, not failing,
                         ", ".join(failing)))
    else:
        rows.append(ConsistencyRow("bounded image => compact", "untested"))

    little = verdict.get(CriterionId.PSI_CARLESON_LITTLE_OH)
    ratio = verdict.get(CriterionId.BOUNDARY_RATIO_ALPHA)
    rows.append(_row(
        "vanishing Carleson => boundary ratio", little is Verdict.PASS,
        None if little is None or ratio is None else ratio is not Verdict.FAIL
    ))

    if fast and alpha_reports:
        seen = {report.verdict for report in alpha_reports}
        if ratio is not None:
            seen.add(ratio)
        seen.discard(Verdict.INCONCLUSIVE)
        rows.append(_row("Delta^2 weight independence", True, len(seen) <= 1,
                         ", ".join(sorted(v.value for v in seen))))
    else:
        rows.append(ConsistencyRow("Delta^2 weight independence", "untested"))

    classical = verdict.get(CriterionId.CLASSICAL_ANGULAR_RATIO)
    power = (CriterionId.BOUNDARY_RATIO_ALPHA in found
             and found[CriterionId.BOUNDARY_RATIO_ALPHA]
             .inputs["function"]["family"] == Family.POWER.value)
    if power and classical is not None:
        decided = Verdict.INCONCLUSIVE not in (ratio, classical)
        rows.append(_row("power reduction", decided, ratio is classical,
                         f"{ratio.value} vs {classical.value}"))
    else:
        rows.append(ConsistencyRow("power reduction", "untested"))

    predicted = verdict.get(CriterionId.KORANYI_APERTURE_VERDICT)
    if predicted is Verdict.PASS:
        rows.append(_row("aperture prediction", True,
                         ratio is not Verdict.FAIL
                         and little is not Verdict.FAIL))
    elif predicted is Verdict.FAIL:
        rows.append(_row("aperture prediction", True,
                         ratio is not Verdict.PASS))
    else:
        rows.append(ConsistencyRow("aperture prediction", "untested"))

    sufficiency = verdict.get(CriterionId.DELTA2_SHARP_SUFFICIENCY)
    if fast and sufficiency is not None:
        rows.append(_row("Delta^2 => sufficiency", True,
                         sufficiency is Verdict.PASS))
        contact = (CriterionId.KORANYI_APERTURE_VERDICT in found
                   and predicted is Verdict.FAIL)
        if contact and classical is not None and ratio is not None:
            rows.append(_row("lens separation", True,
                             classical is Verdict.PASS
                             and ratio is Verdict.FAIL,
                             f"{classical.value} vs {ratio.value}"))
    else:
        rows.append(ConsistencyRow("Delta^2 => sufficiency", "untested"))
    return rows


def exit_code(reports: Sequence[CriterionReport],
              rows: Sequence[ConsistencyRow]) -> int:
    if any(row.status == "inconsistent" for row in rows):
        return EXIT_INCONSISTENT
    if reports and all(report.verdict is Verdict.INCONCLUSIVE
                       for report in reports):
        return EXIT_INCONCLUSIVE
    return EXIT_OK


@dataclass
class Battery:
    reports: list[CriterionReport]
    certificates: list[ClassCertificate]
    consistency: list[ConsistencyRow]
    profile: CarlesonProfile
    alpha_reports: list[CriterionReport] = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        return exit_code(self.reports, self.consistency)

    def summary(self) -> dict[str, Any]:
        return {
            "verdicts": {report.criterion_id.value: report.verdict.value
                         for report in self.reports},
            "consistency": [row._asdict() for row in self.consistency],
            "exit_code": self.exit_code,
        }


def _weaker_weight(alpha: float) -> float:
    return alpha - 1 if alpha - 1 > -1 else (alpha - 1) / 2


def run_battery(
    phi: SymbolMap,
    psi: OrliczFunction,
    alpha: Optional[float] = None,
    h_grid: Optional[Sequence[float]] = None,
    r_grid: Optional[Sequence[float]] = None,
    A_grid: Optional[Sequence[float]] = None,
    C_grid: Optional[Sequence[float]] = None,
    n_per_cell: int = 2 ** 14,
    samples_per_r: int = 256,
    seed: Seed = 0,
    threads: int = 1
) -> Battery:
    """
    Run every criterion that applies to (φ, ψ) on H^ψ (``alpha=None``) or
    A_α^ψ, then the consistency rows.

    Reports come back in :py:class:`CriterionId` order whatever the number
    of threads.
    """
    try:
        certificates = certify_all(psi)
    except GridTooSmallError:
        logger.warning("%s: grid too small to certify growth classes",
                       psi.label)
        certificates = []

    profile = build_profile(phi, alpha, h_grid, n_per_cell=n_per_cell,
                            seed=seed, threads=threads)
    lens = isinstance(phi, LensFamily) and phi.pre_dilation == 1

    tasks: list[Callable[[], CriterionReport]] = [
        lambda: psi_carleson_fit(profile, psi, mode=CarlesonMode.BIG_OH,
                                 A_grid=A_grid, certificates=certificates),
        lambda: psi_carleson_fit(profile, psi, mode=CarlesonMode.LITTLE_OH,
                                 A_grid=A_grid, certificates=certificates),
        lambda: boundary_ratio_alpha(psi, phi, alpha, r_grid, samples_per_r,
                                     seed, certificates),
        lambda: classical_angular_ratio(phi, r_grid, samples_per_r, seed),
        lambda: h_infty_compact(phi, seed=seed),
        lambda: koranyi_aperture_verdict(phi, psi, certificates),
    ]
    if alpha is not None:
        tasks.append(lambda: boundary_ratio_simplified(
            psi, phi, r_grid, samples_per_r, seed, certificates))
        tasks.append(lambda: bergman_sufficiency_check(
            psi, phi.N, alpha, _weaker_weight(alpha)))
    if lens:
        tasks.append(lambda: delta2sharp_sufficiency(psi, phi.beta, phi.N,
                                                     C_grid))
        if phi.N == 1:
            tasks.append(lambda: lens_exponent_check(
                phi.beta, alpha, n=n_per_cell, seed=seed))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            reports = list(pool.map(lambda task: task(), tasks))
    else:
        reports = [task() for task in tasks]
    order = list(CriterionId)
    reports.sort(key=lambda report: order.index(report.criterion_id))

    fast = _verdicts(certificates).get(Condition.DELTA_SHARP2) is Verdict.PASS
    alpha_reports = []
    if fast and alpha is not None:
        alpha_reports = [
            boundary_ratio_alpha(psi, phi, other, r_grid, samples_per_r,
                                 seed, certificates)
            for other in (0.0, 1.0, 2.0) if other != alpha
        ]
    rows = consistency_rows(reports, certificates, alpha_reports)
    return Battery(reports, certificates, rows, profile, alpha_reports)
