"""
Command-line front end: ``orlicz-lab {certify,profile,analyze,majorant}``.

Each subcommand reads one JSON configuration document, validates it with
the pydantic models below, writes its reports to ``--out`` and finishes
with ``manifest.json``, the list of every file it wrote.

Exit codes:

* 0 -- success, no inconsistent cross-check;
* 2 -- some consistency row is inconsistent;
* 3 -- every criterion came back Inconclusive;
* 64 -- invalid configuration;
* 65 -- the symbol left the ball;
* 66 -- the breakpoint construction ran out of domain.
"""

import argparse
import csv
import json
import logging
import math
import os
import sys
import time
from pathlib import Path
from typing import Any, Literal, Optional, Sequence

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    ValidationError,
    field_validator,
    model_validator,
)

from orlicz_lab.carleson_profiles import MIN_SAMPLES, build_profile
from orlicz_lab.compactness_criteria import run_battery
from orlicz_lab.concave_builder import (
    MIN_N_MAX,
    DomainExhaustedError,
    MonotoneFunctionSpec,
    MonotoneKind,
    build_sequence,
    build_v,
    check_properties,
    orlicz_from_v,
    ratio_delta,
)
from orlicz_lab.orlicz_core import (
    Family,
    OrliczFunction,
    certify_all,
    check_implications,
    check_invariants,
    orlicz_from_spec,
)
from orlicz_lab.symbol_maps import (
    SelfMapViolation,
    SymbolFamily,
    SymbolMap,
    symbol_from_spec,
)

logger = logging.getLogger(__name__)

EXIT_CONFIG = 64
EXIT_SELF_MAP = 65
EXIT_EXHAUSTED = 66

THREADS_VARIABLE = "ORLICZ_LAB_THREADS"


# -- configuration -----------------------------------------------------------

class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class OrliczSpec(_Strict):
    family: Family
    params: dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _buildable(self):
        self.build()
        return self

    def build(self) -> OrliczFunction:
        return orlicz_from_spec({"family": self.family.value,
                                 "params": self.params})


class SymbolSpec(_Strict):
    family: SymbolFamily
    params: dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _buildable(self):
        self.build()
        return self

    def build(self) -> SymbolMap:
        return symbol_from_spec({"family": self.family.value,
                                 "params": self.params})


class SpaceSpec(_Strict):
    kind: Literal["hardy", "bergman"]
    alpha: Optional[float] = Field(default=None, gt=-1)
    N: int = Field(default=1, ge=1)

    @model_validator(mode="after")
    def _weight(self):
        if self.kind == "bergman" and self.alpha is None:
            raise ValueError("bergman spaces need alpha")
        if self.kind == "hardy" and self.alpha is not None:
            raise ValueError("hardy spaces take no alpha")
        return self


def _open_unit(values: Optional[list[float]], name: str):
    if values is not None and not all(0 < v < 1 for v in values):
        raise ValueError(f"{name} entries must lie in (0, 1)")
    return values


class GridSpec(_Strict):
    h_grid: Optional[list[float]] = None
    r_grid: Optional[list[float]] = None
    A_grid: Optional[list[float]] = None
    C_grid: Optional[list[float]] = None
    x_grid: Optional[list[float]] = None

    @field_validator("h_grid")
    @classmethod
    def _h(cls, values):
        return _open_unit(values, "h_grid")

    @field_validator("r_grid")
    @classmethod
    def _r(cls, values):
        _open_unit(values, "r_grid")
        if values is not None and any(b <= a for a, b in zip(values,
                                                              values[1:])):
            raise ValueError("r_grid must increase")
        return values

    @field_validator("A_grid", "x_grid")
    @classmethod
    def _positive(cls, values):
        if values is not None and not all(v > 0 for v in values):
            raise ValueError("grid entries must be positive")
        return values

    @field_validator("C_grid")
    @classmethod
    def _at_least_one(cls, values):
        if values is not None and not all(v >= 1 for v in values):
            raise ValueError("C_grid entries must be >= 1")
        return values


class SampleSpec(_Strict):
    n_per_cell: int = Field(default=2 ** 14, ge=MIN_SAMPLES)
    samples_per_r: int = Field(default=256, ge=1)


class AnalysisConfig(_Strict):
    orlicz: OrliczSpec
    symbol: Optional[SymbolSpec] = None
    space: SpaceSpec = Field(default_factory=lambda: SpaceSpec(kind="hardy"))
    grids: GridSpec = Field(default_factory=GridSpec)
    samples: SampleSpec = Field(default_factory=SampleSpec)
    seed: int = Field(ge=0)
    out: Optional[str] = None

    @model_validator(mode="after")
    def _dimension(self):
        if self.symbol is not None and self.symbol.build().N != self.space.N:
            raise ValueError(
                f"symbol acts on dimension {self.symbol.build().N}, "
                f"space has N={self.space.N}"
            )
        return self


class MonotoneSpec(_Strict):
    kind: MonotoneKind
    q: float = 1.0
    c: float = 1.0
    x: Optional[list[float]] = None
    y: Optional[list[float]] = None
    x_max: float = math.inf

    @model_validator(mode="after")
    def _buildable(self):
        self.build()
        return self

    def build(self) -> MonotoneFunctionSpec:
        return MonotoneFunctionSpec(self.kind, q=self.q, c=self.c, x=self.x,
                                    y=self.y, x_max=self.x_max)


class MajorantConfig(_Strict):
    f: MonotoneSpec
    g: MonotoneSpec
    n_max: int = Field(default=40, ge=MIN_N_MAX)
    x_grid: Optional[list[float]] = None
    strict: bool = False
    seed: int = Field(default=0, ge=0)
    out: Optional[str] = None


# -- output ------------------------------------------------------------------

def _number(value) -> str:
    """Round-trip decimal text for floats; everything else via str."""
    if isinstance(value, float):
        return repr(value)
    return str(value)


class RunWriter:
    """Writes artifacts under one directory and keeps the manifest."""

    def __init__(self, out: Path, command: str, config: BaseModel):
        self.out = out
        self.command = command
        self.config = config
        self.files: list[str] = []
        self.timings: dict[str, float] = {}
        self._started = time.perf_counter()
        out.mkdir(parents=True, exist_ok=True)

    def _path(self, name: str) -> Path:
        path = self.out / name
        path.parent.mkdir(parents=True, exist_ok=True)
        self.files.append(name)
        return path

    def stage(self, name: str) -> None:
        now = time.perf_counter()
        self.timings[name] = now - self._started
        self._started = now

    def json(self, name: str, data: Any) -> None:
        with open(self._path(name), "w") as file:
            json.dump(data, file, indent=2, sort_keys=True)
            file.write("\n")

    def csv(self, name: str, header: Sequence[str],
            rows: Sequence[Sequence[Any]]) -> None:
        with open(self._path(name), "w", newline="") as file:
            writer = csv.writer(file)
            writer.writerow(header)
            for row in rows:
                writer.writerow([_number(value) for value in row])

    def register(self, name: str) -> Path:
        """Reserve ``name`` for a writer that opens the file itself."""
        return self._path(name)

    def manifest(self, exit_code: int, **extra) -> None:
        from orlicz_lab import __version__

        listing = [{"path": name, "bytes": (self.out / name).stat().st_size}
                   for name in self.files]
        data = {
            "command": self.command,
            "version": __version__,
            "config": self.config.model_dump(mode="json"),
            "files": listing,
            "timings": self.timings,
            "exit_code": exit_code,
        }
        data.update(extra)
        with open(self.out / "manifest.json", "w") as file:
            json.dump(data, file, indent=2, sort_keys=True)
            file.write("\n")


def _certificate_outputs(writer: RunWriter, psi: OrliczFunction,
                         x_grid: Optional[list[float]]):
    certificates = certify_all(psi, x_grid=x_grid)
    writer.json("certificates.json",
                [certificate.to_dict() for certificate in certificates])
    writer.csv("implications.csv", ["implication", "status"],
               check_implications(certificates))
    writer.csv("invariants.csv", ["property", "holds"],
               [(name, int(holds)) for name, holds in check_invariants(psi)])
    return certificates


# -- commands ----------------------------------------------------------------

def cmd_certify(config: AnalysisConfig, out: Path, threads: int = 1) -> int:
    psi = config.orlicz.build()
    writer = RunWriter(out, "certify", config)
    certificates = _certificate_outputs(writer, psi, config.grids.x_grid)
    writer.stage("certify")
    for certificate in certificates:
        logger.info("%s %s: %s", psi.label, certificate.condition.value,
                    certificate.verdict.value)
    writer.manifest(0)
    return 0


def _symbol(config: AnalysisConfig) -> SymbolMap:
    if config.symbol is None:
        raise ValueError("this command needs a symbol")
    return config.symbol.build()


def cmd_profile(config: AnalysisConfig, out: Path, threads: int = 1) -> int:
    phi = _symbol(config)
    writer = RunWriter(out, "profile", config)
    profile = build_profile(phi, config.space.alpha, config.grids.h_grid,
                            n_per_cell=config.samples.n_per_cell,
                            seed=config.seed, r_grid=config.grids.r_grid,
                            threads=threads)
    writer.stage("profile")
    profile.to_csv(writer.register("profile.csv"))
    writer.json("profile.json", profile.to_dict())
    writer.manifest(0)
    return 0


def cmd_analyze(config: AnalysisConfig, out: Path, threads: int = 1) -> int:
    phi = _symbol(config)
    psi = config.orlicz.build()
    writer = RunWriter(out, "analyze", config)
    battery = run_battery(
        phi, psi, config.space.alpha,
        h_grid=config.grids.h_grid,
        r_grid=config.grids.r_grid,
        A_grid=config.grids.A_grid,
        C_grid=config.grids.C_grid,
        n_per_cell=config.samples.n_per_cell,
        samples_per_r=config.samples.samples_per_r,
        seed=config.seed,
        threads=threads,
    )
    writer.stage("battery")

    writer.json("certificates.json",
                [certificate.to_dict() for certificate in battery.certificates])
    battery.profile.to_csv(writer.register("profile.csv"))
    named = [(report.criterion_id.value, report) for report in battery.reports]
    named += [(f"{report.criterion_id.value}_alpha_{report.inputs['alpha']:g}",
               report) for report in battery.alpha_reports]
    for name, report in named:
        report.to_csv(writer.register(f"reports/{name}.csv"))
        writer.json(f"reports/{name}.json", report.to_dict())
    writer.csv("consistency.csv", ["name", "status", "detail"],
               battery.consistency)
    writer.json("summary.json", battery.summary())
    writer.stage("write")
    writer.manifest(battery.exit_code,
                    consistency=[row._asdict() for row in battery.consistency])
    return battery.exit_code


def _default_x_grid(f: MonotoneFunctionSpec, a_max: float) -> list[float]:
    grid, x = [], 2.0 ** -4
    while len(grid) < 4096 and f.evaluate(x) <= a_max:
        grid.append(x)
        x *= 2 ** 0.25
    return grid


def cmd_majorant(config: MajorantConfig, out: Path, threads: int = 1) -> int:
    f, g = config.f.build(), config.g.build()
    writer = RunWriter(out, "majorant", config)
    seq = build_sequence(f, g, config.n_max, strict=config.strict)
    writer.stage("sequence")
    if seq.exhausted:
        logger.error("domain exhausted after a_%d", seq.last_n)

    writer.csv("breakpoints.csv", ["n", "a_n"], list(enumerate(seq.values)))
    if len(seq.values) >= 4:
        v = build_v(seq)
        writer.csv("majorant.csv", ["n", "a_n", "v_a_n", "slope"],
                   [(n, a, value, slope) for n, (a, value, slope) in
                    enumerate(zip(v.breakpoints.tolist(), v.values.tolist(),
                                  v.slopes.tolist() + [math.nan]))])
        writer.json("majorant.json", v.to_dict())
        writer.json("psi.json", orlicz_from_v(v).to_spec())
        x_grid = config.x_grid or _default_x_grid(f, v.domain_max)
        writer.csv("properties.csv", ["name", "n", "holds"],
                   [(row.name, row.n, int(row.holds))
                    for row in check_properties(seq, f, g, x_grid)])
        try:
            ratio = ratio_delta(v, f, g, x_grid)
        except ValueError as error:
            logger.warning("ratio not computed: %s", error)
        else:
            writer.json("ratio.json", ratio._asdict())
            logger.info("inf v(f)/v(g) = %r", ratio.delta)
    writer.stage("majorant")

    code = EXIT_EXHAUSTED if seq.exhausted else 0
    writer.manifest(code, exhausted=seq.exhausted, last_n=seq.last_n)
    return code


COMMANDS = {
    "certify": (cmd_certify, AnalysisConfig),
    "profile": (cmd_profile, AnalysisConfig),
    "analyze": (cmd_analyze, AnalysisConfig),
    "majorant": (cmd_majorant, MajorantConfig),
}


# -- entry point -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="orlicz-lab",
        description="Numerical checks for composition operators on "
                    "Hardy-Orlicz and Bergman-Orlicz spaces.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub = subparsers.add_parser(name)
        sub.add_argument("--config", required=True, type=Path,
                         help="JSON configuration document")
        sub.add_argument("--seed", type=int, default=None,
                         help="override the configured seed")
        sub.add_argument("--out", type=Path, default=None,
                         help="output directory")
        sub.add_argument("--threads", type=int, default=None,
                         help=f"worker threads (default ${THREADS_VARIABLE} "
                              "or 1)")
        verbosity = sub.add_mutually_exclusive_group()
        verbosity.add_argument("--verbose", "-v", action="store_true")
        verbosity.add_argument("--quiet", "-q", action="store_true")
    return parser


def _threads(requested: Optional[int]) -> int:
    if requested is None:
        requested = int(os.environ.get(THREADS_VARIABLE, "1"))
    if requested < 1:
        raise ValueError(f"threads must be >= 1, got {requested}")
    return requested


def _load(args, model):
    data = json.loads(args.config.read_text())
    if not isinstance(data, dict):
        raise ValueError("configuration must be a JSON object")
    if args.seed is not None:
        data["seed"] = args.seed
    return model.model_validate(data)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    level = (logging.DEBUG if args.verbose
             else logging.WARNING if args.quiet else logging.INFO)
    logging.basicConfig(level=level, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")

    command, model = COMMANDS[args.command]
    try:
        config = _load(args, model)
        threads = _threads(args.threads)
    except (ValidationError, ValueError, OSError) as error:
        logger.error("invalid configuration: %s", error)
        return EXIT_CONFIG

    out = args.out or Path(config.out or f"orlicz-lab-{args.command}")
    try:
        return command(config, out, threads)
    except SelfMapViolation as error:
        logger.error("%s", error)
        return EXIT_SELF_MAP
    except DomainExhaustedError as error:
        logger.error("domain exhausted after a_%d", error.last_n)
        return EXIT_EXHAUSTED
    except ValueError as error:
        logger.error("invalid configuration: %s", error)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
