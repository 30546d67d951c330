"""(rho, tau) parameter sweeps over the CARL state family."""

from __future__ import annotations

import hashlib
import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import __version__
from .carl import CarlParams, carl_state_report
from .correlations import OptimizerConfig, discord, gaussian_entanglement, residual_tripartite
from .nonlocality import optimize_svetlichny
from .symplectic import reduce

MEASURES = ("E12", "E13", "E23", "Dleft23", "Dright23", "E123", "Smax", "populations", "constraints")
EXPANDED = {
    "populations": ("n1", "n2", "n3"),
    "constraints": ("purity_residual", "conservation_residual", "det_constraint_residual"),
}
_PAIRS = {"E12": (0, 1), "E13": (0, 2), "E23": (1, 2)}


@dataclass(frozen=True)
class Grid:
    min: float
    max: float
    count: int
    spacing: str = "lin"

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("grid count must be at least 1")
        if not self.min <= self.max:
            raise ValueError("grid min must not exceed max")
        if self.spacing not in ("lin", "log"):
            raise ValueError("grid spacing must be 'lin' or 'log'")
        if self.spacing == "log" and self.min <= 0:
            raise ValueError("log-spaced grids need a positive minimum")

    @classmethod
    def parse(cls, text: str) -> "Grid":
        parts = text.split(":")
        if len(parts) not in (3, 4):
            raise ValueError(f"grid must look like min:max:count[:lin|log], got {text!r}")
        spacing = parts[3] if len(parts) == 4 else "lin"
        return cls(float(parts[0]), float(parts[1]), int(parts[2]), spacing)

    def values(self) -> np.ndarray:
        if self.count == 1:
            return np.array([self.min])
        if self.spacing == "log":
            return np.geomspace(self.min, self.max, self.count)
        return np.linspace(self.min, self.max, self.count)

    def __str__(self) -> str:
        return f"{self.min!r}:{self.max!r}:{self.count}:{self.spacing}"


@dataclass(frozen=True)
class SweepSpec:
    rho_grid: Grid
    tau_grid: Grid
    measures: tuple[str, ...] = MEASURES
    config: OptimizerConfig = field(default_factory=OptimizerConfig)
    delta: float | None = None
    n0: int = 0

    def __post_init__(self):
        unknown = [m for m in self.measures if m not in MEASURES]
        if unknown:
            raise ValueError(f"unknown measure(s) {unknown}; choose from {', '.join(MEASURES)}")
        if not self.measures:
            raise ValueError("at least one measure is required")
        if self.rho_grid.min <= 0:
            raise ValueError("rho must be positive")
        if self.tau_grid.min < 0:
            raise ValueError("tau must be nonnegative")
        # canonical order, duplicates dropped
        object.__setattr__(self, "measures", tuple(m for m in MEASURES if m in self.measures))

    def columns(self) -> list[str]:
        cols = ["rho", "tau"]
        for m in self.measures:
            cols.extend(EXPANDED.get(m, (m,)))
        return cols + ["flags"]


def _cell_config(config: OptimizerConfig, i: int, j: int) -> OptimizerConfig:
    seed = int(np.random.SeedSequence([config.seed, i, j]).generate_state(1)[0])
    return replace(config, seed=seed)


def compute_cell(spec: SweepSpec, i: int, j: int) -> list:
    """One CSV row for grid cell ``(i, j)``; failures land in the flags column."""
    rho = float(spec.rho_grid.values()[i])
    tau = float(spec.tau_grid.values()[j])
    cfg = _cell_config(spec.config, i, j)
    params = CarlParams(rho, spec.delta, spec.n0)
    values: dict[str, float] = {}
    flags: list[str] = []

    try:
        report = carl_state_report(params, tau)
    except Exception:  # noqa: BLE001 - recorded in the flags column
        report = None
        flags.append("error:evolve")
    sigma = None if report is None else report.cm

    def guarded(name, fn):
        if sigma is None:
            return
        try:
            fn()
        except Exception as exc:  # noqa: BLE001
            flags.append(f"error:{name}:{type(exc).__name__}")

    if "populations" in spec.measures and report is not None:
        values.update(zip(EXPANDED["populations"], report.populations))
    if "constraints" in spec.measures and report is not None:
        values.update(zip(EXPANDED["constraints"], (
            report.purity_residual, report.conservation_residual, report.constraint_residual)))

    if "E123" in spec.measures:
        def tri():
            res = residual_tripartite(sigma, cfg)
            values["E123"] = res.value
            for name, pair in _PAIRS.items():
                values[name] = res.pairwise[pair]
            if not res.converged:
                flags.append("nc:E123")
        guarded("E123", tri)
    for name, pair in _PAIRS.items():
        if name in spec.measures and name not in values:
            def pairwise(name=name, pair=pair):
                res = gaussian_entanglement(reduce(sigma, pair), config=cfg)
                values[name] = res.value
                if not res.converged:
                    flags.append(f"nc:{name}")
            guarded(name, pairwise)
    for name, direction in (("Dleft23", "left"), ("Dright23", "right")):
        if name in spec.measures:
            def disc(name=name, direction=direction):
                res = discord(reduce(sigma, [1, 2]), direction, cfg)
                values[name] = res.value
                if not res.converged:
                    flags.append(f"nc:{name}")
            guarded(name, disc)
    if "Smax" in spec.measures:
        def smax():
            res = optimize_svetlichny(sigma, cfg)
            values["Smax"] = abs(res.s_value)
            if not res.converged:
                flags.append("nc:Smax")
        guarded("Smax", smax)

    row = [rho, tau]
    for col in spec.columns()[2:-1]:
        row.append(values.get(col, math.nan))
    row.append(";".join(flags) if flags else "ok")
    return row


def _cell_task(args):
    spec, i, j = args
    return compute_cell(spec, i, j)


def run_sweep(spec: SweepSpec, jobs: int | None = 1) -> list[list]:
    """All rows ordered by (rho index, tau index) regardless of completion order."""
    cells = [(spec, i, j) for i in range(spec.rho_grid.count) for j in range(spec.tau_grid.count)]
    if jobs is None:
        jobs = os.cpu_count() or 1
    if jobs <= 1 or len(cells) == 1:
        return [_cell_task(c) for c in cells]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_cell_task, cells, chunksize=max(1, len(cells) // (4 * jobs))))


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    value = float(value)
    if math.isnan(value):
        return "nan"
    return repr(value)


def format_csv(spec: SweepSpec, rows: list[list]) -> str:
    buf = io.StringIO()
    buf.write(",".join(spec.columns()) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


def format_manifest(spec: SweepSpec, rows: list[list], csv_text: str) -> str:
    """Key-value manifest. Timing is left out so reruns stay byte-identical."""
    cfg = spec.config
    lines = [
        "tool=gausscorr",
        f"version={__version__}",
        f"grid_rho={spec.rho_grid}",
        f"grid_tau={spec.tau_grid}",
        f"measures={','.join(spec.measures)}",
        f"delta={'1/rho' if spec.delta is None else repr(float(spec.delta))}",
        f"n0={spec.n0}",
        f"restarts={'default' if cfg.restarts is None else cfg.restarts}",
        f"max_iterations={cfg.max_iterations}",
        f"tol={cfg.tol!r}",
        f"penalty={cfg.penalty!r}",
        f"seed={cfg.seed}",
        "cell_seeds=SeedSequence([seed, i_rho, i_tau])",
        f"csv_sha256={hashlib.sha256(csv_text.encode()).hexdigest()}",
    ]
    n_tau = spec.tau_grid.count
    for k, row in enumerate(rows):
        lines.append(f"cell.{k // n_tau}.{k % n_tau}={row[-1]}")
    return "\n".join(lines) + "\n"


def parse_manifest(text: str) -> SweepSpec:
    """Rebuild the sweep configuration recorded in a manifest."""
    kv = {}
    for line in text.splitlines():
        if "=" in line and not line.startswith("#"):
            key, _, value = line.partition("=")
            kv[key.strip()] = value.strip()
    try:
        restarts = None if kv["restarts"] == "default" else int(kv["restarts"])
        config = OptimizerConfig(restarts=restarts, max_iterations=int(kv["max_iterations"]),
                                 tol=float(kv["tol"]), penalty=float(kv["penalty"]), seed=int(kv["seed"]))
        delta = None if kv["delta"] == "1/rho" else float(kv["delta"])
        return SweepSpec(Grid.parse(kv["grid_rho"]), Grid.parse(kv["grid_tau"]),
                         tuple(kv["measures"].split(",")), config, delta, int(kv["n0"]))
    except KeyError as exc:
        raise ValueError(f"manifest lacks key {exc.args[0]!r}") from None
