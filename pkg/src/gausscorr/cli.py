"""Command-line front end: ``gausscorr {evolve,analyze,sweep,svetlichny,plotscript}``.

Exit codes: 0 success, 1 numerical or convergence failure, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import csv
import itertools
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, cmio
from .carl import CarlParams, carl_state_report
from .correlations import (
    OptimizerConfig,
    PurityError,
    discord,
    gaussian_entanglement,
    is_ppt,
    pure_entanglement,
    residual_tripartite,
)
from .nonlocality import QUANTUM_BOUND, optimize_svetlichny
from .symplectic import (
    DEFAULT_TOL,
    CovarianceError,
    ModePartition,
    mode_populations,
    n_modes,
    reduce,
    renyi2_entropy,
    validate_cm,
)
from .sweep import MEASURES, Grid, SweepSpec, format_csv, format_manifest, parse_manifest, run_sweep

EXIT_OK, EXIT_NUMERICAL, EXIT_USAGE = 0, 1, 2
INVARIANT_TOL = 1e-6
FIGURES = ("E12", "E13", "E23", "Dleft23", "Dright23", "E123", "Smax")


class UsageError(Exception):
    pass


class NumericalFailure(Exception):
    pass


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _emit(out, key: str, value) -> None:
    out.write(f"{key}={_fmt(value)}\n")


def _config(args) -> OptimizerConfig:
    try:
        return OptimizerConfig(restarts=args.restarts, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _params(args) -> CarlParams:
    if args.tau is not None and args.tau < 0:
        raise UsageError(f"--tau must be nonnegative, got {args.tau}")
    try:
        return CarlParams(args.rho, args.delta, args.n0)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _write_text(path: str | None, text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8", newline="\n")


# ----------------------------------------------------------------- evolve


def cmd_evolve(args) -> int:
    params = _params(args)
    try:
        report = carl_state_report(params, args.tau)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    lines = [
        ("rho", params.rho), ("tau", report.tau), ("delta", params.delta),
        ("purity_residual", report.purity_residual),
        ("conservation_residual", report.conservation_residual),
        ("det_constraint_residual", report.constraint_residual),
    ]
    lines += [(f"n{j + 1}", float(v)) for j, v in enumerate(report.populations)]
    lines += [(f"thermal_residual{j + 1}", float(v)) for j, v in enumerate(report.thermal_residuals)]
    text = "".join(f"{k}={_fmt(v)}\n" for k, v in lines)
    if args.out in (None, "-"):
        # keep stdout loadable as a CM file
        sys.stdout.write(cmio.dumps(report.cm))
        sys.stdout.write("".join(f"# {ln}\n" for ln in text.splitlines()))
    else:
        cmio.save(args.out, report.cm, comment=f"CARL state rho={params.rho!r} tau={report.tau!r}")
        sys.stdout.write(text)

    worst = max(abs(report.purity_residual), abs(report.conservation_residual),
                abs(report.constraint_residual))
    if worst > args.tol:
        raise NumericalFailure(f"invariant residual {worst:.3e} exceeds tolerance {args.tol:g}")
    return EXIT_OK


# ---------------------------------------------------------------- analyze


def _default_partitions(n: int) -> list[ModePartition]:
    if n == 1:
        return []
    if n == 2:
        return [ModePartition([0], [1])]
    parts = [ModePartition([i], [m for m in range(n) if m != i]) for i in range(n)]
    parts += [ModePartition([i], [j]) for i, j in itertools.combinations(range(n), 2)]
    if n == 3:
        parts.append(ModePartition([0], [1], [2]))
    return parts


def _analyze_bipartition(out, sigma, part: ModePartition, config, tol) -> bool:
    key = part.label()
    sub = reduce(sigma, part.modes)
    ppt = is_ppt(sub, ModePartition(range(len(part.party_a)),
                                    range(len(part.party_a), len(part.modes))), tol)
    _emit(out, f"ppt[{key}]", ppt.ppt)
    _emit(out, f"min_nu_pt[{key}]", ppt.min_eigenvalue)
    converged = True
    if validate_cm(sub, tol).is_pure:
        n_a = len(part.party_a)
        _emit(out, f"E[{key}]", pure_entanglement(sub, ModePartition(range(n_a), range(n_a, len(part.modes))), tol))
    elif sub.shape == (4, 4):
        res = gaussian_entanglement(sub, config=config, tol=tol)
        _emit(out, f"E[{key}]", res.value)
        converged &= res.converged
    else:
        _emit(out, f"E[{key}]", "unsupported")
    if sub.shape == (4, 4):
        for label, direction in (("Dleft", "left"), ("Dright", "right")):
            res = discord(sub, direction, config, tol)
            _emit(out, f"{label}[{key}]", res.value)
            converged &= res.converged
    return converged


def cmd_analyze(args) -> int:
    try:
        sigma = cmio.load(args.cm)
    except OSError as exc:
        raise UsageError(f"cannot read {args.cm}: {exc.strerror}") from None
    tol = args.tol
    report = validate_cm(sigma, tol)
    if not report.is_physical:
        raise UsageError(f"{args.cm}: CM violates the uncertainty principle "
                         f"(min symplectic eigenvalue {report.min_symplectic_eigenvalue:.6g})")
    config = _config(args)
    n = n_modes(sigma)
    out = sys.stdout
    _emit(out, "modes", n)
    _emit(out, "pure", report.is_pure)
    _emit(out, "entropy", renyi2_entropy(sigma, tol))
    for j, v in enumerate(mode_populations(sigma)):
        _emit(out, f"n{j + 1}", float(v))

    try:
        parts = [ModePartition.parse(p) for p in args.partition] if args.partition else _default_partitions(n)
        for p in parts:
            p.check(n)
    except (ValueError, IndexError) as exc:
        raise UsageError(str(exc)) from None

    converged = True
    for part in parts:
        if part.party_c is None:
            converged &= _analyze_bipartition(out, sigma, part, config, tol)
            continue
        if n != 3:
            raise UsageError("tripartitions are supported for three-mode states only")
        key = part.label()
        try:
            res = residual_tripartite(reduce(sigma, part.modes), config, tol)
        except PurityError:
            _emit(out, f"E123[{key}]", "unsupported-mixed")
            continue
        _emit(out, f"E123[{key}]", res.value)
        _emit(out, f"probe[{key}]", res.probe + 1)
        for i, d in enumerate(res.decompositions):
            _emit(out, f"decomposition{i + 1}[{key}]", d)
        converged &= res.converged
    _emit(out, "converged", converged)
    return EXIT_OK if converged else EXIT_NUMERICAL


# ------------------------------------------------------------- svetlichny


def cmd_svetlichny(args) -> int:
    if args.cm:
        try:
            sigma = cmio.load(args.cm)
        except OSError as exc:
            raise UsageError(f"cannot read {args.cm}: {exc.strerror}") from None
        if sigma.shape != (6, 6):
            raise UsageError("the Svetlichny parameter needs a three-mode CM")
    else:
        if args.rho is None or args.tau is None:
            raise UsageError("give either --cm or both --rho and --tau")
        try:
            sigma = carl_state_report(_params(args), args.tau).cm
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    try:
        res = optimize_svetlichny(sigma, _config(args), args.tol)
    except CovarianceError as exc:
        raise UsageError(str(exc)) from None
    out = sys.stdout
    _emit(out, "S", res.s_value)
    _emit(out, "abs_S", abs(res.s_value))
    _emit(out, "M", res.m)
    _emit(out, "M_prime", res.m_prime)
    _emit(out, "violated", res.violated)
    _emit(out, "converged", res.converged)
    _emit(out, "settings", " ".join(repr(float(x)) for x in res.settings.to_array()))
    if abs(res.s_value) > QUANTUM_BOUND + 1e-6:
        raise NumericalFailure(f"|S| = {abs(res.s_value)} exceeds the quantum bound")
    return EXIT_OK if res.converged else EXIT_NUMERICAL


# ------------------------------------------------------------------ sweep


def _sweep_spec(args) -> SweepSpec:
    if args.manifest:
        try:
            return parse_manifest(Path(args.manifest).read_text(encoding="utf-8"))
        except OSError as exc:
            raise UsageError(f"cannot read {args.manifest}: {exc.strerror}") from None
    measures = tuple(m.strip() for m in args.measures.split(",") if m.strip())
    config = OptimizerConfig(restarts=args.restarts, seed=args.seed)
    return SweepSpec(Grid.parse(args.grid_rho), Grid.parse(args.grid_tau), measures,
                     config, args.delta, args.n0)


def cmd_sweep(args) -> int:
    try:
        spec = _sweep_spec(args)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    started = time.perf_counter()
    rows = run_sweep(spec, args.jobs)
    elapsed = time.perf_counter() - started
    csv_text = format_csv(spec, rows)
    manifest = format_manifest(spec, rows, csv_text)
    if args.out in (None, "-"):
        sys.stdout.write(csv_text)
    else:
        Path(args.out).write_text(csv_text, encoding="utf-8", newline="\n")
        Path(args.out + ".manifest").write_text(manifest, encoding="utf-8", newline="\n")
    failed = sum(row[-1] != "ok" for row in rows)
    print(f"sweep: {len(rows)} cells in {elapsed:.2f} s, {failed} flagged", file=sys.stderr)
    return EXIT_OK if failed == 0 else EXIT_NUMERICAL


# ------------------------------------------------------------- plotscript


def plot_script(csv_path: str, figure: str) -> str:
    """Gnuplot script drawing ``figure`` over the (rho, tau) plane of a sweep CSV."""
    if figure not in FIGURES:
        raise UsageError(f"unknown figure id {figure!r}; valid ids: {', '.join(FIGURES)}")
    try:
        with open(csv_path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            rows = list(reader)
    except OSError as exc:
        raise UsageError(f"cannot read {csv_path}: {exc.strerror}") from None
    except StopIteration:
        raise UsageError(f"{csv_path} is empty") from None
    missing = [c for c in ("rho", "tau", figure) if c not in header]
    if missing:
        raise UsageError(f"{csv_path} lacks column(s) {', '.join(missing)}; found {', '.join(header)}")
    rho = np.array([float(r[header.index("rho")]) for r in rows])
    tau = np.array([float(r[header.index("tau")]) for r in rows])
    n_rho, n_tau = len(np.unique(rho)), len(np.unique(tau))
    log_rho = rho.size > 0 and rho.min() > 0 and rho.max() / rho.min() > 20

    labels = {
        "E12": "E_{1|2}", "E13": "E_{1|3}", "E23": "E_{2|3}",
        "Dleft23": "D^{<-}_{2|3}", "Dright23": "D^{->}_{2|3}",
        "E123": "E_{1|2|3}", "Smax": "max |S|",
    }
    col = header.index(figure) + 1
    lines = [
        f"# {figure} versus (rho, tau) from {csv_path}",
        "set datafile separator ','",
        "set datafile missing 'nan'",
        f"set title '{labels[figure]}'",
        "set xlabel 'rho'",
        "set ylabel 'tau'",
        f"set zlabel '{labels[figure]}'",
        "set pm3d",
        "set palette rgbformulae 33,13,10",
        f"set dgrid3d {n_tau},{n_rho} splines",
        "set hidden3d",
    ]
    if log_rho:
        lines.append("set logscale x")
    plot = f"splot '{csv_path}' every ::1 using 1:2:{col} with pm3d title '{figure}'"
    if figure == "Smax":
        lines.append("set zrange [3.9:*]")
        plot += ", 4 with lines dashtype 2 lc rgb 'black' title 'S = 4 (classical bound)'"
    lines.append(plot)
    return "\n".join(lines) + "\n"


def cmd_plotscript(args) -> int:
    _write_text(args.out, plot_script(args.csv, args.figure))
    return EXIT_OK


# ----------------------------------------------------------------- parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_optimizer(p) -> None:
    p.add_argument("--restarts", type=int, default=None, help="multistart count (default per routine)")
    p.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL, help="physicality tolerance")


def _add_model(p, required: bool) -> None:
    p.add_argument("--rho", type=float, required=required, help="recoil parameter")
    p.add_argument("--tau", type=float, required=required, help="dimensionless time")
    p.add_argument("--delta", type=float, default=None, help="detuning (default 1/rho)")
    p.add_argument("--n0", type=int, default=0, help="initial momentum index (default 0)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gausscorr", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("evolve", help="propagate the CARL CM from the vacuum")
    _add_model(p, True)
    p.add_argument("--out", default="-", help="CM file (default stdout)")
    p.add_argument("--tol", type=float, default=INVARIANT_TOL, help="invariant tolerance (default 1e-6)")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("analyze", help="correlation measures of a CM file")
    p.add_argument("cm", help="CM text file")
    p.add_argument("--partition", action="append", default=[],
                   help="1-based partition such as 1|2, 1|23 or 1|2|3 (repeatable)")
    _add_optimizer(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("sweep", help="measures over a (rho, tau) grid as CSV")
    p.add_argument("--grid-rho", default="0.05:20:40:log", help="min:max:count[:lin|log]")
    p.add_argument("--grid-tau", default="0:3:40:lin", help="min:max:count[:lin|log]")
    p.add_argument("--measures", default=",".join(MEASURES), help="comma-separated subset of " + ",".join(MEASURES))
    p.add_argument("--delta", type=float, default=None, help="detuning (default 1/rho per cell)")
    p.add_argument("--n0", type=int, default=0)
    p.add_argument("--restarts", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=None, help="worker processes (default: all cores)")
    p.add_argument("--out", default="-", help="CSV path; the manifest goes to OUT.manifest")
    p.add_argument("--manifest", default=None, help="replay the configuration of a manifest")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("svetlichny", help="maximize the Svetlichny parameter")
    _add_model(p, False)
    p.add_argument("--cm", default=None, help="three-mode CM file instead of a CARL state")
    _add_optimizer(p)
    p.set_defaults(func=cmd_svetlichny)

    p = sub.add_parser("plotscript", help="gnuplot script for one sweep column")
    p.add_argument("csv", help="sweep CSV")
    p.add_argument("--figure", required=True, help="one of " + ", ".join(FIGURES))
    p.add_argument("--out", default="-", help="script path (default stdout)")
    p.set_defaults(func=cmd_plotscript)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, CovarianceError) as exc:
        print(f"gausscorr {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalFailure, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"gausscorr {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
