"""Command-line driver: ``spectral-gaps <command> ...``.

Commands
--------
solve   discretize a domain and write its smallest eigenvalues
oracle  write a closed-form spectrum (rectangle, box, disk)
check   evaluate the eigenvalue inequalities on a spectrum file
lemma   verify the eigenfunction inequalities on a freshly solved basis
fit     fitted gap constant next to the theorem constant
report  aggregate check CSVs and emit plot-ready data files

Exit codes: 0 success, 1 usage error, 2 solver failure, 3 I/O or parse
failure.  ``--config FILE`` (JSON, or YAML by extension) supplies default
values for any option, with command-line flags taking precedence.
"""

import argparse
import csv
from dataclasses import dataclass, field
import glob
import json
import os
import sys

import numpy as np

from . import bounds, geometry, oracles, quadrature
from .discretize import assemble_euclidean, assemble_hyperbolic
from .eigensolve import smallest_eigenpairs
from .errors import (EmptyGrid, Infeasible, InvalidDomain, KTooLarge, NoConvergence,
                     SpectralGapsError, SpectrumFormatError, UnsupportedShape)
from .spectrum_file import read_spectrum, write_spectrum

EXIT_OK, EXIT_USAGE, EXIT_SOLVER, EXIT_IO = 0, 1, 2, 3

PRESETS = {
    "square": ("rectangle", (1.0, 1.0)),
    "rectangle": ("rectangle", (2.0, 1.0)),
    "cube": ("box", (1.0, 1.0, 1.0)),
    "box": ("box", (1.0, 1.0, 1.0)),
    "disk": ("disk", (1.0,)),
    "l_shape": ("l_shape", (2.0, 1.0)),
    "hyperbolic_rect": ("hyperbolic_rect", (0.0, 1.0, 1.0, 2.0)),
    "polygon": ("polygon", None),
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


@dataclass
class RunConfig:
    """Everything a solve needs."""

    domain: geometry.DomainSpec
    h: float
    K: int
    tol: float = 1e-8
    seed: int = 0
    bound_config: bounds.BoundConfig = field(default_factory=bounds.BoundConfig)
    out: str = None
    vectors: bool = False
    precond: str = "auto"

    def __post_init__(self):
        if not (self.h > 0 and self.K > 0 and self.tol > 0 and self.seed >= 0):
            raise UsageError("h, k and tol must be positive and seed nonnegative")


def parse_domain(name, params=None):
    """Domain from a preset name or ``kind`` plus comma-separated parameters."""
    if isinstance(name, dict):
        return geometry.DomainSpec.from_dict(name)
    if name not in PRESETS:
        raise UsageError(f"unknown domain {name!r}; choose from {', '.join(PRESETS)}")
    kind, default = PRESETS[name]
    if params is None:
        values = default
    elif isinstance(params, (list, tuple)):
        values = tuple(params)
    else:
        values = tuple(float(p) for p in str(params).split(","))
    if kind == "polygon":
        if values is None or len(values) % 2:
            raise UsageError("polygon needs --params x1,y1,x2,y2,...")
        values = tuple(zip(values[0::2], values[1::2]))
    n = 3 if kind == "box" else 2
    return geometry.DomainSpec(kind, values, n)


def bound_config_from(args):
    curv = args.curvature
    if isinstance(curv, str):
        curv = tuple(float(c) for c in curv.split(","))
    c0 = args.c0 if args.c0 is not None else "upper"
    h0 = None if args.h0_squared is None else float(args.h0_squared)
    try:
        return bounds.BoundConfig(c0, h0, tuple(curv) if curv else None)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def load_config(path):
    """Read a JSON or YAML config file into a flat dict of option defaults."""
    with open(path) as fh:
        text = fh.read()
    if path.endswith((".yaml", ".yml")):
        import yaml

        data = yaml.safe_load(text)
    else:
        data = json.loads(text)
    if not isinstance(data, dict):
        raise SpectrumFormatError(f"{path}: config must be a mapping")
    flat = dict(data)
    nested = flat.pop("bound_config", None) or {}
    if "c0_policy" in nested and nested["c0_policy"] != "upper":
        flat.setdefault("c0", float(nested["c0_policy"]))
    if "h0_squared" in nested:
        flat.setdefault("h0_squared", nested["h0_squared"])
    if nested.get("curvature"):
        flat.setdefault("curvature", nested["curvature"])
    return {k.replace("-", "_"): v for k, v in flat.items()}


# ---------------------------------------------------------------------------
# commands


def _problem_for(grid):
    return assemble_hyperbolic(grid) if grid.is_hyperbolic else assemble_euclidean(grid)


def cmd_solve(cfg):
    """Rasterize, assemble, solve, and write the spectrum file."""
    grid = geometry.rasterize(cfg.domain, cfg.h)
    spectrum = smallest_eigenpairs(_problem_for(grid), cfg.K, tol=cfg.tol, seed=cfg.seed,
                                   keep_vectors=cfg.vectors, precond=cfg.precond)
    if cfg.out:
        write_spectrum(spectrum, cfg.out, write_vectors=cfg.vectors)
    print(f"solved {cfg.domain.kind} h={cfg.h:g} N={grid.size}: {cfg.K} eigenvalues, "
          f"lambda_1={spectrum.eigenvalues[0]:.10g}, "
          f"max residual={float(np.max(spectrum.residual_norms)):.3g}")
    return spectrum


def cmd_oracle(domain, K, out=None):
    """Closed-form spectrum of a rectangle, box or disk."""
    p = domain.params
    if domain.kind == "rectangle":
        spectrum = oracles.rectangle_spectrum(p[0], p[1], K)
    elif domain.kind == "box":
        spectrum = oracles.box_spectrum(p[0], p[1], p[2], K)
    elif domain.kind == "disk":
        spectrum = oracles.disk_spectrum(p[0], K)
    else:
        raise UsageError(f"no closed-form spectrum for {domain.kind}")
    if out:
        write_spectrum(spectrum, out)
    print(f"oracle {spectrum.provenance}: {K} eigenvalues, lambda_1={spectrum.eigenvalues[0]:.10g}")
    return spectrum


def _emit_checks(checks, out):
    if out:
        bounds.write_checks_csv(checks, out)
    else:
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(bounds.CSV_COLUMNS)
        for c in checks:
            writer.writerow(c.to_row())


def _summary_line(checks):
    counts = bounds.summarize(checks)
    return ("summary: " + " ".join(f"{k}={v}" for k, v in counts.items())
            + f" total={len(checks)}")


def cmd_check(path, config, which="all", out=None):
    """Evaluate the selected inequalities and print the status counts."""
    spectrum = read_spectrum(path, load_vectors=False)
    try:
        checks = bounds.check_all(spectrum, config, which)
    except ValueError as exc:
        if isinstance(exc, SpectralGapsError):
            raise
        raise UsageError(str(exc)) from exc
    _emit_checks(checks, out)
    print(_summary_line(checks), file=sys.stderr if not out else sys.stdout)
    return checks


def _test_function(grid, kind, alpha, axis):
    if kind.startswith("x") and kind[1:].isdigit():
        ax = int(kind[1:]) - 1
        if not 0 <= ax < grid.n:
            raise UsageError(f"no coordinate {kind} in {grid.n} dimensions")
        return quadrature.coordinate(grid, ax)
    if kind == "exp":
        return quadrature.complex_exponential(grid, alpha, axis - 1)
    if kind == "const":
        return quadrature.complex_exponential(grid, 0.0, 0)
    if kind == "log":
        return quadrature.hyperbolic_log(grid)
    raise UsageError(f"unknown test function {kind!r}")


def parse_range(text):
    text = str(text)
    if ":" in text:
        lo, hi = text.split(":")
        return list(range(int(lo), int(hi) + 1))
    return [int(t) for t in text.split(",")]


def cmd_lemma(cfg, g_kind, i, k_range, alpha=1.0, axis=1, out=None):
    """Solve with eigenvectors kept, then verify the eigenfunction inequalities."""
    ks = parse_range(k_range)
    K = max(ks) + 2
    basis, _ = quadrature.build_basis(cfg.domain, cfg.h, K, tol=cfg.tol, seed=cfg.seed,
                                      precond=cfg.precond)
    g = _test_function(basis.grid, g_kind, alpha, axis)
    unit = bool(np.all(np.abs(np.sqrt(g.grad_norm_sq()) - 1.0) <= quadrature.UNIT_GRADIENT_TOL))
    real = not np.iscomplexobj(g.value)
    checks = []
    for k in ks:
        checks.append(quadrature.verify_mainformula(basis, g, i, k))
        if unit and real:
            checks.extend(quadrature.verify_corollaries(basis, g, i, k))
    if real:
        lhs, rhs = quadrature.ibp_identity(basis, g, i)
        tol = 0.01 * abs(rhs)
        checks.append(bounds.BoundCheck("ibp_identity", i, lhs, rhs, rhs - lhs,
                                        bool(abs(rhs - lhs) <= tol),
                                        f"identity; f={g.label}; rel_tol=0.01"))
    _emit_checks(checks, out)
    print(_summary_line(checks), file=sys.stderr if not out else sys.stdout)
    return checks


def fit_report(spectrum, prefixes=(100, 200, 500), config=bounds.BoundConfig()):
    """Fitted constant for several prefix lengths plus the theorem constant."""
    lam = np.asarray(spectrum.eigenvalues)
    n = spectrum.n
    rows = []
    for K in sorted(set(int(p) for p in prefixes)):
        if 2 <= K <= len(lam):
            rows.append((K, bounds.fit_gap_constant(lam[:K], n)))
    rows.append((len(lam), bounds.fit_gap_constant(lam, n)))
    geometry_kind = "hyperbolic" if spectrum.is_hyperbolic else "euclidean"
    try:
        const = bounds.theorem_constant(lam[0], n, config, geometry_kind)
    except (Infeasible, ValueError):
        const = float("nan")
    return rows, const, geometry_kind


def cmd_fit(path, config, prefixes=(100, 200, 500)):
    spectrum = read_spectrum(path, load_vectors=False)
    rows, const, kind = fit_report(spectrum, prefixes, config)
    print(f"n={spectrum.n} K={len(spectrum)} geometry={kind}")
    seen = set()
    for K, c in rows:
        if K not in seen:
            seen.add(K)
            print(f"C_hat(K={K})={c:.10g}")
    note = " (H0^2 free parameter)" if kind != "euclidean" else ""
    print(f"theorem_constant={const:.10g} {config.policy_note(spectrum.n)}{note}")
    return rows, const


def cmd_report(directory, config=bounds.BoundConfig()):
    """Summary CSV over all check CSVs, plus gap and bound data per spectrum."""
    rows = []
    for path in sorted(glob.glob(os.path.join(directory, "*.csv"))):
        if os.path.basename(path) == "summary.csv":
            continue
        try:
            checks = bounds.read_checks_csv(path)
        except (ValueError, KeyError):
            continue
        by_id = {}
        for c in checks:
            by_id.setdefault(c.inequality_id, []).append(c)
        for ident, group in sorted(by_id.items()):
            counts = bounds.summarize(group)
            slacks = [c.slack / abs(c.rhs) for c in group
                      if c.status == "ok" and np.isfinite(c.rhs) and c.rhs != 0]
            rows.append([os.path.basename(path), ident, len(group)]
                        + [counts[s] for s in ("ok", "violated", "degenerate", "skipped",
                                               "infeasible")]
                        + [f"{min(slacks):.6g}" if slacks else ""])
    summary = os.path.join(directory, "summary.csv")
    with open(summary, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["file", "inequality_id", "count", "ok", "violated", "degenerate",
                         "skipped", "infeasible", "min_rel_slack"])
        writer.writerows(rows)
    written = [summary]
    for path in sorted(glob.glob(os.path.join(directory, "*.json"))):
        try:
            spectrum = read_spectrum(path, load_vectors=False)
        except SpectrumFormatError:
            continue
        stem = path[:-5]
        lam = spectrum.eigenvalues
        k = np.arange(1, len(lam))
        gaps = np.diff(lam)
        _, const, _ = fit_report(spectrum, (), config)
        c_hat = bounds.fit_gap_constant(lam, spectrum.n) if len(lam) > 1 else float("nan")
        for suffix, col in ((".gaps.dat", gaps),
                            (".bound.dat", const * k ** (1.0 / spectrum.n)),
                            (".fit.dat", c_hat * k ** (1.0 / spectrum.n))):
            np.savetxt(stem + suffix, np.column_stack([k, col]), fmt=["%d", "%.17g"])
            written.append(stem + suffix)
    print(f"report: {len(rows)} summary rows, {len(written)} files written")
    return written


# ---------------------------------------------------------------------------
# argument parsing


def _add_domain_args(p):
    p.add_argument("--domain", default="square", help="preset name (see README)")
    p.add_argument("--params", default=None, help="comma-separated shape parameters")
    p.add_argument("--h", type=float, default=1.0 / 64, help="grid spacing")
    p.add_argument("--tol", type=float, default=1e-8, help="relative residual tolerance")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--precond", choices=["auto", "jacobi", "amg"], default="auto")


def _add_bound_args(p):
    p.add_argument("--c0", type=float, default=None, help="override C0(n) (default 1+4/n)")
    p.add_argument("--h0-squared", dest="h0_squared", type=float, default=None,
                   help="H0^2; zero on Euclidean domains, required for curved ones")
    p.add_argument("--curvature", default=None, help="pinching a,b with a >= b >= 0")


def build_parser():
    parser = _Parser(prog="spectral-gaps", description=__doc__.split("\n\n")[0])
    parser.add_argument("--config", default=None, help="JSON or YAML file of option defaults")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    subs = {}

    p = subs["solve"] = sub.add_parser("solve", help="numerical Dirichlet spectrum")
    _add_domain_args(p)
    p.add_argument("--k", dest="K", type=int, default=20)
    p.add_argument("--out", default=None)
    p.add_argument("--vectors", action="store_true", help="also write the eigenvector sidecar")

    p = subs["oracle"] = sub.add_parser("oracle", help="closed-form spectrum")
    p.add_argument("--domain", default="square")
    p.add_argument("--params", default=None)
    p.add_argument("--k", dest="K", type=int, default=100)
    p.add_argument("--out", default=None)

    p = subs["check"] = sub.add_parser("check", help="evaluate eigenvalue inequalities")
    p.add_argument("spectrum")
    p.add_argument("--which", default="all",
                   help="all, a group (universal, gaps, growth, theorem, proof) or ids")
    p.add_argument("--out", default=None)
    _add_bound_args(p)

    p = subs["lemma"] = sub.add_parser("lemma", help="verify eigenfunction inequalities")
    _add_domain_args(p)
    p.add_argument("--g", dest="g_kind", default="x1", help="x1, x2, x3, exp, const or log")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--axis", type=int, default=1, help="axis of exp (1-based)")
    p.add_argument("--i", dest="i", type=int, default=1)
    p.add_argument("--k-range", dest="k_range", default="1:10", help="lo:hi or a,b,c")
    p.add_argument("--out", default=None)

    p = subs["fit"] = sub.add_parser("fit", help="fitted gap constant vs theorem constant")
    p.add_argument("spectrum")
    p.add_argument("--prefixes", default="100,200,500")
    _add_bound_args(p)

    p = subs["report"] = sub.add_parser("report", help="aggregate CSVs into a summary")
    p.add_argument("directory")
    _add_bound_args(p)
    return parser, subs


def _run_config(args):
    domain = parse_domain(args.domain, args.params)
    return RunConfig(domain, float(args.h), int(getattr(args, "K", 1)), float(args.tol),
                     int(args.seed), out=getattr(args, "out", None),
                     vectors=bool(getattr(args, "vectors", False)), precond=args.precond)


def _dispatch(args):
    cmd = args.command
    if cmd == "solve":
        cmd_solve(_run_config(args))
    elif cmd == "oracle":
        cmd_oracle(parse_domain(args.domain, args.params), int(args.K), args.out)
    elif cmd == "check":
        cmd_check(args.spectrum, bound_config_from(args), args.which, args.out)
    elif cmd == "lemma":
        cmd_lemma(_run_config(args), args.g_kind, int(args.i), args.k_range, args.alpha,
                  int(args.axis), args.out)
    elif cmd == "fit":
        cmd_fit(args.spectrum, bound_config_from(args),
                [int(p) for p in str(args.prefixes).split(",") if p])
    elif cmd == "report":
        cmd_report(args.directory, bound_config_from(args))


def main(argv=None):
    """Entry point; returns the process exit code."""
    parser, subs = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    pre, _ = parser.parse_known_args(argv)
    if pre.config:
        try:
            defaults = load_config(pre.config)
        except (OSError, ValueError) as exc:
            print(f"error: cannot read config: {exc}", file=sys.stderr)
            return EXIT_IO
        for p in subs.values():
            known = {a.dest for a in p._actions}
            p.set_defaults(**{k: v for k, v in defaults.items() if k in known})
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        _dispatch(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InvalidDomain, UnsupportedShape, KTooLarge) as exc:
        print(f"usage error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SpectrumFormatError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (EmptyGrid, NoConvergence, SpectralGapsError) as exc:
        print(f"solver failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK


def main_exit():
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
