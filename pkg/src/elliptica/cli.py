"""Command-line driver: `elliptica {theta|cf|algebra|rmatrix|modules|poisson|verify-all}`."""

from __future__ import annotations

import argparse
import configparser
import csv
import json
import sys
from dataclasses import fields

import numpy as np

from . import algebras as alg
from .algebras import QnkParams, qnk_relations
from .errors import DegenerateEta, DegenerateParameters, EllipticaError, InvalidPair, SampleDegenerate
from .multitheta import build_w_basis, continued_fraction, coprime_pairs, dual_fraction, w_basis
from .quadalg import central_elements, hilbert_dims
from .report import encode, reports_to_json
from .rmatrix import ybe_sweep
from .suite import CRITERIA, SuiteConfig, criterion_exchange, criterion_modules, criterion_poisson, run_suite
from .theta import theta1, theta_alpha, verify_one_var_identity
from .report import check_rng

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_DEGENERATE = 0, 1, 2, 3
CONFIG_SECTION = "run"


class UsageError(Exception):
    pass


def parse_complex(text: str) -> complex:
    s = str(text).strip().replace(" ", "").replace("i", "j")
    try:
        return complex(s)
    except ValueError:
        raise UsageError(f"cannot parse complex number {text!r}") from None


def parse_complex_list(text: str) -> list[complex]:
    return [parse_complex(x) for x in text.split(",") if x.strip()]


_COMPLEX_KEYS = {"tau", "eta"}
_INT_KEYS = {"n", "k", "truncation", "fourier_box", "samples", "seed", "amax"}
_FLOAT_KEYS = {"tol"}


def read_config(path: str) -> dict:
    """Flat `key = value` file; a section header is optional."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    cp = configparser.ConfigParser()
    cp.read_string(f"[{CONFIG_SECTION}]\n" + text if not text.lstrip().startswith("[") else text)
    section = cp[CONFIG_SECTION] if cp.has_section(CONFIG_SECTION) else cp[cp.sections()[0]]
    known = {f.name for f in fields(SuiteConfig)}
    out = {}
    for key, value in section.items():
        if key not in known:
            raise UsageError(f"unknown config key {key!r}")
        if value.strip().lower() in ("", "none", "auto"):
            out[key] = None
        elif key in _COMPLEX_KEYS:
            out[key] = parse_complex(value)
        elif key in _INT_KEYS:
            out[key] = int(value)
        else:
            out[key] = float(value)
    return out


def build_config(args) -> SuiteConfig:
    values = read_config(args.config) if args.config else {}
    for key in ("tau", "eta", "n", "k", "truncation", "fourier_box", "tol", "samples", "seed"):
        v = getattr(args, key, None)
        if v is not None:
            values[key] = v
    values = {k: v for k, v in values.items() if v is not None or k in ("fourier_box", "tol", "samples")}
    try:
        return SuiteConfig(**values)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key = value configuration file")
    p.add_argument("--seed", type=int)
    p.add_argument("--json", dest="json_path", help="write the JSON report here")
    p.add_argument("--tol", type=float)
    p.add_argument("--samples", type=int)
    p.add_argument("--csv", dest="csv_path", help="write a residual table here")
    p.add_argument("--tau", type=parse_complex)
    p.add_argument("--eta", type=parse_complex)
    p.add_argument("--truncation", type=int)
    p.add_argument("--box", dest="fourier_box", type=int, help="Fourier box radius for w bases (default: auto)")
    p.add_argument("--timing", action="store_true", help="include wall times in the JSON report")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="elliptica", description="Numerical checks for elliptic algebras.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("theta", help="evaluate theta, theta_alpha or w_alpha, or verify a one-variable identity")
    _common(p)
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int, help="with --n: evaluate w_alpha of the basis for n/k")
    p.add_argument("--alpha", type=int, default=0)
    p.add_argument("--z", type=parse_complex_list, help="point (comma separated for several variables)")
    p.add_argument("--identity", choices=("multiplication", "order_three", "exchange", "exchange_diagonal"))

    p = sub.add_parser("cf", help="continued fraction of n/k and its dual")
    _common(p)
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--all", dest="nmax", type=int, help="check the dual combinatorics for every pair up to nmax")

    p = sub.add_parser("algebra", help="graded dimensions and central elements")
    _common(p)
    p.add_argument("builder", choices=("qnk", "q3", "sklyanin", "skew", "heisenberg", "sl2", "ogievetsky",
                                       "commutative"))
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--dims", type=int, metavar="AMAX")
    p.add_argument("--center", type=int, metavar="DEGREE")
    p.add_argument("--random-J", action="store_true")
    p.add_argument("--J", type=parse_complex_list, help="J12,J23 (J31 is solved from the constraint)")
    p.add_argument("--expect-pbw", action="store_true")

    p = sub.add_parser("rmatrix", help="Yang-Baxter sweep for the Belavin R-matrix")
    _common(p)
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)

    for name, text in (("modules", "module, bosonization and exchange checks"), ("poisson", "Poisson checks")):
        p = sub.add_parser(name, help=text)
        _common(p)

    p = sub.add_parser("verify-all", help="run the acceptance suite")
    _common(p)
    p.add_argument("--only", action="append", help=f"subset of: {', '.join(CRITERIA)} (repeat or comma separate)")
    p.add_argument("--jobs", type=int, default=1)
    return parser


def _emit(doc: str, path: str | None) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(doc + "\n")
    else:
        print(doc)


def _fmt(z: complex) -> str:
    z = complex(z)
    return f"{z.real:.16g}{z.imag:+.16g}i"


def _reports_out(reports, cfg, args) -> int:
    for r in reports:
        print(r.summary_line())
    if args.json_path:
        _emit(reports_to_json(reports, cfg.to_dict(), args.timing), args.json_path)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def cmd_theta(args, cfg: SuiteConfig) -> int:
    curve = cfg.curve
    if args.identity is not None:
        n = args.n or cfg.n
        rep = verify_one_var_identity(args.identity, n, curve, cfg.count(30),
                                      check_rng(cfg.seed, f"identity.{args.identity}.n{n}"), cfg.tolerance(1e-8))
        doc = reports_to_json([rep], cfg.to_dict(), args.timing)
        _emit(doc, args.json_path)
        if args.json_path:
            print(rep.summary_line())
        return EXIT_OK if rep.passed else EXIT_FAIL
    if not args.z:
        raise UsageError("theta needs --z or --identity")
    n = args.n if args.n is not None else cfg.n
    if args.k is not None:
        f = continued_fraction(n, args.k)
        B = build_w_basis(f, curve, cfg.fourier_box) if cfg.fourier_box else w_basis(n, args.k, curve)
        if len(args.z) != B.p:
            raise UsageError(f"w_alpha for {n}/{args.k} takes {B.p} variables")
        value = B(args.alpha, np.array(args.z))
    elif n == 1:
        value = theta1(args.z[0], curve)
    else:
        value = theta_alpha(args.alpha, args.z[0], n, curve)
    if args.json_path:
        _emit(json.dumps({"schema": 1, "value": encode(complex(value))}, sort_keys=True), args.json_path)
    print(_fmt(value))
    return EXIT_OK


def cmd_cf(args, cfg: SuiteConfig) -> int:
    if args.nmax:
        bad = []
        for n, k in coprime_pairs(args.nmax):
            checks = dual_fraction(continued_fraction(n, k)).checks
            if not all(checks.values()):
                bad.append([n, k, [c for c, ok in checks.items() if not ok]])
        doc = json.dumps({"schema": 1, "nmax": args.nmax, "failures": bad}, indent=2, sort_keys=True)
        _emit(doc, args.json_path)
        return EXIT_OK if not bad else EXIT_FAIL
    n, k = args.n or cfg.n, args.k or cfg.k
    d = dual_fraction(continued_fraction(n, k))
    doc = {"schema": 1, "n": n, "k": k, "terms": list(d.primal.terms), "dual_terms": list(d.dual.terms),
           "checks": d.checks}
    _emit(json.dumps(doc, indent=2, sort_keys=True), args.json_path)
    return EXIT_OK if all(d.checks.values()) else EXIT_FAIL


def _builder(args, cfg: SuiteConfig):
    rng = check_rng(cfg.seed, f"cli.algebra.{args.builder}")
    b = args.builder
    if b == "qnk":
        return qnk_relations(QnkParams(args.n or cfg.n, args.k or cfg.k, cfg.eta, cfg.curve))
    if b == "q3":
        return alg.q3_from_curve(cfg.curve, cfg.eta)[2]
    if b == "sklyanin":
        if args.J:
            if len(args.J) != 2:
                raise UsageError("--J takes J12,J23")
            J12, J23 = args.J
            J = (J12, J23, -(J12 + J23) / (1 + J12 * J23))
        elif args.random_J:
            J = alg.random_sklyanin_J(rng)
        else:
            raise UsageError("sklyanin needs --random-J or --J")
        return alg.sklyanin_relations(*J)
    if b == "skew":
        n = args.n or cfg.n
        return alg.skew_polynomial_relations(np.exp(2j * np.pi * rng.uniform(size=(n, n))))
    if b == "heisenberg":
        return alg.lie_projectivization_relations(alg.heisenberg_constants())
    if b == "sl2":
        return alg.lie_projectivization_relations(alg.sl2_constants())
    if b == "ogievetsky":
        return alg.ogievetsky_relations()
    from .quadalg import antisymmetric_relations
    return antisymmetric_relations(args.n or cfg.n)


def cmd_algebra(args, cfg: SuiteConfig) -> int:
    L = _builder(args, cfg)
    doc = {"schema": 1, "builder": args.builder, "n": L.n, "relations": L.r, "rank": L.rank()}
    code = EXIT_OK
    if args.dims:
        rep = hilbert_dims(L, args.dims)
        doc["graded_dimensions"] = rep.to_dict()
        print(rep.dims)
        if args.expect_pbw and not rep.is_pbw:
            code = EXIT_FAIL
    if args.center:
        c = central_elements(L, args.center, cfg.tolerance(1e-8))
        doc["central_elements"] = {"degree": c.degree, "nullspace_dim": c.nullspace_dim,
                                   "residuals": c.residuals, "sigma_gap": c.sigma_gap}
        print(f"nullspace_dim {c.nullspace_dim}")
    text = json.dumps(encode(doc), indent=2, sort_keys=True)
    if args.json_path:
        _emit(text, args.json_path)
    elif not (args.dims or args.center):
        print(text)
    return code


def cmd_rmatrix(args, cfg: SuiteConfig) -> int:
    pairs = [(args.n, args.k or 1)] if args.n else [p for p in coprime_pairs(4)]
    reports, rows = [], []
    for n, k in pairs:
        rep, r = ybe_sweep(QnkParams(n, k, cfg.eta, cfg.curve), cfg.count(20),
                           check_rng(cfg.seed, f"rmatrix.{n}.{k}"), cfg.tolerance(1e-8))
        reports.append(rep)
        rows += r
    if args.csv_path:
        with open(args.csv_path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["n", "k", "eta", "u", "v", "w", "residual"])
            for n, k, eta, u, v, ww, res in rows:
                w.writerow([n, k, _fmt(eta), _fmt(u), _fmt(v), _fmt(ww), f"{res:.6e}"])
    return _reports_out(reports, cfg, args)


def _group_csv(reports, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["name", "params", "residual", "tolerance", "passed"])
        for r in reports:
            w.writerow([r.name, json.dumps(encode(r.params), sort_keys=True), f"{r.residual:.6e}",
                        f"{r.tolerance:.1e}", r.passed])


def cmd_modules(args, cfg: SuiteConfig) -> int:
    reports = criterion_modules(cfg) + criterion_exchange(cfg)
    if args.csv_path:
        _group_csv(reports, args.csv_path)
    return _reports_out(reports, cfg, args)


def cmd_poisson(args, cfg: SuiteConfig) -> int:
    reports = criterion_poisson(cfg)
    if args.csv_path:
        _group_csv(reports, args.csv_path)
    return _reports_out(reports, cfg, args)


def cmd_verify_all(args, cfg: SuiteConfig) -> int:
    only = None
    if args.only:
        only = [x.strip() for item in args.only for x in item.split(",") if x.strip()]
        unknown = [x for x in only if x not in CRITERIA]
        if unknown:
            raise UsageError(f"unknown group(s) {unknown}; choose from {list(CRITERIA)}")
    result = run_suite(cfg, only, max(1, args.jobs))
    for line in result.summary_lines():
        print(line)
    for r in result.reports:
        if not r.passed:
            print("  " + r.summary_line())
    if args.json_path:
        _emit(result.to_json(args.timing), args.json_path)
    if args.csv_path:
        _group_csv(result.reports, args.csv_path)
    print("ALL PASS" if result.passed else "FAILURES")
    return EXIT_OK if result.passed else EXIT_FAIL


COMMANDS = {"theta": cmd_theta, "cf": cmd_cf, "algebra": cmd_algebra, "rmatrix": cmd_rmatrix,
            "modules": cmd_modules, "poisson": cmd_poisson, "verify-all": cmd_verify_all}


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        cfg = build_config(args)
        return COMMANDS[args.command](args, cfg)
    except UsageError as exc:
        print(f"elliptica: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DegenerateEta, DegenerateParameters, SampleDegenerate) as exc:
        print(f"elliptica: degenerate parameters: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (InvalidPair, ValueError) as exc:
        print(f"elliptica: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except EllipticaError as exc:
        print(f"elliptica: check could not run: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
