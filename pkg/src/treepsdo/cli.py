"""Command-line interface.

Exit codes: 0 when every check passes, 1 when a check fails, 2 for usage,
configuration or input-file errors.
"""
import argparse
import sys
import time
from pathlib import Path

import numpy as np

from . import lp, psdo, suite
from .io import (ConfigError, FormatError, RunConfig, dumps, generator, random_decomposition,
                 random_functions, read_decomposition, read_kernel, read_spectral,
                 read_tree_function, write_decomposition, write_kernel, write_spectral,
                 write_tree_function)
from .spectral import total_mass
from .transform import fh_forward, fh_inverse, plancherel_pairing

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _config(args):
    overrides = {k: getattr(args, k) for k in ("q", "R", "D", "M", "seed", "out")}
    overrides["tolerances"] = args.tol
    if args.config:
        return RunConfig.from_file(args.config, **overrides)
    return RunConfig.from_text("", **overrides)


def _load_operator(path, setup):
    """Kernel matrix from a decomposition (.json) or kernel (.csv) file."""
    cfg = setup.config
    if str(path).endswith(".csv"):
        return read_kernel(path, cfg, setup.n), None
    dec = read_decomposition(path, cfg.q, cfg.R, setup.n)
    return psdo.kernel_from_symbol(dec, setup.part, setup.grid), dec


def _require(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"{args.command} needs --{' --'.join(m.replace('_', '-') for m in missing)}")


def _check(setup, name, anchor, values, residual, tol, passed=None):
    return suite._result(setup, name, anchor, values, residual, tol, passed=passed)


# -- subcommands -------------------------------------------------------------

def cmd_build(args, setup):
    ball = setup.ball
    doc = {
        "format": "tree-ball", "q": ball.q, "R": ball.R, "D": setup.part.D, "M": setup.grid.M,
        "n_vertices": ball.n_vertices, "n_cylinders": setup.part.n_cylinders,
        "depth": ball.depth.tolist(), "parent": ball.parent.tolist(),
        "plancherel_mass": total_mass(setup.grid),
    }
    out = Path(args.output or Path(setup.config.out) / "ball.json")
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(dumps(doc) + "\n")
    print(f"ball q={ball.q} R={ball.R}: {ball.n_vertices} vertices, "
          f"{setup.part.n_cylinders} cylinders -> {out}")
    return []


def cmd_sample(args, setup):
    _require(args, "output")
    cfg = setup.config
    rng = generator(cfg.seed, f"sample-{args.kind}-{args.index}")
    if args.kind == "function":
        write_tree_function(args.output, random_functions(rng, 1, setup.n)[0], cfg.q, cfg.R)
    else:
        write_decomposition(args.output, random_decomposition(rng, args.terms, setup.n),
                            cfg.q, cfg.R)
    print(f"wrote {args.kind} -> {args.output}")
    return []


def cmd_transform(args, setup):
    _require(args, "input", "output")
    cfg = setup.config
    f = read_tree_function(args.input, cfg.q, cfg.R, setup.n)
    write_spectral(args.output, fh_forward(f, setup.part, setup.grid), setup.grid, cfg)
    print(f"transform {args.input} -> {args.output}")
    return []


def cmd_invert(args, setup):
    _require(args, "input", "output")
    cfg = setup.config
    F = read_spectral(args.input, cfg, setup.part.n_cylinders)
    write_tree_function(args.output, fh_inverse(F, setup.part, setup.grid), cfg.q, cfg.R)
    print(f"invert {args.input} -> {args.output}")
    return []


def cmd_plancherel(args, setup):
    _require(args, "f", "g")
    cfg = setup.config
    f = read_tree_function(args.f, cfg.q, cfg.R, setup.n)
    g = read_tree_function(args.g, cfg.q, cfg.R, setup.n)
    lhs = complex(plancherel_pairing(fh_forward(f, setup.part, setup.grid),
                                     fh_forward(g, setup.part, setup.grid), setup.part, setup.grid))
    rhs = complex(np.vdot(g, f))
    scale = max(np.linalg.norm(f) * np.linalg.norm(g), np.finfo(float).tiny)
    tol = cfg.tol("plancherel-identity", suite.DEFAULT_TOLERANCES["plancherel-identity"])
    return [_check(setup, "plancherel-identity", "fourier-helgason/plancherel-formula",
                   {"spectral": lhs, "direct": rhs}, abs(lhs - rhs) / scale, tol)]


def _dec_input(args, setup):
    _require(args, "input")
    cfg = setup.config
    return read_decomposition(args.input, cfg.q, cfg.R, setup.n)


def cmd_kernel(args, setup):
    dec = _dec_input(args, setup)
    K = psdo.kernel_from_symbol(dec, setup.part, setup.grid)
    if args.output:
        write_kernel(args.output, K, setup.config)
    scale = max(suite._dec_scale(dec), np.finfo(float).tiny) if len(dec) else 1.0
    tol = setup.config.tol("kernel-identity", suite.DEFAULT_TOLERANCES["kernel-identity"])
    return [_check(setup, "kernel-identity", "nuclear/kernel-characterization",
                   {"n_terms": len(dec)}, suite._rel(K, dec.kernel(), scale), tol)]


def cmd_hs(args, setup):
    dec = _dec_input(args, setup)
    via_b = psdo.hs_norm_via_b(dec, setup.part, setup.grid)
    fro = psdo.hs_norm_via_kernel(dec.kernel())
    tol = setup.config.tol("hilbert-schmidt", suite.DEFAULT_TOLERANCES["hilbert-schmidt"])
    return [_check(setup, "hilbert-schmidt", "hilbert-schmidt/symbol-norm",
                   {"b_norm": via_b, "frobenius": fro}, abs(via_b - fro) / max(fro, 1.0), tol)]


def cmd_trace(args, setup):
    dec = _dec_input(args, setup)
    t_sym = psdo.trace_via_symbol(dec, setup.part, setup.grid)
    t_ker = psdo.trace_via_kernel(psdo.kernel_from_symbol(dec, setup.part, setup.grid))
    t_dir = complex(np.sum(dec.f * dec.g))
    err = max(abs(t_sym - t_dir), abs(t_ker - t_dir))
    rel = setup.config.tol("trace", suite.DEFAULT_TOLERANCES["trace"])
    absol = setup.config.tol("trace-abs", suite.DEFAULT_TOLERANCES["trace-abs"])
    if abs(t_dir) > absol / rel:
        res, tol = err / abs(t_dir), rel
    else:
        res, tol = err, absol
    return [_check(setup, "trace", "nuclear/trace-formula",
                   {"symbol": t_sym, "kernel": t_ker, "direct": t_dir}, res, tol)]


def cmd_adjoint(args, setup):
    dec = _dec_input(args, setup)
    p, g = setup.part, setup.grid
    KH = dec.kernel().conj().T
    a1 = psdo.adjoint_symbol(dec, p, g)
    a2 = psdo.adjoint_symbol_direct(psdo.symbol_from_decomposition(dec, p, g), p, g)
    vals = {
        "decomposition_formula": suite._rel(psdo.kernel_from_symbol(a1, p, g), KH, 1),
        "direct_formula": suite._rel(psdo.kernel_from_symbol(a2, p, g), KH, 1),
        "formulas_agree": suite._rel(a1, a2, 1),
    }
    tol = setup.config.tol("adjoint", suite.DEFAULT_TOLERANCES["adjoint"])
    return [_check(setup, "adjoint", "nuclear/adjoint-symbol", vals, max(vals.values()), tol)]


def cmd_product(args, setup):
    _require(args, "eta", "sigma")
    cfg = setup.config
    eta = read_decomposition(args.eta, cfg.q, cfg.R, setup.n)
    sigma = read_decomposition(args.sigma, cfg.q, cfg.R, setup.n)
    lam = psdo.product_symbol(eta, sigma, setup.part, setup.grid)
    K = psdo.kernel_from_symbol(lam, setup.part, setup.grid)
    err = suite._rel(K, eta.kernel() @ sigma.kernel(), 1)
    tol = cfg.tol("product", suite.DEFAULT_TOLERANCES["product"])
    return [_check(setup, "product", "nuclear/product-symbol", {"max_error": err}, err, tol)]


def cmd_schatten(args, setup):
    _require(args, "input")
    K, _ = _load_operator(args.input, setup)
    res = psdo.lemma_schatten_power_check(K, args.r, args.t)
    fro = abs(psdo.schatten_norm(K, 2) - psdo.hs_norm_via_kernel(K))
    vals = {"schatten_r": psdo.schatten_norm(K, args.r), "schatten_t": psdo.schatten_norm(K, args.t),
            "r": args.r, "t": args.t, "frobenius_error": fro,
            "singular_values": psdo.singular_values(K)}
    cfg = setup.config
    tol = cfg.tol("schatten-lemma", suite.DEFAULT_TOLERANCES["schatten-lemma"])
    tol_f = cfg.tol("schatten-frobenius", suite.DEFAULT_TOLERANCES["schatten-frobenius"])
    return [_check(setup, "schatten", "schatten/power-lemma", vals, res, tol,
                   passed=res <= tol and fro <= tol_f)]


def cmd_lp(args, setup):
    _require(args, "input")
    K, _ = _load_operator(args.input, setup)
    cfg = setup.config
    fam = random_functions(generator(cfg.seed, "lp-report"), args.n_functions, setup.n)
    tol = cfg.tol("weak-type", suite.DEFAULT_TOLERANCES["weak-type"])
    out = []
    rep = lp.strong_type_check(K, args.p, args.q_exp, fam, slack=tol)
    out.append(_check(setup, "strong-type", "weak-lp/strong-type-bound",
                      {"C": rep.weak_constant, "bound": rep.bound, "worst_ratio": rep.worst_ratio},
                      max(0.0, rep.worst_ratio - rep.bound), tol, passed=rep.passed))
    if args.r is not None:
        rep = lp.lr_embedding_check(K, args.p, args.q_exp, args.r, fam, slack=tol)
        out.append(_check(setup, "lr-embedding", "weak-lp/lr-embedding-bound",
                          {"C": rep.weak_constant, "bound": rep.bound,
                           "worst_ratio": rep.worst_ratio, "sup_image": rep.sup_image},
                          max(0.0, rep.worst_ratio - rep.bound), tol,
                          passed=rep.passed and rep.sup_bound_passed))
    if args.p > 2:
        rep = lp.kernel_lq_bound_check(K, args.p, fam, slack=tol)
        out.append(_check(setup, "kernel-lq", "weak-lp/kernel-lq-bound",
                          {"bound": rep.bound, "worst_ratio": rep.worst_ratio},
                          max(0.0, rep.worst_ratio - rep.bound), tol, passed=rep.passed))
    return out


def cmd_suite(args, setup):
    return suite.run_suite(setup.config)


COMMANDS = {
    "build": cmd_build,
    "sample": cmd_sample,
    "transform": cmd_transform,
    "invert": cmd_invert,
    "plancherel": cmd_plancherel,
    "kernel": cmd_kernel,
    "hs-check": cmd_hs,
    "trace-check": cmd_trace,
    "adjoint-check": cmd_adjoint,
    "product-check": cmd_product,
    "schatten": cmd_schatten,
    "lp-report": cmd_lp,
    "suite": cmd_suite,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value configuration file")
    common.add_argument("--q", type=int, help="tree degree minus one (default 2)")
    common.add_argument("--R", type=int, help="ball radius (default 4)")
    common.add_argument("--D", type=int, help="cylinder depth (default R)")
    common.add_argument("--M", type=int, help="spectral nodes (default 256)")
    common.add_argument("--seed", type=int, help="64-bit seed (default 42)")
    common.add_argument("--out", help="report directory (default ./reports)")

    parser = argparse.ArgumentParser(
        prog="treepsdo",
        description="Fourier-Helgason analysis and pseudo-differential operators on trees.",
        epilog="Tolerances are overridden with --tol.<check> VALUE, e.g. --tol.roundtrip 1e-9.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name in ("transform", "invert", "kernel", "hs-check", "trace-check", "adjoint-check",
                    "schatten", "lp-report"):
            p.add_argument("--input", help="input file")
        if name in ("build", "sample", "transform", "invert", "kernel"):
            p.add_argument("--output", help="output file")
        if name == "sample":
            p.add_argument("--kind", choices=["function", "decomposition"], default="function")
            p.add_argument("--terms", type=int, default=3)
            p.add_argument("--index", type=int, default=0, help="selects an independent stream")
        if name == "plancherel":
            p.add_argument("--f")
            p.add_argument("--g")
        if name == "product-check":
            p.add_argument("--eta")
            p.add_argument("--sigma")
        if name == "schatten":
            p.add_argument("--r", type=float, default=2 / 3)
            p.add_argument("--t", type=float, default=2.0)
        if name == "lp-report":
            p.add_argument("--p", type=float, default=3.0)
            p.add_argument("--q-exp", dest="q_exp", type=float, default=2.0)
            p.add_argument("--r", type=float)
            p.add_argument("--n-functions", dest="n_functions", type=int, default=50)
    return parser


def _split_tolerances(argv):
    """Pull ``--tol.<name> VALUE`` / ``--tol.<name>=VALUE`` out of ``argv``."""
    rest, tol = [], {}
    it = iter(argv)
    for arg in it:
        if arg.startswith("--tol."):
            key, sep, value = arg[6:].partition("=")
            if not sep:
                value = next(it, None)
            if not key or value is None:
                raise UsageError(f"bad tolerance flag {arg!r}")
            try:
                tol[key] = float(value)
            except ValueError:
                raise UsageError(f"tolerance {key} is not a number: {value!r}") from None
        else:
            rest.append(arg)
    return rest, tol


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        argv, tol = _split_tolerances(argv)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    args.tol = tol

    try:
        setup = suite.make_setup(_config(args))
        t0 = time.perf_counter()
        results = COMMANDS[args.command](args, setup)
    except (ConfigError, FormatError, UsageError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    if not results:
        return EXIT_OK
    if len(results) == 1 and results[0].wall_time == 0.0:
        results[0].wall_time = time.perf_counter() - t0
    stem = "report" if args.command == "suite" else args.command
    path = suite.write_reports(results, setup.config.out, stem=stem)
    failed = [r for r in results if not r.passed]
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status} {r.name:22s} residual={r.residual:.3e} tol={r.tolerance:.1e}")
    print(f"reports: {path} and {path.with_suffix('.csv')}")
    if failed:
        for r in failed:
            print(f"failed: {r.name} witness={dumps(r.witness)}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
