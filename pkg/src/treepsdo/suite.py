"""Executable identity checks and their reports.

Each check compares two independently computed sides of an identity (or a
bound against measured values) and records the residual next to its
tolerance.  ``run_suite`` runs all of them for one configuration.
"""
import hashlib
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import lp, psdo
from .boundary import build_partition
from .io import dumps, fmt_float, generator, random_decomposition, random_functions
from .spectral import build_grid, c_function, spectral_period, total_mass
from .transform import fh_forward, fh_inverse, plancherel_pairing
from .tree import build_ball

__all__ = ["CheckResult", "Setup", "make_setup", "CHECKS", "DEFAULT_TOLERANCES",
           "run_suite", "write_reports"]

DEFAULT_TOLERANCES = {
    "plancherel-mass": 1e-10,
    "c-function": 1e-12,
    "roundtrip": 1e-8,
    "plancherel-identity": 1e-8,
    "kernel-identity": 1e-6,
    "hilbert-schmidt": 1e-6,
    "trace": 1e-6,
    "trace-abs": 1e-8,
    "adjoint": 1e-6,
    "product": 1e-5,
    "schatten-frobenius": 1e-10,
    "schatten-lemma": 1e-8,
    "layer-cake": 1e-10,
    "weak-type": 1e-12,
    "weak-sup": 1e-9,
    "kernel-lq": 1e-12,
}


@dataclass
class CheckResult:
    name: str
    anchor: str
    inputs_digest: str
    values: dict
    residual: float
    tolerance: float
    passed: bool
    wall_time: float = 0.0
    witness: object = None

    def record(self):
        """JSON-ready dict; wall time is left out so reports are reproducible."""
        return {
            "name": self.name,
            "anchor": self.anchor,
            "inputs_digest": self.inputs_digest,
            "values": self.values,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "witness": self.witness,
        }


@dataclass(frozen=True)
class Setup:
    config: object
    ball: object
    part: object
    grid: object

    @property
    def n(self):
        return self.ball.n_vertices


def make_setup(config):
    ball = build_ball(config.q, config.R)
    return Setup(config, ball, build_partition(ball, config.D), build_grid(config.q, config.M))


def digest(*parts):
    h = hashlib.sha256()
    for p in parts:
        h.update(dumps(p).encode())
    return h.hexdigest()[:16]


def _inputs(setup, name, **extra):
    c = setup.config
    return digest({"q": c.q, "R": c.R, "D": c.D, "M": c.M, "seed": c.seed, "check": name, **extra})


def _result(setup, name, anchor, values, residual, tol, witness=None, passed=None):
    residual = float(residual)
    ok = bool(residual <= tol) if passed is None else bool(passed)
    return CheckResult(name, anchor, _inputs(setup, name), values, residual, tol, ok,
                       witness=witness)


def _rel(a, b, scale):
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b)), initial=0.0) / scale)


def _delta(n, i):
    e = np.zeros(n, dtype=complex)
    e[i] = 1
    return e


# -- checks ------------------------------------------------------------------

def check_plancherel_mass(s):
    tol = s.config.tol("plancherel-mass", DEFAULT_TOLERANCES["plancherel-mass"])
    M = s.config.M
    vals, worst, decreasing = {}, 0.0, True
    for q in (2, 3):
        err = abs(total_mass(build_grid(q, M)) - 1)
        # convergence is judged on the fixed doubling 128 -> 256
        e128, e256 = (abs(total_mass(build_grid(q, m)) - 1) for m in (128, 256))
        vals[f"q={q}"] = {"error": err, "error_M128": e128, "error_M256": e256}
        worst = max(worst, err)
        decreasing &= e256 < e128
    return _result(s, "plancherel-mass", "plancherel-measure/unit-mass", vals, worst, tol,
                   passed=worst <= tol and decreasing)


def check_c_function(s):
    tol = s.config.tol("c-function", DEFAULT_TOLERANCES["c-function"])
    vals = {f"q={q}": c_function(q, spectral_period(q) / 2) for q in (2, 3, 5)}
    worst = max(abs(v - 0.5) for v in vals.values())
    return _result(s, "c-function", "c-function/midpoint-value", vals, worst, tol)


def check_roundtrip(s):
    tol = s.config.tol("roundtrip", DEFAULT_TOLERANCES["roundtrip"])
    fs = random_functions(generator(s.config.seed, "roundtrip"), 20, s.n)
    back = fh_inverse(fh_forward(fs, s.part, s.grid), s.part, s.grid)
    errs = np.abs(back - fs).max(axis=1) / np.abs(fs).max(axis=1)
    k = int(np.argmax(errs))
    return _result(s, "roundtrip", "fourier-helgason/inversion",
                   {"max_relative_error": errs.max(), "n_functions": 20},
                   errs.max(), tol, witness={"function": k})


def check_plancherel_identity(s):
    tol = s.config.tol("plancherel-identity", DEFAULT_TOLERANCES["plancherel-identity"])
    rng = generator(s.config.seed, "plancherel-identity")
    f = random_functions(rng, 20, s.n)
    g = random_functions(rng, 20, s.n)
    lhs = plancherel_pairing(fh_forward(f, s.part, s.grid), fh_forward(g, s.part, s.grid),
                             s.part, s.grid)
    rhs = np.sum(f * np.conj(g), axis=1)
    errs = np.abs(lhs - rhs) / (np.linalg.norm(f, axis=1) * np.linalg.norm(g, axis=1))
    return _result(s, "plancherel-identity", "fourier-helgason/plancherel-formula",
                   {"max_relative_error": errs.max(), "n_pairs": 20}, errs.max(), tol,
                   witness={"pair": int(np.argmax(errs))})


def _decompositions(s, name, count=10, sizes=(1, 3, 8)):
    rng = generator(s.config.seed, name)
    return [random_decomposition(rng, sizes[i % len(sizes)], s.n) for i in range(count)]


def _dec_scale(dec):
    return float(np.sum(np.abs(dec.f).max(axis=1) * np.abs(dec.g).max(axis=1)))


def check_kernel_identity(s):
    tol = s.config.tol("kernel-identity", DEFAULT_TOLERANCES["kernel-identity"])
    errs = []
    for dec in _decompositions(s, "kernel-identity"):
        K = psdo.kernel_from_symbol(dec, s.part, s.grid)
        errs.append(_rel(K, dec.f.T @ dec.g, _dec_scale(dec)))
    return _result(s, "kernel-identity", "nuclear/kernel-characterization",
                   {"relative_errors": errs}, max(errs), tol,
                   witness={"decomposition": int(np.argmax(errs))})


def check_hilbert_schmidt(s):
    tol = s.config.tol("hilbert-schmidt", DEFAULT_TOLERANCES["hilbert-schmidt"])
    errs, pairs = [], []
    for dec in _decompositions(s, "hilbert-schmidt"):
        via_b = psdo.hs_norm_via_b(dec, s.part, s.grid)
        fro = psdo.hs_norm_via_kernel(dec.f.T @ dec.g)
        pairs.append([via_b, fro])
        errs.append(abs(via_b - fro) / fro)
    return _result(s, "hilbert-schmidt", "hilbert-schmidt/symbol-norm",
                   {"b_norm_vs_frobenius": pairs}, max(errs), tol)


def check_trace(s):
    rel_tol = s.config.tol("trace", DEFAULT_TOLERANCES["trace"])
    abs_tol = s.config.tol("trace-abs", DEFAULT_TOLERANCES["trace-abs"])
    decs = _decompositions(s, "trace")
    n = s.n
    a, b = 1, n - 1
    decs.append(psdo.NuclearDecomposition([_delta(n, a)], [_delta(n, b)]))
    decs.append(psdo.NuclearDecomposition([_delta(n, a)], [_delta(n, a)]))
    rows, worst, ok = [], 0.0, True
    for dec in decs:
        t_sym = psdo.trace_via_symbol(dec, s.part, s.grid)
        t_ker = psdo.trace_via_kernel(psdo.kernel_from_symbol(dec, s.part, s.grid))
        t_dir = complex(np.sum(dec.f * dec.g))
        err = max(abs(t_sym - t_dir), abs(t_ker - t_dir))
        if abs(t_dir) > abs_tol / rel_tol:
            r = err / abs(t_dir)
            ok &= r <= rel_tol
        else:
            r = err
            ok &= r <= abs_tol
        worst = max(worst, r)
        rows.append({"symbol": t_sym, "kernel": t_ker, "direct": t_dir})
    return _result(s, "trace", "nuclear/trace-formula", {"traces": rows}, worst, rel_tol,
                   passed=ok)


def check_adjoint(s):
    tol = s.config.tol("adjoint", DEFAULT_TOLERANCES["adjoint"])
    decs = _decompositions(s, "adjoint")
    real = generator(s.config.seed, "adjoint-symmetric").standard_normal((3, s.n))
    decs.append(psdo.NuclearDecomposition(real, real))
    e1, e2, e3 = [], [], []
    for dec in decs:
        sigma = psdo.symbol_from_decomposition(dec, s.part, s.grid)
        KH = (dec.f.T @ dec.g).conj().T
        a1 = psdo.adjoint_symbol(dec, s.part, s.grid)
        a2 = psdo.adjoint_symbol_direct(sigma, s.part, s.grid)
        e1.append(_rel(psdo.kernel_from_symbol(a1, s.part, s.grid), KH, 1))
        e2.append(_rel(psdo.kernel_from_symbol(a2, s.part, s.grid), KH, 1))
        e3.append(_rel(a1, a2, 1))
    worst = max(e1 + e2 + e3)
    return _result(s, "adjoint", "nuclear/adjoint-symbol",
                   {"decomposition_formula": e1, "direct_formula": e2, "formulas_agree": e3},
                   worst, tol)


def check_product(s):
    tol = s.config.tol("product", DEFAULT_TOLERANCES["product"])
    etas = _decompositions(s, "product-eta")
    sigmas = _decompositions(s, "product-sigma")
    ident = np.eye(s.n, dtype=complex)
    etas[0] = psdo.NuclearDecomposition(ident, ident)
    errs = []
    for eta, sigma in zip(etas, sigmas):
        lam = psdo.product_symbol(eta, sigma, s.part, s.grid)
        K_lam = psdo.kernel_from_symbol(lam, s.part, s.grid)
        errs.append(_rel(K_lam, (eta.f.T @ eta.g) @ (sigma.f.T @ sigma.g), 1))
    return _result(s, "product", "nuclear/product-symbol", {"max_errors": errs}, max(errs), tol,
                   witness={"pair": int(np.argmax(errs))})


def _kernels(s, name):
    return [psdo.kernel_from_symbol(d, s.part, s.grid) for d in _decompositions(s, name)]


def check_schatten(s):
    tol_f = s.config.tol("schatten-frobenius", DEFAULT_TOLERANCES["schatten-frobenius"])
    tol_l = s.config.tol("schatten-lemma", DEFAULT_TOLERANCES["schatten-lemma"])
    fro_errs, lemma = [], {}
    for K in _kernels(s, "schatten"):
        fro_errs.append(abs(psdo.schatten_norm(K, 2) - psdo.hs_norm_via_kernel(K)))
        for r, t in ((2 / 3, 2), (1, 2), (2, 1)):
            key = f"r={r:.6g},t={t}"
            lemma[key] = max(lemma.get(key, 0.0), psdo.lemma_schatten_power_check(K, r, t))
    worst_f, worst_l = max(fro_errs), max(lemma.values())
    return _result(s, "schatten", "schatten/power-lemma",
                   {"frobenius_errors": fro_errs, "lemma_residuals": lemma},
                   worst_l, tol_l, passed=worst_f <= tol_f and worst_l <= tol_l)


def check_layer_cake(s):
    tol = s.config.tol("layer-cake", DEFAULT_TOLERANCES["layer-cake"])
    fs = random_functions(generator(s.config.seed, "layer-cake"), 20, s.n)
    worst = {}
    for p in (1, 2, 3.5):
        worst[f"p={p}"] = max(lp.layercake_residual(f, p) / lp.lp_norm(f, p) ** p for f in fs)
    return _result(s, "layer-cake", "weak-lp/layer-cake-formula", worst, max(worst.values()), tol)


def _weak_kernel(s):
    dec = random_decomposition(generator(s.config.seed, "weak-kernel"), 3, s.n)
    return psdo.kernel_from_symbol(dec, s.part, s.grid)


def check_weak_type(s):
    tol = s.config.tol("weak-type", DEFAULT_TOLERANCES["weak-type"])
    sup_tol = s.config.tol("weak-sup", DEFAULT_TOLERANCES["weak-sup"])
    K = _weak_kernel(s)
    fam = random_functions(generator(s.config.seed, "weak-family"), 50, s.n)
    vals, ok, witness = {}, True, None
    for p, qe in ((2, 1), (3, 2)):
        rep = lp.strong_type_check(K, p, qe, fam, slack=tol)
        vals[f"strong p={p},q_exp={qe}"] = {"C": rep.weak_constant, "bound": rep.bound,
                                            "worst_ratio": rep.worst_ratio}
        if not rep.passed:
            ok, witness = False, {"p": p, "q_exp": qe, "function": rep.witness}
    rep = lp.lr_embedding_check(K, 2, 1, 3, fam, slack=tol, sup_slack=sup_tol)
    vals["lr p=2,q_exp=1,r=3"] = {"C": rep.weak_constant, "bound": rep.bound,
                                  "worst_ratio": rep.worst_ratio, "series": rep.extra["series"],
                                  "sup_image": rep.sup_image, "two_C": 2 * rep.weak_constant}
    if not rep.passed:
        ok, witness = False, {"p": 2, "q_exp": 1, "r": 3, "function": rep.witness}
    if not rep.sup_bound_passed:
        ok = False
    excess = max(max(0.0, v["worst_ratio"] - v["bound"]) for v in vals.values())
    return _result(s, "weak-type", "weak-lp/strong-type-bound", vals, excess, tol,
                   witness=witness, passed=ok)


def check_kernel_lq(s):
    tol = s.config.tol("kernel-lq", DEFAULT_TOLERANCES["kernel-lq"])
    K = _weak_kernel(s)
    fam = random_functions(generator(s.config.seed, "kernel-lq"), 100, s.n)
    rep = lp.kernel_lq_bound_check(K, 4, fam, slack=tol)
    n = s.n
    delta = np.zeros((n, n), dtype=complex)
    delta[0, n - 1] = 1
    tight = lp.kernel_lq_bound_check(delta, 4, [_delta(n, n - 1)], slack=tol)
    tight_err = max(abs(tight.worst_ratio - 1), abs(tight.bound - 1))
    return _result(s, "kernel-lq", "weak-lp/kernel-lq-bound",
                   {"bound": rep.bound, "worst_ratio": rep.worst_ratio, "margin": rep.margin,
                    "delta_bound": tight.bound, "delta_ratio": tight.worst_ratio},
                   max(tight_err, max(0.0, rep.worst_ratio - rep.bound)), tol,
                   witness=rep.witness, passed=rep.passed and tight_err <= tol)


CHECKS = [
    check_plancherel_mass,
    check_c_function,
    check_roundtrip,
    check_plancherel_identity,
    check_kernel_identity,
    check_hilbert_schmidt,
    check_trace,
    check_adjoint,
    check_product,
    check_schatten,
    check_layer_cake,
    check_weak_type,
    check_kernel_lq,
]


def run_suite(config, checks=None):
    setup = make_setup(config)
    results = []
    for check in checks or CHECKS:
        t0 = time.perf_counter()
        res = check(setup)
        res.wall_time = time.perf_counter() - t0
        results.append(res)
    return results


def write_reports(results, out, stem="report"):
    """Write ``<stem>.jsonl`` (reproducible) and ``<stem>.csv`` (with timings)."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    jsonl = out / f"{stem}.jsonl"
    jsonl.write_text("".join(dumps(r.record()) + "\n" for r in results))
    lines = ["name,anchor,residual,tolerance,passed,wall_time"]
    for r in results:
        lines.append(",".join([r.name, r.anchor, fmt_float(r.residual), fmt_float(r.tolerance),
                               "true" if r.passed else "false", f"{r.wall_time:.6f}"]))
    (out / f"{stem}.csv").write_text("\n".join(lines) + "\n")
    return jsonl
