"""
Command-line front end.

Exit codes: 0 success, 1 configuration error, 2 I/O error, 3 verification failure.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from typing import Any, Callable, Sequence

import numpy as np

from . import analysis
from .analysis import CheckResult, TheoremReport, distribution
from .coins import CoinParams, InvalidParameterError
from .config import ENGINES, FORMATS, SPLITS, SUITES, ConfigError, RunConfig
from ._parallel import parallel_map
from .io import render_csv, render_json
from .spectral import DegenerateModeError, eigensystem, momentum_matrices, propagate_fourier
from .walk import InitialSpec, WalkState, evolve

log = logging.getLogger("u2walk")

EXIT_OK, EXIT_CONFIG, EXIT_IO, EXIT_VERIFY = 0, 1, 2, 3

LEMMA1_THETAS = (-math.pi / 2, 0.0, 0.7, 2.1)
THM1_GRID_VALUES = (0.0, math.pi / 6, math.pi / 3, math.pi / 2)
THM4_PHIS = (math.pi / 6, math.pi / 2, 5 * math.pi / 6, -math.pi / 3, math.pi)
RANDOM_DRAWS = 5


def _spectral(spec: InitialSpec, params: CoinParams, t: int) -> WalkState:
    return propagate_fourier(spec, params, t)


# looked up at call time so tests can swap in faulty engines
ENGINE_FUNCS: dict[str, Callable[[InitialSpec, CoinParams, int], WalkState]] = {
    "direct": evolve,
    "spectral": _spectral,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse would exit with status 2
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    g = common.add_argument_group("coin")
    for name in ("alpha", "beta", "gamma", "theta"):
        g.add_argument(f"--{name}", help=f"{name} angle: radians or a literal like pi/6")
    common.add_argument("--init", help="initial coin state: L, R, symmetric or custom")
    common.add_argument("--m", help="custom |0L> amplitude, e.g. 0.6 or 1/sqrt(2)")
    common.add_argument("--n", help="custom |0R> amplitude, e.g. 0.8j or i/sqrt(2)")
    common.add_argument("--t", type=int, help="number of steps")
    common.add_argument("--engine", choices=ENGINES)
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--format", choices=FORMATS)
    common.add_argument("--config", help="JSON RunConfig; its keys override flags")
    common.add_argument("--seed", type=int)

    parser = _Parser(prog="u2walk", description="One-dimensional quantum walks with a U(2) coin.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("evolve", parents=[common], help="final-time position distribution")
    p.add_argument("--skip-zeros", action="store_true", default=None, help="omit rows with zero probability")

    p = sub.add_parser("sweep", parents=[common], help="mean position versus phi = alpha + gamma")
    p.add_argument("--phi-min")
    p.add_argument("--phi-max")
    p.add_argument("--phi-steps", type=int)
    p.add_argument("--alpha-split", choices=SPLITS)

    p = sub.add_parser("spectrum", parents=[common], help="dispersion and eigenvectors of M_k")
    p.add_argument("--k-samples", type=int)

    p = sub.add_parser("verify", parents=[common], help="run the symmetry checks")
    p.add_argument("--suite", choices=SUITES)
    p.add_argument("--tol-amplitude", type=float)
    p.add_argument("--tol-probability", type=float)
    p.add_argument("--tol-derived", type=float)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(command=args.command)
    overrides: dict[str, Any] = {}
    for key in (
        "alpha", "beta", "gamma", "theta", "init", "m", "n", "t", "engine", "out", "format", "seed",
        "phi_min", "phi_max", "phi_steps", "alpha_split", "k_samples", "suite", "skip_zeros",
    ):
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = value
    tols = {k: getattr(args, f"tol_{k}", None) for k in ("amplitude", "probability", "derived")}
    tols = {k: v for k, v in tols.items() if v is not None}
    if tols:
        overrides["tolerances"] = tols
    cfg = RunConfig.from_dict(overrides, cfg)
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            cfg = RunConfig.from_json(fh.read(), cfg)
    return cfg.validate()


def _metadata(cfg: RunConfig, *extra: tuple[str, Any]) -> list[tuple[str, Any]]:
    coin = cfg.coin()
    spec = cfg.initial_spec()
    meta: list[tuple[str, Any]] = [("command", cfg.command)]
    for name in ("alpha", "beta", "gamma", "theta"):
        meta.append((name, getattr(cfg, name)))
        meta.append((f"{name}_rad", getattr(coin, name)))
    meta += [
        ("init", spec.variant),
        ("m", repr(spec.m)),
        ("n", repr(spec.n)),
        ("t", cfg.t),
        ("engine", cfg.engine),
    ]
    meta.extend(extra)
    return meta


def _run_engine(cfg: RunConfig, spec: InitialSpec, coin: CoinParams) -> tuple[WalkState, float | None]:
    if cfg.engine == "both":
        direct = ENGINE_FUNCS["direct"](spec, coin, cfg.t)
        spectral = ENGINE_FUNCS["spectral"](spec, coin, cfg.t)
        return direct, float(np.abs(direct.amplitudes - spectral.amplitudes).max())
    return ENGINE_FUNCS[cfg.engine](spec, coin, cfg.t), None


def cmd_evolve(cfg: RunConfig) -> tuple[str, int]:
    spec, coin = cfg.initial_spec(), cfg.coin()
    state, discrepancy = _run_engine(cfg, spec, coin)
    d = distribution(state)
    rows = [(x, pl, pr, pl + pr) for x, pl, pr in d.entries()]
    if cfg.skip_zeros:
        rows = [r for r in rows if r[3] != 0.0]
    extra = [("mean_x", analysis.mean_position(d))]
    if discrepancy is not None:
        extra.append(("max_discrepancy", discrepancy))
    header = ["x", "p_L", "p_R", "p_total"]
    return _render(cfg, _metadata(cfg, *extra), header, rows), EXIT_OK


def cmd_sweep(cfg: RunConfig) -> tuple[str, int]:
    lo, hi = cfg.phi_range()
    phis = np.linspace(lo, hi, cfg.phi_steps)
    beta = cfg.coin().beta
    spec = cfg.initial_spec()
    extra: list[tuple[str, Any]] = []
    if cfg.engine == "direct" or cfg.engine == "both":
        result = analysis.sweep_mean_position(beta, cfg.t, phis, cfg.alpha_split, spec)
    if cfg.engine in ("spectral", "both"):
        means = parallel_map(
            lambda phi: analysis.mean_position(
                distribution(ENGINE_FUNCS["spectral"](spec, analysis.coin_for(phi, beta, cfg.alpha_split), cfg.t))
            ),
            phis,
        )
        if cfg.engine == "both":
            extra.append(("max_discrepancy", float(np.abs(result.mean_x - np.array(means)).max())))
        else:
            a, b, c, rms = analysis.fit_sinusoid(phis, means)
            result = analysis.SweepResult(beta, cfg.t, tuple(zip(phis.tolist(), means)), a, b, c, rms)
    meta = _metadata(
        cfg,
        ("alpha_split", cfg.alpha_split),
        ("phi_min", cfg.phi_min),
        ("phi_max", cfg.phi_max),
        ("phi_steps", cfg.phi_steps),
        ("fit_A", result.fit_A),
        ("fit_B", result.fit_B),
        ("fit_C", result.fit_C),
        ("residual_rms", result.residual_rms),
        *extra,
    )
    return _render(cfg, meta, ["phi", "mean_x"], [tuple(s) for s in result.samples]), EXIT_OK


SPECTRUM_HEADER = [
    "k", "omega",
    "lambda_a_re", "lambda_a_im", "lambda_b_re", "lambda_b_im",
    "va_L_re", "va_L_im", "va_R_re", "va_R_im",
    "vb_L_re", "vb_L_im", "vb_R_re", "vb_R_im",
    "degenerate",
]


def _numeric_mode(k: float, params: CoinParams) -> tuple[float, complex, complex, np.ndarray, np.ndarray]:
    """Eigen-data from a generic solver where the closed form has no valid normalization."""
    m = momentum_matrices(np.asarray(k), params)
    cos_w = math.cos(k - params.alpha) * math.cos(params.beta)
    omega = math.acos(max(-1.0, min(1.0, cos_w)))
    vals, vecs = np.linalg.eig(m)
    lam_a, lam_b = complex(np.exp(-1j * omega)), complex(np.exp(1j * omega))
    ia = int(np.argmin(np.abs(vals - lam_a)))
    ib = 1 - ia
    return omega, lam_a, lam_b, vecs[:, ia], vecs[:, ib]


def cmd_spectrum(cfg: RunConfig) -> tuple[str, int]:
    params = cfg.coin()
    rows = []
    for k in np.linspace(-math.pi, math.pi, cfg.k_samples):
        k = float(k)
        try:
            mode = eigensystem(k, params)
            omega, lam_a, lam_b, va, vb, degenerate = (
                mode.omega, mode.eigenvalue_a, mode.eigenvalue_b, mode.vec_a, mode.vec_b, 0
            )
        except DegenerateModeError:
            omega, lam_a, lam_b, va, vb = _numeric_mode(k, params)
            degenerate = 1
        rows.append(
            (
                k, omega,
                lam_a.real, lam_a.imag, lam_b.real, lam_b.imag,
                va[0].real, va[0].imag, va[1].real, va[1].imag,
                vb[0].real, vb[0].imag, vb[1].real, vb[1].imag,
                degenerate,
            )
        )
    meta = _metadata(cfg, ("k_samples", cfg.k_samples))
    return _render(cfg, meta, SPECTRUM_HEADER, rows), EXIT_OK


def run_suite(cfg: RunConfig) -> TheoremReport:
    params, spec, t = cfg.coin(), cfg.initial_spec(), cfg.t
    beta = params.beta
    amp_tol = cfg.tolerance("amplitude", analysis.AMPLITUDE_TOL)
    prob_tol = cfg.tolerance("probability", analysis.PROBABILITY_TOL)
    derived_tol = cfg.tolerance("derived", analysis.DERIVED_TOL)
    engine_name = "direct" if cfg.engine == "both" else cfg.engine
    engine = ENGINE_FUNCS[engine_name]
    rng = np.random.default_rng(cfg.seed)
    wanted = set(SUITES[1:]) if cfg.suite == "all" else {cfg.suite}
    checks: list[CheckResult] = []

    if "lemma1" in wanted:
        thetas = sorted(set(LEMMA1_THETAS) | {params.theta})
        checks.append(analysis.check_lemma1(params, thetas, spec, t, engine, amp_tol))
    if "thm1" in wanted:
        grid = [(a, g) for a in THM1_GRID_VALUES for g in THM1_GRID_VALUES]
        checks.append(analysis.check_theorem1(beta, grid, spec, t, engine, prob_tol))
    if "thm2" in wanted:
        draws = [params] + [CoinParams(a, beta, g) for a, g in rng.uniform(-math.pi, math.pi, (RANDOM_DRAWS, 2))]
        checks.extend(analysis.check_theorem2(p, t, engine, amp_tol) for p in draws)
    if "cor2" in wanted:
        checks.append(analysis.check_corollary2(beta, t, params.alpha, params.gamma, engine, amp_tol))
    if "thm3" in wanted:
        trials = []
        for _ in range(RANDOM_DRAWS):
            z = rng.normal(size=4)
            m, n = complex(z[0], z[1]), complex(z[2], z[3])
            norm = math.sqrt(abs(m) ** 2 + abs(n) ** 2)
            trials.append((m / norm, n / norm, float(rng.uniform(-math.pi, math.pi))))
        checks.append(analysis.check_theorem3(beta, t, trials, engine, tol=prob_tol))
    if "thm4" in wanted:
        checks.append(
            analysis.check_theorem4(beta, t, THM4_PHIS, ("zero", "half", "full"), split_tol=1e-9, ratio_tol=derived_tol)
        )
    if cfg.engine == "both":
        worst = 0.0
        for s in (InitialSpec.pure_l(), InitialSpec.pure_r(), spec):
            a = ENGINE_FUNCS["direct"](s, params, t).amplitudes
            b = ENGINE_FUNCS["spectral"](s, params, t).amplitudes
            worst = max(worst, float(np.abs(a - b).max()))
        checks.append(CheckResult("engines", worst, 1e-9, worst <= 1e-9, {"t": t}))
    return TheoremReport(tuple(checks))


def cmd_verify(cfg: RunConfig) -> tuple[str, int]:
    report = run_suite(cfg)
    status = EXIT_OK if report.overall else EXIT_VERIFY
    if cfg.output_format() == "csv":
        rows = [(c.name, c.max_violation, c.tolerance, int(c.passed)) for c in report.checks]
        meta = _metadata(cfg, ("suite", cfg.suite), ("overall", int(report.overall)))
        return render_csv(meta, ["name", "max_violation", "tolerance", "passed"], rows), status
    payload = {"config": _config_block(cfg), "results": report.to_dict()}
    return render_json(payload), status


def _config_block(cfg: RunConfig) -> dict[str, Any]:
    # the destination path is not part of the result
    block = cfg.to_dict()
    block.pop("out", None)
    return block


def _render(cfg: RunConfig, meta: list[tuple[str, Any]], header: Sequence[str], rows: list) -> str:
    if cfg.output_format() == "json":
        results = {"metadata": dict(meta), "columns": list(header), "rows": [list(r) for r in rows]}
        return render_json({"config": _config_block(cfg), "results": results})
    return render_csv(meta, header, rows)


COMMANDS = {
    "evolve": cmd_evolve,
    "sweep": cmd_sweep,
    "spectrum": cmd_spectrum,
    "verify": cmd_verify,
}


NEGATIVE_VALUE_FLAGS = ("--alpha", "--beta", "--gamma", "--theta", "--phi-min", "--phi-max", "--m", "--n")


def _attach_negative_values(argv: Sequence[str]) -> list[str]:
    """Rewrite ``--theta -pi/2`` as ``--theta=-pi/2`` so argparse does not read a flag."""
    out: list[str] = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in NEGATIVE_VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-") and not argv[i + 1].startswith("--"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(format="u2walk: %(levelname)s: %(message)s", level=logging.WARNING)
    parser = build_parser()
    argv = _attach_negative_values(sys.argv[1:] if argv is None else list(argv))
    try:
        args = parser.parse_args(argv)
        if args.verbose:
            log.setLevel(logging.INFO)
        cfg = config_from_args(args)
        text, status = COMMANDS[cfg.command](cfg)
    except OSError as exc:
        log.error("%s", exc)
        return EXIT_IO
    except (InvalidParameterError, ValueError) as exc:
        log.error("%s", exc)
        return EXIT_CONFIG

    try:
        if cfg.out:
            with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except OSError as exc:
        log.error("cannot write output: %s", exc)
        return EXIT_IO
    if status == EXIT_VERIFY:
        log.error("verification failed")
    return status


if __name__ == "__main__":
    sys.exit(main())
