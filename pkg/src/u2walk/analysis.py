"""
Observables on walk states and numerical checks of the walk's symmetry laws.

Every ``check_*`` function returns a :class:`CheckResult`; collect them in a
:class:`TheoremReport` to get an overall verdict.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence, Union

import numpy as np
from numpy.typing import NDArray

from ._parallel import chunked, parallel_map, worker_count
from .coins import CoinParams, InvalidParameterError
from .walk import InitialSpec, WalkState, evolve, evolve_many

__all__ = [
    "CheckResult",
    "Distribution",
    "GProfile",
    "InvalidSpecError",
    "SweepResult",
    "TheoremReport",
    "check_corollary2",
    "check_drift_nonzero",
    "check_lemma1",
    "check_theorem1",
    "check_theorem2",
    "check_theorem3",
    "check_theorem4",
    "coin_for",
    "distribution",
    "extract_G",
    "fit_sinusoid",
    "mean_position",
    "split_phi",
    "sweep_mean_position",
]

Engine = Callable[[InitialSpec, CoinParams, int], WalkState]
AlphaSplit = Union[str, float, Callable[[float], float]]

AMPLITUDE_TOL = 1e-12
PROBABILITY_TOL = 1e-10
DERIVED_TOL = 1e-8


class InvalidSpecError(InvalidParameterError):
    """The requested initial state is outside the scope of the check."""


@dataclass(frozen=True)
class Distribution:
    """Per-site chirality-resolved probabilities after ``t`` steps."""

    t: int
    x: NDArray[np.int64]
    p_L: NDArray[np.float64]
    p_R: NDArray[np.float64]

    @property
    def p(self) -> NDArray[np.float64]:
        return self.p_L + self.p_R

    def entries(self) -> list[tuple[int, float, float]]:
        return [(int(x), float(a), float(b)) for x, a, b in zip(self.x, self.p_L, self.p_R)]

    def at(self, x: int) -> float:
        i = x - int(self.x[0])
        return float(self.p[i]) if 0 <= i < len(self.x) else 0.0

    def mirrored(self) -> Distribution:
        """Distribution of ``-x`` with chiralities swapped."""
        return Distribution(self.t, -self.x[::-1], self.p_R[::-1].copy(), self.p_L[::-1].copy())


def distribution(state: WalkState) -> Distribution:
    probs = np.abs(state.amplitudes) ** 2
    return Distribution(state.t, state.positions, probs[:, 0].copy(), probs[:, 1].copy())


def mean_position(d: Distribution) -> float:
    return float(np.sum(d.x * d.p))


def _mean_from_amps(amps: NDArray[np.complex128], t: int) -> NDArray[np.float64]:
    # same reduction as mean_position, row by row, so batching never changes a bit
    x = np.arange(-t, t + 1)
    return np.sum((np.abs(amps) ** 2).sum(axis=-1) * x, axis=-1)


# --------------------------------------------------------------------------
# alpha/gamma splitting of phi
# --------------------------------------------------------------------------

_SPLITS = {"zero": 0.0, "half": 0.5, "full": 1.0}


def split_phi(phi: float, rule: AlphaSplit = "half") -> tuple[float, float]:
    """
    Choose ``(alpha, gamma)`` with ``alpha + gamma = phi``.

    ``rule`` is ``"zero"`` (alpha = 0), ``"half"`` (alpha = phi/2), ``"full"``
    (alpha = phi), a float fraction of ``phi`` given to alpha, or a callable
    returning alpha.
    """
    if callable(rule):
        alpha = float(rule(phi))
    else:
        if isinstance(rule, str):
            if rule not in _SPLITS:
                raise InvalidParameterError(f"unknown alpha split {rule!r}; use one of {sorted(_SPLITS)}")
            frac = _SPLITS[rule]
        else:
            frac = float(rule)
        alpha = frac * phi
    return alpha, phi - alpha


def coin_for(phi: float, beta: float, rule: AlphaSplit = "half") -> CoinParams:
    alpha, gamma = split_phi(phi, rule)
    return CoinParams(alpha, beta, gamma)


# --------------------------------------------------------------------------
# G profile: interference term of a superposed start
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class GProfile:
    """
    Interference coefficients for the start ``m|0L> + n|0R>``::

        P^L(x) = |m|^2 P^L_0L(x) + |n|^2 P^L_0R(x) - 2 Re(e^{i phi} m conj(n)) g_L(x)

    and likewise for R. ``g_total`` is the coefficient of ``sin(phi)`` in the mean
    position of the symmetric start.
    """

    beta: float
    t: int
    x: NDArray[np.int64]
    g_L: NDArray[np.float64]
    g_R: NDArray[np.float64]
    g_total: float
    pL_0L: NDArray[np.float64]
    pR_0L: NDArray[np.float64]
    pL_0R: NDArray[np.float64]
    pR_0R: NDArray[np.float64]

    def predict(self, m: complex, n: complex, phi: float) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        """Predicted ``(P^L, P^R)`` for the start ``m|0L> + n|0R>`` at ``alpha + gamma = phi``."""
        cross = 2.0 * (np.exp(1j * phi) * m * np.conj(n)).real
        wm, wn = abs(m) ** 2, abs(n) ** 2
        p_l = wm * self.pL_0L + wn * self.pL_0R - cross * self.g_L
        p_r = wm * self.pR_0L + wn * self.pR_0R - cross * self.g_R
        return p_l, p_r


def extract_G(
    beta: float,
    t: int,
    engine: Engine = evolve,
    alpha_split: AlphaSplit = "half",
) -> GProfile:
    """
    Recover ``g_L``, ``g_R`` from two symmetric-start runs at ``phi = -pi/2`` and ``+pi/2``.

    For ``(m, n) = (1, i)/sqrt(2)`` the interference prefactor equals ``sin(phi)``,
    so half the difference of the two runs isolates the interference term.
    """
    if t < 0:
        raise InvalidParameterError(f"t must be nonnegative, got {t}")
    x = np.arange(-t, t + 1)

    def run(spec: InitialSpec, phi: float) -> Distribution:
        return distribution(engine(spec, coin_for(phi, beta, alpha_split), t))

    specs_phis = [
        (InitialSpec.symmetric(), -math.pi / 2),
        (InitialSpec.symmetric(), math.pi / 2),
        (InitialSpec.pure_l(), 0.0),
        (InitialSpec.pure_r(), 0.0),
    ]
    minus, plus, d_l, d_r = parallel_map(lambda sp: run(*sp), specs_phis)
    g_l = 0.5 * (minus.p_L - plus.p_L)
    g_r = 0.5 * (minus.p_R - plus.p_R)
    g_total = float(-np.dot(x, g_l + g_r))
    return GProfile(beta, t, x, g_l, g_r, g_total, d_l.p_L, d_l.p_R, d_r.p_L, d_r.p_R)


# --------------------------------------------------------------------------
# mean-position sweeps
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepResult:
    beta: float
    t: int
    samples: tuple[tuple[float, float], ...]
    fit_A: float
    fit_B: float
    fit_C: float
    residual_rms: float

    @property
    def phis(self) -> NDArray[np.float64]:
        return np.array([s[0] for s in self.samples])

    @property
    def mean_x(self) -> NDArray[np.float64]:
        return np.array([s[1] for s in self.samples])


def fit_sinusoid(phis: Sequence[float], values: Sequence[float]) -> tuple[float, float, float, float]:
    """Least-squares fit of ``A sin(phi) + B cos(phi) + C``. Returns ``(A, B, C, rms residual)``."""
    phis = np.asarray(phis, dtype=float)
    values = np.asarray(values, dtype=float)
    basis = np.column_stack([np.sin(phis), np.cos(phis), np.ones_like(phis)])
    coef, *_ = np.linalg.lstsq(basis, values, rcond=None)
    resid = values - basis @ coef
    rms = float(np.sqrt(np.mean(resid**2))) if len(values) else 0.0
    return float(coef[0]), float(coef[1]), float(coef[2]), rms


def mean_positions(
    spec: InitialSpec, params: Sequence[CoinParams], t: int, workers: int | None = None
) -> NDArray[np.float64]:
    """Mean position for many coins; batched per thread, results in input order."""
    params = list(params)
    if not params:
        return np.zeros(0)
    groups = chunked(params, workers or worker_count())
    parts = parallel_map(lambda g: _mean_from_amps(evolve_many(spec, g, t), t), groups, workers)
    return np.concatenate(parts)


def sweep_mean_position(
    beta: float,
    t: int,
    phis: Iterable[float],
    alpha_split: AlphaSplit = "half",
    spec: InitialSpec | None = None,
    workers: int | None = None,
) -> SweepResult:
    """Mean position of the symmetric start as a function of ``phi = alpha + gamma``."""
    phis = [float(p) for p in phis]
    if not phis:
        raise InvalidParameterError("phis must be nonempty")
    spec = spec or InitialSpec.symmetric()
    params = [coin_for(phi, beta, alpha_split) for phi in phis]
    means = mean_positions(spec, params, t, workers)
    a, b, c, rms = fit_sinusoid(phis, means)
    return SweepResult(beta, t, tuple(zip(phis, means.tolist())), a, b, c, rms)


# --------------------------------------------------------------------------
# checks
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class CheckResult:
    name: str
    max_violation: float
    tolerance: float
    passed: bool
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "max_violation": self.max_violation,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "details": self.details,
        }


@dataclass(frozen=True)
class TheoremReport:
    checks: tuple[CheckResult, ...]

    @property
    def overall(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {"overall": self.overall, "checks": [c.to_dict() for c in self.checks]}


def _result(name: str, violation: float, tol: float, **details) -> CheckResult:
    violation = float(violation)
    return CheckResult(name, violation, tol, bool(violation <= tol), details)


def _max_pairwise(dists: Sequence[Distribution]) -> float:
    # every Distribution here covers [-t, t], so arrays line up
    worst = 0.0
    for a, b in itertools.combinations(dists, 2):
        worst = max(worst, float(np.abs(a.p_L - b.p_L).max()), float(np.abs(a.p_R - b.p_R).max()))
    return worst


def check_lemma1(
    params: CoinParams,
    thetas: Sequence[float],
    spec: InitialSpec,
    t: int,
    engine: Engine = evolve,
    tol: float = AMPLITUDE_TOL,
) -> CheckResult:
    """The global phase of the coin never changes the distribution."""
    dists = parallel_map(lambda th: distribution(engine(spec, params.with_theta(th), t)), thetas)
    return _result("lemma1", _max_pairwise(dists), tol, thetas=list(map(float, thetas)), t=t)


def check_theorem1(
    beta: float,
    grid: Iterable[tuple[float, float]],
    spec: InitialSpec,
    t: int,
    engine: Engine = evolve,
    tol: float = PROBABILITY_TOL,
) -> CheckResult:
    """From ``|0L>`` or ``|0R>`` the distribution does not depend on alpha, gamma."""
    if not spec.is_pure:
        raise InvalidSpecError(f"alpha/gamma independence only holds for |0L> and |0R>, got {spec.variant!r}")
    grid = list(grid)
    dists = parallel_map(lambda ag: distribution(engine(spec, CoinParams(ag[0], beta, ag[1]), t)), grid)
    return _result("theorem1", _max_pairwise(dists), tol, beta=beta, t=t, grid_points=len(grid), init=spec.variant)


def check_theorem2(
    params: CoinParams,
    t: int,
    engine: Engine = evolve,
    tol: float = AMPLITUDE_TOL,
) -> CheckResult:
    """
    Reality conditions linking the ``|0L>`` and mirrored ``|0R>`` amplitudes.

    ``Psi^R_0L(x) + Psi^L_0R(-x)`` is imaginary, the difference real; ``Psi^L_0L(x) +
    Psi^R_0R(-x)`` is real, the difference imaginary. Checked with the SU(2) coin.
    """
    su2 = params.with_theta(0.0)
    a = engine(InitialSpec.pure_l(), su2, t).amplitudes
    b = engine(InitialSpec.pure_r(), su2, t).amplitudes[::-1]  # b[i] is site -x
    violations = [
        np.abs((a[:, 1] + b[:, 0]).real),
        np.abs((a[:, 1] - b[:, 0]).imag),
        np.abs((a[:, 0] + b[:, 1]).imag),
        np.abs((a[:, 0] - b[:, 1]).real),
    ]
    return _result("theorem2", max(float(v.max()) for v in violations), tol, params=list(su2.as_tuple()), t=t)


def check_corollary2(
    beta: float,
    t: int,
    alpha: float = 0.0,
    gamma: float = 0.0,
    engine: Engine = evolve,
    tol: float = AMPLITUDE_TOL,
) -> CheckResult:
    """``P^R_0L(x) = P^L_0R(-x)`` and ``P^L_0L(x) = P^R_0R(-x)``."""
    params = CoinParams(alpha, beta, gamma)
    d_l = distribution(engine(InitialSpec.pure_l(), params, t))
    d_r = distribution(engine(InitialSpec.pure_r(), params, t)).mirrored()
    worst = max(float(np.abs(d_l.p_R - d_r.p_R).max()), float(np.abs(d_l.p_L - d_r.p_L).max()))
    return _result("corollary2", worst, tol, beta=beta, alpha=alpha, gamma=gamma, t=t)


def check_theorem3(
    beta: float,
    t: int,
    trials: Sequence[tuple[complex, complex, float]],
    engine: Engine = evolve,
    alpha_split: AlphaSplit = "zero",
    tol: float = PROBABILITY_TOL,
) -> CheckResult:
    """
    Reconstruct ``P^L``, ``P^R`` for arbitrary ``(m, n, phi)`` from one extracted profile.

    The profile is extracted with the default split; trials use ``alpha_split`` so
    the comparison also exercises the gauge freedom in ``(alpha, gamma)``.
    """
    profile = extract_G(beta, t, engine)

    def one(trial: tuple[complex, complex, float]) -> float:
        m, n, phi = trial
        d = distribution(engine(InitialSpec.custom(m, n), coin_for(phi, beta, alpha_split), t))
        p_l, p_r = profile.predict(m, n, phi)
        return max(float(np.abs(d.p_L - p_l).max()), float(np.abs(d.p_R - p_r).max()))

    worst = max(parallel_map(one, trials), default=0.0)
    return _result("theorem3", worst, tol, beta=beta, t=t, trials=len(trials), g_total=profile.g_total)


def check_theorem4(
    beta: float,
    t: int,
    phi_samples: Sequence[float],
    alpha_splits: Sequence[AlphaSplit] = ("zero", "half", "full"),
    split_tol: float = 1e-9,
    ratio_tol: float = DERIVED_TOL,
    min_abs_sin: float = 0.1,
) -> CheckResult:
    """
    Mean position of the symmetric start is ``G(beta, t) sin(alpha + gamma)``.

    Two parts: the mean depends on ``(alpha, gamma)`` only through their sum
    (spread across splits <= ``split_tol``), and ``<x> / sin(phi)`` is the same for
    every sampled ``phi`` with ``|sin phi| > min_abs_sin`` (relative spread <=
    ``ratio_tol``). The reported violation is whichever part is closer to failing.
    """
    phi_samples = [float(p) for p in phi_samples]
    params = [coin_for(phi, beta, rule) for phi in phi_samples for rule in alpha_splits]
    means = mean_positions(InitialSpec.symmetric(), params, t).reshape(len(phi_samples), len(alpha_splits))
    split_spread = float((means.max(axis=1) - means.min(axis=1)).max()) if means.size else 0.0

    sines = np.sin(phi_samples)
    keep = np.abs(sines) > min_abs_sin
    ratio_spread = 0.0
    g_estimate = None
    if keep.any():
        ratios = means[keep].mean(axis=1) / sines[keep]
        g_estimate = float(ratios.mean())
        ratio_spread = float(np.abs(ratios - g_estimate).max() / max(abs(g_estimate), 1.0))

    passed = split_spread <= split_tol and ratio_spread <= ratio_tol
    if split_spread / split_tol >= ratio_spread / ratio_tol:
        violation, tol = split_spread, split_tol
    else:
        violation, tol = ratio_spread, ratio_tol
    return CheckResult(
        "theorem4",
        violation,
        tol,
        passed,
        {
            "beta": beta,
            "t": t,
            "split_spread": split_spread,
            "split_tol": split_tol,
            "ratio_spread": ratio_spread,
            "ratio_tol": ratio_tol,
            "G": g_estimate,
        },
    )


def check_drift_nonzero(
    beta: float,
    t: int,
    phis: Sequence[float] = (math.pi / 4, math.pi / 2, 3 * math.pi / 4),
    threshold: float = 0.1,
) -> CheckResult:
    """The symmetric start drifts (|<x>| > ``threshold``) whenever ``sin(phi)`` is not small."""
    params = [coin_for(p, beta) for p in phis]
    means = mean_positions(InitialSpec.symmetric(), params, t)
    smallest = float(np.abs(means).min()) if len(means) else math.inf
    # violation is how far below the threshold the weakest drift falls
    return CheckResult(
        "drift_nonzero",
        max(0.0, threshold - smallest),
        0.0,
        smallest > threshold,
        {"beta": beta, "t": t, "min_abs_mean": smallest, "threshold": threshold},
    )
