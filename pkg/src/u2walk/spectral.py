"""
Momentum-space engine.

With the transform ``Psi~(k) = sum_x Psi(x) e^{ikx}`` one step of the walk acts on
each quasi-momentum independently through

    M_k = [[ e^{-i(k-alpha)} cos b, -e^{-i(k+gamma)} sin b],
           [ e^{ i(k+gamma)} sin b,  e^{ i(k-alpha)} cos b]]

whose eigenvalues are ``e^{-iw}`` and ``e^{+iw}`` with ``cos w = cos(k-alpha) cos b``.
Positions are recovered exactly by an inverse DFT on ``N >= 2t + 2`` uniform
k-points because the walk's support after ``t`` steps is ``[-t, t]``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .coins import CoinParams, InvalidParameterError
from .walk import InitialSpec, WalkState, initial_state

__all__ = [
    "DEGENERACY_TOL",
    "DegenerateModeError",
    "MomentumMatrix",
    "SpectralMode",
    "eigensystem",
    "momentum_matrix",
    "momentum_matrices",
    "propagate_fourier",
]

DEGENERACY_TOL = 1e-9


class DegenerateModeError(ArithmeticError):
    """The closed-form eigenbasis breaks down at this k; use direct matrix powers."""

    def __init__(self, k: float, sin_w: float, norms: tuple[float, float]) -> None:
        super().__init__(
            f"degenerate mode at k={k!r}: sin w={sin_w:.3e}, C_a={norms[0]:.3e}, C_b={norms[1]:.3e}; "
            "fall back to repeated 2x2 products"
        )
        self.k = k
        self.sin_w = sin_w


@dataclass(frozen=True)
class MomentumMatrix:
    k: float
    entries: NDArray[np.complex128]


@dataclass(frozen=True)
class SpectralMode:
    """Eigen-pair of ``M_k``; ``vec_a`` belongs to ``e^{-iw}``, ``vec_b`` to ``e^{+iw}``."""

    k: float
    omega: float
    eigenvalue_a: complex
    eigenvalue_b: complex
    vec_a: NDArray[np.complex128]
    vec_b: NDArray[np.complex128]
    # unnormalized pieces, kept for inspection and export
    p: complex
    q_a: complex
    q_b: complex
    c_a: float
    c_b: float


def momentum_matrices(k: NDArray[np.float64], params: CoinParams) -> NDArray[np.complex128]:
    """``M_k`` for an array of quasi-momenta; shape ``k.shape + (2, 2)``."""
    cb, sb = math.cos(params.beta), math.sin(params.beta)
    h = k - params.alpha
    g = k + params.gamma
    out = np.empty(k.shape + (2, 2), dtype=np.complex128)
    out[..., 0, 0] = np.exp(-1j * h) * cb
    out[..., 0, 1] = -np.exp(-1j * g) * sb
    out[..., 1, 0] = np.exp(1j * g) * sb
    out[..., 1, 1] = np.exp(1j * h) * cb
    return out


def momentum_matrix(k: float, params: CoinParams) -> MomentumMatrix:
    """Build ``M_k``. The global phase ``theta`` plays no role here."""
    m = momentum_matrices(np.asarray(float(k)), params)
    m.flags.writeable = False
    return MomentumMatrix(float(k), m)


def _modes(k: NDArray[np.float64], params: CoinParams):
    """Vectorized closed-form eigen-data. Returns arrays broadcast over ``k``."""
    cb, sb = math.cos(params.beta), math.sin(params.beta)
    h = k - params.alpha
    s = np.sin(h) * cb
    # sin^2 w = sin^2 b + cos^2 b sin^2 h: no cancellation, and sin w >= 0 by branch choice
    sin_w = np.sqrt(sb * sb + s * s)
    cos_w = np.cos(h) * cb
    omega = np.arctan2(sin_w, cos_w)
    p = -np.exp(-1j * (k + params.gamma)) * sb
    # q_a = i(s - sin w), q_b = i(s + sin w), q_a * q_b = sin^2 b; take the
    # non-cancelling one directly and the other from the product
    pos = s >= 0
    with np.errstate(divide="ignore", invalid="ignore"):
        big_b = s + sin_w
        big_a = s - sin_w
        qa_im = np.where(pos, -sb * sb / big_b, big_a)
        qb_im = np.where(pos, big_b, sb * sb / -big_a)
    qa_im = np.where(np.isfinite(qa_im), qa_im, 0.0)
    qb_im = np.where(np.isfinite(qb_im), qb_im, 0.0)
    q_a, q_b = 1j * qa_im, 1j * qb_im
    abs_p2 = np.abs(p) ** 2
    c_a = np.sqrt(abs_p2 + qa_im * qa_im)
    c_b = np.sqrt(abs_p2 + qb_im * qb_im)
    degenerate = (sin_w <= DEGENERACY_TOL) | (np.minimum(c_a, c_b) <= DEGENERACY_TOL)
    return omega, sin_w, cos_w, p, q_a, q_b, c_a, c_b, degenerate


def eigensystem(k: float, params: CoinParams) -> SpectralMode:
    """
    Closed-form eigensystem of ``M_k``.

    Raises
    ------
    DegenerateModeError
        When ``sin w`` or one of the eigenvector norms falls below ``DEGENERACY_TOL``.
        This only happens for ``sin(beta) ~ 0``.
    """
    if not math.isfinite(k):
        raise InvalidParameterError(f"k must be finite, got {k!r}")
    omega, sin_w, _, p, q_a, q_b, c_a, c_b, degenerate = _modes(np.asarray(float(k)), params)
    if degenerate:
        raise DegenerateModeError(float(k), float(sin_w), (float(c_a), float(c_b)))
    p, q_a, q_b = complex(p), complex(q_a), complex(q_b)
    c_a, c_b, omega = float(c_a), float(c_b), float(omega)
    vec_a = np.array([p, q_a]) / c_a
    vec_b = np.array([p, q_b]) / c_b
    vec_a.flags.writeable = False
    vec_b.flags.writeable = False
    return SpectralMode(
        k=float(k),
        omega=omega,
        eigenvalue_a=cmath.exp(-1j * omega),
        eigenvalue_b=cmath.exp(1j * omega),
        vec_a=vec_a,
        vec_b=vec_b,
        p=p,
        q_a=q_a,
        q_b=q_b,
        c_a=c_a,
        c_b=c_b,
    )


def k_grid(samples: int) -> NDArray[np.float64]:
    """``k_j = -pi + 2 pi j / samples`` for ``j = 0 .. samples - 1``."""
    return -np.pi + 2.0 * np.pi * np.arange(samples) / samples


def propagate_fourier(
    spec: InitialSpec,
    params: CoinParams,
    t: int,
    samples: int | None = None,
    *,
    global_phase: bool = True,
) -> WalkState:
    """
    Evolve in momentum space and transform back to the lattice.

    Parameters
    ----------
    spec, params, t
        As for :func:`u2walk.walk.evolve`.
    samples : int, optional
        Number of k-points, at least ``2t + 2``. Defaults to ``2t + 2``.
    global_phase : bool
        Multiply by ``e^{i theta t}`` so the amplitudes match the U(2) walk.
        Probabilities do not depend on it.
    """
    if t < 0 or int(t) != t:
        raise InvalidParameterError(f"t must be a nonnegative integer, got {t!r}")
    t = int(t)
    if samples is None:
        samples = 2 * t + 2
    if int(samples) != samples or samples < 2 * t + 2:
        raise InvalidParameterError(f"samples must be an integer >= 2t + 2 = {2 * t + 2}, got {samples!r}")
    samples = int(samples)
    if t == 0:
        return initial_state(spec)

    k = k_grid(samples)
    psi0 = np.array([spec.m, spec.n], dtype=np.complex128)
    omega, _, _, p, q_a, q_b, c_a, c_b, degenerate = _modes(k, params)

    psi_k = np.empty((samples, 2), dtype=np.complex128)
    ok = ~degenerate
    if ok.any():
        va = np.stack([p[ok], q_a[ok]], axis=-1) / c_a[ok, None]
        vb = np.stack([p[ok], q_b[ok]], axis=-1) / c_b[ok, None]
        coef_a = va.conj() @ psi0 * np.exp(-1j * omega[ok] * t)
        coef_b = vb.conj() @ psi0 * np.exp(1j * omega[ok] * t)
        psi_k[ok] = coef_a[:, None] * va + coef_b[:, None] * vb
    if degenerate.any():
        mats = np.linalg.matrix_power(momentum_matrices(k[degenerate], params), t)
        psi_k[degenerate] = mats @ psi0

    # Psi(x) = (1/N) sum_j Psi~(k_j) e^{-i k_j x} = (-1)^x fft(Psi~)[x mod N] / N
    spectrum = np.fft.fft(psi_k, axis=0) / samples
    x = np.arange(-t, t + 1)
    amps = spectrum[np.mod(x, samples)] * np.where(x % 2 == 0, 1.0, -1.0)[:, None]
    amps[(x + t) % 2 == 1] = 0.0
    if global_phase and params.theta != 0.0:
        amps = cmath.exp(1j * params.theta * t) * amps
    return WalkState(t, -t, amps)
