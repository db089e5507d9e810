"""
Position-space evolution: coin at every site, then the chirality-conditioned shift.

Amplitudes are stored densely over ``[-t, t]`` as an ``(2t + 1, 2)`` complex array
whose columns are the (L, R) components. Each step grows the window by one
site on either side. L moves to ``x - 1``, R moves to ``x + 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.typing import NDArray

from .coins import CoinParams, InvalidParameterError, check_unitary, make_coin

__all__ = [
    "InitialSpec",
    "InvalidCoinError",
    "WalkState",
    "evolve",
    "evolve_many",
    "initial_state",
    "step",
]

COIN_UNITARY_TOL = 1e-9
NORM_TOL = 1e-12


class InvalidCoinError(ValueError):
    """The coin handed to the engine is not unitary."""


@dataclass(frozen=True)
class InitialSpec:
    """Initial coin state ``m|0L> + n|0R>`` at the origin."""

    variant: str
    m: complex
    n: complex

    VARIANTS = ("L", "R", "symmetric", "custom")

    def __post_init__(self) -> None:
        if self.variant not in self.VARIANTS:
            raise InvalidParameterError(f"unknown initial-state variant {self.variant!r}")
        m, n = complex(self.m), complex(self.n)
        if not (np.isfinite(m) and np.isfinite(n)):
            raise InvalidParameterError("initial amplitudes must be finite")
        norm = abs(m) ** 2 + abs(n) ** 2
        if abs(norm - 1.0) > NORM_TOL:
            raise InvalidParameterError(f"|m|^2 + |n|^2 = {norm!r}, expected 1")
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "n", n)

    @classmethod
    def pure_l(cls) -> InitialSpec:
        return cls("L", 1.0, 0.0)

    @classmethod
    def pure_r(cls) -> InitialSpec:
        return cls("R", 0.0, 1.0)

    @classmethod
    def symmetric(cls) -> InitialSpec:
        """``(|0L> + i|0R>) / sqrt(2)``."""
        r = 1.0 / math.sqrt(2.0)
        return cls("symmetric", r, 1j * r)

    @classmethod
    def custom(cls, m: complex, n: complex) -> InitialSpec:
        return cls("custom", m, n)

    @classmethod
    def from_name(cls, name: str, m: complex | None = None, n: complex | None = None) -> InitialSpec:
        key = name.strip().lower()
        if key in ("l", "0l", "purel", "pure_l"):
            return cls.pure_l()
        if key in ("r", "0r", "purer", "pure_r"):
            return cls.pure_r()
        if key in ("symmetric", "sym", "s"):
            return cls.symmetric()
        if key == "custom":
            if m is None or n is None:
                raise InvalidParameterError("custom initial state needs both m and n")
            return cls.custom(m, n)
        raise InvalidParameterError(f"unknown initial state {name!r}")

    @property
    def is_pure(self) -> bool:
        return self.variant in ("L", "R")


@dataclass(frozen=True)
class WalkState:
    """
    Wavefunction after ``t`` steps.

    ``amplitudes[i]`` holds ``(a_L(x), a_R(x))`` for ``x = offset + i``.
    The array is read-only.
    """

    t: int
    offset: int
    amplitudes: NDArray[np.complex128]

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.ndim != 2 or amps.shape[1] != 2:
            raise ValueError(f"amplitudes must have shape (n, 2), got {amps.shape}")
        if amps.flags.writeable:
            amps = amps.copy()
            amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @property
    def positions(self) -> NDArray[np.int64]:
        return np.arange(self.offset, self.offset + len(self.amplitudes))

    def amplitude(self, x: int) -> tuple[complex, complex]:
        i = x - self.offset
        if 0 <= i < len(self.amplitudes):
            a = self.amplitudes[i]
            return complex(a[0]), complex(a[1])
        return 0j, 0j

    def norm(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    def with_global_phase(self, phase: complex) -> WalkState:
        return WalkState(self.t, self.offset, phase * self.amplitudes)


def initial_state(spec: InitialSpec) -> WalkState:
    return WalkState(0, 0, np.array([[spec.m, spec.n]], dtype=np.complex128))


def _advance(amps: NDArray[np.complex128], coin: NDArray[np.complex128]) -> NDArray[np.complex128]:
    # amps: (..., n, 2); coin: (2, 2) or batched (..., 2, 2). Elementwise products keep
    # each result bitwise independent of how a batch is split across workers.
    a_l, a_r = amps[..., 0], amps[..., 1]
    c = coin[..., None, :, :] if coin.ndim > 2 else coin
    n = amps.shape[-2]
    out = np.zeros(amps.shape[:-2] + (n + 2, 2), dtype=np.complex128)
    out[..., :n, 0] = c[..., 0, 0] * a_l + c[..., 0, 1] * a_r
    out[..., 2:, 1] = c[..., 1, 0] * a_l + c[..., 1, 1] * a_r
    return out


def _require_unitary(coin: NDArray[np.complex128]) -> NDArray[np.complex128]:
    coin = np.asarray(coin, dtype=np.complex128)
    if coin.shape != (2, 2) or not check_unitary(coin, COIN_UNITARY_TOL):
        raise InvalidCoinError("coin must be a 2x2 unitary matrix")
    return coin


def step(state: WalkState, coin: NDArray[np.complex128]) -> WalkState:
    """Apply one coin-then-shift step."""
    coin = _require_unitary(coin)
    return WalkState(state.t + 1, state.offset - 1, _advance(state.amplitudes, coin))


def evolve(spec: InitialSpec, params: CoinParams, t: int) -> WalkState:
    """
    Run ``t`` homogeneous steps of the walk with the U(2) coin ``params``.

    The coin is validated once; the loop itself does no checking.
    """
    if t < 0 or int(t) != t:
        raise InvalidParameterError(f"t must be a nonnegative integer, got {t!r}")
    t = int(t)
    coin = _require_unitary(make_coin(params))
    state = initial_state(spec)
    amps = state.amplitudes
    for _ in range(t):
        amps = _advance(amps, coin)
    return WalkState(t, -t, amps)


def evolve_many(
    spec: InitialSpec, params: Sequence[CoinParams], t: int
) -> NDArray[np.complex128]:
    """
    Evolve one initial state under several coins at once.

    Returns
    -------
    NDArray[np.complex128]
        Shape ``(len(params), 2t + 1, 2)``; row ``i`` of axis 1 is site ``i - t``.
    """
    if t < 0 or int(t) != t:
        raise InvalidParameterError(f"t must be a nonnegative integer, got {t!r}")
    coins = np.zeros((len(params), 2, 2), dtype=np.complex128)
    for i, p in enumerate(params):
        coins[i] = _require_unitary(make_coin(p))
    amps = np.zeros((len(coins), 1, 2), dtype=np.complex128)
    amps[:, 0, 0] = spec.m
    amps[:, 0, 1] = spec.n
    for _ in range(int(t)):
        amps = _advance(amps, coins)
    return amps
