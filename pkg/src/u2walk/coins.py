"""
U(2) coin operators for the one-dimensional walk.

A coin is parametrized by four angles ``(alpha, beta, gamma, theta)``::

    U = e^{i theta} [[ e^{i alpha} cos(beta), -e^{-i gamma} sin(beta)],
                     [ e^{i gamma} sin(beta),  e^{-i alpha} cos(beta)]]

Rows and columns are ordered (L, R): index 0 is the left-moving chirality.
Dropping the ``e^{i theta}`` factor gives the SU(2) part of the coin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

__all__ = [
    "CoinParams",
    "InvalidParameterError",
    "check_unitary",
    "hadamard_params",
    "make_coin",
    "su2_part",
]


class InvalidParameterError(ValueError):
    """Raised when an angle, amplitude or sample count is not acceptable."""


@dataclass(frozen=True)
class CoinParams:
    """Four coin angles in radians. No range normalization is applied."""

    alpha: float
    beta: float
    gamma: float
    theta: float = 0.0

    def __post_init__(self) -> None:
        for name in ("alpha", "beta", "gamma", "theta"):
            value = getattr(self, name)
            try:
                value = float(value)
            except (TypeError, ValueError) as exc:
                raise InvalidParameterError(f"{name} must be a real number, got {value!r}") from exc
            if not math.isfinite(value):
                raise InvalidParameterError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)

    def phi(self) -> float:
        """Return ``alpha + gamma``, the only combination the mean position sees."""
        return self.alpha + self.gamma

    def with_theta(self, theta: float) -> CoinParams:
        return CoinParams(self.alpha, self.beta, self.gamma, theta)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.alpha, self.beta, self.gamma, self.theta)


def _su2_entries(alpha: float, beta: float, gamma: float) -> NDArray[np.complex128]:
    c, s = math.cos(beta), math.sin(beta)
    ea, eg = complex(math.cos(alpha), math.sin(alpha)), complex(math.cos(gamma), math.sin(gamma))
    return np.array(
        [[ea * c, -eg.conjugate() * s], [eg * s, ea.conjugate() * c]],
        dtype=np.complex128,
    )


def make_coin(params: CoinParams) -> NDArray[np.complex128]:
    """
    Build the full U(2) coin matrix.

    Parameters
    ----------
    params : CoinParams
        Coin angles. ``CoinParams`` already rejects non-finite values.

    Returns
    -------
    NDArray[np.complex128]
        2x2 unitary matrix, (L, R) ordering. The returned array is read-only.
    """
    m = _su2_entries(params.alpha, params.beta, params.gamma)
    if params.theta != 0.0:
        m = complex(math.cos(params.theta), math.sin(params.theta)) * m
    m.flags.writeable = False
    return m


def su2_part(params: CoinParams) -> NDArray[np.complex128]:
    """Coin matrix with the global phase removed (determinant 1)."""
    m = _su2_entries(params.alpha, params.beta, params.gamma)
    m.flags.writeable = False
    return m


def hadamard_params() -> CoinParams:
    """Angles that reproduce the Hadamard coin ``[[1, 1], [1, -1]] / sqrt(2)``."""
    return CoinParams(math.pi / 2, math.pi / 4, math.pi / 2, -math.pi / 2)


def check_unitary(m: NDArray[np.complex128], tol: float = 1e-12) -> bool:
    """True iff every entry of ``|m^dagger m - I|`` is at most ``tol``."""
    if tol < 0:
        raise InvalidParameterError(f"tol must be nonnegative, got {tol}")
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    dev = np.abs(m.conj().T @ m - np.eye(m.shape[0]))
    return bool(dev.max() <= tol)
