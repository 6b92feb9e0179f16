"""Defect-free walk: coin, dispersion, plane-wave spinors, group velocity.

Conventions used everywhere in the package:

* a state is a pair of amplitudes ``(a_n, b_n)`` per site, ``a`` moving left
  and ``b`` moving right after the coin;
* one step is ``a_{n-1} <- cos(theta) a_n + sin(theta) b_n`` and
  ``b_{n+1} <- sin(theta) a_n - cos(theta) b_n``;
* a stationary state picks up ``exp(-iE)`` per step, and plane waves go as
  ``exp(ikn)``, so ``sin E = -cos(theta) sin k``;
* quasi-energies of propagating modes live on the branch ``(-pi/2, pi/2]``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import BandEdgeError, DegenerateModeError, DomainError, OutOfBandError

TWO_PI = 2.0 * np.pi
ANGLE_TOL = 1e-9
SPINOR_TOL = 1e-12


@dataclass(frozen=True)
class Coin:
    """Rotation coin ``cos(theta) sigma_z + sin(theta) sigma_x``.

    ``theta = pi/4`` is the Hadamard coin. Only the open interval
    ``(0, pi/2)`` is accepted.
    """

    theta: float

    def __post_init__(self):
        theta = float(self.theta)
        if not np.isfinite(theta) or not 0.0 < theta < np.pi / 2:
            raise DomainError(f"coin angle must lie in (0, pi/2), got {self.theta!r}")
        object.__setattr__(self, "theta", theta)

    @classmethod
    def hadamard(cls) -> "Coin":
        return cls(np.pi / 4)

    @property
    def cos(self) -> float:
        return float(np.cos(self.theta))

    @property
    def sin(self) -> float:
        return float(np.sin(self.theta))

    @property
    def tan(self) -> float:
        return float(np.tan(self.theta))

    @property
    def matrix(self) -> NDArray[np.complex128]:
        c, s = self.cos, self.sin
        return np.array([[c, s], [s, -c]], dtype=np.complex128)


@dataclass(frozen=True)
class PlaneWaveMode:
    """One Bloch solution ``exp(-iEt + ikn) (a_k, b_k)`` of the free walk."""

    k: float
    E: float
    spinor: NDArray[np.complex128]

    @property
    def a(self) -> complex:
        return complex(self.spinor[0])

    @property
    def b(self) -> complex:
        return complex(self.spinor[1])


def reduce_angle(x: ArrayLike) -> NDArray[np.float64] | float:
    """Map angles into ``[0, 2pi)``."""
    out = np.mod(x, TWO_PI)
    # mod can return 2pi itself for tiny negative inputs
    out = np.where(out >= TWO_PI, 0.0, out)
    return float(out) if np.ndim(out) == 0 else out


def angles_close(x: float, y: float, tol: float = ANGLE_TOL) -> bool:
    """Compare two angles modulo 2pi."""
    d = abs(reduce_angle(x - y))
    return min(d, TWO_PI - d) <= tol


def _energy(k, cos_t):
    return -np.arcsin(np.clip(cos_t * np.sin(k), -1.0, 1.0))


def _spinor_components(k, cos_t, sin_t):
    """Unit-norm plane-wave spinor for arbitrary (possibly negative) cos_t.

    Shared with the mirrored walk used for right incidence, which needs
    ``cos_t < 0``.
    """
    k = np.asarray(k, dtype=float)
    E = _energy(k, cos_t)
    a = np.exp(1j * k) * sin_t
    b = np.exp(-1j * E) - cos_t * np.exp(1j * k)
    # equals 2 - 2 cos_t cos(E + k) without its cancellation at small theta
    norm2 = sin_t**2 + np.abs(b) ** 2
    if np.any(norm2 <= SPINOR_TOL):
        raise DegenerateModeError("spinor normalization vanishes (decoupled limit)")
    scale = 1.0 / np.sqrt(norm2)
    return a * scale, b * scale


def quasi_energy(k: ArrayLike, coin: Coin):
    """Quasi-energy ``E = -arcsin(cos(theta) sin k)`` on ``[-pi/2, pi/2]``.

    Accepts scalars or arrays; ``k`` need not be reduced.
    """
    E = _energy(np.asarray(k, dtype=float), coin.cos)
    return float(E) if np.ndim(E) == 0 else E


def quasi_momenta(E: float, coin: Coin) -> tuple[float, float]:
    """The two momenta carrying quasi-energy ``E``.

    Returns ``(k_minus, k_plus)`` with ``k_minus = -arcsin(sin E / cos theta)``
    (left-moving, in ``[-pi/2, pi/2]``) and ``k_plus = pi + arcsin(...)``
    (right-moving, in ``[pi/2, 3pi/2]``).

    Raises
    ------
    OutOfBandError
        If ``|sin E| > cos(theta)``: ``E`` lies in the band gap.
    """
    x = np.sin(E) / coin.cos
    if abs(x) > 1.0 + 1e-12:
        raise OutOfBandError(f"|sin E| = {abs(np.sin(E)):.6g} exceeds cos(theta) = {coin.cos:.6g}")
    s = float(np.arcsin(np.clip(x, -1.0, 1.0)))
    return -s, np.pi + s


def spinor(k: ArrayLike, coin: Coin) -> NDArray[np.complex128]:
    """Normalized internal state ``(a_k, b_k)`` of the plane wave at ``k``.

    The phase is the one fixed by ``a_k ~ exp(ik) sin(theta)``,
    ``b_k ~ exp(-iE) - cos(theta) exp(ik)``; only the normalization
    ``1/sqrt(2 - 2 cos(theta) cos(E + k))`` is applied on top. For array
    input the result has shape ``(2,) + k.shape``.
    """
    a, b = _spinor_components(k, coin.cos, coin.sin)
    return np.array([a, b], dtype=np.complex128)


def plane_wave_mode(k: float, coin: Coin) -> PlaneWaveMode:
    k = reduce_angle(k)
    return PlaneWaveMode(k=k, E=quasi_energy(k, coin), spinor=spinor(k, coin))


def group_velocity(k: ArrayLike, coin: Coin):
    """``dE/dk = -cos(theta) cos k / cos E`` in sites per step.

    Positive for ``k`` in ``(pi/2, 3pi/2)``, negative in ``(-pi/2, pi/2)``.
    """
    k = np.asarray(k, dtype=float)
    cos_e = np.cos(_energy(k, coin.cos))
    if np.any(np.abs(cos_e) < ANGLE_TOL):
        raise BandEdgeError("cos E vanishes; group velocity undefined")
    v = -coin.cos * np.cos(k) / cos_e
    return float(v) if np.ndim(v) == 0 else v


def free_step_matrix(k: complex, coin: Coin) -> NDArray[np.complex128]:
    """Bloch matrix of one free step acting on ``(a, b)`` at momentum ``k``.

    Its eigenvalues are ``exp(-iE)`` for the two energies sharing ``k``.
    """
    c, s = coin.cos, coin.sin
    z = np.exp(1j * k)
    return np.array([[c * z, s * z], [s / z, -c / z]], dtype=np.complex128)
