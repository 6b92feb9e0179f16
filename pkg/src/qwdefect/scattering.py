"""Closed-form scattering off a single phase defect.

The defect multiplies the coin output at its site by ``omega = exp(i phi)``.
Amplitudes ``r`` and ``t`` are coefficients of the *normalized* spinors of
:func:`qwdefect.wavecore.spinor`, so ``|r|^2`` and ``|t|^2`` are directly the
reflected and transmitted probabilities (both branches at fixed ``E`` carry
the same speed).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DirectionError, SingularPointError
from .wavecore import Coin, _energy, _spinor_components, reduce_angle, spinor

#: half-width of the removable 0/0 window of the closed forms around k = pi
SINGULAR_WINDOW = 1e-7


def reduce_phase(phi: float) -> float:
    """Map a phase into ``(-pi, pi]``."""
    return float(np.pi - np.mod(np.pi - phi, 2 * np.pi))


@dataclass(frozen=True)
class Defect:
    position: int
    phase: float

    def __post_init__(self):
        if isinstance(self.position, bool) or int(self.position) != self.position:
            raise TypeError(f"defect position must be an integer, got {self.position!r}")
        object.__setattr__(self, "position", int(self.position))
        object.__setattr__(self, "phase", reduce_phase(float(self.phase)))

    @property
    def omega(self) -> complex:
        return complex(np.exp(1j * self.phase))


class Direction(str, enum.Enum):
    FROM_LEFT = "from-left"
    FROM_RIGHT = "from-right"


@dataclass(frozen=True)
class ScatteringAmplitudes:
    r: complex
    t: complex
    k: float
    direction: Direction = Direction.FROM_LEFT
    #: True when the value came from the symmetric limit around the 0/0 point
    limit: bool = False

    @property
    def R(self) -> float:
        return abs(self.r) ** 2

    @property
    def T(self) -> float:
        return abs(self.t) ** 2


def _closed_form(k, cos_t, phi):
    """Closed-form ``r`` and ``t`` for a wave from the left; vectorized over ``k``."""
    k = np.asarray(k, dtype=float)
    E = _energy(k, cos_t)
    w = np.exp(1j * phi)
    e2 = np.exp(-2j * E)
    den = w * ((w - 1) * np.sin(E - k) + 1j * (e2 - np.cos(2 * k)) * cos_t) + np.sin(E + k) * (
        w - e2
    )
    root = np.sqrt((np.sin(k - E) * np.sin(k + E)).astype(complex))
    sign = np.where(reduce_angle(k) - np.pi >= 0, 1.0, -1.0)
    r = sign * (1 - w) * root * (w - e2) / den
    t = -np.sin(2 * k) * cos_t**2 * np.exp(1j * (phi - k - E)) / den
    return r, t


def _closed_form_limit(k, cos_t, phi, k_sing):
    """Closed forms with the symmetric limit inside the singular window.

    Returns ``(r, t, used_limit)``.
    """
    k = np.asarray(k, dtype=float)
    dist = np.abs(np.angle(np.exp(1j * (k - k_sing))))
    near = dist < SINGULAR_WINDOW
    safe_k = np.where(near, k_sing + 0.5, k)
    r, t = _closed_form(safe_k, cos_t, phi)
    if np.any(near):
        r_p, t_p = _closed_form(k_sing + SINGULAR_WINDOW, cos_t, phi)
        r_m, t_m = _closed_form(k_sing - SINGULAR_WINDOW, cos_t, phi)
        r = np.where(near, 0.5 * (r_p + r_m), r)
        t = np.where(near, 0.5 * (t_p + t_m), t)
    return r, t, near


def _check_window(k):
    dist = np.abs(np.angle(np.exp(1j * (np.asarray(k, dtype=float) - np.pi))))
    if np.any(dist < SINGULAR_WINDOW):
        raise SingularPointError(
            "k within 1e-7 of pi: closed form is 0/0, use scatter_single for the limit"
        )


def _scalar(x):
    return complex(x) if np.ndim(x) == 0 else x


def reflection_amplitude(k, coin: Coin, defect_phase: float):
    """Reflection amplitude for a wave incident from the left.

    The square root is the principal branch; ``sign(k - pi)`` picks the
    physical one. ``k`` should lie in ``(pi/2, 3pi/2)``; scalars or arrays.

    Raises
    ------
    SingularPointError
        Within ``1e-7`` of ``k = pi``.
    """
    _check_window(k)
    r, _ = _closed_form(k, coin.cos, defect_phase)
    return _scalar(r)


def transmission_amplitude(k, coin: Coin, defect_phase: float):
    """Transmission amplitude for a wave incident from the left."""
    _check_window(k)
    _, t = _closed_form(k, coin.cos, defect_phase)
    return _scalar(t)


def _mirror_phase_ratio(k, coin: Coin):
    """``alpha / beta`` relating the walk to its mirror image.

    Mirroring ``n -> -n`` with ``L <-> R`` maps the walk at ``theta`` to the
    walk at ``pi - theta`` and momentum ``k`` to ``-k``; the normalized
    spinors agree up to the unimodular factors ``alpha`` (incident mode) and
    ``beta`` (reflected mode).
    """
    c, s = coin.cos, coin.sin
    u_in = spinor(k, coin)[::-1]
    u_out = spinor(np.pi - k, coin)[::-1]
    m_in = np.array(_spinor_components(-k, -c, s))
    m_out = np.array(_spinor_components(np.pi + k, -c, s))
    alpha = np.vdot(m_in, u_in)
    beta = np.vdot(m_out, u_out)
    return alpha / beta


def scatter_single(
    k: float,
    coin: Coin,
    defect_phase: float,
    direction: Direction | str = Direction.FROM_LEFT,
) -> ScatteringAmplitudes:
    """Scattering amplitudes of one defect at the origin.

    From the left ``k`` must be in ``(pi/2, 3pi/2)``; from the right in
    ``(-pi/2, pi/2)`` (mod 2pi). Right incidence is evaluated through the
    mirror image of the walk (coin angle ``pi - theta``, momentum ``-k``).
    Points inside the 0/0 window use the symmetric limit and are flagged.
    """
    direction = Direction(direction)
    kr = reduce_angle(k)
    moving_right = np.pi / 2 < kr < 3 * np.pi / 2
    if direction is Direction.FROM_LEFT:
        if not moving_right:
            raise DirectionError(f"k={k:.6g} does not move right; cannot come from the left")
        r, t, near = _closed_form_limit(kr, coin.cos, defect_phase, np.pi)
    else:
        if moving_right or np.isclose(kr, np.pi / 2) or np.isclose(kr, 3 * np.pi / 2):
            raise DirectionError(f"k={k:.6g} does not move left; cannot come from the right")
        km = reduce_angle(-kr)
        r_m, t, near = _closed_form_limit(km, -coin.cos, defect_phase, 0.0)
        r = r_m * _mirror_phase_ratio(kr, coin)
    return ScatteringAmplitudes(
        r=complex(r), t=complex(t), k=kr, direction=direction, limit=bool(near)
    )


def zero_reflectance_phase(k, coin: Coin):
    """Defect phase ``2 arcsin(cos(theta) sin k) = -2E`` that makes ``r`` vanish."""
    phi = 2.0 * np.arcsin(coin.cos * np.sin(np.asarray(k, dtype=float)))
    return float(phi) if np.ndim(phi) == 0 else phi


def zero_reflectance_momentum(defect_phase: float, coin: Coin) -> float | None:
    """Right-moving momentum that passes a defect of this phase untouched.

    Inverse of :func:`zero_reflectance_phase` on ``[pi/2, 3pi/2]``; ``None``
    when ``|phi| > pi - 2 theta`` (no reflectionless mode).
    """
    x = np.sin(reduce_phase(defect_phase) / 2) / coin.cos
    if abs(x) > 1.0 + 1e-12:
        return None
    return float(np.pi - np.arcsin(np.clip(x, -1.0, 1.0)))


def critical_phase(coin: Coin) -> float:
    """``pi - 2 theta``: zero reflectance is possible only for ``|phi|`` below it."""
    return float(np.pi - 2.0 * coin.theta)


def matching_residual(k: float, coin: Coin, defect_phase: float, r: complex, t: complex) -> float:
    """Largest residual of the two site-matching equations around the defect.

    With the defect at the origin, ``psi(0) = (t a_k, b_k + r b_{pi-k})``;
    the equations are one step of the walk landing on sites -1 (left
    component) and +1 (right component).
    """
    c, s = coin.cos, coin.sin
    w = np.exp(1j * defect_phase)
    ak, bk = spinor(k, coin)
    ap, bp = spinor(np.pi - k, coin)
    b0 = bk + r * bp
    eq1 = w * (c * t * ak + s * b0) - (c * (ak + r * ap) + s * b0)
    eq2 = w * (s * t * ak - c * b0) - t * (s * ak - c * bk)
    return float(max(abs(eq1), abs(eq2)))
