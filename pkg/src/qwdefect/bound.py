"""Bound states of a single phase defect.

A bound state decays by a complex factor ``q`` per site away from the
defect: ``psi(n-1)/psi(n) = q`` on the left and ``psi(n+1)/psi(n) = -q`` on
the right. The four candidates are

    q_{m,+-} = +-i / sqrt(1 + 2 (-1)^m sin(phi) tan(theta) + 2 (1 - cos phi) tan(theta)^2)

for ``m = 1, 2``; a candidate is a normalizable state only when ``|q| < 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError, NonRealDispersionError, WindowTooSmallError
from .lattice import LatticeState
from .scattering import critical_phase, reduce_phase, zero_reflectance_momentum
from .transfer import DefectStack, min_reflectance
from .wavecore import Coin

RESIDUAL_TOL = 1e-9
_CONTINUITY_STEP = 1e-5


@dataclass(frozen=True)
class BoundStateBranch:
    m: int
    sign: int
    decay_factor: complex
    energy: float
    t_match: complex
    #: residual of the site-matching system at (decay_factor, energy, t_match)
    residual: float

    @property
    def kappa(self) -> complex:
        return complex(np.log(self.decay_factor))

    @property
    def modulus(self) -> float:
        return abs(self.decay_factor)

    @property
    def normalizable(self) -> bool:
        return self.modulus < 1.0

    @property
    def label(self) -> str:
        return f"{self.m}{'+' if self.sign > 0 else '-'}"

    @property
    def in_studied_branch(self) -> bool:
        """Whether the energy lies on the propagating-mode branch ``(-pi/2, pi/2]``."""
        return -np.pi / 2 < self.energy <= np.pi / 2


def _radicand(coin: Coin, phi: float, m: int) -> float:
    tan = coin.tan
    return 1.0 + 2.0 * (-1) ** m * np.sin(phi) * tan + 2.0 * (1.0 - np.cos(phi)) * tan**2


def bound_decay_factors(coin: Coin, defect_phase: float) -> list[complex]:
    """The four candidate decay factors, ordered ``1+, 1-, 2+, 2-``.

    Uses ``sin(phi) tan(phi/2) = 1 - cos(phi)`` so ``phi = pi`` is exact.
    Non-normalizable candidates are returned too.
    """
    out = []
    for m in (1, 2):
        root = np.sqrt(_radicand(coin, defect_phase, m))
        out.extend([1j / root, -1j / root])
    return [complex(q) for q in out]


def _unit(v):
    return v / np.sqrt(np.vdot(v, v).real)


def matching_system(coin: Coin, defect_phase: float, q: complex, energy: float):
    """Solve the first site-matching equation for ``t``; return ``(residual, t)``.

    The left mode has ``e^{ik} = 1/q``, the right mode ``e^{ik'} = -q``; both
    spinors are the unnormalized plane-wave forms scaled to unit Hermitian
    norm. The residual is that of the second equation.
    """
    c, s = coin.cos, coin.sin
    w = np.exp(1j * defect_phase)
    lam = np.exp(-1j * energy)
    z, zp = 1.0 / q, -q
    a, b = _unit(np.array([s * z, lam - c * z]))
    ap, bp = _unit(np.array([s * zp, lam - c * zp]))
    t = (c * a + s * b - w * s * b) / (w * c * ap)
    residual = abs(w * (s * t * ap - c * b) - t * (s * ap - c * bp))
    return float(residual), complex(t)


def _energy_candidates(coin: Coin, q: complex) -> tuple[float, float]:
    k_sin = (1.0 / q - q) / 2j
    rhs = -coin.cos * k_sin
    if abs(rhs.imag) > 1e-8:
        raise NonRealDispersionError(f"sin E = {rhs:.6g} is not real")
    alpha = float(np.arcsin(np.clip(rhs.real, -1.0, 1.0)))
    return alpha, reduce_phase(np.pi - alpha)


def _branch(coin: Coin, phi: float, m: int, sign: int) -> BoundStateBranch:
    q = sign * 1j / np.sqrt(_radicand(coin, phi, m))
    cands = _energy_candidates(coin, q)
    solved = [matching_system(coin, phi, q, E) for E in cands]
    both = all(res <= RESIDUAL_TOL for res, _ in solved)
    distinct = abs(np.exp(-1j * cands[0]) - np.exp(-1j * cands[1])) > 1e-6
    if both and distinct:
        # m=1 and m=2 coincide (sin phi = 0); follow the branch from below
        ref = _branch(coin, phi - _CONTINUITY_STEP, m, sign).energy
        pick = int(np.argmin([abs(np.angle(np.exp(1j * (E - ref)))) for E in cands]))
    else:
        pick = int(np.argmin([res for res, _ in solved]))
    res, t = solved[pick]
    return BoundStateBranch(
        m=m, sign=sign, decay_factor=complex(q), energy=cands[pick], t_match=t, residual=res
    )


def bound_branches(coin: Coin, defect_phase: float) -> list[BoundStateBranch]:
    """All four branches with energies and matching amplitudes, ``1+, 1-, 2+, 2-``."""
    phi = reduce_phase(defect_phase)
    return [_branch(coin, phi, m, sign) for m in (1, 2) for sign in (1, -1)]


def bound_state_energy(branch: BoundStateBranch, coin: Coin) -> float:
    """Quasi-energy of a normalizable branch, in ``(-pi, pi]``.

    It lies in the band gap, ``|sin E| > cos(theta)``.
    """
    if not branch.normalizable:
        raise DomainError(f"branch {branch.label} is not normalizable (|q| = {branch.modulus:.6g})")
    return branch.energy


def bound_state_profile(
    branch: BoundStateBranch, coin: Coin, defect_phase: float, window: int
) -> LatticeState:
    """Real-space state on ``[-window, window]`` with the defect at 0.

    Normalized to unit total probability.
    """
    if not branch.normalizable:
        raise DomainError(f"branch {branch.label} is not normalizable")
    need = 20.0 / abs(np.log(branch.modulus))
    if window < need:
        raise WindowTooSmallError(f"window {window} < {need:.1f} sites needed for 1e-10 truncation")
    c, s = coin.cos, coin.sin
    q = branch.decay_factor
    lam = np.exp(-1j * branch.energy)
    z, zp = 1.0 / q, -q
    u = _unit(np.array([s * z, lam - c * z]))
    up = _unit(np.array([s * zp, lam - c * zp]))
    n = np.arange(-window, window + 1)
    a = np.empty(n.size, dtype=np.complex128)
    b = np.empty(n.size, dtype=np.complex128)
    left, right = n < 0, n > 0
    a[left] = q ** (-n[left]) * u[0]
    b[left] = q ** (-n[left]) * u[1]
    fac = branch.t_match * zp ** n[right]
    a[right] = fac * up[0]
    b[right] = fac * up[1]
    a[window] = branch.t_match * up[0]
    b[window] = u[1]
    norm = np.sqrt(np.sum(np.abs(a) ** 2 + np.abs(b) ** 2))
    return LatticeState(window=window, a=a / norm, b=b / norm)


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    closed_hi: bool = False

    def __contains__(self, x: float) -> bool:
        return self.lo < x < self.hi or (self.closed_hi and x == self.hi)


def bound_existence_windows(coin: Coin) -> dict[int, tuple[Interval, ...]]:
    """Phases in ``(-pi, pi]`` for which each pair of branches is normalizable.

    Pair 1 binds for ``phi`` in ``(pi - 2 theta, 2 pi)`` and pair 2 for
    ``(-2 pi, -(pi - 2 theta))``; reduced to ``(-pi, pi]`` each window is
    a union of two intervals.
    """
    pc = critical_phase(coin)
    return {
        1: (Interval(pc, np.pi, closed_hi=True), Interval(-np.pi, 0.0)),
        2: (Interval(0.0, np.pi, closed_hi=True), Interval(-np.pi, -pc)),
    }


def in_existence_window(coin: Coin, defect_phase: float, m: int) -> bool:
    phi = reduce_phase(defect_phase)
    return any(phi in iv for iv in bound_existence_windows(coin)[m])


@dataclass
class SweepRow:
    phi: float
    modulus_m1: float
    modulus_m2: float
    branches: list[BoundStateBranch] = field(repr=False)
    zero_reflectance_k: float | None
    min_R: float
    k_min_R: float

    @property
    def bound(self) -> list[BoundStateBranch]:
        return [b for b in self.branches if b.normalizable]

    @property
    def E_bound(self) -> float | None:
        """Energy of the + branch of the most tightly bound existing pair."""
        plus = [b for b in self.bound if b.sign > 0]
        if not plus:
            return None
        return min(plus, key=lambda b: (b.modulus, b.m)).energy


def transition_sweep(coin: Coin, phases: Sequence[float]) -> list[SweepRow]:
    """Static scan of a single defect's phase.

    Each row carries the bound-state moduli and branches, the momentum with
    zero reflectance (when one exists) and the minimum reflectance over the
    band. This is a parameter scan, not a time evolution.
    """
    phases = [float(p) for p in phases]
    if any(b < a for a, b in zip(phases, phases[1:])):
        raise ValueError("phases must be sorted")
    rows = []
    for phi in phases:
        branches = bound_branches(coin, phi)
        k_min, r_min = min_reflectance(DefectStack.of([(0, phi)]), coin)
        rows.append(
            SweepRow(
                phi=phi,
                modulus_m1=branches[0].modulus,
                modulus_m2=branches[2].modulus,
                branches=branches,
                zero_reflectance_k=zero_reflectance_momentum(phi, coin),
                min_R=r_min,
                k_min_R=k_min,
            )
        )
    return rows
