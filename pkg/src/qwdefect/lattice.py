"""Brute-force time evolution on a finite lattice.

This module knows nothing about the closed forms: it only applies the coin,
the defect phases and the shift, site by site. That makes it the reference
against which the analytic modules are checked.

The lattice covers sites ``-window .. window``. Amplitude that would be
shifted off an end is reflected into the other component of the same edge
site, which keeps every step exactly unitary; any amplitude above
``EDGE_TOL`` on an edge site marks the state as contaminated.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from numpy.typing import NDArray

from .errors import (
    BoundaryContaminationError,
    DomainError,
    InsufficientStepsError,
    SupportOverflowError,
)
from .scattering import Defect, Direction
from .wavecore import Coin, group_velocity, spinor

EDGE_TOL = 1e-14
QUADRATURE_POINTS = 512
#: half-width of the packet's momentum grid, in units of sigma_k
K_SPAN = 12.0
READOUT_MARGIN = 10
RESIDUAL_LIMIT = 1e-3


@dataclass
class LatticeState:
    window: int
    a: NDArray[np.complex128]
    b: NDArray[np.complex128]
    time: int = 0
    boundary_touched: bool = False

    def __post_init__(self):
        size = 2 * self.window + 1
        self.a = np.asarray(self.a, dtype=np.complex128)
        self.b = np.asarray(self.b, dtype=np.complex128)
        if self.a.shape != (size,) or self.b.shape != (size,):
            raise ValueError(f"amplitude arrays must have length {size}")

    @classmethod
    def zeros(cls, window: int) -> "LatticeState":
        size = 2 * window + 1
        return cls(window, np.zeros(size, complex), np.zeros(size, complex))

    @property
    def sites(self) -> NDArray[np.int64]:
        return np.arange(-self.window, self.window + 1)

    @property
    def probability(self) -> NDArray[np.float64]:
        return np.abs(self.a) ** 2 + np.abs(self.b) ** 2

    @property
    def norm(self) -> float:
        return float(np.sum(self.probability))

    def index(self, n: int) -> int:
        if not -self.window <= n <= self.window:
            raise IndexError(f"site {n} outside window {self.window}")
        return n + self.window

    def at(self, n: int) -> NDArray[np.complex128]:
        i = self.index(n)
        return np.array([self.a[i], self.b[i]])


def _cos_sin(coin):
    theta = coin.theta if isinstance(coin, Coin) else float(coin)
    return float(np.cos(theta)), float(np.sin(theta))


def _defect_arrays(stack, window):
    defects = list(stack) if stack is not None else []
    idx, w = [], []
    for d in defects:
        if not isinstance(d, Defect):
            d = Defect(*d)
        if not -window < d.position < window:
            raise DomainError(f"defect at {d.position} outside the lattice interior")
        idx.append(d.position + window)
        w.append(d.omega)
    return np.array(idx, dtype=int), np.array(w, dtype=np.complex128)


def _edge_amplitude(a, b):
    return max(abs(a[0]), abs(b[0]), abs(a[-1]), abs(b[-1]))


def _run(a, b, c, s, idx, w, steps):
    """Evolve raw arrays; returns ``(a, b, touched)``."""
    touched = False
    na = np.empty_like(a)
    nb = np.empty_like(b)
    for _ in range(steps):
        ca = c * a + s * b
        cb = s * a - c * b
        if idx.size:
            ca[idx] *= w
            cb[idx] *= w
        na[:-1] = ca[1:]
        na[-1] = cb[-1]
        nb[1:] = cb[:-1]
        nb[0] = ca[0]
        a, na = na, a
        b, nb = nb, b
        if not touched and _edge_amplitude(a, b) > EDGE_TOL:
            touched = True
    return a, b, touched


def evolve_step(state: LatticeState, coin, stack=None, strict: bool = False) -> LatticeState:
    """One step ``S . exp(i phi delta) . C`` with the defects of ``stack``.

    ``coin`` may be a :class:`Coin` or a bare angle (so that ``theta = 0``
    can be exercised). With ``strict=True`` a contaminated result raises
    :class:`BoundaryContaminationError` instead of only setting the flag.
    """
    return evolve(state, coin, stack, 1, strict=strict)


def evolve(
    state: LatticeState, coin, stack=None, steps: int = 1, strict: bool = False
) -> LatticeState:
    c, s = _cos_sin(coin)
    idx, w = _defect_arrays(stack, state.window)
    a, b, touched = _run(state.a.copy(), state.b.copy(), c, s, idx, w, steps)
    touched = touched or state.boundary_touched
    if strict and touched:
        raise BoundaryContaminationError("amplitude reached the lattice edge")
    return LatticeState(state.window, a, b, state.time + steps, touched)


def ring_step(a, b, coin, stack=None):
    """One step on a periodic ring; ``a``, ``b`` indexed by site ``0..M-1``."""
    c, s = _cos_sin(coin)
    ca = c * np.asarray(a) + s * np.asarray(b)
    cb = s * np.asarray(a) - c * np.asarray(b)
    for d in stack or ():
        if not isinstance(d, Defect):
            d = Defect(*d)
        ca[d.position % ca.size] *= d.omega
        cb[d.position % cb.size] *= d.omega
    return np.roll(ca, -1), np.roll(cb, 1)


@dataclass(frozen=True)
class WavePacketSpec:
    """Gaussian packet of plane waves.

    The momentum amplitude is ``exp(-(k - k0)^2 / (4 sigma_k^2))`` so the
    momentum distribution has standard deviation ``sigma_k`` and the spatial
    one ``1 / (2 sigma_k)``. ``n0=None`` lets :func:`scatter_experiment`
    place the packet.
    """

    k0: float
    sigma_k: float
    n0: int | None = None

    def __post_init__(self):
        if not 0.005 <= self.sigma_k <= 0.2:
            raise DomainError(f"sigma_k must lie in [0.005, 0.2], got {self.sigma_k}")

    @property
    def sigma_x(self) -> float:
        return 1.0 / (2.0 * self.sigma_k)

    @property
    def support(self) -> int:
        """Radius beyond which the initial amplitude is below ~1e-16 of its peak."""
        return int(np.ceil(6.1 / self.sigma_k)) + 10

    def direction(self, coin: Coin) -> Direction:
        v = group_velocity(self.k0, coin)
        return Direction.FROM_LEFT if v > 0 else Direction.FROM_RIGHT

    def k_grid(self) -> NDArray[np.float64]:
        span = K_SPAN * self.sigma_k
        return np.linspace(self.k0 - span, self.k0 + span, QUADRATURE_POINTS)


def make_packet(spec: WavePacketSpec, coin: Coin, window: int) -> LatticeState:
    """Superpose 512 normalized plane waves with Gaussian weights."""
    if spec.n0 is None:
        raise DomainError("packet centre n0 must be set")
    ks = spec.k_grid()
    v = group_velocity(ks, coin)
    if not (np.all(v > 0) or np.all(v < 0)):
        raise DomainError("packet momenta straddle a band edge")
    if abs(spec.n0) + spec.support > window:
        raise SupportOverflowError(
            f"packet support [{spec.n0 - spec.support}, {spec.n0 + spec.support}] "
            f"exceeds window {window}"
        )
    alias = 2 * np.pi / (ks[1] - ks[0])
    if 2 * window + 1 >= alias:
        raise SupportOverflowError(
            f"window {window} exceeds the quadrature alias period {alias:.0f}"
        )
    g = np.exp(-((ks - spec.k0) ** 2) / (4 * spec.sigma_k**2))
    u = spinor(ks, coin)
    n = np.arange(-window, window + 1)
    phase = np.exp(1j * np.outer(n - spec.n0, ks))
    a = phase @ (g * u[0])
    b = phase @ (g * u[1])
    norm = np.sqrt(np.sum(np.abs(a) ** 2 + np.abs(b) ** 2))
    return LatticeState(window, a / norm, b / norm)


@dataclass(frozen=True)
class ExperimentResult:
    R_sim: float
    T_sim: float
    #: probability left within the readout margin of the defects
    residual: float
    steps: int
    window: int
    n0: int
    direction: Direction
    boundary_touched: bool


def _region(stack):
    pos = [d.position for d in stack] if stack else []
    return (min(pos), max(pos)) if pos else (0, 0)


def plan_experiment(spec: WavePacketSpec, coin: Coin, stack) -> tuple[int, int, int]:
    """Choose ``(n0, steps, window)`` so both outgoing packets clear the defects.

    Distances use the slowest group velocity within 5 sigma of ``k0`` for
    the step count and the fastest within the full quadrature span for the
    lattice size.
    """
    first, last = _region(stack)
    ext = last - first
    sx = spec.sigma_x
    direction = spec.direction(coin)
    clear_in = READOUT_MARGIN + int(np.ceil(6 * sx))
    if spec.n0 is None:
        n0 = first - clear_in if direction is Direction.FROM_LEFT else last + clear_in
    else:
        n0 = spec.n0
        near = first - n0 if direction is Direction.FROM_LEFT else n0 - last
        if near < 6 * sx:
            raise DomainError(f"packet at {n0} overlaps the defects within 6 sigma_x")
    d_in = first - n0 if direction is Direction.FROM_LEFT else n0 - last
    ks = spec.k0 + spec.sigma_k * np.linspace(-5, 5, 41)
    v_slow = float(np.min(np.abs(group_velocity(ks, coin))))
    v_fast = float(np.max(np.abs(group_velocity(spec.k_grid(), coin))))
    travel = d_in + ext + READOUT_MARGIN + 7 * sx
    steps = int(np.ceil(travel / v_slow + 20 * ext / v_slow)) + 50
    reach = v_fast * steps
    sup = spec.support + 10
    if direction is Direction.FROM_LEFT:
        hi = n0 + reach + sup
        lo = min(n0, 2 * first - n0 - reach) - sup
    else:
        lo = n0 - reach - sup
        hi = max(n0, 2 * last - n0 + reach) + sup
    window = int(np.ceil(max(abs(lo), abs(hi))))
    return n0, steps, window


def scatter_experiment(
    spec: WavePacketSpec,
    coin: Coin,
    stack=None,
    steps: int | None = None,
    window: int | None = None,
) -> ExperimentResult:
    """Send a packet at the defects and measure where the probability ends up.

    ``R_sim`` is the probability on the incident side farther than 10 sites
    from the defects, ``T_sim`` that on the far side.

    Raises
    ------
    BoundaryContaminationError
        Amplitude reached the lattice edge.
    InsufficientStepsError
        ``steps`` is too short for the packet to cross the defects, or more
        than 1e-3 probability is still near them at the end.
    """
    stack = list(stack) if stack is not None else []
    stack = [d if isinstance(d, Defect) else Defect(*d) for d in stack]
    n0, auto_steps, auto_window = plan_experiment(spec, coin, stack)
    if steps is None:
        steps = auto_steps
    else:
        steps = int(steps)
        first, last = _region(stack)
        d_in = first - n0 if spec.direction(coin) is Direction.FROM_LEFT else n0 - last
        need = (d_in + (last - first) + 6 * spec.sigma_x) / abs(group_velocity(spec.k0, coin)) + 50
        if steps < need:
            raise InsufficientStepsError(f"{steps} steps cannot clear the defects; need {need:.0f}")
    window = auto_window if window is None else int(window)
    state = make_packet(replace(spec, n0=n0), coin, window)
    state = evolve(state, coin, stack, steps)
    if state.boundary_touched:
        raise BoundaryContaminationError(
            f"packet reached the edge of a {2 * window + 1}-site lattice within {steps} steps"
        )
    first, last = _region(stack)
    n = state.sites
    p = state.probability
    left = float(np.sum(p[n < first - READOUT_MARGIN]))
    right = float(np.sum(p[n > last + READOUT_MARGIN]))
    direction = spec.direction(coin)
    R, T = (left, right) if direction is Direction.FROM_LEFT else (right, left)
    residual = float(np.sum(p)) - R - T
    if residual > RESIDUAL_LIMIT:
        raise InsufficientStepsError(f"{residual:.3g} probability still near the defects")
    return ExperimentResult(
        R_sim=R,
        T_sim=T,
        residual=residual,
        steps=steps,
        window=window,
        n0=n0,
        direction=direction,
        boundary_touched=state.boundary_touched,
    )


def eigencheck(profile: LatticeState, coin, stack=None, edge: int = 5) -> tuple[float, complex]:
    """How close ``profile`` is to an eigenstate of one step.

    Applies one step and finds the unimodular ``lam`` minimizing
    ``||U psi - lam psi||`` over the sites at least ``edge`` away from the
    lattice ends. Returns ``(residual, lam)``; ``lam = exp(-iE)`` for an
    eigenstate.
    """
    out = evolve(profile, coin, stack, 1)
    inner = slice(edge, 2 * profile.window + 1 - edge)
    psi = np.concatenate([profile.a[inner], profile.b[inner]])
    upsi = np.concatenate([out.a[inner], out.b[inner]])
    overlap = np.vdot(psi, upsi)
    lam = overlap / abs(overlap) if abs(overlap) > 0 else 1.0 + 0j
    return float(np.linalg.norm(upsi - lam * psi)), complex(lam)


def ring_eigencheck(a, b, coin, stack=None) -> tuple[float, complex]:
    """Periodic variant of :func:`eigencheck` for states on a ring."""
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    na, nb = ring_step(a, b, coin, stack)
    psi = np.concatenate([a, b])
    upsi = np.concatenate([na, nb])
    overlap = np.vdot(psi, upsi)
    lam = overlap / abs(overlap)
    return float(np.linalg.norm(upsi - lam * psi) / np.linalg.norm(psi)), complex(lam)
