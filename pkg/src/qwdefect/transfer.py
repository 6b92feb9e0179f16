"""Transfer matrices for stacks of phase defects.

Around a defect at site ``N`` the stationary state is a superposition of the
two plane waves sharing the quasi-energy, ``A, B`` to the left and ``C, D`` to
the right::

    psi(n) = A e^{ikn} u_k + B e^{i(pi-k)n} u_{pi-k}     n < N
    psi(n) = C e^{ikn} u_k + D e^{i(pi-k)n} u_{pi-k}     n > N

with ``psi(N)`` taking its left component from the right-hand region and its
right component from the left-hand region. Imposing one step of the walk on
sites ``N-1`` and ``N+1`` gives ``(C, D) = Lambda (A, B)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from numpy.typing import NDArray
from scipy.optimize import minimize_scalar

from .errors import ResonanceError, SingularMatrixError
from .scattering import SINGULAR_WINDOW, Defect, Direction, ScatteringAmplitudes, reduce_phase
from .wavecore import Coin, _energy, reduce_angle, spinor

DET_TOL = 1e-12
ZERO_R = 1e-9


@dataclass(frozen=True)
class DefectStack:
    """Defects ordered by position; several phases on one site are merged."""

    defects: tuple[Defect, ...] = field(default_factory=tuple)

    def __post_init__(self):
        merged: dict[int, float] = {}
        for d in self.defects:
            if not isinstance(d, Defect):
                d = Defect(*d)
            merged[d.position] = merged.get(d.position, 0.0) + d.phase
        ordered = tuple(Defect(n, reduce_phase(p)) for n, p in sorted(merged.items()))
        object.__setattr__(self, "defects", ordered)

    @classmethod
    def of(cls, pairs: Iterable[tuple[int, float]] | Iterable[Defect]) -> "DefectStack":
        return cls(tuple(pairs))

    def __len__(self):
        return len(self.defects)

    def __iter__(self):
        return iter(self.defects)

    @property
    def positions(self) -> list[int]:
        return [d.position for d in self.defects]

    @property
    def extent(self) -> int:
        return self.defects[-1].position - self.defects[0].position if self.defects else 0

    def split(self, index: int) -> tuple["DefectStack", "DefectStack"]:
        return DefectStack(self.defects[:index]), DefectStack(self.defects[index:])


def _as_stack(stack) -> DefectStack:
    return stack if isinstance(stack, DefectStack) else DefectStack(tuple(stack))


def _inv2(m):
    det = m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]
    inv = np.empty_like(m)
    inv[..., 0, 0] = m[..., 1, 1]
    inv[..., 1, 1] = m[..., 0, 0]
    inv[..., 0, 1] = -m[..., 0, 1]
    inv[..., 1, 0] = -m[..., 1, 0]
    ok = np.abs(det) > DET_TOL
    inv /= np.where(ok, det, 1.0)[..., None, None]
    return inv, ok


def _mode_basis(k, coin):
    """``P[..., :, j]`` is the spinor of mode j in (k, pi - k)."""
    uk = spinor(k, coin)
    up = spinor(np.pi - k, coin)
    P = np.empty(np.shape(k) + (2, 2), dtype=np.complex128)
    P[..., 0, 0], P[..., 1, 0] = uk[0], uk[1]
    P[..., 0, 1], P[..., 1, 1] = up[0], up[1]
    return P


def _conjugate_position(L, k, N):
    """``D(N)^-1 L D(N)`` with ``D(N) = diag(e^{ikN}, e^{i(pi-k)N})``."""
    if N == 0:
        return L
    d = np.stack([np.exp(1j * k * N), np.exp(1j * (np.pi - k) * N)], axis=-1)
    return L * d[..., None, :] / d[..., :, None]


def _lambda_batch(k, coin: Coin, defect: Defect, printed: bool = False):
    k = np.asarray(k, dtype=float)
    w = defect.omega
    g = (w - 1) * coin.tan
    X = np.array([[w, 0], [g, -1 if printed else 1]], dtype=np.complex128)
    Y = np.array([[1, -g], [0, w]], dtype=np.complex128)
    P = _mode_basis(k, coin)
    left, ok = _inv2(X @ P)
    L = left @ (Y @ P)
    return _conjugate_position(L, k, defect.position), ok


def lambda_matrix(defect: Defect, k: float, coin: Coin) -> NDArray[np.complex128]:
    """Transfer matrix ``Lambda(omega, N)`` mapping ``(A, B)`` to ``(C, D)``.

    Regular at ``k = pi``; singular only at the band edges where the two
    modes coincide.
    """
    L, ok = _lambda_batch(k, coin, defect)
    if not np.all(ok):
        raise SingularMatrixError(f"matching system degenerate at k={k:.6g}")
    return L


def lambda_matrix_printed(defect: Defect, k: float, coin: Coin) -> NDArray[np.complex128]:
    """Variant with ``-1`` in the lower-right entry of the inverted factor.

    Kept for comparison only: it does not reduce to the identity for a
    trivial defect, while :func:`lambda_matrix` does.
    """
    L, ok = _lambda_batch(k, coin, defect, printed=True)
    if not np.all(ok):
        raise SingularMatrixError(f"matching system degenerate at k={k:.6g}")
    return L


def _det2(m):
    return m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]


def _stack_product(stack: DefectStack, k, coin: Coin):
    """Product matrix, its determinant and a solvability mask.

    The determinant is accumulated factor by factor: for strongly
    reflecting stacks the entries of the product grow large and its
    determinant would be lost to cancellation.
    """
    k = np.asarray(k, dtype=float)
    M = np.broadcast_to(np.eye(2, dtype=np.complex128), k.shape + (2, 2)).copy()
    det = np.ones(k.shape, dtype=np.complex128)
    ok = np.ones(k.shape, dtype=bool)
    for d in stack:
        L, good = _lambda_batch(k, coin, d)
        M = L @ M
        det = det * _det2(L)
        ok &= good
    return M, det, ok


def stack_matrix(stack, k: float, coin: Coin) -> NDArray[np.complex128]:
    """Ordered product, leftmost defect applied first (rightmost factor)."""
    M, _, ok = _stack_product(_as_stack(stack), k, coin)
    if not np.all(ok):
        raise SingularMatrixError(f"matching system degenerate at k={k:.6g}")
    return M


def amplitudes_from_matrix(M, direction: Direction | str = Direction.FROM_LEFT, det=None):
    """``(r, t)`` from a stack matrix, or ``ResonanceError`` if unsolvable.

    Pass ``det`` when it is known more accurately than the entries of
    ``M`` allow (see :func:`stack_scatter`).
    """
    r, t, ok = _solve_amplitudes(np.asarray(M), Direction(direction), det)
    if not np.all(ok):
        raise ResonanceError("transfer matrix cannot be solved for r")
    return r, t


def _solve_amplitudes(M, direction: Direction, det=None):
    if direction is Direction.FROM_LEFT:
        # (t, 0) = M (1, r), so t = det M / M22
        m22 = M[..., 1, 1]
        ok = np.abs(m22) > DET_TOL
        safe = np.where(ok, m22, 1.0)
        r = -M[..., 1, 0] / safe
        t = (_det2(M) if det is None else det) / safe
    else:
        # (1, r) = M (t, 0)
        m11 = M[..., 0, 0]
        ok = np.abs(m11) > DET_TOL
        t = 1.0 / np.where(ok, m11, 1.0)
        r = M[..., 1, 0] * t
    return r, t, ok


def stack_scatter(
    stack, k: float, coin: Coin, direction: Direction | str = Direction.FROM_LEFT
) -> ScatteringAmplitudes:
    """Reflection and transmission of a defect stack at momentum ``k``.

    ``k`` is the incident momentum: in ``(pi/2, 3pi/2)`` from the left,
    ``(-pi/2, pi/2)`` from the right.
    """
    direction = Direction(direction)
    M, det, good = _stack_product(_as_stack(stack), k, coin)
    if not np.all(good):
        raise SingularMatrixError(f"matching system degenerate at k={k:.6g}")
    r, t, ok = _solve_amplitudes(M, direction, det)
    if not ok:
        raise ResonanceError(f"transfer matrix cannot be solved for r at k={k:.6g}")
    return ScatteringAmplitudes(r=complex(r), t=complex(t), k=reduce_angle(k), direction=direction)


@dataclass
class Spectrum:
    k: NDArray[np.float64]
    E: NDArray[np.float64]
    R: NDArray[np.float64]
    T: NDArray[np.float64]
    flags: list[str]

    def rows(self):
        return zip(self.k, self.E, self.R, self.T, self.flags)


def reflectance_spectrum(stack, coin: Coin, k_grid: Sequence[float]) -> Spectrum:
    """``R = |r|^2`` and ``T = |t|^2`` for left incidence over a momentum grid.

    Points that cannot be evaluated get ``nan`` and a flag instead of
    aborting the scan: ``out_of_band`` (not right-moving), ``singular``,
    ``resonance``. ``k_pi`` marks points where the single-defect closed form
    would need its limit; the transfer-matrix value itself is regular there.
    """
    stack = _as_stack(stack)
    k = np.asarray(k_grid, dtype=float)
    kr = reduce_angle(k)
    inband = (kr > np.pi / 2) & (kr < 3 * np.pi / 2)
    safe_k = np.where(inband, kr, np.pi)
    M, det, ok = _stack_product(stack, safe_k, coin)
    r, t, solved = _solve_amplitudes(M, Direction.FROM_LEFT, det)
    R = np.abs(r) ** 2
    T = np.abs(t) ** 2
    flags = []
    for i in range(k.size):
        if not inband[i]:
            flag = "out_of_band"
        elif not ok[i]:
            flag = "singular"
        elif not solved[i]:
            flag = "resonance"
        elif abs(kr[i] - np.pi) < SINGULAR_WINDOW:
            flag = "k_pi"
        else:
            flag = ""
        flags.append(flag)
    bad = np.array([f not in ("", "k_pi") for f in flags], dtype=bool)
    R = np.where(bad, np.nan, R)
    T = np.where(bad, np.nan, T)
    return Spectrum(k=k, E=_energy(k, coin.cos), R=R, T=T, flags=flags)


def _reflectance_fn(stack: DefectStack, coin: Coin):
    def R(k):
        M, _, _ = _stack_product(stack, np.array([k]), coin)
        r, _, _ = _solve_amplitudes(M, Direction.FROM_LEFT)
        return float(np.abs(r[0]) ** 2)

    return R


@dataclass
class ZeroSearch:
    zeros: list[float]
    #: local minima of R that stay above the zero threshold, as (k, R)
    near_misses: list[tuple[float, float]]


BAND = (np.pi / 2, 3 * np.pi / 2)


def _grid(k_range, points):
    lo, hi = k_range
    # open interval: band edges are degenerate
    return np.linspace(lo, hi, points + 2)[1:-1]


def find_reflectance_zeros(
    stack,
    coin: Coin,
    k_range: tuple[float, float] = BAND,
    points: int = 2000,
    xtol: float = 1e-10,
) -> ZeroSearch:
    """Locate momenta of vanishing reflectance.

    Every interior local minimum of ``R`` on a ``points``-sized grid is
    refined by bounded Brent minimization to ``xtol``; minima with
    ``R <= 1e-9`` count as zeros, the rest are returned as near misses.
    """
    stack = _as_stack(stack)
    ks = _grid(k_range, points)
    R = reflectance_spectrum(stack, coin, ks).R
    f = _reflectance_fn(stack, coin)
    zeros, misses = [], []
    for i in range(1, ks.size - 1):
        if not (R[i] < R[i - 1] and R[i] <= R[i + 1]):
            continue
        res = minimize_scalar(
            f, bounds=(ks[i - 1], ks[i + 1]), method="bounded", options={"xatol": xtol}
        )
        kmin, rmin = float(res.x), float(res.fun)
        if R[i] < rmin:
            kmin, rmin = float(ks[i]), float(R[i])
        if rmin <= ZERO_R:
            zeros.append(kmin)
        else:
            misses.append((kmin, rmin))
    return ZeroSearch(zeros=sorted(zeros), near_misses=misses)


def min_reflectance(
    stack, coin: Coin, k_range: tuple[float, float] = BAND, points: int = 2000
) -> tuple[float, float]:
    """Global minimum ``(k, R)`` of the reflectance over the band."""
    stack = _as_stack(stack)
    ks = _grid(k_range, points)
    R = reflectance_spectrum(stack, coin, ks).R
    i = int(np.nanargmin(R))
    lo, hi = ks[max(i - 1, 0)], ks[min(i + 1, ks.size - 1)]
    res = minimize_scalar(
        _reflectance_fn(stack, coin), bounds=(lo, hi), method="bounded", options={"xatol": 1e-10}
    )
    if res.fun < R[i]:
        return float(res.x), float(res.fun)
    return float(ks[i]), float(R[i])
