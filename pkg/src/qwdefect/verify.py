"""Quick invariant suite behind ``qwdefect verify``.

Every check compares two independent routes to the same quantity: closed
forms against the transfer matrix, and both against lattice evolution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bound import bound_branches, bound_state_profile
from .errors import QWalkError
from .lattice import WavePacketSpec, eigencheck, scatter_experiment
from .scattering import Defect, scatter_single, zero_reflectance_phase
from .transfer import (
    DefectStack,
    find_reflectance_zeros,
    lambda_matrix,
    min_reflectance,
    stack_scatter,
)
from .wavecore import Coin


@dataclass
class Check:
    name: str
    passed: bool
    value: float
    tolerance: float
    detail: str = ""


def _random_triples(rng, n):
    theta = rng.uniform(0.05, np.pi / 2 - 0.05, n)
    k = rng.uniform(np.pi / 2 + 0.05, 3 * np.pi / 2 - 0.05, n)
    phi = rng.uniform(-np.pi, np.pi, n)
    return theta, k, phi


def check_unitarity(rng, n=1000) -> Check:
    worst = 0.0
    for th, k, phi in zip(*_random_triples(rng, n)):
        a = scatter_single(k, Coin(th), phi)
        worst = max(worst, abs(a.R + a.T - 1.0))
    return Check("unitarity", worst <= 1e-10, worst, 1e-10)


def check_zero_reflectance(rng, n=200) -> Check:
    worst = 0.0
    theta, k, _ = _random_triples(rng, n)
    for th, kk in zip(theta, k):
        coin = Coin(th)
        a = scatter_single(kk, coin, zero_reflectance_phase(kk, coin))
        worst = max(worst, abs(a.r), abs(a.t - np.exp(-2j * kk)))
    return Check("zero_reflectance_law", worst <= 1e-10, worst, 1e-10)


def check_transfer_matrix(rng, n=200) -> Check:
    worst = 0.0
    for th, k, phi in zip(*_random_triples(rng, n)):
        coin = Coin(th)
        worst = max(
            worst, float(np.max(np.abs(lambda_matrix(Defect(0, 0.0), k, coin) - np.eye(2))))
        )
        a = scatter_single(k, coin, phi)
        b = stack_scatter(DefectStack.of([(0, phi)]), k, coin)
        worst = max(worst, abs(a.r - b.r), abs(a.t - b.t))
    return Check("transfer_matrix_vs_closed_form", worst <= 1e-10, worst, 1e-10)


def check_critical_phase() -> Check:
    coin = Coin.hadamard()
    below = find_reflectance_zeros(DefectStack.of([(0, 0.3 * np.pi)]), coin).zeros
    _, r_above = min_reflectance(DefectStack.of([(0, 0.6 * np.pi)]), coin)
    ok = bool(below) and r_above > 1e-6
    return Check(
        "critical_phase",
        ok,
        r_above,
        1e-6,
        f"zeros below: {len(below)}, min R above: {r_above:.6g}",
    )


def check_bound_states() -> Check:
    coin = Coin.hadamard()
    worst_mod = 0.0
    worst_eig = 0.0
    for br in bound_branches(coin, np.pi):
        worst_mod = max(worst_mod, abs(br.modulus - 5**-0.5))
        prof = bound_state_profile(br, coin, np.pi, 40)
        res, _ = eigencheck(prof, coin, [Defect(0, np.pi)])
        worst_eig = max(worst_eig, res, br.residual)
    worst = max(worst_mod, worst_eig)
    return Check(
        "bound_states",
        worst <= 1e-9,
        worst,
        1e-9,
        f"modulus {worst_mod:.3g}, eigencheck {worst_eig:.3g}",
    )


def check_oracle() -> Check:
    coin = Coin.hadamard()
    k0 = 0.75 * np.pi
    res = scatter_experiment(WavePacketSpec(k0, 0.02), coin, [Defect(0, np.pi / 2)])
    R = scatter_single(k0, coin, np.pi / 2).R
    diff = abs(res.R_sim - R)
    return Check("lattice_oracle", diff <= 2e-2, diff, 2e-2, f"R_sim {res.R_sim:.6g}, R {R:.6g}")


def run_checks(seed: int = 0) -> list[Check]:
    rng = np.random.default_rng(seed)
    suite = [
        lambda: check_unitarity(rng),
        lambda: check_zero_reflectance(rng),
        lambda: check_transfer_matrix(rng),
        check_critical_phase,
        check_bound_states,
        check_oracle,
    ]
    out = []
    for fn in suite:
        try:
            out.append(fn())
        except QWalkError as e:
            out.append(Check(getattr(fn, "__name__", "check"), False, float("nan"), 0.0, str(e)))
    return out
