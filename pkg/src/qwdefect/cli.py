"""Command-line entry point: ``qwdefect <command> --config run.json``.

Data files are deterministic: fixed float formatting, LF line endings, no
timestamps. Wall-clock runtime goes to a ``<out>.meta.json`` sidecar.

Exit codes: 0 success, 2 config error, 3 numerical-domain error, 4 verify
failure.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .bound import bound_branches, bound_state_profile, in_existence_window, transition_sweep
from .config import RunConfig, load_config
from .errors import ConfigError, QWalkError
from .lattice import WavePacketSpec, eigencheck, scatter_experiment
from .scattering import Defect, critical_phase, reduce_phase
from .transfer import DefectStack, min_reflectance, reflectance_spectrum, stack_scatter
from .verify import run_checks
from .wavecore import Coin

EXIT_OK, EXIT_CONFIG, EXIT_DOMAIN, EXIT_VERIFY = 0, 2, 3, 4


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (complex, np.complexfloating)):
        return {"re": _jsonable(x.real), "im": _jsonable(x.imag)}
    if isinstance(x, (float, np.floating)):
        return None if not math.isfinite(x) else float(x)
    return x


class Table:
    def __init__(self, columns, rows):
        self.columns = list(columns)
        self.rows = [list(r) for r in rows]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(",".join(self.columns) + "\n")
        for row in self.rows:
            buf.write(",".join(_fmt(v) for v in row) + "\n")
        return buf.getvalue()

    def to_json(self) -> dict:
        return {"columns": self.columns, "rows": self.rows}


def _stack(cfg: RunConfig, phase: float | None = None) -> DefectStack:
    """Defects from the config; ``phase`` overrides every defect's phase."""
    if cfg.defects is not None:
        stack = cfg.defects
    elif cfg.phase is not None or phase is not None:
        stack = DefectStack.of([(0, cfg.phase or 0.0)])
    else:
        raise ConfigError("defects", "need a defect list (may be empty) or a phase", "E_DEFECTS")
    if phase is not None:
        stack = DefectStack.of([(d.position, phase) for d in stack])
    return stack


def _single_phase(cfg: RunConfig) -> float:
    if cfg.phase is not None:
        return cfg.phase
    if cfg.defects is not None and len(cfg.defects) == 1:
        return cfg.defects.defects[0].phase
    raise ConfigError("phase", "needs a phase or exactly one defect", "E_PHASE")


def _pmap(fn, items, threads):
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


def cmd_spectrum(cfg: RunConfig, threads: int = 1) -> Table:
    coin = cfg.coin
    ks = cfg.k_points()
    if cfg.phases is None:
        sp = reflectance_spectrum(_stack(cfg), coin, ks)
        return Table(["k", "E", "R", "T", "flags"], sp.rows())

    def one(phi):
        return [(phi, *row) for row in reflectance_spectrum(_stack(cfg, phi), coin, ks).rows()]

    rows = [r for block in _pmap(one, list(cfg.phases), threads) for r in block]
    return Table(["phi", "k", "E", "R", "T", "flags"], rows)


def _bound_window(modulus: float) -> int:
    return max(40, int(math.ceil(25.0 / abs(math.log(modulus)))))


def cmd_bound(cfg: RunConfig) -> dict:
    coin = cfg.coin
    phi = reduce_phase(_single_phase(cfg))
    rows = []
    for br in bound_branches(coin, phi):
        row = {
            "branch": br.label,
            "m": br.m,
            "sign": br.sign,
            "decay_factor": br.decay_factor,
            "modulus": br.modulus,
            "exists": br.normalizable,
            "in_existence_window": in_existence_window(coin, phi, br.m),
            "energy": br.energy,
            "in_studied_branch": br.in_studied_branch,
            "matching_residual": br.residual,
            "eigencheck_residual": None,
            "eigencheck_energy": None,
        }
        if br.normalizable:
            prof = bound_state_profile(br, coin, phi, _bound_window(br.modulus))
            res, lam = eigencheck(prof, coin, [Defect(0, phi)])
            row["eigencheck_residual"] = res
            row["eigencheck_energy"] = float(-np.angle(lam))
        rows.append(row)
    return {"theta": cfg.theta, "phi": phi, "phi_critical": critical_phase(coin), "branches": rows}


def cmd_simulate(cfg: RunConfig) -> dict:
    if cfg.simulation is None:
        raise ConfigError("simulation", "required for simulate", "E_SIM")
    sim = cfg.simulation
    coin = cfg.coin
    stack = _stack(cfg)
    spec = WavePacketSpec(sim.k0, sim.sigma_k, sim.n0)
    res = scatter_experiment(spec, coin, list(stack), sim.steps, sim.window)
    direction = spec.direction(coin)
    if len(stack):
        R = stack_scatter(stack, sim.k0, coin, direction).R
    else:
        R = 0.0
    return {
        "theta": cfg.theta,
        "defects": [[d.position, d.phase] for d in stack],
        "k0": sim.k0,
        "sigma_k": sim.sigma_k,
        "direction": direction.value,
        "R_sim": res.R_sim,
        "T_sim": res.T_sim,
        "R_closed": R,
        "abs_diff": abs(res.R_sim - R),
        "residual": res.residual,
        "boundary_touched": res.boundary_touched,
        "steps": res.steps,
        "window": res.window,
        "n0": res.n0,
    }


def cmd_sweep(cfg: RunConfig, threads: int = 1) -> Table:
    coin = cfg.coin
    if cfg.phases is not None:
        rows = transition_sweep(coin, sorted(cfg.phases))
        return Table(
            [
                "phi",
                "bound_modulus_m1",
                "bound_modulus_m2",
                "E_bound",
                "zero_reflectance_k",
                "min_R",
            ],
            [
                [r.phi, r.modulus_m1, r.modulus_m2, r.E_bound, r.zero_reflectance_k, r.min_R]
                for r in rows
            ],
        )
    if cfg.thetas is None:
        raise ConfigError("phases", "sweep needs a phases or thetas grid", "E_GRID")
    ks = cfg.k_points()

    def one(theta):
        c = Coin(theta)
        pc = critical_phase(c)
        stack = DefectStack.of([(0, pc)])
        R = reflectance_spectrum(stack, c, ks).R
        _, r_min = min_reflectance(stack, c)
        return [theta, pc, float(np.nanmean(R)), r_min]

    return Table(
        ["theta", "phi_critical", "mean_R", "min_R"], _pmap(one, list(cfg.thetas), threads)
    )


def cmd_verify(seed: int = 0) -> tuple[dict, bool]:
    checks = run_checks(seed)
    report = {
        "checks": [
            {
                "name": c.name,
                "passed": c.passed,
                "value": c.value,
                "tolerance": c.tolerance,
                "detail": c.detail,
            }
            for c in checks
        ]
    }
    report["passed"] = all(c.passed for c in checks)
    return report, report["passed"]


def _render(result, fmt: str) -> str:
    if isinstance(result, Table):
        if fmt == "csv":
            return result.to_csv()
        result = result.to_json()
    elif fmt == "csv":
        raise ConfigError("--format", "this command only writes json", "E_OUTPUT")
    return json.dumps(_jsonable(result), indent=2, allow_nan=False) + "\n"


def _write(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as e:
        raise ConfigError("--out", f"cannot write {out}: {e.strerror}", "E_IO") from e


def _write_meta(out: str, command: str, runtime: float):
    meta = {"command": command, "version": __version__, "runtime_s": runtime}
    Path(out + ".meta.json").write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")


DEFAULT_FORMAT = {
    "spectrum": "csv",
    "sweep": "csv",
    "bound": "json",
    "simulate": "json",
    "verify": "json",
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qwdefect", description="Phase-defect quantum walk toolkit.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    helps = {
        "spectrum": "reflectance and transmittance over a momentum grid",
        "bound": "bound-state branches of a single defect",
        "simulate": "wave-packet experiment on the lattice",
        "sweep": "static scan over defect phase or coin angle",
        "verify": "run the invariant suite",
    }
    for name, text in helps.items():
        sp = sub.add_parser(name, help=text)
        sp.add_argument("--config", required=name != "verify", help="JSON run configuration")
        sp.add_argument("--out", help="output file (default: config output.path, else stdout)")
        sp.add_argument("--format", choices=["csv", "json"])
        sp.add_argument("--threads", type=int, default=1)
        if name == "verify":
            sp.add_argument("--seed", type=int, default=0)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    try:
        if args.threads < 1:
            raise ConfigError("--threads", "must be at least 1", "E_THREADS")
        cfg = load_config(args.config) if args.config else None
        out = args.out or (cfg.output_path if cfg else None)
        fmt = args.format or (cfg.output_format if cfg else None) or DEFAULT_FORMAT[args.command]
        ok = True
        if args.command == "spectrum":
            result = cmd_spectrum(cfg, args.threads)
        elif args.command == "bound":
            result = cmd_bound(cfg)
        elif args.command == "simulate":
            result = cmd_simulate(cfg)
        elif args.command == "sweep":
            result = cmd_sweep(cfg, args.threads)
        else:
            result, ok = cmd_verify(args.seed)
        _write(_render(result, fmt), out)
        if out is not None:
            _write_meta(out, args.command, time.perf_counter() - start)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except QWalkError as e:
        print(f"numerical error ({type(e).__name__}): {e}", file=sys.stderr)
        return EXIT_DOMAIN
    return EXIT_OK if ok else EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
