"""Batch front end: one TOML or JSON job file per run.

    hardpulse --config job.toml --out results/ [--grid N] [--seed S] [--quiet]

A job names a command (design, invert, simulate, analyze, roundtrip), a method
where relevant, a [params] table and optional [io] paths.  Every run writes
diagnostics.json; pulse-producing runs also write pulse.json, pulse.csv and
profile.csv.  Exit status: 0 ok, 2 bad configuration, 3 numerical failure.
"""

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import design, dist, finite_rephasing as frt
from .errors import NotUnitary, PulseError
from .forward import (ReducedScatteringData, energy_terms, find_bound_states, forward_scatter,
                      profile_of_pulse, reduced_data, unitarity_error)
from .io import dump_json, emit_plot_data, load_json
from .pulse import HardPulse, bloch_simulate, grid_freqs, hard_energy, hard_simulate, soften
from .spectral import CircleGrid, unsample

log = logging.getLogger("hardpulse")

COMMANDS = ("design", "invert", "simulate", "analyze", "roundtrip")
METHODS = ("equiripple", "selfrefocused", "halfpulse", "slr", "frt", "dist")


class ConfigError(Exception):
    pass


@dataclass
class JobConfig:
    command: str
    method: str = None
    params: dict = field(default_factory=dict)
    io: dict = field(default_factory=dict)
    grid: int = 4096
    seed: int = 0
    delta: float = 1.0

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}; expected one of {COMMANDS}")
        if self.method is not None and self.method not in METHODS:
            raise ConfigError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if self.command in ("design", "invert") and self.method is None:
            raise ConfigError(f"command {self.command!r} needs a method")
        g = int(self.grid)
        if g <= 0 or g & (g - 1):
            raise ConfigError(f"grid size must be a power of two, got {self.grid}")
        if self.delta <= 0:
            raise ConfigError("delta must be positive")

    def need(self, *keys):
        missing = [k for k in keys if k not in self.params]
        if missing:
            raise ConfigError(f"{self.command}/{self.method} is missing parameters: {missing}")
        return [self.params[k] for k in keys]


def load_config(path, overrides=None):
    path = Path(path)
    try:
        if path.suffix == ".json":
            raw = json.loads(path.read_text())
        else:
            raw = tomllib.loads(path.read_text())
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    raw = dict(raw)
    for k, v in (overrides or {}).items():
        if v is not None:
            raw[k] = v
    if "command" not in raw:
        raise ConfigError("the job file must set 'command'")
    known = {"command", "method", "params", "io", "grid", "seed", "delta"}
    extra = set(raw) - known
    if extra:
        raise ConfigError(f"unknown top-level keys: {sorted(extra)}")
    try:
        return JobConfig(**raw)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def _complex_list(x):
    return np.array([complex(*v) if isinstance(v, (list, tuple)) else complex(v) for v in x])


def _resolve(cfg, base, key):
    p = cfg.io.get(key)
    if p is None:
        return None
    p = Path(p)
    return p if p.is_absolute() else base / p


# ---------------------------------------------------------------- job bodies

def _invert_reduced(cfg, data):
    res = dist.dist_invert_full(data, cfg.params.get("M_plus"), cfg.params.get("M_minus"),
                                delta=cfg.delta, n=cfg.grid)
    return res.pulse, dict(res.diagnostics)


def _design(cfg):
    m, p = cfg.method, cfg.params
    report = {}
    if m == "equiripple":
        if "rho_c" in p:
            setup = design.DeskSetup(*cfg.need("rho_c", "tau_c", "delta2_trans"),
                                     delta=cfg.delta, flip=np.deg2rad(p.get("flip_deg", 90.0)))
            spec = setup.equiripple_spec()
        else:
            rho, tau, band = cfg.need("rho", "tau", "band")
            d2 = p.get("delta2")
            if "delta2_trans" in p:
                d2 = float(design.delta2_ist_for_trans(p["delta2_trans"]))
            spec = design.EquirippleSpec(int(rho), float(tau), tuple(band), p.get("delta1"), d2,
                                         np.deg2rad(p.get("flip_deg", 90.0)))
        res = design.equiripple_r(spec)
        report = res.report()
        report["achieved_delta2_trans"] = float(design.delta2_trans(res.achieved_delta2))
        report["rho"] = spec.rho
        pulse, diag = _invert_reduced(cfg, ReducedScatteringData(res.r, ()))
    elif m == "selfrefocused":
        k1, k2, tau, band = cfg.need("k1", "k2", "tau", "band")
        sr = design.self_refocused_r(k1, k2, tau, tuple(band), cfg.grid, p.get("constant", "offband"))
        report = {"poles": [complex(x) for x in sr.poles], "constant": sr.constant,
                  "winding": {str(k): v for k, v in sr.winding.items()}}
        pulse, diag = _invert_reduced(cfg, sr.reduced_data())
    elif m == "halfpulse":
        mx, tau, band = cfg.need("mx", "tau", "band")
        th = CircleGrid(cfg.grid, np.zeros(cfg.grid)).thetas
        ramp = design.raised_cosine_log_modulus(th, 1.0, 0.0, tau, tuple(band))
        hp = design.half_pulse_r(mx * ramp)
        pulse, diag = _invert_reduced(cfg, ReducedScatteringData(unsample(hp.r), ()))
    elif m == "slr":
        if "rho_c" in p:
            setup = design.DeskSetup(*cfg.need("rho_c", "tau_c", "delta2_trans"), delta=cfg.delta,
                                     flip=np.deg2rad(p.get("flip_deg", 90.0)))
            T, band, tau, d1, d2 = 2 * setup.N, setup.band, setup.tau, None, setup.slr_delta2()
            flip = setup.flip
        else:
            T, band, tau = cfg.need("T", "band", "tau")
            d1, d2, flip = p.get("delta1"), p.get("delta2"), np.deg2rad(p.get("flip_deg", 90.0))
            if "delta2_trans" in p:
                d2 = float(design.delta2_slr_for_trans(p["delta2_trans"]))
        sd = frt.slr_design_B(np.cos(flip), int(T), tuple(band), tau, d1, d2)
        pair = sd.pair(p.get("rho"))
        report = {"achieved_delta1": sd.achieved_delta1, "achieved_delta2": sd.achieved_delta2,
                  "alternations": sd.alternations, "T": int(T)}
        pulse = frt.slr_invert(pair, delta=cfg.delta)
        diag = {"unitarity_pair": pair.unitarity_error()}
    elif m == "frt":
        P, Q = cfg.need("P", "Q")
        rr = frt.RationalR(_complex_list(P), _complex_list(Q), int(p.get("rho", 0)))
        pulse, info = frt.frt_invert(rr, p.get("j_min"), delta=cfg.delta, return_info=True)
        diag = {"tail_estimate": info.tail_estimate, "steps": info.steps,
                "roundtrip_error": dist.roundtrip_error(pulse, rr.reduced_data(cfg.grid), cfg.grid)}
    else:
        raise ConfigError(f"method {m!r} does not design pulses; use the invert command")
    return pulse, diag, report


def _reduced_from_input(cfg, base):
    path = _resolve(cfg, base, "input")
    if path is not None:
        d = load_json(path)
    elif "data" in cfg.params:
        d = cfg.params["data"]
    else:
        d = {"r": {"offset": 0, "coeffs": []}, "bound_states": []}
    try:
        return ReducedScatteringData.from_json(d)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"malformed reduced scattering data: {exc}") from exc


def _invert(cfg, base):
    m = cfg.method
    if m == "dist":
        data = _reduced_from_input(cfg, base)
        pulse, diag = _invert_reduced(cfg, data)
        return pulse, diag, {}
    path = _resolve(cfg, base, "input")
    d = load_json(path) if path is not None else cfg.params
    if m == "frt":
        rr = frt.RationalR(_complex_list(d["P"]), _complex_list(d["Q"]), int(d.get("rho", 0)))
        pulse, info = frt.frt_invert(rr, cfg.params.get("j_min"), delta=cfg.delta, return_info=True)
        diag = {"tail_estimate": info.tail_estimate, "steps": info.steps,
                "roundtrip_error": dist.roundtrip_error(pulse, rr.reduced_data(cfg.grid), cfg.grid)}
        return pulse, diag, {}
    if m == "slr":
        pair = frt.SlrPair(_complex_list(d["A"]), _complex_list(d["B"]), int(d.get("rho", 0)))
        pulse = frt.slr_invert(pair, delta=cfg.delta)
        return pulse, {"unitarity_pair": pair.unitarity_error()}, {}
    raise ConfigError(f"method {m!r} cannot invert data; use dist, frt or slr")


def _load_pulse(cfg, base):
    path = _resolve(cfg, base, "pulse") or _resolve(cfg, base, "input")
    if path is None:
        if "pulse" in cfg.params:
            return HardPulse.from_json(cfg.params["pulse"])
        raise ConfigError("this command needs io.pulse (a pulse JSON file)")
    try:
        return HardPulse.from_json(load_json(path))
    except (OSError, KeyError, ValueError) as exc:
        raise ConfigError(f"cannot read pulse from {path}: {exc}") from exc


def _freqs(cfg, delta):
    p = cfg.params
    if "z_min" in p or "z_max" in p:
        return np.linspace(p.get("z_min", -np.pi / delta), p.get("z_max", np.pi / delta),
                           int(p.get("n_z", 512)))
    return np.sort(grid_freqs(min(cfg.grid, 1024), delta))


def _random_pulse(rng, length, amp, delta):
    om = amp * (rng.normal(size=length) + 1j * rng.normal(size=length)) / np.sqrt(2)
    return HardPulse(delta, -(length // 2), om)


def run(cfg, out, base=Path("."), quiet=False):
    """Execute one job, writing files into out.  Returns the diagnostics dict."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    diag = {"command": cfg.command, "method": cfg.method, "grid": cfg.grid, "seed": cfg.seed}
    pulse = None
    profile = None
    if cfg.command == "design":
        pulse, d, report = _design(cfg)
        diag.update(d)
        diag["design"] = report
    elif cfg.command == "invert":
        pulse, d, report = _invert(cfg, base)
        diag.update(d)
    elif cfg.command == "simulate":
        pulse = _load_pulse(cfg, base)
        zs = _freqs(cfg, pulse.delta)
        profile = hard_simulate(pulse, zs)
        if cfg.params.get("soft", False):
            soft, drift = bloch_simulate(soften(pulse), zs, return_drift=True)
            diag["soft_vs_hard_max"] = float(np.max(np.abs(soft.vecs - profile.vecs)))
            diag["rk4_norm_drift"] = drift
    elif cfg.command == "analyze":
        pulse = _load_pulse(cfg, base)
        data = forward_scatter(pulse)
        bs = find_bound_states(pulse)
        lhs, rhs = energy_terms(pulse, data)
        dump_json({**data.to_json(), "bound_states": [
            {"w": b.w, "c_prime": b.c_prime} for b in bs]}, out / "scattering.json")
        dump_json(reduced_data(pulse, cfg.grid).to_json(), out / "reduced.json")
        diag.update({"energy_lhs": lhs, "energy_rhs": rhs, "energy_residual": abs(lhs - rhs),
                     "bound_states": len(bs), "a0": float(data.a.coef(0).real),
                     "max_amplitude": float(np.max(np.abs(pulse.omegas)) / pulse.delta)
                     if len(pulse) else 0.0})
    elif cfg.command == "roundtrip":
        rng = np.random.default_rng(cfg.seed)
        src = _random_pulse(rng, int(cfg.params.get("length", 32)),
                            float(cfg.params.get("amplitude", 0.4)), cfg.delta)
        data = reduced_data(src, cfg.grid)
        pulse, d = _invert_reduced(cfg, data)
        diag.update(d)
        diag["bound_states"] = len(data.bound_states)
        diag["pulse_error"] = float(max(abs(pulse.omega(j) - src.omega(j))
                                        for j in range(min(pulse.start, src.start),
                                                       max(pulse.stop, src.stop))))
    if pulse is not None:
        if cfg.command != "simulate":
            err = unitarity_error(forward_scatter(pulse), cfg.grid) if len(pulse) else 0.0
            diag["unitarity_error"] = err
            if err > 1e-10:
                raise NotUnitary(f"refusing to write a pulse with unitarity error {err:.2e}")
            dump_json(pulse.to_json(), out / "pulse.json")
        if profile is None:
            profile = profile_of_pulse(pulse, _freqs(cfg, pulse.delta))
        diag["energy"] = hard_energy(pulse)
        diag["n_impulses"] = len(pulse)
        emit_plot_data(pulse, profile, out)
    dump_json(diag, out / "diagnostics.json")
    if not quiet:
        print(json.dumps({k: diag[k] for k in sorted(diag) if not isinstance(diag[k], dict)}))
    return diag


def _fail(out, code, exc):
    payload = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    if getattr(exc, "j", None) is not None:
        payload["j"] = exc.j
    print(json.dumps(payload), file=sys.stderr)
    if out is not None:
        try:
            Path(out).mkdir(parents=True, exist_ok=True)
            dump_json(payload, Path(out) / "error.json")
        except OSError:
            pass
    return code


def main(argv=None):
    ap = argparse.ArgumentParser(prog="hardpulse", description=__doc__.split("\n\n")[0])
    ap.add_argument("command", nargs="?", choices=COMMANDS, help="overrides the job file's command")
    ap.add_argument("--config", required=True, help="job file (.toml or .json)")
    ap.add_argument("--out", default="out", help="output directory")
    ap.add_argument("--grid", type=int, help="grid size (power of two)")
    ap.add_argument("--seed", type=int, help="random seed")
    ap.add_argument("--quiet", action="store_true", help="no stdout summary")
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config, {"grid": args.grid, "seed": args.seed,
                                        "command": args.command})
        run(cfg, args.out, Path(args.config).resolve().parent, args.quiet)
    except ConfigError as exc:
        return _fail(args.out, 2, exc)
    except (PulseError, np.linalg.LinAlgError, FloatingPointError) as exc:
        return _fail(args.out, 3, exc)
    return 0


if __name__ == "__main__":
    sys.exit(main())
