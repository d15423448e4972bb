"""Command-line surface: reproducible runs that write CSV data files.

Commands: evolve, winding, spectrum, phase, circuit, bessel-zeros.
Configuration comes from an INI file ([lattice], [drive], [run], [output])
with CLI flags overriding file values; each run writes its outputs plus a
manifest.json into a directory named by a deterministic run id, and every
data file starts with a ``# run_id=...`` comment.  Exit codes: 0 success,
2 config error, 3 numerical error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import configparser
import dataclasses
import hashlib
import json
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .bessel import bessel_zero
from .circuit import circuit_eigenproblem, export_netlist, synthesize
from .errors import (
    ConfigError,
    DomainError,
    EvolutionOverflowError,
    NumericalError,
    StepSizeError,
    SynthesisError,
)
from .evolve import center_of_mass, integrate
from .lattice import DriveField, LatticeParams
from .phase import scan_phase_diagram
from .propagator import InitialState, rho_single_site
from .spectral import critical_field, obc_spectrum, skin_mode_count, winding_number

_SECTIONS = ("lattice", "drive", "run", "output")


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


class RunConfig:
    """Merged section/key string map with typed accessors."""

    def __init__(self, data: dict[str, dict[str, str]]):
        self.data = {s: dict(kv) for s, kv in data.items()}

    def get(self, section: str, key: str, default=None) -> str | None:
        return self.data.get(section, {}).get(key, default)

    def _typed(self, section, key, default, cast, kind):
        raw = self.get(section, key)
        if raw is None:
            if default is not None:
                return default
            raise ConfigError(f"missing required config value [{section}] {key}")
        try:
            return cast(raw)
        except ValueError as exc:
            raise ConfigError(f"[{section}] {key} = {raw!r} is not a valid {kind}") from exc

    def get_float(self, section, key, default=None) -> float:
        return self._typed(section, key, default, float, "real")

    def get_int(self, section, key, default=None) -> int:
        return self._typed(section, key, default, int, "integer")

    def get_bool(self, section, key, default=None) -> bool:
        def cast(raw: str) -> bool:
            low = raw.strip().lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)

        return self._typed(section, key, default, cast, "boolean")

    def get_floats(self, section, key, default=None) -> list[float]:
        raw = self.get(section, key)
        if raw is None:
            if default is not None:
                return default
            raise ConfigError(f"missing required config value [{section}] {key}")
        try:
            return [float(tok) for tok in raw.replace(",", " ").split()]
        except ValueError as exc:
            raise ConfigError(f"[{section}] {key} = {raw!r} is not a list of reals") from exc

    def get_ints(self, section, key, default=None) -> list[int]:
        raw = self.get(section, key)
        if raw is None:
            if default is not None:
                return default
            raise ConfigError(f"missing required config value [{section}] {key}")
        try:
            return [int(tok) for tok in raw.replace(",", " ").split()]
        except ValueError as exc:
            raise ConfigError(f"[{section}] {key} = {raw!r} is not a list of integers") from exc

    def canonical(self, command: str) -> str:
        lines = [f"command={command}"]
        for section in sorted(self.data):
            for key in sorted(self.data[section]):
                lines.append(f"{section}.{key}={self.data[section][key]}")
        return "\n".join(lines)


def load_config(args: argparse.Namespace) -> RunConfig:
    data: dict[str, dict[str, str]] = {s: {} for s in _SECTIONS}
    if args.config:
        parser = configparser.ConfigParser()
        read = parser.read(args.config)
        if not read:
            raise ConfigError(f"config file not found: {args.config}")
        for section in parser.sections():
            if section not in _SECTIONS:
                raise ConfigError(f"unknown config section [{section}]")
            data[section].update(parser[section])
    for spec in args.set or []:
        if "=" not in spec or "." not in spec.split("=", 1)[0]:
            raise ConfigError(f"--set expects section.key=value, got {spec!r}")
        target, value = spec.split("=", 1)
        section, key = target.split(".", 1)
        if section not in _SECTIONS:
            raise ConfigError(f"unknown config section [{section}]")
        data[section][key.strip()] = value.strip()
    if args.threads is not None:
        data["run"]["threads"] = str(args.threads)
    if args.seed is not None:
        data["run"]["seed"] = str(args.seed)
    return RunConfig(data)


def _lattice_from(cfg: RunConfig, default_length: int | None = None) -> LatticeParams:
    length = cfg.get_int("lattice", "length", default_length)
    spacing = cfg.get_float("lattice", "site_spacing", 1.0)
    if cfg.get("lattice", "hop_left") is not None or cfg.get("lattice", "hop_right") is not None:
        return LatticeParams(
            length,
            cfg.get_float("lattice", "hop_left"),
            cfg.get_float("lattice", "hop_right"),
            spacing,
        )
    j = cfg.get_float("lattice", "j", 1.0)
    gamma = cfg.get_float("lattice", "gamma", 0.0)
    try:
        return LatticeParams.from_asymmetry(length, j, gamma, spacing)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _drive_from(cfg: RunConfig) -> DriveField:
    try:
        return DriveField(
            dc=cfg.get_float("drive", "e0", 0.0),
            ac=cfg.get_float("drive", "e1", 0.0),
            omega=cfg.get_float("drive", "omega", 0.0),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


class RunWriter:
    """Creates the run directory, collects output files, writes the manifest."""

    def __init__(self, command: str, cfg: RunConfig, out_root: str):
        self.command = command
        self.cfg = cfg
        digest = hashlib.sha256(
            (cfg.canonical(command) + f"\nversion={__version__}").encode()
        ).hexdigest()
        self.run_id = digest[:12]
        self.directory = Path(out_root) / self.run_id
        self.directory.mkdir(parents=True, exist_ok=True)
        self.outputs: list[str] = []
        self.started = time.monotonic()

    def path(self, name: str) -> Path:
        self.outputs.append(name)
        return self.directory / name

    def write_csv(self, name: str, header: list[str], rows) -> Path:
        path = self.path(name)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"# run_id={self.run_id}\n")
            fh.write(",".join(header) + "\n")
            for row in rows:
                fh.write(",".join(_fmt(v) for v in row) + "\n")
        return path

    def write_text(self, name: str, text: str) -> Path:
        path = self.path(name)
        path.write_text(f"# run_id={self.run_id}\n" + text, encoding="utf-8")
        return path

    def finish(self) -> Path:
        manifest = {
            "command": self.command,
            "run_id": self.run_id,
            "version": __version__,
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "duration_s": round(time.monotonic() - self.started, 3),
            "config": self.cfg.data,
            "outputs": self.outputs,
        }
        path = self.directory / "manifest.json"
        path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
        return path


def _pool_size(cfg: RunConfig) -> int:
    import os

    return cfg.get_int("run", "threads", os.cpu_count() or 1)


def cmd_evolve(cfg: RunConfig, writer: RunWriter) -> None:
    p = _lattice_from(cfg)
    d = _drive_from(cfg)
    n0 = cfg.get_int("run", "initial_site", (p.length + 1) // 2)
    t_end = cfg.get_float("run", "t_end")
    method = cfg.get("run", "method", "rk4")
    if method not in ("analytic", "rk4", "both"):
        raise ConfigError(f"method must be analytic, rk4 or both, got {method!r}")
    dt = cfg.get_float("run", "dt", 0.0) or None
    renorm = cfg.get_bool("run", "renormalize", True)
    try:
        psi0 = InitialState.single_site(n0)
        if method in ("rk4", "both"):
            res = integrate(p, d, psi0, t_end, dt, renormalize=renorm)
            times = res.times
            rho_num = res.probabilities(normalize=True)
        else:
            n_slices = cfg.get_int("run", "slices", 201)
            times = np.linspace(0.0, t_end, n_slices)
            rho_num = None
        if method in ("analytic", "both"):
            rho_ana = np.empty((times.size, p.length))
            for i, t in enumerate(times):
                row = rho_single_site(p, d, n0, float(t), sites=p.sites)
                rho_ana[i] = [row[m] for m in p.sites]
            rho_ana = rho_ana / rho_ana.sum(axis=1, keepdims=True)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    rho_main = rho_num if rho_num is not None else rho_ana
    rows = (
        (float(t), int(m), float(rho_main[i, m - 1]))
        for i, t in enumerate(times)
        for m in p.sites
    )
    writer.write_csv("evolution.csv", ["t", "site", "rho"], rows)
    if method == "both":
        diff_rows = (
            (float(t), float(np.max(np.abs(rho_num[i] - rho_ana[i]))))
            for i, t in enumerate(times)
        )
        writer.write_csv("evolution_diff.csv", ["t", "max_abs_diff"], diff_rows)


def cmd_winding(cfg: RunConfig, writer: RunWriter) -> None:
    gammas = cfg.get_floats("run", "gammas", []) or [cfg.get_float("lattice", "gamma")]
    e0s = cfg.get_floats("run", "e0_values")
    lengths = cfg.get_ints("run", "lengths", []) or [cfg.get_int("lattice", "length")]
    j = cfg.get_float("lattice", "j", 1.0)
    n_phi = cfg.get_int("run", "n_phi", 64)
    grid = [(g, e0, ell) for g in gammas for e0 in e0s for ell in lengths]

    def one(item):
        g, e0, ell = item
        p = LatticeParams.from_asymmetry(ell, j, g)
        return winding_number(p, e0, n_phi=n_phi)

    with ThreadPoolExecutor(max_workers=_pool_size(cfg)) as pool:
        values = list(pool.map(one, grid))
    rows = [
        (g, e0, ell, w) for (g, e0, ell), w in zip(grid, values)
    ]
    writer.write_csv("winding.csv", ["gamma", "E0", "L", "w"], rows)
    bracket = cfg.get_floats("run", "critical_bracket", [])
    if bracket:
        if len(bracket) != 2:
            raise ConfigError("critical_bracket needs exactly two values")
        crit_rows = []
        for ell in lengths:
            for g in gammas:
                e0c = critical_field(g, ell, (bracket[0], bracket[1]), j=j, n_phi=n_phi)
                crit_rows.append((ell, e0c))
        writer.write_csv("critical.csv", ["L", "E0c"], crit_rows)


def cmd_spectrum(cfg: RunConfig, writer: RunWriter) -> None:
    p = _lattice_from(cfg)
    e0 = cfg.get_float("drive", "e0", 0.0)
    res = obc_spectrum(p, e0)
    edge_fraction = cfg.get_float("run", "edge_fraction", 0.1)
    threshold = cfg.get_float("run", "weight_threshold", 0.5)
    prob = np.abs(res.right_eigenvectors) ** 2
    prob = prob / prob.sum(axis=0, keepdims=True)
    edge = max(int(math.ceil(edge_fraction * p.length)), 2)
    if p.hop_right >= p.hop_left:
        weights = prob[p.length - edge :, :].sum(axis=0)
    else:
        weights = prob[:edge, :].sum(axis=0)
    rows = [
        (i, float(ev.real), float(ev.imag), int(weights[i] > threshold))
        for i, ev in enumerate(res.eigenvalues)
    ]
    writer.write_csv("spectrum.csv", ["idx", "re_E", "im_E", "skin_flag"], rows)
    state_rows = (
        (i, int(m), float(prob[m - 1, i]))
        for i in range(p.length)
        for m in p.sites
    )
    writer.write_csv("states.csv", ["idx", "site", "prob"], state_rows)


def cmd_phase(cfg: RunConfig, writer: RunWriter) -> None:
    p = _lattice_from(cfg, default_length=160)
    e0_ratios = cfg.get_floats("run", "e0_over_omega")
    e1_ratios = cfg.get_floats("run", "e1_over_omega")
    omega = cfg.get_float("drive", "omega", 0.46)
    mode = cfg.get("run", "mode", "formula")
    modes = ("formula", "dynamics") if mode == "both" else (mode,)
    rows = []
    for m in modes:
        points = scan_phase_diagram(
            e0_ratios,
            e1_ratios,
            p,
            m,
            omega=omega,
            n_periods=cfg.get_int("run", "n_periods", 50),
            drift_loc=cfg.get_float("run", "drift_loc", 3.0),
            drift_skin=cfg.get_float("run", "drift_skin", 10.0),
        )
        rows.extend(
            (pt.e0_over_omega, pt.e1_over_omega, pt.verdict.value, pt.mode)
            for pt in points
        )
    writer.write_csv("phase.csv", ["e0_over_w", "e1_over_w", "verdict", "mode"], rows)


def cmd_circuit(cfg: RunConfig, writer: RunWriter) -> None:
    n_nodes = cfg.get_int("run", "nodes", 0) or cfg.get_int("lattice", "length")
    gain = cfg.get_float("run", "gain")
    e0 = cfg.get_float("drive", "e0", 0.0)
    delta = cfg.get_float("run", "delta")
    l_base = cfg.get_float("run", "l_base", 1.0)
    c_base = cfg.get_float("run", "c_base", 1.0)
    net = synthesize(n_nodes, gain, e0, delta, l_base=l_base, c_base=c_base)
    net = dataclasses.replace(net, comments=(f"# run_id={writer.run_id}",))
    export_netlist(net, writer.path("netlist.txt"))
    spec = circuit_eigenproblem(net)
    rows = [
        (i, float(ev.real), float(ev.imag), float(spec.frequencies[i]))
        for i, ev in enumerate(spec.eigenvalues)
    ]
    writer.write_csv("circuit_spectrum.csv", ["idx", "re_E", "im_E", "omega_R"], rows)
    lattice = obc_spectrum(LatticeParams(n_nodes, 1.0, gain), e0)
    gap = float(np.max(np.abs(spec.eigenvalues - lattice.eigenvalues)))
    verdict = "PASS" if gap <= 1e-10 else "FAIL"
    writer.write_text(
        "equivalence.txt",
        f"max |lambda_circuit - lambda_lattice| = {gap!r}\n"
        f"tolerance = 1e-10\nresult = {verdict}\n",
    )
    if verdict == "FAIL":
        raise NumericalError(f"circuit/lattice spectra differ by {gap:g}")


def cmd_bessel_zeros(cfg: RunConfig, writer: RunWriter) -> None:
    nu_max = cfg.get_int("run", "nu_max", 0)
    count = cfg.get_int("run", "count", 10)
    rows = [
        (nu, k, bessel_zero(nu, k))
        for nu in range(nu_max + 1)
        for k in range(1, count + 1)
    ]
    writer.write_csv("bessel_zeros.csv", ["nu", "k", "x"], rows)


_COMMANDS = {
    "evolve": cmd_evolve,
    "winding": cmd_winding,
    "spectrum": cmd_spectrum,
    "phase": cmd_phase,
    "circuit": cmd_circuit,
    "bessel-zeros": cmd_bessel_zeros,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nhse",
        description="Electric-field control of the non-Hermitian skin effect",
    )
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--config", help="INI config file")
    parser.add_argument("--out", default="runs", help="parent directory for run outputs")
    parser.add_argument("--threads", type=int, default=None, help="worker pool size")
    parser.add_argument(
        "--seed", type=int, default=None, help="reserved; all algorithms deterministic"
    )
    parser.add_argument(
        "--set",
        action="append",
        metavar="SECTION.KEY=VALUE",
        help="override a config value (repeatable)",
    )
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args)
        writer = RunWriter(args.command, cfg, args.out)
        _COMMANDS[args.command](cfg, writer)
        manifest = writer.finish()
        print(f"run {writer.run_id} complete: {manifest.parent}")
        return 0
    except (ConfigError, DomainError, SynthesisError, StepSizeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (NumericalError, EvolutionOverflowError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
