"""Command-line front end.

Subcommands (all emit CSV, to stdout or to output.path):

    rabi      closed transition probability vs the integrated amplitudes
    coeffs    printed spin-operator coefficients vs the propagator oracle
    kernels   bath kernels nu(t), eta(t) on a time grid
    dfactor   decoherence factor by all four routes
    evolve    density-matrix trajectory under the selected generator terms
    figure1   tau_d/tau sweep over k/lambda for several drive strengths
    crossing  k/lambda where tau_d/tau = 1, one row per curve

Configuration is `section.key = value` lines in a file (# starts a comment)
plus `--section.key value` overrides; flags beat the file, the file beats
the defaults. `spinflop <subcommand> --config run.cfg --bath.temperature_K 77`
is the general shape. Exactly one of system.gamma_rad_per_s or
system.field_gauss must be given; the field form converts through the
gyromagnetic factor. SPINFLOP_THREADS caps the sweep worker pool (0 or
unset uses all cores).

Exit codes: 0 success, 2 configuration error, 3 numerical/domain failure.
"""
from __future__ import annotations

import os
import sys

import numpy as np

from .analysis import (FIGURE1_HEADER, crossing_point, figure1_rows,
                       sweep_figure1)
from .core import BathParams, CothMode, DriveParams, gamma_from_field
from .decoherence import A1Mode, dfactor_table
from .dynamics import TermToggles, evolve_master
from .errors import ConfigError, SpinflopError
from .kernels import _KERNEL_HEADER, QuadratureSettings, kernel_table
from .propagator import consistency_report
from .rabi import SpinState, evolve_tdse, retrieval_period, transition_probability
from ._tables import render_csv

_REQUIRED = object()   # sentinel: key has no default and must be provided


def _float_list(raw: str) -> tuple[float, ...]:
    try:
        vals = tuple(float(p.strip()) for p in raw.split(",") if p.strip())
    except ValueError:
        raise ValueError(f"expected comma-separated numbers, got {raw!r}")
    if not vals:
        raise ValueError(f"expected at least one number, got {raw!r}")
    return vals


def _bool(raw: str) -> bool:
    if raw == "true":
        return True
    if raw == "false":
        return False
    raise ValueError(f"expected true or false, got {raw!r}")


# section.key -> (parser, default); _REQUIRED means the run cannot proceed
# without it, None means "resolved later from other keys"
_SCHEMA = {
    "system.omega0_rad_per_s": (float, _REQUIRED),
    "system.gamma_rad_per_s": (float, None),      # XOR with field_gauss
    "system.field_gauss": (float, None),
    "system.omega_rad_per_s": (float, None),      # defaults to omega0
    "bath.temperature_K": (float, _REQUIRED),
    "bath.cutoff_rad_per_s": (float, _REQUIRED),
    "bath.coth_mode": (str, "high_t"),
    "numerics.quad_rel_tol": (float, 1e-9),
    "numerics.ode_dt_s": (float, 1e-12),
    "numerics.t_final_s": (float, None),          # defaults to 2 tau
    "numerics.epsilon_list": (_float_list, (1e-2, 5e-3, 2.5e-3)),
    "numerics.n_points": (int, 201),
    "numerics.sample_stride": (int, 0),           # 0 = pick from n_points
    "numerics.a1_mode": (str, "series:1"),
    "sweep.omega0_over_gamma_list": (_float_list, (10.0, 100.0, 1000.0)),
    "sweep.k_over_lambda_min": (float, 0.01),
    "sweep.k_over_lambda_max": (float, 10.0),
    "sweep.k_over_lambda_points": (int, 200),
    "evolve.initial": (str, "plus"),
    "evolve.unitary": (_bool, True),
    "evolve.dephasing": (_bool, True),
    "evolve.d1": (_bool, False),
    "evolve.d2": (_bool, False),
    "evolve.lamb_shifts": (_bool, False),
    "output.path": (str, ""),
    "output.precision": (int, 17),
}


def _convert(key: str, raw: str, where: str = ""):
    parser, _ = _SCHEMA[key]
    try:
        return parser(raw)
    except ValueError as exc:
        raise ConfigError(f"{where}bad value for {key}: {exc}") from None


def parse_config_text(text: str, origin: str = "<config>") -> dict:
    """`section.key = value` per line; # comments; unknown keys rejected."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(
                f"{origin}:{lineno}: expected 'section.key = value'")
        key, _, raw = body.partition("=")
        key = key.strip()
        raw = raw.strip()
        if key not in _SCHEMA:
            raise ConfigError(f"{origin}:{lineno}: unknown key {key!r}")
        if not raw:
            raise ConfigError(f"{origin}:{lineno}: empty value for {key!r}")
        values[key] = _convert(key, raw, f"{origin}:{lineno}: ")
    return values


def _parse_argv(args: list[str]) -> tuple[str | None, list[tuple[str, str]]]:
    """Returns (config_path, [(key, raw_value), ...]) in order given."""
    config_path = None
    overrides = []
    i = 0
    while i < len(args):
        tok = args[i]
        if not tok.startswith("--"):
            raise ConfigError(f"unexpected argument {tok!r}")
        name = tok[2:]
        if i + 1 >= len(args):
            raise ConfigError(f"flag {tok} is missing its value")
        val = args[i + 1]
        i += 2
        if name == "config":
            config_path = val
        elif name in _SCHEMA:
            overrides.append((name, val))
        else:
            raise ConfigError(f"unknown flag {tok}")
    return config_path, overrides


class RunConfig:
    """Merged configuration with typed accessors for the handlers."""

    def __init__(self, values: dict, provided: set):
        self.values = values
        self.provided = provided

    def __getitem__(self, key: str):
        val = self.values[key]
        if val is _REQUIRED:
            raise ConfigError(f"missing required key {key}")
        return val

    def drive(self) -> DriveParams:
        has_gamma = "system.gamma_rad_per_s" in self.provided
        has_field = "system.field_gauss" in self.provided
        if has_gamma and has_field:
            raise ConfigError("give system.gamma_rad_per_s or "
                              "system.field_gauss, not both")
        if has_field:
            gamma = gamma_from_field(self["system.field_gauss"])
        elif has_gamma:
            gamma = self["system.gamma_rad_per_s"]
        else:
            raise ConfigError("missing required key system.gamma_rad_per_s "
                              "(or system.field_gauss)")
        omega0 = self["system.omega0_rad_per_s"]
        omega = self["system.omega_rad_per_s"]
        if omega is None:
            omega = omega0     # resonant drive unless told otherwise
        try:
            return DriveParams(omega0=omega0, gamma=gamma, omega=omega)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def bath(self) -> BathParams:
        raw = self["bath.coth_mode"]
        if raw == "high_t":
            mode = CothMode.high_t()
        elif raw == "exact":
            mode = CothMode.exact()
        elif raw.startswith("series:"):
            try:
                mode = CothMode.series(int(raw.split(":", 1)[1]))
            except ValueError as exc:
                raise ConfigError(f"bad bath.coth_mode {raw!r}: {exc}") from None
        else:
            raise ConfigError(
                f"bath.coth_mode must be high_t, exact, or series:N; got {raw!r}")
        try:
            return BathParams(temperature=self["bath.temperature_K"],
                              cutoff=self["bath.cutoff_rad_per_s"],
                              coth_mode=mode)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def settings(self) -> QuadratureSettings:
        return QuadratureSettings(rel_tol=self["numerics.quad_rel_tol"])

    def a1_mode(self) -> A1Mode:
        raw = self["numerics.a1_mode"]
        if raw == "exact":
            return A1Mode.exact()
        if raw.startswith("series:"):
            try:
                return A1Mode.series(int(raw.split(":", 1)[1]))
            except ValueError as exc:
                raise ConfigError(f"bad numerics.a1_mode {raw!r}: {exc}") from None
        raise ConfigError(
            f"numerics.a1_mode must be exact or series:N, got {raw!r}")

    def toggles(self) -> TermToggles:
        return TermToggles(unitary=self["evolve.unitary"],
                           dephasing=self["evolve.dephasing"],
                           d1=self["evolve.d1"],
                           d2=self["evolve.d2"],
                           lamb_shifts=self["evolve.lamb_shifts"])

    def t_final(self, drive: DriveParams) -> float:
        t = self["numerics.t_final_s"]
        if t is None:
            if drive.gamma == 0.0:
                raise ConfigError("numerics.t_final_s is required when "
                                  "gamma = 0 (no retrieval period to scale by)")
            t = 2 * retrieval_period(drive).tau
        if t <= 0:
            raise ConfigError(f"numerics.t_final_s must be positive, got {t}")
        return t

    def time_grid(self, drive: DriveParams) -> np.ndarray:
        n = self["numerics.n_points"]
        if n < 2:
            raise ConfigError(f"numerics.n_points must be >= 2, got {n}")
        return np.linspace(0.0, self.t_final(drive), n)

    def stride_for(self, n_steps: int) -> int:
        stride = self["numerics.sample_stride"]
        if stride < 0:
            raise ConfigError("numerics.sample_stride must be >= 0")
        if stride == 0:
            stride = max(1, n_steps // max(1, self["numerics.n_points"] - 1))
        return stride

    def precision(self) -> int:
        p = self["output.precision"]
        if not 1 <= p <= 17:
            raise ConfigError(f"output.precision must be in 1..17, got {p}")
        return p


def load_config(path: str | None, overrides=()) -> RunConfig:
    """Defaults, then the file at path (if any), then flag overrides."""
    values = {key: default for key, (_, default) in _SCHEMA.items()}
    provided = set()
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from None
        file_values = parse_config_text(text, origin=path)
        values.update(file_values)
        provided.update(file_values)
    for key, raw in overrides:
        values[key] = _convert(key, raw)
        provided.add(key)
    return RunConfig(values, provided)


def _workers() -> int:
    raw = os.environ.get("SPINFLOP_THREADS", "").strip()
    if not raw or raw == "0":
        return os.cpu_count() or 1
    try:
        cap = int(raw)
    except ValueError:
        raise ConfigError(f"SPINFLOP_THREADS must be an integer, got {raw!r}")
    if cap < 0:
        raise ConfigError(f"SPINFLOP_THREADS must be >= 0, got {cap}")
    return cap


def _cmd_rabi(cfg: RunConfig) -> str:
    drive = cfg.drive()
    dt = cfg["numerics.ode_dt_s"]
    t_final = cfg.t_final(drive)
    result = evolve_tdse(drive, SpinState(1.0, 0.0), t_final, dt,
                         sample_stride=cfg.stride_for(int(round(t_final / dt))))
    p_num = result.populations_minus()
    p_closed = transition_probability(drive, result.times)
    rows = ((float(t), float(pc), float(pn), float(abs(pc - pn)))
            for t, pc, pn in zip(result.times, p_closed, p_num))
    return render_csv(("t", "p_closed", "p_tdse", "abs_diff"), rows,
                      cfg.precision())


def _cmd_coeffs(cfg: RunConfig) -> str:
    drive = cfg.drive()
    report = consistency_report(drive, cfg.time_grid(drive))
    return report.to_csv_text(cfg.precision())


def _cmd_kernels(cfg: RunConfig) -> str:
    drive = cfg.drive()
    rows = kernel_table(cfg.bath(), cfg.time_grid(drive))
    return render_csv(_KERNEL_HEADER, rows, cfg.precision())


def _cmd_dfactor(cfg: RunConfig) -> str:
    header, rows = dfactor_table(cfg.drive(), cfg.bath(), cfg.settings(),
                                 cfg.a1_mode(), cfg["numerics.epsilon_list"])
    return render_csv(header, rows, cfg.precision())


_INITIAL_STATES = {
    "plus": np.array([[0.5, 0.5], [0.5, 0.5]], dtype=complex),
    "minus": np.array([[0.5, -0.5], [-0.5, 0.5]], dtype=complex),
    "up": np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex),
    "down": np.array([[0.0, 0.0], [0.0, 1.0]], dtype=complex),
    "mixed": np.array([[0.5, 0.0], [0.0, 0.5]], dtype=complex),
}


def _cmd_evolve(cfg: RunConfig) -> str:
    name = cfg["evolve.initial"]
    if name not in _INITIAL_STATES:
        raise ConfigError(f"evolve.initial must be one of "
                          f"{sorted(_INITIAL_STATES)}, got {name!r}")
    drive = cfg.drive()
    dt = cfg["numerics.ode_dt_s"]
    t_final = cfg.t_final(drive)
    traj = evolve_master(drive, cfg.bath(),
                         rho0=_INITIAL_STATES[name], t_final=t_final, dt=dt,
                         toggles=cfg.toggles(),
                         sample_stride=cfg.stride_for(int(round(t_final / dt))),
                         settings=cfg.settings())
    return traj.to_csv_text(cfg.precision())


def _cmd_figure1(cfg: RunConfig) -> str:
    n = cfg["sweep.k_over_lambda_points"]
    if n < 2:
        raise ConfigError(
            f"sweep.k_over_lambda_points must be >= 2, got {n}")
    lo = cfg["sweep.k_over_lambda_min"]
    hi = cfg["sweep.k_over_lambda_max"]
    if not 0 < lo < hi:
        raise ConfigError("need 0 < sweep.k_over_lambda_min < "
                          f"sweep.k_over_lambda_max, got {lo} and {hi}")
    points = sweep_figure1(
        omega0=cfg["system.omega0_rad_per_s"],
        temperature=cfg["bath.temperature_K"],
        omega0_over_gamma_list=cfg["sweep.omega0_over_gamma_list"],
        k_over_lambda_grid=np.geomspace(lo, hi, n),
        max_workers=_workers())
    return render_csv(FIGURE1_HEADER, figure1_rows(points), cfg.precision())


def _cmd_crossing(cfg: RunConfig) -> str:
    rows = []
    for curve in cfg["sweep.omega0_over_gamma_list"]:
        x = crossing_point(curve,
                           omega0=cfg["system.omega0_rad_per_s"],
                           temperature=cfg["bath.temperature_K"])
        rows.append((curve, "none" if x is None else x))
    return render_csv(("omega0_over_gamma", "k_over_lambda_star"), rows,
                      cfg.precision())


_HANDLERS = {
    "rabi": _cmd_rabi,
    "coeffs": _cmd_coeffs,
    "kernels": _cmd_kernels,
    "dfactor": _cmd_dfactor,
    "evolve": _cmd_evolve,
    "figure1": _cmd_figure1,
    "crossing": _cmd_crossing,
}

# figure1 and crossing work from the sweep grid alone; no drive/bath check
_NEEDS_DRIVE = ("rabi", "coeffs", "kernels", "dfactor", "evolve")

_USAGE = """usage: spinflop <subcommand> [--config FILE] [--section.key VALUE ...]

subcommands: rabi coeffs kernels dfactor evolve figure1 crossing

Config lines are `section.key = value` (# comments allowed); flags override
the file, the file overrides the defaults. Output goes to stdout unless
output.path is set. Exit codes: 0 ok, 2 config error, 3 numerical failure.
"""


def run(argv: list[str] | None = None) -> int:
    args = list(sys.argv[1:] if argv is None else argv)
    if not args or args[0] in ("-h", "--help", "help"):
        sys.stdout.write(_USAGE)
        return 0
    try:
        sub = args[0]
        handler = _HANDLERS.get(sub)
        if handler is None:
            raise ConfigError(f"unknown subcommand {sub!r}; "
                              f"expected one of {sorted(_HANDLERS)}")
        config_path, overrides = _parse_argv(args[1:])
        cfg = load_config(config_path, overrides)
        if sub in _NEEDS_DRIVE:
            cfg.drive()    # surface missing/conflicting keys before work
            cfg.bath()
        text = handler(cfg)
        path = cfg["output.path"]
        if path:
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return 0
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SpinflopError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
